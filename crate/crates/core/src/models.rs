//! Hamiltonian builders for the exciton level schemes.
//!
//! Basis orders are fixed:
//! * two-level: `(|E>, |G>)`, so `σz = +1` on the exciton;
//! * biexciton: `(|GG>, |GE>, |EG>, |EE>)`, first letter is dot 1;
//! * Raman: `(|E+>, |E->, |G>)`;
//! * two-photon effective: `(|EE>, |GG>)`.
//!
//! Rotating-frame two-level Hamiltonians are written `B·σ` with
//! `B = (Ω cos φ, Ω sin φ, Δω/2)` and `Δω = ω0 - ωL`. The lab-frame builder keeps
//! the explicit minus sign of the dipole coupling, so its laser phase maps to
//! the rotating-frame phase `φ + π`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sigma_x, sigma_y, sigma_z, Operator, StateVector, C64};
use crate::pulses::PulseSegment;

pub const E: usize = 0;
pub const G: usize = 1;

pub const GG: usize = 0;
pub const GE: usize = 1;
pub const EG: usize = 2;
pub const EE: usize = 3;

pub const E_PLUS: usize = 0;
pub const E_MINUS: usize = 1;
pub const RAMAN_G: usize = 2;

/// Wrap an angle to `(-π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let mut x = phi.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// `B·σ` on the two-level basis `(|E>, |G>)`.
pub fn bloch_hamiltonian(b: [f64; 3]) -> Operator {
    let terms = [sigma_x(), sigma_y(), sigma_z()];
    let mut h = Operator::zeros(2);
    for (bk, s) in b.iter().zip(terms.iter()) {
        h = &h + &s.scale(C64::new(*bk, 0.0));
    }
    h
}

/// Effective field `Bᵢ = Tr(H σᵢ)/2` of a 2×2 Hamiltonian.
pub fn bloch_field(h: &Operator) -> [f64; 3] {
    let f = |s: Operator| h.matmul(&s).trace().re / 2.0;
    [f(sigma_x()), f(sigma_y()), f(sigma_z())]
}

/// Rotating-frame Hamiltonian `B·σ` for a laser of Rabi frequency `rabi`,
/// phase `phase` and detuning `detuning = ω0 - ωL`.
pub fn build_rotating_two_level(rabi: f64, phase: f64, detuning: f64) -> Result<Operator> {
    if !(rabi >= 0.0) {
        return Err(Error::Model(format!("Rabi frequency must be >= 0, got {rabi}")));
    }
    Ok(bloch_hamiltonian([
        rabi * phase.cos(),
        rabi * phase.sin(),
        detuning / 2.0,
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelParams {
    pub omega0: f64,
    pub omega_l: f64,
    pub rabi: f64,
    /// Laser phase in the lab-frame coupling, wrapped to (-π, π].
    pub phase: f64,
}

impl TwoLevelParams {
    pub fn new(omega0: f64, omega_l: f64, rabi: f64, phase: f64) -> Result<Self> {
        if !(omega0 > 0.0) {
            return Err(Error::Model(format!("transition frequency must be > 0, got {omega0}")));
        }
        if !(rabi >= 0.0) {
            return Err(Error::Model(format!("Rabi frequency must be >= 0, got {rabi}")));
        }
        Ok(Self {
            omega0,
            omega_l,
            rabi,
            phase: wrap_phase(phase),
        })
    }

    pub fn detuning(&self) -> f64 {
        self.omega0 - self.omega_l
    }
}

/// Lab-frame two-level Hamiltonian
/// `diag(ω0/2, -ω0/2) - [Ω e^{-i(ωL t + φ)} |E><G| + h.c.]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabTwoLevel {
    pub params: TwoLevelParams,
}

impl LabTwoLevel {
    pub fn at(&self, t: f64) -> Operator {
        let p = &self.params;
        let coupling = C64::from_polar(p.rabi, -(p.omega_l * t + p.phase)) * -1.0;
        Operator::from_rows(
            2,
            vec![
                C64::new(p.omega0 / 2.0, 0.0),
                coupling,
                coupling.conj(),
                C64::new(-p.omega0 / 2.0, 0.0),
            ],
        )
    }

    /// The equivalent rotating-frame Hamiltonian at the laser frequency.
    pub fn rotating(&self) -> Operator {
        let p = &self.params;
        bloch_hamiltonian([
            p.rabi * (p.phase + PI).cos(),
            p.rabi * (p.phase + PI).sin(),
            p.detuning() / 2.0,
        ])
    }
}

pub fn build_lab_two_level(params: TwoLevelParams) -> LabTwoLevel {
    LabTwoLevel { params }
}

/// Map lab-frame amplitudes to the frame rotating at `omega_l`:
/// `diag(e^{iωL t/2}, e^{-iωL t/2})`.
pub fn frame_rotate(psi_lab: &StateVector, omega_l: f64, t: f64) -> Result<StateVector> {
    if psi_lab.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: psi_lab.dim(),
        });
    }
    let a = psi_lab.amplitudes();
    let half = omega_l * t / 2.0;
    Ok(StateVector::from_raw(vec![
        a[0] * C64::from_polar(1.0, half),
        a[1] * C64::from_polar(1.0, -half),
    ]))
}

/// Inverse of [`frame_rotate`].
pub fn frame_unrotate(psi_rot: &StateVector, omega_l: f64, t: f64) -> Result<StateVector> {
    frame_rotate(psi_rot, -omega_l, t)
}

/// Outcome of a regime check on model parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    /// Perturbation ratio of the effective model (Ω/Δ or Ω₊/δ).
    pub ratio: f64,
    pub warnings: Vec<String>,
}

impl Validity {
    pub fn is_clean(&self) -> bool {
        self.warnings.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Laser {
    pub rabi: f64,
    pub phase: f64,
    pub frequency: f64,
}

/// Two coupled dots with biexcitonic shift `delta`; laser 1 drives dot 1 and
/// laser 2 drives dot 2.
///
/// Rabi frequencies here are population-oscillation rates: each laser enters
/// the Hamiltonian with coupling `Ω/2`. In this convention the two-photon
/// Rabi frequency is `2 Ω1 Ω2 / δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiexcitonParams {
    pub omega0: f64,
    pub delta: f64,
    pub laser1: Laser,
    pub laser2: Laser,
}

impl BiexcitonParams {
    /// Both lasers at the two-photon resonance `ωL = ω0 + δ/2`, equal Rabi
    /// frequencies and zero phases.
    pub fn resonant(omega0: f64, delta: f64, rabi: f64) -> Self {
        let laser = Laser {
            rabi,
            phase: 0.0,
            frequency: Self::two_photon_resonance(omega0, delta),
        };
        Self {
            omega0,
            delta,
            laser1: laser,
            laser2: laser,
        }
    }

    /// Laser frequency for which two photons bridge `|GG> -> |EE>`.
    pub fn two_photon_resonance(omega0: f64, delta: f64) -> f64 {
        omega0 + delta / 2.0
    }

    /// `(E_EE - E_GG) - ωL1 - ωL2`
    pub fn two_photon_detuning(&self) -> f64 {
        2.0 * self.omega0 + self.delta - self.laser1.frequency - self.laser2.frequency
    }

    pub fn ratio(&self) -> f64 {
        self.laser1.rabi.max(self.laser2.rabi) / self.delta.abs()
    }

    pub fn validity(&self) -> Validity {
        let mut warnings = Vec::new();
        if self.delta == 0.0 {
            warnings.push("biexcitonic shift is zero: two-photon and single-photon resonances coincide".into());
        }
        if !(self.omega0 > 0.0) {
            warnings.push(format!("transition frequency must be > 0, got {}", self.omega0));
        }
        if self.laser1.rabi < 0.0 || self.laser2.rabi < 0.0 {
            warnings.push("Rabi frequencies must be >= 0".into());
        }
        let ratio = if self.delta == 0.0 { f64::INFINITY } else { self.ratio() };
        if ratio > 0.1 {
            warnings.push(format!(
                "Ω+/δ = {ratio:.3} exceeds 0.1; two-photon elimination unreliable"
            ));
        }
        let detuning = self.two_photon_detuning();
        if self.delta != 0.0 && detuning.abs() > 0.5 * self.delta.abs() {
            warnings.push(format!(
                "lasers are {detuning:.3e} rad/fs off the two-photon resonance (δ = {})",
                self.delta
            ));
        }
        Validity { ratio, warnings }
    }

    fn check(&self) -> Result<()> {
        if !(self.omega0 > 0.0) {
            return Err(Error::Model(format!(
                "transition frequency must be > 0, got {}",
                self.omega0
            )));
        }
        if self.laser1.rabi < 0.0 || self.laser2.rabi < 0.0 {
            return Err(Error::Model("Rabi frequencies must be >= 0".into()));
        }
        Ok(())
    }

    /// Per-basis-state rates θ of the frame `ψ_rot = e^{iθt} ψ_lab` in which
    /// both lasers are static.
    pub fn frame_rates(&self) -> [f64; 4] {
        let base = -self.omega0;
        [
            base,
            base + self.laser2.frequency,
            base + self.laser1.frequency,
            base + self.laser1.frequency + self.laser2.frequency,
        ]
    }
}

fn add_dot_couplings(h: &mut Operator, c1: C64, c2: C64) {
    // dot 1: |G.> -> |E.>
    for (g, e) in [(GG, EG), (GE, EE)] {
        h[(e, g)] += c1;
        h[(g, e)] += c1.conj();
    }
    // dot 2: |.G> -> |.E>
    for (g, e) in [(GG, GE), (EG, EE)] {
        h[(e, g)] += c2;
        h[(g, e)] += c2.conj();
    }
}

/// Lab-frame biexciton Hamiltonian with `H0 = diag(-ω0, 0, 0, ω0 + δ)`.
/// Single-photon couplings are all retained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiexcitonLab {
    pub params: BiexcitonParams,
}

impl BiexcitonLab {
    pub fn at(&self, t: f64) -> Operator {
        let p = &self.params;
        let mut h = Operator::real_diagonal(&[-p.omega0, 0.0, 0.0, p.omega0 + p.delta]);
        let c = |l: &Laser| C64::from_polar(l.rabi / 2.0, -(l.frequency * t + l.phase)) * -1.0;
        add_dot_couplings(&mut h, c(&p.laser1), c(&p.laser2));
        h
    }
}

pub fn build_biexciton_full(params: BiexcitonParams) -> Result<BiexcitonLab> {
    params.check()?;
    Ok(BiexcitonLab { params })
}

/// The biexciton Hamiltonian in the frame where both lasers are static
/// (see [`BiexcitonParams::frame_rates`]). Exactly equivalent to the lab
/// frame since the coupling has no counter-rotating part.
pub fn build_biexciton_rotating(params: &BiexcitonParams) -> Result<Operator> {
    params.check()?;
    let r = params.frame_rates();
    let lab = [-params.omega0, 0.0, 0.0, params.omega0 + params.delta];
    let diag: Vec<f64> = lab
        .iter()
        .zip(r.iter())
        .map(|(e, th)| e - th - (lab[0] - r[0]))
        .collect();
    let mut h = Operator::real_diagonal(&diag);
    let c = |l: &Laser| C64::from_polar(l.rabi / 2.0, -l.phase) * -1.0;
    add_dot_couplings(&mut h, c(&params.laser1), c(&params.laser2));
    Ok(h)
}

/// Map lab amplitudes to the static-laser frame.
pub fn biexciton_frame_rotate(psi: &StateVector, params: &BiexcitonParams, t: f64) -> Result<StateVector> {
    if psi.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: psi.dim(),
        });
    }
    let r = params.frame_rates();
    Ok(StateVector::from_raw(
        psi.amplitudes()
            .iter()
            .zip(r.iter())
            .map(|(a, th)| a * C64::from_polar(1.0, th * t))
            .collect(),
    ))
}

/// Two-photon Rabi frequency `2 Ω1 Ω2 / δ`.
pub fn two_photon_rabi(params: &BiexcitonParams) -> Result<f64> {
    if params.delta == 0.0 {
        return Err(Error::Singular {
            what: "biexcitonic shift",
            message: "δ = 0 leaves the two-photon coupling undefined".into(),
        });
    }
    Ok(2.0 * params.laser1.rabi * params.laser2.rabi / params.delta)
}

/// Effective `|GG> <-> |EE>` Hamiltonian on the basis `(|EE>, |GG>)`, in the
/// frame of [`build_biexciton_rotating`]: `B·σ` with
/// `B = (Ω_eff/2)(cos(φ1+φ2), sin(φ1+φ2), 0) + (0, 0, Δ2/2)`.
pub fn build_two_photon_effective(params: &BiexcitonParams) -> Result<Operator> {
    let rabi_eff = two_photon_rabi(params)?;
    let phase = params.laser1.phase + params.laser2.phase;
    build_rotating_two_level(rabi_eff / 2.0, phase, params.two_photon_detuning())
}

/// Polarization-encoded qubit: `|E+>` and `|E->` coupled to `|G>` by σ+ and
/// σ- lasers detuned by `detuning` from the exciton line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamanParams {
    pub rabi_plus: f64,
    pub rabi_minus: f64,
    pub detuning: f64,
    pub phase_plus: f64,
    pub phase_minus: f64,
    /// Energy splitting `E(E+) - E(E-)` in the laser frame; zero at Raman
    /// resonance.
    #[serde(default)]
    pub raman_detuning: f64,
}

impl RamanParams {
    pub fn symmetric(rabi: f64, detuning: f64) -> Self {
        Self {
            rabi_plus: rabi,
            rabi_minus: rabi,
            detuning,
            phase_plus: 0.0,
            phase_minus: 0.0,
            raman_detuning: 0.0,
        }
    }

    /// `max(Ω+, Ω-) / |Δ|`
    pub fn ratio(&self) -> f64 {
        self.rabi_plus.max(self.rabi_minus) / self.detuning.abs()
    }

    pub fn validity(&self) -> Validity {
        let mut warnings = Vec::new();
        if self.detuning == 0.0 {
            warnings.push("Raman detuning Δ is zero: intermediate level is resonant".into());
        }
        if self.rabi_plus < 0.0 || self.rabi_minus < 0.0 {
            warnings.push("Rabi frequencies must be >= 0".into());
        }
        let ratio = if self.detuning == 0.0 {
            f64::INFINITY
        } else {
            self.ratio()
        };
        if ratio > 0.2 {
            warnings.push(format!(
                "Ω/Δ = {ratio:.3} exceeds 0.2; adiabatic elimination unreliable"
            ));
        }
        Validity { ratio, warnings }
    }

    /// Raman coupling `Ω+ Ω- / Δ`.
    pub fn effective_coupling(&self) -> Result<f64> {
        if self.detuning == 0.0 {
            return Err(Error::Singular {
                what: "Raman detuning",
                message: "Δ = 0 leaves the effective coupling undefined".into(),
            });
        }
        Ok(self.rabi_plus * self.rabi_minus / self.detuning.abs())
    }

    fn check(&self) -> Result<()> {
        if self.detuning == 0.0 {
            return Err(Error::Singular {
                what: "Raman detuning",
                message: "Δ must be nonzero".into(),
            });
        }
        if self.rabi_plus < 0.0 || self.rabi_minus < 0.0 {
            return Err(Error::Model("Rabi frequencies must be >= 0".into()));
        }
        Ok(())
    }
}

/// Three-level Raman Hamiltonian on `(|E+>, |E->, |G>)` in the frame rotating
/// with both lasers: `diag(δR/2, -δR/2, Δ)` plus `<G|H|E±> = Ω± e^{iφ±}`.
/// There is no direct `|E+> <-> |E->` element.
pub fn build_raman_three_level(params: &RamanParams) -> Result<Operator> {
    params.check()?;
    let mut h = Operator::real_diagonal(&[
        params.raman_detuning / 2.0,
        -params.raman_detuning / 2.0,
        params.detuning,
    ]);
    let cp = C64::from_polar(params.rabi_plus, params.phase_plus);
    let cm = C64::from_polar(params.rabi_minus, params.phase_minus);
    h[(RAMAN_G, E_PLUS)] = cp;
    h[(E_PLUS, RAMAN_G)] = cp.conj();
    h[(RAMAN_G, E_MINUS)] = cm;
    h[(E_MINUS, RAMAN_G)] = cm.conj();
    Ok(h)
}

/// Adiabatically eliminated Raman Hamiltonian on `(|E+>, |E->)`:
/// `<E+|H|E-> = -(Ω+Ω-/Δ) e^{-i(φ+ - φ-)}`, i.e. `B·σ` with transverse
/// magnitude `Ω+Ω-/Δ` and phase `φ+ - φ- + π`, plus the Raman detuning on σz.
pub fn build_raman_effective(params: &RamanParams) -> Result<Operator> {
    let g = params.effective_coupling()?;
    let phase = params.phase_plus - params.phase_minus + if params.detuning > 0.0 { PI } else { 0.0 };
    build_rotating_two_level(g, phase, params.raman_detuning)
}

/// Second-order effective Raman Hamiltonian including the light shifts of
/// both logical levels and the energy dependence of the denominators.
pub fn build_raman_effective_corrected(params: &RamanParams) -> Result<Operator> {
    let h = build_raman_three_level(params)?;
    let (ea, eb, eg) = (
        h[(E_PLUS, E_PLUS)].re,
        h[(E_MINUS, E_MINUS)].re,
        h[(RAMAN_G, RAMAN_G)].re,
    );
    if ea == eg || eb == eg {
        return Err(Error::Singular {
            what: "Raman detuning",
            message: "a logical level is degenerate with |G>".into(),
        });
    }
    let va = h[(E_PLUS, RAMAN_G)];
    let vb = h[(E_MINUS, RAMAN_G)];
    let mut out = Operator::zeros(2);
    out[(0, 0)] = C64::new(ea + va.norm_sqr() / (ea - eg), 0.0);
    out[(1, 1)] = C64::new(eb + vb.norm_sqr() / (eb - eg), 0.0);
    let off = va * vb.conj() * 0.5 * (1.0 / (ea - eg) + 1.0 / (eb - eg));
    out[(0, 1)] = off;
    out[(1, 0)] = off.conj();
    Ok(out)
}

/// Which Hamiltonian a pulse sequence drives.
///
/// Every segment describes the logical two-level drive
/// `B = (rabi cos φ, rabi sin φ, detuning/2)`. The ideal two-level models use
/// the segment's Rabi frequency; the full multilevel models take their laser
/// strengths from the model and map the segment phase and detuning onto the
/// lasers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianModel {
    /// Ideal `B·σ`.
    RotatingTwoLevel,
    /// Lab frame with transition frequency `omega0`; laser `ωL = ω0 - detuning`.
    LabTwoLevel { omega0: f64 },
    /// Full three-level Raman system. Segment phase sets `φ+ = phase - π`
    /// (with `φ- = 0`), segment detuning sets the Raman detuning.
    RamanThreeLevel {
        rabi_plus: f64,
        rabi_minus: f64,
        detuning: f64,
    },
    /// Eliminated Raman system with the same segment mapping.
    RamanEffective {
        rabi_plus: f64,
        rabi_minus: f64,
        detuning: f64,
    },
    /// Full four-level biexciton system in the static-laser frame. Segment phase
    /// sets `φ1 = φ2 = phase/2`, segment detuning sets the two-photon detuning.
    Biexciton {
        omega0: f64,
        delta: f64,
        rabi1: f64,
        rabi2: f64,
    },
    /// Eliminated two-photon model with the same segment mapping.
    TwoPhotonEffective {
        omega0: f64,
        delta: f64,
        rabi1: f64,
        rabi2: f64,
    },
}

/// Hamiltonian in force during one segment.
#[derive(Debug, Clone)]
pub enum SegmentDrive {
    Constant(Operator),
    Lab(LabTwoLevel),
}

impl crate::propagate::Generator for SegmentDrive {
    fn with_at<R>(&self, t: f64, f: impl FnOnce(&Operator) -> R) -> R {
        match self {
            SegmentDrive::Constant(h) => f(h),
            SegmentDrive::Lab(lab) => f(&lab.at(t)),
        }
    }
}

impl HamiltonianModel {
    pub fn dim(&self) -> usize {
        match self {
            Self::RotatingTwoLevel
            | Self::LabTwoLevel { .. }
            | Self::RamanEffective { .. }
            | Self::TwoPhotonEffective { .. } => 2,
            Self::RamanThreeLevel { .. } => 3,
            Self::Biexciton { .. } => 4,
        }
    }

    /// Basis indices of the two logical levels driven by the segments, in
    /// `(|E>-like, |G>-like)` order.
    pub fn logical_pair(&self) -> [usize; 2] {
        match self {
            Self::RamanThreeLevel { .. } => [E_PLUS, E_MINUS],
            Self::Biexciton { .. } => [EE, GG],
            _ => [0, 1],
        }
    }

    pub fn is_lab_frame(&self) -> bool {
        matches!(self, Self::LabTwoLevel { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::RotatingTwoLevel => "rotating-two-level",
            Self::LabTwoLevel { .. } => "lab-two-level",
            Self::RamanThreeLevel { .. } => "raman-three-level",
            Self::RamanEffective { .. } => "raman-effective",
            Self::Biexciton { .. } => "biexciton",
            Self::TwoPhotonEffective { .. } => "two-photon-effective",
        }
    }

    pub fn raman_params(&self, seg: &PulseSegment) -> Option<RamanParams> {
        match *self {
            Self::RamanThreeLevel {
                rabi_plus,
                rabi_minus,
                detuning,
            }
            | Self::RamanEffective {
                rabi_plus,
                rabi_minus,
                detuning,
            } => Some(RamanParams {
                rabi_plus,
                rabi_minus,
                detuning,
                phase_plus: seg.phase - PI,
                phase_minus: 0.0,
                raman_detuning: seg.detuning,
            }),
            _ => None,
        }
    }

    pub fn biexciton_params(&self, seg: &PulseSegment) -> Option<BiexcitonParams> {
        match *self {
            Self::Biexciton {
                omega0,
                delta,
                rabi1,
                rabi2,
            }
            | Self::TwoPhotonEffective {
                omega0,
                delta,
                rabi1,
                rabi2,
            } => {
                let freq = BiexcitonParams::two_photon_resonance(omega0, delta) - seg.detuning / 2.0;
                let half = seg.phase / 2.0;
                Some(BiexcitonParams {
                    omega0,
                    delta,
                    laser1: Laser {
                        rabi: rabi1,
                        phase: half,
                        frequency: freq,
                    },
                    laser2: Laser {
                        rabi: rabi2,
                        phase: half,
                        frequency: freq,
                    },
                })
            }
            _ => None,
        }
    }

    /// Transverse field `|B⊥|` of the logical drive implied by the model's own
    /// laser strengths (`None` for the ideal models, where segments set it).
    pub fn logical_rabi(&self) -> Result<Option<f64>> {
        let seg = PulseSegment::free(1.0);
        if let Some(p) = self.raman_params(&seg) {
            return Ok(Some(p.effective_coupling()?));
        }
        if let Some(p) = self.biexciton_params(&seg) {
            return Ok(Some(two_photon_rabi(&p)? / 2.0));
        }
        Ok(None)
    }

    pub fn validity(&self) -> Validity {
        let seg = PulseSegment::free(1.0);
        if let Some(p) = self.raman_params(&seg) {
            return p.validity();
        }
        if let Some(p) = self.biexciton_params(&seg) {
            return p.validity();
        }
        Validity::default()
    }

    pub fn drive(&self, seg: &PulseSegment) -> Result<SegmentDrive> {
        let h = match *self {
            Self::RotatingTwoLevel => build_rotating_two_level(seg.rabi, seg.phase, seg.detuning)?,
            Self::LabTwoLevel { omega0 } => {
                let params = TwoLevelParams::new(omega0, omega0 - seg.detuning, seg.rabi, seg.phase - PI)?;
                return Ok(SegmentDrive::Lab(build_lab_two_level(params)));
            }
            Self::RamanThreeLevel { .. } => build_raman_three_level(&self.raman_params(seg).unwrap())?,
            Self::RamanEffective { .. } => build_raman_effective(&self.raman_params(seg).unwrap())?,
            Self::Biexciton { .. } => build_biexciton_rotating(&self.biexciton_params(seg).unwrap())?,
            Self::TwoPhotonEffective { .. } => build_two_photon_effective(&self.biexciton_params(seg).unwrap())?,
        };
        Ok(SegmentDrive::Constant(h))
    }

    /// Rotating-frame Hamiltonian used for energies and the reported frame.
    pub fn frame_hamiltonian(&self, seg: &PulseSegment) -> Result<Operator> {
        match self.drive(seg)? {
            SegmentDrive::Constant(h) => Ok(h),
            SegmentDrive::Lab(lab) => Ok(lab.rotating()),
        }
    }
}
