use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Operator, StateVector, C64};
use crate::models::{bloch_field, build_raman_effective_corrected, HamiltonianModel, RamanParams, E_PLUS};
use crate::pulses::{repeat_sequence, PulseSegment, PulseSequence};
use crate::simulate::Settings;

use super::{phase_rotated, rotation_half_angle, run_gate, target_gate1, GateReport};

/// Smallest `Δ / max(Ω+, Ω-)` accepted.
const MIN_DETUNING_RATIO: f64 = 5.0;
/// Smallest per-loop rotation worth iterating.
const MIN_GAMMA_LOOP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RamanTarget {
    /// Accumulate a π/2 rotation from repeated small off-resonant loops.
    Not,
    /// `exp(iγ̃ |E+><E+|)` from one resonant selective phase loop.
    Phase { gamma_tilde: f64 },
}

/// Effective field of the corrected two-level Raman Hamiltonian.
fn corrected_field(params: &RamanParams, raman_detuning: f64) -> Result<[f64; 3]> {
    let p = RamanParams {
        phase_plus: 0.0,
        phase_minus: 0.0,
        raman_detuning,
        ..*params
    };
    Ok(bloch_field(&build_raman_effective_corrected(&p)?))
}

fn transverse(b: &[f64; 3]) -> f64 {
    b[0].hypot(b[1])
}

/// Secant search for a Raman detuning with `f(δR) = 0`.
fn solve_detuning(params: &RamanParams, guess: f64, f: impl Fn(&[f64; 3], f64) -> f64) -> Result<f64> {
    let eval = |d: f64| -> Result<f64> { Ok(f(&corrected_field(params, d)?, d)) };
    let mut x0 = guess;
    let mut x1 = guess + 1e-3 * params.detuning.abs();
    let (mut f0, mut f1) = (eval(x0)?, eval(x1)?);
    for _ in 0..100 {
        if f1 == 0.0 || (x1 - x0).abs() < 1e-16 * params.detuning.abs() {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() {
            return Err(Error::Numerical("Raman detuning search diverged".into()));
        }
        if x2.abs() >= params.detuning.abs() {
            return Err(Error::Regime(format!(
                "required Raman detuning {x2:.4} rad/fs reaches the one-photon detuning Δ = {}; increase Δ/Ω",
                params.detuning
            )));
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = eval(x1)?;
    }
    if f1.abs() > 1e-12 * params.detuning.abs() {
        return Err(Error::Numerical(format!(
            "Raman detuning search stalled at residual {f1:.3e}"
        )));
    }
    Ok(x1)
}

/// Raman detuning that cancels the differential light shift, leaving a
/// purely transverse effective field.
pub fn raman_resonant_detuning(params: &RamanParams) -> Result<f64> {
    params.effective_coupling()?;
    let shift = (params.rabi_minus.powi(2) - params.rabi_plus.powi(2)) / params.detuning;
    solve_detuning(params, shift, |b, _| b[2])
}

/// Raman detuning for which one off-resonant loop rotates by `gamma`:
/// `tan(γ/2) = |B⊥| / B_z` of the corrected effective field.
pub fn raman_detuning_for_loop(params: &RamanParams, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < PI) {
        return Err(Error::Configuration(format!(
            "loop angle must lie in (0, π), got {gamma}"
        )));
    }
    let g = params.effective_coupling()?;
    let t = (gamma / 2.0).tan();
    solve_detuning(params, 2.0 * g / t, |b, _| b[2] - transverse(b) / t)
}

fn segment(b: &[f64; 3], phase: f64, raman_detuning: f64, duration: f64) -> Result<PulseSegment> {
    PulseSegment::new(transverse(b), phase, raman_detuning, duration)
}

fn three_level(params: &RamanParams) -> HamiltonianModel {
    HamiltonianModel::RamanThreeLevel {
        rabi_plus: params.rabi_plus,
        rabi_minus: params.rabi_minus,
        detuning: params.detuning,
    }
}

/// One off-resonant loop: two π-pulses of the corrected effective field
/// with opposite transverse directions, at `params.raman_detuning`.
pub fn loop_sequence(params: &RamanParams) -> Result<PulseSequence> {
    let dr = params.raman_detuning;
    if dr == 0.0 {
        return Err(Error::Configuration(
            "NOT via loop iteration needs a nonzero Raman detuning (see tune_raman_loop)".into(),
        ));
    }
    let base = params.phase_plus - params.phase_minus + PI;
    let b = corrected_field(params, dr)?;
    let field = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let t = PI / (2.0 * field);
    PulseSequence::new(vec![segment(&b, base, dr, t)?, segment(&b, base + PI, dr, t)?], 1)
}

fn loop_gamma(model: &HamiltonianModel, one_loop: &PulseSequence, settings: &Settings) -> Result<f64> {
    let single = run_gate(one_loop, model, None, &StateVector::basis(3, E_PLUS), settings)?;
    rotation_half_angle(&single.realized.submatrix(&model.logical_pair()))
}

/// Per-loop rotation `γ_loop` of [`loop_sequence`] measured on the full
/// three-level model.
pub fn measure_loop_gamma(params: &RamanParams, settings: &Settings) -> Result<f64> {
    loop_gamma(&three_level(params), &loop_sequence(params)?, settings)
}

/// Raman detuning whose loop, run on the full three-level model, rotates
/// the logical pair by `gamma`. Starts from [`raman_detuning_for_loop`].
pub fn tune_raman_loop(params: &RamanParams, gamma: f64, settings: &Settings) -> Result<f64> {
    let eval = |d: f64| -> Result<f64> {
        measure_loop_gamma(
            &RamanParams {
                raman_detuning: d,
                ..*params
            },
            settings,
        )
        .map(|g| g - gamma)
    };
    let mut x0 = raman_detuning_for_loop(params, gamma)?;
    let mut x1 = x0 * (1.0 - 0.02);
    let (mut f0, mut f1) = (eval(x0)?, eval(x1)?);
    for _ in 0..30 {
        if f1.abs() < 1e-10 || f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() || x2.abs() >= params.detuning.abs() {
            return Err(Error::Regime(format!(
                "no Raman detuning below Δ = {} reaches a loop rotation of {gamma}; increase Δ/Ω",
                params.detuning
            )));
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = eval(x1)?;
    }
    if f1.abs() > 1e-8 {
        return Err(Error::Numerical(format!(
            "loop tuning stalled {f1:.3e} rad from the requested angle"
        )));
    }
    Ok(x1)
}

/// Single-qubit gate on the polarization-encoded qubit `(|E+>, |E->)`.
///
/// Pulses are timed on the corrected effective model and run on the full
/// three-level system. For [`RamanTarget::Not`] the loop rotation `γ_loop`
/// is measured from a single-loop run and the loop repeated
/// `ceil((π/2)/γ_loop)` times; `params.raman_detuning` sets the loop (see
/// [`tune_raman_loop`]).
pub fn raman_gate(params: &RamanParams, target: RamanTarget, settings: &Settings) -> Result<GateReport> {
    let max_rabi = params.rabi_plus.max(params.rabi_minus);
    if params.detuning == 0.0 || params.detuning.abs() < MIN_DETUNING_RATIO * max_rabi {
        return Err(Error::Regime(format!(
            "Δ/Ω = {:.2} is below {MIN_DETUNING_RATIO}; the intermediate level cannot be eliminated",
            params.detuning.abs() / max_rabi
        )));
    }
    let model = three_level(params);
    let base = params.phase_plus - params.phase_minus + PI;
    let psi0 = StateVector::basis(3, E_PLUS);

    match target {
        RamanTarget::Not => {
            let one_loop = loop_sequence(params)?;
            let gamma_loop = loop_gamma(&model, &one_loop, settings)?;
            if gamma_loop < MIN_GAMMA_LOOP {
                return Err(Error::Regime(format!(
                    "per-loop rotation {gamma_loop:.2e} rad is below {MIN_GAMMA_LOOP:.0e}; increase Ω²/Δ or the Raman detuning"
                )));
            }
            let n = ((PI / 2.0) / gamma_loop).ceil() as u32;
            let seq = repeat_sequence(&one_loop, n)?;
            let goal = phase_rotated(&target_gate1(PI / 2.0), base);
            let mut report = run_gate(&seq, &model, Some(&goal), &psi0, settings)?;
            report.gamma_loop = Some(gamma_loop);
            Ok(report)
        }
        RamanTarget::Phase { gamma_tilde } => {
            let dr = raman_resonant_detuning(params)?;
            let b = corrected_field(params, dr)?;
            let t = PI / (2.0 * transverse(&b));
            let phi0 = gamma_tilde / 4.0;
            let seq = PulseSequence::new(
                vec![segment(&b, base + phi0, dr, t)?, segment(&b, base - phi0, dr, t)?],
                1,
            )?;
            let goal = Operator::diagonal(&[C64::from_polar(1.0, gamma_tilde), C64::new(1.0, 0.0)]);
            run_gate(&seq, &model, Some(&goal), &psi0, settings)
        }
    }
}
