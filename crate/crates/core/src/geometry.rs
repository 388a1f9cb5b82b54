//! Bloch-sphere trajectories and the phases of cyclic evolutions.
//!
//! Sign conventions: the dynamical phase is `-∫<ψ|H|ψ>dt`, so
//! `total = dynamical + geometric`; solid angles are positive for loops
//! traversed counter-clockwise seen from outside the sphere. With these
//! conventions a cyclic qubit loop has geometric phase `-Ω/2 (mod 2π)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{StateVector, C64};
use crate::models::wrap_phase;

/// Largest Bloch-vector mismatch accepted as a closed loop.
pub const CYCLIC_TOL: f64 = 1e-4;
/// Largest great-circle step between samples for the solid-angle sum.
pub const MAX_SAMPLE_GAP: f64 = 0.1;

pub type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn length(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn normalized(a: &Vec3) -> Vec3 {
    let l = length(a);
    [a[0] / l, a[1] / l, a[2] / l]
}

/// Great-circle distance between two directions.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    length(&cross(a, b)).atan2(dot(a, b))
}

/// `(2 Re(a* b), 2 Im(a* b), |a|² - |b|²)` for the amplitudes of a level pair;
/// for a qubit this is `(<σx>, <σy>, <σz>)`.
pub fn pair_bloch_vector(a: C64, b: C64) -> Vec3 {
    let ab = a.conj() * b;
    [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()]
}

pub fn bloch_vector(psi: &StateVector) -> Result<Vec3> {
    if psi.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: psi.dim(),
        });
    }
    let a = psi.amplitudes();
    Ok(pair_bloch_vector(a[0], a[1]))
}

/// Qubit state with Bloch vector along `n` (any nonzero length).
pub fn bloch_state(n: &Vec3) -> StateVector {
    let n = normalized(n);
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    StateVector::from_raw(vec![
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochSample {
    /// fs
    pub t: f64,
    /// Bloch vector of the logical pair.
    pub n: Vec3,
    /// `<ψ|H|ψ>` with the Hamiltonian in force from `t` onward.
    pub energy: f64,
    /// `<ψ|H|ψ>` with the Hamiltonian in force just before `t`; differs from
    /// `energy` only at switching instants.
    pub energy_incoming: f64,
    pub dyn_phase_accum: f64,
}

/// Time-ordered samples of one evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<BlochSample>,
    pub states: Vec<StateVector>,
    pub model: String,
    /// Basis indices forming the Bloch sphere.
    pub pair: [usize; 2],
}

impl Trajectory {
    /// Assemble from sampled states and one-sided energies.
    pub fn new(
        times: Vec<f64>,
        states: Vec<StateVector>,
        energy: Vec<f64>,
        energy_incoming: Vec<f64>,
        model: impl Into<String>,
        pair: [usize; 2],
    ) -> Result<Self> {
        let n = times.len();
        if states.len() != n || energy.len() != n || energy_incoming.len() != n {
            return Err(Error::Model("trajectory columns have unequal lengths".into()));
        }
        if n == 0 {
            return Err(Error::Model("trajectory has no samples".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::Model(format!(
                "trajectory must start at t = 0, starts at {}",
                times[0]
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Model("trajectory times must be strictly increasing".into()));
        }
        let mut samples = Vec::with_capacity(n);
        let mut acc = 0.0;
        for k in 0..n {
            if k > 0 {
                acc -= 0.5 * (energy[k - 1] + energy_incoming[k]) * (times[k] - times[k - 1]);
            }
            let a = states[k].amplitudes();
            samples.push(BlochSample {
                t: times[k],
                n: pair_bloch_vector(a[pair[0]], a[pair[1]]),
                energy: energy[k],
                energy_incoming: energy_incoming[k],
                dyn_phase_accum: acc,
            });
        }
        Ok(Self {
            samples,
            states,
            model: model.into(),
            pair,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    /// Distance between the end points, `2 sqrt(1 - |<ψ(0)|ψ(T)>|²)`; equals
    /// `|n(T) - n(0)|` for a qubit.
    pub fn cyclic_mismatch(&self) -> f64 {
        // projector difference: avoids the cancellation in 1 - |<ψ0|ψT>|²
        let a = self.states[0].amplitudes();
        let b = self.states.last().unwrap().amplitudes();
        let mut sq = 0.0;
        for i in 0..a.len() {
            for j in 0..a.len() {
                sq += (a[i] * a[j].conj() - b[i] * b[j].conj()).norm_sqr();
            }
        }
        (2.0 * sq).sqrt()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic_mismatch() <= CYCLIC_TOL
    }

    /// Multiply every state by `e^{iχ(t)}`. The implied Hamiltonian shifts by
    /// `-χ'(t)`, which is applied to the recorded energies; the accumulated
    /// dynamical phase shifts by exactly `χ(t) - χ(0)`.
    pub fn regauge(&self, chi: impl Fn(f64) -> f64, chi_dot: impl Fn(f64) -> f64) -> Result<Trajectory> {
        let times: Vec<f64> = self.samples.iter().map(|s| s.t).collect();
        let states = self
            .states
            .iter()
            .zip(&times)
            .map(|(s, &t)| s.scaled(C64::from_polar(1.0, chi(t))))
            .collect();
        let energy = self.samples.iter().map(|s| s.energy - chi_dot(s.t)).collect();
        let incoming = self.samples.iter().map(|s| s.energy_incoming - chi_dot(s.t)).collect();
        let mut out = Trajectory::new(times, states, energy, incoming, self.model.clone(), self.pair)?;
        let chi0 = chi(0.0);
        for (new, old) in out.samples.iter_mut().zip(&self.samples) {
            new.dyn_phase_accum = old.dyn_phase_accum + chi(old.t) - chi0;
        }
        Ok(out)
    }
}

/// `-∫ <ψ|H|ψ> dt` by the trapezoidal rule over the samples.
pub fn dynamical_phase(traj: &Trajectory) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::Model("dynamical phase needs at least two samples".into()));
    }
    Ok(traj.samples.last().unwrap().dyn_phase_accum)
}

fn require_cyclic(traj: &Trajectory) -> Result<()> {
    let mismatch = traj.cyclic_mismatch();
    if mismatch > CYCLIC_TOL {
        return Err(Error::NotCyclic { mismatch });
    }
    Ok(())
}

/// `arg <ψ(0)|ψ(T)>` in (-π, π] for a cyclic trajectory.
pub fn total_phase(traj: &Trajectory) -> Result<f64> {
    require_cyclic(traj)?;
    let overlap = traj.states[0].inner(traj.states.last().unwrap());
    Ok(wrap_phase(overlap.arg()))
}

/// Aharonov–Anandan phase: total minus dynamical, wrapped to (-π, π].
pub fn aa_phase(traj: &Trajectory) -> Result<f64> {
    let total = total_phase(traj)?;
    Ok(wrap_phase(total - dynamical_phase(traj)?))
}

/// Signed solid angle of the spherical triangle `(r, a, b)`.
fn triangle_solid_angle(r: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let num = dot(r, &cross(a, b));
    let den = 1.0 + dot(r, a) + dot(a, b) + dot(b, r);
    2.0 * num.atan2(den)
}

/// Signed area of the closed geodesic polygon through `points` (unit
/// vectors), reduced to (-2π, 2π]. Uses a fan of triangles from a reference
/// direction chosen as far as possible from every vertex's antipode.
pub fn polygon_solid_angle(points: &[Vec3]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let s = 1.0 / 3f64.sqrt();
    let mut candidates: Vec<Vec3> = vec![
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
    ];
    for sx in [-s, s] {
        for sy in [-s, s] {
            for sz in [-s, s] {
                candidates.push([sx, sy, sz]);
            }
        }
    }
    let reference = candidates
        .iter()
        .map(|r| (r, points.iter().map(|p| 1.0 + dot(r, p)).fold(f64::INFINITY, f64::min)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(r, _)| *r)
        .unwrap();
    let mut total = 0.0;
    for k in 0..points.len() {
        let a = &points[k];
        let b = &points[(k + 1) % points.len()];
        total += triangle_solid_angle(&reference, a, b);
    }
    let mut x = total.rem_euclid(4.0 * PI);
    if x > 2.0 * PI {
        x -= 4.0 * PI;
    }
    x
}

/// Signed solid angle enclosed by a cyclic trajectory on the Bloch sphere.
pub fn solid_angle(traj: &Trajectory) -> Result<f64> {
    require_cyclic(traj)?;
    let points: Vec<Vec3> = traj
        .samples
        .iter()
        .map(|s| {
            if length(&s.n) == 0.0 {
                Err(Error::Model(format!("logical pair unpopulated at t = {}", s.t)))
            } else {
                Ok(normalized(&s.n))
            }
        })
        .collect::<Result<_>>()?;
    for w in points.windows(2) {
        let gap = angle_between(&w[0], &w[1]);
        if gap >= MAX_SAMPLE_GAP {
            return Err(Error::UnderSampled {
                gap,
                limit: MAX_SAMPLE_GAP,
            });
        }
    }
    // the closing edge is implicit; drop the duplicate end point of the loop
    let mut pts = points;
    if pts.len() > 1 && angle_between(&pts[0], pts.last().unwrap()) < 1e-12 {
        pts.pop();
    }
    Ok(polygon_solid_angle(&pts))
}

/// Rotation-gate parameter `γ = 2 arctan(2Ω / Δω)`.
pub fn swept_angle_gamma(rabi: f64, detuning: f64) -> Result<f64> {
    if detuning == 0.0 {
        return Err(Error::Configuration(
            "γ is undefined at resonance; the resonant selective phase gate has γ̃ = 2φ0".into(),
        ));
    }
    Ok(2.0 * (2.0 * rabi / detuning).atan())
}
