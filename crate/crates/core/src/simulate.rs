//! Propagation of a pulse sequence through a model: the realized propagator
//! plus a sampled trajectory of one initial state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Trajectory;
use crate::linalg::{Operator, StateVector, C64, ZERO};
use crate::models::{frame_rotate, HamiltonianModel, SegmentDrive};
use crate::propagate::{propagator_constant, renormalize, step_count, Rk4};
use crate::pulses::PulseSequence;

pub const DEFAULT_STEPS_PER_SEGMENT: usize = 2000;
pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 200;
/// Without an explicit `dt`, steps are refined until `‖H‖·dt` stays below this.
pub const MAX_PHASE_PER_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Integrator {
    /// Fixed-step RK4. `dt` (fs) overrides `steps_per_segment` when set;
    /// otherwise `steps_per_segment` is a floor raised for fast Hamiltonians.
    Rk4 { steps_per_segment: usize, dt: Option<f64> },
    /// Spectral propagators per sample interval (constant segments only).
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub integrator: Integrator,
    pub samples_per_segment: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            integrator: Integrator::Rk4 {
                steps_per_segment: DEFAULT_STEPS_PER_SEGMENT,
                dt: None,
            },
            samples_per_segment: DEFAULT_SAMPLES_PER_SEGMENT,
        }
    }
}

impl Settings {
    pub fn exact() -> Self {
        Self {
            integrator: Integrator::Exact,
            ..Self::default()
        }
    }

    pub fn rk4_dt(dt: f64) -> Self {
        Self {
            integrator: Integrator::Rk4 {
                steps_per_segment: DEFAULT_STEPS_PER_SEGMENT,
                dt: Some(dt),
            },
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    /// Propagator over the whole sequence, in the model's rotating frame.
    pub propagator: Operator,
    pub trajectory: Trajectory,
    /// Largest column norm drift seen before renormalization.
    pub max_norm_drift: f64,
}

/// Lab-frame laser frequency shared by all segments, if the model is lab-frame.
fn lab_frequency(model: &HamiltonianModel, seq: &PulseSequence) -> Result<Option<f64>> {
    let HamiltonianModel::LabTwoLevel { omega0 } = *model else {
        return Ok(None);
    };
    let first = seq.segments()[0].detuning;
    if seq.segments().iter().any(|s| s.detuning != first) {
        return Err(Error::Configuration(
            "lab-frame runs need one laser frequency for the whole sequence".into(),
        ));
    }
    Ok(Some(omega0 - first))
}

fn to_frame(psi: Vec<C64>, omega_l: Option<f64>, t: f64) -> StateVector {
    let psi = StateVector::from_raw(psi);
    match omega_l {
        Some(w) => frame_rotate(&psi, w, t).expect("lab-frame models are two-level"),
        None => psi,
    }
}

/// Evolve the full propagator across `seq` and sample the trajectory of `psi0`.
pub fn simulate(
    model: &HamiltonianModel,
    seq: &PulseSequence,
    psi0: &StateVector,
    settings: &Settings,
) -> Result<Simulation> {
    let d = model.dim();
    if psi0.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            found: psi0.dim(),
        });
    }
    let samples_per_segment = settings.samples_per_segment.max(1);
    let omega_l = lab_frequency(model, seq)?;

    // columns of the propagator
    let mut cols: Vec<Vec<C64>> = (0..d).map(|c| StateVector::basis(d, c).into_amplitudes()).collect();
    let current_state = |cols: &[Vec<C64>]| -> Vec<C64> {
        let mut out = vec![ZERO; d];
        for (c, amp) in psi0.amplitudes().iter().enumerate() {
            if *amp == ZERO {
                continue;
            }
            for r in 0..d {
                out[r] += cols[c][r] * amp;
            }
        }
        out
    };

    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut energy = Vec::new();
    let mut incoming = Vec::new();
    let mut max_drift: f64 = 0.0;
    let mut rk: Vec<Rk4> = (0..d).map(|_| Rk4::new(d)).collect();

    for (k, (start, seg)) in seq.timeline().enumerate() {
        let drive = model.drive(seg)?;
        let frame_h = model.frame_hamiltonian(seg)?;
        let psi_start = to_frame(current_state(&cols), omega_l, start);
        let e_start = frame_h.expectation(psi_start.amplitudes()).re;
        if k == 0 {
            times.push(0.0);
            states.push(psi_start);
            energy.push(e_start);
            incoming.push(e_start);
        } else {
            *energy.last_mut().unwrap() = e_start;
        }

        let sample_dt = seg.duration / samples_per_segment as f64;
        match settings.integrator {
            Integrator::Exact => {
                let SegmentDrive::Constant(h) = &drive else {
                    return Err(Error::Configuration(
                        "exact propagation needs piecewise-constant Hamiltonians; use rk4 for lab-frame models".into(),
                    ));
                };
                let step = propagator_constant(h, sample_dt)?;
                for j in 1..=samples_per_segment {
                    for col in cols.iter_mut() {
                        let mut out = vec![ZERO; d];
                        step.apply_slice(col, &mut out);
                        *col = out;
                    }
                    let t = start + j as f64 * sample_dt;
                    let psi = to_frame(current_state(&cols), omega_l, t);
                    let e = frame_h.expectation(psi.amplitudes()).re;
                    times.push(t);
                    states.push(psi);
                    energy.push(e);
                    incoming.push(e);
                }
            }
            Integrator::Rk4 { steps_per_segment, dt } => {
                let raw = match dt {
                    Some(dt) if dt > 0.0 => step_count(seg.duration, dt),
                    Some(dt) => return Err(Error::Model(format!("step size must be positive, got {dt}"))),
                    None => {
                        let rate = match &drive {
                            SegmentDrive::Constant(h) => h.frobenius_norm(),
                            SegmentDrive::Lab(lab) => lab.at(start).frobenius_norm(),
                        };
                        let needed = (seg.duration * rate / MAX_PHASE_PER_STEP).ceil() as usize;
                        steps_per_segment.max(needed).max(1)
                    }
                };
                let per_sample = raw.div_ceil(samples_per_segment);
                let h = sample_dt / per_sample as f64;
                for j in 0..samples_per_segment {
                    let t_sample = start + j as f64 * sample_dt;
                    for (col, stepper) in cols.iter_mut().zip(rk.iter_mut()) {
                        for s in 0..per_sample {
                            stepper.step(&drive, t_sample + s as f64 * h, h, col);
                        }
                    }
                    let t = start + (j + 1) as f64 * sample_dt;
                    let psi = to_frame(current_state(&cols), omega_l, t);
                    let e = frame_h.expectation(psi.amplitudes()).re;
                    times.push(t);
                    states.push(psi);
                    energy.push(e);
                    incoming.push(e);
                }
                for col in cols.iter_mut() {
                    max_drift = max_drift.max(renormalize(col, h)?);
                }
                // keep the last sample consistent with the renormalized columns
                let t = start + seg.duration;
                let psi = to_frame(current_state(&cols), omega_l, t);
                *states.last_mut().unwrap() = psi;
            }
        }
    }

    let total = seq.total_duration();
    let mut propagator = Operator::zeros(d);
    for (c, col) in cols.into_iter().enumerate() {
        let col = to_frame(col, omega_l, total);
        propagator.set_column(c, col.amplitudes());
    }
    let trajectory = Trajectory::new(times, states, energy, incoming, model.name(), model.logical_pair())?;
    Ok(Simulation {
        propagator,
        trajectory,
        max_norm_drift: max_drift,
    })
}

/// Ordered product of exact segment propagators (rotating frame).
pub fn sequence_propagator(model: &HamiltonianModel, seq: &PulseSequence) -> Result<Operator> {
    let d = model.dim();
    let mut one_loop = Operator::identity(d);
    for seg in seq.segments() {
        let h = model.frame_hamiltonian(seg)?;
        one_loop = propagator_constant(&h, seg.duration)?.matmul(&one_loop);
    }
    Ok(one_loop.powi(seq.repeats()))
}
