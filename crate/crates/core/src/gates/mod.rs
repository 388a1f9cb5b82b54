//! Gate targets, synthesis of the two single-qubit loops, and verification
//! of simulated sequences against their closed forms.

mod raman;
mod two_qubit;

pub use raman::{
    loop_sequence, measure_loop_gamma, raman_detuning_for_loop, raman_gate, raman_resonant_detuning, tune_raman_loop,
    RamanTarget,
};
pub use two_qubit::{conditional_phase, local_phase_correction, two_qubit_phase_gate, two_qubit_target};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{aa_phase, bloch_state, dynamical_phase, solid_angle, total_phase, Trajectory, Vec3};
use crate::linalg::{gate_fidelity, Operator, StateVector, C64, ZERO};
use crate::models::HamiltonianModel;
use crate::pulses::{gate1_sequence, PulseSequence};
use crate::simulate::{simulate, Settings};

/// `[[cos γ, sin γ], [-sin γ, cos γ]]` on `(|0>, |1>)`.
pub fn target_gate1(gamma: f64) -> Operator {
    let (s, c) = gamma.sin_cos();
    Operator::from_rows(
        2,
        vec![C64::new(c, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0), C64::new(c, 0.0)],
    )
}

/// `diag(e^{iγ̃}, e^{-iγ̃})`
pub fn target_gate2(gamma_tilde: f64) -> Operator {
    Operator::diagonal(&[C64::from_polar(1.0, gamma_tilde), C64::from_polar(1.0, -gamma_tilde)])
}

/// Conjugate a qubit operator by the z-rotation that turns pulse phase 0
/// into pulse phase `beta`.
pub fn phase_rotated(op: &Operator, beta: f64) -> Operator {
    let z = Operator::diagonal(&[C64::from_polar(1.0, -beta / 2.0), C64::from_polar(1.0, beta / 2.0)]);
    z.matmul(op).matmul(&z.adjoint())
}

/// Laser detuning `Δω = 2Ω / tan(γ/2)` giving rotation angle `γ`.
pub fn detuning_for_gamma(rabi: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < PI) {
        return Err(Error::Configuration(format!(
            "rotation angle must lie in (0, π), got {gamma}; γ = π needs a resonant laser and γ = 0 an infinitely detuned one"
        )));
    }
    if !(rabi > 0.0) {
        return Err(Error::Model(format!("Rabi frequency must be > 0, got {rabi}")));
    }
    Ok(2.0 * rabi / (gamma / 2.0).tan())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gate1Parameters {
    pub detuning: f64,
    pub sequence: PulseSequence,
}

pub fn synthesize_gate1(gamma: f64, rabi: f64) -> Result<Gate1Parameters> {
    let detuning = detuning_for_gamma(rabi, gamma)?;
    Ok(Gate1Parameters {
        detuning,
        sequence: gate1_sequence(rabi, detuning, 0.0)?,
    })
}

/// Selective phase loop realizing `target_gate2(γ̃)`: pulse phases `±γ̃/2`.
pub fn synthesize_gate2(gamma_tilde: f64, rabi: f64) -> Result<PulseSequence> {
    crate::pulses::gate2_sequence(rabi, gamma_tilde / 2.0)
}

/// `U / sqrt(det U)` for a 2×2 operator.
pub fn su2_part(u: &Operator) -> Result<Operator> {
    if u.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: u.dim(),
        });
    }
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    if det.norm() < 1e-12 {
        return Err(Error::Numerical("operator is singular on the logical pair".into()));
    }
    Ok(u.scale(det.sqrt().inv()))
}

/// Angle `γ` (mod π, in `[0, π)`) of a gate of the form `e^{iα} target_gate1(γ)`.
pub fn measured_gamma(u: &Operator) -> Result<f64> {
    let v = su2_part(u)?;
    Ok(v[(0, 1)].re.atan2(v[(0, 0)].re).rem_euclid(PI))
}

/// Rotation half-angle of a qubit gate about its own axis, in `[0, π/2]`:
/// `e^{iα} exp(i θ n·σ)` gives `θ` folded into that range.
pub fn rotation_half_angle(u: &Operator) -> Result<f64> {
    let v = su2_part(u)?;
    Ok((v.trace().re.abs() / 2.0).min(1.0).acos())
}

/// Rotation axis `a` of `V = a0 - i a·σ` (unnormalized, zero for `±I`).
pub fn rotation_axis(u: &Operator) -> Result<Vec3> {
    let v = su2_part(u)?;
    Ok([
        -(v[(0, 1)] + v[(1, 0)]).im / 2.0,
        (v[(1, 0)] - v[(0, 1)]).re / 2.0,
        (v[(1, 1)] - v[(0, 0)]).im / 2.0,
    ])
}

/// Reduce a phase to `(-π/2, π/2]`: the phase of a qubit gate is fixed
/// only up to the spinor sign `-1`.
pub fn reduce_mod_pi(x: f64) -> f64 {
    let mut r = x.rem_euclid(PI);
    if r > PI / 2.0 {
        r -= PI;
    }
    r
}

/// Outcome of simulating a gate sequence.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GateReport {
    pub model: String,
    /// Full propagator in the model's rotating frame.
    pub realized: Operator,
    pub target: Option<Operator>,
    /// `|Tr(T† U)|/d`, on the logical pair when the target is 2×2 and the
    /// model is larger.
    pub fidelity: Option<f64>,
    /// `|<Tψ0|Uψ0>|²`
    pub state_fidelity: Option<f64>,
    pub total_phase: Option<f64>,
    pub dyn_phase: Option<f64>,
    /// Raw Aharonov–Anandan phase of the phase trajectory, in (-π, π].
    pub aa_phase: Option<f64>,
    /// Gate-level geometric phase: `aa_phase` reduced mod π.
    pub geom_phase: Option<f64>,
    pub solid_angle: Option<f64>,
    /// `"initial"` or `"eigenstate"`: which cyclic state the phases refer to.
    pub phase_source: Option<String>,
    pub phase_state_bloch: Option<Vec3>,
    pub gate_time: f64,
    pub loop_count: u32,
    pub gamma_loop: Option<f64>,
    /// `|<pair1|U|pair0>|²`
    pub population_transfer: f64,
    /// Largest population outside the logical pair along the trajectory.
    pub leakage: f64,
    pub conditional_phase: Option<f64>,
    pub max_norm_drift: f64,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub trajectory: Trajectory,
    #[serde(skip)]
    pub phase_trajectory: Option<Trajectory>,
}

struct Phases {
    total: f64,
    dynamical: f64,
    aa: f64,
    solid: Option<f64>,
}

fn phases_of(traj: &Trajectory, warnings: &mut Vec<String>) -> Result<Option<Phases>> {
    if !traj.is_cyclic() || traj.len() < 2 {
        return Ok(None);
    }
    let solid = match solid_angle(traj) {
        Ok(s) => Some(s),
        Err(e @ Error::UnderSampled { .. }) | Err(e @ Error::Model(_)) => {
            warnings.push(format!("solid angle not computed: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    Ok(Some(Phases {
        total: total_phase(traj)?,
        dynamical: dynamical_phase(traj)?,
        aa: aa_phase(traj)?,
        solid,
    }))
}

/// Largest population outside `pair` over the trajectory.
pub fn trajectory_leakage(traj: &Trajectory) -> f64 {
    traj.states
        .iter()
        .flat_map(|s| {
            s.populations()
                .into_iter()
                .enumerate()
                .filter(|(k, _)| !traj.pair.contains(k))
                .map(|(_, p)| p)
                .collect::<Vec<_>>()
        })
        .fold(0.0, f64::max)
}

/// Logical block of `u` when `target` acts on the pair only, else `u`.
fn comparable(u: &Operator, target: &Operator, pair: [usize; 2]) -> Result<Operator> {
    if target.dim() == u.dim() {
        Ok(u.clone())
    } else if target.dim() == 2 {
        Ok(u.submatrix(&pair))
    } else {
        Err(Error::Dimension {
            expected: u.dim(),
            found: target.dim(),
        })
    }
}

/// `target ψ0` embedded in the model space.
fn target_output(target: &Operator, psi0: &StateVector, d: usize, pair: [usize; 2]) -> Vec<C64> {
    if target.dim() == d {
        return target.apply(psi0).into_amplitudes();
    }
    let a = psi0.amplitudes();
    let local = [a[pair[0]], a[pair[1]]];
    let mut out = vec![ZERO; d];
    for r in 0..2 {
        out[pair[r]] = target[(r, 0)] * local[0] + target[(r, 1)] * local[1];
    }
    out
}

/// Simulate `seq` on `model`, assemble the realized propagator and compare
/// with `target`. Phases refer to `psi0` when its trajectory closes; for
/// qubit models an eigen-direction of the propagator is used otherwise.
pub fn run_gate(
    seq: &PulseSequence,
    model: &HamiltonianModel,
    target: Option<&Operator>,
    psi0: &StateVector,
    settings: &Settings,
) -> Result<GateReport> {
    let sim = simulate(model, seq, psi0, settings)?;
    let d = model.dim();
    let pair = model.logical_pair();
    let mut warnings: Vec<String> = model.validity().warnings;
    warnings.extend(seq.warnings());

    let (fidelity, state_fidelity) = match target {
        Some(t) => {
            let u = comparable(&sim.propagator, t, pair)?;
            let expected = target_output(t, psi0, d, pair);
            let last = sim.trajectory.states.last().unwrap();
            let overlap: C64 = expected.iter().zip(last.amplitudes()).map(|(x, y)| x.conj() * y).sum();
            (Some(gate_fidelity(t, &u)?), Some(overlap.norm_sqr()))
        }
        None => (None, None),
    };

    let mut phase_source = None;
    let mut phase_traj = None;
    let mut phases = phases_of(&sim.trajectory, &mut warnings)?;
    if phases.is_some() {
        phase_source = Some("initial".to_string());
        phase_traj = Some(sim.trajectory.clone());
    } else if d == 2 {
        let axis = rotation_axis(&sim.propagator)?;
        if axis.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-9 {
            let eig = simulate(model, seq, &bloch_state(&axis), settings)?;
            phases = phases_of(&eig.trajectory, &mut warnings)?;
            if phases.is_some() {
                phase_source = Some("eigenstate".to_string());
                phase_traj = Some(eig.trajectory);
            }
        }
    }
    let phase_state_bloch = phase_traj.as_ref().map(|t| t.samples[0].n);

    Ok(GateReport {
        model: model.name().to_string(),
        realized: sim.propagator.clone(),
        target: target.cloned(),
        fidelity,
        state_fidelity,
        total_phase: phases.as_ref().map(|p| p.total),
        dyn_phase: phases.as_ref().map(|p| p.dynamical),
        aa_phase: phases.as_ref().map(|p| p.aa),
        geom_phase: phases.as_ref().map(|p| reduce_mod_pi(p.aa)),
        solid_angle: phases.as_ref().and_then(|p| p.solid),
        phase_source,
        phase_state_bloch,
        gate_time: seq.total_duration(),
        loop_count: seq.repeats(),
        gamma_loop: None,
        population_transfer: sim.propagator[(pair[1], pair[0])].norm_sqr(),
        leakage: trajectory_leakage(&sim.trajectory),
        conditional_phase: None,
        max_norm_drift: sim.max_norm_drift,
        warnings,
        trajectory: sim.trajectory,
        phase_trajectory: phase_traj,
    })
}
