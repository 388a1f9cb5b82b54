use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{gate_fidelity, Operator, StateVector, C64};
use crate::models::{two_photon_rabi, BiexcitonParams, HamiltonianModel, EE, EG, GE, GG};
use crate::pulses::{gate2_sequence_with_offset, PulseSegment, PulseSequence};
use crate::simulate::Settings;

use super::{run_gate, GateReport};

/// Largest `Ω/δ` accepted for the two-photon gate.
const MAX_RATIO: f64 = 0.1;

/// `diag(e^{-iγ̃}, 1, 1, e^{iγ̃})` on `(|GG>, |GE>, |EG>, |EE>)`.
pub fn two_qubit_target(gamma_tilde: f64) -> Operator {
    Operator::diagonal(&[
        C64::from_polar(1.0, -gamma_tilde),
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::from_polar(1.0, gamma_tilde),
    ])
}

/// `arg(U_GG U_EE / (U_GE U_EG))`: the phase no pair of single-qubit z
/// rotations can remove.
pub fn conditional_phase(u: &Operator) -> f64 {
    (u[(GG, GG)] * u[(EE, EE)] * (u[(GE, GE)] * u[(EG, EG)]).conj()).arg()
}

/// Diagonal `D = e^{-ic} diag(1, e^{-iθ2}, e^{-iθ1}, e^{-i(θ1+θ2)})` that
/// best aligns the diagonal of `D U` with `target`.
pub fn local_phase_correction(u: &Operator, target: &Operator) -> Operator {
    let z: Vec<C64> = [GG, GE, EG, EE]
        .iter()
        .map(|&k| u[(k, k)] * target[(k, k)].conj())
        .collect();
    let (gg, ge, eg, ee) = (z[0], z[1], z[2], z[3]);
    let theta1 = (eg * gg.conj() + ee * ge.conj()).arg();
    let theta2 = (ge * gg.conj() + ee * eg.conj()).arg();
    let shifts = [0.0, theta2, theta1, theta1 + theta2];
    let c = z
        .iter()
        .zip(shifts)
        .map(|(zk, s)| zk * C64::from_polar(1.0, -s))
        .sum::<C64>()
        .arg();
    Operator::diagonal(&shifts.map(|s| C64::from_polar(1.0, -(c + s))))
}

/// Conditional phase gate on two coupled dots driven at two-photon
/// resonance. The `|GG> <-> |EE>` pair is run through the selective phase
/// loop at the effective Rabi frequency; the laser phases are split equally.
///
/// The fidelity is taken after the best single-qubit z correction, and the
/// state fidelity on `(|G>+|E>)⊗(|G>+|E>)/2` uses the corrected propagator.
pub fn two_qubit_phase_gate(params: &BiexcitonParams, gamma_tilde: f64, settings: &Settings) -> Result<GateReport> {
    let ratio = params.ratio();
    if params.delta == 0.0 || ratio > MAX_RATIO {
        return Err(Error::Regime(format!(
            "Ω/δ = {ratio:.3} exceeds {MAX_RATIO}; the two-photon description does not hold"
        )));
    }
    let mismatch = params.two_photon_detuning();
    if mismatch.abs() > 1e-9 * params.omega0.abs().max(1.0) {
        return Err(Error::Configuration(format!(
            "lasers must satisfy ωL1 + ωL2 = 2ω0 + δ (off by {mismatch:.3e} rad/fs)"
        )));
    }
    let model = HamiltonianModel::Biexciton {
        omega0: params.omega0,
        delta: params.delta,
        rabi1: params.laser1.rabi,
        rabi2: params.laser2.rabi,
    };
    let b_perp = two_photon_rabi(params)?.abs() / 2.0;
    let offset = params.laser1.phase + params.laser2.phase;
    let seq = if b_perp > 0.0 {
        gate2_sequence_with_offset(b_perp, gamma_tilde / 2.0, offset)?
    } else {
        // no drive: one beat period of the single-exciton levels
        PulseSequence::new(vec![PulseSegment::free(2.0 * PI / params.delta.abs())], 1)?
    };

    let target = two_qubit_target(gamma_tilde);
    let mut report = run_gate(&seq, &model, None, &StateVector::basis(4, GG), settings)?;
    let u = report.realized.clone();
    let corrected = local_phase_correction(&u, &target).matmul(&u);
    let product = StateVector::new(vec![C64::new(0.5, 0.0); 4])?;
    let overlap = target.apply(&product).inner(&corrected.apply(&product));

    report.fidelity = Some(gate_fidelity(&target, &corrected)?);
    report.state_fidelity = Some(overlap.norm_sqr());
    report.conditional_phase = Some(conditional_phase(&u));
    report.target = Some(target);
    if b_perp == 0.0 {
        report.warnings.push("zero Rabi frequency: free evolution only".into());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    #[test]
    fn correction_removes_local_phases() {
        let target = two_qubit_target(0.7);
        let (a, b, c) = (0.3, -1.1, 2.0);
        let local = Operator::diagonal(&[
            C64::from_polar(1.0, c),
            C64::from_polar(1.0, c + b),
            C64::from_polar(1.0, c + a),
            C64::from_polar(1.0, c + a + b),
        ]);
        let u = local.matmul(&target);
        let fixed = local_phase_correction(&u, &target).matmul(&u);
        assert!(fixed.max_abs_diff(&target) < 1e-12);
        assert!(conditional_phase(&u).abs() < 1e-12);
    }

    #[test]
    fn conditional_phase_of_cz() {
        let cz = Operator::diagonal(&[
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            -C64::new(1.0, 0.0),
        ]);
        assert!((conditional_phase(&cz).abs() - PI).abs() < 1e-12);
        assert!(conditional_phase(&two_qubit_target(0.4).scale(I)).abs() < 1e-12);
    }

    #[test]
    fn regime_and_resonance_checks() {
        let p = BiexcitonParams::resonant(2.0, 0.1, 0.02);
        assert!(matches!(
            two_qubit_phase_gate(&p, 0.5, &Settings::default()),
            Err(Error::Regime(_))
        ));
        let mut p = BiexcitonParams::resonant(2.0, 0.4, 0.02);
        p.laser1.frequency += 0.01;
        assert!(matches!(
            two_qubit_phase_gate(&p, 0.5, &Settings::default()),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn undriven_is_identity_up_to_local_phases() {
        let p = BiexcitonParams::resonant(2.0, 0.4, 0.0);
        let r = two_qubit_phase_gate(&p, 0.0, &Settings::exact()).unwrap();
        assert!(r.fidelity.unwrap() > 1.0 - 1e-12);
        assert!(r.leakage < 1e-20);
    }
}
