use std::f64::consts::PI;

use geogate_core::gates::{
    phase_rotated, run_gate, synthesize_gate1, synthesize_gate2, target_gate1, target_gate2, two_qubit_phase_gate,
};
use geogate_core::linalg::{Operator, StateVector, C64};
use geogate_core::models::{
    build_biexciton_rotating, build_raman_effective, build_raman_three_level, build_rotating_two_level,
    build_two_photon_effective, BiexcitonParams, HamiltonianModel, RamanParams, EE, E_MINUS, E_PLUS, GG, RAMAN_G,
};
use geogate_core::propagate::{propagator_constant, rk4_evolve};
use geogate_core::pulses::{gate2_sequence, gate2_sequence_with_offset, repeat_sequence, PulseSegment, PulseSequence};
use geogate_core::simulate::{sequence_propagator, simulate, Settings};

const OMEGA: f64 = 0.02;

/// Columns of `exp(-iHt)` from RK4 runs, one per basis state.
fn rk4_propagator(h: &Operator, t: f64, dt: f64) -> Operator {
    let d = h.dim();
    let mut u = Operator::zeros(d);
    for c in 0..d {
        let out = rk4_evolve(h, &StateVector::basis(d, c), 0.0, t, dt).unwrap();
        u.set_column(c, out.state.amplitudes());
    }
    u
}

#[test]
fn tilted_pi_pulse_matches_integrator() {
    let h = Operator::from_rows(
        2,
        vec![
            C64::new(OMEGA, 0.0),
            C64::new(OMEGA, 0.0),
            C64::new(OMEGA, 0.0),
            C64::new(-OMEGA, 0.0),
        ],
    );
    let t = PI / (2.0 * OMEGA * 2f64.sqrt());
    let exact = propagator_constant(&h, t).unwrap();
    let rk = rk4_propagator(&h, t, t / 1e4);
    assert!(exact.max_abs_diff(&rk) <= 1e-8);
    // Bloch vector |E> = +z goes to +x under a π rotation about (1,0,1)/√2
    let out = exact.apply(&StateVector::basis(2, 0));
    let a = out.amplitudes();
    let nx = 2.0 * (a[0].conj() * a[1]).re;
    assert!((nx - 1.0).abs() < 1e-12);
}

#[test]
fn every_builder_agrees_with_integrator() {
    let raman = RamanParams {
        phase_plus: 0.4,
        phase_minus: -0.2,
        raman_detuning: 0.01,
        ..RamanParams::symmetric(0.02, 0.2)
    };
    let mut biex = BiexcitonParams::resonant(2.0, 0.4, 0.02);
    biex.laser1.phase = 0.3;
    let cases = [
        (build_rotating_two_level(OMEGA, 0.7, 0.03).unwrap(), 200.0),
        (build_raman_three_level(&raman).unwrap(), 60.0),
        (build_raman_effective(&raman).unwrap(), 300.0),
        (build_biexciton_rotating(&biex).unwrap(), 60.0),
        (build_two_photon_effective(&biex).unwrap(), 300.0),
    ];
    for (h, t) in cases {
        let exact = propagator_constant(&h, t).unwrap();
        let rk = rk4_propagator(&h, t, t / 2e4);
        assert!(exact.max_abs_diff(&rk) <= 1e-8, "dim {}", h.dim());
        assert!(exact.unitarity_error() <= 1e-9);
    }
}

#[test]
fn sequence_propagator_is_ordered_product() {
    let seq = synthesize_gate1(1.1, OMEGA).unwrap().sequence;
    let model = HamiltonianModel::RotatingTwoLevel;
    let sim = simulate(&model, &seq, &StateVector::basis(2, 0), &Settings::default()).unwrap();
    let s = seq.segments();
    let manual = propagator_constant(&model.frame_hamiltonian(&s[1]).unwrap(), s[1].duration)
        .unwrap()
        .matmul(&propagator_constant(&model.frame_hamiltonian(&s[0]).unwrap(), s[0].duration).unwrap());
    assert!(sim.propagator.max_abs_diff(&manual) <= 1e-9);
    assert!(sequence_propagator(&model, &seq).unwrap().max_abs_diff(&manual) <= 1e-12);
}

#[test]
fn gate1_closed_form_over_angles() {
    for k in 0..20 {
        let g = 0.1 + (PI - 0.2) * k as f64 / 19.0;
        let seq = synthesize_gate1(g, OMEGA).unwrap().sequence;
        let t = target_gate1(g);
        let r = run_gate(
            &seq,
            &HamiltonianModel::RotatingTwoLevel,
            Some(&t),
            &StateVector::basis(2, 0),
            &Settings::exact(),
        )
        .unwrap();
        assert!(r.fidelity.unwrap() >= 0.999, "γ = {g}: {:?}", r.fidelity);
        assert!(r.realized.scale(C64::new(-1.0, 0.0)).max_abs_diff(&t) < 1e-9);
    }
}

#[test]
fn gate2_closed_form_over_phases() {
    for k in 1..=20 {
        let phi0 = PI / 2.0 * k as f64 / 21.0;
        let seq = gate2_sequence(OMEGA, phi0).unwrap();
        let r = run_gate(
            &seq,
            &HamiltonianModel::RotatingTwoLevel,
            Some(&target_gate2(2.0 * phi0)),
            &StateVector::basis(2, 1),
            &Settings::exact(),
        )
        .unwrap();
        assert!(r.fidelity.unwrap() >= 0.999);
        // the loop closes and the resonant drive never does work on the state
        assert!(
            r.trajectory.cyclic_mismatch() <= 1e-6,
            "{}",
            r.trajectory.cyclic_mismatch()
        );
        let max_e = r.trajectory.samples.iter().map(|s| s.energy.abs()).fold(0.0, f64::max);
        assert!(max_e <= 1e-9 * OMEGA);
    }
}

#[test]
fn common_phase_offset_is_a_z_conjugation() {
    for offset in [0.3, 1.7, -2.4] {
        let seq = gate2_sequence_with_offset(OMEGA, 0.4, offset).unwrap();
        let t = phase_rotated(&target_gate2(0.8), offset);
        let r = run_gate(
            &seq,
            &HamiltonianModel::RotatingTwoLevel,
            Some(&t),
            &StateVector::basis(2, 0),
            &Settings::exact(),
        )
        .unwrap();
        assert!(r.fidelity.unwrap() >= 0.999);
        let seq1 = synthesize_gate1(0.9, OMEGA).unwrap().sequence;
        let shifted: Vec<PulseSegment> = seq1
            .segments()
            .iter()
            .map(|s| PulseSegment {
                phase: s.phase + offset,
                ..*s
            })
            .collect();
        let u = sequence_propagator(
            &HamiltonianModel::RotatingTwoLevel,
            &PulseSequence::new(shifted, 1).unwrap(),
        )
        .unwrap();
        let expected = phase_rotated(
            &sequence_propagator(&HamiltonianModel::RotatingTwoLevel, &seq1).unwrap(),
            offset,
        );
        assert!(u.max_abs_diff(&expected) < 1e-12);
    }
}

#[test]
fn repeated_loops_are_a_matrix_power() {
    let model = HamiltonianModel::RamanThreeLevel {
        rabi_plus: 0.02,
        rabi_minus: 0.02,
        detuning: 0.4,
    };
    let one = PulseSequence::new(
        vec![
            PulseSegment::new(0.001, 0.2, 0.05, 60.0).unwrap(),
            PulseSegment::new(0.001, 0.2 + PI, 0.05, 60.0).unwrap(),
        ],
        1,
    )
    .unwrap();
    let settings = Settings {
        samples_per_segment: 10,
        ..Settings::default()
    };
    let u1 = simulate(&model, &one, &StateVector::basis(3, 0), &settings)
        .unwrap()
        .propagator;
    let n = 7;
    let un = simulate(
        &model,
        &repeat_sequence(&one, n).unwrap(),
        &StateVector::basis(3, 0),
        &settings,
    )
    .unwrap()
    .propagator;
    assert!(un.max_abs_diff(&u1.powi(n)) <= 1e-7);
    assert!(un.unitarity_error() <= 1e-9);
}

#[test]
fn raman_effective_model_improves_with_detuning() {
    let mut previous = f64::INFINITY;
    for ratio in [5.0, 10.0, 20.0] {
        let p = RamanParams::symmetric(OMEGA, ratio * OMEGA);
        let g = p.effective_coupling().unwrap();
        let period = PI / g;
        let full = build_raman_three_level(&p).unwrap();
        let eff = build_raman_effective(&p).unwrap();
        let mut worst: f64 = 0.0;
        for k in 1..=100 {
            let t = period * k as f64 / 100.0;
            let a = propagator_constant(&full, t)
                .unwrap()
                .apply(&StateVector::basis(3, E_PLUS));
            let b = propagator_constant(&eff, t).unwrap().apply(&StateVector::basis(2, 0));
            let d = (a.populations()[E_MINUS] - b.populations()[1]).abs();
            worst = worst.max(d);
        }
        assert!(worst < previous, "Δ/Ω = {ratio}: {worst} vs {previous}");
        previous = worst;
    }
}

#[test]
fn raman_three_level_leakage_bound() {
    let p = RamanParams::symmetric(OMEGA, 10.0 * OMEGA);
    let h = build_raman_three_level(&p).unwrap();
    let period = PI / p.effective_coupling().unwrap();
    let worst = (0..=400)
        .map(|k| {
            let u = propagator_constant(&h, period * k as f64 / 400.0).unwrap();
            u.apply(&StateVector::basis(3, E_PLUS)).populations()[RAMAN_G]
        })
        .fold(0.0, f64::max);
    assert!(worst <= 0.05, "{worst}");
}

#[test]
fn two_qubit_pair_phase_tracks_effective_model() {
    let params = BiexcitonParams::resonant(2.0, 0.4, 0.02);
    let gamma = PI / 4.0;
    let full = two_qubit_phase_gate(&params, gamma, &Settings::default()).unwrap();
    let eff_model = HamiltonianModel::TwoPhotonEffective {
        omega0: 2.0,
        delta: 0.4,
        rabi1: 0.02,
        rabi2: 0.02,
    };
    let b_perp = 0.02 * 0.02 / 0.4;
    let eff = sequence_propagator(&eff_model, &synthesize_gate2(gamma, b_perp).unwrap()).unwrap();
    let u = &full.realized;
    let full_phase = (u[(EE, EE)] * u[(GG, GG)].conj()).arg();
    let eff_phase = (eff[(0, 0)] * eff[(1, 1)].conj()).arg();
    assert!((full_phase - eff_phase).abs() <= 0.05, "{full_phase} vs {eff_phase}");
    assert!(full.leakage <= 4.0 * 0.05f64.powi(2));
}
