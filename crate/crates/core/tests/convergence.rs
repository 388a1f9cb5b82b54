use geogate_core::linalg::{StateVector, C64};
use geogate_core::models::{build_lab_two_level, build_rotating_two_level, TwoLevelParams};
use geogate_core::propagate::{propagator_constant, rk4_evolve, FnGenerator};

fn state_error(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn rk4_is_fourth_order_on_constant_hamiltonians() {
    let h = build_rotating_two_level(0.04, 0.3, 0.05).unwrap();
    let psi0 = StateVector::new(vec![C64::new(0.8, 0.0), C64::new(0.0, 0.6)]).unwrap();
    let t = 200.0;
    let exact = propagator_constant(&h, t).unwrap().apply(&psi0);
    let errors: Vec<f64> = [1.5, 0.75, 0.375]
        .iter()
        .map(|&dt| state_error(&rk4_evolve(&h, &psi0, 0.0, t, dt).unwrap().state, &exact))
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((3.5..=4.5).contains(&order), "order {order} from {errors:?}");
    }
}

#[test]
fn rk4_is_fourth_order_on_the_lab_frame_drive() {
    let lab = build_lab_two_level(TwoLevelParams::new(0.5, 0.46, 0.02, 0.0).unwrap());
    let gen = FnGenerator(|t: f64| lab.at(t));
    let psi0 = StateVector::basis(2, 0);
    let t = 80.0;
    let reference = rk4_evolve(&gen, &psi0, 0.0, t, 0.004).unwrap().state;
    let errors: Vec<f64> = [0.25, 0.125, 0.0625]
        .iter()
        .map(|&dt| state_error(&rk4_evolve(&gen, &psi0, 0.0, t, dt).unwrap().state, &reference))
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((3.5..=4.5).contains(&order), "order {order} from {errors:?}");
    }
}
