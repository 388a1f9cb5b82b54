//! Exact propagators for constant Hamiltonians and fixed-step RK4 for
//! time-dependent ones. Units: ħ = 1, time in fs, energies in rad/fs.

use crate::error::{Error, Result};
use crate::linalg::{eigh, norm, Operator, StateVector, C64, I, ZERO};

/// Largest norm drift that is silently renormalized away.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

/// `exp(-i H t)` via the spectral decomposition of hermitian `H`.
pub fn propagator_constant(h: &Operator, t: f64) -> Result<Operator> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Model(format!(
            "propagation time must be finite and >= 0, got {t}"
        )));
    }
    let eig = eigh(h)?;
    let d = h.dim();
    let phases: Vec<C64> = eig.values.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect();
    let v = &eig.vectors;
    let mut u = Operator::zeros(d);
    for r in 0..d {
        for c in 0..d {
            let mut acc = ZERO;
            for k in 0..d {
                acc += v[(r, k)] * phases[k] * v[(c, k)].conj();
            }
            u[(r, c)] = acc;
        }
    }
    Ok(u)
}

/// Result of a fixed-step integration.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: StateVector,
    /// |1 - ||psi|| | before renormalization.
    pub norm_drift: f64,
    pub steps: usize,
}

/// Number of equal steps covering `span` with step no longer than `dt`.
pub fn step_count(span: f64, dt: f64) -> usize {
    ((span / dt) - 1e-9).ceil().max(1.0) as usize
}

/// Source of the Hamiltonian during one integration interval.
pub trait Generator {
    /// Hermitian operator at time `t`, handed to `f`.
    fn with_at<R>(&self, t: f64, f: impl FnOnce(&Operator) -> R) -> R;
}

impl Generator for Operator {
    fn with_at<R>(&self, _t: f64, f: impl FnOnce(&Operator) -> R) -> R {
        f(self)
    }
}

/// Adapter for closures `t -> H(t)`.
pub struct FnGenerator<F>(pub F);

impl<F: Fn(f64) -> Operator> Generator for FnGenerator<F> {
    fn with_at<R>(&self, t: f64, f: impl FnOnce(&Operator) -> R) -> R {
        f(&(self.0)(t))
    }
}

/// `out = -i H v`
fn derivative(h: &Operator, v: &[C64], out: &mut [C64]) {
    h.apply_slice(v, out);
    for z in out.iter_mut() {
        *z *= -I;
    }
}

/// Classic fourth-order Runge–Kutta stepper for `i dψ/dt = H(t) ψ` acting on
/// one amplitude vector in place.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![ZERO; dim],
            k2: vec![ZERO; dim],
            k3: vec![ZERO; dim],
            k4: vec![ZERO; dim],
            tmp: vec![ZERO; dim],
        }
    }

    pub fn step<G: Generator>(&mut self, gen: &G, t: f64, h: f64, psi: &mut [C64]) {
        let Self { k1, k2, k3, k4, tmp } = self;
        let half = 0.5 * h;
        gen.with_at(t, |op| derivative(op, psi, k1));
        for (x, (p, k)) in tmp.iter_mut().zip(psi.iter().zip(k1.iter())) {
            *x = p + k * half;
        }
        gen.with_at(t + half, |op| {
            derivative(op, tmp, k2);
            for (x, (p, k)) in tmp.iter_mut().zip(psi.iter().zip(k2.iter())) {
                *x = p + k * half;
            }
            derivative(op, tmp, k3);
        });
        for (x, (p, k)) in tmp.iter_mut().zip(psi.iter().zip(k3.iter())) {
            *x = p + k * h;
        }
        gen.with_at(t + h, |op| derivative(op, tmp, k4));
        let w = h / 6.0;
        for i in 0..psi.len() {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }
}

/// Check drift against `MAX_NORM_DRIFT` and renormalize in place.
pub(crate) fn renormalize(psi: &mut [C64], dt: f64) -> Result<f64> {
    let n = norm(psi);
    let drift = (1.0 - n).abs();
    if !n.is_finite() || drift > MAX_NORM_DRIFT {
        return Err(Error::StepSize {
            drift,
            limit: MAX_NORM_DRIFT,
            dt,
        });
    }
    for z in psi.iter_mut() {
        *z /= n;
    }
    Ok(drift)
}

/// Integrate `i dψ/dt = H(t) ψ` from `t0` to `t1` with fixed RK4 steps of
/// at most `dt`.
pub fn rk4_evolve<G: Generator>(gen: &G, psi0: &StateVector, t0: f64, t1: f64, dt: f64) -> Result<Evolution> {
    if !(dt > 0.0) {
        return Err(Error::Model(format!("step size must be positive, got {dt}")));
    }
    if !(t1 >= t0) {
        return Err(Error::Model(format!("integration interval reversed: [{t0}, {t1}]")));
    }
    let mut psi = psi0.amplitudes().to_vec();
    let steps = if t1 > t0 { step_count(t1 - t0, dt) } else { 0 };
    if steps > 0 {
        let h = (t1 - t0) / steps as f64;
        let mut rk = Rk4::new(psi.len());
        for k in 0..steps {
            rk.step(gen, t0 + k as f64 * h, h, &mut psi);
        }
    }
    let norm_drift = renormalize(&mut psi, dt)?;
    Ok(Evolution {
        state: StateVector::from_raw(psi),
        norm_drift,
        steps,
    })
}
