//! Frequency estimation for sampled population curves.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Residual sum of squares of the best fit `a + b cos ωt + c sin ωt`.
fn sine_fit_residual(times: &[f64], values: &[f64], omega: f64) -> f64 {
    // normal equations for (1, cos, sin)
    let mut m = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    let mut yy = 0.0;
    for (&t, &y) in times.iter().zip(values) {
        let basis = [1.0, (omega * t).cos(), (omega * t).sin()];
        for i in 0..3 {
            rhs[i] += basis[i] * y;
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
        }
        yy += y * y;
    }
    match solve3(m, rhs) {
        Some(x) => yy - (x[0] * rhs[0] + x[1] * rhs[1] + x[2] * rhs[2]),
        None => yy,
    }
}

#[allow(clippy::needless_range_loop)]
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Angular frequency of the dominant oscillation in uniformly sampled data.
///
/// A coarse periodogram over `[π/T, π/dt]` locates the peak, then a
/// least-squares sinusoid fit is minimised over the neighbouring bins.
pub fn dominant_angular_frequency(times: &[f64], values: &[f64]) -> Result<f64> {
    let n = times.len();
    if n != values.len() {
        return Err(Error::Model("times and values differ in length".into()));
    }
    if n < 8 {
        return Err(Error::Model(format!("need at least 8 samples, got {n}")));
    }
    let dt = times[1] - times[0];
    let span = times[n - 1] - times[0];
    if !(dt > 0.0)
        || times
            .windows(2)
            .any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.max(1e-300))
    {
        return Err(Error::Model("samples must be uniformly spaced in time".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    if centered.iter().all(|v| v.abs() < 1e-14) {
        return Err(Error::Numerical("signal is constant; no oscillation to measure".into()));
    }

    let lo = PI / span;
    let hi = PI / dt;
    let step = PI / (4.0 * span);
    let bins = ((hi - lo) / step).ceil() as usize;
    let mut best = (lo, f64::NEG_INFINITY);
    for k in 0..=bins {
        let w = lo + k as f64 * step;
        let (mut re, mut im) = (0.0, 0.0);
        for (&t, &y) in times.iter().zip(&centered) {
            re += y * (w * t).cos();
            im -= y * (w * t).sin();
        }
        let power = re * re + im * im;
        if power > best.1 {
            best = (w, power);
        }
    }
    let a = (best.0 - 2.0 * step).max(0.5 * lo);
    let b = best.0 + 2.0 * step;
    Ok(golden_min(
        |w| sine_fit_residual(times, values, w),
        a,
        b,
        1e-12 * b.max(1.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| k as f64 * dt).collect()
    }

    #[test]
    fn recovers_pure_sinusoid_with_fractional_cycles() {
        let t = grid(400, 0.5);
        let w = 0.0731;
        let y: Vec<f64> = t.iter().map(|t| 0.3 + 0.5 * (w * t + 0.4).cos()).collect();
        let est = dominant_angular_frequency(&t, &y).unwrap();
        assert!((est - w).abs() / w < 1e-8, "{est}");
    }

    #[test]
    fn rabi_population_curve() {
        // sin²(Ωt/2) oscillates at Ω
        let t = grid(1000, 2.0);
        let y: Vec<f64> = t.iter().map(|t| (0.004 * t / 2.0).sin().powi(2)).collect();
        let est = dominant_angular_frequency(&t, &y).unwrap();
        assert!((est - 0.004).abs() / 0.004 < 1e-6, "{est}");
    }

    #[test]
    fn rejects_bad_input() {
        let t = grid(20, 1.0);
        assert!(dominant_angular_frequency(&t, &[1.0; 20]).is_err());
        assert!(dominant_angular_frequency(&t[..5], &[0.0, 1.0, 0.0, 1.0, 0.0]).is_err());
        let mut uneven = t.clone();
        uneven[3] += 0.3;
        let y: Vec<f64> = t.iter().map(|t| t.sin()).collect();
        assert!(dominant_angular_frequency(&uneven, &y).is_err());
    }
}
