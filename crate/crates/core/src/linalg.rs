//! Small dense complex linear algebra.
//!
//! Everything here is sized for few-level systems (d <= 16): row-major
//! storage, naive products, and a cyclic Jacobi solver for hermitian
//! eigenproblems.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for the hermiticity check on inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for the unitarity check on propagators.
pub const UNITARY_TOL: f64 = 1e-9;
/// Tolerance on the norm of a state vector.
pub const NORM_TOL: f64 = 1e-9;

/// Dense square complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut out = Self::zeros(dim);
        for k in 0..dim {
            out[(k, k)] = ONE;
        }
        out
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut out = Self::zeros(diag.len());
        for (k, &d) in diag.iter().enumerate() {
            out[(k, k)] = d;
        }
        out
    }

    pub fn real_diagonal(diag: &[f64]) -> Self {
        let diag: Vec<C64> = diag.iter().map(|&d| C64::new(d, 0.0)).collect();
        Self::diagonal(&diag)
    }

    /// Build from row-major entries. Panics if `entries.len() != dim * dim`.
    pub fn from_rows(dim: usize, entries: Vec<C64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "Operator::from_rows: wrong entry count");
        Self { dim, entries }
    }

    /// `|ket><bra|` for basis indices.
    pub fn transition(dim: usize, ket: usize, bra: usize) -> Self {
        let mut out = Self::zeros(dim);
        out[(ket, bra)] = ONE;
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for c in 0..d {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * a).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn matmul(&self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim, "Operator::matmul: dimension mismatch");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        out
    }

    /// Matrix-vector product on raw amplitudes.
    pub fn apply_slice(&self, v: &[C64], out: &mut [C64]) {
        let d = self.dim;
        debug_assert_eq!(v.len(), d);
        for (o, row) in out.iter_mut().zip(self.entries.chunks_exact(d)) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        let mut out = vec![ZERO; self.dim];
        self.apply_slice(psi.amplitudes(), &mut out);
        StateVector::from_raw(out)
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.dim).map(|r| self[(r, c)]).collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[C64]) {
        for (r, &v) in values.iter().enumerate() {
            self[(r, c)] = v;
        }
    }

    /// Restriction to the listed basis indices (in that order).
    pub fn submatrix(&self, indices: &[usize]) -> Operator {
        let n = indices.len();
        let mut out = Self::zeros(n);
        for (i, &r) in indices.iter().enumerate() {
            for (j, &c) in indices.iter().enumerate() {
                out[(i, j)] = self[(r, c)];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim, "Operator::max_abs_diff: dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |A - A†|
    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// max |A†A - I|
    pub fn unitarity_error(&self) -> f64 {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= HERMITIAN_TOL
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() <= UNITARY_TOL
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let err = self.hermiticity_error();
        if err > HERMITIAN_TOL {
            return Err(Error::Model(format!(
                "operator is not hermitian (max |H - H^dag| = {err:.3e})"
            )));
        }
        Ok(())
    }

    /// Expectation value `<psi|A|psi>`.
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let d = self.dim;
        let mut acc = ZERO;
        for r in 0..d {
            let row: C64 = (0..d).map(|c| self.entries[r * d + c] * psi[c]).sum();
            acc += psi[r].conj() * row;
        }
        acc
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut n: u32) -> Operator {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.matmul(&base);
            }
            base = base.matmul(&base);
            n >>= 1;
        }
        acc
    }
}

impl Index<(usize, usize)> for Operator {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.entries[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Operator {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.entries[r * self.dim + c]
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim, rhs.dim);
        Operator {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn sigma_x() -> Operator {
    Operator::from_rows(2, vec![ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> Operator {
    Operator::from_rows(2, vec![ZERO, -I, I, ZERO])
}

pub fn sigma_z() -> Operator {
    Operator::from_rows(2, vec![ONE, ZERO, ZERO, -ONE])
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    let (da, db) = (a.dim(), b.dim());
    let d = da * db;
    let mut out = Operator::zeros(d);
    for ra in 0..da {
        for ca in 0..da {
            let x = a[(ra, ca)];
            if x == ZERO {
                continue;
            }
            for rb in 0..db {
                for cb in 0..db {
                    out[(ra * db + rb, ca * db + cb)] = x * b[(rb, cb)];
                }
            }
        }
    }
    out
}

/// Global-phase-insensitive gate fidelity `|Tr(U† V)| / d`.
pub fn gate_fidelity(u: &Operator, v: &Operator) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::Dimension {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let d = u.dim();
    let mut tr = ZERO;
    for r in 0..d {
        for c in 0..d {
            tr += u[(r, c)].conj() * v[(r, c)];
        }
    }
    Ok((tr.norm() / d as f64).min(1.0))
}

/// Normalized state of a d-level system.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Normalizes the given amplitudes. Fails on a zero or non-finite vector.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Model("state vector must have positive dimension".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("state vector has non-finite amplitudes".into()));
        }
        let norm = norm(&amplitudes);
        if norm == 0.0 {
            return Err(Error::Model("zero state vector cannot be normalized".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        Self { amplitudes }
    }

    /// Wrap amplitudes that are already normalized to within `NORM_TOL`.
    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn scaled(&self, a: C64) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|z| z * a).collect(),
        }
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.amplitudes.iter().map(|z| format!("{:+.9}{:+.9}i", z.re, z.im)))
            .finish()
    }
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Operator,
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi diagonalization of a hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary, then applies the real symmetric Jacobi rotation.
pub fn eigh(h: &Operator) -> Result<HermitianEigen> {
    h.ensure_hermitian()?;
    let d = h.dim();
    // symmetrize exactly so rounding in the input cannot break convergence
    let mut a = &h.scale(C64::new(0.5, 0.0)) + &h.adjoint().scale(C64::new(0.5, 0.0));
    let mut v = Operator::identity(d);
    let norm = a.frobenius_norm();
    let threshold = f64::EPSILON * norm.max(f64::MIN_POSITIVE);

    let off_norm = |a: &Operator| -> f64 {
        let mut s = 0.0;
        for r in 0..d {
            for c in 0..d {
                if r != c {
                    s += a[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > threshold {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Eigen {
                sweeps,
                off_norm: off_norm(&a),
                norm,
            });
        }
        sweeps += 1;
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= threshold * 1e-3 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = diag(1, conj(phase)) on (p, q) followed by the real rotation
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = phase.conj() * (-s);
                let jqq = phase.conj() * c;

                // A <- A J
                for r in 0..d {
                    let (x, y) = (a[(r, p)], a[(r, q)]);
                    a[(r, p)] = x * jpp + y * jqp;
                    a[(r, q)] = x * jpq + y * jqq;
                }
                // A <- J† A
                for c2 in 0..d {
                    let (x, y) = (a[(p, c2)], a[(q, c2)]);
                    a[(p, c2)] = jpp.conj() * x + jqp.conj() * y;
                    a[(q, c2)] = jpq.conj() * x + jqq.conj() * y;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                // V <- V J
                for r in 0..d {
                    let (x, y) = (v[(r, p)], v[(r, q)]);
                    v[(r, p)] = x * jpp + y * jqp;
                    v[(r, q)] = x * jpq + y * jqq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = Operator::zeros(d);
    for (new, &old) in order.iter().enumerate() {
        vectors.set_column(new, &v.column(old));
    }
    Ok(HermitianEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(d: usize, seed: u64) -> Operator {
        // small LCG, enough for a spread of test matrices
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut h = Operator::zeros(d);
        for r in 0..d {
            h[(r, r)] = C64::new(next(), 0.0);
            for c in (r + 1)..d {
                let z = C64::new(next(), next());
                h[(r, c)] = z;
                h[(c, r)] = z.conj();
            }
        }
        h
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for d in 1..=6 {
            for seed in 0..10 {
                let h = random_hermitian(d, seed * 31 + d as u64);
                let eig = eigh(&h).unwrap();
                let lambda = Operator::real_diagonal(&eig.values);
                let rebuilt = eig.vectors.matmul(&lambda).matmul(&eig.vectors.adjoint());
                assert!(rebuilt.max_abs_diff(&h) < 1e-13, "d={d} seed={seed}");
                assert!(eig.vectors.unitarity_error() < 1e-13);
                assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn eigh_handles_degenerate_spectrum() {
        let h = Operator::real_diagonal(&[1.0, 1.0, -2.0]);
        let eig = eigh(&h).unwrap();
        assert_eq!(eig.values, vec![-2.0, 1.0, 1.0]);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut h = sigma_x();
        h[(0, 1)] = C64::new(2.0, 0.0);
        assert!(matches!(eigh(&h), Err(Error::Model(_))));
    }

    #[test]
    fn pauli_algebra() {
        let xy = sigma_x().matmul(&sigma_y());
        assert!(xy.max_abs_diff(&sigma_z().scale(I)) < 1e-15);
        assert!(sigma_y().is_hermitian() && sigma_y().is_unitary());
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(
            tensor(&Operator::identity(2), &Operator::identity(2)),
            Operator::identity(4)
        );
        // basis (E, G) per dot: |E><G| = transition(0, 1); |GG> = index 3, |EE> = index 0
        let eg = Operator::transition(2, 0, 1);
        let both = tensor(&eg, &eg);
        let nonzero: Vec<_> = (0..4)
            .flat_map(|r| (0..4).map(move |c| (r, c)))
            .filter(|&(r, c)| both[(r, c)] != ZERO)
            .collect();
        assert_eq!(nonzero, vec![(0, 3)]);
        let xx = tensor(&sigma_x(), &sigma_x());
        let out = xx.apply(&StateVector::basis(4, 3));
        assert_eq!(out.amplitudes()[0], ONE);
    }

    #[test]
    fn tensor_mixed_product() {
        let a = random_hermitian(2, 1);
        let b = random_hermitian(3, 2);
        let c = random_hermitian(2, 3);
        let d = random_hermitian(3, 4);
        let lhs = tensor(&a, &b).matmul(&tensor(&c, &d));
        let rhs = tensor(&a.matmul(&c), &b.matmul(&d));
        assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let id = Operator::identity(2);
        assert!((gate_fidelity(&id, &id).unwrap() - 1.0).abs() < 1e-15);
        let phased = id.scale(C64::from_polar(1.0, 0.7));
        assert!((gate_fidelity(&id, &phased).unwrap() - 1.0).abs() < 1e-15);
        assert!(gate_fidelity(&id, &sigma_x()).unwrap().abs() < 1e-15);
        assert!(matches!(
            gate_fidelity(&id, &Operator::identity(3)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn state_vector_normalizes() {
        let psi = StateVector::new(vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        assert!(StateVector::new(vec![ZERO, ZERO]).is_err());
        assert!(StateVector::new(vec![C64::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let u = sigma_x().scale(C64::from_polar(1.0, 0.3));
        let mut acc = Operator::identity(2);
        for _ in 0..7 {
            acc = acc.matmul(&u);
        }
        assert!(u.powi(7).max_abs_diff(&acc) < 1e-14);
    }
}
