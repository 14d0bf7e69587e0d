//! QUBO instances, the QCR-shifted objective, and variable fixing.
//!
//! Everything here maximizes `x^T Q x + c^T x + offset` over `x in {0,1}^n`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dense_max_eig, max_eig, LanczosOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct QuboProblem {
    q: DMatrix<f64>,
    c: DVector<f64>,
    offset: f64,
}

impl QuboProblem {
    /// `q` must be square and exactly symmetric; `c` must match its size.
    pub fn new(q: DMatrix<f64>, c: DVector<f64>, offset: f64) -> Result<Self> {
        let n = q.nrows();
        if n == 0 {
            return Err(Error::InvalidInput("problem needs at least one variable".into()));
        }
        if q.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: q.ncols() });
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: c.len() });
        }
        for i in 0..n {
            for j in i + 1..n {
                if q[(i, j)] != q[(j, i)] {
                    return Err(Error::InvalidInput(format!(
                        "Q is not symmetric at ({i}, {j}): {} != {}",
                        q[(i, j)],
                        q[(j, i)]
                    )));
                }
            }
        }
        if q.iter().chain(c.iter()).any(|v| !v.is_finite()) || !offset.is_finite() {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { q, c, offset })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(n, n), DVector::zeros(n), 0.0)
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// True when every coefficient (including the offset) is an integer.
    pub fn is_integral(&self) -> bool {
        self.q.iter().chain(self.c.iter()).chain(std::iter::once(&self.offset)).all(|v| v.fract() == 0.0)
    }

    /// Largest absolute coefficient, at least 1.
    pub fn scale(&self) -> f64 {
        self.q.iter().chain(self.c.iter()).fold(1.0_f64, |m, v| m.max(v.abs()))
    }

    /// Objective at a 0/1 vector given as raw bits; no length check.
    pub(crate) fn value_of_bits(&self, x: &[u8]) -> f64 {
        let n = self.n();
        let mut v = self.offset;
        for i in (0..n).filter(|&i| x[i] == 1) {
            v += self.c[i];
            let col = self.q.column(i);
            for j in (0..n).filter(|&j| x[j] == 1) {
                v += col[j];
            }
        }
        v
    }
}

/// A 0/1 vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(Vec<u8>);

impl Assignment {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidInput(format!("assignment entry {b} is not 0 or 1")));
        }
        Ok(Self(bits))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.0.len(), self.0.iter().map(|&b| b as f64))
    }
}

/// Diagonal perturbation `u` of the QCR reformulation.
#[derive(Debug, Clone, PartialEq)]
pub struct QcrShift(DVector<f64>);

impl QcrShift {
    pub fn new(u: DVector<f64>) -> Self {
        Self(u)
    }

    pub fn uniform(n: usize, value: f64) -> Self {
        Self(DVector::from_element(n, value))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `lambda_max(Q - diag(u)) <= psd_tol`, checked with a dense eigensolve.
    pub fn is_convexifying(&self, p: &QuboProblem, psd_tol: f64) -> bool {
        if self.len() != p.n() {
            return false;
        }
        let m = p.q() - DMatrix::from_diagonal(&self.0);
        dense_max_eig(&m).value <= psd_tol
    }
}

pub fn evaluate_qubo(p: &QuboProblem, x: &Assignment) -> Result<f64> {
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), found: x.len() });
    }
    Ok(p.value_of_bits(x.bits()))
}

/// `x^T (Q - diag(u)) x + (c + u)^T x + offset` for a possibly fractional `x`.
pub fn qcr_objective(p: &QuboProblem, u: &QcrShift, x: &DVector<f64>) -> Result<f64> {
    let n = p.n();
    for len in [u.len(), x.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    let u = u.as_vector();
    let qx = p.q() * x;
    let mut v = p.offset() + x.dot(&qx);
    for i in 0..n {
        v += -u[i] * x[i] * x[i] + (p.c()[i] + u[i]) * x[i];
    }
    Ok(v)
}

/// Substitutes `x_k = b` (0-based `k`) and returns the reduced problem.
///
/// The child's objective at any `x'` equals the parent's at `x'` with `b`
/// inserted at position `k`. Fails with [`Error::EmptyProblem`] when `n == 1`.
pub fn fix_variable(p: &QuboProblem, k: usize, b: u8) -> Result<QuboProblem> {
    let n = p.n();
    if k >= n {
        return Err(Error::InvalidInput(format!("variable index {k} out of range for n = {n}")));
    }
    if b > 1 {
        return Err(Error::InvalidInput(format!("fixed value {b} is not 0 or 1")));
    }
    if n == 1 {
        return Err(Error::EmptyProblem);
    }
    let q = p.q().clone().remove_row(k).remove_column(k);
    let bf = b as f64;
    let c = DVector::from_iterator(
        n - 1,
        (0..n).filter(|&i| i != k).map(|i| p.c()[i] + 2.0 * p.q()[(i, k)] * bf),
    );
    let offset = p.offset() + (p.q()[(k, k)] + p.c()[k]) * bf;
    Ok(QuboProblem { q, c, offset })
}

/// Strictness margin added on top of `lambda_max(Q)` for the trivial shift.
pub fn delta_strict(lambda_max: f64) -> f64 {
    (0.01 * lambda_max.abs()).max(1.0)
}

/// `u_i = lambda_max(Q) + delta_strict` for every `i`, so `diag(u) - Q` has
/// smallest eigenvalue at least `delta_strict >= 1`.
pub fn trivial_shift(p: &QuboProblem, seed: u64) -> Result<QcrShift> {
    let opts = LanczosOptions { seed, ..LanczosOptions::default() };
    let lambda = max_eig(p.q(), &opts)?.value;
    Ok(QcrShift::uniform(p.n(), lambda + delta_strict(lambda)))
}
