//! Largest-eigenvalue Lanczos iteration with full reorthogonalization.
//!
//! The Krylov basis is kept in memory and every new vector is orthogonalized
//! twice against all previous ones, so after `m` steps the tridiagonal
//! projection carries the full spectrum. On an invariant-subspace breakdown the
//! iteration restarts from a fresh random vector orthogonal to the basis, which
//! keeps the top eigenvalue reachable even for start vectors with no component
//! along it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Operators at or below this dimension fall back to a dense eigensolver when
/// Lanczos fails to converge.
pub const DENSE_FALLBACK_DIM: usize = 64;

/// A symmetric linear map applied matrix-free.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;

    /// Writes `A x` into `out`.
    fn apply(&self, x: &DVector<f64>, out: &mut DVector<f64>);

    /// Materializes the operator column by column.
    fn to_dense(&self) -> DMatrix<f64> {
        let m = self.dim();
        let mut a = DMatrix::zeros(m, m);
        let mut e = DVector::zeros(m);
        let mut col = DVector::zeros(m);
        for j in 0..m {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            a.set_column(j, &col);
            e[j] = 0.0;
        }
        a
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &DVector<f64>, out: &mut DVector<f64>) {
        out.gemv(1.0, self, x, 0.0);
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Relative residual tolerance: `|A v - lambda v| <= tol * max(1, |lambda|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Seed for the start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 1000, seed: 0x5eed_0001 }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Unit-norm eigenvector.
    pub vector: DVector<f64>,
}

/// Largest algebraic eigenvalue of `op` and a unit eigenvector.
pub fn lanczos_max_eig<A: SymmetricOperator + ?Sized>(
    op: &A,
    opts: &LanczosOptions,
) -> Result<EigenPair> {
    let m = op.dim();
    if m == 0 {
        return Err(Error::InvalidInput("operator of dimension 0".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if m == 1 {
        let mut out = DVector::zeros(1);
        op.apply(&DVector::from_element(1, 1.0), &mut out);
        return Ok(EigenPair { value: out[0], vector: DVector::from_element(1, 1.0) });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let steps = opts.max_iter.min(m).max(1);

    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut alpha: Vec<f64> = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);

    let mut q = random_unit(&mut rng, m, &basis).expect("empty basis always admits a start vector");
    let mut w = DVector::zeros(m);
    let mut best = (f64::NAN, f64::INFINITY);
    let mut anorm = 0.0_f64;

    for j in 0..steps {
        op.apply(&q, &mut w);
        let a = q.dot(&w);
        alpha.push(a);
        basis.push(q.clone());
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = v.dot(&w);
                w.axpy(-c, v, 1.0);
            }
        }
        let b = w.norm();
        anorm = anorm.max(a.abs() + b);
        let full = j + 1 == m;
        let breakdown = b <= 1e-13 * anorm.max(f64::MIN_POSITIVE);
        let check = full || j + 1 == steps || (!breakdown && (j < 32 || j % 4 == 3));

        if check {
            let (theta, s) = top_ritz(&alpha, &beta);
            let residual = if full { 0.0 } else { b * s[j].abs() };
            best = (theta, residual);
            if full || residual <= opts.tol * theta.abs().max(1.0) {
                if !(breakdown && !full) {
                    let mut v = DVector::zeros(m);
                    for (coef, qi) in s.iter().zip(&basis) {
                        v.axpy(*coef, qi, 1.0);
                    }
                    v /= v.norm();
                    return Ok(EigenPair { value: theta, vector: v });
                }
            }
        }
        if j + 1 == steps {
            break;
        }
        if breakdown {
            beta.push(0.0);
            match random_unit(&mut rng, m, &basis) {
                Some(next) => q = next,
                None => break,
            }
        } else {
            beta.push(b);
            q = &w / b;
        }
    }
    Err(Error::NoConvergence { estimate: best.0, residual: best.1 })
}

/// Dense symmetric eigendecomposition; returns the largest eigenpair.
pub fn dense_max_eig(a: &DMatrix<f64>) -> EigenPair {
    let eig = SymmetricEigen::new(a.clone());
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty matrix");
    let v = eig.eigenvectors.column(idx).into_owned();
    EigenPair { value, vector: v }
}

/// Lanczos with a dense fallback for small operators.
pub fn max_eig<A: SymmetricOperator + ?Sized>(op: &A, opts: &LanczosOptions) -> Result<EigenPair> {
    match lanczos_max_eig(op, opts) {
        Ok(p) => Ok(p),
        Err(Error::NoConvergence { .. }) if op.dim() <= DENSE_FALLBACK_DIM => {
            Ok(dense_max_eig(&op.to_dense()))
        }
        Err(e) => Err(e),
    }
}

fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, DVector<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let pair = dense_max_eig(&t);
    (pair.value, pair.vector)
}

fn random_unit(rng: &mut ChaCha8Rng, m: usize, basis: &[DVector<f64>]) -> Option<DVector<f64>> {
    for _ in 0..8 {
        let mut v = DVector::from_fn(m, |_, _| rng.random::<f64>() - 0.5);
        for _ in 0..2 {
            for b in basis {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            return Some(v / n);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn check_residual(a: &DMatrix<f64>, p: &EigenPair, tol: f64) {
        let r = (a * &p.vector - p.value * &p.vector).norm();
        assert!(r <= tol * p.value.abs().max(1.0), "residual {r}");
        assert!((p.vector.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let p = lanczos_max_eig(&a, &LanczosOptions::default()).unwrap();
        assert!((p.value - 3.0).abs() < 1e-12);
        check_residual(&a, &p, 1e-10);
    }

    #[test]
    fn two_by_two() {
        let a = dmatrix![2.0, 1.0; 1.0, 2.0];
        let p = lanczos_max_eig(&a, &LanczosOptions::default()).unwrap();
        assert!((p.value - 3.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((p.vector[0].abs() - s).abs() < 1e-10 && (p.vector[1].abs() - s).abs() < 1e-10);
        assert!(p.vector[0] * p.vector[1] > 0.0);
    }

    #[test]
    fn scalar_operator() {
        let a = dmatrix![5.0];
        assert_eq!(lanczos_max_eig(&a, &LanczosOptions::default()).unwrap().value, 5.0);
    }

    #[test]
    fn invariant_subspace_restart() {
        // identity block: the first Krylov step breaks down immediately
        let mut a = DMatrix::identity(6, 6);
        a[(5, 5)] = 4.0;
        let p = lanczos_max_eig(&a, &LanczosOptions::default()).unwrap();
        assert!((p.value - 4.0).abs() < 1e-12);
        let a = DMatrix::<f64>::identity(5, 5) * 2.0;
        let p = lanczos_max_eig(&a, &LanczosOptions::default()).unwrap();
        assert!((p.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = DMatrix::from_fn(20, 20, |i, j| ((i * 7 + j * 7 + i * j) % 11) as f64 - 5.0);
        let a = (&a + a.transpose()) * 0.5;
        let o = LanczosOptions::default();
        let p1 = lanczos_max_eig(&a, &o).unwrap();
        let p2 = lanczos_max_eig(&a, &o).unwrap();
        assert_eq!(p1.value.to_bits(), p2.value.to_bits());
        assert_eq!(p1.vector, p2.vector);
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let a = DMatrix::from_diagonal(&DVector::from_fn(30, |i, _| i as f64));
        let o = LanczosOptions { max_iter: 2, ..Default::default() };
        assert!(matches!(lanczos_max_eig(&a, &o), Err(Error::NoConvergence { .. })));
        let p = max_eig(&a, &o).unwrap();
        assert!((p.value - 29.0).abs() < 1e-10);
    }
}
