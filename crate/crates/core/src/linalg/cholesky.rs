use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative pivot threshold; scaled by the largest diagonal entry (floored at 1).
pub const PD_TOL: f64 = 1e-12;

/// Lower-triangular factor `L` with `M = L * L^T`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: DMatrix<f64>,
}

/// Factors a symmetric matrix, reading only its lower triangle.
///
/// Fails with [`Error::NotPositiveDefinite`] on the first pivot that does not
/// exceed `PD_TOL * max(max_i M[i][i], 1)`, so callers can use it as a strict
/// feasibility test.
pub fn cholesky(m: &DMatrix<f64>) -> Result<CholeskyFactor> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
    }
    let scale = m.diagonal().iter().fold(1.0_f64, |acc, &d| acc.max(d));
    let threshold = PD_TOL * scale;

    let mut l = m.lower_triangle();
    for j in 0..n {
        // left-looking update: column j minus the contributions of columns k < j
        for k in 0..j {
            let ljk = l[(j, k)];
            if ljk != 0.0 {
                for i in j..n {
                    l[(i, j)] -= ljk * l[(i, k)];
                }
            }
        }
        let pivot = l[(j, j)];
        if !(pivot > threshold) {
            return Err(Error::NotPositiveDefinite { pivot: j, value: pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            l[(i, j)] /= d;
        }
    }
    Ok(CholeskyFactor { l })
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut DVector<f64>) {
        let n = self.dim();
        for j in 0..n {
            let yj = b[j] / self.l[(j, j)];
            b[j] = yj;
            if yj != 0.0 {
                for i in j + 1..n {
                    b[i] -= self.l[(i, j)] * yj;
                }
            }
        }
    }

    /// Solves `L^T x = y` in place.
    pub fn solve_upper_in_place(&self, b: &mut DVector<f64>) {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l[(k, i)] * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
    }

    /// Returns `z` with `M z = rhs`.
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        assert_eq!(rhs.len(), self.dim(), "right-hand side length");
        let mut z = rhs.clone();
        self.solve_lower_in_place(&mut z);
        self.solve_upper_in_place(&mut z);
        z
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.l * self.l.transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn identity_factors_to_identity() {
        let f = cholesky(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(f.l(), &DMatrix::<f64>::identity(3, 3));
    }

    #[test]
    fn hand_factorization() {
        let f = cholesky(&dmatrix![4.0, 2.0; 2.0, 5.0]).unwrap();
        assert_eq!(f.l(), &dmatrix![2.0, 0.0; 1.0, 2.0]);
    }

    #[test]
    fn indefinite_fails_at_first_pivot() {
        let err = cholesky(&dmatrix![0.0, 1.0; 1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { pivot: 0, .. }));
    }

    #[test]
    fn second_pivot_reported() {
        // [[1,2],[2,1]] has second pivot 1 - 4 = -3
        let err = cholesky(&dmatrix![1.0, 2.0; 2.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { pivot: 1, .. }));
    }

    #[test]
    fn solves() {
        let f = cholesky(&dmatrix![1.0, -0.5; -0.5, 1.0]).unwrap();
        let z = f.solve(&dvector![1.0, 0.0]);
        assert!((z[0] - 4.0 / 3.0).abs() < 1e-14);
        assert!((z[1] - 2.0 / 3.0).abs() < 1e-14);

        let f = cholesky(&dmatrix![4.0, 2.0; 2.0, 5.0]).unwrap();
        let z = f.solve(&dvector![4.0, 2.0]);
        assert!((z[0] - 1.0).abs() < 1e-14 && z[1].abs() < 1e-14);

        let f = cholesky(&DMatrix::identity(4, 4)).unwrap();
        let r = dvector![1.0, -2.0, 3.5, 0.25];
        assert_eq!(f.solve(&r), r);
    }

    #[test]
    fn singular_psd_rejected() {
        let err = cholesky(&dmatrix![1.0, 1.0; 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { pivot: 1, .. }));
    }
}
