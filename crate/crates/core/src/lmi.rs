//! The LMI of the QCR bounding SDP and its three oracles.
//!
//! For `y = [u, r]` the constraint matrix is
//!
//! ```text
//!         [ r            -(c + u)^T / 2 ]
//! F(y) =  [                             ]
//!         [ -(c + u) / 2  diag(u) - Q   ]
//! ```
//!
//! of size `m = n + 1`. Fixing the last coordinate at a height `r_hat` slices
//! the feasible set into a bounded convex domain `D` of shifts `u`. On it,
//! `f(u) = inf { t : F([u, r_hat + t]) >= 0 }` is convex and non-positive, and
//! `r_hat + f(u)` is a valid QUBO upper bound for every `u` in `D`.
//!
//! Every oracle works off one Cholesky factor of `F([u, r_hat])`, held in an
//! [`OracleCache`]:
//!
//! * evaluation: solve `F z = e_1`, then `f = -1 / z_1`;
//! * gradient direction: `g_i = z_1 z_{i+1} - z_{i+1}^2`, a positive multiple
//!   (`z_1^2`) of the true gradient;
//! * boundary: the first `t > 0` at which `F([u + t d, r_hat])` turns singular
//!   is `1 / lambda_max(B)` with `B = -L^{-1} C_2 L^{-T}`, where
//!   `C_2 = [[0, -d^T/2], [-d/2, diag(d)]]`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, max_eig, CholeskyFactor, LanczosOptions, SymmetricOperator};
use crate::model::{QcrShift, QuboProblem};

/// Relative push applied to the boundary height when building a start point.
pub const PUSH_REL: f64 = 0.1;
/// Absolute floor of that push.
pub const PUSH_ABS: f64 = 1.0;
const LAMBDA_TOL: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct LmiSystem {
    problem: QuboProblem,
    lanczos: LanczosOptions,
}

/// A point `[u, r_hat]` on the slicing hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanePoint {
    pub u: DVector<f64>,
    pub r_hat: f64,
}

impl PlanePoint {
    pub fn new(u: DVector<f64>, r_hat: f64) -> Self {
        Self { u, r_hat }
    }
}

impl LmiSystem {
    pub fn new(problem: QuboProblem) -> Self {
        Self { problem, lanczos: LanczosOptions::default() }
    }

    /// Seeds the Lanczos start vector used by the boundary oracle.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.lanczos.seed = seed;
        self
    }

    pub fn problem(&self) -> &QuboProblem {
        &self.problem
    }

    pub fn n(&self) -> usize {
        self.problem.n()
    }

    /// Matrix size `n + 1`.
    pub fn dim(&self) -> usize {
        self.problem.n() + 1
    }

    pub fn lanczos_options(&self) -> &LanczosOptions {
        &self.lanczos
    }

    /// `F([u, r])`.
    pub fn assemble(&self, u: &DVector<f64>, r: f64) -> DMatrix<f64> {
        let n = self.n();
        assert_eq!(u.len(), n, "shift length");
        let p = &self.problem;
        let mut f = DMatrix::zeros(n + 1, n + 1);
        f[(0, 0)] = r;
        for i in 0..n {
            let off = -(p.c()[i] + u[i]) / 2.0;
            f[(0, i + 1)] = off;
            f[(i + 1, 0)] = off;
            for j in 0..n {
                f[(i + 1, j + 1)] = -p.q()[(i, j)];
            }
            f[(i + 1, i + 1)] += u[i];
        }
        f
    }

    /// `F(y)` for a full coordinate vector `y = [u_1..u_n, r]`.
    pub fn assemble_y(&self, y: &DVector<f64>) -> Result<DMatrix<f64>> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.len() });
        }
        let n = self.n();
        Ok(self.assemble(&y.rows(0, n).into_owned(), y[n]))
    }

    pub fn cache(&self, point: PlanePoint) -> Result<OracleCache<'_>> {
        OracleCache::new(self, point)
    }

    pub fn is_interior(&self, point: &PlanePoint) -> bool {
        point.u.len() == self.n() && cholesky(&self.assemble(&point.u, point.r_hat)).is_ok()
    }

    /// Lowest height `r` at which `F([u, r])` is PSD:
    /// `(c + u)^T (diag(u) - Q)^{-1} (c + u) / 4`.
    ///
    /// This is the root `r_d - 1/z_1` of the affine map `t -> det F([u, r_d + t])`,
    /// which does not depend on `r_d`. Requires `diag(u) - Q` positive definite.
    pub fn boundary_height(&self, u: &DVector<f64>) -> Result<f64> {
        let p = &self.problem;
        if u.len() != p.n() {
            return Err(Error::DimensionMismatch { expected: p.n(), found: u.len() });
        }
        let m = DMatrix::from_diagonal(u) - p.q();
        let factor = cholesky(&m).map_err(|_| Error::InfeasibleShift)?;
        let w = p.c() + u;
        let y = factor.solve(&w);
        Ok(w.dot(&y) / 4.0)
    }

    /// Lifts a strictly convexifying shift to an interior point of the slice.
    ///
    /// The height is the boundary height pushed up by
    /// `max(PUSH_REL * |r_b|, PUSH_ABS)`; the absolute part is doubled once if
    /// the result does not factor.
    pub fn initial_feasible_point(&self, u: &QcrShift) -> Result<PlanePoint> {
        let u = u.as_vector();
        let r_b = self.boundary_height(u)?;
        if !r_b.is_finite() {
            return Err(Error::NumericFailure(format!("boundary height is {r_b}")));
        }
        for abs in [PUSH_ABS, 2.0 * PUSH_ABS] {
            let point = PlanePoint::new(u.clone(), r_b + (PUSH_REL * r_b.abs()).max(abs));
            if self.is_interior(&point) {
                return Ok(point);
            }
        }
        Err(Error::NumericFailure("pushed start point is not interior".into()))
    }

    /// First `t > 0` where `F([u + t d, r_hat])` leaves the PD cone.
    pub fn boundary_ray(&self, point: &PlanePoint, d: &DVector<f64>) -> Result<f64> {
        self.cache(point.clone())?.boundary_ray(d)
    }
}

/// Factorization of `F([u, r_hat])` and the solution of `F z = e_1`.
#[derive(Debug, Clone)]
pub struct OracleCache<'a> {
    sys: &'a LmiSystem,
    point: PlanePoint,
    factor: CholeskyFactor,
    z: DVector<f64>,
}

impl<'a> OracleCache<'a> {
    /// Fails with [`Error::NotPositiveDefinite`] when the point is not interior.
    pub fn new(sys: &'a LmiSystem, point: PlanePoint) -> Result<Self> {
        if point.u.len() != sys.n() {
            return Err(Error::DimensionMismatch { expected: sys.n(), found: point.u.len() });
        }
        let factor = cholesky(&sys.assemble(&point.u, point.r_hat))?;
        let mut e1 = DVector::zeros(sys.dim());
        e1[0] = 1.0;
        let z = factor.solve(&e1);
        Ok(Self { sys, point, factor, z })
    }

    pub fn point(&self) -> &PlanePoint {
        &self.point
    }

    pub fn factor(&self) -> &CholeskyFactor {
        &self.factor
    }

    /// Solution of `F([u, r_hat]) z = e_1`.
    pub fn z(&self) -> &DVector<f64> {
        &self.z
    }

    fn degeneracy_tol(&self) -> f64 {
        DEGENERACY_TOL * (1.0 + self.z.norm_squared())
    }

    /// `f(u) = -1 / z_1`.
    pub fn eval_f(&self) -> Result<f64> {
        let z1 = self.z[0];
        if !(z1.abs() > self.degeneracy_tol()) {
            return Err(Error::DegenerateDirection { z1 });
        }
        Ok(-1.0 / z1)
    }

    /// The QUBO bound `r_hat + f(u)` certified by this point.
    pub fn bound(&self) -> Result<f64> {
        Ok(self.point.r_hat + self.eval_f()?)
    }

    /// A positive multiple of the gradient of `f` at `u`.
    pub fn grad_dir(&self) -> Result<DVector<f64>> {
        let z = &self.z;
        let z1 = z[0];
        if !(z1.abs() > self.degeneracy_tol()) {
            return Err(Error::DegenerateDirection { z1 });
        }
        let g = DVector::from_iterator(self.sys.n(), z.iter().skip(1).map(|&zi| z1 * zi - zi * zi));
        let norm = g.norm();
        if !(norm > self.degeneracy_tol()) {
            return Err(Error::StationaryPoint { norm });
        }
        Ok(g)
    }

    /// The generalized-eigenvalue operator for direction `d`.
    pub fn ray_operator<'c>(&'c self, d: &'c DVector<f64>) -> RayOperator<'c> {
        RayOperator { factor: &self.factor, d }
    }

    /// Distance along `d` (in units of `d`) to the boundary of the slice.
    pub fn boundary_ray(&self, d: &DVector<f64>) -> Result<f64> {
        if d.len() != self.sys.n() {
            return Err(Error::DimensionMismatch { expected: self.sys.n(), found: d.len() });
        }
        if !d.iter().all(|v| v.is_finite()) || d.norm() == 0.0 {
            return Err(Error::InvalidInput("ray direction must be finite and nonzero".into()));
        }
        let op = self.ray_operator(d);
        let lambda = max_eig(&op, self.sys.lanczos_options())?.value;
        if !(lambda > LAMBDA_TOL) {
            return Err(Error::UnboundedRay { lambda });
        }
        Ok(1.0 / lambda)
    }
}

/// `B = -L^{-1} C_2 L^{-T}` applied via two triangular solves around the
/// arrow-plus-diagonal product with `C_2`.
pub struct RayOperator<'c> {
    factor: &'c CholeskyFactor,
    d: &'c DVector<f64>,
}

impl SymmetricOperator for RayOperator<'_> {
    fn dim(&self) -> usize {
        self.factor.dim()
    }

    fn apply(&self, x: &DVector<f64>, out: &mut DVector<f64>) {
        let mut y = x.clone();
        self.factor.solve_upper_in_place(&mut y);
        let d = self.d;
        let y0 = y[0];
        let mut head = 0.0;
        for (i, &di) in d.iter().enumerate() {
            head += di * y[i + 1];
            out[i + 1] = -(di * y[i + 1] - 0.5 * di * y0);
        }
        out[0] = 0.5 * head;
        self.factor.solve_lower_in_place(out);
    }
}
