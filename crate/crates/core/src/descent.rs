//! Gradient ray-shooting descent on the sliced domain.
//!
//! Each outer iteration shoots a ray from `u` along the negative gradient
//! direction to the boundary point `s`, then bisects the segment `[u, s]` for
//! `k1` steps using the sign of the directional derivative at the midpoint.
//! The iterate moves to the lower end of the final bracket. The run stops after
//! `N` iterations, or after `k2` consecutive iterations in which the bisection
//! never pulled back from the boundary. An iteration whose bisection never
//! advances the lower end leaves the iterate unchanged, so the run stops there
//! with [`Termination::StationaryPoint`] instead of replaying it up to `N`.
//!
//! `r_hat + f(u)` is a valid QUBO upper bound at every iterate, so an early
//! stop only weakens the bound.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lmi::{LmiSystem, OracleCache, PlanePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentParams {
    /// Outer iteration limit `N`.
    pub max_iters: usize,
    /// Bisection steps `k1` per outer iteration.
    pub bisection_steps: usize,
    /// Consecutive boundary iterations `k2` before stopping.
    pub boundary_limit: usize,
    /// Relative ray length below which an iteration counts as stalled.
    pub step_tol: f64,
    #[serde(skip)]
    pub record_trace: bool,
}

impl DescentParams {
    /// Standalone bounding: `N = 50000`, `k1 = 5`, `k2 = 2`.
    pub fn standalone() -> Self {
        Self { max_iters: 50_000, bisection_steps: 5, boundary_limit: 2, step_tol: 1e-12, record_trace: false }
    }

    /// Per-node bounding inside branch-and-bound: `N = 5`.
    pub fn node() -> Self {
        Self { max_iters: 5, ..Self::standalone() }
    }

    /// Root node of branch-and-bound, which starts cold.
    pub fn root() -> Self {
        Self { max_iters: 2000, bisection_steps: 10, ..Self::standalone() }
    }

    pub fn with_trace(mut self) -> Self {
        self.record_trace = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.bisection_steps == 0 || self.boundary_limit == 0 {
            return Err(Error::InvalidInput("k1 and k2 must be at least 1".into()));
        }
        if !(self.step_tol >= 0.0) {
            return Err(Error::InvalidInput("step tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

impl Default for DescentParams {
    fn default() -> Self {
        Self::standalone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    IterLimit,
    BoundaryStall,
    StationaryPoint,
    Degenerate,
}

/// One outer iteration, recorded after the iterate moved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    /// `f(u)` at the new iterate.
    pub f: f64,
    /// `r_hat + f(u)`.
    pub bound: f64,
    /// Distance moved this iteration.
    pub step: f64,
    /// Whether the bisection stayed pinned to the boundary.
    pub boundary: bool,
}

#[derive(Debug, Clone)]
pub struct DescentResult {
    pub u_hat: DVector<f64>,
    pub r_hat: f64,
    pub bound: f64,
    pub outer_iters: usize,
    pub termination: Termination,
    /// Empty unless `record_trace` was set; entry 0 is the start point.
    pub trace: Vec<TraceRecord>,
}

impl DescentResult {
    pub fn point(&self) -> PlanePoint {
        PlanePoint::new(self.u_hat.clone(), self.r_hat)
    }
}

/// Runs the descent from an interior `start`.
pub fn descend(sys: &LmiSystem, start: PlanePoint, params: &DescentParams) -> Result<DescentResult> {
    params.validate()?;
    let r_hat = start.r_hat;
    let mut cache = sys.cache(start)?;
    let mut trace = Vec::new();
    if params.record_trace {
        let f = cache.eval_f()?;
        trace.push(TraceRecord { iter: 0, f, bound: r_hat + f, step: 0.0, boundary: false });
    }

    let mut iters = 0;
    let mut stalls = 0;
    let mut termination = Termination::IterLimit;

    while iters < params.max_iters {
        let g = match cache.grad_dir() {
            Ok(g) => g,
            Err(Error::StationaryPoint { .. }) => {
                termination = Termination::StationaryPoint;
                break;
            }
            Err(Error::DegenerateDirection { .. }) => {
                termination = Termination::Degenerate;
                break;
            }
            Err(e) => return Err(e),
        };
        let dir = -(&g / g.norm());
        let t = match cache.boundary_ray(&dir) {
            Ok(t) => t,
            Err(Error::UnboundedRay { .. } | Error::NoConvergence { .. }) => {
                termination = Termination::Degenerate;
                break;
            }
            Err(e) => return Err(e),
        };
        iters += 1;

        let u = cache.point().u.clone();
        let mut boundary = true;
        let mut fixed_point = false;
        if t > params.step_tol * (1.0 + u.norm()) {
            let (lower, moved_off, advanced) =
                bisect(sys, cache, u.clone() + t * &dir, r_hat, params.bisection_steps);
            cache = lower;
            boundary = !moved_off;
            // the lower end never left u: every later iteration would replay this one
            fixed_point = !advanced;
        }

        if params.record_trace {
            let f = cache.eval_f()?;
            let step = (&cache.point().u - &u).norm();
            trace.push(TraceRecord { iter: iters, f, bound: r_hat + f, step, boundary });
        }

        if fixed_point {
            termination = Termination::StationaryPoint;
            break;
        }
        if boundary {
            stalls += 1;
            if stalls >= params.boundary_limit {
                termination = Termination::BoundaryStall;
                break;
            }
        } else {
            stalls = 0;
        }
    }

    let bound = cache.bound()?;
    Ok(DescentResult {
        u_hat: cache.point().u.clone(),
        r_hat,
        bound,
        outer_iters: iters,
        termination,
        trace,
    })
}

/// Bisection on `[lower, upper]`. Returns the final lower end (always with a
/// valid cache), whether the upper end ever moved by the gradient test, and
/// whether the lower end moved at all.
fn bisect<'a>(
    sys: &'a LmiSystem,
    mut lower: OracleCache<'a>,
    mut upper: DVector<f64>,
    r_hat: f64,
    steps: usize,
) -> (OracleCache<'a>, bool, bool) {
    let mut moved_off = false;
    let mut advanced = false;
    for _ in 0..steps {
        let mid = (&upper + &lower.point().u) * 0.5;
        let span = &upper - &lower.point().u;
        let candidate = match sys.cache(PlanePoint::new(mid.clone(), r_hat)) {
            Ok(c) => c,
            Err(_) => {
                // numerically on the boundary: shrink from above
                upper = mid;
                continue;
            }
        };
        match candidate.grad_dir() {
            Ok(g) if g.dot(&span) > 0.0 => {
                upper = mid;
                moved_off = true;
            }
            Ok(_) | Err(Error::StationaryPoint { .. }) => {
                lower = candidate;
                advanced = true;
            }
            Err(_) => upper = mid,
        }
    }
    (lower, moved_off, advanced)
}
