//! Dual bounds for QUBO maximization from the QCR bounding SDP.
//!
//! The SDP `min r  s.t.  F([u, r]) >= 0` is solved on a horizontal slice of its
//! feasible set: for a fixed height `r_hat` the depth function
//! `f(u) = inf { t : F([u, r_hat + t]) >= 0 }` is convex, and every feasible
//! `u` certifies the upper bound `r_hat + f(u)`. The [`descent`] solver
//! minimizes `f` with gradient ray shooting and bisection, using the cheap
//! structured oracles in [`lmi`]. Because it restarts from any feasible shift,
//! it warmstarts well inside the [`bnb`] branch-and-bound.
//!
//! ```
//! use qcr_core::{io, bnb};
//!
//! let p = io::parse_triplet("2 3\n1 1 1\n2 2 -1\n1 2 2").unwrap();
//! let res = bnb::solve(&p, &bnb::BnbConfig::default()).unwrap();
//! assert_eq!(res.incumbent_value, Some(2.0));
//! ```

pub mod bnb;
pub mod descent;
pub mod enumerate;
mod error;
pub mod generate;
pub mod io;
pub mod linalg;
pub mod lmi;
pub mod model;
pub mod starts;

pub use bnb::{solve, BnbConfig, BnbNode, BnbResult, BnbStatus};
pub use descent::{descend, DescentParams, DescentResult, Termination, TraceRecord};
pub use error::{Error, Result};
pub use lmi::{LmiSystem, OracleCache, PlanePoint};
pub use model::{evaluate_qubo, fix_variable, qcr_objective, trivial_shift, Assignment, QcrShift, QuboProblem};

pub use nalgebra::{DMatrix, DVector};
