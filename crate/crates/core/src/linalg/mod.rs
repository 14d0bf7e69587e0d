//! Dense symmetric kernels used by the LMI oracles.

mod cholesky;
mod lanczos;

pub use cholesky::{cholesky, CholeskyFactor, PD_TOL};
pub use lanczos::{
    dense_max_eig, lanczos_max_eig, max_eig, EigenPair, LanczosOptions, SymmetricOperator,
    DENSE_FALLBACK_DIM,
};
