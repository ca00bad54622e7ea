use thiserror::Error;

use crate::measopt::Minimum;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |m[i][j] - conj(m[j][i])| = {violation:e}")]
    NotHermitian { violation: f64 },

    #[error("trace is not one: |Tr m - 1| = {violation:e}")]
    TraceNotOne { violation: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state vector is not normalized: |norm^2 - 1| = {violation:e}")]
    NotNormalized { violation: f64 },

    #[error("state is not pure: |Tr rho^2 - 1| = {violation:e}")]
    NotPure { violation: f64 },

    #[error("matrix is not unitary: max |U^dag U - I| = {violation:e}")]
    NotUnitary { violation: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("post-measurement state is not block diagonal: off-block mass {mass:e}")]
    NotBlockDiagonal { mass: f64 },

    #[error("parameter vector for d = {dim} must have length {expected}, got {actual}")]
    BadLength {
        dim: usize,
        expected: usize,
        actual: usize,
    },

    #[error("rank {rank} is outside 1..={dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("eigendecomposition of a {dim}x{dim} matrix did not converge")]
    EigenConvergence { dim: usize },

    #[error(
        "optimizer did not converge after {} sweeps (best value {:.12}, last improvement {:e})",
        .0.meta.sweeps, .0.value, .0.meta.final_improvement
    )]
    OptimizerConvergence(Box<Minimum>),

    #[error("invalid optimizer configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
