//! Projective-measurement search space and the multi-start minimizer.

mod basis;
mod minimize;

pub use basis::{basis_from_params, MeasurementBasis, ParamVector};
pub use minimize::{golden_section, minimize, Minimum, OptimizerConfig, OptimizerMeta};
