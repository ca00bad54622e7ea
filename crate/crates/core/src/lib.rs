//! Coherence and quantum-correlation measures for finite-dimensional states.
//!
//! * [`qstate`]: density operators, partial traces, basis changes, dephasing.
//! * [`entropy`]: von Neumann and relative entropies in bits.
//! * [`coherence`]: relative-entropy and l1 coherence in a chosen basis.
//! * [`correlations`]: discord, one-way deficit and the fixed-measurement
//!   identities that tie them to coherence.
//! * [`measopt`]: measurement-basis parametrization and the minimizer.
//! * [`sampler`]: seeded random states and unitaries.
//! * [`report`]: state files, canonical states and verification sweeps.

pub mod coherence;
pub mod correlations;
pub mod entropy;
pub mod error;
pub mod measopt;
pub mod qstate;
pub mod report;
pub mod sampler;

pub use error::{Error, Result};
pub use measopt::{MeasurementBasis, OptimizerConfig, ParamVector};
pub use qstate::{BipartiteState, CMatrix, DensityOperator, PureState, Subsystem};
