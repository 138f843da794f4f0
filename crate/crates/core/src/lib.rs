//! Variance-reduced stochastic optimization for L2-regularized linear
//! classification with the smoothed hinge loss, and a harness for studying how
//! large a training set to use under a fixed iteration budget.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod experiments;
pub mod io;
pub mod loss;
pub mod objective;
pub mod sampling;
pub mod solvers;

pub use data::{Dataset, Label, LabeledExample, SparseVector};
pub use error::{Error, Result};
pub use loss::SmoothedHinge;
pub use objective::{zero_one_error, PrimalParts, Problem};
pub use sampling::{Sampler, SamplerKind};
pub use solvers::{run_solver, Algorithm, RecordOptions, SolverConfig, SolverRun};
