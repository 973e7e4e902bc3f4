//! Boosting as coordinate ascent on the smooth margin.
//!
//! The crate provides the margin quantities of a combined classifier
//! ([`margin`]), weak learners over explicit and implicit matrices
//! ([`learners`]), the boosting loop with its four step rules ([`boost`]),
//! an exact linear-programming oracle for the maximum margin ([`lp`]),
//! cycle and decay diagnostics ([`dynamics`]) and experiment harnesses
//! ([`harness`]).

// `!(x > y)` is deliberate throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boost;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod learners;
pub mod lp;
pub mod margin;
pub mod matrix;
pub mod trace;

pub use boost::{run, RunConfig, RunOutput, StepRule};
pub use error::{Error, Result};
pub use learners::{Column, EdgeScript, WeakLearner, WeakSelection};
pub use margin::{ModelState, WeightDist};
pub use matrix::GameMatrix;
pub use trace::{ColumnTag, IterationRecord};
