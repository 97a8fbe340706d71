//! Implementation-aware evolutionary algorithms on pseudo-Boolean benchmarks.
//!
//! The crate bundles four things that are usually scattered across scripts:
//!
//! - the variation operators and the search heuristics themselves ([`variation`],
//!   [`algorithms`]), including the variants that avoid evaluating offspring which
//!   are bit-identical to a parent;
//! - an evaluation ledger that charges fitness evaluations under a chosen
//!   [`CostModel`] and records per-level first-hitting times ([`engine`]);
//! - batch execution with the percentile summaries used in benchmark tables
//!   ([`experiments`]);
//! - exact evaluation of the closed-form runtime bounds, drift expressions and
//!   runtime-profile bounds, with numerical minimizers for optimal parameters
//!   ([`theory`]).
//!
//! Numerical code is generic over the scalar type through [`Scalar`]; the
//! aliases at the crate root fix it to `f64`, which is what the CLI uses.

pub mod algorithms;
pub mod bits;
pub mod engine;
pub mod experiments;
pub mod objectives;
pub mod rng;
pub mod scalar;
pub mod theory;
pub mod variation;

pub use algorithms::{AlgorithmConfig, ConfigError, Rate};
pub use bits::BitString;
pub use engine::{CostModel, RunOutcome, RuntimeProfile};
pub use experiments::{BatchConfig, SummaryStats};
pub use objectives::{Objective, ObjectiveSpec};
pub use rng::RandomSource;
pub use scalar::Scalar;

/// Objective with `f64` fitness values.
pub type Objective64 = objectives::Objective<f64>;
/// Objective with `f32` fitness values.
pub type Objective32 = objectives::Objective<f32>;
/// Outcome of one run with `f64` fitness values.
pub type RunOutcome64 = engine::RunOutcome<f64>;
/// Batch configuration with `f64` fitness values.
pub type BatchConfig64 = experiments::BatchConfig<f64>;
/// Summary statistics over `f64` samples.
pub type SummaryStats64 = experiments::SummaryStats<f64>;
/// Drift-maximizing flip table in `f64`.
pub type DriftTable64 = theory::DriftTable<f64>;
/// Closed-form runtime value in `f64`.
pub type FormulaResult64 = theory::FormulaResult<f64>;
