//! Configurable MOEA/D: problems, decomposition, variation, the generational
//! engine, performance metrics, search trajectory networks and parameter tuning.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the common `f64` instantiation.

pub mod config;
pub mod decomposition;
pub mod engine;
pub mod error;
pub mod kv;
pub mod metrics;
pub mod operators;
pub mod problems;
pub mod runlog;
pub mod scalar;
pub mod scalarization;
pub mod solution;
pub mod stn;
pub mod tuner;

pub use config::{AlgoConfig, Assignment, Decomp, ResourceAllocation, Restart, Update};
pub use engine::{run, Moead, RunOptions, RunOutput, RunStats};
pub use error::{Error, Result};
pub use metrics::{AnytimeCurve, HvEstimate};
pub use problems::{by_name, BinhKorn, Problem, ProblemSpec, Tanaka, Zdt1};
pub use runlog::{RunLog, RunLogRecord};
pub use scalar::Scalar;
pub use scalarization::Aggregation;
pub use solution::{Front, ParetoSet, Solution};
pub use stn::{StnGraph, StnMetrics};
pub use tuner::{Instance, ParamSpace, RaceResult};

pub type Solution64 = Solution<f64>;
pub type Solution32 = Solution<f32>;
pub type ParetoSet64 = ParetoSet<f64>;
pub type RunLog64 = RunLog<f64>;
pub type RunOutput64 = RunOutput<f64>;
pub type WeightSet64 = decomposition::WeightSet<f64>;
pub type AnytimeCurve64 = AnytimeCurve<f64>;
