//! Benchmark plants, signals, the closed-loop runner and run summaries.

pub mod metrics;
pub mod plants;
mod runner;
mod scenario;
pub mod signals;
mod trace;

pub use metrics::{metrics, EdComparison, Metrics, SteadyWindow};
pub use plants::{Example1, LinearArx, SquareCubic};
pub use runner::{run_batch, run_closed_loop, run_with_plant, DIVERGENCE_GUARD};
pub use scenario::{MetricsSpec, PlantSpec, Scenario};
pub use signals::{composite_reference, sinusoid_disturbance, DisturbanceSequence, DisturbanceSpec, ReferenceSpec};
pub use trace::{Trace, TraceRow};
