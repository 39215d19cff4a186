//! Discrete-time handoff simulation.

mod latency;
mod metrics;
pub mod output;
mod scenario;
mod sweep;

use thiserror::Error;

use crate::geo::GeoError;
use crate::mobility::MobilityError;
use crate::predictor::PredictorError;
use crate::topology::TopologyError;

pub use latency::LatencyModel;
pub use metrics::{HandoffEvent, Metrics};
pub use scenario::{run_scenario, Scenario, ScenarioRun, TraceRow};
pub use sweep::{
    corner_headings, even_headings, run_sweep, scenario_seed, Parallelism, StraightSweep,
    SweepOutcome,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("trajectory starts outside every cell of the map")]
    StartOutsideMap,
    #[error("node reached the cell boundary at t={t_ms} ms before initialization completed")]
    InitIncomplete { t_ms: u64 },
    #[error("invalid latency model: {0}")]
    InvalidLatency(String),
    #[error("channel count {n} outside 1..={max}")]
    ChannelCount { n: u32, max: u32 },
    #[error(transparent)]
    Predictor(#[from] PredictorError),
    #[error(transparent)]
    Mobility(#[from] MobilityError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}
