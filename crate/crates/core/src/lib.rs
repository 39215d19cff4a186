//! Handoff prediction for 802.11 networks from GPS coordinate evaluation.
//!
//! A mobile node samples its GPS position on a fixed cadence, tracks its
//! running speed and per-axis coordinate rates, and when it gets within
//! `t_delay * s_avg` of its hexagonal cell boundary it projects a
//! coordinate range `t_delay` ms ahead. Only the APs covering that range
//! are scanned, instead of every regulatory channel.
//!
//! All geometry is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`, which is what the simulator and the
//! file formats use.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geo;
pub mod mobility;
pub mod predictor;
pub mod real;
pub mod simulator;
pub mod topology;

pub use real::Real;

pub type GeoCoord = geo::GeoCoord<f64>;
pub type PlanarCoord = geo::PlanarCoord<f64>;
pub type GpsNoiseModel = geo::GpsNoiseModel<f64>;
pub type AccessPoint = topology::AccessPoint<f64>;
pub type HexCell = topology::HexCell<f64>;
pub type ApMap = topology::ApMap<f64>;
pub type MonitorSample = topology::MonitorSample<f64>;
pub type PredictorConfig = predictor::PredictorConfig<f64>;
pub type PredictorState = predictor::PredictorState<f64>;
pub type PredictedRange = predictor::PredictedRange<f64>;
pub type Trajectory = mobility::Trajectory<f64>;
pub type LatencyModel = simulator::LatencyModel<f64>;
pub type HandoffEvent = simulator::HandoffEvent<f64>;
pub type Metrics = simulator::Metrics<f64>;
pub type Scenario = simulator::Scenario<f64>;

pub type PlanarCoordF32 = geo::PlanarCoord<f32>;
pub type HexCellF32 = topology::HexCell<f32>;
pub type PredictorStateF32 = predictor::PredictorState<f32>;
