use std::sync::Arc;

use rayon::prelude::*;

use crate::geo::{GpsNoiseModel, PlanarCoord};
use crate::mobility::Trajectory;
use crate::predictor::PredictorConfig;
use crate::topology::{ApMap, Orientation};
use crate::Real;

use super::{run_scenario, HandoffEvent, LatencyModel, Metrics, Scenario, ScenarioRun, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    Threads(usize),
    /// Rayon's global pool.
    #[default]
    Auto,
}

#[derive(Debug)]
pub struct SweepOutcome<T> {
    /// One entry per input scenario, in input order.
    pub runs: Vec<Result<ScenarioRun<T>, SimError>>,
    /// Aggregate over the events of every successful run.
    pub metrics: Metrics<T>,
}

impl<T: Real> SweepOutcome<T> {
    pub fn events(&self) -> impl Iterator<Item = &HandoffEvent<T>> {
        self.runs.iter().flatten().flat_map(|r| r.events.iter())
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &SimError)> {
        self.runs
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().err().map(|e| (i, e)))
    }
}

/// Runs every scenario and aggregates the events.
///
/// Results come back in input order whatever the thread count, and each
/// scenario carries its own seed, so the outcome does not depend on
/// `parallelism`.
pub fn run_sweep<T: Real>(scenarios: &[Scenario<T>], parallelism: Parallelism) -> SweepOutcome<T> {
    let runs: Vec<_> = match parallelism {
        Parallelism::Sequential => scenarios.iter().map(run_scenario).collect(),
        Parallelism::Auto => scenarios.par_iter().map(run_scenario).collect(),
        Parallelism::Threads(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            Ok(pool) => pool.install(|| scenarios.par_iter().map(run_scenario).collect()),
            Err(_) => scenarios.iter().map(run_scenario).collect(),
        },
    };
    let metrics = Metrics::from_events(runs.iter().flatten().flat_map(|r| r.events.iter()));
    SweepOutcome { runs, metrics }
}

/// Seed of scenario `index` in a sweep started from `master`.
pub fn scenario_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Grid of straight-line runs leaving the central cell of a ring map.
#[derive(Debug, Clone)]
pub struct StraightSweep<T> {
    pub rings: usize,
    pub orientation: Orientation,
    pub edges: Vec<T>,
    /// Radians from east.
    pub headings: Vec<T>,
    pub speeds_mps: Vec<T>,
    pub seeds_per_point: u32,
    pub master_seed: u64,
    pub predictor: PredictorConfig<T>,
    pub latency: LatencyModel<T>,
    pub noise: GpsNoiseModel<T>,
    /// Distance travelled past the first boundary before the run ends, m.
    pub overshoot_m: T,
}

impl<T: Real> StraightSweep<T> {
    /// Every combination, edge-major then heading, speed and seed.
    pub fn scenarios(&self) -> Result<Vec<Scenario<T>>, SimError> {
        let mut out = Vec::new();
        let mut index = 0u64;
        for &edge in &self.edges {
            let map = Arc::new(ApMap::hex_rings(self.rings, edge, self.orientation)?);
            let cell = map.cell(&map.aps()[0]);
            for &heading in &self.headings {
                let dir = PlanarCoord::from_polar(T::one(), heading);
                let exit = cell.exit_distance(cell.center, dir).unwrap_or(edge);
                for &speed in &self.speeds_mps {
                    let v_ms = speed / T::lit(1000.0);
                    let duration =
                        (exit + self.overshoot_m) / v_ms + self.predictor.period() * T::lit(2.0);
                    let trajectory = Trajectory::straight(cell.center, heading, speed, duration)?;
                    for _ in 0..self.seeds_per_point {
                        out.push(Scenario {
                            trajectory: trajectory.clone(),
                            map: Arc::clone(&map),
                            predictor: self.predictor,
                            latency: self.latency,
                            noise: self.noise,
                            seed: scenario_seed(self.master_seed, index),
                            record_trace: false,
                        });
                        index += 1;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `count` headings spaced evenly round the circle, starting at `offset`.
pub fn even_headings<T: Real>(count: usize, offset: T) -> Vec<T> {
    (0..count)
        .map(|k| offset + T::TAU() * T::lit(k as f64) / T::lit(count as f64))
        .collect()
}

/// Directions from a cell center to its six corners.
pub fn corner_headings<T: Real>(orientation: Orientation) -> Vec<T> {
    let base = orientation.normal_offset::<T>() + T::FRAC_PI_6();
    (0..6)
        .map(|k| base + T::FRAC_PI_3() * T::lit(k as f64))
        .collect()
}
