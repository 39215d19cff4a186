use std::sync::Arc;

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geo::{GpsNoiseModel, GpsReceiver, PlanarCoord};
use crate::mobility::Trajectory;
use crate::predictor::{advance_to_exit, candidate_aps, PredictorConfig, PredictorState};
use crate::topology::{AccessPoint, ApMap, HexCell};
use crate::Real;

use super::{HandoffEvent, LatencyModel, Metrics, SimError};

/// Everything needed to simulate one node on one trajectory.
#[derive(Debug, Clone)]
pub struct Scenario<T> {
    pub trajectory: Trajectory<T>,
    pub map: Arc<ApMap<T>>,
    pub predictor: PredictorConfig<T>,
    pub latency: LatencyModel<T>,
    pub noise: GpsNoiseModel<T>,
    pub seed: u64,
    /// Keep one [`TraceRow`] per sample.
    pub record_trace: bool,
}

/// Per-sample predictor state, the data behind error/speed/d plots.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<T> {
    pub t_ms: u64,
    pub true_pos: PlanarCoord<T>,
    pub measured: PlanarCoord<T>,
    pub s_avg: Option<T>,
    pub d: Option<T>,
    pub rates: Option<PlanarCoord<T>>,
    pub pe_x: T,
    pub ne_x: T,
    pub pe_y: T,
    pub ne_y: T,
    /// One-step prediction error, once initialization is over.
    pub error: Option<PlanarCoord<T>>,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun<T> {
    pub events: Vec<HandoffEvent<T>>,
    pub metrics: Metrics<T>,
    pub trace: Vec<TraceRow<T>>,
}

/// Bisection steps when locating the true boundary crossing.
const CROSSING_BISECTIONS: usize = 48;
/// Coarse look-ahead step for the true crossing, ms.
const LOOKAHEAD_STEP_MS: f64 = 1.0;

/// First AP other than `current` entered by the true trajectory after `t0`.
fn next_true_cell<'m, T: Real>(
    traj: &Trajectory<T>,
    map: &'m ApMap<T>,
    cell: &HexCell<T>,
    current: &str,
    t0: T,
) -> Result<Option<&'m AccessPoint<T>>, SimError> {
    let end = traj.duration_ms();
    let step = T::lit(LOOKAHEAD_STEP_MS);
    let mut inside_t = t0;
    let mut t = t0;
    let outside_t = loop {
        if t >= end {
            return Ok(None);
        }
        t = (t + step).min(end);
        if !cell.contains(traj.position_at(t)?) {
            break t;
        }
        inside_t = t;
    };
    let (mut lo, mut hi) = (inside_t, outside_t);
    for _ in 0..CROSSING_BISECTIONS {
        let mid = (lo + hi) / T::lit(2.0);
        if cell.contains(traj.position_at(mid)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(entered_cell(map, traj.position_at(hi)?, current))
}

/// Smallest-bssid AP other than `current` covering `p`.
fn entered_cell<'m, T: Real>(
    map: &'m ApMap<T>,
    p: PlanarCoord<T>,
    current: &str,
) -> Option<&'m AccessPoint<T>> {
    map.covering(p)
        .filter(|ap| ap.bssid != current)
        .min_by(|a, b| a.bssid.cmp(&b.bssid))
}

struct Serving<'m, T> {
    ap: &'m AccessPoint<T>,
    cell: HexCell<T>,
}

impl<'m, T: Real> Serving<'m, T> {
    fn new(map: &'m ApMap<T>, ap: &'m AccessPoint<T>) -> Self {
        Self {
            ap,
            cell: map.cell(ap),
        }
    }
}

/// Runs one scenario at the predictor's sample cadence.
///
/// Each step draws a GPS fix of the true position and feeds the predictor.
/// After initialization the trigger arms once the measured position is more
/// than `d` from the serving cell's edge and fires when it comes back within
/// `d`. A firing emits a [`HandoffEvent`]; when the true position then enters
/// the next cell the predictor restarts there. A crossing without a firing
/// still hands off from the current predicted range and is flagged `late`;
/// if the predictor had not finished initializing in that cell the event is
/// a missed handoff that scans every channel.
pub fn run_scenario<T: Real>(sc: &Scenario<T>) -> Result<ScenarioRun<T>, SimError> {
    let cfg = &sc.predictor;
    cfg.validate()?;
    sc.latency.validate()?;
    let noise = GpsNoiseModel {
        sample_period_ms: cfg.period(),
        ..sc.noise
    };
    noise.validate()?;

    let map = sc.map.as_ref();
    let traj = &sc.trajectory;
    let period = u64::from(cfg.sample_period_ms);
    let duration = traj.duration_ms();
    let latency_full = sc.latency.full_scan_latency();

    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed);
    let mut receiver = GpsReceiver::new(noise);

    let start = traj.position_at(T::zero())?;
    let first_ap = map.cell_of(start).ok_or(SimError::StartOutsideMap)?;
    let mut serving = Serving::new(map, first_ap);
    let mut in_first_cell = true;

    let fix = receiver.fix(start, &mut rng);
    let mut state = PredictorState::new(0, fix);
    let mut armed = false;
    let mut handoff_pending = false;

    let mut events = Vec::new();
    let mut trace = Vec::new();
    let mut record = |t_ms: u64, true_pos, state: &PredictorState<T>, error| {
        if sc.record_trace {
            let s_avg = state.average_speed(cfg).ok();
            trace.push(TraceRow {
                t_ms,
                true_pos,
                measured: state.last_pos,
                s_avg,
                d: s_avg.map(|s| cfg.t_delay_ms * s),
                rates: state.coordinate_rates(cfg).ok(),
                pe_x: state.pe_x,
                ne_x: state.ne_x,
                pe_y: state.pe_y,
                ne_y: state.ne_y,
                error,
            });
        }
    };
    record(0, start, &state, None);

    let mut t_ms = period;
    while T::lit(t_ms as f64) <= duration {
        let truth = traj.position_at(T::lit(t_ms as f64))?;
        let fix = receiver.fix(truth, &mut rng);

        if !serving.cell.contains(truth) {
            let Some(next) = entered_cell(map, truth, &serving.ap.bssid) else {
                // left the covered area
                break;
            };
            if !handoff_pending {
                if state.is_initialized(cfg) {
                    // the link is lost before the trigger fired
                    events.push(handoff_event(
                        sc,
                        &serving,
                        &state,
                        t_ms,
                        t_ms - period,
                        true,
                    )?);
                } else if in_first_cell {
                    return Err(SimError::InitIncomplete { t_ms });
                } else {
                    events.push(HandoffEvent {
                        t_ms,
                        mn_pos: fix,
                        predicted: None,
                        candidates: Vec::new(),
                        actual_next: Some(next.bssid.clone()),
                        correct: false,
                        fallback: false,
                        advanced: false,
                        late: true,
                        n_scanned: sc.latency.n_channels,
                        latency_selective: latency_full,
                        latency_full,
                    });
                }
            }
            serving = Serving::new(map, next);
            in_first_cell = false;
            state = PredictorState::new(t_ms, fix);
            armed = false;
            handoff_pending = false;
            record(t_ms, truth, &state, None);
            t_ms += period;
            continue;
        }

        let error = state.ingest_at(t_ms, fix, cfg)?;

        if state.is_initialized(cfg) && !handoff_pending {
            let d = state.trigger_distance(cfg)?;
            let gap = serving
                .cell
                .distance_to_boundary(state.last_pos)
                .unwrap_or(T::zero());
            if gap > d {
                armed = true;
            } else if armed {
                events.push(handoff_event(sc, &serving, &state, t_ms, t_ms, false)?);
                handoff_pending = true;
            }
        }

        record(t_ms, truth, &state, error);
        t_ms += period;
    }

    let metrics = Metrics::from_events(&events);
    Ok(ScenarioRun {
        events,
        metrics,
        trace,
    })
}

fn handoff_event<T: Real>(
    sc: &Scenario<T>,
    serving: &Serving<'_, T>,
    state: &PredictorState<T>,
    t_ms: u64,
    search_from_ms: u64,
    late: bool,
) -> Result<HandoffEvent<T>, SimError> {
    let cfg = &sc.predictor;
    let map = sc.map.as_ref();
    let current = serving.ap.bssid.as_str();
    let range = state.predicted_range(cfg)?;

    let mut candidates = candidate_aps(&range, map, Some(current));
    let mut advanced = false;
    if candidates.is_empty() {
        let heading = state.coordinate_rates(cfg)?;
        if let Some(shifted) = advance_to_exit(&range, heading, &serving.cell) {
            candidates = candidate_aps(&shifted, map, Some(current));
            advanced = true;
        }
    }
    if candidates.len() > 2 {
        warn!(
            "t={t_ms} ms: {} candidate APs for range {:?} (seed {})",
            candidates.len(),
            range,
            sc.seed
        );
    }
    let candidates: Vec<String> = candidates.into_iter().map(|ap| ap.bssid.clone()).collect();

    let actual_next = next_true_cell(
        &sc.trajectory,
        map,
        &serving.cell,
        current,
        T::lit(search_from_ms as f64),
    )?
    .map(|ap| ap.bssid.clone());

    let fallback = candidates.is_empty();
    let n_scanned = if fallback {
        sc.latency.n_channels
    } else {
        (candidates.len() as u32).min(sc.latency.n_channels)
    };
    let correct = fallback || actual_next.as_ref().is_some_and(|a| candidates.contains(a));
    Ok(HandoffEvent {
        t_ms,
        mn_pos: state.last_pos,
        predicted: Some(range),
        candidates,
        actual_next,
        correct,
        fallback,
        advanced,
        late,
        n_scanned,
        latency_selective: sc.latency.handoff_latency(n_scanned)?,
        latency_full: sc.latency.full_scan_latency(),
    })
}
