use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use hexhand_core::geo::PlanarCoord;
use hexhand_core::mobility::{TrajectoryKind, Waypoint};
use hexhand_core::simulator::output::{render_summary, write_events_csv, write_trace_csv};
use hexhand_core::simulator::{
    corner_headings, even_headings, run_scenario, run_sweep, scenario_seed, Parallelism,
};
use hexhand_core::topology::{parse_map, render_map};
use hexhand_core::{ApMap, GpsNoiseModel, Scenario, Trajectory};
use log::{info, warn};
use tempfile::NamedTempFile;
use thiserror::Error;

use crate::config::{ConfigError, MapSource, NoiseKind, ScenarioConfig, TrajectoryShape};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("scenario error: {0}")]
    Runtime(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Runtime(_) => 3,
            Self::Io { .. } => 4,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e.to_string())
    }
}

impl From<crate::config::LoadError> for CliError {
    fn from(e: crate::config::LoadError) -> Self {
        match e {
            crate::config::LoadError::Io { path, source } => Self::Io { path, source },
            crate::config::LoadError::Config(c) => c.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Sweep,
}

/// What a finished run wrote.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(
    path: &Path,
    contents: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    {
        let mut w = io::BufWriter::new(tmp.as_file_mut());
        contents(&mut w).map_err(|e| CliError::io(path, e))?;
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

fn load_map(c: &ScenarioConfig, edge: f64) -> Result<ApMap, CliError> {
    let map = match &c.map {
        MapSource::Rings(k) => ApMap::hex_rings(*k, edge, c.orientation)
            .map_err(|e| CliError::Config(e.to_string()))?,
        MapSource::File(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            parse_map(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
    };
    match c.neighbor_threshold_m {
        Some(t) => map
            .with_neighbor_threshold(t)
            .map_err(|e| CliError::Config(e.to_string())),
        None => Ok(map),
    }
}

fn noise_model(c: &ScenarioConfig) -> GpsNoiseModel {
    let period = f64::from(c.predictor.sample_period_ms);
    match c.noise {
        NoiseKind::Correlated => GpsNoiseModel {
            sigma: c.sigma_m,
            sample_period_ms: period,
            correlation_ms: Some(c.correlation_ms),
        },
        NoiseKind::Independent => GpsNoiseModel::independent(c.sigma_m, period),
    }
}

/// Straight run from `start` to `overshoot_m` past the edge of its cell.
fn auto_duration(
    c: &ScenarioConfig,
    map: &ApMap,
    heading: f64,
    speed: f64,
) -> Result<f64, CliError> {
    let start = PlanarCoord::new(c.start_x_m, c.start_y_m);
    let ap = map
        .cell_of(start)
        .ok_or_else(|| CliError::Runtime("start position is outside every cell".into()))?;
    if speed <= 0.0 {
        return Err(CliError::Runtime(
            "automatic duration needs speed_mps > 0".into(),
        ));
    }
    let exit = map
        .cell(ap)
        .exit_distance(start, PlanarCoord::from_polar(1.0, heading))
        .ok_or_else(|| CliError::Runtime("no exit along heading".into()))?;
    Ok((exit + c.overshoot_m) / (speed / 1000.0) + 2.0 * f64::from(c.predictor.sample_period_ms))
}

fn trajectory(
    c: &ScenarioConfig,
    map: &ApMap,
    heading_deg: f64,
    speed: f64,
    seed: u64,
) -> Result<Trajectory, CliError> {
    let start = PlanarCoord::new(c.start_x_m, c.start_y_m);
    let heading = heading_deg.to_radians();
    let kind = match c.trajectory {
        TrajectoryShape::Straight => TrajectoryKind::Straight {
            start,
            heading,
            speed_mps: speed,
        },
        TrajectoryShape::Arc => TrajectoryKind::Arc {
            start,
            heading,
            speed_mps: speed,
            radius: c.radius_m,
        },
        TrajectoryShape::Piecewise => TrajectoryKind::Piecewise {
            start,
            waypoints: c
                .waypoints
                .iter()
                .map(|&(x, y, s)| Waypoint {
                    position: PlanarCoord::new(x, y),
                    speed_mps: s,
                })
                .collect(),
        },
        TrajectoryShape::RandomWaypoint => {
            let [x0, y0, x1, y1] = c.area_m;
            TrajectoryKind::RandomWaypoint {
                start,
                area_min: PlanarCoord::new(x0, y0),
                area_max: PlanarCoord::new(x1, y1),
                v_min_mps: c.v_min_mps,
                v_max_mps: c.v_max_mps,
                pause_ms: c.pause_ms,
                seed: scenario_seed(seed, u64::MAX),
            }
        }
    };
    let duration = match c.duration_ms {
        Some(d) => d,
        None => auto_duration(c, map, heading, speed)?,
    };
    Trajectory::new(kind, duration).map_err(|e| CliError::Config(e.to_string()))
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Runs `config` and writes its outputs into `config.out_dir`.
pub fn run(config: &ScenarioConfig, mode: Mode) -> Result<RunReport, CliError> {
    match mode {
        Mode::Single => run_single(config),
        Mode::Sweep => run_sweep_mode(config),
    }
}

fn run_single(c: &ScenarioConfig) -> Result<RunReport, CliError> {
    let map = Arc::new(load_map(c, c.edge_m)?);
    let sc = Scenario {
        trajectory: trajectory(c, &map, c.heading_deg, c.speed_mps, c.seed)?,
        map,
        predictor: c.predictor,
        latency: c.latency,
        noise: noise_model(c),
        seed: c.seed,
        record_trace: true,
    };
    let run = run_scenario(&sc).map_err(|e| CliError::Runtime(e.to_string()))?;
    info!("{} handoff events", run.events.len());

    let dir = &c.out_dir;
    prepare_out(dir)?;
    let summary = format!(
        "mode=single\nseed={}\n{}",
        c.seed,
        render_summary(&run.metrics)
    );
    let files = [
        dir.join("trace.csv"),
        dir.join("events.csv"),
        dir.join("summary.txt"),
    ];
    write_atomic(&files[0], |w| write_trace_csv(&run.trace, w))?;
    write_atomic(&files[1], |w| write_events_csv(&run.events, w))?;
    write_atomic(&files[2], |w| w.write_all(summary.as_bytes()))?;
    Ok(RunReport {
        out_dir: dir.clone(),
        files: files.to_vec(),
        summary,
    })
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub edge_m: f64,
    pub heading_deg: f64,
    pub speed_mps: f64,
    pub seed: u64,
}

/// Headings of a sweep in degrees: explicit values, then the evenly spaced
/// set, then the corner directions. Falls back to `heading_deg`.
pub fn sweep_headings(c: &ScenarioConfig) -> Vec<f64> {
    let s = &c.sweep;
    let mut out = s.headings_deg.clone();
    out.extend(
        even_headings(s.heading_count, s.heading_offset_deg.to_radians())
            .into_iter()
            .map(f64::to_degrees),
    );
    if s.corner_headings {
        out.extend(
            corner_headings::<f64>(c.orientation)
                .into_iter()
                .map(f64::to_degrees),
        );
    }
    if out.is_empty() {
        out.push(c.heading_deg);
    }
    out
}

/// Grid points in edge, heading, speed, seed order.
pub fn expand_sweep(c: &ScenarioConfig) -> Vec<SweepPoint> {
    let edges = if c.sweep.edges_m.is_empty() {
        vec![c.edge_m]
    } else {
        c.sweep.edges_m.clone()
    };
    let speeds = if c.sweep.speeds_mps.is_empty() {
        vec![c.speed_mps]
    } else {
        c.sweep.speeds_mps.clone()
    };
    let headings = sweep_headings(c);
    let mut out = Vec::new();
    for &edge_m in &edges {
        for &heading_deg in &headings {
            for &speed_mps in &speeds {
                for _ in 0..c.sweep.seeds {
                    let seed = scenario_seed(c.seed, out.len() as u64);
                    out.push(SweepPoint {
                        edge_m,
                        heading_deg,
                        speed_mps,
                        seed,
                    });
                }
            }
        }
    }
    out
}

/// Index, grid point, and `(events, correct)` or the failure message.
type SweepRow<'a> = (usize, &'a SweepPoint, Result<(usize, usize), String>);

const SCENARIOS_HEADER: &str = "index,edge_m,heading_deg,speed_mps,seed,n_events,n_correct,error";

fn run_sweep_mode(c: &ScenarioConfig) -> Result<RunReport, CliError> {
    let points = expand_sweep(c);
    let mut maps: Vec<(f64, Arc<ApMap>)> = Vec::new();
    let mut scenarios = Vec::with_capacity(points.len());
    for p in &points {
        let map = match maps.iter().find(|(e, _)| *e == p.edge_m) {
            Some((_, m)) => Arc::clone(m),
            None => {
                let m = Arc::new(load_map(c, p.edge_m)?);
                maps.push((p.edge_m, Arc::clone(&m)));
                m
            }
        };
        // a bad instance is reported in scenarios.csv, not fatal
        let trajectory = match trajectory(c, &map, p.heading_deg, p.speed_mps, p.seed) {
            Ok(t) => t,
            Err(CliError::Runtime(msg)) => {
                scenarios.push(Err(msg));
                continue;
            }
            Err(e) => return Err(e),
        };
        scenarios.push(Ok(Scenario {
            trajectory,
            map,
            predictor: c.predictor,
            latency: c.latency,
            noise: noise_model(c),
            seed: p.seed,
            record_trace: false,
        }));
    }

    let runnable: Vec<Scenario> = scenarios
        .iter()
        .filter_map(|s| s.as_ref().ok().cloned())
        .collect();
    let outcome = run_sweep(&runnable, Parallelism::Auto);
    let mut results = outcome.runs.iter();
    let rows: Vec<SweepRow> = points
        .iter()
        .zip(&scenarios)
        .enumerate()
        .map(|(i, (p, s))| {
            let r = match s {
                Err(msg) => Err(msg.clone()),
                Ok(_) => match results.next().expect("one result per runnable scenario") {
                    Ok(run) => Ok((
                        run.events.len(),
                        run.events.iter().filter(|e| e.correct).count(),
                    )),
                    Err(e) => Err(e.to_string()),
                },
            };
            (i, p, r)
        })
        .collect();

    let n_failed = rows.iter().filter(|r| r.2.is_err()).count();
    for (i, p, r) in &rows {
        if let Err(msg) = r {
            warn!(
                "scenario {i} (edge {} m, heading {} deg, speed {} m/s): {msg}",
                p.edge_m, p.heading_deg, p.speed_mps
            );
        }
    }

    let dir = &c.out_dir;
    prepare_out(dir)?;
    let summary = format!(
        "mode=sweep\nseed={}\nn_scenarios={}\nn_failed={n_failed}\n{}",
        c.seed,
        points.len(),
        render_summary(&outcome.metrics)
    );
    let files = [
        dir.join("events.csv"),
        dir.join("scenarios.csv"),
        dir.join("summary.txt"),
    ];
    write_atomic(&files[0], |w| write_events_csv(outcome.events(), w))?;
    write_atomic(&files[1], |w| {
        writeln!(w, "{SCENARIOS_HEADER}")?;
        for (i, p, r) in &rows {
            let (n, k, err) = match r {
                Ok((n, k)) => (n.to_string(), k.to_string(), String::new()),
                Err(msg) => (String::new(), String::new(), msg.replace([',', '\n'], ";")),
            };
            writeln!(
                w,
                "{i},{},{},{},{},{n},{k},{err}",
                p.edge_m, p.heading_deg, p.speed_mps, p.seed
            )?;
        }
        Ok(())
    })?;
    write_atomic(&files[2], |w| w.write_all(summary.as_bytes()))?;

    if n_failed == points.len() {
        return Err(CliError::Runtime(format!(
            "all {} scenarios failed",
            points.len()
        )));
    }
    Ok(RunReport {
        out_dir: dir.clone(),
        files: files.to_vec(),
        summary,
    })
}

/// Writes a generated ring map in the topology text format.
pub fn genmap(
    rings: usize,
    edge: f64,
    orientation: hexhand_core::topology::Orientation,
    out: &Path,
) -> Result<(), CliError> {
    if rings > crate::config::MAX_RINGS {
        return Err(CliError::Config(format!(
            "rings: at most {}",
            crate::config::MAX_RINGS
        )));
    }
    let map =
        ApMap::hex_rings(rings, edge, orientation).map_err(|e| CliError::Config(e.to_string()))?;
    let text = render_map(&map);
    write_atomic(out, |w| w.write_all(text.as_bytes()))
}
