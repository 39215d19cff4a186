//! Flat `key=value` scenario configuration.
//!
//! Several pairs may share a line, `#` starts a comment, and the
//! `sweep.*` grid keys (plus `waypoint`) may be repeated to append values.
//! Values cannot contain whitespace.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hexhand_core::predictor::SpeedWindow;
use hexhand_core::topology::Orientation;
use hexhand_core::{LatencyModel, PredictorConfig};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{}{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default(), key.as_ref().map(|k| format!("{k}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn key(key: &str, message: impl Into<String>) -> Self {
        Self {
            line: None,
            key: Some(key.to_string()),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSource {
    /// Ring-k hexagonal grid generated from `edge_m`.
    Rings(usize),
    /// Map file in the topology text format.
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryShape {
    Straight,
    Arc,
    Piecewise,
    RandomWaypoint,
}

impl TrajectoryShape {
    fn name(self) -> &'static str {
        match self {
            Self::Straight => "straight",
            Self::Arc => "arc",
            Self::Piecewise => "piecewise",
            Self::RandomWaypoint => "random_waypoint",
        }
    }
}

impl FromStr for TrajectoryShape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        [
            Self::Straight,
            Self::Arc,
            Self::Piecewise,
            Self::RandomWaypoint,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| {
            format!("unknown trajectory {s:?} (straight, arc, piecewise, random_waypoint)")
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// First-order Gauss-Markov error with `correlation_ms` time constant.
    Correlated,
    Independent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub edges_m: Vec<f64>,
    pub headings_deg: Vec<f64>,
    /// Evenly spaced headings added to the explicit list.
    pub heading_count: usize,
    pub heading_offset_deg: f64,
    /// Add the six center-to-corner headings of the start cell.
    pub corner_headings: bool,
    pub speeds_mps: Vec<f64>,
    pub seeds: u32,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            edges_m: Vec::new(),
            headings_deg: Vec::new(),
            heading_count: 0,
            heading_offset_deg: 0.0,
            corner_headings: false,
            speeds_mps: Vec::new(),
            seeds: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub map: MapSource,
    pub edge_m: f64,
    pub orientation: Orientation,
    pub neighbor_threshold_m: Option<f64>,

    pub trajectory: TrajectoryShape,
    pub start_x_m: f64,
    pub start_y_m: f64,
    pub heading_deg: f64,
    pub speed_mps: f64,
    /// `None` runs a straight line until `overshoot_m` past the first edge.
    pub duration_ms: Option<f64>,
    pub overshoot_m: f64,
    pub radius_m: f64,
    /// `(x, y, speed)` per waypoint.
    pub waypoints: Vec<(f64, f64, f64)>,
    /// `[x_min, y_min, x_max, y_max]`.
    pub area_m: [f64; 4],
    pub v_min_mps: f64,
    pub v_max_mps: f64,
    pub pause_ms: f64,

    pub predictor: PredictorConfig,
    pub latency: LatencyModel,

    pub noise: NoiseKind,
    pub sigma_m: f64,
    pub correlation_ms: f64,

    pub seed: u64,
    pub out_dir: PathBuf,
    pub sweep: SweepGrid,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            map: MapSource::Rings(2),
            edge_m: 231.0,
            orientation: Orientation::Pointy,
            neighbor_threshold_m: None,
            trajectory: TrajectoryShape::Straight,
            start_x_m: 0.0,
            start_y_m: 0.0,
            heading_deg: 21.1855,
            speed_mps: 19.0222,
            duration_ms: None,
            overshoot_m: 5.0,
            radius_m: 500.0,
            waypoints: Vec::new(),
            area_m: [-300.0, -300.0, 300.0, 300.0],
            v_min_mps: 1.0,
            v_max_mps: 20.0,
            pause_ms: 0.0,
            predictor: PredictorConfig::default(),
            latency: LatencyModel::default(),
            noise: NoiseKind::Correlated,
            sigma_m: hexhand_core::geo::GPS_SIGMA_PRECISE_M,
            correlation_ms: hexhand_core::geo::DEFAULT_GPS_CORRELATION_MS,
            seed: 1,
            out_dir: PathBuf::from("hexhand-out"),
            sweep: SweepGrid::default(),
        }
    }
}

fn num<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError::at(line, key, format!("malformed number {v:?}")))
}

fn finite(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = num(line, key, v)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::at(line, key, format!("{v:?} is not finite")))
    }
}

fn boolean(line: usize, key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::at(
            line,
            key,
            format!("expected true or false, got {v:?}"),
        )),
    }
}

fn list(line: usize, key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|x| finite(line, key, x)).collect()
}

fn tuple<const N: usize>(line: usize, key: &str, v: &str) -> Result<[f64; N], ConfigError> {
    let parts: Vec<f64> = v
        .split(':')
        .map(|x| finite(line, key, x))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| {
        ConfigError::at(
            line,
            key,
            format!("expected {N} ':'-separated numbers, got {v:?}"),
        )
    })
}

const REPEATABLE: [&str; 4] = [
    "waypoint",
    "sweep.edge_m",
    "sweep.heading_deg",
    "sweep.speed_mps",
];

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut c = ScenarioConfig::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        for token in body.split_whitespace() {
            let (key, value) = token.split_once('=').ok_or_else(|| ConfigError {
                line: Some(line),
                key: None,
                message: format!("expected key=value, got {token:?}"),
            })?;
            if !REPEATABLE.contains(&key) {
                if seen.iter().any(|k| k == key) {
                    return Err(ConfigError::at(line, key, "set more than once"));
                }
                let other = match key {
                    "map_file" => "rings",
                    "rings" => "map_file",
                    _ => "",
                };
                if seen.iter().any(|k| k == other) {
                    return Err(ConfigError::at(
                        line,
                        key,
                        format!("conflicts with {other}"),
                    ));
                }
                seen.push(key.to_string());
            }
            apply(&mut c, line, key, value)?;
        }
    }
    validate(&c)?;
    Ok(c)
}

fn apply(c: &mut ScenarioConfig, line: usize, key: &str, v: &str) -> Result<(), ConfigError> {
    let p = &mut c.predictor;
    let l = &mut c.latency;
    match key {
        "map_file" => c.map = MapSource::File(PathBuf::from(v)),
        "rings" => c.map = MapSource::Rings(num(line, key, v)?),
        "edge_m" => c.edge_m = finite(line, key, v)?,
        "orientation" => {
            c.orientation = v
                .parse()
                .map_err(|e| ConfigError::at(line, key, format!("{e}")))?
        }
        "neighbor_threshold_m" => c.neighbor_threshold_m = Some(finite(line, key, v)?),
        "trajectory" => c.trajectory = v.parse().map_err(|e| ConfigError::at(line, key, e))?,
        "start_x_m" => c.start_x_m = finite(line, key, v)?,
        "start_y_m" => c.start_y_m = finite(line, key, v)?,
        "heading_deg" => c.heading_deg = finite(line, key, v)?,
        "speed_mps" => c.speed_mps = finite(line, key, v)?,
        "duration_ms" => {
            c.duration_ms = if v == "auto" {
                None
            } else {
                Some(finite(line, key, v)?)
            };
        }
        "overshoot_m" => c.overshoot_m = finite(line, key, v)?,
        "radius_m" => c.radius_m = finite(line, key, v)?,
        "waypoint" => {
            let [x, y, s] = tuple::<3>(line, key, v)?;
            c.waypoints.push((x, y, s));
        }
        "area_m" => c.area_m = tuple::<4>(line, key, v)?,
        "v_min_mps" => c.v_min_mps = finite(line, key, v)?,
        "v_max_mps" => c.v_max_mps = finite(line, key, v)?,
        "pause_ms" => c.pause_ms = finite(line, key, v)?,
        "init_ms" => p.init_duration_ms = num(line, key, v)?,
        "period_ms" => p.sample_period_ms = num(line, key, v)?,
        "t_delay_ms" => p.t_delay_ms = finite(line, key, v)?,
        "speed_window" => {
            p.speed_window = match v {
                "growing" => SpeedWindow::Growing,
                "sliding" => SpeedWindow::Sliding,
                _ => {
                    return Err(ConfigError::at(
                        line,
                        key,
                        format!("expected growing or sliding, got {v:?}"),
                    ))
                }
            }
        }
        "scale_bounds" => p.scale_bounds = boolean(line, key, v)?,
        "n_channels" => l.n_channels = num(line, key, v)?,
        "t_min_ms" => l.t_min = finite(line, key, v)?,
        "t_max_ms" => l.t_max = finite(line, key, v)?,
        "per_channel_ms" => l.per_channel = finite(line, key, v)?,
        "auth_ms" => l.auth = finite(line, key, v)?,
        "reassoc_ms" => l.reassoc = finite(line, key, v)?,
        "noise" => {
            c.noise = match v {
                "correlated" => NoiseKind::Correlated,
                "independent" => NoiseKind::Independent,
                _ => {
                    return Err(ConfigError::at(
                        line,
                        key,
                        format!("expected correlated or independent, got {v:?}"),
                    ))
                }
            }
        }
        "sigma_m" => c.sigma_m = finite(line, key, v)?,
        "correlation_ms" => c.correlation_ms = finite(line, key, v)?,
        "seed" => c.seed = num(line, key, v)?,
        "out_dir" => c.out_dir = PathBuf::from(v),
        "sweep.edge_m" => c.sweep.edges_m.extend(list(line, key, v)?),
        "sweep.heading_deg" => c.sweep.headings_deg.extend(list(line, key, v)?),
        "sweep.speed_mps" => c.sweep.speeds_mps.extend(list(line, key, v)?),
        "sweep.heading_count" => c.sweep.heading_count = num(line, key, v)?,
        "sweep.heading_offset_deg" => c.sweep.heading_offset_deg = finite(line, key, v)?,
        "sweep.corner_headings" => c.sweep.corner_headings = boolean(line, key, v)?,
        "sweep.seeds" => c.sweep.seeds = num(line, key, v)?,
        _ => return Err(ConfigError::at(line, key, "unknown key")),
    }
    Ok(())
}

/// Largest generated ring count accepted.
pub const MAX_RINGS: usize = 64;

pub fn validate(c: &ScenarioConfig) -> Result<(), ConfigError> {
    let positive = |key: &str, v: f64| {
        if v > 0.0 {
            Ok(())
        } else {
            Err(ConfigError::key(key, format!("must be > 0, got {v}")))
        }
    };
    positive("edge_m", c.edge_m)?;
    if let MapSource::Rings(k) = c.map {
        if k > MAX_RINGS {
            return Err(ConfigError::key("rings", format!("at most {MAX_RINGS}")));
        }
    }
    if let Some(t) = c.neighbor_threshold_m {
        positive("neighbor_threshold_m", t)?;
    }
    if c.speed_mps < 0.0 {
        return Err(ConfigError::key("speed_mps", "must be >= 0"));
    }
    if let Some(d) = c.duration_ms {
        positive("duration_ms", d)?;
    } else if c.trajectory != TrajectoryShape::Straight {
        return Err(ConfigError::key(
            "duration_ms",
            "required for non-straight trajectories",
        ));
    }
    if c.overshoot_m < 0.0 {
        return Err(ConfigError::key("overshoot_m", "must be >= 0"));
    }
    match c.trajectory {
        TrajectoryShape::Arc if c.radius_m == 0.0 => {
            return Err(ConfigError::key("radius_m", "must be non-zero"));
        }
        TrajectoryShape::Piecewise if c.waypoints.is_empty() => {
            return Err(ConfigError::key(
                "waypoint",
                "piecewise trajectory needs at least one waypoint",
            ));
        }
        TrajectoryShape::RandomWaypoint => {
            let [x0, y0, x1, y1] = c.area_m;
            if !(x0 < x1 && y0 < y1) {
                return Err(ConfigError::key(
                    "area_m",
                    "expected x_min:y_min:x_max:y_max with min < max",
                ));
            }
            if !(0.0 < c.v_min_mps && c.v_min_mps <= c.v_max_mps) {
                return Err(ConfigError::key(
                    "v_min_mps",
                    "need 0 < v_min_mps <= v_max_mps",
                ));
            }
            if c.pause_ms < 0.0 {
                return Err(ConfigError::key("pause_ms", "must be >= 0"));
            }
        }
        _ => {}
    }
    if c.waypoints.iter().any(|w| w.2 <= 0.0) {
        return Err(ConfigError::key("waypoint", "leg speeds must be > 0"));
    }
    c.predictor
        .validate()
        .map_err(|e| ConfigError::key("predictor", e.to_string()))?;
    c.latency
        .validate()
        .map_err(|e| ConfigError::key("latency", e.to_string()))?;
    if c.sigma_m < 0.0 {
        return Err(ConfigError::key("sigma_m", "must be >= 0"));
    }
    positive("correlation_ms", c.correlation_ms)?;

    let s = &c.sweep;
    for &e in &s.edges_m {
        positive("sweep.edge_m", e)?;
    }
    if s.speeds_mps.iter().any(|&v| v <= 0.0) {
        return Err(ConfigError::key("sweep.speed_mps", "speeds must be > 0"));
    }
    if s.seeds == 0 {
        return Err(ConfigError::key("sweep.seeds", "must be >= 1"));
    }
    if !s.edges_m.is_empty() && matches!(c.map, MapSource::File(_)) {
        return Err(ConfigError::key(
            "sweep.edge_m",
            "cannot vary the edge of a map loaded from file",
        ));
    }
    Ok(())
}

/// Reads and validates a config file. A relative `map_file` is resolved
/// against the config file's directory and must exist.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut c = parse_config(&text)?;
    if let MapSource::File(f) = &c.map {
        let resolved = if f.is_relative() {
            path.parent().unwrap_or(Path::new(".")).join(f)
        } else {
            f.clone()
        };
        if !resolved.is_file() {
            return Err(ConfigError::key(
                "map_file",
                format!("{} does not exist", resolved.display()),
            )
            .into());
        }
        c.map = MapSource::File(resolved);
    }
    Ok(c)
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

struct Out(String);

impl Out {
    fn kv(&mut self, k: &str, v: impl fmt::Display) {
        let _ = writeln!(self.0, "{k}={v}");
    }
}

/// Renders every field, so `parse_config(&render_config(c)) == c`.
pub fn render_config(c: &ScenarioConfig) -> String {
    let mut o = Out(String::new());
    match &c.map {
        MapSource::Rings(k) => o.kv("rings", k),
        MapSource::File(p) => o.kv("map_file", p.display()),
    }
    o.kv("edge_m", c.edge_m);
    o.kv("orientation", c.orientation);
    if let Some(t) = c.neighbor_threshold_m {
        o.kv("neighbor_threshold_m", t);
    }
    o.kv("trajectory", c.trajectory.name());
    o.kv("start_x_m", c.start_x_m);
    o.kv("start_y_m", c.start_y_m);
    o.kv("heading_deg", c.heading_deg);
    o.kv("speed_mps", c.speed_mps);
    match c.duration_ms {
        Some(d) => o.kv("duration_ms", d),
        None => o.kv("duration_ms", "auto"),
    }
    o.kv("overshoot_m", c.overshoot_m);
    o.kv("radius_m", c.radius_m);
    for (x, y, s) in &c.waypoints {
        o.kv("waypoint", format!("{x}:{y}:{s}"));
    }
    let [a, b, d, e] = c.area_m;
    o.kv("area_m", format!("{a}:{b}:{d}:{e}"));
    o.kv("v_min_mps", c.v_min_mps);
    o.kv("v_max_mps", c.v_max_mps);
    o.kv("pause_ms", c.pause_ms);

    let p = &c.predictor;
    o.kv("init_ms", p.init_duration_ms);
    o.kv("period_ms", p.sample_period_ms);
    o.kv("t_delay_ms", p.t_delay_ms);
    o.kv(
        "speed_window",
        match p.speed_window {
            SpeedWindow::Growing => "growing",
            SpeedWindow::Sliding => "sliding",
        },
    );
    o.kv("scale_bounds", p.scale_bounds);

    let l = &c.latency;
    o.kv("n_channels", l.n_channels);
    o.kv("t_min_ms", l.t_min);
    o.kv("t_max_ms", l.t_max);
    o.kv("per_channel_ms", l.per_channel);
    o.kv("auth_ms", l.auth);
    o.kv("reassoc_ms", l.reassoc);

    o.kv(
        "noise",
        match c.noise {
            NoiseKind::Correlated => "correlated",
            NoiseKind::Independent => "independent",
        },
    );
    o.kv("sigma_m", c.sigma_m);
    o.kv("correlation_ms", c.correlation_ms);
    o.kv("seed", c.seed);
    o.kv("out_dir", c.out_dir.display());

    let s = &c.sweep;
    for v in &s.edges_m {
        o.kv("sweep.edge_m", v);
    }
    for v in &s.headings_deg {
        o.kv("sweep.heading_deg", v);
    }
    for v in &s.speeds_mps {
        o.kv("sweep.speed_mps", v);
    }
    o.kv("sweep.heading_count", s.heading_count);
    o.kv("sweep.heading_offset_deg", s.heading_offset_deg);
    o.kv("sweep.corner_headings", s.corner_headings);
    o.kv("sweep.seeds", s.seeds);
    o.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert_eq!(c.edge_m, 231.0);
        assert_eq!(c.predictor.t_delay_ms, 50.0);
        assert_eq!(c.predictor.init_duration_ms, 60);
        assert_eq!(c.predictor.sample_period_ms, 5);
        assert_eq!(c.sigma_m, 0.3);
        assert_eq!(c.latency.n_channels, 11);
        assert_eq!((c.latency.t_min, c.latency.t_max), (5.0, 30.0));
    }

    #[test]
    fn single_override() {
        let c = parse_config("edge_m=300\n").unwrap();
        assert_eq!(c.edge_m, 300.0);
        assert_eq!(
            ScenarioConfig { edge_m: 231.0, ..c },
            ScenarioConfig::default()
        );
    }

    #[test]
    fn inverted_scan_times_rejected() {
        let err = parse_config("t_min_ms=40 t_max_ms=30").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("latency"));
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_config("# comment\nedge_m=200\n  speed=3\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert_eq!(err.key.as_deref(), Some("speed"));
        assert!(err.to_string().starts_with("line 3: speed:"));
    }

    #[test]
    fn malformed_number_reports_key() {
        let err = parse_config("seed=12 edge_m=2x1").unwrap_err();
        assert_eq!((err.line, err.key.as_deref()), (Some(1), Some("edge_m")));
        assert!(parse_config("seed=-1").is_err());
        assert!(parse_config("edge_m=nan").is_err());
        assert!(parse_config("edge_m").is_err());
    }

    #[test]
    fn duplicates_rejected_except_grids() {
        assert!(parse_config("edge_m=1\nedge_m=2").is_err());
        let c =
            parse_config("sweep.speed_mps=5,10\nsweep.speed_mps=30 # fast\nsweep.heading_deg=0")
                .unwrap();
        assert_eq!(c.sweep.speeds_mps, vec![5.0, 10.0, 30.0]);
        assert_eq!(c.sweep.headings_deg, vec![0.0]);
    }

    #[test]
    fn invariants_checked() {
        assert!(parse_config("edge_m=0").is_err());
        assert!(parse_config("trajectory=arc radius_m=0 duration_ms=10").is_err());
        assert!(parse_config("trajectory=piecewise duration_ms=10").is_err());
        assert!(parse_config("trajectory=arc").is_err());
        assert!(parse_config("period_ms=7").is_err());
        assert!(parse_config("sweep.seeds=0").is_err());
        assert!(parse_config("map_file=x.map sweep.edge_m=200").is_err());
        assert!(parse_config("orientation=diagonal").is_err());
        assert!(parse_config("rings=1 map_file=a.map").is_err());
    }

    #[test]
    fn round_trip() {
        let text = "rings=3 edge_m=200.5 orientation=flat neighbor_threshold_m=700\n\
                    trajectory=piecewise waypoint=10:0:5 waypoint=10.25:-3:7.5 duration_ms=1234.5\n\
                    heading_deg=33.3 speed_window=sliding scale_bounds=true noise=independent sigma_m=3\n\
                    seed=18446744073709551615 out_dir=/tmp/x sweep.edge_m=200,300 sweep.heading_count=24\n\
                    sweep.heading_offset_deg=7.5 sweep.corner_headings=yes sweep.seeds=5 sweep.speed_mps=0.1";
        let c = parse_config(text).unwrap();
        assert_eq!(c.seed, u64::MAX);
        assert_eq!(c.orientation, Orientation::Flat);
        let again = parse_config(&render_config(&c)).unwrap();
        assert_eq!(again, c);
        assert_eq!(
            parse_config(&render_config(&ScenarioConfig::default())).unwrap(),
            ScenarioConfig::default()
        );
    }
}
