//! Coordinate-evaluation predictor.
//!
//! After an initialization phase the node knows its average speed `s_avg`
//! and its average per-axis coordinate rates. When it comes within
//! `d = t_delay * s_avg` of its cell boundary it projects its position
//! `t_delay` ms ahead and widens the projection by the largest positive and
//! negative one-step errors seen so far. The APs covering that rectangle are
//! the only ones scanned.
//!
//! Units are meters and milliseconds throughout, so speeds and rates are in
//! m/ms. The planar `x` axis plays the role of longitude and `y` of latitude.

use std::collections::VecDeque;

use thiserror::Error;

use crate::geo::PlanarCoord;
use crate::topology::{AccessPoint, ApMap, HexCell};
use crate::Real;

pub const DEFAULT_INIT_DURATION_MS: u32 = 60;
pub const DEFAULT_SAMPLE_PERIOD_MS: u32 = 5;
pub const DEFAULT_T_DELAY_MS: f64 = 50.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictorError {
    #[error("no sample interval observed yet")]
    NoSamples,
    #[error("invalid predictor config: {0}")]
    InvalidConfig(&'static str),
    #[error("sample at t={got} ms, expected t={expected} ms")]
    IrregularSample { expected: u64, got: u64 },
}

/// How `s_avg` is averaged once initialization is over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpeedWindow {
    /// Whole observation since the (re)start.
    #[default]
    Growing,
    /// The most recent `init_duration` ms only.
    Sliding,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorConfig<T> {
    pub init_duration_ms: u32,
    pub sample_period_ms: u32,
    /// Time to finish scan, authentication and re-association with one AP.
    pub t_delay_ms: T,
    pub speed_window: SpeedWindow,
    /// Stretch pe/ne by `t_delay / sample_period` when projecting.
    pub scale_bounds: bool,
}

impl<T: Real> Default for PredictorConfig<T> {
    fn default() -> Self {
        Self {
            init_duration_ms: DEFAULT_INIT_DURATION_MS,
            sample_period_ms: DEFAULT_SAMPLE_PERIOD_MS,
            t_delay_ms: T::lit(DEFAULT_T_DELAY_MS),
            speed_window: SpeedWindow::Growing,
            scale_bounds: false,
        }
    }
}

impl<T: Real> PredictorConfig<T> {
    pub fn validate(&self) -> Result<(), PredictorError> {
        if self.sample_period_ms == 0 {
            return Err(PredictorError::InvalidConfig("sample period must be > 0"));
        }
        if self.init_duration_ms == 0
            || !self.init_duration_ms.is_multiple_of(self.sample_period_ms)
        {
            return Err(PredictorError::InvalidConfig(
                "init duration must be a positive multiple of the sample period",
            ));
        }
        if !(self.t_delay_ms > T::zero()) || !self.t_delay_ms.is_finite() {
            return Err(PredictorError::InvalidConfig(
                "t_delay must be finite and > 0",
            ));
        }
        Ok(())
    }

    pub fn period(&self) -> T {
        T::lit(f64::from(self.sample_period_ms))
    }

    /// Number of sample intervals in the initialization phase.
    pub fn init_intervals(&self) -> u32 {
        self.init_duration_ms / self.sample_period_ms
    }
}

/// Axis-aligned rectangle the node is expected to occupy after `t_delay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictedRange<T> {
    pub x_lo: T,
    pub x_hi: T,
    pub y_lo: T,
    pub y_hi: T,
}

impl<T: Real> PredictedRange<T> {
    /// Orders each axis so that `lo <= hi`.
    pub fn new(x_a: T, x_b: T, y_a: T, y_b: T) -> Self {
        Self {
            x_lo: x_a.min(x_b),
            x_hi: x_a.max(x_b),
            y_lo: y_a.min(y_b),
            y_hi: y_a.max(y_b),
        }
    }

    pub fn point(p: PlanarCoord<T>) -> Self {
        Self::new(p.x, p.x, p.y, p.y)
    }

    pub fn center(&self) -> PlanarCoord<T> {
        let half = T::lit(0.5);
        PlanarCoord::new(
            (self.x_lo + self.x_hi) * half,
            (self.y_lo + self.y_hi) * half,
        )
    }

    pub fn width(&self) -> T {
        self.x_hi - self.x_lo
    }

    pub fn height(&self) -> T {
        self.y_hi - self.y_lo
    }

    pub fn corners(&self) -> [PlanarCoord<T>; 4] {
        [
            PlanarCoord::new(self.x_lo, self.y_lo),
            PlanarCoord::new(self.x_hi, self.y_lo),
            PlanarCoord::new(self.x_hi, self.y_hi),
            PlanarCoord::new(self.x_lo, self.y_hi),
        ]
    }

    /// Corners then center.
    pub fn probe_points(&self) -> [PlanarCoord<T>; 5] {
        let [a, b, c, d] = self.corners();
        [a, b, c, d, self.center()]
    }

    pub fn contains(&self, p: PlanarCoord<T>) -> bool {
        p.x >= self.x_lo && p.x <= self.x_hi && p.y >= self.y_lo && p.y <= self.y_hi
    }

    pub fn translate(&self, v: PlanarCoord<T>) -> Self {
        Self {
            x_lo: self.x_lo + v.x,
            x_hi: self.x_hi + v.x,
            y_lo: self.y_lo + v.y,
            y_hi: self.y_hi + v.y,
        }
    }
}

/// Running estimator for one node within one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorState<T> {
    /// Completed sample intervals.
    pub i: u32,
    pub last_pos: PlanarCoord<T>,
    /// Path length, sum of per-interval step lengths.
    pub cum_distance: T,
    pub cum_dx: T,
    pub cum_dy: T,
    pub pe_x: T,
    pub ne_x: T,
    pub pe_y: T,
    pub ne_y: T,
    pub elapsed_ms: u64,
    pub started_ms: u64,
    recent_steps: VecDeque<T>,
}

impl<T: Real> PredictorState<T> {
    /// Starts observing from the fix taken at `started_ms`.
    pub fn new(started_ms: u64, first_fix: PlanarCoord<T>) -> Self {
        Self {
            i: 0,
            last_pos: first_fix,
            cum_distance: T::zero(),
            cum_dx: T::zero(),
            cum_dy: T::zero(),
            pe_x: T::zero(),
            ne_x: T::zero(),
            pe_y: T::zero(),
            ne_y: T::zero(),
            elapsed_ms: 0,
            started_ms,
            recent_steps: VecDeque::new(),
        }
    }

    pub fn is_initialized(&self, cfg: &PredictorConfig<T>) -> bool {
        self.elapsed_ms >= u64::from(cfg.init_duration_ms)
    }

    /// Time at which the next fix is due.
    pub fn next_sample_ms(&self, cfg: &PredictorConfig<T>) -> u64 {
        self.started_ms + self.elapsed_ms + u64::from(cfg.sample_period_ms)
    }

    /// Folds in the fix taken one sample period after the previous one.
    ///
    /// Once initialization is complete the fix is first compared with the
    /// one-step extrapolation from the current rates; that error is returned
    /// and folded into the pe/ne bounds.
    pub fn ingest_sample(
        &mut self,
        pos: PlanarCoord<T>,
        cfg: &PredictorConfig<T>,
    ) -> Option<PlanarCoord<T>> {
        let predicted = if self.i > 0 && self.is_initialized(cfg) {
            self.coordinate_rates(cfg)
                .ok()
                .map(|rate| self.last_pos + rate * cfg.period())
        } else {
            None
        };

        let step = pos - self.last_pos;
        let len = step.norm();
        self.cum_distance = self.cum_distance + len;
        self.cum_dx = self.cum_dx + step.x;
        self.cum_dy = self.cum_dy + step.y;
        self.i += 1;
        self.elapsed_ms += u64::from(cfg.sample_period_ms);
        self.last_pos = pos;
        if cfg.speed_window == SpeedWindow::Sliding {
            self.recent_steps.push_back(len);
            while self.recent_steps.len() > cfg.init_intervals() as usize {
                self.recent_steps.pop_front();
            }
        }

        predicted.map(|p| self.update_error_bounds(p, pos))
    }

    /// [`ingest_sample`](Self::ingest_sample) with a cadence check.
    pub fn ingest_at(
        &mut self,
        t_ms: u64,
        pos: PlanarCoord<T>,
        cfg: &PredictorConfig<T>,
    ) -> Result<Option<PlanarCoord<T>>, PredictorError> {
        let expected = self.next_sample_ms(cfg);
        if t_ms != expected {
            return Err(PredictorError::IrregularSample {
                expected,
                got: t_ms,
            });
        }
        Ok(self.ingest_sample(pos, cfg))
    }

    /// Records `actual - predicted` into the running extreme errors.
    pub fn update_error_bounds(
        &mut self,
        predicted: PlanarCoord<T>,
        actual: PlanarCoord<T>,
    ) -> PlanarCoord<T> {
        let e = actual - predicted;
        self.pe_x = self.pe_x.max(e.x);
        self.ne_x = self.ne_x.min(e.x);
        self.pe_y = self.pe_y.max(e.y);
        self.ne_y = self.ne_y.min(e.y);
        e
    }

    fn require_samples(&self) -> Result<(), PredictorError> {
        if self.i == 0 {
            Err(PredictorError::NoSamples)
        } else {
            Ok(())
        }
    }

    /// `s_avg` in m/ms.
    pub fn average_speed(&self, cfg: &PredictorConfig<T>) -> Result<T, PredictorError> {
        self.require_samples()?;
        match cfg.speed_window {
            SpeedWindow::Growing => Ok(self.cum_distance / T::lit(self.elapsed_ms as f64)),
            SpeedWindow::Sliding => {
                let n = self.recent_steps.len();
                let total: T = self.recent_steps.iter().copied().sum();
                Ok(total / (cfg.period() * T::lit(n as f64)))
            }
        }
    }

    /// `d = t_delay * s_avg`, meters.
    pub fn trigger_distance(&self, cfg: &PredictorConfig<T>) -> Result<T, PredictorError> {
        Ok(cfg.t_delay_ms * self.average_speed(cfg)?)
    }

    /// Signed mean coordinate rates `(lambda_x, lambda_y)` in m/ms.
    pub fn coordinate_rates(
        &self,
        cfg: &PredictorConfig<T>,
    ) -> Result<PlanarCoord<T>, PredictorError> {
        self.require_samples()?;
        let span = cfg.period() * T::lit(f64::from(self.i));
        Ok(PlanarCoord::new(self.cum_dx / span, self.cum_dy / span))
    }

    /// `last_pos + lambda * t_delay`.
    pub fn extrapolate(&self, cfg: &PredictorConfig<T>) -> Result<PlanarCoord<T>, PredictorError> {
        Ok(self.last_pos + self.coordinate_rates(cfg)? * cfg.t_delay_ms)
    }

    pub fn predicted_range(
        &self,
        cfg: &PredictorConfig<T>,
    ) -> Result<PredictedRange<T>, PredictorError> {
        let c = self.extrapolate(cfg)?;
        let k = if cfg.scale_bounds {
            cfg.t_delay_ms / cfg.period()
        } else {
            T::one()
        };
        Ok(PredictedRange::new(
            c.x + self.ne_x * k,
            c.x + self.pe_x * k,
            c.y + self.ne_y * k,
            c.y + self.pe_y * k,
        ))
    }

    /// True once the node is within the trigger distance of the cell edge.
    /// A node already outside the cell always triggers.
    pub fn should_trigger(
        &self,
        cell: &HexCell<T>,
        cfg: &PredictorConfig<T>,
    ) -> Result<bool, PredictorError> {
        let d = self.trigger_distance(cfg)?;
        Ok(match cell.distance_to_boundary(self.last_pos) {
            Ok(gap) => gap <= d,
            Err(_) => true,
        })
    }
}

/// APs other than `current` covering any corner or the center of `range`,
/// nearest to the range center first.
pub fn candidate_aps<'m, T: Real>(
    range: &PredictedRange<T>,
    map: &'m ApMap<T>,
    current: Option<&str>,
) -> Vec<&'m AccessPoint<T>> {
    let center = range.center();
    let mut found: Vec<&AccessPoint<T>> = Vec::new();
    for p in range.probe_points() {
        for ap in map.covering(p) {
            if Some(ap.bssid.as_str()) != current && !found.iter().any(|f| f.bssid == ap.bssid) {
                found.push(ap);
            }
        }
    }
    found.sort_by(|a, b| {
        a.center
            .distance(center)
            .partial_cmp(&b.center.distance(center))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.bssid.cmp(&b.bssid))
    });
    found
}

/// Slides `range` along `direction` until its center reaches the boundary
/// of `cell`. Returns `None` when the center is already outside the cell or
/// there is no direction of travel.
pub fn advance_to_exit<T: Real>(
    range: &PredictedRange<T>,
    direction: PlanarCoord<T>,
    cell: &HexCell<T>,
) -> Option<PredictedRange<T>> {
    let center = range.center();
    if !cell.contains(center) {
        return None;
    }
    let t = cell.exit_distance(center, direction)?;
    let u = direction * (T::one() / direction.norm());
    Some(range.translate(u * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Orientation;
    use approx::assert_relative_eq;

    fn cfg() -> PredictorConfig<f64> {
        PredictorConfig::default()
    }

    fn run(points: &[PlanarCoord<f64>], cfg: &PredictorConfig<f64>) -> PredictorState<f64> {
        let mut s = PredictorState::new(0, points[0]);
        for p in &points[1..] {
            s.ingest_sample(*p, cfg);
        }
        s
    }

    const V_MS: f64 = 19.0222 / 1000.0;

    fn straight(n: usize, v: f64, heading: f64) -> Vec<PlanarCoord<f64>> {
        (0..=n)
            .map(|k| PlanarCoord::from_polar(v * 5.0 * k as f64, heading))
            .collect()
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let mut c = cfg();
        c.init_duration_ms = 62;
        assert!(c.validate().is_err());
        c = cfg();
        c.t_delay_ms = 0.0;
        assert!(c.validate().is_err());
        c = cfg();
        c.sample_period_ms = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn stationary_node() {
        let p = PlanarCoord::new(3.0, 4.0);
        let s = run(&[p; 30], &cfg());
        assert_eq!(s.cum_distance, 0.0);
        assert_eq!(s.average_speed(&cfg()).unwrap(), 0.0);
        assert_eq!(s.trigger_distance(&cfg()).unwrap(), 0.0);
        assert_eq!(
            s.coordinate_rates(&cfg()).unwrap(),
            PlanarCoord::new(0.0, 0.0)
        );
        assert_eq!(s.predicted_range(&cfg()).unwrap(), PredictedRange::point(p));
    }

    #[test]
    fn initialization_phase_numbers() {
        let s = run(&straight(12, V_MS, 0.0), &cfg());
        assert_eq!(s.i, 12);
        assert_eq!(s.elapsed_ms, 60);
        assert!(s.is_initialized(&cfg()));
        // 12 * 19.0222 * 0.005
        assert_relative_eq!(s.cum_distance, 1.141_332, epsilon = 1e-9);
        assert_relative_eq!(
            s.average_speed(&cfg()).unwrap(),
            0.019_022_2,
            epsilon = 1e-12
        );
        // 50 * 0.0190222
        assert_relative_eq!(
            s.trigger_distance(&cfg()).unwrap(),
            0.951_11,
            epsilon = 1e-9
        );
        let mut c2 = cfg();
        c2.t_delay_ms = 100.0;
        assert_relative_eq!(
            s.trigger_distance(&c2).unwrap(),
            2.0 * s.trigger_distance(&cfg()).unwrap(),
            epsilon = 0.0
        );
    }

    #[test]
    fn no_samples_errors() {
        let s = PredictorState::new(0, PlanarCoord::new(0.0, 0.0));
        assert_eq!(s.average_speed(&cfg()), Err(PredictorError::NoSamples));
        assert_eq!(s.coordinate_rates(&cfg()), Err(PredictorError::NoSamples));
        assert_eq!(s.predicted_range(&cfg()), Err(PredictorError::NoSamples));
        assert_eq!(s.trigger_distance(&cfg()), Err(PredictorError::NoSamples));
    }

    #[test]
    fn rates_of_pure_x_motion() {
        let s = run(&straight(40, V_MS, 0.0), &cfg());
        let r = s.coordinate_rates(&cfg()).unwrap();
        assert_relative_eq!(r.x, V_MS, epsilon = 1e-15);
        assert_eq!(r.y, 0.0);
    }

    #[test]
    fn closed_loop_has_zero_rates() {
        let pts = [
            PlanarCoord::new(0.0, 0.0),
            PlanarCoord::new(1.0, 0.0),
            PlanarCoord::new(1.0, 1.0),
            PlanarCoord::new(0.0, 1.0),
            PlanarCoord::new(0.0, 0.0),
        ];
        let s = run(&pts, &cfg());
        assert_eq!(
            s.coordinate_rates(&cfg()).unwrap(),
            PlanarCoord::new(0.0, 0.0)
        );
        assert!(s.average_speed(&cfg()).unwrap() > 0.0);
    }

    #[test]
    fn error_bounds_running_extremes() {
        let mut s = PredictorState::new(0, PlanarCoord::new(0.0, 0.0));
        let p = PlanarCoord::new(0.0, 0.0);
        s.update_error_bounds(p, p);
        assert_eq!((s.pe_x, s.ne_x, s.pe_y, s.ne_y), (0.0, 0.0, 0.0, 0.0));
        s.update_error_bounds(p, PlanarCoord::new(0.1, 0.0));
        s.update_error_bounds(p, PlanarCoord::new(-0.2, 0.0));
        s.update_error_bounds(p, PlanarCoord::new(0.05, 0.0));
        assert_eq!(s.pe_x, 0.1);
        assert_eq!(s.ne_x, -0.2);
    }

    #[test]
    fn errors_start_after_initialization() {
        let mut s = PredictorState::new(0, PlanarCoord::new(0.0, 0.0));
        let c = cfg();
        for k in 1..=12 {
            assert!(s
                .ingest_sample(PlanarCoord::new(k as f64 * 0.1, 0.0), &c)
                .is_none());
        }
        let e = s.ingest_sample(PlanarCoord::new(1.35, 0.0), &c).unwrap();
        // rate 0.1 m per 5 ms predicts 1.3
        assert_relative_eq!(e.x, 0.05, epsilon = 1e-12);
        assert_relative_eq!(s.pe_x, 0.05, epsilon = 1e-12);
    }

    #[test]
    fn noiseless_line_gives_point_range() {
        let heading = 0.7;
        let pts = straight(400, V_MS, heading);
        let s = run(&pts, &cfg());
        let r = s.predicted_range(&cfg()).unwrap();
        let truth = PlanarCoord::from_polar(V_MS * (5.0 * 400.0 + 50.0), heading);
        assert!(r.width() < 1e-9 && r.height() < 1e-9);
        assert!(r.center().distance(truth) < 1e-9);
    }

    #[test]
    fn range_contains_extrapolation_and_translates() {
        let pts: Vec<_> = (0..60)
            .map(|k| {
                PlanarCoord::new(
                    k as f64 * 0.1 + 0.01 * (k as f64).sin(),
                    0.03 * (k as f64 * 0.7).cos(),
                )
            })
            .collect();
        let s = run(&pts, &cfg());
        let r = s.predicted_range(&cfg()).unwrap();
        assert!(r.contains(s.extrapolate(&cfg()).unwrap()));
        let shift = PlanarCoord::new(123.25, -40.5);
        let moved: Vec<_> = pts.iter().map(|p| *p + shift).collect();
        let r2 = run(&moved, &cfg()).predicted_range(&cfg()).unwrap();
        assert_relative_eq!(r2.x_lo, r.x_lo + shift.x, epsilon = 1e-9);
        assert_relative_eq!(r2.y_hi, r.y_hi + shift.y, epsilon = 1e-9);
    }

    #[test]
    fn scaled_bounds_widen_range() {
        let pts: Vec<_> = (0..60)
            .map(|k| PlanarCoord::new(k as f64 * 0.1 + 0.01 * (k % 3) as f64, 0.0))
            .collect();
        let plain = run(&pts, &cfg()).predicted_range(&cfg()).unwrap();
        let mut c = cfg();
        c.scale_bounds = true;
        let scaled = run(&pts, &c).predicted_range(&c).unwrap();
        assert_relative_eq!(scaled.width(), 10.0 * plain.width(), epsilon = 1e-12);
    }

    #[test]
    fn sliding_window_forgets_old_speed() {
        let mut c = cfg();
        c.speed_window = SpeedWindow::Sliding;
        let mut pts: Vec<_> = (0..=40)
            .map(|k| PlanarCoord::new(k as f64 * 0.2, 0.0))
            .collect();
        let last = pts[40];
        pts.extend((1..=12).map(|k| last + PlanarCoord::new(k as f64 * 0.05, 0.0)));
        let s = run(&pts, &c);
        assert_relative_eq!(s.average_speed(&c).unwrap(), 0.01, epsilon = 1e-12);
        assert!(run(&pts, &cfg()).average_speed(&cfg()).unwrap() > 0.02);
    }

    #[test]
    fn irregular_samples_rejected() {
        let mut s = PredictorState::new(100, PlanarCoord::new(0.0, 0.0));
        assert!(s.ingest_at(105, PlanarCoord::new(0.1, 0.0), &cfg()).is_ok());
        assert_eq!(
            s.ingest_at(112, PlanarCoord::new(0.2, 0.0), &cfg()),
            Err(PredictorError::IrregularSample {
                expected: 110,
                got: 112
            })
        );
    }

    #[test]
    fn trigger_examples() {
        let cell = HexCell::new(PlanarCoord::new(0.0, 0.0), 231.0, Orientation::Pointy).unwrap();
        let c = cfg();
        // at the center with d ~ 0.95 m
        let mut s = PredictorState::new(0, PlanarCoord::new(-V_MS * 5.0 * 12.0, 0.0));
        for k in 1..=12 {
            s.ingest_sample(PlanarCoord::new(-V_MS * 5.0 * (12 - k) as f64, 0.0), &c);
        }
        assert_relative_eq!(s.trigger_distance(&c).unwrap(), 0.951_11, epsilon = 1e-9);
        assert!(!s.should_trigger(&cell, &c).unwrap());
        // 0.5 m inside the east edge
        let apo = cell.apothem();
        let shift = PlanarCoord::new(apo - 0.5, 0.0);
        let mut near = PredictorState::new(0, shift - PlanarCoord::new(V_MS * 60.0, 0.0));
        for k in 1..=12 {
            near.ingest_sample(
                shift - PlanarCoord::new(V_MS * 5.0 * (12 - k) as f64, 0.0),
                &c,
            );
        }
        assert!(near.should_trigger(&cell, &c).unwrap());
        // stationary exactly on the boundary
        let edge_pt = PlanarCoord::new(apo, 0.0);
        let still = run(&[edge_pt; 13], &c);
        assert_eq!(still.trigger_distance(&c).unwrap(), 0.0);
        assert!(still.should_trigger(&cell, &c).unwrap());
    }

    #[test]
    fn candidates_examples() {
        let map = ApMap::hex_rings(2, 231.0, Orientation::Pointy).unwrap();
        let current = map.aps()[0].bssid.clone();
        let ap1 = &map.aps()[1];
        // inside AP 1's cell
        let r = PredictedRange::new(ap1.center.x - 1.0, ap1.center.x + 1.0, 0.5, 1.0);
        let c = candidate_aps(&r, &map, Some(&current));
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].bssid, ap1.bssid);
        // a point range at the serving AP's center
        let r = PredictedRange::point(map.aps()[0].center);
        assert!(candidate_aps(&r, &map, Some(&current)).is_empty());
        // far outside the map
        let r = PredictedRange::point(PlanarCoord::new(1e5, 0.0));
        assert!(candidate_aps(&r, &map, Some(&current)).is_empty());
    }

    #[test]
    fn candidates_straddling_shared_edge() {
        let map = ApMap::hex_rings(2, 231.0, Orientation::Pointy).unwrap();
        let (a, b) = (&map.aps()[1], &map.aps()[2]);
        let mid = (a.center + b.center) * 0.5;
        let r = PredictedRange::new(mid.x - 0.3, mid.x + 0.3, mid.y - 0.3, mid.y + 0.3);
        let got: Vec<_> = candidate_aps(&r, &map, Some(&map.aps()[0].bssid))
            .iter()
            .map(|ap| ap.bssid.clone())
            .collect();
        // dense grid over the rectangle as the membership oracle
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..=50 {
            for j in 0..=50 {
                let p = PlanarCoord::new(
                    r.x_lo + r.width() * i as f64 / 50.0,
                    r.y_lo + r.height() * j as f64 / 50.0,
                );
                if let Some(ap) = map.cell_of(p) {
                    seen.insert(ap.bssid.clone());
                }
            }
        }
        assert_eq!(got.len(), 2);
        assert_eq!(
            got.iter()
                .cloned()
                .collect::<std::collections::BTreeSet<_>>(),
            seen
        );
    }

    #[test]
    fn advance_moves_center_to_boundary() {
        let cell = HexCell::new(PlanarCoord::new(0.0, 0.0), 231.0, Orientation::Pointy).unwrap();
        let r = PredictedRange::new(199.0, 199.1, 10.0, 10.1);
        let moved = advance_to_exit(&r, PlanarCoord::new(1.0, 0.0), &cell).unwrap();
        assert_relative_eq!(moved.center().x, cell.apothem(), epsilon = 1e-9);
        assert_relative_eq!(moved.width(), r.width(), epsilon = 1e-12);
        assert!(advance_to_exit(&r, PlanarCoord::new(0.0, 0.0), &cell).is_none());
        let outside = PredictedRange::point(PlanarCoord::new(300.0, 0.0));
        assert!(advance_to_exit(&outside, PlanarCoord::new(1.0, 0.0), &cell).is_none());
    }

    #[test]
    fn f32_predictor() {
        let c = PredictorConfig::<f32>::default();
        let mut s = PredictorState::<f32>::new(0, PlanarCoord::new(0.0, 0.0));
        for k in 1..=12 {
            s.ingest_sample(PlanarCoord::new(k as f32 * 0.095_111, 0.0), &c);
        }
        assert!((s.trigger_distance(&c).unwrap() - 0.951_11).abs() < 1e-5);
    }
}
