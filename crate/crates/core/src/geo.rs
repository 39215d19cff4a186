//! Spherical geodesy, the local planar frame, and the GPS measurement model.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::Real;

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Separation above which a location update is sent.
pub const MOVEMENT_THRESHOLD_M: f64 = 1.0;

/// Largest separation the tangent-plane projection accepts.
pub const MAX_PROJECTION_RANGE_M: f64 = 50_000.0;

/// Ranging accuracy of the P(Y) code, meters.
pub const GPS_SIGMA_PRECISE_M: f64 = 0.3;

/// Ranging accuracy of the C/A code, meters.
pub const GPS_SIGMA_COARSE_M: f64 = 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("latitude {0} rad outside [-pi/2, pi/2]")]
    LatitudeOutOfRange(f64),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("point is {0:.1} m from the projection origin (limit {MAX_PROJECTION_RANGE_M} m)")]
    OutOfProjectionRange(f64),
    #[error("projection origin too close to a pole")]
    PolarOrigin,
    #[error("invalid GPS noise model: {0}")]
    InvalidNoise(&'static str),
}

/// Geodetic position in radians. Longitude is kept in `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeoCoord<T> {
    pub lat: T,
    pub lon: T,
}

impl<T: Real> GeoCoord<T> {
    /// Builds a coordinate, wrapping longitude into `[-pi, pi)`.
    pub fn new(lat: T, lon: T) -> Result<Self, GeoError> {
        if !lat.is_finite() || !lon.is_finite() {
            return Err(GeoError::NonFinite);
        }
        if lat.abs() > T::FRAC_PI_2() {
            return Err(GeoError::LatitudeOutOfRange(lat.as_f64()));
        }
        Ok(Self {
            lat,
            lon: wrap_angle(lon),
        })
    }

    pub fn from_degrees(lat_deg: T, lon_deg: T) -> Result<Self, GeoError> {
        Self::new(lat_deg.to_radians(), lon_deg.to_radians())
    }
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::TAU();
    let mut w = (a + T::PI()) % two_pi;
    if w < T::zero() {
        w = w + two_pi;
    }
    let w = w - T::PI();
    // `%` can leave exactly +pi after rounding
    if w >= T::PI() {
        w - two_pi
    } else {
        w
    }
}

/// Position in meters east (`x`) and north (`y`) of a local origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarCoord<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> PlanarCoord<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn from_polar(r: T, theta: T) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates counter-clockwise about the origin.
    pub fn rotate(self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl<T: Real> Add for PlanarCoord<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for PlanarCoord<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Mul<T> for PlanarCoord<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<T: Real> Neg for PlanarCoord<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// `sin^2(delta / 2)`.
pub fn haversin<T: Real>(delta: T) -> T {
    let s = (delta / T::lit(2.0)).sin();
    s * s
}

/// Great-circle distance on a sphere of the given radius.
pub fn haversine_distance<T: Real>(a: GeoCoord<T>, b: GeoCoord<T>, radius: T) -> T {
    let h = haversin(b.lat - a.lat) + a.lat.cos() * b.lat.cos() * haversin(b.lon - a.lon);
    let h = h.max(T::zero()).min(T::one());
    T::lit(2.0) * radius * h.sqrt().asin()
}

/// True when the node moved more than [`MOVEMENT_THRESHOLD_M`] between fixes.
pub fn movement_detected<T: Real>(prev: GeoCoord<T>, cur: GeoCoord<T>) -> bool {
    haversine_distance(prev, cur, T::lit(EARTH_RADIUS_M)) > T::lit(MOVEMENT_THRESHOLD_M)
}

/// Equirectangular projection onto the tangent plane at `origin`.
pub fn geo_to_planar<T: Real>(
    p: GeoCoord<T>,
    origin: GeoCoord<T>,
) -> Result<PlanarCoord<T>, GeoError> {
    let r = T::lit(EARTH_RADIUS_M);
    let cos_lat = origin.lat.cos();
    if cos_lat < T::lit(1e-9) {
        return Err(GeoError::PolarOrigin);
    }
    let sep = haversine_distance(p, origin, r);
    if sep > T::lit(MAX_PROJECTION_RANGE_M) {
        return Err(GeoError::OutOfProjectionRange(sep.as_f64()));
    }
    let dlon = wrap_angle(p.lon - origin.lon);
    Ok(PlanarCoord::new(
        r * dlon * cos_lat,
        r * (p.lat - origin.lat),
    ))
}

/// Inverse of [`geo_to_planar`].
pub fn planar_to_geo<T: Real>(
    p: PlanarCoord<T>,
    origin: GeoCoord<T>,
) -> Result<GeoCoord<T>, GeoError> {
    if !p.is_finite() {
        return Err(GeoError::NonFinite);
    }
    let range = p.norm();
    if range > T::lit(MAX_PROJECTION_RANGE_M) {
        return Err(GeoError::OutOfProjectionRange(range.as_f64()));
    }
    let r = T::lit(EARTH_RADIUS_M);
    let cos_lat = origin.lat.cos();
    if cos_lat < T::lit(1e-9) {
        return Err(GeoError::PolarOrigin);
    }
    GeoCoord::new(origin.lat + p.y / r, origin.lon + p.x / (r * cos_lat))
}

/// Per-axis Gaussian position error of a GPS receiver.
///
/// `correlation_ms = None` gives independent fixes. `Some(tau)` makes the
/// error a first-order Gauss-Markov process with time constant `tau`,
/// keeping the stationary per-axis deviation at `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpsNoiseModel<T> {
    pub sigma: T,
    pub sample_period_ms: T,
    pub correlation_ms: Option<T>,
}

/// Default Gauss-Markov time constant of the receiver error, ms.
pub const DEFAULT_GPS_CORRELATION_MS: f64 = 60_000.0;

impl<T: Real> Default for GpsNoiseModel<T> {
    fn default() -> Self {
        Self {
            sigma: T::lit(GPS_SIGMA_PRECISE_M),
            sample_period_ms: T::lit(5.0),
            correlation_ms: Some(T::lit(DEFAULT_GPS_CORRELATION_MS)),
        }
    }
}

impl<T: Real> GpsNoiseModel<T> {
    pub fn independent(sigma: T, sample_period_ms: T) -> Self {
        Self {
            sigma,
            sample_period_ms,
            correlation_ms: None,
        }
    }

    pub fn noiseless() -> Self {
        Self::independent(T::zero(), T::lit(5.0))
    }

    pub fn validate(&self) -> Result<(), GeoError> {
        if !(self.sigma >= T::zero()) || !self.sigma.is_finite() {
            return Err(GeoError::InvalidNoise("sigma must be finite and >= 0"));
        }
        if !(self.sample_period_ms > T::zero()) {
            return Err(GeoError::InvalidNoise("sample period must be > 0"));
        }
        if let Some(tau) = self.correlation_ms {
            if !(tau > T::zero()) {
                return Err(GeoError::InvalidNoise("correlation time must be > 0"));
            }
        }
        Ok(())
    }

    /// Lag-one autocorrelation of the error between consecutive fixes.
    pub fn step_correlation(&self) -> T {
        match self.correlation_ms {
            Some(tau) => (-self.sample_period_ms / tau).exp(),
            None => T::zero(),
        }
    }
}

fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let z: f64 = rng.sample(StandardNormal);
    T::lit(z)
}

/// One independent fix: `true_pos` plus N(0, sigma^2) on each axis.
pub fn gps_fix<T: Real, R: Rng + ?Sized>(
    true_pos: PlanarCoord<T>,
    model: &GpsNoiseModel<T>,
    rng: &mut R,
) -> PlanarCoord<T> {
    if model.sigma == T::zero() {
        return true_pos;
    }
    let ex = normal::<T, R>(rng) * model.sigma;
    let ey = normal::<T, R>(rng) * model.sigma;
    PlanarCoord::new(true_pos.x + ex, true_pos.y + ey)
}

/// Stateful receiver producing successive fixes under a [`GpsNoiseModel`].
#[derive(Debug, Clone)]
pub struct GpsReceiver<T> {
    model: GpsNoiseModel<T>,
    error: Option<PlanarCoord<T>>,
}

impl<T: Real> GpsReceiver<T> {
    pub fn new(model: GpsNoiseModel<T>) -> Self {
        Self { model, error: None }
    }

    pub fn model(&self) -> &GpsNoiseModel<T> {
        &self.model
    }

    /// Next fix, one sample period after the previous one.
    pub fn fix<R: Rng + ?Sized>(
        &mut self,
        true_pos: PlanarCoord<T>,
        rng: &mut R,
    ) -> PlanarCoord<T> {
        if self.model.sigma == T::zero() {
            return true_pos;
        }
        let prev = match (self.model.correlation_ms, self.error) {
            (Some(_), Some(e)) => e,
            _ => {
                let e = gps_fix(PlanarCoord::origin(), &self.model, rng);
                self.error = Some(e);
                return true_pos + e;
            }
        };
        let rho = self.model.step_correlation();
        let drive = (T::one() - rho * rho).sqrt();
        let w = gps_fix(PlanarCoord::origin(), &self.model, rng);
        let e = prev * rho + w * drive;
        self.error = Some(e);
        true_pos + e
    }
}
