use crate::Real;

use super::SimError;

/// Per-phase handoff timing, all in ms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyModel<T> {
    /// Regulatory channel count scanned by a full scan.
    pub n_channels: u32,
    /// MinChannelTime.
    pub t_min: T,
    /// MaxChannelTime.
    pub t_max: T,
    /// Per-channel dwell used for the deterministic latency figures.
    pub per_channel: T,
    pub auth: T,
    pub reassoc: T,
}

impl<T: Real> Default for LatencyModel<T> {
    fn default() -> Self {
        Self {
            n_channels: 11,
            t_min: T::lit(5.0),
            t_max: T::lit(30.0),
            per_channel: T::lit(30.0),
            auth: T::lit(2.0),
            reassoc: T::lit(2.0),
        }
    }
}

impl<T: Real> LatencyModel<T> {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidLatency(m.to_string()));
        if self.n_channels == 0 {
            return bad("n_channels must be > 0");
        }
        for (name, v) in [
            ("t_min", self.t_min),
            ("t_max", self.t_max),
            ("per_channel", self.per_channel),
            ("auth", self.auth),
            ("reassoc", self.reassoc),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return bad(&format!("{name} must be finite and > 0"));
            }
        }
        if !(self.t_min <= self.per_channel && self.per_channel <= self.t_max) {
            return bad("need t_min <= per_channel <= t_max");
        }
        Ok(())
    }

    fn check_channels(&self, n: u32) -> Result<(), SimError> {
        if n == 0 || n > self.n_channels {
            return Err(SimError::ChannelCount {
                n,
                max: self.n_channels,
            });
        }
        Ok(())
    }

    /// Scanning delay bracket `(n * t_min, n * t_max)` for `n` channels.
    pub fn scan_latency_bounds(&self, n: u32) -> Result<(T, T), SimError> {
        self.check_channels(n)?;
        let n = T::lit(f64::from(n));
        Ok((n * self.t_min, n * self.t_max))
    }

    /// Scan of `n_scanned` channels plus authentication and re-association.
    pub fn handoff_latency(&self, n_scanned: u32) -> Result<T, SimError> {
        self.check_channels(n_scanned)?;
        Ok(T::lit(f64::from(n_scanned)) * self.per_channel + self.auth + self.reassoc)
    }

    pub fn full_scan_latency(&self) -> T {
        T::lit(f64::from(self.n_channels)) * self.per_channel + self.auth + self.reassoc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        let m = LatencyModel::<f64>::default();
        assert_eq!(m.scan_latency_bounds(11).unwrap(), (55.0, 330.0));
        assert_eq!(m.scan_latency_bounds(1).unwrap(), (5.0, 30.0));
        let (lo2, hi2) = m.scan_latency_bounds(2).unwrap();
        assert_eq!((lo2, hi2), (10.0, 60.0));
        assert!(m.scan_latency_bounds(0).is_err());
        assert!(m.scan_latency_bounds(12).is_err());
    }

    #[test]
    fn handoff_totals() {
        let m = LatencyModel::<f64>::default();
        assert_eq!(m.handoff_latency(1).unwrap(), 34.0);
        assert_eq!(m.handoff_latency(2).unwrap(), 64.0);
        assert_eq!(m.handoff_latency(11).unwrap(), 334.0);
        assert_eq!(m.full_scan_latency(), 334.0);
        assert!(m.handoff_latency(0).is_err());
    }

    #[test]
    fn validation() {
        let mut m = LatencyModel::<f64>::default();
        assert!(m.validate().is_ok());
        m.t_min = 40.0;
        assert!(m.validate().is_err());
        let m = LatencyModel::<f64> {
            auth: 0.0,
            ..Default::default()
        };
        assert!(m.validate().is_err());
    }
}
