use std::collections::BTreeMap;

use crate::geo::PlanarCoord;
use crate::Real;

use super::{
    center_spacing, default_neighbor_threshold, AccessPoint, ApMap, Orientation, TopologyError,
};

/// One beacon observation by the monitor node.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorSample<T> {
    pub position: PlanarCoord<T>,
    pub bssid: String,
    pub channel: u8,
    pub rssi: T,
}

/// Fraction of the center spacing by which recovered centers may crowd each
/// other; recovered positions are quantized to the monitor's path.
const MONITOR_SPACING_TOLERANCE: f64 = 0.05;

/// Builds an AP map from a monitor drive-through.
///
/// Each bssid is placed where the monitor heard it loudest (first sample
/// wins on equal rssi). APs are ordered by bssid and use the default
/// orientation and neighbor threshold.
pub fn build_map_from_monitor_trace<T: Real>(
    samples: &[MonitorSample<T>],
    edge: T,
) -> Result<ApMap<T>, TopologyError> {
    if samples.is_empty() {
        return Err(TopologyError::EmptyTrace);
    }
    let mut best: BTreeMap<&str, &MonitorSample<T>> = BTreeMap::new();
    for s in samples {
        match best.get(s.bssid.as_str()) {
            Some(prev) if prev.channel != s.channel => {
                return Err(TopologyError::ConflictingChannel {
                    bssid: s.bssid.clone(),
                    first: prev.channel,
                    second: s.channel,
                });
            }
            Some(prev) if prev.rssi >= s.rssi => {}
            _ => {
                best.insert(&s.bssid, s);
            }
        }
    }
    let aps = best
        .into_values()
        .map(|s| AccessPoint {
            bssid: s.bssid.clone(),
            channel: s.channel,
            center: s.position,
            ssid: String::new(),
            prefix: String::new(),
        })
        .collect();
    ApMap::with_tolerance(
        aps,
        edge,
        Orientation::default(),
        default_neighbor_threshold(edge),
        center_spacing(edge) * T::lit(MONITOR_SPACING_TOLERANCE),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_loss(d: f64) -> f64 {
        40.0 + 20.0 * d.max(1.0).log10()
    }

    #[test]
    fn single_sample_per_ap() {
        let s = vec![
            MonitorSample {
                position: PlanarCoord::new(0.0, 0.0),
                bssid: "a".into(),
                channel: 1,
                rssi: -40.0,
            },
            MonitorSample {
                position: PlanarCoord::new(400.0, 0.0),
                bssid: "b".into(),
                channel: 6,
                rssi: -45.0,
            },
        ];
        let m = build_map_from_monitor_trace(&s, 231.0).unwrap();
        assert_eq!(m.get("a").unwrap().center, PlanarCoord::new(0.0, 0.0));
        assert_eq!(m.get("b").unwrap().center, PlanarCoord::new(400.0, 0.0));
        assert_eq!(m.get("b").unwrap().channel, 6);
    }

    #[test]
    fn conflicting_channels_rejected() {
        let s = vec![
            MonitorSample {
                position: PlanarCoord::new(0.0, 0.0),
                bssid: "a".into(),
                channel: 1,
                rssi: -40.0,
            },
            MonitorSample {
                position: PlanarCoord::new(5.0, 0.0),
                bssid: "a".into(),
                channel: 6,
                rssi: -41.0,
            },
        ];
        assert!(matches!(
            build_map_from_monitor_trace(&s, 231.0),
            Err(TopologyError::ConflictingChannel { .. })
        ));
        assert!(matches!(
            build_map_from_monitor_trace::<f64>(&[], 231.0),
            Err(TopologyError::EmptyTrace)
        ));
    }

    #[test]
    fn recovers_seven_cell_map() {
        let truth = ApMap::hex_rings(1, 231.0, Orientation::Pointy).unwrap();
        let step = 3.0;
        let half = 700.0;
        let mut samples = Vec::new();
        // raster drive offset from the lattice so no center is hit exactly
        let mut y = -half + 0.7;
        while y <= half {
            let mut x = -half + 1.3;
            while x <= half {
                let p = PlanarCoord::new(x, y);
                for ap in truth.aps() {
                    let d = p.distance(ap.center);
                    if d < 300.0 {
                        samples.push(MonitorSample {
                            position: p,
                            bssid: ap.bssid.clone(),
                            channel: ap.channel,
                            rssi: -path_loss(d),
                        });
                    }
                }
                x += step;
            }
            y += step;
        }
        let m = build_map_from_monitor_trace(&samples, 231.0).unwrap();
        assert_eq!(m.aps().len(), 7);
        for ap in truth.aps() {
            let got = m.get(&ap.bssid).unwrap();
            assert_eq!(got.channel, ap.channel);
            assert!(got.center.distance(ap.center) <= 2.0 * step, "{}", ap.bssid);
        }
    }
}
