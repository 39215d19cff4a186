//! Access-point map over a hexagonal tiling.

mod hex;
mod mapfile;
mod monitor;

use thiserror::Error;

use crate::geo::PlanarCoord;
use crate::Real;

pub use hex::{apothem, HexCell, Orientation};
pub use mapfile::{parse_map, render_map};
pub use monitor::{build_map_from_monitor_trace, MonitorSample};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("cell edge must be finite and > 0, got {0}")]
    InvalidEdge(f64),
    #[error("neighbor threshold must be finite and >= 0, got {0}")]
    InvalidThreshold(f64),
    #[error("AP {bssid}: channel {channel} outside 1..=14")]
    InvalidChannel { bssid: String, channel: u8 },
    #[error("duplicate bssid {0}")]
    DuplicateBssid(String),
    #[error("cells of {a} and {b} overlap: centers {distance:.6} m apart")]
    OverlappingCells { a: String, b: String, distance: f64 },
    #[error("point lies outside the cell")]
    OutsideCell,
    #[error("unknown orientation {0:?} (expected flat or pointy)")]
    UnknownOrientation(String),
    #[error("monitor trace is empty")]
    EmptyTrace,
    #[error("bssid {bssid} observed on channels {first} and {second}")]
    ConflictingChannel {
        bssid: String,
        first: u8,
        second: u8,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// One AP and the data a node needs to scan for it.
#[derive(Debug, Clone, PartialEq)]
pub struct AccessPoint<T> {
    pub bssid: String,
    pub channel: u8,
    pub center: PlanarCoord<T>,
    pub ssid: String,
    pub prefix: String,
}

/// Immutable AP table; every AP owns one hexagon of the shared edge length.
#[derive(Debug, Clone, PartialEq)]
pub struct ApMap<T> {
    aps: Vec<AccessPoint<T>>,
    edge: T,
    orientation: Orientation,
    neighbor_threshold: T,
}

/// Channels assigned by [`ApMap::hex_rings`]; adjacent cells never share one.
pub const RING_CHANNELS: [u8; 3] = [1, 6, 11];

/// Default neighbor radius, just over two center spacings so that all of
/// rings 1 and 2 fall strictly inside it.
pub fn default_neighbor_threshold<T: Real>(edge: T) -> T {
    T::lit(2.05) * center_spacing(edge)
}

/// Distance between centers of adjacent cells, `edge * sqrt(3)`.
pub fn center_spacing<T: Real>(edge: T) -> T {
    edge * T::lit(3.0).sqrt()
}

/// Bssid used for the `index`-th AP of a generated map.
pub fn generated_bssid(index: usize) -> String {
    format!(
        "02:00:00:00:{:02x}:{:02x}",
        (index >> 8) & 0xff,
        index & 0xff
    )
}

impl<T: Real> ApMap<T> {
    pub fn new(
        aps: Vec<AccessPoint<T>>,
        edge: T,
        orientation: Orientation,
        neighbor_threshold: T,
    ) -> Result<Self, TopologyError> {
        Self::with_tolerance(aps, edge, orientation, neighbor_threshold, T::lit(1e-6))
    }

    /// Like [`ApMap::new`] but allowing adjacent centers to sit up to
    /// `tolerance` meters closer than the ideal spacing.
    pub fn with_tolerance(
        aps: Vec<AccessPoint<T>>,
        edge: T,
        orientation: Orientation,
        neighbor_threshold: T,
        tolerance: T,
    ) -> Result<Self, TopologyError> {
        if !(edge > T::zero()) || !edge.is_finite() {
            return Err(TopologyError::InvalidEdge(edge.as_f64()));
        }
        if !(neighbor_threshold >= T::zero()) || !neighbor_threshold.is_finite() {
            return Err(TopologyError::InvalidThreshold(neighbor_threshold.as_f64()));
        }
        let min_gap = center_spacing(edge) - tolerance;
        for (i, ap) in aps.iter().enumerate() {
            if !(1..=14).contains(&ap.channel) {
                return Err(TopologyError::InvalidChannel {
                    bssid: ap.bssid.clone(),
                    channel: ap.channel,
                });
            }
            for other in &aps[..i] {
                if other.bssid == ap.bssid {
                    return Err(TopologyError::DuplicateBssid(ap.bssid.clone()));
                }
                let distance = other.center.distance(ap.center);
                if distance < min_gap {
                    return Err(TopologyError::OverlappingCells {
                        a: other.bssid.clone(),
                        b: ap.bssid.clone(),
                        distance: distance.as_f64(),
                    });
                }
            }
        }
        Ok(Self {
            aps,
            edge,
            orientation,
            neighbor_threshold,
        })
    }

    /// Central cell plus `rings` rings around it, centered on the origin.
    ///
    /// AP 0 sits at the origin; AP 1 is the first neighbor along the first
    /// edge normal (due east for [`Orientation::Pointy`]) and the rest
    /// follow counter-clockwise, ring by ring.
    pub fn hex_rings(
        rings: usize,
        edge: T,
        orientation: Orientation,
    ) -> Result<Self, TopologyError> {
        const DIRS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];
        let spacing = center_spacing(edge);
        let base = orientation.normal_offset::<T>();
        let a1 = PlanarCoord::from_polar(spacing, base);
        let a2 = PlanarCoord::from_polar(spacing, base + T::FRAC_PI_3());

        let mut axial = vec![(0i64, 0i64)];
        for k in 1..=rings as i64 {
            let mut hex = (DIRS[0].0 * k, DIRS[0].1 * k);
            for i in 0..6 {
                let step = DIRS[(i + 2) % 6];
                for _ in 0..k {
                    axial.push(hex);
                    hex = (hex.0 + step.0, hex.1 + step.1);
                }
            }
        }
        let aps = axial
            .iter()
            .enumerate()
            .map(|(idx, &(q, r))| AccessPoint {
                bssid: generated_bssid(idx),
                channel: RING_CHANNELS[(q - r).rem_euclid(3) as usize],
                center: a1 * T::lit(q as f64) + a2 * T::lit(r as f64),
                ssid: "hexhand".to_string(),
                prefix: format!("2001:db8:{idx:x}::/64"),
            })
            .collect();
        Self::new(aps, edge, orientation, default_neighbor_threshold(edge))
    }

    pub fn aps(&self) -> &[AccessPoint<T>] {
        &self.aps
    }

    pub fn edge(&self) -> T {
        self.edge
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn neighbor_threshold(&self) -> T {
        self.neighbor_threshold
    }

    pub fn with_neighbor_threshold(mut self, threshold: T) -> Result<Self, TopologyError> {
        if !(threshold >= T::zero()) || !threshold.is_finite() {
            return Err(TopologyError::InvalidThreshold(threshold.as_f64()));
        }
        self.neighbor_threshold = threshold;
        Ok(self)
    }

    pub fn get(&self, bssid: &str) -> Option<&AccessPoint<T>> {
        self.aps.iter().find(|ap| ap.bssid == bssid)
    }

    pub fn cell(&self, ap: &AccessPoint<T>) -> HexCell<T> {
        HexCell {
            center: ap.center,
            edge: self.edge,
            orientation: self.orientation,
        }
    }

    /// Every AP whose hexagon contains `p`, boundary included.
    pub fn covering(&self, p: PlanarCoord<T>) -> impl Iterator<Item = &AccessPoint<T>> + '_ {
        self.aps.iter().filter(move |ap| self.cell(ap).contains(p))
    }

    /// The AP whose cell contains `p`; on shared boundaries the smallest
    /// bssid wins.
    pub fn cell_of(&self, p: PlanarCoord<T>) -> Option<&AccessPoint<T>> {
        self.covering(p).min_by(|a, b| a.bssid.cmp(&b.bssid))
    }

    /// APs closer than the neighbor threshold, excluding the serving cell,
    /// nearest first.
    pub fn neighbors(&self, p: PlanarCoord<T>) -> Vec<&AccessPoint<T>> {
        let serving = self.cell_of(p).map(|ap| ap.bssid.as_str());
        let mut out: Vec<(T, &AccessPoint<T>)> = self
            .aps
            .iter()
            .filter(|ap| Some(ap.bssid.as_str()) != serving)
            .map(|ap| (ap.center.distance(p), ap))
            .filter(|(d, _)| *d < self.neighbor_threshold)
            .collect();
        out.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.1.bssid.cmp(&b.1.bssid))
        });
        out.into_iter().map(|(_, ap)| ap).collect()
    }
}
