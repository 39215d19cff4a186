use std::fmt;
use std::str::FromStr;

use crate::geo::PlanarCoord;
use crate::Real;

use super::TopologyError;

/// Which way the hexagons sit.
///
/// `Pointy` has a vertex at the top and vertical edges east and west, so the
/// first neighbor lies due east. `Flat` has horizontal edges at top and
/// bottom, and the first neighbor lies at 30 degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    Flat,
    #[default]
    Pointy,
}

impl Orientation {
    /// Angle of the first edge normal, radians from east.
    pub fn normal_offset<T: Real>(self) -> T {
        match self {
            Orientation::Pointy => T::zero(),
            Orientation::Flat => T::FRAC_PI_6(),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Flat => "flat",
            Orientation::Pointy => "pointy",
        })
    }
}

impl FromStr for Orientation {
    type Err = TopologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flat" => Ok(Orientation::Flat),
            "pointy" => Ok(Orientation::Pointy),
            other => Err(TopologyError::UnknownOrientation(other.to_string())),
        }
    }
}

/// Regular hexagonal coverage area of one AP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexCell<T> {
    pub center: PlanarCoord<T>,
    pub edge: T,
    pub orientation: Orientation,
}

impl<T: Real> HexCell<T> {
    pub fn new(
        center: PlanarCoord<T>,
        edge: T,
        orientation: Orientation,
    ) -> Result<Self, TopologyError> {
        if !(edge > T::zero()) || !edge.is_finite() {
            return Err(TopologyError::InvalidEdge(edge.as_f64()));
        }
        Ok(Self {
            center,
            edge,
            orientation,
        })
    }

    /// Center-to-edge distance, `edge * sqrt(3) / 2`.
    pub fn apothem(&self) -> T {
        apothem(self.edge)
    }

    /// Outward unit normals of the six edges, counter-clockwise.
    pub fn normals(&self) -> [PlanarCoord<T>; 6] {
        let base = self.orientation.normal_offset::<T>();
        let step = T::FRAC_PI_3();
        std::array::from_fn(|k| {
            let a = base + step * T::lit(k as f64);
            PlanarCoord::new(a.cos(), a.sin())
        })
    }

    /// Corners, counter-clockwise, each at distance `edge` from the center.
    pub fn vertices(&self) -> [PlanarCoord<T>; 6] {
        let base = self.orientation.normal_offset::<T>() + T::FRAC_PI_6();
        let step = T::FRAC_PI_3();
        std::array::from_fn(|k| {
            let a = base + step * T::lit(k as f64);
            self.center + PlanarCoord::from_polar(self.edge, a)
        })
    }

    fn tolerance(&self) -> T {
        T::boundary_eps() * (T::one() + self.edge)
    }

    /// Largest projection of `p - center` onto an edge normal.
    fn max_projection(&self, p: PlanarCoord<T>) -> T {
        let d = p - self.center;
        self.normals()
            .iter()
            .map(|n| n.dot(d))
            .fold(T::neg_infinity(), T::max)
    }

    /// Inside or on the boundary.
    pub fn contains(&self, p: PlanarCoord<T>) -> bool {
        let d = p - self.center;
        let reach = self.edge + self.tolerance();
        if d.dot(d) > reach * reach {
            return false;
        }
        self.max_projection(p) <= self.apothem() + self.tolerance()
    }

    /// Shortest distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, p: PlanarCoord<T>) -> Result<T, TopologyError> {
        if !self.contains(p) {
            return Err(TopologyError::OutsideCell);
        }
        // for a convex polygon the nearest boundary point lies on the
        // nearest supporting line
        Ok((self.apothem() - self.max_projection(p)).max(T::zero()))
    }

    /// Distance from an interior point to the boundary along `dir`.
    pub fn exit_distance(&self, p: PlanarCoord<T>, dir: PlanarCoord<T>) -> Option<T> {
        let len = dir.norm();
        if !(len > T::zero()) {
            return None;
        }
        let u = dir * (T::one() / len);
        let d = p - self.center;
        let a = self.apothem();
        self.normals()
            .iter()
            .filter_map(|n| {
                let closing = n.dot(u);
                (closing > T::zero()).then(|| ((a - n.dot(d)) / closing).max(T::zero()))
            })
            .fold(None, |best, t| Some(best.map_or(t, |b: T| b.min(t))))
    }
}

pub fn apothem<T: Real>(edge: T) -> T {
    edge * T::lit(3.0).sqrt() / T::lit(2.0)
}
