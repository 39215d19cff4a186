//! Ground-truth trajectories of the mobile node.
//!
//! Every kind is compiled into a list of timed segments (straight line,
//! circular arc or hold) so that positions are evaluated analytically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geo::{wrap_angle, PlanarCoord};
use crate::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MobilityError {
    #[error("speeds must be finite and >= 0")]
    InvalidSpeed,
    #[error("piecewise trajectory needs at least one waypoint")]
    NoWaypoints,
    #[error("duration must be finite and > 0")]
    InvalidDuration,
    #[error("arc radius must be finite and non-zero")]
    InvalidRadius,
    #[error("random-waypoint area is empty or speed range inverted")]
    InvalidArea,
    #[error("t = {t} ms outside [0, {duration}] ms")]
    TimeOutOfRange { t: f64, duration: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint<T> {
    pub position: PlanarCoord<T>,
    /// Speed on the leg that ends at this waypoint, m/s.
    pub speed_mps: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryKind<T> {
    Straight {
        start: PlanarCoord<T>,
        heading: T,
        speed_mps: T,
    },
    Piecewise {
        start: PlanarCoord<T>,
        waypoints: Vec<Waypoint<T>>,
    },
    RandomWaypoint {
        start: PlanarCoord<T>,
        area_min: PlanarCoord<T>,
        area_max: PlanarCoord<T>,
        v_min_mps: T,
        v_max_mps: T,
        pause_ms: T,
        seed: u64,
    },
    /// Constant-speed circle; positive radius turns left (counter-clockwise).
    Arc {
        start: PlanarCoord<T>,
        heading: T,
        speed_mps: T,
        radius: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Motion<T> {
    Line {
        from: PlanarCoord<T>,
        velocity: PlanarCoord<T>,
    },
    Arc {
        center: PlanarCoord<T>,
        radius: T,
        phase: T,
        omega: T,
    },
    Hold {
        at: PlanarCoord<T>,
        heading: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment<T> {
    t0: T,
    motion: Motion<T>,
}

impl<T: Real> Segment<T> {
    fn position(&self, t: T) -> PlanarCoord<T> {
        let dt = t - self.t0;
        match self.motion {
            Motion::Line { from, velocity } => from + velocity * dt,
            Motion::Arc {
                center,
                radius,
                phase,
                omega,
            } => center + PlanarCoord::from_polar(radius.abs(), phase + omega * dt),
            Motion::Hold { at, .. } => at,
        }
    }

    fn heading(&self, t: T) -> T {
        let dt = t - self.t0;
        match self.motion {
            Motion::Line { velocity, .. } => velocity.y.atan2(velocity.x),
            Motion::Arc {
                radius,
                phase,
                omega,
                ..
            } => wrap_angle(phase + omega * dt + T::FRAC_PI_2() * radius.signum()),
            Motion::Hold { heading, .. } => heading,
        }
    }
}

/// A trajectory over `[0, duration_ms]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    kind: TrajectoryKind<T>,
    duration_ms: T,
    segments: Vec<Segment<T>>,
}

fn mps<T: Real>(v: T) -> T {
    v / T::lit(1000.0)
}

fn valid_speed<T: Real>(v: T) -> Result<(), MobilityError> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(MobilityError::InvalidSpeed)
    }
}

impl<T: Real> Trajectory<T> {
    pub fn new(kind: TrajectoryKind<T>, duration_ms: T) -> Result<Self, MobilityError> {
        if !(duration_ms > T::zero()) || !duration_ms.is_finite() {
            return Err(MobilityError::InvalidDuration);
        }
        let segments = match &kind {
            TrajectoryKind::Straight {
                start,
                heading,
                speed_mps,
            } => {
                valid_speed(*speed_mps)?;
                vec![Segment {
                    t0: T::zero(),
                    motion: Motion::Line {
                        from: *start,
                        velocity: PlanarCoord::from_polar(mps(*speed_mps), *heading),
                    },
                }]
            }
            TrajectoryKind::Piecewise { start, waypoints } => {
                if waypoints.is_empty() {
                    return Err(MobilityError::NoWaypoints);
                }
                for w in waypoints {
                    valid_speed(w.speed_mps)?;
                }
                legs(
                    *start,
                    T::zero(),
                    waypoints
                        .iter()
                        .map(|w| (w.position, w.speed_mps, T::zero())),
                )
            }
            TrajectoryKind::RandomWaypoint {
                start,
                area_min,
                area_max,
                v_min_mps,
                v_max_mps,
                pause_ms,
                seed,
            } => {
                valid_speed(*v_min_mps)?;
                valid_speed(*v_max_mps)?;
                if !(area_max.x > area_min.x && area_max.y > area_min.y)
                    || !(v_max_mps >= v_min_mps)
                    || !(*v_max_mps > T::zero())
                    || !(*pause_ms >= T::zero())
                {
                    return Err(MobilityError::InvalidArea);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut plan = Vec::new();
                let mut here = *start;
                let mut t = T::zero();
                while t < duration_ms {
                    let target = PlanarCoord::new(
                        T::lit(rng.random_range(area_min.x.as_f64()..=area_max.x.as_f64())),
                        T::lit(rng.random_range(area_min.y.as_f64()..=area_max.y.as_f64())),
                    );
                    let v = if v_max_mps > v_min_mps {
                        T::lit(rng.random_range(v_min_mps.as_f64()..v_max_mps.as_f64()))
                    } else {
                        *v_max_mps
                    };
                    let v = v.max(T::lit(1e-3));
                    t = t + here.distance(target) / mps(v) + *pause_ms;
                    plan.push((target, v, *pause_ms));
                    here = target;
                }
                legs(*start, T::zero(), plan.into_iter())
            }
            TrajectoryKind::Arc {
                start,
                heading,
                speed_mps,
                radius,
            } => {
                valid_speed(*speed_mps)?;
                if *radius == T::zero() || !radius.is_finite() {
                    return Err(MobilityError::InvalidRadius);
                }
                let left = PlanarCoord::new(-heading.sin(), heading.cos());
                let center = *start + left * *radius;
                let phase = *heading - T::FRAC_PI_2() * radius.signum();
                vec![Segment {
                    t0: T::zero(),
                    motion: Motion::Arc {
                        center,
                        radius: *radius,
                        phase,
                        omega: mps(*speed_mps) / *radius,
                    },
                }]
            }
        };
        Ok(Self {
            kind,
            duration_ms,
            segments,
        })
    }

    pub fn straight(
        start: PlanarCoord<T>,
        heading: T,
        speed_mps: T,
        duration_ms: T,
    ) -> Result<Self, MobilityError> {
        Self::new(
            TrajectoryKind::Straight {
                start,
                heading,
                speed_mps,
            },
            duration_ms,
        )
    }

    pub fn kind(&self) -> &TrajectoryKind<T> {
        &self.kind
    }

    pub fn duration_ms(&self) -> T {
        self.duration_ms
    }

    fn segment(&self, t: T) -> Result<&Segment<T>, MobilityError> {
        if !(t >= T::zero() && t <= self.duration_ms) {
            return Err(MobilityError::TimeOutOfRange {
                t: t.as_f64(),
                duration: self.duration_ms.as_f64(),
            });
        }
        let idx = self.segments.partition_point(|s| s.t0 <= t);
        Ok(&self.segments[idx.saturating_sub(1)])
    }

    pub fn position_at(&self, t_ms: T) -> Result<PlanarCoord<T>, MobilityError> {
        Ok(self.segment(t_ms)?.position(t_ms))
    }

    /// Direction of travel in `(-pi, pi]`; while holding, the last heading.
    pub fn heading_at(&self, t_ms: T) -> Result<T, MobilityError> {
        Ok(self.segment(t_ms)?.heading(t_ms))
    }
}

/// Line segments through `(target, speed_mps, pause_ms)` stops.
fn legs<T: Real>(
    start: PlanarCoord<T>,
    t_start: T,
    stops: impl Iterator<Item = (PlanarCoord<T>, T, T)>,
) -> Vec<Segment<T>> {
    let mut out = Vec::new();
    let mut here = start;
    let mut t = t_start;
    let mut heading = T::zero();
    for (target, speed, pause) in stops {
        let delta = target - here;
        let len = delta.norm();
        let v = mps(speed);
        if len > T::zero() && v > T::zero() {
            heading = delta.y.atan2(delta.x);
            out.push(Segment {
                t0: t,
                motion: Motion::Line {
                    from: here,
                    velocity: delta * (v / len),
                },
            });
            t = t + len / v;
            here = target;
        }
        if pause > T::zero() {
            out.push(Segment {
                t0: t,
                motion: Motion::Hold { at: here, heading },
            });
            t = t + pause;
        }
    }
    out.push(Segment {
        t0: t,
        motion: Motion::Hold { at: here, heading },
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn path_length(tr: &Trajectory<f64>, t1: f64, t2: f64, dt: f64) -> f64 {
        let mut prev = tr.position_at(t1).unwrap();
        let mut len = 0.0;
        let mut t = t1;
        while t < t2 {
            t = (t + dt).min(t2);
            let p = tr.position_at(t).unwrap();
            len += p.distance(prev);
            prev = p;
        }
        len
    }

    #[test]
    fn straight_east() {
        let tr = Trajectory::straight(PlanarCoord::new(0.0, 0.0), 0.0, 19.0222, 5000.0).unwrap();
        let p = tr.position_at(1000.0).unwrap();
        assert_relative_eq!(p.x, 19.0222, epsilon = 1e-12);
        assert_eq!(p.y, 0.0);
        assert_eq!(tr.heading_at(300.0).unwrap(), 0.0);
        assert_eq!(tr.position_at(0.0).unwrap(), PlanarCoord::new(0.0, 0.0));
    }

    #[test]
    fn time_range_enforced() {
        let tr = Trajectory::straight(PlanarCoord::new(0.0, 0.0), 0.0, 10.0, 100.0).unwrap();
        assert!(tr.position_at(-1.0).is_err());
        assert!(tr.position_at(100.5).is_err());
        assert!(tr.position_at(100.0).is_ok());
    }

    #[test]
    fn construction_errors() {
        let o = PlanarCoord::new(0.0, 0.0);
        assert_eq!(
            Trajectory::straight(o, 0.0, -1.0, 10.0),
            Err(MobilityError::InvalidSpeed)
        );
        assert_eq!(
            Trajectory::straight(o, 0.0, 1.0, 0.0),
            Err(MobilityError::InvalidDuration)
        );
        assert_eq!(
            Trajectory::new(
                TrajectoryKind::Piecewise {
                    start: o,
                    waypoints: vec![]
                },
                10.0
            ),
            Err(MobilityError::NoWaypoints)
        );
        assert_eq!(
            Trajectory::new(
                TrajectoryKind::Arc {
                    start: o,
                    heading: 0.0,
                    speed_mps: 1.0,
                    radius: 0.0
                },
                10.0
            ),
            Err(MobilityError::InvalidRadius)
        );
    }

    #[test]
    fn piecewise_single_waypoint_at_start_holds() {
        let s = PlanarCoord::new(4.0, -2.0);
        let tr = Trajectory::new(
            TrajectoryKind::Piecewise {
                start: s,
                waypoints: vec![Waypoint {
                    position: s,
                    speed_mps: 10.0,
                }],
            },
            1000.0,
        )
        .unwrap();
        for t in [0.0, 10.0, 999.0, 1000.0] {
            assert_eq!(tr.position_at(t).unwrap(), s);
        }
    }

    #[test]
    fn piecewise_corners() {
        let tr = Trajectory::new(
            TrajectoryKind::Piecewise {
                start: PlanarCoord::new(0.0, 0.0),
                waypoints: vec![
                    Waypoint {
                        position: PlanarCoord::new(10.0, 0.0),
                        speed_mps: 10.0,
                    },
                    Waypoint {
                        position: PlanarCoord::new(10.0, 20.0),
                        speed_mps: 20.0,
                    },
                ],
            },
            5000.0,
        )
        .unwrap();
        assert_relative_eq!(tr.position_at(500.0).unwrap().x, 5.0, epsilon = 1e-12);
        let p = tr.position_at(1500.0).unwrap();
        assert_relative_eq!(p.y, 10.0, epsilon = 1e-9);
        assert_relative_eq!(tr.heading_at(1500.0).unwrap(), FRAC_PI_2, epsilon = 1e-12);
        assert_eq!(
            tr.position_at(4000.0).unwrap(),
            PlanarCoord::new(10.0, 20.0)
        );
        assert_relative_eq!(tr.heading_at(4000.0).unwrap(), FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn arc_quarter_turn() {
        let r = 100.0;
        let v = 10.0;
        let quarter_ms = (PI / 2.0 * r) / v * 1000.0;
        let tr = Trajectory::new(
            TrajectoryKind::Arc {
                start: PlanarCoord::new(0.0, 0.0),
                heading: 0.0,
                speed_mps: v,
                radius: r,
            },
            quarter_ms,
        )
        .unwrap();
        assert_relative_eq!(tr.heading_at(0.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(
            tr.heading_at(quarter_ms).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-9
        );
        let end = tr.position_at(quarter_ms).unwrap();
        assert_relative_eq!(end.x, r, epsilon = 1e-9);
        assert_relative_eq!(end.y, r, epsilon = 1e-9);
        let right = Trajectory::new(
            TrajectoryKind::Arc {
                start: PlanarCoord::new(0.0, 0.0),
                heading: 0.0,
                speed_mps: v,
                radius: -r,
            },
            quarter_ms,
        )
        .unwrap();
        assert_relative_eq!(
            right.heading_at(quarter_ms).unwrap(),
            -FRAC_PI_2,
            epsilon = 1e-9
        );
    }

    fn finite_difference_heading(tr: &Trajectory<f64>, t: f64) -> f64 {
        let h = 1e-3;
        let a = tr.position_at(t - h).unwrap();
        let b = tr.position_at(t + h).unwrap();
        (b.y - a.y).atan2(b.x - a.x)
    }

    fn angle_diff(a: f64, b: f64) -> f64 {
        wrap_angle(a - b).abs()
    }

    #[test]
    fn heading_matches_finite_differences() {
        let arc = Trajectory::new(
            TrajectoryKind::Arc {
                start: PlanarCoord::new(5.0, 5.0),
                heading: 0.3,
                speed_mps: 15.0,
                radius: 80.0,
            },
            60_000.0,
        )
        .unwrap();
        let rwp = Trajectory::new(
            TrajectoryKind::RandomWaypoint {
                start: PlanarCoord::new(0.0, 0.0),
                area_min: PlanarCoord::new(-500.0, -500.0),
                area_max: PlanarCoord::new(500.0, 500.0),
                v_min_mps: 5.0,
                v_max_mps: 30.0,
                pause_ms: 0.0,
                seed: 11,
            },
            120_000.0,
        )
        .unwrap();
        for k in 1..200 {
            let t = k as f64 * 287.3;
            assert!(
                angle_diff(
                    arc.heading_at(t).unwrap(),
                    finite_difference_heading(&arc, t)
                ) < 1e-6
            );
            // skip samples next to waypoint corners
            let seg = rwp.segment(t).unwrap();
            let next = rwp
                .segments
                .iter()
                .find(|s| s.t0 > seg.t0)
                .map_or(f64::INFINITY, |s| s.t0);
            if t - seg.t0 > 1.0 && next - t > 1.0 {
                assert!(
                    angle_diff(
                        rwp.heading_at(t).unwrap(),
                        finite_difference_heading(&rwp, t)
                    ) < 1e-6
                );
            }
        }
    }

    #[test]
    fn path_length_converges_to_speed_integral() {
        let arc = Trajectory::new(
            TrajectoryKind::Arc {
                start: PlanarCoord::new(0.0, 0.0),
                heading: 1.0,
                speed_mps: 19.0222,
                radius: 40.0,
            },
            20_000.0,
        )
        .unwrap();
        let len = path_length(&arc, 1000.0, 9000.0, 1.0);
        assert!((len / (19.0222 * 8.0) - 1.0).abs() < 1e-3);
        let tr = Trajectory::new(
            TrajectoryKind::Piecewise {
                start: PlanarCoord::new(0.0, 0.0),
                waypoints: vec![
                    Waypoint {
                        position: PlanarCoord::new(100.0, 0.0),
                        speed_mps: 10.0,
                    },
                    Waypoint {
                        position: PlanarCoord::new(100.0, 100.0),
                        speed_mps: 10.0,
                    },
                ],
            },
            20_000.0,
        )
        .unwrap();
        assert!((path_length(&tr, 0.0, 20_000.0, 1.0) / 200.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn random_waypoint_is_reproducible_and_bounded() {
        let mk = |seed| {
            Trajectory::new(
                TrajectoryKind::RandomWaypoint {
                    start: PlanarCoord::new(0.0, 0.0),
                    area_min: PlanarCoord::new(-200.0, -100.0),
                    area_max: PlanarCoord::new(200.0, 100.0),
                    v_min_mps: 5.0,
                    v_max_mps: 10.0,
                    pause_ms: 500.0,
                    seed,
                },
                300_000.0,
            )
            .unwrap()
        };
        let (a, b, c) = (mk(7), mk(7), mk(8));
        assert_eq!(a, b);
        assert_ne!(a, c);
        for k in 0..=3000 {
            let p = a.position_at(k as f64 * 100.0).unwrap();
            assert!(p.x.abs() <= 200.0 + 1e-9 && p.y.abs() <= 100.0 + 1e-9);
        }
    }
}
