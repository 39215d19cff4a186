use crate::geo::PlanarCoord;
use crate::predictor::PredictedRange;
use crate::Real;

/// Outcome of one handoff.
#[derive(Debug, Clone, PartialEq)]
pub struct HandoffEvent<T> {
    pub t_ms: u64,
    /// Measured position when the handoff started.
    pub mn_pos: PlanarCoord<T>,
    /// `None` when the node crossed without the predictor firing.
    pub predicted: Option<PredictedRange<T>>,
    pub candidates: Vec<String>,
    /// First cell the true trajectory enters; `None` if it never leaves.
    pub actual_next: Option<String>,
    pub correct: bool,
    /// No candidate found; every channel was scanned.
    pub fallback: bool,
    /// The range was slid along the direction of travel to the cell edge
    /// before candidates were found.
    pub advanced: bool,
    /// The node crossed the boundary before the trigger fired.
    pub late: bool,
    pub n_scanned: u32,
    pub latency_selective: T,
    pub latency_full: T,
}

impl<T> HandoffEvent<T> {
    pub fn missed(&self) -> bool {
        self.predicted.is_none()
    }
}

/// Aggregate statistics over a list of events.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics<T> {
    pub n_handoffs: usize,
    pub n_correct: usize,
    pub n_two_ap: usize,
    pub n_fallback: usize,
    pub n_missed: usize,
    pub n_advanced: usize,
    pub n_late: usize,
    pub max_candidates: usize,
    pub accuracy: T,
    pub two_ap_fraction: T,
    pub fallback_fraction: T,
    pub missed_fraction: T,
    pub mean_latency_selective: T,
    pub median_latency_selective: T,
    pub mean_latency_full: T,
    pub median_latency_full: T,
    pub reduction_ratio: T,
}

fn median<T: Real>(mut v: Vec<T>) -> T {
    if v.is_empty() {
        return T::zero();
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::lit(2.0)
    }
}

impl<T: Real> Metrics<T> {
    /// Recomputes everything from the events; order does not matter.
    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a HandoffEvent<T>>) -> Self {
        let events: Vec<&HandoffEvent<T>> = events.into_iter().collect();
        let n = events.len();
        let count = |f: &dyn Fn(&HandoffEvent<T>) -> bool| events.iter().filter(|e| f(e)).count();
        let n_correct = count(&|e| e.correct);
        let n_two_ap = count(&|e| e.candidates.len() == 2);
        let n_fallback = count(&|e| e.fallback);
        let n_missed = count(&|e| e.missed());
        let n_advanced = count(&|e| e.advanced);
        let n_late = count(&|e| e.late);
        let frac = |k: usize| {
            if n == 0 {
                T::zero()
            } else {
                T::lit(k as f64) / T::lit(n as f64)
            }
        };
        let sel: Vec<T> = events.iter().map(|e| e.latency_selective).collect();
        let full: Vec<T> = events.iter().map(|e| e.latency_full).collect();
        let mean = |v: &[T]| {
            if v.is_empty() {
                T::zero()
            } else {
                v.iter().copied().sum::<T>() / T::lit(v.len() as f64)
            }
        };
        let mean_sel = mean(&sel);
        let mean_full = mean(&full);
        Self {
            n_handoffs: n,
            n_correct,
            n_two_ap,
            n_fallback,
            n_missed,
            n_advanced,
            n_late,
            max_candidates: events.iter().map(|e| e.candidates.len()).max().unwrap_or(0),
            accuracy: frac(n_correct),
            two_ap_fraction: frac(n_two_ap),
            fallback_fraction: frac(n_fallback),
            missed_fraction: frac(n_missed),
            mean_latency_selective: mean_sel,
            median_latency_selective: median(sel),
            mean_latency_full: mean_full,
            median_latency_full: median(full),
            reduction_ratio: if mean_sel > T::zero() {
                mean_full / mean_sel
            } else {
                T::one()
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(cands: &[&str], actual: &str, sel: f64) -> HandoffEvent<f64> {
        let candidates: Vec<String> = cands.iter().map(|s| s.to_string()).collect();
        HandoffEvent {
            t_ms: 0,
            mn_pos: PlanarCoord::new(0.0, 0.0),
            predicted: Some(PredictedRange::point(PlanarCoord::new(0.0, 0.0))),
            correct: candidates.iter().any(|c| c == actual),
            candidates,
            actual_next: Some(actual.to_string()),
            fallback: false,
            advanced: false,
            late: false,
            n_scanned: cands.len() as u32,
            latency_selective: sel,
            latency_full: 334.0,
        }
    }

    #[test]
    fn aggregates() {
        let events = vec![
            ev(&["a"], "a", 34.0),
            ev(&["a", "b"], "b", 64.0),
            ev(&["c"], "a", 34.0),
        ];
        let m = Metrics::from_events(&events);
        assert_eq!(m.n_handoffs, 3);
        assert!((m.accuracy - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.two_ap_fraction - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.median_latency_selective, 34.0);
        assert!((m.reduction_ratio - 334.0 / 44.0).abs() < 1e-12);
        let mut rev = events.clone();
        rev.reverse();
        assert_eq!(Metrics::from_events(&rev), m);
    }

    #[test]
    fn empty_is_well_defined() {
        let m = Metrics::<f64>::from_events(&[]);
        assert_eq!(m.n_handoffs, 0);
        assert_eq!(m.accuracy, 0.0);
        assert_eq!(m.reduction_ratio, 1.0);
    }
}
