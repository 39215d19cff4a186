//! CSV and summary renderers. Floats use Rust's shortest round-trip
//! formatting so the files parse back to the exact values.

use std::fmt::Display;
use std::io::{self, Write};

use crate::Real;

use super::{HandoffEvent, Metrics, TraceRow};

pub const TRACE_HEADER: &str =
    "t_ms,true_x,true_y,meas_x,meas_y,s_avg,d,lambda_x,lambda_y,pe_x,ne_x,pe_y,ne_y,err_x,err_y";

pub const EVENTS_HEADER: &str =
    "t_ms,x,y,cand_count,candidates,actual,correct,lat_sel_ms,lat_full_ms";

fn opt<T: Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_trace_csv<T: Real, W: Write>(rows: &[TraceRow<T>], mut w: W) -> io::Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t_ms,
            r.true_pos.x,
            r.true_pos.y,
            r.measured.x,
            r.measured.y,
            opt(r.s_avg),
            opt(r.d),
            opt(r.rates.map(|l| l.x)),
            opt(r.rates.map(|l| l.y)),
            r.pe_x,
            r.ne_x,
            r.pe_y,
            r.ne_y,
            opt(r.error.map(|e| e.x)),
            opt(r.error.map(|e| e.y)),
        )?;
    }
    Ok(())
}

/// Candidates are `;`-separated; `actual` is empty when the node never
/// left the cell.
pub fn write_events_csv<'a, T: Real, W: Write>(
    events: impl IntoIterator<Item = &'a HandoffEvent<T>>,
    mut w: W,
) -> io::Result<()> {
    writeln!(w, "{EVENTS_HEADER}")?;
    for e in events {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            e.t_ms,
            e.mn_pos.x,
            e.mn_pos.y,
            e.candidates.len(),
            e.candidates.join(";"),
            e.actual_next.as_deref().unwrap_or(""),
            e.correct,
            e.latency_selective,
            e.latency_full,
        )?;
    }
    Ok(())
}

/// `key=value` lines, one per metric.
pub fn render_summary<T: Real>(m: &Metrics<T>) -> String {
    let pairs: [(&str, String); 17] = [
        ("n_handoffs", m.n_handoffs.to_string()),
        ("n_correct", m.n_correct.to_string()),
        ("n_two_ap", m.n_two_ap.to_string()),
        ("n_fallback", m.n_fallback.to_string()),
        ("n_missed", m.n_missed.to_string()),
        ("max_candidates", m.max_candidates.to_string()),
        ("accuracy", m.accuracy.to_string()),
        ("two_ap_fraction", m.two_ap_fraction.to_string()),
        ("fallback_fraction", m.fallback_fraction.to_string()),
        ("missed_fraction", m.missed_fraction.to_string()),
        (
            "mean_latency_selective_ms",
            m.mean_latency_selective.to_string(),
        ),
        (
            "median_latency_selective_ms",
            m.median_latency_selective.to_string(),
        ),
        ("mean_latency_full_ms", m.mean_latency_full.to_string()),
        ("median_latency_full_ms", m.median_latency_full.to_string()),
        ("reduction_ratio", m.reduction_ratio.to_string()),
        ("n_advanced", m.n_advanced.to_string()),
        ("n_late", m.n_late.to_string()),
    ];
    pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}
