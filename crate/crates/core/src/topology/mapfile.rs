//! Line-oriented AP map files.
//!
//! ```text
//! # comment
//! edge_m=231 orientation=pointy neighbor_threshold_m=947.19
//! 02:00:00:00:00:00,1,0,0,campus,2001:db8::/64
//! ```

use std::fmt::Write as _;

use crate::geo::PlanarCoord;
use crate::Real;

use super::{AccessPoint, ApMap, Orientation, TopologyError};

fn parse_err(line: usize, message: impl Into<String>) -> TopologyError {
    TopologyError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: Real>(line: usize, field: &str, raw: &str) -> Result<T, TopologyError> {
    let v: T = raw
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("{field}: malformed number {raw:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(
            line,
            format!("{field}: non-finite value {raw:?}"),
        ));
    }
    Ok(v)
}

pub fn parse_map<T: Real>(text: &str) -> Result<ApMap<T>, TopologyError> {
    let mut header: Option<(T, Orientation, T)> = None;
    let mut aps = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if header.is_none() {
            let (mut edge, mut orientation, mut threshold) = (None, None, None);
            for pair in line.split_whitespace() {
                let (key, value) = pair.split_once('=').ok_or_else(|| {
                    parse_err(line_no, format!("expected key=value, got {pair:?}"))
                })?;
                match key {
                    "edge_m" => edge = Some(parse_num::<T>(line_no, key, value)?),
                    "orientation" => {
                        orientation = Some(
                            value
                                .parse()
                                .map_err(|e: TopologyError| parse_err(line_no, e.to_string()))?,
                        )
                    }
                    "neighbor_threshold_m" => {
                        threshold = Some(parse_num::<T>(line_no, key, value)?)
                    }
                    other => {
                        return Err(parse_err(line_no, format!("unknown header key {other:?}")))
                    }
                }
            }
            let edge = edge.ok_or_else(|| parse_err(line_no, "header is missing edge_m"))?;
            let orientation =
                orientation.ok_or_else(|| parse_err(line_no, "header is missing orientation"))?;
            let threshold = threshold
                .ok_or_else(|| parse_err(line_no, "header is missing neighbor_threshold_m"))?;
            header = Some((edge, orientation, threshold));
            continue;
        }

        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(parse_err(
                line_no,
                format!(
                    "expected 6 fields bssid,channel,x_m,y_m,ssid,prefix, got {}",
                    fields.len()
                ),
            ));
        }
        let bssid = fields[0].trim();
        if bssid.is_empty() {
            return Err(parse_err(line_no, "empty bssid"));
        }
        let channel: u8 = fields[1].trim().parse().map_err(|_| {
            parse_err(
                line_no,
                format!("channel: malformed integer {:?}", fields[1]),
            )
        })?;
        aps.push(AccessPoint {
            bssid: bssid.to_string(),
            channel,
            center: PlanarCoord::new(
                parse_num(line_no, "x_m", fields[2])?,
                parse_num(line_no, "y_m", fields[3])?,
            ),
            ssid: fields[4].trim().to_string(),
            prefix: fields[5].trim().to_string(),
        });
    }

    let (edge, orientation, threshold) =
        header.ok_or_else(|| parse_err(0, "missing header line"))?;
    ApMap::new(aps, edge, orientation, threshold)
}

/// Serializes a map; `parse_map(render_map(m)) == m` for maps whose string
/// fields contain no commas or line breaks.
pub fn render_map<T: Real>(map: &ApMap<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "edge_m={} orientation={} neighbor_threshold_m={}",
        map.edge(),
        map.orientation(),
        map.neighbor_threshold()
    );
    let _ = writeln!(out, "# bssid,channel,x_m,y_m,ssid,prefix");
    for ap in map.aps() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            ap.bssid, ap.channel, ap.center.x, ap.center.y, ap.ssid, ap.prefix
        );
    }
    out
}
