//! File formats: CSV tables and JSON reports.
//!
//! All numeric output uses Rust's shortest round-trip decimal formatting
//! with `.` as the separator, so files are locale-free and re-parse to the
//! exact same bits.

use crate::error::{Error, Result};
use crate::projection::ProjectionEstimate;
use crate::selection::SelectionResult;
use crate::sim::{IncrementSeries, Jump, JumpSet};
use std::fmt::Write as _;
use std::path::Path;

/// `time,size` rows.
pub fn jumps_to_csv(jumps: &JumpSet) -> String {
    let mut out = String::from("time,size\n");
    for j in &jumps.jumps {
        let _ = writeln!(out, "{},{}", j.time, j.size);
    }
    out
}

/// `k,t,increment` rows with `t` the right endpoint of step `k` (1-based).
pub fn increments_to_csv(series: &IncrementSeries) -> String {
    let mut out = String::from("k,t,increment\n");
    let dt = series.dt();
    for (k, x) in series.increments.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", k + 1, (k + 1) as f64 * dt, x);
    }
    out
}

fn parse_f64(field: &str, line_no: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Data(format!("line {line_no}: cannot parse `{field}` as a number")))
}

/// Parse a `time,size` CSV produced by [`jumps_to_csv`].
pub fn jumps_from_csv(text: &str, horizon: f64) -> Result<JumpSet> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "time,size" => {}
        _ => return Err(Error::Data("expected header `time,size`".to_string())),
    }
    let mut jumps = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let (Some(t), Some(s), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Data(format!("line {}: expected 2 fields", idx + 1)));
        };
        jumps.push(Jump { time: parse_f64(t, idx + 1)?, size: parse_f64(s, idx + 1)? });
    }
    JumpSet::new(horizon, jumps).map_err(|e| Error::Data(e.to_string()))
}

/// Parse a `k,t,increment` CSV produced by [`increments_to_csv`]. The
/// horizon is inferred from the last `t` column.
pub fn increments_from_csv(text: &str) -> Result<IncrementSeries> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "k,t,increment" => {}
        _ => return Err(Error::Data("expected header `k,t,increment`".to_string())),
    }
    let mut increments = Vec::new();
    let mut last_t = 0.0;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let (Some(k), Some(t), Some(x), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(Error::Data(format!("line {}: expected 3 fields", idx + 1)));
        };
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| Error::Data(format!("line {}: bad index `{k}`", idx + 1)))?;
        if k != increments.len() + 1 {
            return Err(Error::Data(format!("line {}: indices must be 1,2,...", idx + 1)));
        }
        last_t = parse_f64(t, idx + 1)?;
        increments.push(parse_f64(x, idx + 1)?);
    }
    IncrementSeries::new(last_t, increments).map_err(|e| Error::Data(e.to_string()))
}

/// `x_left,x_right,coeff,value_at_mid` rows, one per basis function.
pub fn estimate_to_csv(estimate: &ProjectionEstimate) -> String {
    let mut out = String::from("x_left,x_right,coeff,value_at_mid\n");
    let cuts = estimate.model.cutpoints();
    for (i, w) in cuts.windows(2).enumerate() {
        let mid = 0.5 * (w[0] + w[1]);
        let _ = writeln!(out, "{},{},{},{}", w[0], w[1], estimate.coefficients[i], estimate.value_at(mid));
    }
    out
}

/// Parse the `(mid, value)` pairs out of an estimate CSV, for parametric
/// fits on externally produced estimates.
pub fn estimate_points_from_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "x_left,x_right,coeff,value_at_mid" => {}
        _ => return Err(Error::Data("expected header `x_left,x_right,coeff,value_at_mid`".to_string())),
    }
    let mut pts = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Data(format!("line {}: expected 4 fields", idx + 1)));
        }
        let lo = parse_f64(fields[0], idx + 1)?;
        let hi = parse_f64(fields[1], idx + 1)?;
        let v = parse_f64(fields[3], idx + 1)?;
        pts.push((0.5 * (lo + hi), v));
    }
    Ok(pts)
}

/// `m,d_m,D_m,contrast,penalty,score,chosen` rows; `m` is the index of the
/// model inside its collection (1-based).
pub fn selection_to_csv(result: &SelectionResult) -> String {
    let mut out = String::from("m,d_m,D_m,contrast,penalty,score,chosen\n");
    for row in &result.table {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.index + 1,
            row.dim,
            row.sup_constant,
            row.contrast,
            row.penalty,
            row.score,
            row.chosen as u8
        );
    }
    out
}

/// Overlay table `x,estimate,truth` for plotting against a known density.
pub fn overlay_to_csv(
    estimate: &ProjectionEstimate,
    truth: impl Fn(f64) -> f64,
    points_per_bin: usize,
) -> String {
    let mut out = String::from("x,estimate,truth\n");
    let cuts = estimate.model.cutpoints();
    for w in cuts.windows(2) {
        for k in 0..points_per_bin {
            let x = w[0] + (w[1] - w[0]) * (k as f64 + 0.5) / points_per_bin as f64;
            let _ = writeln!(out, "{},{},{}", x, estimate.value_at(x), truth(x));
        }
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Jump;

    #[test]
    fn jump_csv_roundtrip_is_exact() {
        let set = JumpSet::new(
            2.0,
            vec![
                Jump { time: 0.123456789123456, size: 1.0 / 3.0 },
                Jump { time: 1.5, size: -2.75e-11 },
            ],
        )
        .unwrap();
        let text = jumps_to_csv(&set);
        let back = jumps_from_csv(&text, 2.0).unwrap();
        assert_eq!(set, back);
    }

    #[test]
    fn increment_csv_roundtrip_is_exact() {
        let s = IncrementSeries::new(3.0, vec![0.1, -0.5, 7e-17, 2.0]).unwrap();
        let text = increments_to_csv(&s);
        let back = increments_from_csv(&text).unwrap();
        assert_eq!(s.increments, back.increments);
        assert_eq!(s.horizon, back.horizon);
    }

    #[test]
    fn malformed_csv_is_a_data_error() {
        assert!(matches!(jumps_from_csv("nope\n1,2\n", 1.0), Err(Error::Data(_))));
        assert!(matches!(jumps_from_csv("time,size\n0.5,abc\n", 1.0), Err(Error::Data(_))));
        assert!(matches!(increments_from_csv("k,t,increment\n2,0.5,1\n"), Err(Error::Data(_))));
    }
}
