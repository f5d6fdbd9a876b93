//! Plain-text TSPTW instances.
//!
//! Three whitespace separated layouts are accepted. Lines whose first token
//! is not numeric (headers, `!!` comments) are skipped.
//!
//! 1. Customer rows `id x y demand ready due service`, one per city with the
//!    depot first, optionally terminated by a row with id `999`.
//! 2. `n`, then `n` rows of `n` travel times, then `n` rows `a b [service]`.
//! 3. `n`, then `n` rows `x y`, then `n` rows `a b [service]`.
//!
//! Travel times computed from coordinates are `floor(scale * euclid)`.
//! Windows, service times and matrix entries are multiplied by `scale` and
//! rounded to the nearest integer.

use crate::error::ParseError;
use crate::metric::Metric;

use super::{RawInstance, TimeWindowData};

struct Row {
    line: usize,
    vals: Vec<f64>,
}

fn numeric_rows(text: &str) -> Result<Vec<Row>, ParseError> {
    let mut rows = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let Some(first) = toks.first() else { continue };
        if first.parse::<f64>().is_err() {
            continue;
        }
        let mut vals = Vec::with_capacity(toks.len());
        for t in &toks {
            vals.push(
                t.parse::<f64>()
                    .map_err(|_| ParseError::new(k + 1, format!("expected a number, found {t:?}")))?,
            );
        }
        rows.push(Row { line: k + 1, vals });
    }
    Ok(rows)
}

fn scaled(v: f64, scale: f64) -> i64 {
    (v * scale).round() as i64
}

fn floor_euclid(a: (f64, f64), b: (f64, f64), scale: f64) -> i64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (scale * (dx * dx + dy * dy).sqrt()).floor() as i64
}

fn matrix_from_points(pts: &[(f64, f64)], scale: f64) -> Vec<i64> {
    let n = pts.len();
    let mut m = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[i * n + j] = floor_euclid(pts[i], pts[j], scale);
            }
        }
    }
    m
}

fn window_rows(rows: &[Row], n: usize, scale: f64) -> Result<TimeWindowData, ParseError> {
    if rows.len() != n {
        let line = rows.last().map_or(0, |r| r.line);
        return Err(ParseError::new(line, format!("{} time windows for {n} cities", rows.len())));
    }
    let mut windows = Vec::with_capacity(n);
    let mut service = Vec::with_capacity(n);
    for r in rows {
        if r.vals.len() < 2 || r.vals.len() > 3 {
            return Err(ParseError::new(r.line, "window rows are `a b [service]`"));
        }
        let a = scaled(r.vals[0], scale);
        let b = scaled(r.vals[1], scale);
        if a > b {
            return Err(ParseError::new(r.line, format!("inverted time window [{a}, {b}]")));
        }
        windows.push((a, b));
        service.push(r.vals.get(2).map_or(0, |&s| scaled(s, scale)));
    }
    let line = rows.first().map_or(0, |r| r.line);
    TimeWindowData::new(windows, service).map_err(|e| ParseError::new(line, e.message))
}

fn leading_count(row: &Row) -> Result<usize, ParseError> {
    let v = row.vals[0];
    if row.vals.len() != 1 || v.fract() != 0.0 || v < 0.0 {
        return Err(ParseError::new(row.line, "expected the city count on its own line"));
    }
    Ok(v as usize)
}

/// Parses a TSPTW file with `scale = 1`.
pub fn parse_tsptw(text: &str) -> Result<(RawInstance, TimeWindowData), ParseError> {
    parse_tsptw_scaled(text, 1.0)
}

pub fn parse_tsptw_scaled(text: &str, scale: f64) -> Result<(RawInstance, TimeWindowData), ParseError> {
    if !(scale > 0.0) {
        return Err(ParseError::new(0, "scale must be positive"));
    }
    let rows = numeric_rows(text)?;
    let Some(first) = rows.first() else {
        return Err(ParseError::new(0, "no numeric data"));
    };

    let (n, matrix, windows) = if first.vals.len() == 7 {
        let mut pts = Vec::new();
        let mut wrows = Vec::new();
        for r in &rows {
            if r.vals[0] == 999.0 {
                break;
            }
            if r.vals.len() != 7 {
                return Err(ParseError::new(r.line, "customer rows have 7 columns"));
            }
            pts.push((r.vals[1], r.vals[2]));
            wrows.push(Row {
                line: r.line,
                vals: vec![r.vals[4], r.vals[5], r.vals[6]],
            });
        }
        let n = pts.len();
        (n, matrix_from_points(&pts, scale), window_rows(&wrows, n, scale)?)
    } else {
        let n = leading_count(first)?;
        if n < 3 {
            return Err(ParseError::new(first.line, format!("dimension must be at least 3, got {n}")));
        }
        let body = &rows[1..];
        let Some(second) = body.first() else {
            return Err(ParseError::new(first.line, "missing cost data"));
        };
        if body.len() < n {
            return Err(ParseError::new(second.line, format!("expected {n} cost rows")));
        }
        let head = &body[..n];
        let matrix = if second.vals.len() == n {
            let mut m = Vec::with_capacity(n * n);
            for r in head {
                if r.vals.len() != n {
                    return Err(ParseError::new(r.line, format!("matrix rows have {n} entries")));
                }
                m.extend(r.vals.iter().map(|&v| scaled(v, scale)));
            }
            for i in 0..n {
                m[i * n + i] = 0;
            }
            if m.iter().any(|&v| v < 0) {
                return Err(ParseError::new(second.line, "negative travel time"));
            }
            m
        } else if second.vals.len() == 2 {
            let mut pts = Vec::with_capacity(n);
            for r in head {
                if r.vals.len() != 2 {
                    return Err(ParseError::new(r.line, "coordinate rows are `x y`"));
                }
                pts.push((r.vals[0], r.vals[1]));
            }
            matrix_from_points(&pts, scale)
        } else {
            return Err(ParseError::new(second.line, "expected a matrix row or an `x y` row"));
        };
        (n, matrix, window_rows(&body[n..], n, scale)?)
    };

    if n < 3 {
        return Err(ParseError::new(0, format!("dimension must be at least 3, got {n}")));
    }
    let raw = RawInstance {
        name: String::new(),
        dimension: n,
        metric: Metric::Explicit,
        coords: None,
        matrix: Some(matrix),
        comment: String::new(),
    };
    raw.check()?;
    Ok((raw, windows))
}

/// Reads a windows-only file: an optional count line, then one `a b [service]`
/// row per city.
pub fn parse_windows(text: &str, n: usize) -> Result<TimeWindowData, ParseError> {
    parse_windows_scaled(text, n, 1.0)
}

pub fn parse_windows_scaled(text: &str, n: usize, scale: f64) -> Result<TimeWindowData, ParseError> {
    let rows = numeric_rows(text)?;
    let body = match rows.first() {
        Some(r) if r.vals.len() == 1 => {
            let count = leading_count(r)?;
            if count != n {
                return Err(ParseError::new(r.line, format!("file lists {count} cities, instance has {n}")));
            }
            &rows[1..]
        }
        _ => &rows[..],
    };
    window_rows(body, n, scale)
}
