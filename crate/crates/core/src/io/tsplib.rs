use log::warn;

use crate::error::ParseError;
use crate::metric::Metric;

use super::RawInstance;

#[derive(Clone, Copy, PartialEq, Eq)]
enum WeightFormat {
    FullMatrix,
    UpperRow,
    LowerDiagRow,
}

fn header_value<'a>(line: &'a str) -> (&'a str, &'a str) {
    match line.split_once(':') {
        Some((k, v)) => (k.trim(), v.trim()),
        None => {
            let mut it = line.splitn(2, char::is_whitespace);
            let k = it.next().unwrap_or("").trim();
            (k, it.next().unwrap_or("").trim())
        }
    }
}

fn parse_number(tok: &str, line: usize) -> Result<f64, ParseError> {
    tok.parse::<f64>()
        .map_err(|_| ParseError::new(line, format!("expected a number, found {tok:?}")))
}

/// Parses a TSPLIB `.tsp` file with a NODE_COORD_SECTION or an
/// EDGE_WEIGHT_SECTION (FULL_MATRIX, UPPER_ROW or LOWER_DIAG_ROW).
pub fn parse_tsplib(text: &str) -> Result<RawInstance, ParseError> {
    let mut name = String::new();
    let mut comment = String::new();
    let mut dimension: Option<usize> = None;
    let mut metric: Option<Metric> = None;
    let mut format: Option<WeightFormat> = None;
    let mut coords: Option<Vec<(f64, f64)>> = None;
    let mut matrix: Option<Vec<i64>> = None;

    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let lineno = i + 1;
        let line = lines[i].trim();
        i += 1;
        if line.is_empty() {
            continue;
        }
        let (key, value) = header_value(line);
        match key {
            "NAME" => name = value.to_string(),
            "COMMENT" => {
                if !comment.is_empty() {
                    comment.push('\n');
                }
                comment.push_str(value);
            }
            "TYPE" => match value {
                "TSP" | "ATSP" => {}
                other => return Err(ParseError::new(lineno, format!("unsupported problem type {other:?}"))),
            },
            "DIMENSION" => {
                let d = value
                    .parse::<usize>()
                    .map_err(|_| ParseError::new(lineno, format!("bad DIMENSION {value:?}")))?;
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => {
                metric = Some(
                    Metric::from_keyword(value)
                        .ok_or_else(|| ParseError::new(lineno, format!("unsupported EDGE_WEIGHT_TYPE {value:?}")))?,
                );
            }
            "EDGE_WEIGHT_FORMAT" => {
                format = Some(match value {
                    "FULL_MATRIX" => WeightFormat::FullMatrix,
                    "UPPER_ROW" => WeightFormat::UpperRow,
                    "LOWER_DIAG_ROW" => WeightFormat::LowerDiagRow,
                    "FUNCTION" => continue,
                    other => {
                        return Err(ParseError::new(lineno, format!("unsupported EDGE_WEIGHT_FORMAT {other:?}")))
                    }
                });
            }
            "NODE_COORD_TYPE" | "DISPLAY_DATA_TYPE" => {}
            "NODE_COORD_SECTION" => {
                let n = dimension.ok_or_else(|| ParseError::new(lineno, "NODE_COORD_SECTION before DIMENSION"))?;
                let mut c = vec![None; n];
                for _ in 0..n {
                    let Some(raw) = lines.get(i) else {
                        return Err(ParseError::new(i + 1, format!("expected {n} coordinate lines")));
                    };
                    let toks: Vec<&str> = raw.split_whitespace().collect();
                    if toks.len() < 3 {
                        return Err(ParseError::new(i + 1, format!("malformed coordinate line {raw:?}")));
                    }
                    let id = toks[0]
                        .parse::<usize>()
                        .map_err(|_| ParseError::new(i + 1, format!("bad node id {:?}", toks[0])))?;
                    if id == 0 || id > n {
                        return Err(ParseError::new(i + 1, format!("node id {id} outside 1..={n}")));
                    }
                    let x = parse_number(toks[1], i + 1)?;
                    let y = parse_number(toks[2], i + 1)?;
                    if c[id - 1].replace((x, y)).is_some() {
                        return Err(ParseError::new(i + 1, format!("node {id} listed twice")));
                    }
                    i += 1;
                }
                coords = Some(c.into_iter().map(|p| p.unwrap()).collect());
            }
            "EDGE_WEIGHT_SECTION" => {
                let n = dimension.ok_or_else(|| ParseError::new(lineno, "EDGE_WEIGHT_SECTION before DIMENSION"))?;
                let fmt = format.ok_or_else(|| ParseError::new(lineno, "EDGE_WEIGHT_SECTION without EDGE_WEIGHT_FORMAT"))?;
                let needed = match fmt {
                    WeightFormat::FullMatrix => n * n,
                    WeightFormat::UpperRow => n * (n - 1) / 2,
                    WeightFormat::LowerDiagRow => n * (n + 1) / 2,
                };
                let mut vals: Vec<i64> = Vec::with_capacity(needed);
                while vals.len() < needed {
                    let Some(raw) = lines.get(i) else {
                        return Err(ParseError::new(
                            i,
                            format!("EDGE_WEIGHT_SECTION holds {} of {needed} weights", vals.len()),
                        ));
                    };
                    for tok in raw.split_whitespace() {
                        let v = parse_number(tok, i + 1)?;
                        vals.push(v.round() as i64);
                    }
                    i += 1;
                }
                if vals.len() != needed {
                    return Err(ParseError::new(i, format!("EDGE_WEIGHT_SECTION holds {} weights, expected {needed}", vals.len())));
                }
                let mut m = vec![0i64; n * n];
                match fmt {
                    WeightFormat::FullMatrix => {
                        m.copy_from_slice(&vals);
                        for d in 0..n {
                            if m[d * n + d] != 0 {
                                warn!("nonzero diagonal entry for node {} set to 0", d + 1);
                                m[d * n + d] = 0;
                            }
                        }
                    }
                    WeightFormat::UpperRow => {
                        let mut it = vals.into_iter();
                        for r in 0..n {
                            for c in (r + 1)..n {
                                let v = it.next().unwrap();
                                m[r * n + c] = v;
                                m[c * n + r] = v;
                            }
                        }
                    }
                    WeightFormat::LowerDiagRow => {
                        let mut it = vals.into_iter();
                        for r in 0..n {
                            for c in 0..=r {
                                let v = it.next().unwrap();
                                if r != c {
                                    m[r * n + c] = v;
                                    m[c * n + r] = v;
                                }
                            }
                        }
                    }
                }
                matrix = Some(m);
            }
            "DISPLAY_DATA_SECTION" => {
                let n = dimension.unwrap_or(0);
                i += n;
            }
            "EOF" => break,
            other => warn!("line {lineno}: ignoring unknown keyword {other:?}"),
        }
    }

    let dimension = dimension.ok_or_else(|| ParseError::new(0, "missing DIMENSION"))?;
    let metric = metric.ok_or_else(|| ParseError::new(0, "missing EDGE_WEIGHT_TYPE"))?;
    if metric == Metric::Explicit {
        coords = None;
    } else {
        matrix = None;
    }
    let raw = RawInstance {
        name,
        dimension,
        metric,
        coords,
        matrix,
        comment,
    };
    raw.check()?;
    Ok(raw)
}
