use std::fmt::Write as _;

use crate::error::ParseError;
use crate::metric::{City, Tour};

/// The TOUR_SECTION body: 1-based cities, one per line, then `-1`.
pub fn write_tour_section(tour: &Tour) -> String {
    let mut s = String::with_capacity(tour.len() * 6 + 2);
    for &c in tour.order() {
        let _ = writeln!(s, "{}", c + 1);
    }
    s.push_str("-1");
    s
}

/// A complete TSPLIB `.tour` file.
pub fn write_tour(tour: &Tour, name: &str, comment: Option<&str>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "NAME : {name}.tour");
    if let Some(c) = comment {
        let _ = writeln!(s, "COMMENT : {c}");
    }
    let _ = writeln!(s, "TYPE : TOUR");
    let _ = writeln!(s, "DIMENSION : {}", tour.len());
    s.push_str("TOUR_SECTION\n");
    s.push_str(&write_tour_section(tour));
    s.push_str("\nEOF\n");
    s
}

/// Reads a tour from a `.tour` file or a bare section body. Returns 0-based
/// cities; the permutation check is left to [`Tour::new`].
pub fn parse_tour(text: &str) -> Result<Vec<City>, ParseError> {
    let has_section = text.lines().any(|l| l.trim() == "TOUR_SECTION");
    let mut in_section = !has_section;
    let mut dimension: Option<usize> = None;
    let mut cities = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if !in_section {
            if line == "TOUR_SECTION" {
                in_section = true;
            } else if let Some((key, v)) = line.split_once(':') {
                if key.trim() == "DIMENSION" {
                    dimension = Some(
                        v.trim()
                            .parse()
                            .map_err(|_| ParseError::new(k + 1, format!("bad DIMENSION {:?}", v.trim())))?,
                    );
                }
            }
            continue;
        }
        if line == "EOF" {
            break;
        }
        let mut done = false;
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| ParseError::new(k + 1, format!("expected a city number, found {tok:?}")))?;
            if v == -1 {
                done = true;
                break;
            }
            if v < 1 {
                return Err(ParseError::new(k + 1, format!("invalid city {v}")));
            }
            cities.push(v as usize - 1);
        }
        if done {
            break;
        }
    }
    if let Some(d) = dimension {
        if d != cities.len() {
            return Err(ParseError::new(0, format!("tour lists {} cities, DIMENSION is {d}", cities.len())));
        }
    }
    Ok(cities)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_section() {
        assert_eq!(write_tour_section(&Tour::identity(3)), "1\n2\n3\n-1");
    }

    #[test]
    fn round_trip() {
        let t = Tour::new(vec![3, 0, 4, 2, 1]).unwrap();
        let text = write_tour(&t, "demo", Some("length 42"));
        assert_eq!(parse_tour(&text).unwrap(), t.order());
        assert_eq!(parse_tour(&write_tour_section(&t)).unwrap(), t.order());
    }

    #[test]
    fn dimension_is_checked() {
        let text = "TYPE : TOUR\nDIMENSION : 4\nTOUR_SECTION\n1\n2\n3\n-1\nEOF\n";
        assert!(parse_tour(text).is_err());
    }
}
