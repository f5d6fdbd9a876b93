//! Text formats: TSPLIB instances and tours, and the whitespace separated
//! TSPTW layouts.

mod tour;
mod tsplib;
mod tsptw;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::metric::{City, Metric};

pub use tour::{parse_tour, write_tour, write_tour_section};
pub use tsplib::parse_tsplib;
pub use tsptw::{parse_tsptw, parse_tsptw_scaled, parse_windows, parse_windows_scaled};

/// Instance data as read from disk, before cost evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawInstance {
    pub name: String,
    pub dimension: usize,
    pub metric: Metric,
    pub coords: Option<Vec<(f64, f64)>>,
    /// Row-major `dimension x dimension` costs, zero diagonal. May be
    /// asymmetric for directed TSPTW inputs.
    pub matrix: Option<Vec<i64>>,
    pub comment: String,
}

impl RawInstance {
    pub fn is_symmetric(&self) -> bool {
        match &self.matrix {
            None => true,
            Some(m) => {
                let n = self.dimension;
                (0..n).all(|i| (0..i).all(|j| m[i * n + j] == m[j * n + i]))
            }
        }
    }

    pub(crate) fn check(&self) -> Result<(), ParseError> {
        if self.dimension < 3 {
            return Err(ParseError::new(0, format!("dimension must be at least 3, got {}", self.dimension)));
        }
        match (&self.coords, &self.matrix, self.metric) {
            (Some(c), None, m) if m != Metric::Explicit => {
                if c.len() != self.dimension {
                    return Err(ParseError::new(0, format!("{} coordinates for dimension {}", c.len(), self.dimension)));
                }
            }
            (None, Some(m), Metric::Explicit) => {
                let n = self.dimension;
                if m.len() != n * n {
                    return Err(ParseError::new(0, format!("{} matrix entries for dimension {n}", m.len())));
                }
                if (0..n).any(|i| m[i * n + i] != 0) {
                    return Err(ParseError::new(0, "matrix diagonal must be zero"));
                }
                if m.iter().any(|&d| d < 0) {
                    return Err(ParseError::new(0, "matrix entries must be nonnegative"));
                }
            }
            _ => {
                return Err(ParseError::new(0, "edge weight type does not match the data section"));
            }
        }
        Ok(())
    }
}

/// Time windows `[a_i, b_i]` and service times for every city; the depot is
/// city 0 (city 1 in file numbering).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindowData {
    pub windows: Vec<(i64, i64)>,
    pub service: Vec<i64>,
    pub depot: City,
}

/// Upper bound used for open windows.
pub const OPEN_WINDOW: i64 = i64::MAX / 4;

impl TimeWindowData {
    pub fn new(windows: Vec<(i64, i64)>, service: Vec<i64>) -> Result<Self, ParseError> {
        if windows.len() != service.len() {
            return Err(ParseError::new(0, "window and service counts differ"));
        }
        for (i, &(a, b)) in windows.iter().enumerate() {
            if a > b {
                return Err(ParseError::new(0, format!("city {} has inverted window [{a}, {b}]", i + 1)));
            }
        }
        if let Some(&(a, b)) = windows.first() {
            if a > 0 || b < 0 {
                return Err(ParseError::new(0, "depot window must contain time 0"));
            }
        }
        if service.iter().any(|&s| s < 0) {
            return Err(ParseError::new(0, "service times must be nonnegative"));
        }
        Ok(Self {
            windows,
            service,
            depot: 0,
        })
    }

    /// Every window `[0, +inf)`, no service.
    pub fn unbounded(n: usize) -> Self {
        Self {
            windows: vec![(0, OPEN_WINDOW); n],
            service: vec![0; n],
            depot: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }
}
