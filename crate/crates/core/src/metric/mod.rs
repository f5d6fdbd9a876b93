//! Distances, instances and tours.
//!
//! Cities are 0-based everywhere inside the crate; the text formats in
//! [`crate::io`] translate to and from the 1-based TSPLIB numbering.

mod moves;
mod tour;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::RawInstance;

pub use moves::{apply_move, is_feasible_closure, MoveSequence};
pub use tour::{tour_length, tour_neighbors, Tour};

pub type City = usize;

/// Instances up to this many cities get a precomputed cost table.
pub const DEFAULT_TABLE_CAP: usize = 5000;

/// TSPLIB edge weight type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "EUC_2D")]
    Euc2d,
    #[serde(rename = "CEIL_2D")]
    Ceil2d,
    #[serde(rename = "GEO")]
    Geo,
    #[serde(rename = "ATT")]
    Att,
    #[serde(rename = "EXPLICIT")]
    Explicit,
}

impl Metric {
    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "EUC_2D" => Some(Self::Euc2d),
            "CEIL_2D" => Some(Self::Ceil2d),
            "GEO" => Some(Self::Geo),
            "ATT" => Some(Self::Att),
            "EXPLICIT" => Some(Self::Explicit),
            _ => None,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Self::Euc2d => "EUC_2D",
            Self::Ceil2d => "CEIL_2D",
            Self::Geo => "GEO",
            Self::Att => "ATT",
            Self::Explicit => "EXPLICIT",
        }
    }
}

fn nint(x: f64) -> i64 {
    (x + 0.5).floor() as i64
}

#[allow(clippy::approx_constant)]
const GEO_PI: f64 = 3.141592;
const GEO_RADIUS: f64 = 6378.388;

/// Converts a TSPLIB `DDD.MM` coordinate into radians.
fn geo_radians(x: f64) -> f64 {
    let deg = x.trunc();
    let min = x - deg;
    GEO_PI * (deg + 5.0 * min / 3.0) / 180.0
}

fn geo_distance(a: (f64, f64), b: (f64, f64)) -> i64 {
    // (latitude, longitude) in radians
    let q1 = (a.1 - b.1).cos();
    let q2 = (a.0 - b.0).cos();
    let q3 = (a.0 + b.0).cos();
    (GEO_RADIUS * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0) as i64
}

/// Distance between two points under a coordinate metric, following the
/// TSPLIB 95 rounding rules. `Metric::Explicit` has no coordinate rule and
/// returns 0.
pub fn coord_distance(metric: Metric, a: (f64, f64), b: (f64, f64)) -> i64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    match metric {
        Metric::Euc2d => nint((dx * dx + dy * dy).sqrt()),
        Metric::Ceil2d => (dx * dx + dy * dy).sqrt().ceil() as i64,
        Metric::Att => {
            let r = ((dx * dx + dy * dy) / 10.0).sqrt();
            let t = nint(r);
            if (t as f64) < r {
                t + 1
            } else {
                t
            }
        }
        Metric::Geo => geo_distance(
            (geo_radians(a.0), geo_radians(a.1)),
            (geo_radians(b.0), geo_radians(b.1)),
        ),
        Metric::Explicit => 0,
    }
}

#[derive(Debug, Clone)]
enum Costs {
    Table(Vec<i64>),
    Coords(Vec<(f64, f64)>),
    /// Pre-converted (latitude, longitude) radians.
    Geo(Vec<(f64, f64)>),
}

/// A symmetric TSP instance with integer costs.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    n: usize,
    metric: Metric,
    coords: Option<Vec<(f64, f64)>>,
    costs: Costs,
}

impl Instance {
    /// Builds a coordinate instance, precomputing the cost table when
    /// `coords.len() <= DEFAULT_TABLE_CAP`.
    pub fn from_coords(name: impl Into<String>, metric: Metric, coords: Vec<(f64, f64)>) -> Result<Self> {
        Self::from_coords_with_cap(name, metric, coords, DEFAULT_TABLE_CAP)
    }

    pub fn from_coords_with_cap(
        name: impl Into<String>,
        metric: Metric,
        coords: Vec<(f64, f64)>,
        table_cap: usize,
    ) -> Result<Self> {
        if metric == Metric::Explicit {
            return Err(Error::Instance("EXPLICIT metric needs a cost matrix".into()));
        }
        let n = coords.len();
        if n < 3 {
            return Err(Error::Instance(format!("need at least 3 cities, got {n}")));
        }
        let lazy = if metric == Metric::Geo {
            Costs::Geo(coords.iter().map(|&(x, y)| (geo_radians(x), geo_radians(y))).collect())
        } else {
            Costs::Coords(coords.clone())
        };
        let mut inst = Self {
            name: name.into(),
            n,
            metric,
            coords: Some(coords),
            costs: lazy,
        };
        if n <= table_cap {
            let mut table = vec![0i64; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = inst.cost(i, j);
                    table[i * n + j] = d;
                    table[j * n + i] = d;
                }
            }
            inst.costs = Costs::Table(table);
        }
        Ok(inst)
    }

    /// Builds an explicit instance from a row-major `n x n` matrix, which
    /// must be symmetric, nonnegative and zero on the diagonal.
    pub fn from_matrix(name: impl Into<String>, n: usize, matrix: Vec<i64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Instance(format!("need at least 3 cities, got {n}")));
        }
        if matrix.len() != n * n {
            return Err(Error::Instance(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        for i in 0..n {
            if matrix[i * n + i] != 0 {
                return Err(Error::Instance(format!("nonzero diagonal at city {}", i + 1)));
            }
            for j in 0..n {
                let d = matrix[i * n + j];
                if d < 0 {
                    return Err(Error::Instance(format!("negative cost at ({}, {})", i + 1, j + 1)));
                }
                if d != matrix[j * n + i] {
                    return Err(Error::Instance(format!(
                        "asymmetric cost between {} and {}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            metric: Metric::Explicit,
            coords: None,
            costs: Costs::Table(matrix),
        })
    }

    pub fn from_raw(raw: &RawInstance) -> Result<Self> {
        match (&raw.coords, &raw.matrix) {
            (Some(c), None) => Self::from_coords(raw.name.clone(), raw.metric, c.clone()),
            (None, Some(m)) => Self::from_matrix(raw.name.clone(), raw.dimension, m.clone()),
            _ => Err(Error::Instance("exactly one of coordinates or matrix must be present".into())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    pub fn has_table(&self) -> bool {
        matches!(self.costs, Costs::Table(_))
    }

    #[inline]
    pub fn cost(&self, i: City, j: City) -> i64 {
        match &self.costs {
            Costs::Table(t) => t[i * self.n + j],
            _ if i == j => 0,
            Costs::Coords(c) => coord_distance(self.metric, c[i], c[j]),
            Costs::Geo(g) => geo_distance(g[i], g[j]),
        }
    }

    /// Largest edge cost; O(n^2).
    pub fn max_cost(&self) -> i64 {
        let mut m = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.max(self.cost(i, j));
            }
        }
        m
    }

    /// Cities ordered by distance from `c` (excluding `c`), ties by index.
    pub fn nearest(&self, c: City) -> Vec<City> {
        let mut v: Vec<City> = (0..self.n).filter(|&j| j != c).collect();
        v.sort_by_key(|&j| (self.cost(c, j), j));
        v
    }
}
