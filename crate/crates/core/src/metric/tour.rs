use crate::error::{Error, Result};

use super::{City, Instance};

/// A Hamiltonian cycle stored as a city order plus its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tour {
    pub(super) order: Vec<City>,
    pub(super) pos: Vec<usize>,
}

impl Tour {
    pub fn new(order: Vec<City>) -> Result<Self> {
        let n = order.len();
        let mut pos = vec![usize::MAX; n];
        for (p, &c) in order.iter().enumerate() {
            if c >= n {
                return Err(Error::Tour(format!("city {} out of range 1..={n}", c + 1)));
            }
            if pos[c] != usize::MAX {
                return Err(Error::Tour(format!("city {} appears twice", c + 1)));
            }
            pos[c] = p;
        }
        Ok(Self { order, pos })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[City] {
        &self.order
    }

    #[inline]
    pub fn position(&self, c: City) -> usize {
        self.pos[c]
    }

    #[inline]
    pub fn at(&self, p: usize) -> City {
        self.order[p]
    }

    #[inline]
    pub fn next(&self, c: City) -> City {
        let p = self.pos[c] + 1;
        if p == self.order.len() {
            self.order[0]
        } else {
            self.order[p]
        }
    }

    #[inline]
    pub fn prev(&self, c: City) -> City {
        let p = self.pos[c];
        if p == 0 {
            self.order[self.order.len() - 1]
        } else {
            self.order[p - 1]
        }
    }

    /// `(predecessor, successor)` of `c`.
    #[inline]
    pub fn neighbors(&self, c: City) -> (City, City) {
        (self.prev(c), self.next(c))
    }

    #[inline]
    pub fn adjacent(&self, a: City, b: City) -> bool {
        self.next(a) == b || self.prev(a) == b
    }

    pub fn length(&self, inst: &Instance) -> i64 {
        let n = self.order.len();
        (0..n).map(|p| inst.cost(self.order[p], self.order[(p + 1) % n])).sum()
    }

    /// Checks that `order` and `pos` are mutually inverse permutations.
    pub fn validate(&self) -> Result<()> {
        let n = self.order.len();
        if self.pos.len() != n {
            return Err(Error::Tour("order/pos length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for (p, &c) in self.order.iter().enumerate() {
            if c >= n || seen[c] {
                return Err(Error::Tour(format!("position {p} holds invalid or repeated city")));
            }
            seen[c] = true;
            if self.pos[c] != p {
                return Err(Error::Tour(format!("pos[{c}] = {} but order[{p}] = {c}", self.pos[c])));
            }
        }
        Ok(())
    }

    /// Undirected edges as `(min, max)` pairs, in tour order.
    pub fn edges(&self) -> impl Iterator<Item = (City, City)> + '_ {
        let n = self.order.len();
        (0..n).map(move |p| {
            let a = self.order[p];
            let b = self.order[(p + 1) % n];
            (a.min(b), a.max(b))
        })
    }

    /// The city order rotated to start at `start`, walking forward.
    pub fn rotated_from(&self, start: City) -> Vec<City> {
        let p = self.pos[start];
        self.order[p..].iter().chain(&self.order[..p]).copied().collect()
    }

    /// The same cycle traversed in the opposite direction, starting at `start`.
    pub fn reversed_from(&self, start: City) -> Vec<City> {
        let n = self.order.len();
        let p = self.pos[start];
        (0..n).map(|k| self.order[(p + n - k) % n]).collect()
    }
}

pub fn tour_length(inst: &Instance, tour: &Tour) -> i64 {
    tour.length(inst)
}

pub fn tour_neighbors(tour: &Tour, c: City) -> (City, City) {
    tour.neighbors(c)
}
