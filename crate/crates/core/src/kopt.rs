//! Depth-bounded sequential k-opt search over candidate lists.

use log::trace;
use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::candidates::CandidateSets;
use crate::metric::{is_feasible_closure, City, Instance, MoveSequence, Tour};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KOptConfig {
    /// Maximum number of exchanged edges.
    pub k_max: usize,
    /// Candidates tried per added edge.
    pub breadth: usize,
}

impl Default for KOptConfig {
    fn default() -> Self {
        Self { k_max: 5, breadth: 5 }
    }
}

/// Decides whether a feasible closed sequence is taken.
pub trait Acceptor {
    /// `p` closes into a single cycle on `tour`; `gain` is its removed minus
    /// added cost.
    fn accept(&mut self, tour: &Tour, p: &[City], gain: i64) -> bool;
}

/// Takes any strictly shortening closure.
#[derive(Debug, Clone, Copy, Default)]
pub struct Shorter;

impl Acceptor for Shorter {
    fn accept(&mut self, _tour: &Tour, _p: &[City], gain: i64) -> bool {
        gain > 0
    }
}

/// An applied improving move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Improvement {
    pub seq: MoveSequence,
    /// Length reduction of the tour.
    pub gain: i64,
}

/// Feasibility: closing `p` (even length) back to `p[0]` gives one cycle.
pub fn feasibility_check(tour: &Tour, p: &[City]) -> bool {
    is_feasible_closure(tour, p)
}

/// Positive partial gain, recomputed from scratch: with `p = p1..p2i` and the
/// candidate `next = p2i+1`, the removed minus added cost stays positive.
pub fn gain_check(inst: &Instance, p: &[City], next: City) -> bool {
    let mut g = 0;
    for i in 0..p.len() / 2 {
        g += inst.cost(p[2 * i], p[2 * i + 1]);
        let y_to = if 2 * i + 2 < p.len() { p[2 * i + 2] } else { next };
        g -= inst.cost(p[2 * i + 1], y_to);
    }
    g > 0
}

type Seq = SmallVec<[City; 16]>;

struct Search<'a, R, A> {
    inst: &'a Instance,
    tour: &'a Tour,
    cs: &'a CandidateSets,
    cfg: KOptConfig,
    rng: &'a mut R,
    acceptor: &'a mut A,
    p: Seq,
    /// Edges added so far, normalised.
    added: SmallVec<[(City, City); 8]>,
}

impl<R: Rng, A: Acceptor> Search<'_, R, A> {
    fn removed_already(&self, a: City, b: City) -> bool {
        let m = self.p.len();
        (0..m / 2).any(|j| {
            let (u, v) = (self.p[2 * j], self.p[2 * j + 1]);
            (u, v) == (a, b) || (u, v) == (b, a)
        })
    }

    /// Level `i` (1-based): `p` holds `p1..p2i-1`, `g` is the gain of the
    /// first `i - 1` exchanges. Returns the closing gain when accepted.
    fn level(&mut self, i: usize, g: i64) -> Option<i64> {
        let last = *self.p.last().unwrap();
        let (prev, next) = self.tour.neighbors(last);
        let order = if self.rng.gen::<bool>() { [prev, next] } else { [next, prev] };
        for p2i in order {
            if self.removed_already(last, p2i) {
                continue;
            }
            self.p.push(p2i);
            if i >= 2 && !feasibility_check(self.tour, &self.p) {
                self.p.pop();
                continue;
            }
            let gx = g + self.inst.cost(last, p2i);
            if i >= 2 {
                let close = gx - self.inst.cost(p2i, self.p[0]);
                if self.acceptor.accept(self.tour, &self.p, close) {
                    return Some(close);
                }
            }
            if i == self.cfg.k_max {
                self.p.pop();
                return None;
            }
            let cs = self.cs;
            let list = cs.of(p2i);
            for &c in &list[..self.cfg.breadth.min(list.len())] {
                if c == p2i || self.tour.adjacent(p2i, c) {
                    continue;
                }
                let e = (p2i.min(c), p2i.max(c));
                if self.added.contains(&e) {
                    continue;
                }
                let gy = gx - self.inst.cost(p2i, c);
                if gy <= 0 {
                    continue;
                }
                self.p.push(c);
                self.added.push(e);
                if let Some(found) = self.level(i + 1, gy) {
                    return Some(found);
                }
                self.added.pop();
                self.p.pop();
            }
            self.p.pop();
        }
        None
    }
}

/// Runs one search rooted at `p1` and applies the first accepted move to
/// `tour`. Returns `None` when no move is accepted; `tour` is then unchanged.
pub fn k_opt<R: Rng, A: Acceptor>(
    inst: &Instance,
    tour: &mut Tour,
    cs: &CandidateSets,
    p1: City,
    cfg: &KOptConfig,
    rng: &mut R,
    acceptor: &mut A,
) -> Option<Improvement> {
    let mut s = Search {
        inst,
        tour: &*tour,
        cs,
        cfg: KOptConfig {
            k_max: cfg.k_max.max(2),
            breadth: cfg.breadth,
        },
        rng,
        acceptor,
        p: SmallVec::from_elem(p1, 1),
        added: SmallVec::new(),
    };
    let gain = s.level(1, 0)?;
    let p = std::mem::take(&mut s.p);
    drop(s);
    tour.apply(&p).expect("accepted closure is feasible");
    trace!(
        target: "rlkh::moves",
        "depth {}, gain {}, episode {}",
        p.len() / 2,
        gain,
        p.iter().map(|c| (c + 1).to_string()).collect::<Vec<_>>().join(" ")
    );
    Some(Improvement {
        seq: MoveSequence::new(p.into_vec()).expect("closure has at least two exchanges"),
        gain,
    })
}
