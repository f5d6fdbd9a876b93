use smallvec::SmallVec;

use crate::error::MoveError;

use super::{City, Instance, Tour};

/// Alternating city sequence `p1 .. p2k` of a sequential k-opt move.
///
/// Removed edges are `(p[2i], p[2i+1])`, added edges are `(p[2i+1], p[2i+2])`
/// with the closing edge `(p[2k-1], p[0])` (0-based indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveSequence(Vec<City>);

impl MoveSequence {
    pub fn new(cities: Vec<City>) -> Result<Self, MoveError> {
        if cities.len() < 4 || cities.len() % 2 != 0 {
            return Err(MoveError::BadLength(cities.len()));
        }
        Ok(Self(cities))
    }

    pub fn cities(&self) -> &[City] {
        &self.0
    }

    /// Number of exchanged edges.
    pub fn k(&self) -> usize {
        self.0.len() / 2
    }

    pub fn removed(&self) -> impl Iterator<Item = (City, City)> + '_ {
        self.0.chunks(2).map(|c| (c[0], c[1]))
    }

    /// Added edges including the closing one.
    pub fn added(&self) -> impl Iterator<Item = (City, City)> + '_ {
        let m = self.0.len();
        (0..self.k()).map(move |i| (self.0[2 * i + 1], self.0[(2 * i + 2) % m]))
    }

    /// Removed cost minus added cost.
    pub fn gain(&self, inst: &Instance) -> i64 {
        sequence_gain(inst, &self.0)
    }
}

pub(crate) fn sequence_gain(inst: &Instance, p: &[City]) -> i64 {
    let m = p.len();
    let mut g = 0;
    for i in 0..m / 2 {
        g += inst.cost(p[2 * i], p[2 * i + 1]);
        g -= inst.cost(p[2 * i + 1], p[(2 * i + 2) % m]);
    }
    g
}

/// One piece of the reconnected cycle: tour positions `from..=to` (walking
/// forward, possibly wrapping) traversed forward or backward.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    from: usize,
    to: usize,
    forward: bool,
}

pub(crate) type Plan = SmallVec<[Piece; 8]>;

fn norm(a: City, b: City) -> (City, City) {
    (a.min(b), a.max(b))
}

/// Computes how the tour falls apart when the removed edges of `p` are cut
/// and how the added edges (plus the closing edge back to `p[0]`) glue the
/// pieces together. Returns `None` unless the result is one Hamiltonian
/// cycle that uses every removed/added edge exactly once.
pub(crate) fn reconnect(tour: &Tour, p: &[City]) -> Option<Plan> {
    let n = tour.len();
    let m = p.len();
    if m < 4 || m % 2 != 0 || p.iter().any(|&c| c >= n) {
        return None;
    }
    let k = m / 2;

    let mut cuts: SmallVec<[usize; 8]> = SmallVec::new();
    for i in 0..k {
        let (a, b) = (p[2 * i], p[2 * i + 1]);
        let cut = if tour.next(a) == b {
            tour.pos[a]
        } else if tour.next(b) == a {
            tour.pos[b]
        } else {
            return None;
        };
        if cuts.contains(&cut) {
            return None;
        }
        cuts.push(cut);
    }

    let mut added: SmallVec<[(City, City); 8]> = SmallVec::new();
    for i in 0..k {
        let (a, b) = (p[2 * i + 1], p[(2 * i + 2) % m]);
        if a == b || tour.adjacent(a, b) {
            return None;
        }
        let e = norm(a, b);
        if added.contains(&e) {
            return None;
        }
        added.push(e);
    }

    // every touched city must trade removed edges for added ones one to one
    for &c in p {
        let removed = (0..k).filter(|&i| p[2 * i] == c || p[2 * i + 1] == c).count();
        let put = added.iter().filter(|e| e.0 == c || e.1 == c).count();
        if removed != put {
            return None;
        }
    }

    cuts.sort_unstable();
    // piece s runs from cuts[s]+1 to cuts[s+1]
    let piece_from = |s: usize| (cuts[s] + 1) % n;
    let piece_to = |s: usize| cuts[(s + 1) % k];

    let piece_of = |c: City| -> (usize, bool, bool) {
        let pc = tour.pos[c];
        for s in 0..k {
            let f = piece_from(s);
            let t = piece_to(s);
            if pc == f || pc == t {
                return (s, pc == f, pc == t);
            }
        }
        unreachable!("touched city {c} is not a piece endpoint")
    };

    let partners = |c: City| -> SmallVec<[City; 2]> {
        added
            .iter()
            .filter_map(|&(a, b)| {
                if a == c {
                    Some(b)
                } else if b == c {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    };

    let mut plan: Plan = SmallVec::new();
    let mut visited: SmallVec<[bool; 8]> = SmallVec::from_elem(false, k);
    visited[0] = true;
    plan.push(Piece {
        from: piece_from(0),
        to: piece_to(0),
        forward: true,
    });
    let first = tour.order[piece_from(0)];
    let mut exit = tour.order[piece_to(0)];
    let mut came_from = {
        // for a one-city piece, leave over the first partner and expect to
        // return over the second
        let ps = partners(first);
        if first == exit {
            ps[1]
        } else {
            ps[0]
        }
    };
    let entry_partner = came_from;
    loop {
        let ps = partners(exit);
        let f = if ps.len() == 1 {
            ps[0]
        } else if ps[0] == came_from {
            ps[1]
        } else {
            ps[0]
        };
        let (s, is_from, is_to) = piece_of(f);
        if s == 0 {
            let closes = if first == tour.order[piece_to(0)] {
                exit == entry_partner
            } else {
                f == first
            };
            if !closes || plan.len() != k {
                return None;
            }
            return Some(plan);
        }
        if visited[s] {
            return None;
        }
        visited[s] = true;
        let forward = is_from;
        plan.push(Piece {
            from: piece_from(s),
            to: piece_to(s),
            forward,
        });
        came_from = exit;
        exit = if is_from && is_to {
            f
        } else if forward {
            tour.order[piece_to(s)]
        } else {
            tour.order[piece_from(s)]
        };
    }
}

/// Constraint check: closing the partial sequence back to `p[0]` yields a
/// single Hamiltonian cycle.
pub fn is_feasible_closure(tour: &Tour, p: &[City]) -> bool {
    reconnect(tour, p).is_some()
}

fn piece_len(piece: &Piece, n: usize) -> usize {
    (piece.to + n - piece.from) % n + 1
}

impl Tour {
    /// Applies the sequential move `p` in place. Only the pieces outside the
    /// longest one are rewritten.
    pub fn apply(&mut self, p: &[City]) -> Result<(), MoveError> {
        if p.len() < 4 || p.len() % 2 != 0 {
            return Err(MoveError::BadLength(p.len()));
        }
        if let Some(&c) = p.iter().find(|&&c| c >= self.len()) {
            return Err(MoveError::CityOutOfRange(c));
        }
        let plan = reconnect(self, p).ok_or(MoveError::Infeasible)?;
        self.apply_plan(&plan);
        Ok(())
    }

    fn apply_plan(&mut self, plan: &Plan) {
        let n = self.len();
        let k = plan.len();
        let anchor = (0..k).max_by_key(|&i| (piece_len(&plan[i], n), usize::MAX - i)).unwrap();
        // walk order starting at the anchor, anchor traversed forward
        let mut walk: SmallVec<[Piece; 8]> = SmallVec::new();
        if plan[anchor].forward {
            for t in 0..k {
                walk.push(plan[(anchor + t) % k]);
            }
        } else {
            for t in 0..k {
                let mut pc = plan[(anchor + k - t) % k];
                pc.forward = !pc.forward;
                walk.push(pc);
            }
        }
        let mut buf: Vec<City> = Vec::with_capacity(n - piece_len(&walk[0], n));
        for pc in &walk[1..] {
            let len = piece_len(pc, n);
            if pc.forward {
                buf.extend((0..len).map(|t| self.order[(pc.from + t) % n]));
            } else {
                buf.extend((0..len).map(|t| self.order[(pc.to + n - t) % n]));
            }
        }
        let mut at = (walk[0].to + 1) % n;
        for c in buf {
            self.order[at] = c;
            self.pos[c] = at;
            at = (at + 1) % n;
        }
    }
}

/// Returns the tour obtained by applying `seq`; the input is untouched.
pub fn apply_move(tour: &Tour, seq: &MoveSequence) -> Result<Tour, MoveError> {
    let mut t = tour.clone();
    t.apply(seq.cities())?;
    Ok(t)
}
