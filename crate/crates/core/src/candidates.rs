//! Candidate lists and the Q-table that orders them.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::metric::{City, Instance};
use crate::onetree::AlphaSource;
use crate::popmusic::{adjacency, EdgeSet};

/// Default candidate list length.
pub const DEFAULT_WIDTH: usize = 5;

/// Q-values on candidate pairs. Each city keeps a short row sorted by
/// neighbour; a pair stored for `(i, j)` is also stored for `(j, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    rows: Vec<Vec<(City, f64)>>,
}

impl QTable {
    pub fn new(n: usize) -> Self {
        Self {
            rows: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    fn slot(&self, i: City, j: City) -> Result<usize, usize> {
        self.rows[i].binary_search_by_key(&j, |&(c, _)| c)
    }

    pub fn get(&self, i: City, j: City) -> Option<f64> {
        self.slot(i, j).ok().map(|k| self.rows[i][k].1)
    }

    /// Inserts or overwrites `Q(i, j)`.
    pub fn set(&mut self, i: City, j: City, q: f64) {
        match self.slot(i, j) {
            Ok(k) => self.rows[i][k].1 = q,
            Err(k) => self.rows[i].insert(k, (j, q)),
        }
    }

    /// Sets both `Q(i, j)` and `Q(j, i)`.
    pub fn set_pair(&mut self, i: City, j: City, q: f64) {
        self.set(i, j, q);
        self.set(j, i, q);
    }

    /// Number of stored directed entries.
    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: City) -> &[(City, f64)] {
        &self.rows[i]
    }

    pub fn scale(&mut self, factor: f64) {
        for row in &mut self.rows {
            for e in row.iter_mut() {
                e.1 *= factor;
            }
        }
    }
}

/// Per-city candidate lists, best first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSets {
    lists: Vec<Vec<City>>,
}

impl CandidateSets {
    pub fn new(lists: Vec<Vec<City>>) -> Self {
        Self { lists }
    }

    pub fn n(&self) -> usize {
        self.lists.len()
    }

    #[inline]
    pub fn of(&self, c: City) -> &[City] {
        &self.lists[c]
    }

    pub fn lists(&self) -> &[Vec<City>] {
        &self.lists
    }

    /// Undirected candidate edges.
    pub fn edges(&self) -> EdgeSet {
        let mut e = EdgeSet::new();
        for (i, l) in self.lists.iter().enumerate() {
            for &j in l {
                e.insert((i.min(j), i.max(j)));
            }
        }
        e
    }

    /// Stable re-sort of every list by descending Q.
    pub fn resort(&mut self, q: &QTable) {
        for (i, list) in self.lists.iter_mut().enumerate() {
            list.sort_by(|&a, &b| {
                let qa = q.get(i, a).unwrap_or(f64::NEG_INFINITY);
                let qb = q.get(i, b).unwrap_or(f64::NEG_INFINITY);
                qb.partial_cmp(&qa).unwrap_or(Ordering::Equal)
            });
        }
    }

    /// One line per city: `city: cand(Q) cand(Q) ...`, 1-based.
    pub fn dump(&self, q: &QTable) -> String {
        let mut s = String::new();
        for (i, list) in self.lists.iter().enumerate() {
            let _ = write!(s, "{}:", i + 1);
            for &j in list {
                match q.get(i, j) {
                    Some(v) => {
                        let _ = write!(s, " {}({v:.6})", j + 1);
                    }
                    None => {
                        let _ = write!(s, " {}", j + 1);
                    }
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Free-function form of [`CandidateSets::resort`].
pub fn resort(cs: &mut CandidateSets, q: &QTable) {
    cs.resort(q);
}

/// `alpha + d`, with 0 replaced by 1.
fn denominator(alpha: i64, d: i64) -> i64 {
    (alpha + d).max(1)
}

fn numerator(w: i64) -> f64 {
    if w > 0 {
        w as f64
    } else {
        1.0
    }
}

/// For every city the `width` cities with the largest `w / (alpha + d)`,
/// ties by smaller index.
pub fn init_q_alpha(inst: &Instance, alpha: &impl AlphaSource, w: i64, width: usize) -> (QTable, CandidateSets) {
    let n = inst.n();
    let num = numerator(w);
    let mut q = QTable::new(n);
    let mut lists = Vec::with_capacity(n);
    let mut row = Vec::new();
    for i in 0..n {
        alpha.alpha_row(i, &mut row);
        let mut cand: Vec<(i64, City)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (denominator(row[j], inst.cost(i, j)), j))
            .collect();
        let k = width.min(cand.len());
        if k < cand.len() {
            cand.select_nth_unstable(k);
            cand.truncate(k);
        }
        cand.sort_unstable();
        for &(den, j) in &cand {
            q.set_pair(i, j, num / den as f64);
        }
        lists.push(cand.into_iter().map(|(_, j)| j).collect());
    }
    (q, CandidateSets::new(lists))
}

/// Candidate lists from a POPMUSIC edge union, scored `tree_len / (alpha + d)`.
/// Cities with fewer than `width` union neighbours are padded with their
/// nearest other cities.
pub fn init_q_popmusic(
    inst: &Instance,
    edges: &EdgeSet,
    alpha: &impl AlphaSource,
    tree_len: i64,
    width: usize,
) -> (QTable, CandidateSets) {
    let n = inst.n();
    let num = numerator(tree_len);
    let adj = adjacency(n, edges);
    let mut q = QTable::new(n);
    let mut lists = Vec::with_capacity(n);
    let mut row = Vec::new();
    for i in 0..n {
        alpha.alpha_row(i, &mut row);
        let mut members = adj[i].clone();
        if members.len() < width {
            for j in inst.nearest(i) {
                if members.len() >= width {
                    break;
                }
                if !members.contains(&j) {
                    members.push(j);
                }
            }
        }
        let mut cand: Vec<(i64, City)> = members
            .into_iter()
            .map(|j| (denominator(row[j], inst.cost(i, j)), j))
            .collect();
        cand.sort_unstable();
        for &(den, j) in &cand {
            q.set_pair(i, j, num / den as f64);
        }
        lists.push(cand.into_iter().map(|(_, j)| j).collect());
    }
    (q, CandidateSets::new(lists))
}

/// The `width` smallest-alpha cities per city, ties by distance then index.
pub fn alpha_candidates(inst: &Instance, alpha: &impl AlphaSource, width: usize) -> CandidateSets {
    let n = inst.n();
    let mut lists = Vec::with_capacity(n);
    let mut row = Vec::new();
    for i in 0..n {
        alpha.alpha_row(i, &mut row);
        let mut cand: Vec<(i64, i64, City)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (row[j], inst.cost(i, j), j))
            .collect();
        let k = width.min(cand.len());
        if k < cand.len() {
            cand.select_nth_unstable(k);
            cand.truncate(k);
        }
        cand.sort_unstable();
        lists.push(cand.into_iter().map(|(_, _, j)| j).collect());
    }
    CandidateSets::new(lists)
}

/// A candidate graph's lists reordered by alpha, ties by distance then index.
pub fn order_by_alpha(inst: &Instance, cs: &CandidateSets, alpha: &impl AlphaSource) -> CandidateSets {
    let mut row = Vec::new();
    let lists = cs
        .lists()
        .iter()
        .enumerate()
        .map(|(i, l)| {
            alpha.alpha_row(i, &mut row);
            let mut cand: Vec<(i64, i64, City)> = l.iter().map(|&j| (row[j], inst.cost(i, j), j)).collect();
            cand.sort_unstable();
            cand.into_iter().map(|(_, _, j)| j).collect()
        })
        .collect();
    CandidateSets::new(lists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Metric;
    use crate::onetree::{alpha_values, minimum_one_tree, AlphaTable, PiVector};
    use rand::{Rng, SeedableRng};

    fn random_instance(seed: u64, n: usize) -> Instance {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n).map(|_| (rng.gen_range(0..200) as f64, rng.gen_range(0..200) as f64)).collect();
        Instance::from_coords("r", Metric::Euc2d, pts).unwrap()
    }

    fn table(inst: &Instance) -> (AlphaTable, i64) {
        let t = minimum_one_tree(inst, &PiVector::zeros(inst.n()));
        (alpha_values(inst, &t), t.length)
    }

    #[test]
    fn one_tree_edge_q() {
        // alpha = 0, d = 10, w = 100
        assert_eq!(numerator(100) / denominator(0, 10) as f64, 10.0);
        assert_eq!(numerator(70) / denominator(0, 7) as f64, 10.0);
        assert_eq!(denominator(0, 0), 1);
    }

    #[test]
    fn alpha_lists_match_sorted_denominators() {
        for seed in 0..10 {
            let n = 6 + seed as usize % 4;
            let inst = random_instance(seed, n);
            let (a, len) = table(&inst);
            let (q, cs) = init_q_alpha(&inst, &a, len, 5);
            for i in 0..n {
                let mut all: Vec<(i64, City)> = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| ((a.get(i, j) + inst.cost(i, j)).max(1), j))
                    .collect();
                all.sort();
                let want: Vec<City> = all.iter().take(5).map(|x| x.1).collect();
                assert_eq!(cs.of(i), want.as_slice());
                for w in cs.of(i).windows(2) {
                    assert!(q.get(i, w[0]).unwrap() >= q.get(i, w[1]).unwrap());
                }
                for &j in cs.of(i) {
                    assert_eq!(q.get(i, j), q.get(j, i));
                    assert!(q.get(i, j).unwrap().is_finite() && q.get(i, j).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn single_tour_union_gives_tour_neighbours() {
        let inst = random_instance(4, 9);
        let (a, len) = table(&inst);
        let order = [0, 3, 1, 4, 2, 8, 6, 5, 7];
        let edges: EdgeSet = (0..9)
            .map(|k| {
                let (x, y) = (order[k], order[(k + 1) % 9]);
                (x.min(y), x.max(y))
            })
            .collect();
        let (q, cs) = init_q_popmusic(&inst, &edges, &a, len, 5);
        for k in 0..9 {
            let c = order[k];
            let l = cs.of(c);
            assert_eq!(l.len(), 5);
            assert!(l.contains(&order[(k + 1) % 9]) && l.contains(&order[(k + 8) % 9]));
            for w in l.windows(2) {
                assert!(q.get(c, w[0]).unwrap() >= q.get(c, w[1]).unwrap());
            }
        }
    }

    #[test]
    fn resort_swaps_and_is_stable() {
        let inst = random_instance(9, 12);
        let (a, len) = table(&inst);
        let (mut q, mut cs) = init_q_alpha(&inst, &a, len, 5);
        let before = cs.clone();
        cs.resort(&q);
        assert_eq!(cs, before);
        let (x, y) = (cs.of(3)[0], cs.of(3)[1]);
        let (qx, qy) = (q.get(3, x).unwrap(), q.get(3, y).unwrap());
        q.set(3, x, qy);
        q.set(3, y, qx);
        if qx != qy {
            cs.resort(&q);
            assert_eq!(cs.of(3)[0], y);
            assert_eq!(cs.of(3)[1], x);
        }
    }

    #[test]
    fn scaling_q_keeps_order() {
        let inst = random_instance(10, 20);
        let (a, len) = table(&inst);
        let (mut q, cs) = init_q_alpha(&inst, &a, len, 5);
        q.scale(3.5);
        let mut again = cs.clone();
        again.resort(&q);
        assert_eq!(again, cs);
    }

    #[test]
    fn dump_format() {
        let mut q = QTable::new(3);
        q.set_pair(0, 1, 2.0);
        let cs = CandidateSets::new(vec![vec![1], vec![0], vec![]]);
        assert_eq!(cs.dump(&q), "1: 2(2.000000)\n2: 1(2.000000)\n3:\n");
    }
}
