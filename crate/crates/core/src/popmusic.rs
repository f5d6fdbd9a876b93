//! Candidate edges from several sub-path optimised tours.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::metric::{City, Instance, Tour};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopmusicConfig {
    /// Number of sampled tours.
    pub tours: usize,
    /// Cities per sub-path, endpoints included.
    pub subpath_len: usize,
    /// Cap on sweeps over all sub-paths.
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for PopmusicConfig {
    fn default() -> Self {
        Self {
            tours: 10,
            subpath_len: 32,
            sweeps: 20,
            seed: 1,
        }
    }
}

/// Undirected edges as `(min, max)` pairs.
pub type EdgeSet = BTreeSet<(City, City)>;

fn nearest_neighbor_tour(inst: &Instance, start: City) -> Vec<City> {
    let n = inst.n();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    used[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let mut bj = usize::MAX;
        let mut bd = i64::MAX;
        for j in 0..n {
            if !used[j] {
                let d = inst.cost(cur, j);
                if d < bd {
                    bd = d;
                    bj = j;
                }
            }
        }
        used[bj] = true;
        order.push(bj);
        cur = bj;
    }
    order
}

/// 2-opt on an open path with both endpoints fixed. Returns whether the
/// path changed.
fn improve_path(inst: &Instance, path: &mut [City]) -> bool {
    let m = path.len();
    if m < 4 {
        return false;
    }
    let mut changed = false;
    loop {
        let mut improved = false;
        for i in 1..m - 2 {
            for j in i + 1..m - 1 {
                let (a, b, c, d) = (path[i - 1], path[i], path[j], path[j + 1]);
                if inst.cost(a, b) + inst.cost(c, d) > inst.cost(a, c) + inst.cost(b, d) {
                    path[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            return changed;
        }
        changed = true;
    }
}

/// 2-opt on the whole cycle to local optimality.
fn improve_cycle(inst: &Instance, order: &mut [City]) {
    let n = order.len();
    loop {
        let mut improved = false;
        for i in 0..n - 1 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b, c, d) = (order[i], order[i + 1], order[j], order[(j + 1) % n]);
                if inst.cost(a, b) + inst.cost(c, d) > inst.cost(a, c) + inst.cost(b, d) {
                    order[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// A tour from a nearest-neighbour start improved block by block, each
/// block keeping its first and last city in place.
pub fn popmusic_tour(inst: &Instance, config: &PopmusicConfig, seed: u64) -> Tour {
    let n = inst.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.gen_range(0..n);
    let mut order = nearest_neighbor_tour(inst, start);
    let len = config.subpath_len.max(4);

    if n <= len {
        improve_cycle(inst, &mut order);
        return Tour::new(order).expect("2-opt keeps a permutation");
    }

    let mut idle = 0;
    let mut block = Vec::with_capacity(len);
    for sweep in 0..config.sweeps.max(1) {
        let offset = if sweep % 2 == 1 { len / 2 } else { 0 };
        let mut any = false;
        let mut first = 0;
        // consecutive blocks share their endpoint city
        while first < n {
            let m = len.min(n - first + 1);
            block.clear();
            block.extend((0..m).map(|k| order[(offset + first + k) % n]));
            if improve_path(inst, &mut block) {
                any = true;
                for (k, &c) in block.iter().enumerate() {
                    order[(offset + first + k) % n] = c;
                }
            }
            first += len - 1;
        }
        idle = if any { 0 } else { idle + 1 };
        if idle >= 2 {
            break;
        }
    }
    Tour::new(order).expect("block 2-opt keeps a permutation")
}

/// Union of the edges of `config.tours` tours drawn with seeds
/// `config.seed`, `config.seed + 1`, ...
pub fn popmusic_candidate_edges(inst: &Instance, config: &PopmusicConfig) -> EdgeSet {
    let mut edges = EdgeSet::new();
    for t in 0..config.tours.max(1) {
        let tour = popmusic_tour(inst, config, config.seed.wrapping_add(t as u64));
        edges.extend(tour.edges());
    }
    edges
}

/// One `i j` pair per line, 1-based.
pub fn write_edges(edges: &EdgeSet) -> String {
    let mut s = String::with_capacity(edges.len() * 10);
    for &(i, j) in edges {
        let _ = writeln!(s, "{} {}", i + 1, j + 1);
    }
    s
}

/// Per-city neighbour lists of an edge set.
pub fn adjacency(n: usize, edges: &EdgeSet) -> Vec<Vec<City>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    adj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Metric;

    fn random_instance(seed: u64, n: usize) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n).map(|_| (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0))).collect();
        Instance::from_coords("r", Metric::Euc2d, pts).unwrap()
    }

    fn is_two_opt_optimal(inst: &Instance, t: &Tour) -> bool {
        let mut o = t.order().to_vec();
        let before = t.length(inst);
        improve_cycle(inst, &mut o);
        Tour::new(o).unwrap().length(inst) == before
    }

    #[test]
    fn small_instance_is_two_opt_optimal() {
        let inst = random_instance(5, 8);
        let t = popmusic_tour(&inst, &PopmusicConfig::default(), 3);
        t.validate().unwrap();
        assert!(is_two_opt_optimal(&inst, &t));
    }

    #[test]
    fn convex_polygon_gives_hull_order() {
        let n = 10;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let a = k as f64 * std::f64::consts::TAU / n as f64;
                (1000.0 * a.cos(), 1000.0 * a.sin())
            })
            .collect();
        let inst = Instance::from_coords("poly", Metric::Euc2d, pts).unwrap();
        for seed in 0..5 {
            let t = popmusic_tour(&inst, &PopmusicConfig::default(), seed);
            for c in 0..n {
                let (p, q) = t.neighbors(c);
                let want = [(c + 1) % n, (c + n - 1) % n];
                assert!(want.contains(&p) && want.contains(&q));
            }
        }
    }

    #[test]
    fn blocks_keep_a_valid_tour_and_do_not_lengthen_it() {
        let inst = random_instance(11, 200);
        let cfg = PopmusicConfig::default();
        let t = popmusic_tour(&inst, &cfg, 7);
        t.validate().unwrap();
        let nn = Tour::new(nearest_neighbor_tour(&inst, ChaCha8Rng::seed_from_u64(7).gen_range(0..200))).unwrap();
        assert!(t.length(&inst) <= nn.length(&inst));
        let other = popmusic_tour(&inst, &cfg, 8);
        let a: EdgeSet = t.edges().collect();
        let b: EdgeSet = other.edges().collect();
        assert_ne!(a, b);
    }

    #[test]
    fn union_bounds() {
        let inst = random_instance(2, 120);
        let one = PopmusicConfig {
            tours: 1,
            ..Default::default()
        };
        let e1 = popmusic_candidate_edges(&inst, &one);
        assert_eq!(e1.len(), 120);
        let cfg = PopmusicConfig::default();
        let e = popmusic_candidate_edges(&inst, &cfg);
        assert!(e.len() >= 120 && e.len() <= 1200);
        let last = popmusic_tour(&inst, &cfg, cfg.seed + 9);
        assert!(last.edges().all(|x| e.contains(&x)));
        assert!(adjacency(120, &e).iter().all(|a| a.len() >= 2));
        assert_eq!(e, popmusic_candidate_edges(&inst, &cfg));
    }

    #[test]
    fn edge_dump_is_one_based() {
        let edges: EdgeSet = [(0, 1), (1, 2)].into_iter().collect();
        assert_eq!(write_edges(&edges), "1 2\n2 3\n");
    }
}
