//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlkh::io::TimeWindowData;
use rlkh::{City, Instance, Metric};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// Looks for a TSPLIB file in the bundled data and in `$RLKH_TSPLIB_DIR`.
pub fn find_tsplib(name: &str) -> Option<PathBuf> {
    let file = format!("{name}.tsp");
    let mut dirs = vec![data_dir()];
    if let Ok(extra) = std::env::var("RLKH_TSPLIB_DIR") {
        dirs.push(PathBuf::from(extra));
    }
    dirs.into_iter().map(|d| d.join(&file)).find(|p| p.is_file())
}

pub fn load_tsplib(path: &std::path::Path) -> Instance {
    let text = std::fs::read_to_string(path).unwrap();
    Instance::from_raw(&rlkh::io::parse_tsplib(&text).unwrap()).unwrap()
}

pub fn random_euclidean(seed: u64, n: usize, side: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n).map(|_| (rng.gen_range(0.0..side), rng.gen_range(0.0..side))).collect();
    Instance::from_coords(format!("rand{n}-{seed}"), Metric::Euc2d, pts).unwrap()
}

/// Exact optimum by dynamic programming over subsets.
pub fn held_karp(inst: &Instance) -> i64 {
    let n = inst.n();
    let full = 1usize << (n - 1);
    let inf = i64::MAX / 4;
    // dp[mask][j]: shortest path from 0 through `mask` (cities 1..n) ending at j+1
    let mut dp = vec![inf; full * (n - 1)];
    for j in 0..n - 1 {
        dp[(1 << j) * (n - 1) + j] = inst.cost(0, j + 1);
    }
    for mask in 1..full {
        for j in 0..n - 1 {
            let cur = dp[mask * (n - 1) + j];
            if cur >= inf || mask & (1 << j) == 0 {
                continue;
            }
            for k in 0..n - 1 {
                if mask & (1 << k) == 0 {
                    let m2 = mask | (1 << k);
                    let v = cur + inst.cost(j + 1, k + 1);
                    let slot = &mut dp[m2 * (n - 1) + k];
                    if v < *slot {
                        *slot = v;
                    }
                }
            }
        }
    }
    (0..n - 1)
        .map(|j| dp[(full - 1) * (n - 1) + j] + inst.cost(j + 1, 0))
        .min()
        .unwrap()
}

/// Calls `f` on every ordering of `items`.
pub fn permutations(items: &mut Vec<City>, k: usize, f: &mut impl FnMut(&[City])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, f);
        items.swap(k, i);
    }
}

/// `(total lateness, length)` of a depot-first route, waiting when early.
pub fn simulate_route(cost: &dyn Fn(City, City) -> i64, tw: &TimeWindowData, route: &[City]) -> (i64, i64) {
    let mut t = 0i64;
    let mut late = 0i64;
    let mut len = 0i64;
    let n = route.len();
    for k in 1..=n {
        let (u, v) = (route[k - 1], route[k % n]);
        let d = cost(u, v);
        len += d;
        t += d;
        let (a, b) = tw.windows[v];
        if t > b {
            late += t - b;
        }
        if t < a {
            t = a;
        }
        t += tw.service[v];
    }
    (late, len)
}

/// Lexicographically smallest `(lateness, length)` over all routes.
pub fn tsptw_oracle(cost: &dyn Fn(City, City) -> i64, tw: &TimeWindowData) -> (i64, i64) {
    let n = tw.len();
    let mut best = (i64::MAX, i64::MAX);
    let mut rest: Vec<City> = (1..n).collect();
    permutations(&mut rest, 0, &mut |p| {
        let mut route = vec![0];
        route.extend_from_slice(p);
        let s = simulate_route(cost, tw, &route);
        if s < best {
            best = s;
        }
    });
    best
}

/// Minimum spanning forest weight over `nodes` by Kruskal, starting from
/// the components given by `forced` edges (whose weight is not included).
pub fn kruskal(nodes: &[City], cost: &dyn Fn(City, City) -> i64, forced: &[(City, City)]) -> i64 {
    let n = nodes.iter().max().map_or(0, |&m| m + 1);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for &(a, b) in forced {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut edges = Vec::new();
    for (x, &i) in nodes.iter().enumerate() {
        for &j in &nodes[x + 1..] {
            edges.push((cost(i, j), i, j));
        }
    }
    edges.sort_unstable();
    let mut total = 0;
    for (c, i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            total += c;
        }
    }
    total
}

/// Planted-route TSPTW instance in the style of the Dumas benchmarks:
/// coordinates in `[0, 50)`, truncated distances, windows around the
/// arrival times of a random route so that a feasible route exists.
pub fn planted_tsptw(seed: u64, n: usize) -> (Vec<i64>, TimeWindowData) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(0.0..50.0), rng.gen_range(0.0..50.0))).collect();
    let mut costs = vec![0i64; n * n];
    for i in 0..n {
        for j in 0..n {
            let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
            costs[i * n + j] = (dx * dx + dy * dy).sqrt().floor() as i64;
        }
    }
    let mut route: Vec<City> = (1..n).collect();
    for i in (1..route.len()).rev() {
        route.swap(i, rng.gen_range(0..=i));
    }
    let mut windows = vec![(0, 0); n];
    let mut t = 0;
    let mut prev = 0;
    for &c in &route {
        t += costs[prev * n + c];
        let lo = (t - rng.gen_range(0..20)).max(0);
        let hi = t + rng.gen_range(0..20);
        windows[c] = (lo, hi);
        prev = c;
    }
    t += costs[prev * n];
    windows[0] = (0, t + 100);
    (costs, TimeWindowData::new(windows, vec![0; n]).unwrap())
}
