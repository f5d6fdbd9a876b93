use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{choose_initial_tour, double_bridge, prepare, search, Limits, Objective, SolveResult, SolverConfig};
use crate::candidates::CandidateSets;
use crate::error::{Error, Result};
use crate::io::{RawInstance, TimeWindowData};
use crate::metric::{City, Instance, Tour};
use crate::rl::StagnationBudget;

/// Violation and objective of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionPair {
    pub fv: i64,
    pub fo: i64,
}

/// Strictly smaller violation, or equal violation and strictly shorter.
pub fn better(a: SolutionPair, b: SolutionPair) -> bool {
    a.fv < b.fv || (a.fv == b.fv && a.fo < b.fo)
}

/// Violation given to transformed tours that encode no directed route.
pub const INVALID_VIOLATION: i64 = i64::MAX / 8;

/// Total lateness and length of `route`, which starts at the depot and
/// returns to it. Departure from the depot is at time 0.
fn simulate(cost: impl Fn(City, City) -> i64, windows: &TimeWindowData, route: &[City]) -> SolutionPair {
    let mut time = 0;
    let mut fv = 0;
    let mut fo = 0;
    let mut prev = route[0];
    for &c in route[1..].iter().chain(std::iter::once(&route[0])) {
        let d = cost(prev, c);
        let arrival = time + d;
        fo += d;
        let (a, b) = windows.windows[c];
        fv += (arrival - b).max(0);
        time = arrival.max(a) + windows.service[c];
        prev = c;
    }
    SolutionPair { fv, fo }
}

/// Simulates `tour` in its stored direction starting from the depot.
pub fn violation_tsptw(inst: &Instance, windows: &TimeWindowData, tour: &Tour) -> SolutionPair {
    simulate(|i, j| inst.cost(i, j), windows, &tour.rotated_from(windows.depot))
}

/// The better of the two directions of `tour`, with its route.
fn best_direction(inst: &Instance, windows: &TimeWindowData, tour: &Tour) -> (SolutionPair, Vec<City>) {
    let fwd = tour.rotated_from(windows.depot);
    let bwd = tour.reversed_from(windows.depot);
    let a = simulate(|i, j| inst.cost(i, j), windows, &fwd);
    let b = simulate(|i, j| inst.cost(i, j), windows, &bwd);
    if better(b, a) {
        (b, bwd)
    } else {
        (a, fwd)
    }
}

/// Directed costs turned symmetric on `2n - 1` nodes. Node 0 is the depot;
/// city `i > 0` becomes an entry node `i` and an exit node `n - 1 + i`
/// joined by a zero-cost link. An arc `i -> j` is the edge from the exit of
/// `i` to the entry of `j` at cost `c(i, j) + M`.
#[derive(Debug, Clone)]
pub struct JvTransform {
    pub instance: Instance,
    pub n: usize,
    pub big_m: i64,
    /// Transformed length minus directed length of every encoded route.
    pub offset: i64,
}

pub fn jv_transform(costs: &[i64], n: usize) -> Result<JvTransform> {
    if n < 3 || costs.len() != n * n {
        return Err(Error::Instance(format!("need an n x n matrix with n >= 3, got {} entries", costs.len())));
    }
    if costs.iter().any(|&c| c < 0) {
        return Err(Error::Instance("directed costs must be nonnegative".into()));
    }
    let max_c = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| costs[i * n + j]))
        .max()
        .unwrap_or(0);
    let big_m = n as i64 * max_c + 1;
    let forbidden = (n as i64 + 2) * big_m;
    let size = 2 * n - 1;
    let mut m = vec![forbidden; size * size];
    for v in 0..size {
        m[v * size + v] = 0;
    }
    let mut set = |a: usize, b: usize, c: i64| {
        m[a * size + b] = c;
        m[b * size + a] = c;
    };
    let entry = |i: City| if i == 0 { 0 } else { i };
    let exit = |i: City| if i == 0 { 0 } else { n - 1 + i };
    for i in 1..n {
        set(entry(i), exit(i), 0);
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                set(exit(i), entry(j), costs[i * n + j] + big_m);
            }
        }
    }
    let instance = Instance::from_matrix("jv", size, m)?;
    Ok(JvTransform {
        instance,
        n,
        big_m,
        offset: n as i64 * big_m,
    })
}

impl JvTransform {
    pub fn entry(&self, c: City) -> usize {
        c
    }

    pub fn exit(&self, c: City) -> usize {
        if c == 0 {
            0
        } else {
            self.n - 1 + c
        }
    }

    /// The transformed tour of a directed route starting at the depot.
    pub fn encode(&self, route: &[City]) -> Tour {
        let mut order = Vec::with_capacity(2 * self.n - 1);
        order.push(0);
        for &c in &route[1..] {
            order.push(self.entry(c));
            order.push(self.exit(c));
        }
        Tour::new(order).expect("route visits every city once")
    }

    /// The directed route encoded by `tour`, if every link is in place and
    /// no forbidden edge is used.
    pub fn recover(&self, tour: &Tour) -> Option<Vec<City>> {
        let n = self.n;
        let is_entry = |v: usize| v >= 1 && v < n;
        let (p, q) = tour.neighbors(0);
        let forward = match (is_entry(p), is_entry(q)) {
            (false, true) => true,
            (true, false) => false,
            _ => return None,
        };
        let step = |v: usize| if forward { tour.next(v) } else { tour.prev(v) };
        let mut route = Vec::with_capacity(n);
        route.push(0);
        let mut v = step(0);
        while v != 0 {
            if !is_entry(v) {
                return None;
            }
            let out = step(v);
            if out != self.exit(v) {
                return None;
            }
            route.push(v);
            v = step(out);
        }
        (route.len() == n).then_some(route)
    }
}

/// A TSPTW instance with directed costs.
#[derive(Debug, Clone)]
pub struct TsptwProblem {
    name: String,
    n: usize,
    costs: Vec<i64>,
    windows: TimeWindowData,
    symmetric: Option<Instance>,
}

impl TsptwProblem {
    /// Wraps a symmetric instance.
    pub fn new(inst: &Instance, windows: TimeWindowData) -> Result<Self> {
        let n = inst.n();
        check_windows(n, &windows)?;
        let costs = (0..n * n).map(|k| inst.cost(k / n, k % n)).collect();
        Ok(Self {
            name: inst.name().to_string(),
            n,
            costs,
            windows,
            symmetric: Some(inst.clone()),
        })
    }

    /// From a row-major directed matrix. Symmetric matrices are searched
    /// directly, others through [`jv_transform`].
    pub fn from_matrix(name: impl Into<String>, n: usize, costs: Vec<i64>, windows: TimeWindowData) -> Result<Self> {
        check_windows(n, &windows)?;
        if costs.len() != n * n {
            return Err(Error::Instance(format!("matrix has {} entries, expected {}", costs.len(), n * n)));
        }
        let name = name.into();
        let sym = (0..n).all(|i| (0..n).all(|j| costs[i * n + j] == costs[j * n + i]));
        let symmetric = if sym {
            Some(Instance::from_matrix(name.clone(), n, costs.clone())?)
        } else {
            None
        };
        Ok(Self {
            name,
            n,
            costs,
            windows,
            symmetric,
        })
    }

    pub fn from_raw(raw: &RawInstance, windows: TimeWindowData) -> Result<Self> {
        match &raw.matrix {
            Some(m) => Self::from_matrix(raw.name.clone(), raw.dimension, m.clone(), windows),
            None => Self::new(&Instance::from_raw(raw)?, windows),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cost(&self, i: City, j: City) -> i64 {
        self.costs[i * self.n + j]
    }

    pub fn windows(&self) -> &TimeWindowData {
        &self.windows
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric.is_some()
    }

    /// Lateness and length of a directed route from the depot.
    pub fn evaluate(&self, route: &[City]) -> SolutionPair {
        simulate(|i, j| self.cost(i, j), &self.windows, route)
    }
}

fn check_windows(n: usize, windows: &TimeWindowData) -> Result<()> {
    if windows.len() != n || windows.service.len() != n {
        return Err(Error::Instance(format!("{} windows for {n} cities", windows.len())));
    }
    if windows.depot != 0 {
        return Err(Error::Instance("the depot must be the first city".into()));
    }
    Ok(())
}

/// Minimises `(violation, length)` lexicographically. Without an iteration
/// cap the run is time-limited, and strategy stagnation is measured in
/// seconds.
pub fn solve_tsptw(problem: &TsptwProblem, config: &SolverConfig) -> Result<SolveResult> {
    config.check()?;
    let start = Instant::now();
    let (i_max, t_max) = config.tsptw_limits(problem.n);
    let budget = config
        .rl
        .n_max
        .unwrap_or(StagnationBudget::Seconds(t_max / 20.0));

    match &problem.symmetric {
        Some(inst) => {
            let prepared = prepare(inst, config);
            let limits = Limits {
                i_max,
                t_max,
                budget,
                start,
            };
            let evaluate = |t: &Tour| best_direction(inst, &problem.windows, t).0;
            let kick = |best: Option<&Tour>, inst: &Instance, cs: &CandidateSets, rng: &mut ChaCha8Rng| {
                choose_initial_tour(best, inst, cs, rng)
            };
            let objective = Objective::Pair {
                evaluate: &evaluate,
                kick: &kick,
            };
            let out = search(inst, &prepared, config, &limits, &objective);
            let route = best_direction(inst, &problem.windows, &out.best_tour).1;
            let mut result = out.finish(inst, config, &prepared, Some(route));
            result.instance = problem.name.clone();
            Ok(result)
        }
        None => {
            let jv = jv_transform(&problem.costs, problem.n)?;
            let inst = &jv.instance;
            let prepared = prepare(inst, config);
            let limits = Limits {
                i_max,
                t_max,
                budget,
                start,
            };
            let evaluate = |t: &Tour| match jv.recover(t) {
                Some(route) => problem.evaluate(&route),
                None => SolutionPair {
                    fv: INVALID_VIOLATION,
                    fo: t.length(inst),
                },
            };
            let kick = |best: Option<&Tour>, inst: &Instance, cs: &CandidateSets, rng: &mut ChaCha8Rng| match best {
                None => {
                    let t = choose_initial_tour(None, inst, cs, rng);
                    if jv.recover(&t).is_some() {
                        t
                    } else {
                        jv.encode(&due_date_route(problem, rng))
                    }
                }
                Some(b) => {
                    let route = jv.recover(b).expect("best tour encodes a route");
                    let kicked = double_bridge(&Tour::new(route).expect("route is a permutation"), rng);
                    jv.encode(&kicked.rotated_from(0))
                }
            };
            let objective = Objective::Pair {
                evaluate: &evaluate,
                kick: &kick,
            };
            let out = search(inst, &prepared, config, &limits, &objective);
            let route = jv.recover(&out.best_tour);
            let mut result = out.finish(inst, config, &prepared, route);
            result.instance = problem.name.clone();
            Ok(result)
        }
    }
}

/// Customers by closing time, ties broken at random.
fn due_date_route(problem: &TsptwProblem, rng: &mut ChaCha8Rng) -> Vec<City> {
    let mut keyed: Vec<(i64, u32, City)> = (1..problem.n)
        .map(|c| (problem.windows.windows[c].1, rng.gen(), c))
        .collect();
    keyed.sort_unstable();
    std::iter::once(0).chain(keyed.into_iter().map(|(_, _, c)| c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::OPEN_WINDOW;
    use crate::metric::Metric;
    use rand::SeedableRng;

    fn pair(fv: i64, fo: i64) -> SolutionPair {
        SolutionPair { fv, fo }
    }

    #[test]
    fn lexicographic_order() {
        assert!(better(pair(0, 100), pair(5, 50)));
        assert!(!better(pair(0, 100), pair(0, 100)));
        assert!(better(pair(3, 10), pair(3, 20)));
        assert!(!better(pair(5, 50), pair(0, 100)));
    }

    #[test]
    fn open_windows_give_the_length() {
        let inst = Instance::from_coords("sq", Metric::Euc2d, vec![(0.0, 0.0), (3.0, 0.0), (3.0, 4.0), (0.0, 4.0)])
            .unwrap();
        let t = Tour::new(vec![2, 0, 1, 3]).unwrap();
        let s = violation_tsptw(&inst, &TimeWindowData::unbounded(4), &t);
        assert_eq!(s, pair(0, t.length(&inst)));
    }

    #[test]
    fn lateness_by_hand() {
        // depot 0 and cities 1, 2, all 10 apart; city 2 closes at 5
        let inst = Instance::from_matrix("u", 3, vec![0, 10, 10, 10, 0, 10, 10, 10, 0]).unwrap();
        let w = TimeWindowData::new(vec![(0, OPEN_WINDOW), (0, OPEN_WINDOW), (0, 5)], vec![0; 3]).unwrap();
        let late = violation_tsptw(&inst, &w, &Tour::new(vec![0, 1, 2]).unwrap());
        assert_eq!(late, pair(15, 30));
        let early = violation_tsptw(&inst, &w, &Tour::new(vec![0, 2, 1]).unwrap());
        assert_eq!(early, pair(5, 30));
    }

    #[test]
    fn waiting_and_service() {
        let inst = Instance::from_matrix("u", 3, vec![0, 10, 10, 10, 0, 10, 10, 10, 0]).unwrap();
        // wait at 1 until 50, serve 5, reach 2 at 65 > 60, back at 75 > 70
        let w = TimeWindowData::new(vec![(0, 70), (50, 100), (0, 60)], vec![0, 5, 0]).unwrap();
        let s = violation_tsptw(&inst, &w, &Tour::new(vec![0, 1, 2]).unwrap());
        assert_eq!(s, pair(5 + 5, 30));
    }

    fn directed_brute_force(costs: &[i64], n: usize) -> i64 {
        let mut best = i64::MAX;
        let mut rest: Vec<City> = (1..n).collect();
        permute(&mut rest, 0, &mut |p| {
            let mut len = costs[p[0]] + costs[p[p.len() - 1] * n];
            for w in p.windows(2) {
                len += costs[w[0] * n + w[1]];
            }
            best = best.min(len);
        });
        best
    }

    fn permute(v: &mut Vec<City>, k: usize, f: &mut impl FnMut(&[City])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    fn symmetric_brute_force(inst: &Instance) -> i64 {
        let n = inst.n();
        let mut best = i64::MAX;
        let mut rest: Vec<City> = (1..n).collect();
        permute(&mut rest, 0, &mut |p| {
            let mut order = vec![0];
            order.extend_from_slice(p);
            best = best.min(Tour::new(order).unwrap().length(inst));
        });
        best
    }

    #[test]
    fn transform_offset_and_round_trip() {
        let n = 5;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let costs: Vec<i64> = (0..n * n)
            .map(|k| if k / n == k % n { 0 } else { rng.gen_range(1..50) })
            .collect();
        let jv = jv_transform(&costs, n).unwrap();
        assert_eq!(jv.offset, n as i64 * jv.big_m);
        let route = vec![0, 3, 1, 4, 2];
        let t = jv.encode(&route);
        let mut directed = 0;
        for k in 0..n {
            directed += costs[route[k] * n + route[(k + 1) % n]];
        }
        assert_eq!(t.length(&jv.instance), directed + jv.offset);
        assert_eq!(jv.recover(&t).unwrap(), route);
        // the same cycle read backwards is the same route
        let back = Tour::new(t.reversed_from(0)).unwrap();
        assert_eq!(jv.recover(&back).unwrap(), route);
        assert!(jv.recover(&Tour::identity(2 * n - 1)).is_none());
    }

    #[test]
    fn transformed_optimum_is_directed_optimum() {
        // one cheap direction around the ring, an expensive reverse arc
        let n = 4;
        let mut costs = vec![0i64; 16];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    costs[i * n + j] = if j == (i + 1) % n { 1 } else { 10 };
                }
            }
        }
        costs[n] = 100;
        let jv = jv_transform(&costs, n).unwrap();
        let opt = symmetric_brute_force(&jv.instance);
        assert_eq!(opt - jv.offset, directed_brute_force(&costs, n));
        assert_eq!(opt - jv.offset, 4);
    }

    #[test]
    fn symmetric_input_keeps_its_optimum() {
        let inst = Instance::from_matrix("s", 4, vec![0, 3, 7, 2, 3, 0, 4, 6, 7, 4, 0, 5, 2, 6, 5, 0]).unwrap();
        let costs: Vec<i64> = (0..16).map(|k| inst.cost(k / 4, k % 4)).collect();
        let jv = jv_transform(&costs, 4).unwrap();
        assert_eq!(symmetric_brute_force(&jv.instance) - jv.offset, symmetric_brute_force(&inst));
    }

    #[test]
    fn asymmetric_time_window_run() {
        let n = 7;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let costs: Vec<i64> = (0..n * n)
            .map(|k| if k / n == k % n { 0 } else { rng.gen_range(1..30) })
            .collect();
        let problem = TsptwProblem::from_matrix("a", n, costs.clone(), TimeWindowData::unbounded(n)).unwrap();
        assert!(!problem.is_symmetric());
        let cfg = SolverConfig {
            i_max: Some(60),
            t_max: Some(30.0),
            ..Default::default()
        };
        let r = solve_tsptw(&problem, &cfg).unwrap();
        let route = r.route.clone().unwrap();
        assert_eq!(problem.evaluate(&route), r.best);
        assert_eq!(r.best.fv, 0);
        assert_eq!(r.best.fo, directed_brute_force(&costs, n));
    }
}
