//! Minimum 1-trees under node penalties, alpha-nearness and the
//! subgradient ascent that tightens the 1-tree bound.

use serde::{Deserialize, Serialize};

use crate::metric::{City, Instance};

/// Node penalties, in cost units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiVector {
    pub pi: Vec<i64>,
}

impl PiVector {
    pub fn zeros(n: usize) -> Self {
        Self { pi: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn sum(&self) -> i64 {
        self.pi.iter().sum()
    }

    /// `d(i,j) + pi_i + pi_j`.
    #[inline]
    pub fn cost(&self, inst: &Instance, i: City, j: City) -> i64 {
        inst.cost(i, j) + self.pi[i] + self.pi[j]
    }
}

/// A spanning tree on all nodes but `special`, plus two edges at `special`.
#[derive(Debug, Clone)]
pub struct OneTree {
    /// Parent links of the spanning tree on `V \ {special}`; `None` for the
    /// root and for `special` itself.
    pub parent: Vec<Option<City>>,
    pub special: City,
    /// `(special, a)` and `(special, b)` with `d_pi(special, a) <= d_pi(special, b)`.
    pub special_edges: [(City, City); 2],
    /// Length under the penalised costs.
    pub length: i64,
    pub degrees: Vec<usize>,
    pub pi: PiVector,
}

impl OneTree {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    /// All `n` edges as `(min, max)` pairs.
    pub fn edges(&self) -> Vec<(City, City)> {
        let mut e: Vec<(City, City)> = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| (c.min(p), c.max(p))))
            .collect();
        for &(a, b) in &self.special_edges {
            e.push((a.min(b), a.max(b)));
        }
        e
    }

    pub fn contains(&self, i: City, j: City) -> bool {
        self.parent[i] == Some(j)
            || self.parent[j] == Some(i)
            || self
                .special_edges
                .iter()
                .any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i))
    }

    /// `w(pi) = L(T_pi) - 2 * sum(pi)`.
    pub fn bound(&self) -> i64 {
        self.length - 2 * self.pi.sum()
    }

    pub fn is_tour(&self) -> bool {
        self.degrees.iter().all(|&d| d == 2)
    }
}

/// Dense O(n^2) Prim over all cities. Returns parent links rooted at 0 and
/// the tree weight.
fn prim(inst: &Instance, pi: &PiVector) -> (Vec<Option<City>>, i64) {
    let n = inst.n();
    let mut in_tree = vec![false; n];
    let mut best = vec![i64::MAX; n];
    let mut from: Vec<Option<City>> = vec![None; n];
    best[0] = 0;
    let mut total = 0;
    for _ in 0..n {
        let mut u = usize::MAX;
        let mut bu = i64::MAX;
        for c in 0..n {
            if !in_tree[c] && best[c] < bu {
                bu = best[c];
                u = c;
            }
        }
        in_tree[u] = true;
        total += bu;
        for c in 0..n {
            if !in_tree[c] {
                let d = pi.cost(inst, u, c);
                if d < best[c] {
                    best[c] = d;
                    from[c] = Some(u);
                }
            }
        }
    }
    (from, total)
}

/// The cheapest `d_pi(v, j)` over `j` other than `v` and `skip`, ties by index.
fn cheapest_excluding(inst: &Instance, pi: &PiVector, v: City, skip: City) -> (City, i64) {
    let mut bj = usize::MAX;
    let mut bd = i64::MAX;
    for j in 0..inst.n() {
        if j != v && j != skip {
            let d = pi.cost(inst, v, j);
            if d < bd {
                bd = d;
                bj = j;
            }
        }
    }
    (bj, bd)
}

/// Minimum 1-tree under `pi`. The special node is the minimum spanning tree
/// leaf whose second incident edge is the most expensive.
pub fn minimum_one_tree(inst: &Instance, pi: &PiVector) -> OneTree {
    let n = inst.n();
    assert!(n >= 3, "1-tree needs at least 3 cities");
    assert_eq!(pi.len(), n);
    let (mut parent, mst) = prim(inst, pi);

    let mut deg = vec![0usize; n];
    for (c, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            deg[c] += 1;
            deg[p] += 1;
        }
    }

    let mut chosen: Option<(City, City, City, i64)> = None;
    for v in 0..n {
        if deg[v] != 1 {
            continue;
        }
        let tree_nb = match parent[v] {
            Some(p) => p,
            None => (0..n).find(|&c| parent[c] == Some(v)).unwrap(),
        };
        let (second, d2) = cheapest_excluding(inst, pi, v, tree_nb);
        if chosen.map_or(true, |(_, _, _, best)| d2 > best) {
            chosen = Some((v, tree_nb, second, d2));
        }
    }
    let (v, a, b, d2) = chosen.expect("a spanning tree on 3+ nodes has a leaf");

    // detach v: if it was the root, its single child becomes the root
    if parent[v].is_some() {
        parent[v] = None;
    } else {
        parent[a] = None;
    }
    deg[b] += 1;
    deg[v] += 1;

    OneTree {
        parent,
        special: v,
        special_edges: [(v, a), (v, b)],
        length: mst + d2,
        degrees: deg,
        pi: pi.clone(),
    }
}

/// Anything that can hand out full rows of alpha values.
pub trait AlphaSource {
    fn n(&self) -> usize;
    /// Fills `out` with `alpha(i, j)` for every `j`; `out[i]` is 0.
    fn alpha_row(&self, i: City, out: &mut Vec<i64>);
}

/// Alpha values computed row by row in O(n) each, without storing the
/// full table.
pub struct AlphaRows<'a> {
    inst: &'a Instance,
    tree: &'a OneTree,
    adj: Vec<Vec<City>>,
    /// `d_pi` of the second special edge.
    second: i64,
}

impl<'a> AlphaRows<'a> {
    pub fn new(inst: &'a Instance, tree: &'a OneTree) -> Self {
        let n = inst.n();
        let mut adj = vec![Vec::new(); n];
        for (c, p) in tree.parent.iter().enumerate() {
            if let Some(p) = *p {
                adj[c].push(p);
                adj[p].push(c);
            }
        }
        let (v, b) = tree.special_edges[1];
        Self {
            inst,
            tree,
            adj,
            second: tree.pi.cost(inst, v, b),
        }
    }

    /// Largest penalised tree edge on the path from `i` to every node of
    /// `V \ {special}`.
    fn beta_row(&self, i: City, beta: &mut [i64], stack: &mut Vec<City>) {
        let pi = &self.tree.pi;
        beta.fill(i64::MIN);
        beta[i] = i64::MIN + 1;
        stack.clear();
        stack.push(i);
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if beta[w] == i64::MIN {
                    let d = pi.cost(self.inst, u, w);
                    beta[w] = if u == i { d } else { beta[u].max(d) };
                    stack.push(w);
                }
            }
        }
    }
}

impl AlphaSource for AlphaRows<'_> {
    fn n(&self) -> usize {
        self.inst.n()
    }

    fn alpha_row(&self, i: City, out: &mut Vec<i64>) {
        let n = self.inst.n();
        let pi = &self.tree.pi;
        let v = self.tree.special;
        out.clear();
        out.resize(n, 0);
        if i == v {
            for j in 0..n {
                out[j] = if j == v || self.tree.contains(v, j) {
                    0
                } else {
                    pi.cost(self.inst, v, j) - self.second
                };
            }
            return;
        }
        let mut stack = Vec::new();
        self.beta_row(i, out, &mut stack);
        for j in 0..n {
            out[j] = if j == i {
                0
            } else if j == v {
                if self.tree.contains(v, i) {
                    0
                } else {
                    pi.cost(self.inst, v, i) - self.second
                }
            } else {
                pi.cost(self.inst, i, j) - out[j]
            };
        }
    }
}

/// Alpha values for every pair, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaTable {
    n: usize,
    alpha: Vec<i64>,
}

impl AlphaTable {
    pub fn get(&self, i: City, j: City) -> i64 {
        self.alpha[i * self.n + j]
    }

    pub fn from_source(src: &impl AlphaSource) -> Self {
        let n = src.n();
        let mut alpha = Vec::with_capacity(n * n);
        let mut row = Vec::new();
        for i in 0..n {
            src.alpha_row(i, &mut row);
            alpha.extend_from_slice(&row);
        }
        Self { n, alpha }
    }
}

impl AlphaSource for AlphaTable {
    fn n(&self) -> usize {
        self.n
    }

    fn alpha_row(&self, i: City, out: &mut Vec<i64>) {
        out.clear();
        out.extend_from_slice(&self.alpha[i * self.n..(i + 1) * self.n]);
    }
}

/// `alpha(i,j) = L(T+(i,j)) - L(T)` for every pair, where `T+(i,j)` is the
/// minimum 1-tree containing `(i,j)` with the same special node.
pub fn alpha_values(inst: &Instance, tree: &OneTree) -> AlphaTable {
    AlphaTable::from_source(&AlphaRows::new(inst, tree))
}

/// Subgradient ascent parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    /// Non-improving iterations before the step is halved.
    pub patience: usize,
    /// Iteration budget; `None` means `min(1000, 50 + n/10)`.
    pub max_iterations: Option<usize>,
    /// Multiplier on the initial step `L(T)/(2n)`.
    pub step_scale: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            patience: 3,
            max_iterations: None,
            step_scale: 1.0,
        }
    }
}

impl AscentConfig {
    pub fn budget(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or_else(|| (50 + n / 10).min(1000))
    }
}

/// Outcome of [`ascend_pi`]: the best penalties seen and the 1-tree there.
#[derive(Debug, Clone)]
pub struct Ascent {
    pub pi: PiVector,
    pub w: i64,
    pub tree: OneTree,
    /// Bound at `pi = 0`.
    pub initial_w: i64,
    pub iterations: usize,
}

impl Ascent {
    pub fn alpha_rows<'a>(&'a self, inst: &'a Instance) -> AlphaRows<'a> {
        AlphaRows::new(inst, &self.tree)
    }
}

/// Maximises `w(pi)` by moving each penalty along `degree - 2`.
pub fn ascend_pi(inst: &Instance, config: &AscentConfig) -> Ascent {
    let n = inst.n();
    let mut pi = PiVector::zeros(n);
    let mut tree = minimum_one_tree(inst, &pi);
    let initial_w = tree.bound();
    let mut best = (initial_w, tree.clone());
    let mut iterations = 0;
    if !tree.is_tour() {
        let scaled = (tree.length as f64 * config.step_scale / (2 * n) as f64) as i64;
        let mut step = scaled.max(1);
        let mut stale = 0;
        for _ in 0..config.budget(n) {
            iterations += 1;
            for (c, p) in pi.pi.iter_mut().enumerate() {
                *p += step * (tree.degrees[c] as i64 - 2);
            }
            tree = minimum_one_tree(inst, &pi);
            let w = tree.bound();
            if w > best.0 {
                best = (w, tree.clone());
                stale = 0;
            } else {
                stale += 1;
                if stale >= config.patience.max(1) {
                    step = (step / 2).max(1);
                    stale = 0;
                }
            }
            if tree.is_tour() {
                break;
            }
        }
    }
    let (w, tree) = best;
    Ascent {
        pi: tree.pi.clone(),
        w,
        tree,
        initial_w,
        iterations,
    }
}
