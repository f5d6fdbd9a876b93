use rand::Rng;

use crate::candidates::CandidateSets;
use crate::metric::{City, Instance, Tour};

/// Greedy walk from a random start: next is the first unvisited candidate
/// in list order, else the nearest unvisited city.
pub fn greedy_tour<R: Rng>(inst: &Instance, cs: &CandidateSets, rng: &mut R) -> Tour {
    let n = inst.n();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = rng.gen_range(0..n);
    used[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let next = cs.of(cur).iter().copied().find(|&c| !used[c]).unwrap_or_else(|| {
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
            bj
        });
        used[next] = true;
        order.push(next);
        cur = next;
    }
    Tour::new(order).expect("greedy walk visits every city once")
}

/// Longest segment moved by [`double_bridge`].
pub fn bridge_segment_cap(n: usize) -> usize {
    ((n.saturating_sub(1)) / 3).clamp(1, 50)
}

/// Swaps two adjacent random segments `B C` of lengths `1..=cap`, turning
/// `R B C` into `R C B`. Three tour edges change and no segment is reversed.
pub fn double_bridge<R: Rng>(tour: &Tour, rng: &mut R) -> Tour {
    let n = tour.len();
    let cap = bridge_segment_cap(n);
    let s = rng.gen_range(0..n);
    let l1 = rng.gen_range(1..=cap);
    let l2 = rng.gen_range(1..=cap);
    let order = tour.order();
    let at = |k: usize| order[(s + k) % n];
    let mut out: Vec<City> = Vec::with_capacity(n);
    out.extend((l1..l1 + l2).map(at));
    out.extend((0..l1).map(at));
    out.extend((l1 + l2..n).map(at));
    Tour::new(out).expect("segment swap keeps a permutation")
}

/// First iteration: a greedy candidate walk. Later: a double bridge kick of
/// the best tour.
pub fn choose_initial_tour<R: Rng>(best: Option<&Tour>, inst: &Instance, cs: &CandidateSets, rng: &mut R) -> Tour {
    match best {
        None => greedy_tour(inst, cs, rng),
        Some(b) => double_bridge(b, rng),
    }
}
