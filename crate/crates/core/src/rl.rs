//! Rewards, Q-updates and the variable strategy controller.

use serde::{Deserialize, Serialize};

use crate::candidates::{CandidateSets, QTable};
use crate::metric::{City, Instance, MoveSequence};

/// Update rule in use. The numbering matches the controller's cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    QLearning = 1,
    Sarsa = 2,
    MonteCarlo = 3,
}

impl Strategy {
    pub fn index(self) -> u8 {
        self as u8
    }

    /// `M % 3 + 1`.
    pub fn next(self) -> Self {
        match self {
            Self::QLearning => Self::Sarsa,
            Self::Sarsa => Self::MonteCarlo,
            Self::MonteCarlo => Self::QLearning,
        }
    }
}

/// How long the best solution may stagnate before the strategy changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StagnationBudget {
    Iterations(u64),
    Seconds(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RLConfig {
    pub lambda: f64,
    pub gamma: f64,
    /// `None` picks the solver default (`I_max / 20` iterations, or
    /// `T_max / 20` seconds for time windows).
    pub n_max: Option<StagnationBudget>,
}

impl Default for RLConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            gamma: 0.9,
            n_max: None,
        }
    }
}

/// State-action pairs `(p2i, p2i+1)` of one k-opt episode with their rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub pairs: Vec<(City, City)>,
    pub rewards: Vec<f64>,
    /// Violation reduction of the whole move, for constrained rewards.
    pub delta_v: Option<f64>,
}

impl Episode {
    /// Pairs `i = 1..k-1` of a k-opt sequence with their length rewards.
    pub fn from_sequence(inst: &Instance, seq: &MoveSequence) -> Self {
        let p = seq.cities();
        let k = seq.k();
        let mut pairs = Vec::with_capacity(k - 1);
        let mut rewards = Vec::with_capacity(k - 1);
        for i in 1..k {
            let (prev, state, action) = (p[2 * i - 2], p[2 * i - 1], p[2 * i]);
            pairs.push((state, action));
            rewards.push(reward(inst, prev, state, action));
        }
        Self {
            pairs,
            rewards,
            delta_v: None,
        }
    }

    /// Replaces every reward `r` by the constrained reward for `delta_v`.
    pub fn with_violation(mut self, delta_v: f64) -> Self {
        for r in &mut self.rewards {
            *r = reward_constrained(*r, delta_v);
        }
        self.delta_v = Some(delta_v);
        self
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Removed-edge cost minus added-edge cost at `state`.
pub fn reward(inst: &Instance, prev: City, state: City, action: City) -> f64 {
    (inst.cost(prev, state) - inst.cost(state, action)) as f64
}

pub fn reward_constrained(r: f64, delta_v: f64) -> f64 {
    if delta_v * r >= 0.0 {
        delta_v + r
    } else {
        delta_v
    }
}

/// Every pair gets the sum of its own and all later rewards. Returns the
/// number of pairs missing from `q`.
pub fn update_monte_carlo(q: &mut QTable, ep: &Episode) -> usize {
    let mut skipped = 0;
    let mut tail = 0.0;
    for idx in (0..ep.len()).rev() {
        tail += ep.rewards[idx];
        let (s, a) = ep.pairs[idx];
        if q.get(s, a).is_some() {
            q.set(s, a, tail);
        } else {
            skipped += 1;
        }
    }
    skipped
}

fn blend(q: &mut QTable, ep: &Episode, lambda: f64, gamma: f64, next: impl Fn(&QTable, usize) -> f64) -> usize {
    let mut skipped = 0;
    for idx in 0..ep.len() {
        let (s, a) = ep.pairs[idx];
        let Some(old) = q.get(s, a) else {
            skipped += 1;
            continue;
        };
        let succ = if idx + 1 < ep.len() { next(q, idx + 1) } else { 0.0 };
        q.set(s, a, (1.0 - lambda) * old + lambda * (ep.rewards[idx] + gamma * succ));
    }
    skipped
}

/// On-policy TD: the successor term is the next pair of the episode.
pub fn update_sarsa(q: &mut QTable, ep: &Episode, config: &RLConfig) -> usize {
    blend(q, ep, config.lambda, config.gamma, |q, j| {
        let (s, a) = ep.pairs[j];
        q.get(s, a).unwrap_or(0.0)
    })
}

/// Off-policy TD: the successor term is the best Q over the next state's
/// candidates.
pub fn update_qlearning(q: &mut QTable, ep: &Episode, cs: &CandidateSets, config: &RLConfig) -> usize {
    blend(q, ep, config.lambda, config.gamma, |q, j| {
        let s = ep.pairs[j].0;
        cs.of(s)
            .iter()
            .filter_map(|&a| q.get(s, a))
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
            .unwrap_or(0.0)
    })
}

/// Applies `strategy`'s update.
pub fn update(q: &mut QTable, ep: &Episode, cs: &CandidateSets, strategy: Strategy, config: &RLConfig) -> usize {
    match strategy {
        Strategy::QLearning => update_qlearning(q, ep, cs, config),
        Strategy::Sarsa => update_sarsa(q, ep, config),
        Strategy::MonteCarlo => update_monte_carlo(q, ep),
    }
}

/// Cycles Q-learning, Sarsa and Monte Carlo when the best solution
/// stagnates. A controller built with [`StrategyController::fixed`] never
/// switches.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyController {
    strategy: Strategy,
    budget: StagnationBudget,
    num: u64,
    since: f64,
    fixed: bool,
    switches: u64,
}

impl StrategyController {
    pub fn new(budget: StagnationBudget) -> Self {
        Self {
            strategy: Strategy::QLearning,
            budget,
            num: 0,
            since: 0.0,
            fixed: false,
            switches: 0,
        }
    }

    pub fn fixed(strategy: Strategy) -> Self {
        Self {
            strategy,
            budget: StagnationBudget::Iterations(u64::MAX),
            num: 0,
            since: 0.0,
            fixed: true,
            switches: 0,
        }
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn stagnation(&self) -> u64 {
        self.num
    }

    pub fn switches(&self) -> u64 {
        self.switches
    }

    fn switch(&mut self) {
        if !self.fixed {
            self.strategy = self.strategy.next();
            self.switches += 1;
        }
    }

    /// Start of an iteration at `now` seconds: bumps the stagnation counter
    /// and switches when the budget is used up. Returns the strategy for
    /// this iteration.
    pub fn begin_iteration(&mut self, now: f64) -> Strategy {
        self.num += 1;
        match self.budget {
            StagnationBudget::Iterations(n_max) => {
                if self.num >= n_max {
                    self.switch();
                    self.num = 0;
                }
            }
            StagnationBudget::Seconds(secs) => {
                if now - self.since >= secs {
                    self.switch();
                    self.num = 0;
                    self.since = now;
                }
            }
        }
        self.strategy
    }

    /// End of an iteration; an improved best resets the stagnation count.
    pub fn end_iteration(&mut self, improved_best: bool, now: f64) {
        if improved_best {
            self.num = 0;
            self.since = now;
        }
    }

    /// One whole iteration driven by iteration counts: returns the strategy
    /// that was in force during it.
    pub fn strategy_step(&mut self, improved_best: bool) -> Strategy {
        let m = self.begin_iteration(0.0);
        self.end_iteration(improved_best, 0.0);
        m
    }
}

/// Per-iteration record for the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTelemetry {
    pub iteration: u64,
    pub strategy: u8,
    pub episodes: u64,
    pub accepted: u64,
    pub q_max: f64,
    pub q_min: f64,
}

/// `(max, min)` over every stored Q-value.
pub fn q_range(q: &QTable) -> (f64, f64) {
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for i in 0..q.n() {
        for &(_, v) in q.row(i) {
            hi = hi.max(v);
            lo = lo.min(v);
        }
    }
    (hi, lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(pairs: &[((City, City), f64)]) -> QTable {
        let mut q = QTable::new(10);
        for &((s, a), v) in pairs {
            q.set(s, a, v);
        }
        q
    }

    fn episode(pairs: Vec<(City, City)>, rewards: Vec<f64>) -> Episode {
        Episode {
            pairs,
            rewards,
            delta_v: None,
        }
    }

    #[test]
    fn length_rewards() {
        let inst = Instance::from_matrix("m", 3, vec![0, 10, 10, 10, 0, 4, 10, 4, 0]).unwrap();
        assert_eq!(reward(&inst, 0, 1, 0), 0.0);
        assert_eq!(reward(&inst, 0, 1, 2), 6.0);
    }

    #[test]
    fn constrained_reward_cases() {
        assert_eq!(reward_constrained(6.0, 0.0), 6.0);
        assert_eq!(reward_constrained(-3.0, 5.0), 5.0);
        assert_eq!(reward_constrained(-3.0, -2.0), -5.0);
        assert_eq!(reward_constrained(4.0, 2.0), 6.0);
    }

    #[test]
    fn monte_carlo_suffix_sums() {
        let mut q = table(&[((1, 2), 0.0), ((3, 4), 0.0), ((5, 6), 0.0)]);
        let ep = episode(vec![(1, 2), (3, 4), (5, 6)], vec![3.0, -1.0, 4.0]);
        assert_eq!(update_monte_carlo(&mut q, &ep), 0);
        assert_eq!(q.get(1, 2), Some(6.0));
        assert_eq!(q.get(3, 4), Some(3.0));
        assert_eq!(q.get(5, 6), Some(4.0));
        let mut q = table(&[((1, 2), 9.0)]);
        update_monte_carlo(&mut q, &episode(vec![(1, 2)], vec![5.0]));
        assert_eq!(q.get(1, 2), Some(5.0));
    }

    #[test]
    fn sarsa_arithmetic() {
        let cfg = RLConfig::default();
        let mut q = table(&[((1, 2), 10.0), ((3, 4), 20.0)]);
        update_sarsa(&mut q, &episode(vec![(1, 2), (3, 4)], vec![6.0, 0.0]), &cfg);
        assert!((q.get(1, 2).unwrap() - 11.4).abs() < 1e-12);
        let hard = RLConfig {
            lambda: 1.0,
            gamma: 0.0,
            n_max: None,
        };
        let mut q = table(&[((1, 2), 10.0)]);
        update_sarsa(&mut q, &episode(vec![(1, 2)], vec![5.0]), &hard);
        assert_eq!(q.get(1, 2), Some(5.0));
        let frozen = RLConfig {
            lambda: 0.0,
            gamma: 0.9,
            n_max: None,
        };
        let mut q = table(&[((1, 2), 10.0)]);
        update_sarsa(&mut q, &episode(vec![(1, 2)], vec![5.0]), &frozen);
        assert_eq!(q.get(1, 2), Some(10.0));
    }

    #[test]
    fn qlearning_arithmetic() {
        let cfg = RLConfig::default();
        let mut lists = vec![vec![]; 10];
        lists[3] = vec![4, 5, 6];
        let cs = CandidateSets::new(lists);
        let mut q = table(&[((1, 2), 0.0), ((3, 4), 2.0), ((3, 5), 10.0), ((3, 6), 5.0)]);
        update_qlearning(&mut q, &episode(vec![(1, 2), (3, 4)], vec![6.0, 0.0]), &cs, &cfg);
        assert!((q.get(1, 2).unwrap() - 1.5).abs() < 1e-12);
        // one pair: both TD rules agree
        let mut a = table(&[((1, 2), 3.0)]);
        let mut b = a.clone();
        let ep = episode(vec![(1, 2)], vec![7.0]);
        update_qlearning(&mut a, &ep, &cs, &cfg);
        update_sarsa(&mut b, &ep, &cfg);
        assert_eq!(a, b);
    }

    #[test]
    fn missing_pairs_are_counted() {
        let mut q = table(&[((1, 2), 1.0)]);
        let ep = episode(vec![(1, 2), (7, 8)], vec![1.0, 1.0]);
        assert_eq!(update_monte_carlo(&mut q, &ep), 1);
        assert_eq!(update_sarsa(&mut q, &ep, &RLConfig::default()), 1);
        assert_eq!(q.get(7, 8), None);
    }

    #[test]
    fn controller_cycle() {
        let mut c = StrategyController::new(StagnationBudget::Iterations(3));
        let seen: Vec<u8> = (0..9).map(|_| c.strategy_step(false).index()).collect();
        assert_eq!(seen, vec![1, 1, 2, 2, 2, 3, 3, 3, 1]);
        let mut c = StrategyController::new(StagnationBudget::Iterations(3));
        assert!((0..100).all(|_| c.strategy_step(true) == Strategy::QLearning));
        let mut c = StrategyController::fixed(Strategy::Sarsa);
        assert!((0..100).all(|_| c.strategy_step(false) == Strategy::Sarsa));
    }

    #[test]
    fn controller_in_seconds() {
        let mut c = StrategyController::new(StagnationBudget::Seconds(1.0));
        assert_eq!(c.begin_iteration(0.5), Strategy::QLearning);
        c.end_iteration(true, 0.6);
        assert_eq!(c.begin_iteration(1.5), Strategy::QLearning);
        c.end_iteration(false, 1.5);
        assert_eq!(c.begin_iteration(1.7), Strategy::Sarsa);
    }
}
