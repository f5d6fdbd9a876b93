//! The outer iteration loop for the TSP and the time-window variant.

mod init;
mod tsptw;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::candidates::{alpha_candidates, init_q_alpha, init_q_popmusic, order_by_alpha, CandidateSets, QTable};
use crate::error::{Error, Result};
use crate::kopt::{k_opt, Acceptor, KOptConfig, Shorter};
use crate::metric::{City, Instance, Tour};
use crate::onetree::{ascend_pi, minimum_one_tree, AlphaRows, AscentConfig, PiVector};
use crate::popmusic::{adjacency, popmusic_candidate_edges, PopmusicConfig};
use crate::rl::{q_range, update, Episode, IterationTelemetry, RLConfig, StagnationBudget, Strategy, StrategyController};

pub use init::{bridge_segment_cap, choose_initial_tour, double_bridge, greedy_tour};
pub use tsptw::{
    better, jv_transform, solve_tsptw, violation_tsptw, JvTransform, SolutionPair, TsptwProblem, INVALID_VIOLATION,
};

/// Candidate source, list ordering and update rule of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "lkh-alpha")]
    LkhAlpha,
    #[serde(rename = "lkh-popmusic")]
    LkhPopmusic,
    #[serde(rename = "fixq-alpha")]
    FixqAlpha,
    #[serde(rename = "fixq-popmusic")]
    FixqPopmusic,
    #[serde(rename = "vsr-alpha")]
    VsrAlpha,
    #[serde(rename = "vsr-popmusic")]
    VsrPopmusic,
    #[serde(rename = "q-only")]
    QOnly,
    #[serde(rename = "sarsa-only")]
    SarsaOnly,
    #[serde(rename = "mc-only")]
    McOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Learning {
    Off,
    Variable,
    Fixed(Strategy),
}

impl Mode {
    pub const ALL: [Mode; 9] = [
        Mode::LkhAlpha,
        Mode::LkhPopmusic,
        Mode::FixqAlpha,
        Mode::FixqPopmusic,
        Mode::VsrAlpha,
        Mode::VsrPopmusic,
        Mode::QOnly,
        Mode::SarsaOnly,
        Mode::McOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::LkhAlpha => "lkh-alpha",
            Mode::LkhPopmusic => "lkh-popmusic",
            Mode::FixqAlpha => "fixq-alpha",
            Mode::FixqPopmusic => "fixq-popmusic",
            Mode::VsrAlpha => "vsr-alpha",
            Mode::VsrPopmusic => "vsr-popmusic",
            Mode::QOnly => "q-only",
            Mode::SarsaOnly => "sarsa-only",
            Mode::McOnly => "mc-only",
        }
    }

    pub fn uses_popmusic(self) -> bool {
        matches!(self, Mode::LkhPopmusic | Mode::FixqPopmusic | Mode::VsrPopmusic)
    }

    /// Lists ordered by alpha rather than by Q.
    pub fn is_baseline(self) -> bool {
        matches!(self, Mode::LkhAlpha | Mode::LkhPopmusic)
    }

    /// Whether Q-values change during the run.
    pub fn learns(self) -> bool {
        self.learning() != Learning::Off
    }

    fn learning(self) -> Learning {
        match self {
            Mode::LkhAlpha | Mode::LkhPopmusic | Mode::FixqAlpha | Mode::FixqPopmusic => Learning::Off,
            Mode::VsrAlpha | Mode::VsrPopmusic => Learning::Variable,
            Mode::QOnly => Learning::Fixed(Strategy::QLearning),
            Mode::SarsaOnly => Learning::Fixed(Strategy::Sarsa),
            Mode::McOnly => Learning::Fixed(Strategy::MonteCarlo),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Iteration cap; `None` picks `n` (`n/5` from 10,000 cities on), or no
    /// cap with time windows.
    pub i_max: Option<u64>,
    /// Time cap in seconds; `None` picks `n`, or `n/10` with time windows.
    pub t_max: Option<f64>,
    pub seed: u64,
    pub rl: RLConfig,
    pub kopt: KOptConfig,
    pub ascent: AscentConfig,
    pub popmusic: PopmusicConfig,
    /// Candidates kept per city for alpha-based modes.
    pub width: usize,
    /// Re-check the tour and its length after every applied move.
    pub validate: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: Mode::VsrAlpha,
            i_max: None,
            t_max: None,
            seed: 1,
            rl: RLConfig::default(),
            kopt: KOptConfig::default(),
            ascent: AscentConfig::default(),
            popmusic: PopmusicConfig::default(),
            width: crate::candidates::DEFAULT_WIDTH,
            validate: false,
        }
    }
}

impl SolverConfig {
    pub fn with_mode(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.i_max == Some(0) && self.t_max.is_some_and(|t| t <= 0.0) {
            return Err(Error::Config("no stopping criterion: i_max = 0 and t_max <= 0".into()));
        }
        if self.i_max == Some(0) {
            return Err(Error::Config("i_max must be at least 1".into()));
        }
        if self.t_max.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::Config("t_max must be positive".into()));
        }
        if self.width == 0 {
            return Err(Error::Config("candidate width must be at least 1".into()));
        }
        if self.kopt.breadth == 0 {
            return Err(Error::Config("breadth must be at least 1".into()));
        }
        if self.kopt.k_max < 2 {
            return Err(Error::Config("k_max must be at least 2".into()));
        }
        if !(self.rl.lambda > 0.0 && self.rl.lambda <= 1.0) {
            return Err(Error::Config("lambda must lie in (0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.rl.gamma) {
            return Err(Error::Config("gamma must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Effective `(i_max, t_max)` for a plain TSP of `n` cities.
    pub fn tsp_limits(&self, n: usize) -> (u64, f64) {
        let i = self
            .i_max
            .unwrap_or(if n >= 10_000 { n as u64 / 5 } else { n as u64 });
        (i, self.t_max.unwrap_or(n as f64))
    }

    /// Effective `(i_max, t_max)` with time windows over `n` cities.
    pub fn tsptw_limits(&self, n: usize) -> (u64, f64) {
        (self.i_max.unwrap_or(u64::MAX), self.t_max.unwrap_or(n as f64 / 10.0))
    }
}

/// Candidate lists and Q-table ready for the search.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub candidates: CandidateSets,
    pub q: QTable,
    /// Best lower bound found; the zero-penalty bound for POPMUSIC modes.
    pub lower_bound: i64,
    /// Lower bound with zero penalties.
    pub initial_bound: i64,
    pub seconds: f64,
}

/// Builds the mode's candidate lists, running the penalty ascent for the
/// alpha modes. Only the mode, widths and the ascent and POPMUSIC settings
/// are read; the run seed is not, so one result serves every seed.
pub fn prepare(inst: &Instance, config: &SolverConfig) -> Prepared {
    let start = Instant::now();
    let n = inst.n();
    let width = config.width.min(n - 1);
    let (candidates, q, lower_bound, initial_bound) = if config.mode.uses_popmusic() {
        // POPMUSIC modes rank by alpha at zero penalties
        let tree = minimum_one_tree(inst, &PiVector::zeros(n));
        let alpha = AlphaRows::new(inst, &tree);
        let edges = popmusic_candidate_edges(inst, &config.popmusic);
        let (cs, q) = if config.mode.is_baseline() {
            let raw = CandidateSets::new(adjacency(n, &edges));
            (order_by_alpha(inst, &raw, &alpha), QTable::new(n))
        } else {
            let (q, cs) = init_q_popmusic(inst, &edges, &alpha, tree.length, width);
            (cs, q)
        };
        (cs, q, tree.bound(), tree.bound())
    } else {
        let ascent = ascend_pi(inst, &config.ascent);
        debug!(
            "{}: ascent {} iterations, bound {} -> {}",
            inst.name(),
            ascent.iterations,
            ascent.initial_w,
            ascent.w
        );
        let alpha = ascent.alpha_rows(inst);
        let (cs, q) = if config.mode.is_baseline() {
            (alpha_candidates(inst, &alpha, width), QTable::new(n))
        } else {
            let (q, cs) = init_q_alpha(inst, &alpha, ascent.w, width);
            (cs, q)
        };
        (cs, q, ascent.w, ascent.initial_w)
    };
    let seconds = start.elapsed().as_secs_f64();
    debug!("{}: candidates ready in {:.3}s", inst.name(), seconds);
    Prepared {
        candidates,
        q,
        lower_bound,
        initial_bound,
        seconds,
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub instance: String,
    pub mode: Mode,
    pub seed: u64,
    /// Best tour on the searched instance.
    pub tour: Tour,
    /// Directed route from the depot, for time-window runs.
    pub route: Option<Vec<City>>,
    pub best: SolutionPair,
    pub iterations: u64,
    pub best_iteration: u64,
    /// Wall time including candidate construction.
    pub seconds: f64,
    pub setup_seconds: f64,
    /// Best objective after each iteration.
    pub trajectory: Vec<(u64, i64)>,
    /// Best violation after each iteration; empty for the plain TSP.
    pub violation_trajectory: Vec<(u64, i64)>,
    pub telemetry: Vec<IterationTelemetry>,
    pub kopt_calls: u64,
    pub moves: u64,
    /// Episode pairs that had no Q-entry.
    pub skipped_updates: u64,
    /// Moves whose realised length change differed from their gain, or that
    /// left an invalid tour. Only counted with `validate`.
    pub accounting_errors: u64,
    pub lower_bound: i64,
}

impl SolveResult {
    pub fn best_length(&self) -> i64 {
        self.best.fo
    }

    pub fn record(&self) -> RunRecord {
        RunRecord {
            instance: self.instance.clone(),
            mode: self.mode,
            seed: self.seed,
            best_length: self.best.fo,
            fv: self.best.fv,
            iterations: self.iterations,
            seconds: self.seconds,
            trajectory: self.trajectory.clone(),
        }
    }
}

/// The serialised summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub mode: Mode,
    pub seed: u64,
    pub best_length: i64,
    pub fv: i64,
    pub iterations: u64,
    pub seconds: f64,
    pub trajectory: Vec<(u64, i64)>,
}

/// Solves a symmetric TSP. Timing covers candidate construction.
pub fn solve(inst: &Instance, config: &SolverConfig) -> Result<SolveResult> {
    config.check()?;
    let start = Instant::now();
    let prepared = prepare(inst, config);
    solve_from(inst, &prepared, config, start)
}

/// Solves with candidates built earlier by [`prepare`]; the clock starts now.
pub fn solve_prepared(inst: &Instance, prepared: &Prepared, config: &SolverConfig) -> Result<SolveResult> {
    config.check()?;
    solve_from(inst, prepared, config, Instant::now())
}

fn solve_from(inst: &Instance, prepared: &Prepared, config: &SolverConfig, start: Instant) -> Result<SolveResult> {
    let (i_max, t_max) = config.tsp_limits(inst.n());
    let budget = config
        .rl
        .n_max
        .unwrap_or(StagnationBudget::Iterations((i_max / 20).max(1)));
    let limits = Limits {
        i_max,
        t_max,
        budget,
        start,
    };
    let out = search(inst, prepared, config, &limits, &Objective::Length);
    Ok(out.finish(inst, config, prepared, None))
}

pub(crate) struct Limits {
    pub i_max: u64,
    pub t_max: f64,
    pub budget: StagnationBudget,
    pub start: Instant,
}

impl Limits {
    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

pub(crate) type Evaluate<'a> = dyn Fn(&Tour) -> SolutionPair + 'a;
pub(crate) type Kick<'a> = dyn Fn(Option<&Tour>, &Instance, &CandidateSets, &mut ChaCha8Rng) -> Tour + 'a;

pub(crate) enum Objective<'a> {
    /// Plain tour length with incremental accounting.
    Length,
    /// Lexicographic pairs; `kick` builds each iteration's start tour.
    Pair { evaluate: &'a Evaluate<'a>, kick: &'a Kick<'a> },
}

/// Accepts a closure when the resulting tour is better under `evaluate`.
struct Lexicographic<'a> {
    evaluate: &'a Evaluate<'a>,
    current: SolutionPair,
    found: Option<SolutionPair>,
}

impl Acceptor for Lexicographic<'_> {
    fn accept(&mut self, tour: &Tour, p: &[City], _gain: i64) -> bool {
        let mut t = tour.clone();
        if t.apply(p).is_err() {
            return false;
        }
        let s = (self.evaluate)(&t);
        if better(s, self.current) {
            self.found = Some(s);
            true
        } else {
            false
        }
    }
}

pub(crate) struct Outcome {
    best_tour: Tour,
    best: SolutionPair,
    iterations: u64,
    best_iteration: u64,
    trajectory: Vec<(u64, i64)>,
    violation_trajectory: Vec<(u64, i64)>,
    telemetry: Vec<IterationTelemetry>,
    kopt_calls: u64,
    moves: u64,
    skipped: u64,
    accounting_errors: u64,
    seconds: f64,
}

impl Outcome {
    pub(crate) fn finish(
        self,
        inst: &Instance,
        config: &SolverConfig,
        prepared: &Prepared,
        route: Option<Vec<City>>,
    ) -> SolveResult {
        info!(
            "{} {} seed {}: best ({}, {}) after {} iterations in {:.2}s",
            inst.name(),
            config.mode,
            config.seed,
            self.best.fv,
            self.best.fo,
            self.iterations,
            self.seconds
        );
        SolveResult {
            instance: inst.name().to_string(),
            mode: config.mode,
            seed: config.seed,
            tour: self.best_tour,
            route,
            best: self.best,
            iterations: self.iterations,
            best_iteration: self.best_iteration,
            seconds: self.seconds,
            setup_seconds: prepared.seconds,
            trajectory: self.trajectory,
            violation_trajectory: self.violation_trajectory,
            telemetry: self.telemetry,
            kopt_calls: self.kopt_calls,
            moves: self.moves,
            skipped_updates: self.skipped,
            accounting_errors: self.accounting_errors,
            lower_bound: prepared.lower_bound,
        }
    }
}

/// Every 64th k-opt call reads the clock.
const CLOCK_STRIDE: u64 = 64;

pub(crate) fn search(
    inst: &Instance,
    prepared: &Prepared,
    config: &SolverConfig,
    limits: &Limits,
    objective: &Objective<'_>,
) -> Outcome {
    let n = inst.n();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cs = prepared.candidates.clone();
    let mut q = prepared.q.clone();
    let learning = config.mode.learning();
    let mut controller = match learning {
        Learning::Fixed(s) => StrategyController::fixed(s),
        _ => StrategyController::new(limits.budget),
    };

    let mut best: Option<(Tour, SolutionPair)> = None;
    let mut out = Outcome {
        best_tour: Tour::identity(n),
        best: SolutionPair { fv: 0, fo: 0 },
        iterations: 0,
        best_iteration: 0,
        trajectory: Vec::new(),
        violation_trajectory: Vec::new(),
        telemetry: Vec::new(),
        kopt_calls: 0,
        moves: 0,
        skipped: 0,
        accounting_errors: 0,
        seconds: 0.0,
    };
    let mut active: Vec<City> = Vec::with_capacity(n);
    let mut in_active = vec![false; n];
    let mut timed_out = false;

    while out.iterations < limits.i_max && !timed_out && limits.elapsed() < limits.t_max {
        out.iterations += 1;
        let strategy = controller.begin_iteration(limits.elapsed());
        let prev_best = best.as_ref().map(|b| &b.0);
        let mut tour = match objective {
            Objective::Length => choose_initial_tour(prev_best, inst, &cs, &mut rng),
            Objective::Pair { kick, .. } => kick(prev_best, inst, &cs, &mut rng),
        };
        let mut cur = match objective {
            Objective::Length => SolutionPair {
                fv: 0,
                fo: tour.length(inst),
            },
            Objective::Pair { evaluate, .. } => evaluate(&tour),
        };

        let mut cur_len = tour.length(inst);
        active.clear();
        active.extend(0..n);
        in_active.iter_mut().for_each(|a| *a = true);
        let mut episodes = 0;
        let mut accepted = 0;
        while !active.is_empty() {
            out.kopt_calls += 1;
            if out.kopt_calls % CLOCK_STRIDE == 0 && limits.elapsed() >= limits.t_max {
                timed_out = true;
                break;
            }
            let p1 = active.swap_remove(rng.gen_range(0..active.len()));
            in_active[p1] = false;

            let step = match objective {
                Objective::Length => k_opt(inst, &mut tour, &cs, p1, &config.kopt, &mut rng, &mut Shorter).map(|imp| {
                    let next = SolutionPair {
                        fv: 0,
                        fo: cur.fo - imp.gain,
                    };
                    (imp, next, None)
                }),
                Objective::Pair { evaluate, .. } => {
                    let mut acc = Lexicographic {
                        evaluate,
                        current: cur,
                        found: None,
                    };
                    k_opt(inst, &mut tour, &cs, p1, &config.kopt, &mut rng, &mut acc).map(|imp| {
                        let next = acc.found.expect("accepted move was evaluated");
                        let dv = (cur.fv - next.fv) as f64;
                        (imp, next, Some(dv))
                    })
                }
            };
            let Some((imp, next, dv)) = step else { continue };

            out.moves += 1;
            accepted += 1;
            cur_len -= imp.gain;
            if config.validate && (tour.validate().is_err() || tour.length(inst) != cur_len || imp.seq.gain(inst) != imp.gain)
            {
                out.accounting_errors += 1;
            }
            cur = next;

            if learning != Learning::Off {
                let mut ep = Episode::from_sequence(inst, &imp.seq);
                if let Some(dv) = dv {
                    ep = ep.with_violation(dv);
                }
                out.skipped += update(&mut q, &ep, &cs, strategy, &config.rl) as u64;
                episodes += 1;
            }
            for &c in imp.seq.cities() {
                if !in_active[c] {
                    in_active[c] = true;
                    active.push(c);
                }
            }
        }

        if learning != Learning::Off {
            cs.resort(&q);
        }
        let improved = best.as_ref().map_or(true, |(_, b)| better(cur, *b));
        if improved {
            best = Some((tour, cur));
            out.best_iteration = out.iterations;
        }
        controller.end_iteration(improved, limits.elapsed());

        let b = best.as_ref().expect("one iteration ran").1;
        out.trajectory.push((out.iterations, b.fo));
        if matches!(objective, Objective::Pair { .. }) {
            out.violation_trajectory.push((out.iterations, b.fv));
        }
        let (q_max, q_min) = if q.is_empty() { (0.0, 0.0) } else { q_range(&q) };
        out.telemetry.push(IterationTelemetry {
            iteration: out.iterations,
            strategy: strategy.index(),
            episodes,
            accepted,
            q_max,
            q_min,
        });
    }

    if let Some((t, b)) = best {
        out.best_tour = t;
        out.best = b;
    }
    out.seconds = limits.elapsed();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Metric;

    fn random_instance(seed: u64, n: usize) -> Instance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n).map(|_| (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0))).collect();
        Instance::from_coords(format!("r{seed}"), Metric::Euc2d, pts).unwrap()
    }

    fn brute_force(inst: &Instance) -> i64 {
        fn go(inst: &Instance, path: &mut Vec<City>, used: &mut [bool], len: i64, best: &mut i64) {
            let n = inst.n();
            let last = *path.last().unwrap();
            if path.len() == n {
                *best = (*best).min(len + inst.cost(last, path[0]));
                return;
            }
            for c in 1..n {
                if !used[c] && len + inst.cost(last, c) < *best {
                    used[c] = true;
                    path.push(c);
                    go(inst, path, used, len + inst.cost(last, c), best);
                    path.pop();
                    used[c] = false;
                }
            }
        }
        let mut best = i64::MAX;
        let mut used = vec![false; inst.n()];
        used[0] = true;
        go(inst, &mut vec![0], &mut used, 0, &mut best);
        best
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert!("vsr".parse::<Mode>().is_err());
    }

    #[test]
    fn config_checks() {
        let mut c = SolverConfig::default();
        assert!(c.check().is_ok());
        c.i_max = Some(0);
        assert!(c.check().is_err());
        c.i_max = Some(5);
        c.t_max = Some(0.0);
        assert!(c.check().is_err());
        let mut c = SolverConfig::default();
        c.rl.lambda = 0.0;
        assert!(c.check().is_err());
        c.rl.lambda = 1.0;
        c.rl.gamma = 0.0;
        assert!(c.check().is_ok());
        c.kopt.breadth = 0;
        assert!(c.check().is_err());
        assert_eq!(SolverConfig::default().tsp_limits(20_000).0, 4000);
        assert_eq!(SolverConfig::default().tsp_limits(200), (200, 200.0));
        assert_eq!(SolverConfig::default().tsptw_limits(50), (u64::MAX, 5.0));
    }

    #[test]
    fn small_instances_reach_the_optimum() {
        for seed in 0..6 {
            let inst = random_instance(seed, 6 + seed as usize % 4);
            let opt = brute_force(&inst);
            for mode in [Mode::LkhAlpha, Mode::VsrAlpha, Mode::VsrPopmusic, Mode::McOnly] {
                let cfg = SolverConfig {
                    mode,
                    i_max: Some(50),
                    seed,
                    validate: true,
                    ..Default::default()
                };
                let r = solve(&inst, &cfg).unwrap();
                r.tour.validate().unwrap();
                assert_eq!(r.best.fo, r.tour.length(&inst));
                assert_eq!(r.best.fo, opt, "{mode} on {}", inst.name());
                assert_eq!(r.accounting_errors, 0);
            }
        }
    }

    #[test]
    fn trajectory_is_monotone_and_runs_repeat() {
        let inst = random_instance(42, 80);
        let cfg = SolverConfig {
            mode: Mode::VsrAlpha,
            i_max: Some(30),
            seed: 3,
            validate: true,
            ..Default::default()
        };
        let a = solve(&inst, &cfg).unwrap();
        assert_eq!(a.iterations, 30);
        assert!(a.trajectory.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(a.accounting_errors, 0);
        assert!(a.best.fo >= a.lower_bound);
        let b = solve(&inst, &cfg).unwrap();
        assert_eq!(a.tour, b.tour);
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.telemetry, b.telemetry);
    }

    #[test]
    fn baseline_keeps_q_fixed_and_vsr_switches() {
        let inst = random_instance(7, 60);
        let base = solve(
            &inst,
            &SolverConfig {
                mode: Mode::FixqAlpha,
                i_max: Some(20),
                ..Default::default()
            },
        )
        .unwrap();
        let first = &base.telemetry[0];
        assert!(base.telemetry.iter().all(|t| t.q_max == first.q_max && t.q_min == first.q_min));
        assert!(base.telemetry.iter().all(|t| t.episodes == 0));

        let vsr = solve(
            &inst,
            &SolverConfig {
                mode: Mode::VsrAlpha,
                i_max: Some(40),
                rl: RLConfig {
                    n_max: Some(StagnationBudget::Iterations(1)),
                    ..Default::default()
                },
                ..Default::default()
            },
        )
        .unwrap();
        let strategies: std::collections::BTreeSet<u8> = vsr.telemetry.iter().map(|t| t.strategy).collect();
        assert_eq!(strategies.len(), 3);
    }

    #[test]
    fn time_limit_stops_the_run() {
        let inst = random_instance(9, 300);
        let cfg = SolverConfig {
            i_max: Some(u64::MAX),
            t_max: Some(0.3),
            ..Default::default()
        };
        let r = solve(&inst, &cfg).unwrap();
        assert!(r.seconds < 3.0);
        r.tour.validate().unwrap();
    }
}
