//! Experiment matrices: every instance under every mode for a number of
//! seeds, then per-row gaps against best-known values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{parse_tsplib, parse_tsptw};
use crate::metric::Instance;
use crate::solver::{better, prepare, solve_prepared, solve_tsptw, Mode, SolveResult, SolverConfig, TsptwProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    #[default]
    Tsp,
    Tsptw,
}

fn default_runs() -> usize {
    10
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// A run matrix, usually read from TOML:
///
/// ```toml
/// instances = ["data/d198.tsp", "data/p654.tsp"]
/// modes = ["lkh-alpha", "vsr-alpha"]
/// runs = 10
/// base_seed = 1
/// bks = "bks.txt"
/// output = "out"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub instances: Vec<PathBuf>,
    pub modes: Vec<Mode>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Run `k` uses seed `base_seed + k`.
    #[serde(default)]
    pub base_seed: u64,
    /// Lines of `name value`.
    #[serde(default)]
    pub bks: Option<PathBuf>,
    /// Directory receiving the report files.
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Worker threads; all hardware threads when absent.
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub problem: ProblemKind,
    #[serde(default)]
    pub tmax: Option<f64>,
    #[serde(default)]
    pub imax: Option<u64>,
    #[serde(default)]
    pub kmax: Option<usize>,
}

impl RunSpec {
    pub fn new(instances: Vec<PathBuf>, modes: Vec<Mode>) -> Self {
        Self {
            instances,
            modes,
            runs: default_runs(),
            base_seed: 0,
            bks: None,
            output: default_output(),
            workers: None,
            problem: ProblemKind::Tsp,
            tmax: None,
            imax: None,
            kmax: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    /// Reads a spec file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let mut spec = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        spec.instances.iter_mut().for_each(fix);
        if let Some(b) = spec.bks.as_mut() {
            fix(b);
        }
        fix(&mut spec.output);
        Ok(spec)
    }

    pub fn check(&self) -> Result<()> {
        if self.modes.is_empty() {
            return Err(Error::Config("at least one mode is required".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.runs as u64).map(|k| self.base_seed + k)
    }

    fn config(&self, mode: Mode, seed: u64) -> SolverConfig {
        let mut c = SolverConfig {
            mode,
            seed,
            i_max: self.imax,
            t_max: self.tmax,
            ..Default::default()
        };
        if let Some(k) = self.kmax {
            c.kopt.k_max = k;
        }
        c
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Best-known values, one `name value` pair per line; `#` starts a comment.
pub fn parse_bks(text: &str) -> Result<BTreeMap<String, i64>> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(|c: char| c.is_whitespace() || c == ',' || c == ':').filter(|s| !s.is_empty());
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Config(format!("bks line {}: expected `name value`", k + 1)));
        };
        let v: i64 = value
            .parse()
            .map_err(|_| Error::Config(format!("bks line {}: `{value}` is not an integer", k + 1)))?;
        out.insert(name.to_string(), v);
    }
    Ok(out)
}

/// One run as written to `results.json`. Wall time lives in [`Timing`] so
/// that repeated runs give identical records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub instance: String,
    pub mode: Mode,
    pub seed: u64,
    pub best_length: i64,
    pub fv: i64,
    pub iterations: u64,
    pub trajectory: Vec<(u64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub instance: String,
    pub mode: Mode,
    pub seed: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub path: String,
    pub error: String,
}

/// Aggregate of one (instance, mode) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub instance: String,
    pub n: usize,
    pub mode: Mode,
    pub runs: usize,
    pub best_length: i64,
    pub best_fv: i64,
    pub average: f64,
    /// Mean wall seconds per run.
    pub time: f64,
    /// Mean iterations per run.
    pub trials: f64,
    pub bks: Option<i64>,
    /// Mean over runs of `(length - bks) / bks`.
    pub gap: Option<f64>,
    /// Standard error of that mean.
    pub gap_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GapReport {
    pub modes: Vec<Mode>,
    pub rows: Vec<GapRow>,
    pub results: Vec<ResultEntry>,
    pub timing: Vec<Timing>,
    pub failures: Vec<Failure>,
}

struct Loaded {
    name: String,
    n: usize,
    problem: LoadedProblem,
}

enum LoadedProblem {
    Tsp(Instance),
    Tsptw(TsptwProblem),
}

fn load_instance(path: &Path, kind: ProblemKind) -> Result<Loaded> {
    let text = read(path)?;
    match kind {
        ProblemKind::Tsp => {
            let raw = parse_tsplib(&text)?;
            let inst = Instance::from_raw(&raw)?;
            Ok(Loaded {
                name: inst.name().to_string(),
                n: inst.n(),
                problem: LoadedProblem::Tsp(inst),
            })
        }
        ProblemKind::Tsptw => {
            let (mut raw, windows) = parse_tsptw(&text)?;
            if raw.name.is_empty() {
                raw.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            }
            let p = TsptwProblem::from_raw(&raw, windows)?;
            Ok(Loaded {
                name: p.name().to_string(),
                n: p.n(),
                problem: LoadedProblem::Tsptw(p),
            })
        }
    }
}

/// Solves every (instance, mode, seed) triple. Candidate construction runs
/// once per (instance, mode) and its time is added to every run's time.
/// Instances that fail to load are listed in the report.
pub fn run(spec: &RunSpec) -> Result<GapReport> {
    spec.check()?;
    let bks = match &spec.bks {
        Some(p) => parse_bks(&read(p)?)?,
        None => BTreeMap::new(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = spec.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| Error::Config(e.to_string()))?;

    let mut loaded = Vec::new();
    let mut failures = Vec::new();
    for path in &spec.instances {
        match load_instance(path, spec.problem) {
            Ok(l) => loaded.push(l),
            Err(e) => {
                warn!("skipping {}: {e}", path.display());
                failures.push(Failure {
                    path: path.display().to_string(),
                    error: e.to_string(),
                });
            }
        }
    }

    let seeds: Vec<u64> = spec.seeds().collect();
    let cells: Vec<(usize, Mode)> = (0..loaded.len())
        .flat_map(|i| spec.modes.iter().map(move |&m| (i, m)))
        .collect();

    let solved: Vec<Result<Vec<SolveResult>>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(i, mode)| {
                let l = &loaded[i];
                match &l.problem {
                    LoadedProblem::Tsp(inst) => {
                        let prepared = prepare(inst, &spec.config(mode, 0));
                        seeds
                            .par_iter()
                            .map(|&seed| {
                                let mut r = solve_prepared(inst, &prepared, &spec.config(mode, seed))?;
                                r.seconds += prepared.seconds;
                                Ok(r)
                            })
                            .collect()
                    }
                    LoadedProblem::Tsptw(p) => seeds
                        .par_iter()
                        .map(|&seed| solve_tsptw(p, &spec.config(mode, seed)))
                        .collect(),
                }
            })
            .collect()
    });

    let mut report = GapReport {
        modes: spec.modes.clone(),
        failures,
        ..Default::default()
    };
    for (&(i, mode), runs) in cells.iter().zip(solved) {
        let runs = runs?;
        let l = &loaded[i];
        let known = bks.get(&l.name).copied();
        report.rows.push(aggregate(&l.name, l.n, mode, &runs, known));
        for r in runs {
            report.results.push(ResultEntry {
                instance: l.name.clone(),
                mode,
                seed: r.seed,
                best_length: r.best.fo,
                fv: r.best.fv,
                iterations: r.iterations,
                trajectory: r.trajectory.clone(),
            });
            report.timing.push(Timing {
                instance: l.name.clone(),
                mode,
                seed: r.seed,
                seconds: r.seconds,
            });
        }
    }
    info!(
        "{} runs over {} instances, {} failed to load",
        report.results.len(),
        loaded.len(),
        report.failures.len()
    );
    Ok(report)
}

fn aggregate(name: &str, n: usize, mode: Mode, runs: &[SolveResult], bks: Option<i64>) -> GapRow {
    let k = runs.len() as f64;
    let best = runs
        .iter()
        .map(|r| r.best)
        .reduce(|a, b| if better(b, a) { b } else { a })
        .expect("at least one run");
    let gaps: Option<Vec<f64>> =
        bks.filter(|&b| b > 0).map(|b| runs.iter().map(|r| (r.best.fo - b) as f64 / b as f64).collect());
    let (gap, gap_stderr) = match &gaps {
        Some(g) => {
            let (m, se) = mean_stderr(g);
            (Some(m), Some(se))
        }
        None => (None, None),
    };
    GapRow {
        instance: name.to_string(),
        n,
        mode,
        runs: runs.len(),
        best_length: best.fo,
        best_fv: best.fv,
        average: runs.iter().map(|r| r.best.fo as f64).sum::<f64>() / k,
        time: runs.iter().map(|r| r.seconds).sum::<f64>() / k,
        trials: runs.iter().map(|r| r.iterations as f64).sum::<f64>() / k,
        bks,
        gap,
        gap_stderr,
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[derive(Serialize)]
struct ResultsFile<'a> {
    results: &'a [ResultEntry],
    failures: &'a [Failure],
    timing: &'a [Timing],
}

/// `results.json`: run records, load failures and wall times.
pub fn results_json(report: &GapReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ResultsFile {
        results: &report.results,
        failures: &report.failures,
        timing: &report.timing,
    })?)
}

/// One CSV row per (instance, mode).
pub fn results_csv(report: &GapReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(format!("csv: {e}"));
    w.write_record(["instance", "n", "mode", "runs", "best", "best_fv", "average", "time", "trials", "bks", "gap"])
        .map_err(io)?;
    for r in &report.rows {
        w.write_record([
            r.instance.clone(),
            r.n.to_string(),
            r.mode.to_string(),
            r.runs.to_string(),
            r.best_length.to_string(),
            r.best_fv.to_string(),
            format!("{:.2}", r.average),
            format!("{:.3}", r.time),
            format!("{:.1}", r.trials),
            r.bks.map(|b| b.to_string()).unwrap_or_default(),
            r.gap.map(|g| format!("{g:.6}")).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Cumulative gap curves: instances that have a gap under every mode,
/// sorted by size then name, with running sums of the per-instance gaps.
/// Columns are the 1-based instance index followed by one per mode.
pub fn emit_cumulative_gap(report: &GapReport) -> String {
    let mut per_instance: BTreeMap<(usize, &str), BTreeMap<Mode, f64>> = BTreeMap::new();
    for r in &report.rows {
        if let Some(g) = r.gap {
            per_instance.entry((r.n, r.instance.as_str())).or_default().insert(r.mode, g);
        }
    }
    let mut out = String::from("index");
    for m in &report.modes {
        let _ = write!(out, "\t{m}");
    }
    out.push('\n');
    let mut sums = vec![0.0; report.modes.len()];
    let complete = per_instance.values().filter(|g| report.modes.iter().all(|m| g.contains_key(m)));
    for (j, gaps) in complete.enumerate() {
        let _ = write!(out, "{}", j + 1);
        for (s, m) in sums.iter_mut().zip(&report.modes) {
            *s += gaps[m];
            let _ = write!(out, "\t{s:.6}");
        }
        out.push('\n');
    }
    out
}

/// Writes `results.json`, `results.csv` and `cumgap.tsv` into `dir`.
pub fn write_outputs(report: &GapReport, dir: &Path) -> Result<()> {
    let io = |p: &Path| {
        let path = p.display().to_string();
        move |source| Error::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for (file, body) in [
        ("results.json", results_json(report)?),
        ("results.csv", results_csv(report)?),
        ("cumgap.tsv", emit_cumulative_gap(report)),
    ] {
        let p = dir.join(file);
        std::fs::write(&p, body).map_err(io(&p))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(instance: &str, n: usize, mode: Mode, gap: Option<f64>) -> GapRow {
        GapRow {
            instance: instance.into(),
            n,
            mode,
            runs: 1,
            best_length: 0,
            best_fv: 0,
            average: 0.0,
            time: 0.0,
            trials: 0.0,
            bks: gap.map(|_| 1),
            gap,
            gap_stderr: gap.map(|_| 0.0),
        }
    }

    #[test]
    fn spec_defaults_and_errors() {
        let s = RunSpec::from_toml("instances = [\"a.tsp\"]\nmodes = [\"vsr-alpha\"]\n").unwrap();
        assert_eq!(s.runs, 10);
        assert_eq!(s.seeds().collect::<Vec<_>>(), (0..10).collect::<Vec<_>>());
        assert!(RunSpec::from_toml("instances = []\nmodes = []\n").is_err());
        assert!(RunSpec::from_toml("instances = []\nmodes = [\"lkh-alpha\"]\nruns = 0\n").is_err());
        assert!(RunSpec::from_toml("instances = []\nmodes = [\"nope\"]\n").is_err());
    }

    #[test]
    fn bks_lines() {
        let b = parse_bks("# best known\nd198 15780\np654: 34643\n\n").unwrap();
        assert_eq!(b["d198"], 15780);
        assert_eq!(b["p654"], 34643);
        assert!(parse_bks("d198\n").is_err());
    }

    #[test]
    fn cumulative_gap_is_a_prefix_sum() {
        let modes = vec![Mode::LkhAlpha, Mode::VsrAlpha];
        let report = GapReport {
            modes: modes.clone(),
            rows: vec![
                row("big", 200, Mode::LkhAlpha, Some(0.02)),
                row("big", 200, Mode::VsrAlpha, Some(0.0)),
                row("small", 100, Mode::LkhAlpha, Some(0.01)),
                row("small", 100, Mode::VsrAlpha, Some(0.0)),
                row("nobks", 50, Mode::LkhAlpha, None),
                row("nobks", 50, Mode::VsrAlpha, None),
            ],
            ..Default::default()
        };
        let text = emit_cumulative_gap(&report);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index\tlkh-alpha\tvsr-alpha");
        assert_eq!(lines[1], "1\t0.010000\t0.000000");
        assert_eq!(lines[2], "2\t0.030000\t0.000000");
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.split('\t').count() == modes.len() + 1));
    }

    #[test]
    fn single_zero_gap() {
        let report = GapReport {
            modes: vec![Mode::VsrAlpha],
            rows: vec![row("d198", 198, Mode::VsrAlpha, Some(0.0))],
            ..Default::default()
        };
        assert_eq!(emit_cumulative_gap(&report), "index\tvsr-alpha\n1\t0.000000\n");
    }

    #[test]
    fn standard_error() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }
}
