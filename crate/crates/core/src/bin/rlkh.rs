use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;

use rlkh::error::{Error, Result};
use rlkh::harness::{results_csv, run, write_outputs, RunSpec};
use rlkh::io::{parse_tsplib, parse_tsptw, parse_windows, write_tour};
use rlkh::onetree::AscentConfig;
use rlkh::popmusic::{popmusic_candidate_edges, write_edges, PopmusicConfig};
use rlkh::rl::StagnationBudget;
use rlkh::solver::{prepare, solve, solve_tsptw, Mode, SolverConfig, TsptwProblem};
use rlkh::{Instance, Tour};

#[derive(Parser)]
#[command(name = "rlkh", version, about = "Reinforced Lin-Kernighan-Helsgaun TSP and TSPTW solver")]
struct Cli {
    /// Log every applied k-opt move.
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Run an experiment matrix from a TOML file.
    Bench {
        config: PathBuf,
        /// Overrides the worker count of the file.
        #[arg(long)]
        workers: Option<usize>,
        /// Overrides the output directory of the file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// TSPLIB file, or a TSPTW text file with `--dumas`.
    instance: PathBuf,
    #[arg(long, default_value = "vsr-alpha", value_parser = parse_mode)]
    mode: Mode,
    /// Time limit in seconds.
    #[arg(long)]
    tmax: Option<f64>,
    /// Iteration limit.
    #[arg(long)]
    imax: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Time windows for the instance, one `a b [service]` line per city.
    #[arg(long, value_name = "WINDOWS")]
    tsptw: Option<PathBuf>,
    /// The instance file carries its own time windows.
    #[arg(long, conflicts_with = "tsptw")]
    dumas: bool,
    #[arg(long, default_value_t = 5)]
    kmax: usize,
    /// Candidates tried per added edge.
    #[arg(long, default_value_t = 5)]
    breadth: usize,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    /// Stagnating iterations before the update rule changes.
    #[arg(long)]
    nmax: Option<u64>,
    /// Stagnating seconds before the update rule changes.
    #[arg(long, conflicts_with = "nmax")]
    nmax_secs: Option<f64>,
    /// Candidates per city.
    #[arg(long, default_value_t = 5)]
    width: usize,
    #[arg(long)]
    ascent_iterations: Option<usize>,
    #[arg(long, default_value_t = 10)]
    popmusic_tours: usize,
    #[arg(long, default_value_t = 32)]
    popmusic_len: usize,
    /// Re-check every applied move.
    #[arg(long)]
    validate: bool,
    /// Write the best tour in TSPLIB format.
    #[arg(long)]
    tour_out: Option<PathBuf>,
    /// Write the initial candidate lists with their Q-values.
    #[arg(long)]
    dump_candidates: Option<PathBuf>,
    /// Write the POPMUSIC edge union.
    #[arg(long)]
    dump_edges: Option<PathBuf>,
    /// Print the run record as JSON.
    #[arg(long)]
    json: bool,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse::<Mode>().map_err(|e| e.to_string())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

impl SolveArgs {
    fn config(&self) -> SolverConfig {
        let mut c = SolverConfig {
            mode: self.mode,
            i_max: self.imax,
            t_max: self.tmax,
            seed: self.seed,
            width: self.width,
            validate: self.validate,
            ascent: AscentConfig {
                max_iterations: self.ascent_iterations,
                ..Default::default()
            },
            popmusic: PopmusicConfig {
                tours: self.popmusic_tours,
                subpath_len: self.popmusic_len,
                ..Default::default()
            },
            ..Default::default()
        };
        c.kopt.k_max = self.kmax;
        c.kopt.breadth = self.breadth;
        c.rl.lambda = self.lambda;
        c.rl.gamma = self.gamma;
        c.rl.n_max = match (self.nmax, self.nmax_secs) {
            (Some(n), _) => Some(StagnationBudget::Iterations(n)),
            (None, Some(s)) => Some(StagnationBudget::Seconds(s)),
            _ => None,
        };
        c
    }
}

fn dump_edges(inst: &Instance, cfg: &SolverConfig, path: &Path) -> Result<()> {
    write(path, &write_edges(&popmusic_candidate_edges(inst, &cfg.popmusic)))
}

fn dump_candidates(inst: &Instance, cfg: &SolverConfig, path: &Path) -> Result<()> {
    let p = prepare(inst, cfg);
    write(path, &p.candidates.dump(&p.q))
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let cfg = args.config();
    cfg.check()?;
    let text = read(&args.instance)?;

    let (result, searched) = if args.dumas || args.tsptw.is_some() {
        let problem = if args.dumas {
            let (mut raw, windows) = parse_tsptw(&text)?;
            if raw.name.is_empty() {
                raw.name = stem(&args.instance);
            }
            TsptwProblem::from_raw(&raw, windows)?
        } else {
            let raw = parse_tsplib(&text)?;
            let windows = parse_windows(&read(args.tsptw.as_ref().unwrap())?, raw.dimension)?;
            TsptwProblem::from_raw(&raw, windows)?
        };
        let r = solve_tsptw(&problem, &cfg)?;
        (r, None)
    } else {
        let inst = Instance::from_raw(&parse_tsplib(&text)?)?;
        if let Some(p) = &args.dump_edges {
            dump_edges(&inst, &cfg, p)?;
        }
        if let Some(p) = &args.dump_candidates {
            dump_candidates(&inst, &cfg, p)?;
        }
        let r = solve(&inst, &cfg)?;
        (r, Some(inst))
    };

    if args.json {
        println!("{}", serde_json::to_string_pretty(&result.record())?);
    } else {
        println!("instance   {}", result.instance);
        println!("mode       {}", result.mode);
        println!("seed       {}", result.seed);
        if searched.is_none() {
            println!("violation  {}", result.best.fv);
        }
        println!("length     {}", result.best.fo);
        println!("bound      {}", result.lower_bound);
        println!("iterations {} (best at {})", result.iterations, result.best_iteration);
        println!("time       {:.3}s ({:.3}s setup)", result.seconds, result.setup_seconds);
    }

    if let Some(path) = &args.tour_out {
        let tour = match &result.route {
            Some(route) => Tour::new(route.clone())?,
            None => result.tour.clone(),
        };
        let comment = format!("length {}", result.best.fo);
        write(path, &write_tour(&tour, &result.instance, Some(&comment)))?;
    }
    Ok(())
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn cmd_bench(config: &Path, workers: Option<usize>, output: Option<&Path>) -> Result<()> {
    let mut spec = RunSpec::load(config)?;
    if workers.is_some() {
        spec.workers = workers;
    }
    if let Some(o) = output {
        spec.output = o.to_path_buf();
    }
    let report = run(&spec)?;
    write_outputs(&report, &spec.output)?;
    print!("{}", results_csv(&report)?);
    for f in &report.failures {
        eprintln!("failed: {}: {}", f.path, f.error);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut log = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"));
    if cli.trace {
        log.filter_module("rlkh::moves", log::LevelFilter::Trace);
    }
    log.init();

    let out = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench {
            config,
            workers,
            output,
        } => cmd_bench(config, *workers, output.as_deref()),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
