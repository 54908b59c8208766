use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use incentive_bandits::harness::config::{Algorithm, ExperimentConfig, ModelSpec};
use incentive_bandits::harness::experiment::{load_summaries, run_experiment, summarize, RunSummary};
use incentive_bandits::harness::report::scaling_report;
use incentive_bandits::{Error, Result};

#[derive(Parser)]
#[command(name = "incentive-bandits", version, about = "Repeated principal-agent bandit experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration over its seeds and write CSV transcripts and summaries.
    Run(Overrides),
    /// Run a configuration over a grid of horizons.
    Sweep(Overrides),
    /// Run invariant checks only, without writing files.
    Check(Overrides),
    /// Fit regret scaling over a directory of summaries.
    Report {
        /// Directory holding `*.summary.toml` files.
        dir: PathBuf,
        /// Horizon exponent; defaults to the algorithm's target rate.
        #[arg(long)]
        exponent: Option<f64>,
        /// Regret notion: 0 per-round, 1 oracle, 2 bar.
        #[arg(long, default_value_t = 0)]
        mode: usize,
    },
}

#[derive(Args, Clone)]
struct Overrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Seed range `A..B`, end exclusive.
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    algo: Option<Algorithm>,
    /// Horizon, or a comma-separated grid for `sweep`.
    #[arg(long = "T")]
    horizon: Option<String>,
    #[arg(long = "K")]
    arms: Option<usize>,
    #[arg(long = "d")]
    dim: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c0: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long = "mc-samples")]
    mc_samples: Option<usize>,
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Parse(format!("seed range {s:?} is not of the form A..B"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let (a, b): (u64, u64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a >= b {
        return Err(bad());
    }
    Ok((a..b).collect())
}

fn parse_horizons(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            let v: f64 = t.trim().parse().map_err(|_| Error::Parse(format!("bad horizon {t:?}")))?;
            Ok(v as u64)
        })
        .collect()
}

impl Overrides {
    fn base(&self) -> Result<ExperimentConfig> {
        match &self.config {
            Some(path) => ExperimentConfig::load(path),
            None => {
                let algo = self.algo.unwrap_or(Algorithm::IidOnline);
                Ok(ExperimentConfig::new(algo, 10_000, self.arms.unwrap_or(5), self.dim.unwrap_or(2)))
            }
        }
    }

    /// The configuration with every flag applied, one per horizon.
    fn configs(&self) -> Result<Vec<ExperimentConfig>> {
        let mut c = self.base()?;
        if let Some(a) = self.algo {
            if a.is_linear() != c.model.is_linear() {
                return Err(Error::InvalidConfig(format!("--algo {a} does not match the configured model")));
            }
            c.algorithm = a;
        }
        if let Some(s) = self.seed {
            c.seeds = vec![s];
        }
        if let Some(s) = &self.seeds {
            c.seeds = parse_seeds(s)?;
        }
        if let Some(o) = &self.out {
            c.out_dir = o.clone();
        }
        if let Some(k) = self.arms {
            match &mut c.model {
                ModelSpec::RandomBernoulli { arms } | ModelSpec::RandomLinear { arms, .. } => *arms = k,
                m if m.num_arms() != k => {
                    return Err(Error::InvalidConfig("--K only applies to random models".into()));
                }
                _ => {}
            }
        }
        if let Some(d) = self.dim {
            match &mut c.model {
                ModelSpec::RandomLinear { dim, .. } => *dim = d,
                _ => return Err(Error::InvalidConfig("--d only applies to random linear models".into())),
            }
        }
        if let Some(d) = self.delta {
            c.delta = Some(d);
        }
        if let Some(c0) = self.c0 {
            c.agent.behavior.c0 = c0;
            c.principal.c0 = Some(c0);
        }
        if let Some(g) = self.gamma {
            c.gamma = g;
        }
        if let Some(n) = self.mc_samples {
            c.geometry.mc_samples = n;
        }
        let horizons = match &self.horizon {
            Some(h) => parse_horizons(h)?,
            None => vec![c.horizon],
        };
        horizons
            .into_iter()
            .map(|t| {
                let mut c = c.clone();
                c.horizon = t;
                c.validate()?;
                Ok(c)
            })
            .collect()
    }
}

fn print_summary(s: &RunSummary) -> bool {
    let failures = s.hard_failures();
    println!(
        "{} T={} seed={} R={:.3} R_oracle={:.3} R_bar={:.3} phases={} eliminated={}{}",
        s.algorithm,
        s.horizon,
        s.seed,
        s.regret_perround,
        s.regret_oracle,
        s.regret_bar,
        s.completed_phases,
        s.eliminations.len(),
        if s.flagged { " FLAGGED" } else { "" }
    );
    for f in &failures {
        println!("  hard invariant {} failed: {}", f.name, f.detail);
    }
    if let Some(e) = &s.error {
        println!("  error: {e}");
    }
    s.flagged
}

fn builtin_checks() -> Vec<ExperimentConfig> {
    Algorithm::ALL
        .into_iter()
        .map(|a| {
            let mut c = ExperimentConfig::new(a, 20_000, 3, 2);
            c.seeds = (0..3).collect();
            c.gamma = if matches!(a, Algorithm::Explore | Algorithm::OracleExplore) { 1e-4 } else if a.is_linear() { 1.0 } else { 0.02 };
            c.model = if a.is_linear() {
                ModelSpec::Linear {
                    features: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-0.6, 0.8]],
                    s_star: vec![0.3, 0.2],
                    nu_star: vec![0.4, -0.1],
                    noise: 0.0,
                }
            } else {
                ModelSpec::PointMass { theta: vec![0.9, 0.5, 0.3], mu: vec![0.1, 0.1, 0.6] }
            };
            c
        })
        .collect()
}

fn execute(cli: Cli) -> Result<bool> {
    let mut failed = false;
    match cli.command {
        Command::Run(o) => {
            let configs = o.configs()?;
            if configs.len() != 1 {
                return Err(Error::InvalidConfig("run takes a single horizon; use sweep for a grid".into()));
            }
            for s in run_experiment(&configs[0])? {
                failed |= print_summary(&s);
            }
        }
        Command::Sweep(o) => {
            let mut all = Vec::new();
            for c in o.configs()? {
                for s in run_experiment(&c)? {
                    failed |= print_summary(&s);
                    all.push(s);
                }
            }
            if let Some(first) = all.first() {
                let exponent = first.algorithm.regret_exponent();
                match scaling_report(&all, exponent, 0) {
                    Ok(report) => println!("\n{report}"),
                    Err(e) => println!("\nno scaling report: {e}"),
                }
            }
        }
        Command::Check(o) => {
            let configs = if o.config.is_none() && o.algo.is_none() { builtin_checks() } else { o.configs()? };
            for c in configs {
                for s in summarize(&c)? {
                    failed |= print_summary(&s);
                }
            }
        }
        Command::Report { dir, exponent, mode } => {
            let summaries = load_summaries(&dir)?;
            let mut algos: Vec<Algorithm> = summaries.iter().map(|s| s.algorithm).collect();
            algos.sort();
            algos.dedup();
            for a in algos {
                let group: Vec<RunSummary> = summaries.iter().filter(|s| s.algorithm == a).cloned().collect();
                let report = scaling_report(&group, exponent.unwrap_or(a.regret_exponent()), mode)?;
                println!("{a}\n{report}\n");
                failed |= group.iter().any(|s| s.flagged);
            }
        }
    }
    Ok(!failed)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
