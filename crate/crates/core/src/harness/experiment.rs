//! Running configured experiments and persisting their transcripts and summaries.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{Agent, RewardModel};
use crate::error::{Error, Result};
use crate::explore::{ExplorePrincipal, ExploreVariant};
use crate::geometry::MspOptions;
use crate::harness::config::{Algorithm, ExperimentConfig, Prior};
use crate::harness::game::{Game, Transcript};
use crate::iid::{Elimination, IidPrincipal};
use crate::linear::{LinearPhaseEstimates, LinearPrincipal};
use crate::phase::PrincipalLog;
use crate::rng::{stream, RunStreams, INSTANCE};
use crate::search::Block;

/// Header of the per-round CSV.
pub const CSV_HEADER: [&str; 14] = [
    "round",
    "phase",
    "block",
    "arm",
    "explored",
    "incentive_total",
    "principal_reward",
    "agent_reward",
    "regret_perround",
    "regret_oracle",
    "regret_bar",
    "cum_perround",
    "cum_oracle",
    "cum_bar",
];

/// Outcome of one invariant check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantOutcome {
    pub name: String,
    pub passed: bool,
    /// A failed hard invariant fails the run.
    pub hard: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EliminationEvent {
    pub arm: usize,
    pub phase: u32,
}

/// One structured record per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub run_id: u64,
    pub horizon: u64,
    pub delta: f64,
    pub gamma: f64,
    pub num_arms: usize,
    pub rounds: u64,
    pub regret_perround: f64,
    pub regret_oracle: f64,
    pub regret_bar: f64,
    pub completed_phases: u32,
    pub eliminations: Vec<EliminationEvent>,
    pub invariants: Vec<InvariantOutcome>,
    /// Some hard invariant failed or the principal stopped with an error.
    pub flagged: bool,
    pub error: Option<String>,
}

impl RunSummary {
    pub fn regret(&self, mode: usize) -> f64 {
        [self.regret_perround, self.regret_oracle, self.regret_bar][mode]
    }

    pub fn hard_failures(&self) -> Vec<&InvariantOutcome> {
        self.invariants.iter().filter(|i| i.hard && !i.passed).collect()
    }
}

/// Everything a single seeded run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub model: RewardModel,
    pub transcript: Transcript,
    pub log: PrincipalLog,
    pub linear_estimates: Vec<LinearPhaseEstimates>,
    pub summary: RunSummary,
}

/// Play one seed of `config` to the horizon, entirely in memory.
pub fn run_seed(config: &ExperimentConfig, seed: u64) -> Result<RunOutput> {
    config.validate()?;
    let mut instance = stream(seed, config.run_id, INSTANCE);
    let model = config.model.build(&mut instance)?;
    let behavior = config.agent.behavior.clone();
    let agent = match config.agent.prior {
        Prior::Zero => Agent::new(behavior, &model)?,
        Prior::TrueMeans => Agent::with_initial(behavior, &model, model.agent_means())?,
    };
    let streams = RunStreams::new(seed, config.run_id);
    let mut mc = streams.mc_geometry;
    let mut game = Game::new(
        model.clone(),
        agent,
        config.horizon,
        streams.agent_noise,
        streams.principal_noise,
        streams.agent_explore,
    )?;
    let delta = config.delta();
    let mut linear_estimates = Vec::new();
    let outcome = match config.algorithm {
        Algorithm::IidOnline | Algorithm::IidOffline => {
            let elimination =
                if config.algorithm == Algorithm::IidOnline { Elimination::Online } else { Elimination::Offline };
            IidPrincipal { delta, gamma: config.gamma, elimination }.run(&mut game)
        }
        Algorithm::Explore | Algorithm::OracleExplore => {
            let variant =
                if config.algorithm == Algorithm::Explore { ExploreVariant::Learner } else { ExploreVariant::Oracle };
            ExplorePrincipal::new(delta, config.principal_c0(), variant).with_gamma(config.gamma).run(&mut game)
        }
        Algorithm::Linear => {
            let features = model.arm_set().features().map(<[Vec<f64>]>::to_vec).unwrap_or_default();
            let principal = LinearPrincipal {
                delta,
                gamma: config.gamma,
                msp: MspOptions { n_samples: config.geometry.mc_samples, track_potential: false },
            };
            principal.run(&mut game, &features, &mut mc).map(|(log, est)| {
                linear_estimates = est;
                log
            })
        }
    };
    let (log, error) = match outcome {
        Ok(log) => (log, None),
        Err(e) => (PrincipalLog::default(), Some(e.to_string())),
    };
    let transcript = game.into_transcript();
    let invariants = check_invariants(config, &model, &transcript, &log);
    let total = transcript.total_regret();
    let flagged = error.is_some() || invariants.iter().any(|i| i.hard && !i.passed);
    let summary = RunSummary {
        algorithm: config.algorithm,
        seed,
        run_id: config.run_id,
        horizon: config.horizon,
        delta,
        gamma: config.gamma,
        num_arms: model.num_arms(),
        rounds: transcript.len() as u64,
        regret_perround: total[0],
        regret_oracle: total[1],
        regret_bar: total[2],
        completed_phases: log.completed_phases(),
        eliminations: log.eliminated().into_iter().map(|(arm, phase)| EliminationEvent { arm, phase }).collect(),
        invariants,
        flagged,
        error,
    };
    Ok(RunOutput { model, transcript, log, linear_estimates, summary })
}

/// Tolerance for ledger identities.
pub const LEDGER_TOLERANCE: f64 = 1e-12;

/// Post-run invariant checks. Checks that only hold without noise are hard only then.
pub fn check_invariants(
    config: &ExperimentConfig,
    model: &RewardModel,
    transcript: &Transcript,
    log: &PrincipalLog,
) -> Vec<InvariantOutcome> {
    let noiseless = config.model.is_noiseless();
    let explores = config.agent.behavior.kind.explores();
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool, hard: bool, detail: String| {
        out.push(InvariantOutcome { name: name.into(), passed, hard, detail })
    };

    let n = transcript.len() as u64;
    let by_block: u64 = Block::ALL.iter().map(|&b| transcript.records.iter().filter(|r| r.block == b).count() as u64).sum();
    let logged: u64 = log.phases.iter().map(|p| p.total_rounds()).sum();
    push(
        "round-conservation",
        n == config.horizon && by_block == n && (log.phases.is_empty() || logged == n),
        true,
        format!("{n} rounds, {by_block} by block, {logged} by phase, horizon {}", config.horizon),
    );

    let cum = transcript.cumulative();
    let mut acc = [0.0; 3];
    let mut prefix_ok = true;
    for (r, c) in transcript.records.iter().zip(&cum) {
        for (a, x) in acc.iter_mut().zip(r.regret) {
            *a += x;
        }
        prefix_ok &= acc == *c;
    }
    push("prefix-sum", prefix_ok, true, "cumulative regret equals the running sum".into());

    let worst = transcript.records.iter().map(|r| r.regret[1] - r.regret[2]).fold(0.0, f64::max);
    push("bar-dominates-oracle", worst <= LEDGER_TOLERANCE, true, format!("max oracle minus bar {worst:.3e}"));

    if config.agent.prior == Prior::TrueMeans && noiseless {
        let worst = transcript.records.iter().map(|r| (r.regret[0] - r.regret[1]).abs()).fold(0.0, f64::max);
        push("oracle-reduction", worst <= LEDGER_TOLERANCE, true, format!("max per-round minus oracle {worst:.3e}"));
    }

    let scheduled: Vec<_> = transcript
        .records
        .iter()
        .filter(|r| matches!(r.block, Block::Stabilize | Block::Explore) && r.target.is_some())
        .collect();
    let insufficient = scheduled.iter().filter(|r| r.target_margin.is_some_and(|m| m <= 0.0)).count();
    let missed = scheduled.iter().filter(|r| !r.explored && r.target != Some(r.arm)).count();
    push(
        "target-play",
        insufficient == 0 && missed == 0,
        noiseless && !explores,
        format!("{} scheduled rounds, {insufficient} with non-positive margin, {missed} missed", scheduled.len()),
    );

    let best = model.best_joint_arm();
    let gaps = model.joint_gaps();
    let unique_best = gaps.iter().filter(|&&g| g <= LEDGER_TOLERANCE).count() == 1;
    let survived = log.elimination_phase(best).is_none();
    push(
        "optimal-arm-survival",
        survived || !unique_best,
        noiseless && unique_best,
        format!("best joint arm {best} {}", if survived { "survived" } else { "was eliminated" }),
    );
    out
}

/// Write the per-round CSV of a transcript.
pub fn write_csv(path: &Path, transcript: &Transcript) -> Result<()> {
    csv_to(csv::Writer::from_path(path)?, transcript)
}

/// The per-round CSV of a transcript as bytes.
pub fn transcript_csv(transcript: &Transcript) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    csv_to(csv::Writer::from_writer(&mut buf), transcript)?;
    Ok(buf)
}

fn csv_to<W: std::io::Write>(mut w: csv::Writer<W>, transcript: &Transcript) -> Result<()> {
    w.write_record(CSV_HEADER)?;
    for (r, c) in transcript.records.iter().zip(transcript.cumulative()) {
        w.write_record([
            r.round.to_string(),
            r.phase.to_string(),
            r.block.to_string(),
            r.arm.to_string(),
            u8::from(r.explored).to_string(),
            r.incentive.total().to_string(),
            r.principal_reward.to_string(),
            r.agent_reward.to_string(),
            r.regret[0].to_string(),
            r.regret[1].to_string(),
            r.regret[2].to_string(),
            c[0].to_string(),
            c[1].to_string(),
            c[2].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn summary_to_toml(summary: &RunSummary) -> Result<String> {
    toml::to_string(summary).map_err(|e| Error::Parse(e.to_string()))
}

pub fn summary_from_toml(text: &str) -> Result<RunSummary> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// File stem shared by a run's CSV and summary.
pub fn run_name(summary: &RunSummary) -> String {
    format!("{}-T{}-run{}-seed{}", summary.algorithm, summary.horizon, summary.run_id, summary.seed)
}

/// Run every seed, writing `<run>.csv` and `<run>.summary.toml` under `out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    config.validate()?;
    fs::create_dir_all(&config.out_dir)?;
    let results: Vec<Result<RunSummary>> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let out = run_seed(config, seed)?;
            let stem = run_name(&out.summary);
            write_csv(&config.out_dir.join(format!("{stem}.csv")), &out.transcript)?;
            fs::write(config.out_dir.join(format!("{stem}.summary.toml")), summary_to_toml(&out.summary)?)?;
            Ok(out.summary)
        })
        .collect();
    results.into_iter().collect()
}

/// Run every seed in memory, keeping only the summaries.
pub fn summarize(config: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    config.validate()?;
    let results: Vec<Result<RunSummary>> =
        config.seeds.par_iter().map(|&seed| run_seed(config, seed).map(|o| o.summary)).collect();
    results.into_iter().collect()
}

/// All summaries found directly under `dir`, sorted by run name.
pub fn load_summaries(dir: &Path) -> Result<Vec<RunSummary>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_string_lossy().ends_with(".summary.toml"))
        .collect();
    paths.sort();
    paths.iter().map(|p| summary_from_toml(&fs::read_to_string(p)?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::AgentBehavior;
    use crate::harness::config::ModelSpec;

    fn oracle_config() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(Algorithm::IidOnline, 10_000, 2, 2);
        c.agent.behavior = AgentBehavior::oracle();
        c.model = ModelSpec::Bernoulli { theta: vec![0.7, 0.4], mu: vec![0.3, 0.6] };
        c
    }

    #[test]
    fn summary_matches_per_round_sum() {
        let out = run_seed(&oracle_config(), 3).unwrap();
        let s: f64 = out.transcript.records.iter().map(|r| r.regret[0]).sum();
        assert_eq!(out.summary.regret_perround, out.transcript.cumulative().last().unwrap()[0]);
        assert!((out.summary.regret_perround - s).abs() < 1e-9);
        assert_eq!(out.summary.rounds, 10_000);
        assert!(!out.summary.flagged, "{:?}", out.summary.invariants);
    }

    #[test]
    fn files_are_byte_identical_across_repeats() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = oracle_config();
        c.horizon = 2000;
        c.seeds = vec![1, 2];
        let read_all = |sub: &str| {
            let mut c = c.clone();
            c.out_dir = dir.path().join(sub);
            run_experiment(&c).unwrap();
            let mut files: Vec<_> = fs::read_dir(&c.out_dir).unwrap().map(|e| e.unwrap().path()).collect();
            files.sort();
            files.iter().map(|p| (p.file_name().unwrap().to_owned(), fs::read(p).unwrap())).collect::<Vec<_>>()
        };
        let a = read_all("a");
        assert_eq!(a.len(), 4);
        assert_eq!(a, read_all("b"));
        let summaries = load_summaries(&dir.path().join("a")).unwrap();
        assert_eq!(summaries.len(), 2);
        let csv = String::from_utf8(a.iter().find(|(n, _)| n.to_string_lossy().ends_with(".csv")).unwrap().1.clone()).unwrap();
        assert!(csv.starts_with(&CSV_HEADER.join(",")));
        assert_eq!(csv.lines().count(), 2001);
    }

    #[test]
    fn summary_round_trips() {
        let s = run_seed(&oracle_config(), 0).unwrap().summary;
        assert_eq!(summary_from_toml(&summary_to_toml(&s).unwrap()).unwrap(), s);
    }
}
