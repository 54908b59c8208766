//! Run a configuration over several horizons, write transcripts and fit the regret scaling.

use incentive_bandits::harness::{run_experiment, scaling_report, Algorithm, ExperimentConfig, ModelSpec};

fn main() -> incentive_bandits::Result<()> {
    let out_dir = std::env::temp_dir().join("incentive-bandits-sweep");
    let mut all = Vec::new();
    for horizon in [10_000, 40_000, 160_000] {
        let mut config = ExperimentConfig::new(Algorithm::IidOnline, horizon, 3, 2);
        config.model = ModelSpec::PointMass { theta: vec![0.9, 0.5, 0.3], mu: vec![0.1, 0.1, 0.6] };
        config.gamma = 0.02;
        config.seeds = (0..4).collect();
        config.out_dir = out_dir.clone();
        all.extend(run_experiment(&config)?);
    }
    println!("transcripts in {}", out_dir.display());
    println!("{}", scaling_report(&all, Algorithm::IidOnline.regret_exponent(), 0)?);
    Ok(())
}
