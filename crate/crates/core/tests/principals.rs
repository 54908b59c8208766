use incentive_bandits::harness::experiment::transcript_csv;
use incentive_bandits::harness::{run_seed, Algorithm, ExperimentConfig, ModelSpec};
use incentive_bandits::iid::scaled_phase_length;
use incentive_bandits::search::Block;

fn point_mass(algorithm: Algorithm, horizon: u64, theta: &[f64], mu: &[f64]) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(algorithm, horizon, theta.len(), 2);
    c.model = ModelSpec::PointMass { theta: theta.to_vec(), mu: mu.to_vec() };
    c.delta = Some(0.01);
    c
}

#[test]
fn online_elimination_meets_gap_deadline() {
    // Joint means 1.0, 0.5, 0.4: gaps 0.5 and 0.6 both satisfy gap / 2 > 2^-3.
    let c = point_mass(Algorithm::IidOnline, 1 << 20, &[0.5, 0.25, 0.2], &[0.5, 0.25, 0.2]);
    let out = run_seed(&c, 0).unwrap();
    assert!(out.log.completed_phases() >= 3);
    assert_eq!(out.log.elimination_phase(0), None);
    for arm in [1, 2] {
        let m = out.log.elimination_phase(arm).expect("suboptimal arm eliminated");
        assert!(m <= 3, "arm {arm} eliminated in phase {m}");
    }
    assert!(out.summary.hard_failures().is_empty());
}

#[test]
fn symmetric_instance_eliminates_nothing() {
    for algo in [Algorithm::IidOnline, Algorithm::IidOffline] {
        let mut c = point_mass(algo, 20_000, &[0.9, 0.1], &[0.1, 0.9]);
        c.gamma = 0.02;
        let out = run_seed(&c, 3).unwrap();
        assert!(out.log.completed_phases() >= 1, "{algo}");
        assert!(out.log.eliminated().is_empty(), "{algo}: {:?}", out.log.eliminated());
        assert!(out.summary.hard_failures().is_empty(), "{algo}");
    }
}

#[test]
fn runs_are_deterministic_per_seed() {
    let mut iid = ExperimentConfig::new(Algorithm::IidOffline, 5_000, 3, 2);
    iid.gamma = 0.02;
    let mut explore = ExperimentConfig::new(Algorithm::Explore, 5_000, 3, 2);
    explore.gamma = 1e-4;
    let mut linear = ExperimentConfig::new(Algorithm::Linear, 5_000, 4, 2);
    linear.geometry.mc_samples = 2_000;
    for c in [iid, explore, linear] {
        let a = run_seed(&c, 7).unwrap();
        let b = run_seed(&c, 7).unwrap();
        assert_eq!(transcript_csv(&a.transcript).unwrap(), transcript_csv(&b.transcript).unwrap());
        assert_eq!(a.log, b.log);
        let other = run_seed(&c, 8).unwrap();
        assert_ne!(transcript_csv(&a.transcript).unwrap(), transcript_csv(&other.transcript).unwrap());
    }
}

#[test]
fn linear_orthant_keeps_best_arm() {
    let features = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
    let mut c = ExperimentConfig::new(Algorithm::Linear, 20_000, 4, 2);
    c.model = ModelSpec::Linear { features, s_star: vec![0.3, 0.1], nu_star: vec![0.5, 0.2], noise: 0.0 };
    c.geometry.mc_samples = 5_000;
    let out = run_seed(&c, 1).unwrap();
    assert!(out.log.completed_phases() >= 1);
    assert_eq!(out.log.elimination_phase(0), None);
    assert_eq!(out.transcript.len() as u64, 20_000);
    assert!(out.summary.hard_failures().is_empty());
}

#[test]
fn online_phase_budget_accounts_for_every_round() {
    let mut c = point_mass(Algorithm::IidOnline, 200_000, &[0.6, 0.3, 0.1], &[0.3, 0.2, 0.1]);
    c.gamma = 0.05;
    let out = run_seed(&c, 2).unwrap();
    let completed: Vec<_> = out.log.phases.iter().filter(|p| p.completed).collect();
    assert!(completed.len() >= 2);
    let mut prev_len = 1u64;
    for p in completed {
        let len = scaled_phase_length(p.phase, p.active.len(), c.horizon, 3, 0.01, c.gamma);
        assert_eq!(p.explore_len, len);
        let z = if p.bad.is_empty() { p.stabilize_len } else {
            let raw = (p.active.len() as f64 * prev_len as f64 / p.bad.len() as f64).sqrt();
            (c.gamma * raw).ceil().max(1.0) as u64
        };
        assert_eq!(p.stabilize_len, z);
        let search: u64 = p.searches.iter().map(|s| s.2).sum();
        let a = p.active.len() as u64;
        let expected = p.bad.len() as u64 * z + search + a * len + a;
        assert_eq!(p.total_rounds(), expected, "phase {}", p.phase);
        assert_eq!(p.rounds(Block::Eliminate), a);
        assert_eq!(p.rounds(Block::Search), search);
        prev_len = len;
    }
}
