//! Approximate G-optimal design over a set of arm features.

use incentive_bandits::geometry::approx_g_optimal_design;
use incentive_bandits::geometry::design::leverages;

fn main() -> incentive_bandits::Result<()> {
    let arms: Vec<Vec<f64>> = (0..8)
        .map(|i| {
            let a = 0.3 * f64::from(i * i);
            vec![a.cos(), a.sin(), 0.2 * f64::from(i % 3)]
        })
        .collect();
    let design = approx_g_optimal_design(&arms)?;
    let lev = leverages(&arms, &design.weights);
    for (arm, v) in arms.iter().enumerate() {
        println!("arm {arm}: {v:.3?} weight {:.4} leverage {:.4}", design.weights[arm], lev[arm]);
    }
    println!("max leverage {:.4} (rank {}, bound {})", design.max_leverage, design.rank, 2 * design.rank);
    Ok(())
}
