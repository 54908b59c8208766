//! Find the smallest payment that makes an agent switch to a target arm.

use incentive_bandits::env::Incentive;
use incentive_bandits::search::{bisection_search, noisy_binary_search, ScriptedChannel};

fn main() -> incentive_bandits::Result<()> {
    let threshold = 0.37;
    let horizon = 1 << 16;
    let agent = move |inc: &Incentive, _round: u64| usize::from(inc.get(1) >= threshold);

    let mut channel = ScriptedChannel::new(2, horizon, agent);
    let out = noisy_binary_search(&mut channel, 1)?;
    println!("search with check: value {:.6} after {} rounds ({:?})", out.value, out.rounds, out.exit);

    let mut channel = ScriptedChannel::new(2, horizon, agent);
    let out = bisection_search(&mut channel, 1)?;
    println!("plain bisection:   value {:.6} after {} rounds", out.value, out.rounds);
    println!("true threshold:    {threshold}");
    Ok(())
}
