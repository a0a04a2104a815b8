// Short-term speed against long-term score: always-incur against never-incur
// and against balanced, with bootstrap confidence on the differences.
//
//     cargo run --release -p techdebt-core --example strategy_showdown -- 10000 [td_penalty]

use std::error::Error;

use techdebt_core::content::default_pack;
use techdebt_core::sim::stats::{bootstrap_less, BOOTSTRAP_RESAMPLES};
use techdebt_core::sim::{run_experiment, AlwaysIncur, Balanced, ExperimentConfig, NeverIncur, Side};

fn showdown(n: u64, td_penalty: Option<u32>) -> Result<(), Box<dyn Error>> {
    let mut config = ExperimentConfig::new(default_pack());
    if let Some(p) = td_penalty {
        config.td_penalty = p;
    }

    let fast = run_experiment(&AlwaysIncur, &NeverIncur, n, 1, &config)?;
    let conf = bootstrap_less(
        &fast.rounds_to_first_ticket(Side::A),
        &fast.rounds_to_first_ticket(Side::B),
        BOOTSTRAP_RESAMPLES,
        11,
    );
    println!(
        "rounds to first ticket: always-incur {:.3}, never-incur {:.3}  P(always < never) = {conf:.4}",
        fast.a.mean_rounds_to_first_ticket, fast.b.mean_rounds_to_first_ticket
    );

    let long = run_experiment(&AlwaysIncur, &Balanced::default(), n, 1, &config)?;
    let conf = bootstrap_less(&long.scores(Side::A), &long.scores(Side::B), BOOTSTRAP_RESAMPLES, 12);
    println!(
        "final score: always-incur {:.3} (unrepaid TD {:.2}), balanced {:.3} (unrepaid TD {:.2})  P(always < balanced) = {conf:.4}",
        long.a.mean_score, long.a.mean_unrepaid_td, long.b.mean_score, long.b.mean_unrepaid_td
    );
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    showdown(500, None)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map(|a| a.parse()).transpose()?.unwrap_or(2000);
    let penalty = args.next().map(|a| a.parse()).transpose()?;
    showdown(n, penalty)
}
