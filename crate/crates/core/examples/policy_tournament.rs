// Every built-in policy against every other, exported as a table, with the
// tidy CSV of one pairing.
//
//     cargo run --release -p techdebt-core --example policy_tournament -- 1000

use std::error::Error;

use techdebt_core::content::default_pack;
use techdebt_core::sim::{builtin_policies, export_results, run_experiment, ExperimentConfig, ExportFormat};

fn tournament(n: u64) -> Result<(), Box<dyn Error>> {
    let config = ExperimentConfig::new(default_pack());
    let policies = builtin_policies();
    println!("{:<14} {:<14} {:>8} {:>8} {:>8} {:>8}", "a", "b", "a wins", "b wins", "a score", "b score");
    for (i, a) in policies.iter().enumerate() {
        for b in &policies[i + 1..] {
            let r = run_experiment(a.as_ref(), b.as_ref(), n, 1, &config)?;
            println!(
                "{:<14} {:<14} {:>8.3} {:>8.3} {:>8.2} {:>8.2}",
                r.a.policy, r.b.policy, r.a.win_rate, r.b.win_rate, r.a.mean_score, r.b.mean_score
            );
        }
    }

    let sample = run_experiment(policies[0].as_ref(), policies[2].as_ref(), 2, 1, &config)?;
    println!("\n{}", export_results(&sample, ExportFormat::Table));
    let csv = export_results(&sample, ExportFormat::Csv);
    for line in csv.lines().take(12) {
        println!("{line}");
    }
    println!("... {} rows", csv.lines().count());
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    tournament(100)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    let n = std::env::args().nth(1).map(|a| a.parse()).transpose()?.unwrap_or(1000);
    tournament(n)
}
