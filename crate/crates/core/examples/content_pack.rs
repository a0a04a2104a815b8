// Load and validate a content pack, see how validation reports mistakes,
// and print the aha-moment coverage table.
//
//     cargo run -p techdebt-core --example content_pack [path/to/pack.toml]

use std::error::Error;

use techdebt_core::content::{coverage_report, load_pack, DEFAULT_PACK_TOML};

fn check(source: &str) -> Result<(), Box<dyn Error>> {
    let pack = load_pack(source)?;
    println!(
        "pack {}@{}: {} tickets, {} event cards, {} action cards",
        pack.name,
        pack.version,
        pack.tickets.len(),
        pack.event_cards.len(),
        pack.action_cards.len()
    );
    let report = coverage_report(&pack);
    println!("{:<36} {:>9} {:>6}", "aha tag", "mechanic", "cards");
    for row in &report.rows {
        println!("{:<36} {:>9} {:>6}", row.tag.to_string(), row.intrinsic, row.cards);
    }
    println!("uncovered rows: {}", report.uncovered().count());
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    check(DEFAULT_PACK_TOML)?;

    // A broken copy: every error comes back at once, each with its path.
    let broken = DEFAULT_PACK_TOML
        .replacen("blocked = [1, 2]", "blocked = [1, 2, 3, 4, 5, 6]", 1)
        .replacen("\"Causes/Personnel\", \"Consequences/Personnel\"", "\"Causes/Weather\"", 1);
    match load_pack(&broken) {
        Ok(_) => return Err("broken pack was accepted".into()),
        Err(e) => {
            println!("\nbroken pack rejected:");
            for err in e.errors() {
                println!("  {err}");
            }
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    match std::env::args().nth(1) {
        Some(path) => check(&std::fs::read_to_string(path)?),
        None => run_example(),
    }
}
