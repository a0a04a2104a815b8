// The work rule for one ticket, roll by roll: what each of the 36 outcomes
// does when digits 1 to 5 are blocked, with and without a willingness to
// incur TD on 5.
//
//     cargo run -p techdebt-core --example rule_table

use std::error::Error;

use techdebt_core::rules::{resolve_work, DiceRoll, Digit, DigitSet};
use techdebt_core::sim::progress_probability;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let blocked: DigitSet = (1..=5).map(Digit::new).collect::<Result<_, _>>()?;
    let five = [Digit::new(5)?];
    for incur in [&[][..], &five[..]] {
        let listed: Vec<String> = incur.iter().map(ToString::to_string).collect();
        println!("blocked {blocked}, incur [{}]", listed.join(", "));
        for first in Digit::ALL {
            let row: Vec<String> = Digit::ALL
                .iter()
                .map(|second| {
                    let out = resolve_work(blocked, DigitSet::EMPTY, incur, DiceRoll::new(first, *second));
                    match (out.tasks, out.td) {
                        (0, _) => " . ".to_string(),
                        (n, None) => format!(" {n} "),
                        (n, Some(_)) if out.conscious => format!("{n}c "),
                        (n, Some(_)) => format!("{n}t "),
                    }
                })
                .collect();
            println!("  {first}: {}", row.join(""));
        }
        let p = progress_probability(blocked, DigitSet::EMPTY, incur);
        println!("  progress on {:.0}/36 rolls\n", p * 36.0);
    }
    println!("legend: n tasks, t = TD from a double, c = conscious TD, . = no progress");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
