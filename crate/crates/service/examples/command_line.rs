// The `techdebt` subcommands driven from code, with the output each prints.
// The binary accepts exactly these argument lists.
//
//     cargo run -p techdebt-service --example command_line

use std::error::Error;

use clap::Parser;

use techdebt_service::cli::{run, Cli};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let out_dir = std::env::temp_dir().join("techdebt-cli-example");
    let out = out_dir.display().to_string();
    let replay = out_dir.join("replays").join("game-7.jsonl").display().to_string();
    let commands: [&[&str]; 5] = [
        &["techdebt", "validate", "default"],
        &["techdebt", "coverage", "default", "--format", "csv"],
        &["techdebt", "simulate", "always-incur", "never-incur", "--n", "200", "--seed", "7", "--out", &out],
        &["techdebt", "replay", &replay, "--format", "json"],
        &["techdebt", "simulate", "balanced", "random", "--n", "50", "--format", "json"],
    ];
    for args in commands {
        println!("$ {}", args.join(" "));
        let cli = Cli::try_parse_from(args)?;
        let mut buf = Vec::new();
        run(&cli, &mut buf)?;
        let text = String::from_utf8(buf)?;
        for line in text.lines().take(12) {
            println!("{line}");
        }
        if text.lines().count() > 12 {
            println!("[{} more lines]", text.lines().count() - 12);
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
