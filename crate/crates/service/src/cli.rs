//! The `techdebt` command line: validate content, run simulations, replay
//! games, report aha coverage and serve sessions.
//!
//! Every command prints a human table by default; `--format csv` and
//! `--format json` give machine-readable output of the same data.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use techdebt_core::content::{coverage_report, CoverageReport};
use techdebt_core::rules::{EndReason, TicketKind};
use techdebt_core::session::ReplayError;
use techdebt_core::sim::{
    export_results, policy_by_name, run_experiment, ExperimentConfig, ExportFormat, SimError,
    POLICY_NAMES,
};
use techdebt_core::{default_pack, load_pack, replay, ContentPack, PackError, ReplayFile};

use crate::host::SessionHost;
use crate::store::{GameStore, StoreError};

#[derive(Debug, Parser)]
#[command(name = "techdebt", version, about = "TechDebt board game tools")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a content pack. `default` names the built-in pack.
    Validate { pack: PathBuf },
    /// Play bot policy A against policy B over seeds seed..seed+n.
    Simulate {
        policy_a: String,
        policy_b: String,
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Pack file; the built-in pack when omitted.
        #[arg(long)]
        pack: Option<PathBuf>,
        /// Directory for result.json, result.csv and per-game replays.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_rounds: Option<u32>,
        #[arg(long)]
        td_penalty: Option<u32>,
    },
    /// Re-run a replay file and check every event.
    Replay {
        file: PathBuf,
        /// Pack file the game was played with; the built-in pack when omitted.
        #[arg(long)]
        pack: Option<PathBuf>,
    },
    /// How many sources can surface each aha-moment row.
    Coverage { pack: PathBuf },
    /// Host live sessions over HTTP.
    Serve {
        #[arg(long, env = "TECHDEBT_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        bind: IpAddr,
        /// Directory of extra `.toml` packs to offer next to the built-in one.
        #[arg(long, env = "TECHDEBT_PACKS")]
        packs: Option<PathBuf>,
        /// Game-log directory; archives stay in memory when omitted.
        #[arg(long, env = "TECHDEBT_STORAGE")]
        storage: Option<PathBuf>,
        /// Default wall-clock limit per game, 0 for none.
        #[arg(long, default_value_t = 60)]
        clock_minutes: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Pack { path: String, source: PackError },
    #[error("unknown policy '{0}' (expected one of: {list})", list = POLICY_NAMES.join(", "))]
    UnknownPolicy(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{path}: {source}")]
    Replay { path: String, source: ReplayError },
    #[error("{0} aha row(s) have no source")]
    Uncovered(usize),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Resolve a pack argument: a file path, or `default` for the built-in pack.
pub fn resolve_pack(path: &Path) -> Result<Arc<ContentPack>, CliError> {
    if path == Path::new("default") && !path.exists() {
        return Ok(default_pack());
    }
    let shown = path.display().to_string();
    let text = fs::read_to_string(path)?;
    load_pack(&text)
        .map(Arc::new)
        .map_err(|source| CliError::Pack { path: shown, source })
}

fn csv_rows<R: AsRef<[String]>>(header: &[&str], rows: &[R]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.as_ref()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializes");
    s.push('\n');
    s
}

/// Key/value documents share one rendering for all three formats.
fn pairs(format: Format, title: &str, kv: &[(&str, String)]) -> String {
    match format {
        Format::Table => {
            let width = kv.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            let mut s = format!("{title}\n");
            for (k, v) in kv {
                let _ = writeln!(s, "  {k:<width$}  {v}");
            }
            s
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = kv.iter().map(|(k, v)| vec![k.to_string(), v.clone()]).collect();
            csv_rows(&["key", "value"], &rows)
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = kv
                .iter()
                .map(|(k, v)| {
                    let value = serde_json::from_str(v).unwrap_or_else(|_| v.clone().into());
                    (k.to_string(), value)
                })
                .collect();
            json(&map)
        }
    }
}

#[derive(Serialize)]
struct Invalid {
    valid: bool,
    path: String,
    errors: Vec<String>,
}

fn validate(format: Format, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let pack = match resolve_pack(path) {
        Ok(pack) => pack,
        Err(CliError::Pack { path: shown, source }) => {
            let errors: Vec<String> = match &source {
                PackError::Parse(m) => vec![m.clone()],
                PackError::Invalid(list) => list.iter().map(ToString::to_string).collect(),
            };
            let text = match format {
                Format::Json => json(&Invalid {
                    valid: false,
                    path: shown.clone(),
                    errors: errors.clone(),
                }),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = errors.iter().map(|e| vec![e.clone()]).collect();
                    csv_rows(&["error"], &rows)
                }
                Format::Table => {
                    let mut s = format!("{shown}: invalid\n");
                    for e in &errors {
                        let _ = writeln!(s, "  {e}");
                    }
                    s
                }
            };
            out.write_all(text.as_bytes())?;
            return Err(CliError::Pack { path: shown, source });
        }
        Err(other) => return Err(other),
    };
    let count = |k| pack.tickets.iter().filter(|t| t.kind == k).count();
    let coverage = coverage_report(&pack);
    let covered = coverage.rows.len() - coverage.uncovered().count();
    let kv = [
        ("valid", "true".to_string()),
        ("pack", format!("\"{}\"", pack.name)),
        ("version", format!("\"{}\"", pack.version)),
        ("pack_version", pack.pack_version.to_string()),
        ("architecture_tickets", count(TicketKind::Architecture).to_string()),
        ("feature_tickets", count(TicketKind::Feature).to_string()),
        ("event_cards", pack.event_cards.len().to_string()),
        ("action_cards", pack.action_cards.len().to_string()),
        ("aha_rows_covered", covered.to_string()),
        ("aha_rows", coverage.rows.len().to_string()),
        ("max_rounds", pack.defaults.max_rounds.to_string()),
        ("td_penalty", pack.defaults.td_penalty.to_string()),
    ];
    let kv = if format == Format::Table {
        kv.map(|(k, v)| (k, v.trim_matches('"').to_string()))
    } else {
        kv
    };
    let title = format!("{}: valid", path.display());
    out.write_all(pairs(format, &title, &kv).as_bytes())?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    format: Format,
    a: &str,
    b: &str,
    n: u64,
    seed: u64,
    pack: Option<&Path>,
    out_dir: Option<&Path>,
    max_rounds: Option<u32>,
    td_penalty: Option<u32>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let policy_a = policy_by_name(a).ok_or_else(|| CliError::UnknownPolicy(a.to_string()))?;
    let policy_b = policy_by_name(b).ok_or_else(|| CliError::UnknownPolicy(b.to_string()))?;
    let pack = match pack {
        Some(p) => resolve_pack(p)?,
        None => default_pack(),
    };
    let mut config = ExperimentConfig::new(pack);
    if let Some(r) = max_rounds {
        config.max_rounds = r;
    }
    if let Some(p) = td_penalty {
        config.td_penalty = p;
    }
    config.keep_replays = out_dir.is_some();
    let result = run_experiment(policy_a.as_ref(), policy_b.as_ref(), n, seed, &config)?;
    if let Some(dir) = out_dir {
        result.write_to(dir)?;
    }
    let export = match format {
        Format::Table => ExportFormat::Table,
        Format::Csv => ExportFormat::Csv,
        Format::Json => ExportFormat::Json,
    };
    out.write_all(export_results(&result, export).as_bytes())?;
    Ok(())
}

fn replay_file(format: Format, file: &Path, pack: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let shown = file.display().to_string();
    let wrap = |source| CliError::Replay {
        path: shown.clone(),
        source,
    };
    let recorded = ReplayFile::read_from(file).map_err(wrap)?;
    let pack = match pack {
        Some(p) => resolve_pack(p)?,
        None => default_pack(),
    };
    let state = replay(&recorded, pack).map_err(wrap)?;
    let scores = state.provisional_score();
    let tags: std::collections::BTreeSet<_> = state.log().iter().flat_map(|e| e.tags.iter()).collect();
    let quoted = |s: &str| match format {
        Format::Table => s.to_string(),
        _ => format!("\"{s}\""),
    };
    let kv = [
        ("verified", "true".to_string()),
        ("pack", quoted(&recorded.header.pack_name)),
        ("seed", recorded.header.seed.to_string()),
        ("events", recorded.events.len().to_string()),
        ("inputs", recorded.inputs().count().to_string()),
        ("rounds", state.round().to_string()),
        ("end_reason", quoted(state.end_reason().map(EndReason::describe).unwrap_or("unfinished"))),
        ("score_team_0", scores.scores[0].to_string()),
        ("score_team_1", scores.scores[1].to_string()),
        ("unrepaid_td_team_0", scores.unrepaid_td[0].to_string()),
        ("unrepaid_td_team_1", scores.unrepaid_td[1].to_string()),
        (
            "winner",
            quoted(&match (state.end_reason(), scores.winner()) {
                (None, _) => "none yet".to_string(),
                (Some(_), Some(t)) => format!("team {t}"),
                (Some(_), None) => "draw".to_string(),
            }),
        ),
        ("distinct_aha_tags", tags.len().to_string()),
    ];
    out.write_all(pairs(format, &format!("{shown}: replays identically"), &kv).as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct CoverageDoc<'a> {
    pack: &'a str,
    rows: Vec<CoverageLine>,
    covered: usize,
    total: usize,
}

#[derive(Serialize)]
struct CoverageLine {
    tag: String,
    intrinsic: u32,
    cards: u32,
    total: u32,
}

fn coverage(format: Format, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let pack = resolve_pack(path)?;
    let report: CoverageReport = coverage_report(&pack);
    let lines: Vec<CoverageLine> = report
        .rows
        .iter()
        .map(|r| CoverageLine {
            tag: r.tag.to_string(),
            intrinsic: r.intrinsic,
            cards: r.cards,
            total: r.total(),
        })
        .collect();
    let uncovered = report.uncovered().count();
    let text = match format {
        Format::Json => json(&CoverageDoc {
            pack: &pack.name,
            covered: lines.len() - uncovered,
            total: lines.len(),
            rows: lines,
        }),
        Format::Csv => {
            let rows: Vec<Vec<String>> = lines
                .iter()
                .map(|l| {
                    vec![
                        l.tag.clone(),
                        l.intrinsic.to_string(),
                        l.cards.to_string(),
                        l.total.to_string(),
                    ]
                })
                .collect();
            csv_rows(&["tag", "intrinsic", "cards", "total"], &rows)
        }
        Format::Table => {
            let width = lines.iter().map(|l| l.tag.len()).max().unwrap_or(3);
            let mut s = format!("{:<width$}  intrinsic  cards  total\n", "tag");
            for l in &lines {
                let _ = writeln!(s, "{:<width$}  {:>9}  {:>5}  {:>5}", l.tag, l.intrinsic, l.cards, l.total);
            }
            let _ = writeln!(s, "{} of {} rows covered", lines.len() - uncovered, lines.len());
            s
        }
    };
    out.write_all(text.as_bytes())?;
    match uncovered {
        0 => Ok(()),
        n => Err(CliError::Uncovered(n)),
    }
}

/// Build the host `serve` runs: built-in pack, every `.toml` in `packs`,
/// storage on disk when given.
pub fn build_host(packs: Option<&Path>, storage: Option<&Path>, clock_minutes: u64) -> Result<SessionHost, CliError> {
    let store = match storage {
        Some(dir) => GameStore::on_disk(dir)?,
        None => GameStore::in_memory(),
    };
    let clock = (clock_minutes > 0).then(|| Duration::from_secs(clock_minutes * 60));
    let mut host = SessionHost::new(store).with_default_clock(clock);
    if let Some(dir) = packs {
        let mut files: Vec<PathBuf> = fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        files.sort();
        for file in files {
            host = host.with_pack(resolve_pack(&file)?);
        }
    }
    Ok(host)
}

fn serve(
    port: u16,
    bind: IpAddr,
    packs: Option<&Path>,
    storage: Option<&Path>,
    clock_minutes: u64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let host = Arc::new(build_host(packs, storage, clock_minutes)?);
    let addr = SocketAddr::new(bind, port);
    writeln!(out, "serving packs {:?} on http://{addr}", host.pack_names())?;
    out.flush()?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(crate::http::serve(host, addr))?;
    Ok(())
}

/// Run one parsed command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let f = cli.format;
    match &cli.command {
        Command::Validate { pack } => validate(f, pack, out),
        Command::Simulate {
            policy_a,
            policy_b,
            n,
            seed,
            pack,
            out: dir,
            max_rounds,
            td_penalty,
        } => simulate(
            f,
            policy_a,
            policy_b,
            *n,
            *seed,
            pack.as_deref(),
            dir.as_deref(),
            *max_rounds,
            *td_penalty,
            out,
        ),
        Command::Replay { file, pack } => replay_file(f, file, pack.as_deref(), out),
        Command::Coverage { pack } => coverage(f, pack, out),
        Command::Serve {
            port,
            bind,
            packs,
            storage,
            clock_minutes,
        } => serve(*port, *bind, packs.as_deref(), storage.as_deref(), *clock_minutes, out),
    }
}
