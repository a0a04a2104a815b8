//! Result documents: a human table, a tidy CSV and JSON.
//!
//! The CSV has exactly four columns, `section,subject,key,value`; the rows
//! per section are listed in `docs/export-format.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use super::experiment::{
    ExperimentMeta, ExperimentResult, GameRecord, Outcome, PolicySummary, Side, SideRecord,
};
use crate::aha::AhaTag;
use crate::rules::{EndReason, TeamId};

pub const CSV_COLUMNS: [&str; 4] = ["section", "subject", "key", "value"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ExportFormat::Table),
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown format '{other}' (table, csv, json)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("the table format is for reading only")]
    NotParseable,
    #[error("csv: {0}")]
    Csv(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing value {section}/{subject}/{key}")]
    Missing {
        section: String,
        subject: String,
        key: String,
    },
    #[error("bad value for {key}: '{value}'")]
    BadValue { key: String, value: String },
}

pub fn export_results(result: &ExperimentResult, format: ExportFormat) -> String {
    match format {
        ExportFormat::Table => table(result),
        ExportFormat::Csv => csv_document(result),
        ExportFormat::Json => {
            let mut s = serde_json::to_string_pretty(result).expect("result serializes");
            s.push('\n');
            s
        }
    }
}

pub fn parse_results(text: &str, format: ExportFormat) -> Result<ExperimentResult, ExportError> {
    match format {
        ExportFormat::Table => Err(ExportError::NotParseable),
        ExportFormat::Json => Ok(serde_json::from_str(text)?),
        ExportFormat::Csv => parse_csv(text),
    }
}

fn table(r: &ExperimentResult) -> String {
    let m = &r.meta;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} vs {}: {} games, seeds {}..={}, pack {}@{}, max_rounds {}, td_penalty {}",
        m.policy_a,
        m.policy_b,
        m.n,
        m.base_seed,
        m.base_seed.wrapping_add(m.n - 1),
        m.pack_name,
        m.pack_version,
        m.max_rounds,
        m.td_penalty
    );
    let _ = writeln!(
        out,
        "{:<16} {:>8} {:>10} {:>9} {:>12} {:>14}",
        "policy", "win rate", "score", "score sd", "unrepaid TD", "first ticket"
    );
    for s in [&r.a, &r.b] {
        let _ = writeln!(
            out,
            "{:<16} {:>8.3} {:>10.2} {:>9.2} {:>12.2} {:>14.2}",
            s.policy,
            s.win_rate,
            s.mean_score,
            s.std_score,
            s.mean_unrepaid_td,
            s.mean_rounds_to_first_ticket
        );
    }
    let _ = writeln!(out, "draws: {}", r.draws);
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<40} {:>10} {:>10}", "aha tag", r.a.policy, r.b.policy);
    for ((tag, a), (_, b)) in r.a.aha.iter().zip(&r.b.aha) {
        let _ = writeln!(out, "{:<40} {:>10} {:>10}", tag.to_string(), a, b);
    }
    out
}

struct Rows(csv::Writer<Vec<u8>>);

impl Rows {
    fn row(&mut self, section: &str, subject: &str, key: &str, value: impl ToString) {
        self.0
            .write_record([section, subject, key, &value.to_string()])
            .expect("write to memory");
    }
}

fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::A => "a",
        Outcome::B => "b",
        Outcome::Draw => "draw",
    }
}

fn end_reason_str(r: EndReason) -> &'static str {
    match r {
        EndReason::RoundLimit => "round_limit",
        EndReason::ModulesComplete => "modules_complete",
    }
}

fn csv_document(r: &ExperimentResult) -> String {
    let mut w = Rows(csv::Writer::from_writer(Vec::new()));
    w.row(CSV_COLUMNS[0], CSV_COLUMNS[1], CSV_COLUMNS[2], CSV_COLUMNS[3]);
    let m = &r.meta;
    w.row("meta", "experiment", "policy_a", &m.policy_a);
    w.row("meta", "experiment", "policy_b", &m.policy_b);
    w.row("meta", "experiment", "n", m.n);
    w.row("meta", "experiment", "base_seed", m.base_seed);
    w.row("meta", "experiment", "pack_name", &m.pack_name);
    w.row("meta", "experiment", "pack_version", &m.pack_version);
    w.row("meta", "experiment", "max_rounds", m.max_rounds);
    w.row("meta", "experiment", "td_penalty", m.td_penalty);
    w.row("meta", "experiment", "draws", r.draws);
    for side in [Side::A, Side::B] {
        let s = r.summary(side);
        let subject = side.as_str();
        w.row("summary", subject, "policy", &s.policy);
        w.row("summary", subject, "games", s.games);
        w.row("summary", subject, "wins", s.wins);
        w.row("summary", subject, "win_rate", s.win_rate);
        w.row("summary", subject, "mean_score", s.mean_score);
        w.row("summary", subject, "std_score", s.std_score);
        w.row("summary", subject, "mean_unrepaid_td", s.mean_unrepaid_td);
        w.row("summary", subject, "mean_rounds_to_first_ticket", s.mean_rounds_to_first_ticket);
        w.row("summary", subject, "std_rounds_to_first_ticket", s.std_rounds_to_first_ticket);
    }
    for side in [Side::A, Side::B] {
        for (tag, count) in &r.summary(side).aha {
            w.row("aha", side.as_str(), &tag.to_string(), count);
        }
    }
    for g in &r.games {
        let seed = g.seed.to_string();
        w.row("game", &seed, "a_team", g.a_team.0);
        w.row("game", &seed, "rounds", g.rounds);
        w.row("game", &seed, "end_reason", end_reason_str(g.end_reason));
        w.row("game", &seed, "outcome", outcome_str(g.outcome));
        w.row("game", &seed, "distinct_tags", g.distinct_tags);
        for side in [Side::A, Side::B] {
            let s = g.side(side);
            let p = side.as_str();
            w.row("game", &seed, &format!("{p}_score"), s.score);
            w.row("game", &seed, &format!("{p}_unrepaid_td"), s.unrepaid_td);
            w.row("game", &seed, &format!("{p}_rounds_to_first_ticket"), s.rounds_to_first_ticket);
            w.row("game", &seed, &format!("{p}_tag_emissions"), s.tag_emissions);
        }
    }
    String::from_utf8(w.0.into_inner().expect("flush to memory")).expect("utf-8")
}

/// Rows keyed by (section, subject, key); game subjects kept in file order.
struct Table {
    cells: BTreeMap<(String, String, String), String>,
    games: Vec<String>,
}

impl Table {
    fn get(&self, section: &str, subject: &str, key: &str) -> Result<&str, ExportError> {
        self.cells
            .get(&(section.to_string(), subject.to_string(), key.to_string()))
            .map(String::as_str)
            .ok_or_else(|| ExportError::Missing {
                section: section.to_string(),
                subject: subject.to_string(),
                key: key.to_string(),
            })
    }

    fn parse<T: FromStr>(&self, section: &str, subject: &str, key: &str) -> Result<T, ExportError> {
        let raw = self.get(section, subject, key)?;
        raw.parse().map_err(|_| ExportError::BadValue {
            key: key.to_string(),
            value: raw.to_string(),
        })
    }
}

fn bad(key: &str, value: &str) -> ExportError {
    ExportError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    }
}

fn parse_csv(text: &str) -> Result<ExperimentResult, ExportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| ExportError::Csv(e.to_string()))?;
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(ExportError::Csv(format!("unexpected columns {headers:?}")));
    }
    let mut t = Table {
        cells: BTreeMap::new(),
        games: Vec::new(),
    };
    for record in reader.records() {
        let record = record.map_err(|e| ExportError::Csv(e.to_string()))?;
        let [section, subject, key, value] = [0, 1, 2, 3].map(|i| record[i].to_string());
        if section == "game" && t.games.last() != Some(&subject) {
            t.games.push(subject.clone());
        }
        t.cells.insert((section, subject, key), value);
    }

    let meta = ExperimentMeta {
        policy_a: t.get("meta", "experiment", "policy_a")?.to_string(),
        policy_b: t.get("meta", "experiment", "policy_b")?.to_string(),
        n: t.parse("meta", "experiment", "n")?,
        base_seed: t.parse("meta", "experiment", "base_seed")?,
        pack_name: t.get("meta", "experiment", "pack_name")?.to_string(),
        pack_version: t.get("meta", "experiment", "pack_version")?.to_string(),
        max_rounds: t.parse("meta", "experiment", "max_rounds")?,
        td_penalty: t.parse("meta", "experiment", "td_penalty")?,
    };

    let summary = |side: Side| -> Result<PolicySummary, ExportError> {
        let s = side.as_str();
        let mut aha = BTreeMap::new();
        for tag in AhaTag::all() {
            aha.insert(tag, t.parse("aha", s, &tag.to_string())?);
        }
        Ok(PolicySummary {
            policy: t.get("summary", s, "policy")?.to_string(),
            games: t.parse("summary", s, "games")?,
            wins: t.parse("summary", s, "wins")?,
            win_rate: t.parse("summary", s, "win_rate")?,
            mean_score: t.parse("summary", s, "mean_score")?,
            std_score: t.parse("summary", s, "std_score")?,
            mean_unrepaid_td: t.parse("summary", s, "mean_unrepaid_td")?,
            mean_rounds_to_first_ticket: t.parse("summary", s, "mean_rounds_to_first_ticket")?,
            std_rounds_to_first_ticket: t.parse("summary", s, "std_rounds_to_first_ticket")?,
            aha,
        })
    };

    let mut games = Vec::with_capacity(t.games.len());
    for seed in &t.games {
        let side = |p: &str| -> Result<SideRecord, ExportError> {
            Ok(SideRecord {
                score: t.parse("game", seed, &format!("{p}_score"))?,
                unrepaid_td: t.parse("game", seed, &format!("{p}_unrepaid_td"))?,
                rounds_to_first_ticket: t.parse("game", seed, &format!("{p}_rounds_to_first_ticket"))?,
                tag_emissions: t.parse("game", seed, &format!("{p}_tag_emissions"))?,
            })
        };
        let end_reason = match t.get("game", seed, "end_reason")? {
            "round_limit" => EndReason::RoundLimit,
            "modules_complete" => EndReason::ModulesComplete,
            other => return Err(bad("end_reason", other)),
        };
        let outcome = match t.get("game", seed, "outcome")? {
            "a" => Outcome::A,
            "b" => Outcome::B,
            "draw" => Outcome::Draw,
            other => return Err(bad("outcome", other)),
        };
        games.push(GameRecord {
            seed: seed.parse().map_err(|_| bad("seed", seed))?,
            a_team: TeamId(t.parse("game", seed, "a_team")?),
            rounds: t.parse("game", seed, "rounds")?,
            end_reason,
            outcome,
            a: side("a")?,
            b: side("b")?,
            distinct_tags: t.parse("game", seed, "distinct_tags")?,
        });
    }

    Ok(ExperimentResult {
        meta,
        a: summary(Side::A)?,
        b: summary(Side::B)?,
        draws: t.parse("meta", "experiment", "draws")?,
        games,
        replays: Vec::new(),
    })
}
