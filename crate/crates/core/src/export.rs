//! CSV and JSON output formats.
//!
//! | File | Columns |
//! |------|---------|
//! | metric | `entity_type, entity_id, score` (+ JSON sidecar) |
//! | ranking | `author_id, score, rank, rank_percentile, cumulative_value` |
//! | grades | `author_id, metric, scheme, grade, rank, rank_percentile, cumulative_value` |
//! | institutions | `institution_id, metric, scheme, a_count, total_score, rank_by_a, rank_by_total` |
//! | scatter | `author_id, <x label>, <y label>` |
//!
//! Floats are written in Rust's shortest round-trip form so that files are
//! reproducible byte for byte and parse back to the same values.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::ScatterDataset;
use crate::corpus::ViewScope;
use crate::error::{Error, Result};
use crate::grading::{CumulativeMode, GradeAssignment, RankingRow, RankingTable};
use crate::institutions::{InstitutionScore, PairedRank};
use crate::metrics::{MetricKind, MetricVector};

pub const METRIC_HEADER: [&str; 3] = ["entity_type", "entity_id", "score"];
pub const RANKING_HEADER: [&str; 5] = ["author_id", "score", "rank", "rank_percentile", "cumulative_value"];
pub const GRADES_HEADER: [&str; 7] = [
    "author_id",
    "metric",
    "scheme",
    "grade",
    "rank",
    "rank_percentile",
    "cumulative_value",
];
pub const INSTITUTIONS_HEADER: [&str; 7] = [
    "institution_id",
    "metric",
    "scheme",
    "a_count",
    "total_score",
    "rank_by_a",
    "rank_by_total",
];

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().from_writer(file))
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().from_reader(file))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn parse_field<T: std::str::FromStr>(path: &Path, line: u64, name: &str, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        file: path.display().to_string(),
        line: line as usize,
        message: format!("invalid {name} `{s}`"),
    })
}

/// Run metadata written next to each metric CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSidecar {
    pub kind: MetricKind,
    pub view_descriptor: ViewScope,
    pub config_fingerprint: String,
    pub iterations_used: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub dropped_mass: f64,
}

impl From<&MetricVector> for MetricSidecar {
    fn from(mv: &MetricVector) -> Self {
        MetricSidecar {
            kind: mv.kind,
            view_descriptor: mv.view_descriptor.clone(),
            config_fingerprint: mv.config_fingerprint.clone(),
            iterations_used: mv.iterations_used,
            final_residual: mv.final_residual,
            converged: mv.converged,
            dropped_mass: mv.dropped_mass,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

/// Writes `<csv_path>` and the sidecar at `<csv_path>` with a `.json`
/// extension.
pub fn write_metric(csv_path: &Path, mv: &MetricVector) -> Result<()> {
    let mut w = writer(csv_path)?;
    w.write_record(METRIC_HEADER)?;
    for (id, s) in mv.author_scores.iter() {
        w.write_record(["author", id, &num(s)])?;
    }
    if let Some(venues) = &mv.venue_scores {
        for (id, s) in venues.iter() {
            w.write_record(["venue", id, &num(s)])?;
        }
    }
    w.flush().map_err(|e| Error::io(csv_path, e))?;
    write_json(&csv_path.with_extension("json"), &MetricSidecar::from(mv))
}

pub fn write_ranking(path: &Path, table: &RankingTable) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(RANKING_HEADER)?;
    for r in &table.rows {
        w.write_record([
            r.author_id.as_str(),
            &num(r.score),
            &r.rank.to_string(),
            &num(r.rank_percentile),
            &num(r.cumulative_value),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a ranking CSV back into a table. An empty file yields `None`.
pub fn read_ranking(path: &Path, metric: MetricKind, view: ViewScope) -> Result<Option<RankingTable>> {
    let mut r = reader(path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != RANKING_HEADER.len() {
            return Err(Error::Parse {
                file: path.display().to_string(),
                line: line as usize,
                message: "wrong column count".into(),
            });
        }
        rows.push(RankingRow {
            author_id: rec[0].to_string(),
            score: parse_field(path, line, "score", &rec[1])?,
            rank: parse_field(path, line, "rank", &rec[2])?,
            rank_percentile: parse_field(path, line, "rank_percentile", &rec[3])?,
            cumulative_value: parse_field(path, line, "cumulative_value", &rec[4])?,
        });
    }
    if rows.is_empty() {
        return Ok(None);
    }
    let total_score: f64 = rows.iter().map(|r| r.score).sum();
    Ok(Some(RankingTable {
        metric,
        view,
        total_authors: rows.len(),
        total_score,
        cumulative_mode: CumulativeMode::Exclusive,
        degenerate: total_score <= 0.0,
        rows,
    }))
}

pub fn write_grades(path: &Path, table: &RankingTable, grades: &GradeAssignment) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(GRADES_HEADER)?;
    let scheme = grades.scheme.label();
    for (row, entry) in table.rows.iter().zip(&grades.entries) {
        debug_assert_eq!(row.author_id, entry.author_id);
        w.write_record([
            row.author_id.as_str(),
            table.metric.name(),
            &scheme,
            &entry.grade.to_string(),
            &row.rank.to_string(),
            &num(row.rank_percentile),
            &num(row.cumulative_value),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_institutions(path: &Path, scores: &[InstitutionScore]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(INSTITUTIONS_HEADER)?;
    for s in scores {
        w.write_record([
            s.institution_id.as_str(),
            s.metric.name(),
            &s.scheme,
            &s.a_count.to_string(),
            &num(s.total_score),
            &s.rank_by_a.to_string(),
            &s.rank_by_total.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_institutions(path: &Path) -> Result<Vec<InstitutionScore>> {
    let mut r = reader(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != INSTITUTIONS_HEADER.len() {
            return Err(Error::Parse {
                file: path.display().to_string(),
                line: line as usize,
                message: "wrong column count".into(),
            });
        }
        out.push(InstitutionScore {
            institution_id: rec[0].to_string(),
            metric: rec[1].parse()?,
            scheme: rec[2].to_string(),
            a_count: parse_field(path, line, "a_count", &rec[3])?,
            b_count: 0,
            c_count: 0,
            total_score: parse_field(path, line, "total_score", &rec[4])?,
            rank_by_a: parse_field(path, line, "rank_by_a", &rec[5])?,
            rank_by_total: parse_field(path, line, "rank_by_total", &rec[6])?,
        });
    }
    Ok(out)
}

pub fn write_scatter(out: impl Write, ds: &ScatterDataset) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(["author_id", ds.x_label.as_str(), ds.y_label.as_str()])?;
    for p in &ds.points {
        w.write_record([p.author_id.as_str(), &num(p.x), &num(p.y)])?;
    }
    w.flush().map_err(|e| Error::io("<scatter>", e))
}

pub fn write_paired_ranks(out: impl Write, left: &str, right: &str, rows: &[PairedRank]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(["institution_id", left, right])?;
    for r in rows {
        w.write_record([
            r.institution_id.as_str(),
            &r.left_rank.to_string(),
            &r.right_rank.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<paired ranks>", e))
}
