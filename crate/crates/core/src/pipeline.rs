//! End-to-end runs: corpus in, one directory of CSV/JSON out; plus readers
//! used by the query and comparison commands.
//!
//! Output layout:
//!
//! ```text
//! <out>/manifest.json
//! <out>/index/{papers,authors,venues,institutions}.tsv
//! <out>/<view dir>/<metric>.csv + <metric>.json
//! <out>/<view dir>/<metric>.ranking.csv
//! <out>/<view dir>/<metric>.grades.csv
//! <out>/<view dir>/institutions.csv
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{load_corpus, Corpus, CorpusPaths, DomainView, ValidationReport, ViewScope};
use crate::error::{Error, Result};
use crate::export;
use crate::grading::{
    assign_letters, rank_authors_with, CumulativeMode, GradingScheme, LetterGrade, RankingRow, RankingTable,
    DEFAULT_ALPHA,
};
use crate::institutions::{score_institutions, InstitutionScore};
use crate::metrics::{compute_metric, MetricConfig, MetricKind, MetricVector};

/// Which views a run ranks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewSelection {
    /// The merged overall view plus one view per domain.
    All,
    Overall,
    /// The whole corpus, unclassified papers included.
    Full,
    Domains(Vec<String>),
}

impl std::str::FromStr for ViewSelection {
    type Err = Error;

    /// `all`, `overall`, `full` or a comma-separated list of domain ids.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => ViewSelection::All,
            "overall" => ViewSelection::Overall,
            "full" => ViewSelection::Full,
            "" => return Err(Error::InvalidConfig("empty view selection".into())),
            list => ViewSelection::Domains(list.split(',').map(|d| d.trim().to_string()).collect()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub metrics: Vec<MetricKind>,
    pub views: ViewSelection,
    pub scheme: GradingScheme,
    pub cumulative_mode: CumulativeMode,
    pub metric: MetricConfig,
    /// Worker threads; `None` lets rayon decide. Never affects output.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            metrics: MetricKind::ALL.to_vec(),
            views: ViewSelection::All,
            scheme: GradingScheme::default(),
            cumulative_mode: CumulativeMode::Exclusive,
            metric: MetricConfig::default(),
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::InvalidConfig("no metrics selected".into()));
        }
        self.scheme.validate()?;
        self.metric.validate()
    }

    /// Hash of every knob that can change a number in the output.
    pub fn fingerprint(&self) -> String {
        #[derive(Serialize)]
        struct Knobs<'a> {
            scheme: &'a GradingScheme,
            cumulative_mode: CumulativeMode,
            metric: &'a MetricConfig,
        }
        let json = serde_json::to_vec(&Knobs {
            scheme: &self.scheme,
            cumulative_mode: self.cumulative_mode,
            metric: &self.metric,
        })
        .expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub kind: MetricKind,
    pub iterations_used: usize,
    pub final_residual: f64,
    pub converged: bool,
    pub dropped_mass: f64,
    /// False when the view has no authors; no CSVs are then written.
    pub ranked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewSummary {
    pub scope: ViewScope,
    pub dir: String,
    pub n_papers: usize,
    pub n_authors: usize,
    pub n_venues: usize,
    pub metrics: Vec<MetricSummary>,
    pub institution_skipped_authors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_fingerprint: String,
    pub config: RunConfig,
    pub validation: ValidationReport,
    pub n_papers: usize,
    pub n_authors: usize,
    pub n_venues: usize,
    pub n_institutions: usize,
    pub views: Vec<ViewSummary>,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn read(run_dir: &Path) -> Result<Manifest> {
        export::read_json(&run_dir.join(MANIFEST))
    }

    pub fn view(&self, scope: &str) -> Result<&ViewSummary> {
        self.views
            .iter()
            .find(|v| v.scope.to_string() == scope)
            .ok_or_else(|| Error::NotFound(format!("view `{scope}` is not part of this run")))
    }
}

pub const MANIFEST: &str = "manifest.json";

/// Row label and cell formatter for the institution query table.
type InstitutionField = (&'static str, fn(&InstitutionScore) -> String);

fn metric_file(kind: MetricKind, suffix: &str) -> String {
    format!("{}{suffix}", kind.name())
}

fn dir_name(scope: &ViewScope) -> String {
    match scope {
        ViewScope::Full => "full".into(),
        ViewScope::Overall => "overall".into(),
        ViewScope::Domain(d) => {
            let clean: String = d
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
                .collect();
            format!("domain-{clean}")
        }
    }
}

fn select_views<'c>(corpus: &'c Corpus, sel: &ViewSelection) -> Result<Vec<DomainView<'c>>> {
    Ok(match sel {
        ViewSelection::All => {
            let mut v = vec![corpus.merge_overall()];
            for d in corpus.domain_ids() {
                v.push(corpus.domain_view(d)?);
            }
            v
        }
        ViewSelection::Overall => vec![corpus.merge_overall()],
        ViewSelection::Full => vec![corpus.full_view()],
        ViewSelection::Domains(list) => {
            let mut seen = BTreeSet::new();
            let mut v = Vec::new();
            for d in list {
                if seen.insert(d.as_str()) {
                    v.push(corpus.domain_view(d)?);
                }
            }
            v
        }
    })
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_index(path: &Path, ids: &[String]) -> Result<()> {
    let mut buf = String::with_capacity(ids.len() * 12);
    for (i, id) in ids.iter().enumerate() {
        let _ = writeln!(buf, "{i}\t{id}");
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Loads the corpus from `input` and runs [`run_on_corpus`].
pub fn compute(input: &Path, output: &Path, cfg: &RunConfig) -> Result<Manifest> {
    let (corpus, report) = load_corpus(&CorpusPaths::in_dir(input))?;
    run_on_corpus(&corpus, report, output, cfg)
}

/// Computes every selected metric on every selected view and writes the
/// output tree. Output bytes depend only on the corpus and the numeric
/// configuration, not on thread count or scheduling.
pub fn run_on_corpus(
    corpus: &Corpus,
    validation: ValidationReport,
    output: &Path,
    cfg: &RunConfig,
) -> Result<Manifest> {
    cfg.validate()?;
    let mut metrics = cfg.metrics.clone();
    metrics.sort();
    metrics.dedup();

    let views = select_views(corpus, &cfg.views)?;
    let mut dirs: Vec<String> = Vec::new();
    for v in &views {
        let base = dir_name(v.scope());
        let mut name = base.clone();
        let mut k = 2;
        while dirs.contains(&name) {
            name = format!("{base}-{k}");
            k += 1;
        }
        dirs.push(name);
    }

    let tasks: Vec<(usize, MetricKind)> = (0..views.len())
        .flat_map(|v| metrics.iter().map(move |&m| (v, m)))
        .collect();
    let run = || -> Result<Vec<MetricVector>> {
        tasks
            .par_iter()
            .map(|&(v, m)| compute_metric(&views[v], m, &cfg.metric))
            .collect()
    };
    let results = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };

    create_dir(output)?;
    let index = output.join("index");
    create_dir(&index)?;
    write_index(&index.join("papers.tsv"), corpus.paper_ids())?;
    write_index(&index.join("authors.tsv"), corpus.author_ids())?;
    write_index(&index.join("venues.tsv"), corpus.venue_ids())?;
    write_index(&index.join("institutions.tsv"), corpus.institution_ids())?;

    let mut warnings = Vec::new();
    let mut summaries = Vec::new();
    let mut results = results.into_iter();
    for (view, dir) in views.iter().zip(&dirs) {
        let vdir = output.join(dir);
        create_dir(&vdir)?;
        let mut inst_rows: Vec<InstitutionScore> = Vec::new();
        let mut skipped = 0;
        let mut metric_summaries = Vec::new();
        for &kind in &metrics {
            let mv = results.next().expect("one result per task");
            if !mv.converged {
                warnings.push(format!(
                    "{} on {} did not converge: residual {} after {} iterations",
                    kind, view.scope(), mv.final_residual, mv.iterations_used
                ));
            }
            export::write_metric(&vdir.join(metric_file(kind, ".csv")), &mv)?;
            let ranked = !mv.author_scores.is_empty();
            if ranked {
                let table = rank_authors_with(&mv, cfg.cumulative_mode)?;
                let grades = assign_letters(&table, &cfg.scheme)?;
                export::write_ranking(&vdir.join(metric_file(kind, ".ranking.csv")), &table)?;
                export::write_grades(&vdir.join(metric_file(kind, ".grades.csv")), &table, &grades)?;
                let inst = score_institutions(&grades, corpus);
                skipped = inst.skipped_authors;
                inst_rows.extend(inst.scores);
            }
            metric_summaries.push(MetricSummary {
                kind,
                iterations_used: mv.iterations_used,
                final_residual: mv.final_residual,
                converged: mv.converged,
                dropped_mass: mv.dropped_mass,
                ranked,
            });
        }
        export::write_institutions(&vdir.join("institutions.csv"), &inst_rows)?;
        summaries.push(ViewSummary {
            scope: view.scope().clone(),
            dir: dir.clone(),
            n_papers: view.n_papers(),
            n_authors: view.n_authors(),
            n_venues: view.n_venues(),
            metrics: metric_summaries,
            institution_skipped_authors: skipped,
        });
    }

    let manifest = Manifest {
        config_fingerprint: cfg.fingerprint(),
        config: RunConfig {
            metrics,
            ..cfg.clone()
        },
        validation,
        n_papers: corpus.n_papers(),
        n_authors: corpus.n_authors(),
        n_venues: corpus.n_venues(),
        n_institutions: corpus.n_institutions(),
        views: summaries,
        warnings,
    };
    export::write_json(&output.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

/// Ranking table of one metric in one view of a finished run.
pub fn load_ranking(run_dir: &Path, manifest: &Manifest, scope: &str, kind: MetricKind) -> Result<RankingTable> {
    let view = manifest.view(scope)?;
    if !view.metrics.iter().any(|m| m.kind == kind && m.ranked) {
        return Err(Error::NotFound(format!("no {kind} ranking for view `{scope}`")));
    }
    let path = run_dir.join(&view.dir).join(metric_file(kind, ".ranking.csv"));
    let mut table = export::read_ranking(&path, kind, view.scope.clone())?
        .ok_or_else(|| Error::NotFound(format!("{} is empty", path.display())))?;
    table.cumulative_mode = manifest.config.cumulative_mode;
    Ok(table)
}

pub fn load_institutions(run_dir: &Path, manifest: &Manifest, scope: &str, kind: MetricKind) -> Result<Vec<InstitutionScore>> {
    let view = manifest.view(scope)?;
    let rows = export::read_institutions(&run_dir.join(&view.dir).join("institutions.csv"))?;
    Ok(rows.into_iter().filter(|r| r.metric == kind).collect())
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

fn letters(row: &RankingRow, scheme: &GradingScheme) -> (LetterGrade, LetterGrade) {
    let alpha = match scheme {
        GradingScheme::PercentileBased { alpha } => *alpha,
        GradingScheme::ContributionBased { .. } => DEFAULT_ALPHA,
    };
    (
        GradingScheme::contribution().grade(row),
        GradingScheme::percentile(alpha).grade(row),
    )
}

fn render_table(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |out: &mut String, cells: &[String]| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            let _ = write!(s, "{c:<w$}");
        }
        let _ = writeln!(out, "{}", s.trim_end());
    };
    line(out, header);
    for r in rows {
        line(out, r);
    }
}

/// Per-view report of rank, rank percentile, cumulative value and both
/// letter grades of each author under each metric. Several authors are
/// listed side by side within every row type.
pub fn query_authors(run_dir: &Path, ids: &[String]) -> Result<String> {
    let manifest = Manifest::read(run_dir)?;
    let mut out = String::new();
    let mut found = vec![false; ids.len()];
    for view in &manifest.views {
        let scope = view.scope.to_string();
        let kinds: Vec<MetricKind> = view.metrics.iter().filter(|m| m.ranked).map(|m| m.kind).collect();
        let mut tables = Vec::new();
        for &k in &kinds {
            tables.push(load_ranking(run_dir, &manifest, &scope, k)?);
        }
        let present: Vec<usize> = (0..ids.len())
            .filter(|&i| tables.iter().any(|t| t.row(&ids[i]).is_some()))
            .collect();
        if present.is_empty() {
            continue;
        }
        for &i in &present {
            found[i] = true;
        }
        let mut header = vec!["Value Type".to_string()];
        if ids.len() > 1 {
            header.push("Author".into());
        }
        header.extend(kinds.iter().map(|k| k.abbrev().to_string()));
        let kinds_of = |f: &dyn Fn(&RankingRow) -> String, label: &str| -> Vec<Vec<String>> {
            present
                .iter()
                .map(|&i| {
                    let mut row = vec![label.to_string()];
                    if ids.len() > 1 {
                        row.push(ids[i].clone());
                    }
                    row.extend(
                        tables
                            .iter()
                            .map(|t| t.row(&ids[i]).map_or_else(|| "-".to_string(), f)),
                    );
                    row
                })
                .collect()
        };
        let scheme = manifest.config.scheme;
        let mut rows = Vec::new();
        rows.extend(kinds_of(&|r| r.rank.to_string(), "Rank"));
        rows.extend(kinds_of(&|r| pct(r.rank_percentile), "RankPer"));
        rows.extend(kinds_of(&|r| pct(r.cumulative_value), "CumValue"));
        rows.extend(kinds_of(&|r| letters(r, &scheme).0.to_string(), "Contri. Letter"));
        rows.extend(kinds_of(&|r| letters(r, &scheme).1.to_string(), "RankPer Letter"));
        let _ = writeln!(out, "[{scope}]");
        render_table(&mut out, &header, &rows);
        out.push('\n');
    }
    let missing: Vec<&str> = ids
        .iter()
        .zip(&found)
        .filter(|(_, f)| !**f)
        .map(|(id, _)| id.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::NotFound(format!("author(s) not ranked in any view: {}", missing.join(", "))));
    }
    Ok(out)
}

/// Per-view report of A count, total score and both ranks of each
/// institution under each metric.
pub fn query_institutions(run_dir: &Path, ids: &[String]) -> Result<String> {
    let manifest = Manifest::read(run_dir)?;
    let mut out = String::new();
    let mut found = vec![false; ids.len()];
    for view in &manifest.views {
        let rows = export::read_institutions(&run_dir.join(&view.dir).join("institutions.csv"))?;
        let kinds: Vec<MetricKind> = view.metrics.iter().filter(|m| m.ranked).map(|m| m.kind).collect();
        let lookup = |id: &str, k: MetricKind| rows.iter().find(|r| r.institution_id == id && r.metric == k);
        let present: Vec<usize> = (0..ids.len())
            .filter(|&i| kinds.iter().any(|&k| lookup(&ids[i], k).is_some()))
            .collect();
        if present.is_empty() {
            continue;
        }
        for &i in &present {
            found[i] = true;
        }
        let mut header = vec!["Value Type".to_string()];
        if ids.len() > 1 {
            header.push("Institution".into());
        }
        header.extend(kinds.iter().map(|k| k.abbrev().to_string()));
        let mut table = Vec::new();
        let fields: [InstitutionField; 4] = [
            ("#A", |s| s.a_count.to_string()),
            ("Total", |s| format!("{}", s.total_score)),
            ("Rank by A", |s| s.rank_by_a.to_string()),
            ("Rank by total", |s| s.rank_by_total.to_string()),
        ];
        for (label, f) in fields {
            for &i in &present {
                let mut row = vec![label.to_string()];
                if ids.len() > 1 {
                    row.push(ids[i].clone());
                }
                row.extend(kinds.iter().map(|&k| lookup(&ids[i], k).map_or_else(|| "-".to_string(), f)));
                table.push(row);
            }
        }
        let _ = writeln!(out, "[{}]", view.scope);
        render_table(&mut out, &header, &table);
        out.push('\n');
    }
    let missing: Vec<&str> = ids
        .iter()
        .zip(&found)
        .filter(|(_, f)| !**f)
        .map(|(id, _)| id.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::NotFound(format!(
            "institution(s) not ranked in any view: {}",
            missing.join(", ")
        )));
    }
    Ok(out)
}

/// Runs `f` against `path`, or against stdout when `path` is `None`.
pub fn emit(path: Option<&PathBuf>, f: impl FnOnce(&mut dyn std::io::Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut file = fs::File::create(p).map_err(|e| Error::io(p, e))?;
            f(&mut file)?;
            file.flush().map_err(|e| Error::io(p, e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush().map_err(|e| Error::io("<stdout>", e))
        }
    }
}
