//! Rank tables and letter grades.
//!
//! A [`RankingTable`] orders authors by score (descending, ties by ascending
//! id) and carries three views of each position: the 1-based rank, the rank
//! percentile `rank / n`, and the cumulative value, i.e. the share of total
//! score held by the authors ranked ahead.
//!
//! Two letter schemes map a row to `A`..`E`:
//!
//! * contribution based: cumulative value against `(0.2, 0.4, 0.6, 0.8)`,
//!   intervals `[0, t1)`, `[t1, t2)`, ..., `[t4, 1]`;
//! * percentile based: rank percentile against `(α⁴, α³, α², α)`,
//!   intervals `(0, α⁴]`, `(α⁴, α³]`, ..., `(α, 1]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::ViewScope;
use crate::error::{Error, Result};
use crate::metrics::{MetricKind, MetricVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LetterGrade {
    A,
    B,
    C,
    D,
    E,
}

impl LetterGrade {
    pub const ALL: [LetterGrade; 5] = [
        LetterGrade::A,
        LetterGrade::B,
        LetterGrade::C,
        LetterGrade::D,
        LetterGrade::E,
    ];

    /// Institution score weight: A = 1, B = 0.5, C = 0.25, D = E = 0.
    pub fn weight(self) -> f64 {
        match self {
            LetterGrade::A => 1.0,
            LetterGrade::B => 0.5,
            LetterGrade::C => 0.25,
            LetterGrade::D | LetterGrade::E => 0.0,
        }
    }

    fn from_bucket(bucket: usize) -> Self {
        Self::ALL[bucket.min(4)]
    }
}

impl fmt::Display for LetterGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LetterGrade::A => "A",
            LetterGrade::B => "B",
            LetterGrade::C => "C",
            LetterGrade::D => "D",
            LetterGrade::E => "E",
        };
        f.write_str(s)
    }
}

impl FromStr for LetterGrade {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LetterGrade::ALL
            .into_iter()
            .find(|g| g.to_string() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown letter grade `{s}`")))
    }
}

pub const CONTRIBUTION_THRESHOLDS: [f64; 4] = [0.20, 0.40, 0.60, 0.80];
pub const DEFAULT_ALPHA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum GradingScheme {
    ContributionBased { thresholds: [f64; 4] },
    PercentileBased { alpha: f64 },
}

impl Default for GradingScheme {
    fn default() -> Self {
        GradingScheme::percentile(DEFAULT_ALPHA)
    }
}

impl GradingScheme {
    pub fn contribution() -> Self {
        GradingScheme::ContributionBased {
            thresholds: CONTRIBUTION_THRESHOLDS,
        }
    }

    pub fn percentile(alpha: f64) -> Self {
        GradingScheme::PercentileBased { alpha }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            GradingScheme::ContributionBased { thresholds } => {
                let in_range = thresholds.iter().all(|&t| t > 0.0 && t < 1.0);
                let increasing = thresholds.windows(2).all(|w| w[0] < w[1]);
                if !(in_range && increasing) {
                    return Err(Error::InvalidConfig(format!(
                        "contribution thresholds must be strictly increasing in (0, 1): {thresholds:?}"
                    )));
                }
            }
            GradingScheme::PercentileBased { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "alpha must lie in (0, 1), got {alpha}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Upper bounds of the A, B, C and D buckets.
    pub fn thresholds(&self) -> [f64; 4] {
        match *self {
            GradingScheme::ContributionBased { thresholds } => thresholds,
            GradingScheme::PercentileBased { alpha } => {
                [alpha.powi(4), alpha.powi(3), alpha.powi(2), alpha]
            }
        }
    }

    /// Short label used in exports, e.g. `contribution` or `percentile:0.25`.
    pub fn label(&self) -> String {
        match self {
            GradingScheme::ContributionBased { thresholds } if *thresholds == CONTRIBUTION_THRESHOLDS => {
                "contribution".to_string()
            }
            GradingScheme::ContributionBased { thresholds } => format!(
                "contribution:{}",
                thresholds.map(|t| t.to_string()).join(",")
            ),
            GradingScheme::PercentileBased { alpha } => format!("percentile:{alpha}"),
        }
    }

    pub fn grade(&self, row: &RankingRow) -> LetterGrade {
        let t = self.thresholds();
        match self {
            GradingScheme::ContributionBased { .. } => {
                LetterGrade::from_bucket(t.iter().take_while(|&&b| row.cumulative_value >= b).count())
            }
            GradingScheme::PercentileBased { .. } => {
                LetterGrade::from_bucket(t.iter().take_while(|&&b| row.rank_percentile > b).count())
            }
        }
    }
}

impl FromStr for GradingScheme {
    type Err = Error;

    /// Accepts `contribution`, `percentile` and `percentile:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        let scheme = match s.split_once(':') {
            None if s == "contribution" => GradingScheme::contribution(),
            None if s == "percentile" => GradingScheme::percentile(DEFAULT_ALPHA),
            Some(("percentile", a)) => GradingScheme::percentile(
                a.parse()
                    .map_err(|_| Error::InvalidConfig(format!("invalid alpha `{a}`")))?,
            ),
            _ => return Err(Error::InvalidConfig(format!("unknown grading scheme `{s}`"))),
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

/// Whether a row's cumulative value counts its own score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CumulativeMode {
    /// Share held strictly ahead of the author.
    #[default]
    Exclusive,
    /// Share held by the author and everyone ahead.
    Inclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub author_id: String,
    pub score: f64,
    pub rank: usize,
    pub rank_percentile: f64,
    pub cumulative_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingTable {
    pub metric: MetricKind,
    pub view: ViewScope,
    pub rows: Vec<RankingRow>,
    pub total_authors: usize,
    pub total_score: f64,
    pub cumulative_mode: CumulativeMode,
    /// Set when every score is zero; ranks then follow the id tie-break and
    /// every cumulative value is 0.
    pub degenerate: bool,
}

impl RankingTable {
    pub fn row(&self, author_id: &str) -> Option<&RankingRow> {
        self.rows.iter().find(|r| r.author_id == author_id)
    }

    /// Score share of one row.
    pub fn share(&self, row: &RankingRow) -> f64 {
        if self.degenerate {
            0.0
        } else {
            row.score / self.total_score
        }
    }
}

pub fn rank_authors(metric: &MetricVector) -> Result<RankingTable> {
    rank_authors_with(metric, CumulativeMode::Exclusive)
}

pub fn rank_authors_with(metric: &MetricVector, mode: CumulativeMode) -> Result<RankingTable> {
    rank_scores(
        metric.kind,
        metric.view_descriptor.clone(),
        metric.author_scores.iter(),
        mode,
    )
}

/// Ranks arbitrary `(id, score)` pairs.
pub fn rank_scores<'a>(
    metric: MetricKind,
    view: ViewScope,
    scores: impl IntoIterator<Item = (&'a str, f64)>,
    mode: CumulativeMode,
) -> Result<RankingTable> {
    let mut entries: Vec<(&str, f64)> = scores.into_iter().collect();
    if entries.is_empty() {
        return Err(Error::InvalidConfig("ranking requires at least one author".into()));
    }
    if let Some((id, s)) = entries.iter().find(|(_, s)| !s.is_finite() || *s < 0.0) {
        return Err(Error::InvalidConfig(format!("author `{id}` has invalid score {s}")));
    }
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let n = entries.len();
    let total: f64 = entries.iter().map(|e| e.1).sum();
    let degenerate = total <= 0.0;

    let mut ahead = 0.0;
    let rows = entries
        .into_iter()
        .enumerate()
        .map(|(i, (id, score))| {
            let counted = match mode {
                CumulativeMode::Exclusive => ahead,
                CumulativeMode::Inclusive => ahead + score,
            };
            ahead += score;
            RankingRow {
                author_id: id.to_string(),
                score,
                rank: i + 1,
                rank_percentile: (i + 1) as f64 / n as f64,
                cumulative_value: if degenerate {
                    0.0
                } else {
                    (counted / total).min(1.0)
                },
            }
        })
        .collect();
    Ok(RankingTable {
        metric,
        view,
        rows,
        total_authors: n,
        total_score: total,
        cumulative_mode: mode,
        degenerate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeEntry {
    pub author_id: String,
    pub grade: LetterGrade,
}

/// Letter per author, in ranking-table order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeAssignment {
    pub metric: MetricKind,
    pub view: ViewScope,
    pub scheme: GradingScheme,
    pub entries: Vec<GradeEntry>,
}

impl GradeAssignment {
    pub fn get(&self, author_id: &str) -> Option<LetterGrade> {
        self.entries
            .iter()
            .find(|e| e.author_id == author_id)
            .map(|e| e.grade)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn assign_letters(table: &RankingTable, scheme: &GradingScheme) -> Result<GradeAssignment> {
    scheme.validate()?;
    Ok(GradeAssignment {
        metric: table.metric,
        view: table.view.clone(),
        scheme: *scheme,
        entries: table
            .rows
            .iter()
            .map(|row| GradeEntry {
                author_id: row.author_id.clone(),
                grade: scheme.grade(row),
            })
            .collect(),
    })
}

/// Count of authors per letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LetterCounts {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub e: usize,
}

impl LetterCounts {
    pub fn get(&self, grade: LetterGrade) -> usize {
        match grade {
            LetterGrade::A => self.a,
            LetterGrade::B => self.b,
            LetterGrade::C => self.c,
            LetterGrade::D => self.d,
            LetterGrade::E => self.e,
        }
    }

    fn bump(&mut self, grade: LetterGrade) {
        match grade {
            LetterGrade::A => self.a += 1,
            LetterGrade::B => self.b += 1,
            LetterGrade::C => self.c += 1,
            LetterGrade::D => self.d += 1,
            LetterGrade::E => self.e += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.a + self.b + self.c + self.d + self.e
    }
}

pub fn letter_distribution(grades: &GradeAssignment) -> LetterCounts {
    let mut counts = LetterCounts::default();
    for e in &grades.entries {
        counts.bump(e.grade);
    }
    counts
}
