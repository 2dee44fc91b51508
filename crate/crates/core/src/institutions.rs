//! Institution rankings aggregated from author letter grades.
//!
//! Two granularities: the number of `A` authors, and a total score with
//! `A = 1`, `B = 0.5`, `C = 0.25`, `D = E = 0`. Both are ranked with
//! standard competition ranking (tied institutions share the better rank,
//! the next rank skips).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::analysis::spearman;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::grading::{GradeAssignment, LetterGrade};
use crate::metrics::MetricKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstitutionScore {
    pub institution_id: String,
    pub metric: MetricKind,
    /// Grading scheme label, see [`crate::GradingScheme::label`].
    pub scheme: String,
    pub a_count: usize,
    pub b_count: usize,
    pub c_count: usize,
    pub total_score: f64,
    pub rank_by_a: usize,
    pub rank_by_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstitutionRanking {
    /// Ordered by total score, then A count, then id.
    pub scores: Vec<InstitutionScore>,
    /// Graded authors that have no institution (or are unknown to the corpus).
    pub skipped_authors: usize,
}

/// Rank of each key under "higher is better" competition ranking.
#[cfg(test)]
fn competition_ranks<K: PartialOrd>(keys: &[K]) -> Vec<usize> {
    keys.iter()
        .map(|k| 1 + keys.iter().filter(|other| *other > k).count())
        .collect()
}

fn competition_ranks_sorted(keys: &[f64]) -> Vec<usize> {
    // O(n log n) variant of `competition_ranks` for large inputs.
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
    let mut ranks = vec![0; keys.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = if pos > 0 && keys[order[pos - 1]] == keys[i] {
            ranks[order[pos - 1]]
        } else {
            pos + 1
        };
    }
    ranks
}

pub fn score_institutions(grades: &GradeAssignment, corpus: &Corpus) -> InstitutionRanking {
    let mut counts: BTreeMap<u32, [usize; 5]> = BTreeMap::new();
    let mut skipped = 0;
    for entry in &grades.entries {
        let inst = corpus
            .author_index(&entry.author_id)
            .and_then(|a| corpus.author_institution(a));
        match inst {
            Some(i) => counts.entry(i).or_default()[entry.grade as usize] += 1,
            None => skipped += 1,
        }
    }

    let label = grades.scheme.label();
    let mut scores: Vec<InstitutionScore> = counts
        .into_iter()
        .map(|(inst, c)| {
            let total = LetterGrade::ALL
                .iter()
                .map(|&g| c[g as usize] as f64 * g.weight())
                .sum();
            InstitutionScore {
                institution_id: corpus.institution_id(inst as usize).to_string(),
                metric: grades.metric,
                scheme: label.clone(),
                a_count: c[0],
                b_count: c[1],
                c_count: c[2],
                total_score: total,
                rank_by_a: 0,
                rank_by_total: 0,
            }
        })
        .collect();

    let by_a: Vec<f64> = scores.iter().map(|s| s.a_count as f64).collect();
    let by_total: Vec<f64> = scores.iter().map(|s| s.total_score).collect();
    for (s, (ra, rt)) in scores.iter_mut().zip(
        competition_ranks_sorted(&by_a)
            .into_iter()
            .zip(competition_ranks_sorted(&by_total)),
    ) {
        s.rank_by_a = ra;
        s.rank_by_total = rt;
    }
    scores.sort_by(|x, y| {
        x.rank_by_total
            .cmp(&y.rank_by_total)
            .then(x.rank_by_a.cmp(&y.rank_by_a))
            .then_with(|| x.institution_id.cmp(&y.institution_id))
    });
    InstitutionRanking {
        scores,
        skipped_authors: skipped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankBasis {
    ByA,
    ByTotal,
}

impl RankBasis {
    fn rank(self, s: &InstitutionScore) -> usize {
        match self {
            RankBasis::ByA => s.rank_by_a,
            RankBasis::ByTotal => s.rank_by_total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedRank {
    pub institution_id: String,
    pub left_rank: usize,
    pub right_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankComparison {
    /// Ordered by institution id.
    pub rows: Vec<PairedRank>,
    /// Spearman correlation of the two rank columns; `None` when either
    /// column is constant.
    pub spearman: Option<f64>,
}

/// Pairs two institution rankings over the same institution universe.
pub fn compare_rankings(
    left: &[InstitutionScore],
    left_basis: RankBasis,
    right: &[InstitutionScore],
    right_basis: RankBasis,
) -> Result<RankComparison> {
    let l: BTreeMap<&str, usize> = left
        .iter()
        .map(|s| (s.institution_id.as_str(), left_basis.rank(s)))
        .collect();
    let r: BTreeMap<&str, usize> = right
        .iter()
        .map(|s| (s.institution_id.as_str(), right_basis.rank(s)))
        .collect();
    let lk: BTreeSet<&str> = l.keys().copied().collect();
    let rk: BTreeSet<&str> = r.keys().copied().collect();
    if lk != rk {
        return Err(Error::UniverseMismatch(
            lk.symmetric_difference(&rk).map(|s| s.to_string()).collect(),
        ));
    }
    let rows: Vec<PairedRank> = l
        .iter()
        .map(|(id, &lr)| PairedRank {
            institution_id: id.to_string(),
            left_rank: lr,
            right_rank: r[id],
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|p| p.left_rank as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|p| p.right_rank as f64).collect();
    Ok(RankComparison {
        spearman: spearman(&xs, &ys),
        rows,
    })
}
