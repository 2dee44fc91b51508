//! Exportable analysis datasets: h-index, metric-vs-metric and
//! metric-vs-publication-year scatters, cumulative curves.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::DomainView;
use crate::error::{Error, Result};
use crate::grading::RankingTable;

/// h-index of every author in the view, from in-view citation counts.
pub fn h_indices(view: &DomainView<'_>) -> Vec<usize> {
    let indeg = view.indegrees();
    let mut counts = Vec::new();
    view.author_papers()
        .rows()
        .map(|papers| {
            counts.clear();
            counts.extend(papers.iter().map(|&p| indeg[p as usize] as usize));
            h_from_counts(&mut counts)
        })
        .collect()
}

/// Largest `h` with at least `h` entries `>= h`. Sorts `counts`.
pub fn h_from_counts(counts: &mut [usize]) -> usize {
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts
        .iter()
        .enumerate()
        .take_while(|&(i, &c)| c > i)
        .count()
}

/// h-index of one author; 0 if the author has no papers in the view.
pub fn h_index(author_id: &str, view: &DomainView<'_>) -> usize {
    let Some(a) = view.author_local(author_id) else {
        return 0;
    };
    let indeg = view.indegrees();
    let mut counts: Vec<usize> = view
        .author_papers()
        .row(a)
        .iter()
        .map(|&p| indeg[p as usize] as usize)
        .collect();
    h_from_counts(&mut counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterPoint {
    pub author_id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterDataset {
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<ScatterPoint>,
}

/// Cumulative value under `a` against cumulative value under `b`, one
/// point per author, ordered by author id.
pub fn similarity_scatter(a: &RankingTable, b: &RankingTable) -> Result<ScatterDataset> {
    let left: BTreeMap<&str, f64> = a
        .rows
        .iter()
        .map(|r| (r.author_id.as_str(), r.cumulative_value))
        .collect();
    let right: BTreeMap<&str, f64> = b
        .rows
        .iter()
        .map(|r| (r.author_id.as_str(), r.cumulative_value))
        .collect();
    let mismatch: Vec<String> = left
        .keys()
        .filter(|k| !right.contains_key(*k))
        .chain(right.keys().filter(|k| !left.contains_key(*k)))
        .map(|k| k.to_string())
        .collect();
    if !mismatch.is_empty() {
        return Err(Error::UniverseMismatch(mismatch));
    }
    Ok(ScatterDataset {
        x_label: format!("{} cumulative value", a.metric),
        y_label: format!("{} cumulative value", b.metric),
        points: left
            .iter()
            .map(|(id, &x)| ScatterPoint {
                author_id: id.to_string(),
                x,
                y: right[id],
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YearEnd {
    First,
    Last,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearScatter {
    pub dataset: ScatterDataset,
    /// Table rows whose author has no dated paper in the view.
    pub skipped: usize,
}

/// First or last publication year (x) against cumulative value (y), in
/// table order.
pub fn year_scatter(table: &RankingTable, view: &DomainView<'_>, which: YearEnd) -> YearScatter {
    let mut skipped = 0;
    let mut points = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let years = view
            .author_local(&row.author_id)
            .into_iter()
            .flat_map(|a| view.author_papers().row(a).iter())
            .filter_map(|&p| view.paper_year(p as usize));
        let year = match which {
            YearEnd::First => years.min(),
            YearEnd::Last => years.max(),
        };
        match year {
            Some(y) => points.push(ScatterPoint {
                author_id: row.author_id.clone(),
                x: f64::from(y),
                y: row.cumulative_value,
            }),
            None => skipped += 1,
        }
    }
    let end = match which {
        YearEnd::First => "first",
        YearEnd::Last => "last",
    };
    YearScatter {
        dataset: ScatterDataset {
            x_label: format!("{end} publication year"),
            y_label: format!("{} cumulative value", table.metric),
            points,
        },
        skipped,
    }
}

/// `(rank, cumulative value)` down the table.
pub fn cumulative_curve(table: &RankingTable) -> Vec<(usize, f64)> {
    table
        .rows
        .iter()
        .map(|r| (r.rank, r.cumulative_value))
        .collect()
}

/// Fractional ranks (ties get the mean of their positions), ascending.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = mean;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with tie-averaged ranks. `None` when fewer
/// than two points or when either side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return None;
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in rx.iter().zip(&ry) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
