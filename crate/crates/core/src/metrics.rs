//! The seven author metrics.
//!
//! Notation used below, all over one [`DomainView`]:
//!
//! * `R`: paper -> cited paper (0/1),
//! * `A`: paper -> author (0/1),
//! * `V`: paper -> venue (0/1, at most one entry per row),
//! * `(X)*`: row normalization of `X`, zero rows left at zero.
//!
//! The iterative metrics run PageRank on
//!
//! * CV: `(R)*`, paper scores then split to authors through `πᵀ(A)*`,
//! * Influence: `(H)*` with `H = (Aᵀ)*(R)*(A)*`,
//! * Followers: `(F)*`, `F[i][j] = 1` iff author `i` cited a paper of `j ≠ i`,
//! * Connections: `(N)*` with `N = AᵀA` (see [`ConnectionsMode`]),
//! * Exposure: `(P)*` over authors ⊕ venues, where
//!   `P = [[m (H)*, (1−m) T_AV], [(1−m) T_VA, m (Y)*]]`,
//!   `Y = (Vᵀ)*(R)*(V)*`, `T_AV = (Aᵀ)*(V)*`, `T_VA = (Vᵀ)*(A)*`.
//!
//! `H`, `Y` and `P` are never formed. Their operators chain the sparse
//! factors and rescale each row by the reciprocal of its row sum, which is
//! itself computed by pushing the all-ones vector through the factors.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{DomainView, ViewScope};
use crate::error::{Error, Result};
use crate::ranker::{
    power_iterate, row_normalize, PowerIterationConfig, RankVector, SparseTransition,
    SparseWeights, Teleport, TransitionOperator, UniformSplit,
};
use crate::sparse::Csr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "CC")]
    Cc,
    #[serde(rename = "BCC")]
    Bcc,
    #[serde(rename = "CV")]
    Cv,
    Influence,
    Followers,
    Connections,
    Exposure,
}

impl MetricKind {
    pub const ALL: [MetricKind; 7] = [
        MetricKind::Cc,
        MetricKind::Bcc,
        MetricKind::Cv,
        MetricKind::Influence,
        MetricKind::Followers,
        MetricKind::Connections,
        MetricKind::Exposure,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Cc => "CC",
            MetricKind::Bcc => "BCC",
            MetricKind::Cv => "CV",
            MetricKind::Influence => "Influence",
            MetricKind::Followers => "Followers",
            MetricKind::Connections => "Connections",
            MetricKind::Exposure => "Exposure",
        }
    }

    /// Column label used in compact tables.
    pub fn abbrev(self) -> &'static str {
        match self {
            MetricKind::Cc => "CC",
            MetricKind::Bcc => "BCC",
            MetricKind::Cv => "CV",
            MetricKind::Influence => "Inf",
            MetricKind::Followers => "Fol",
            MetricKind::Connections => "Con",
            MetricKind::Exposure => "Exp",
        }
    }

    /// Whether scores come from power iteration (and so form a distribution).
    pub fn is_iterative(self) -> bool {
        !matches!(self, MetricKind::Cc | MetricKind::Bcc)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || k.abbrev().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionsMode {
    /// `N[i][j]` = number of joint papers.
    #[default]
    Weighted,
    /// `N[i][j]` = 1 if any joint paper.
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelfLoops {
    Include,
    #[default]
    Exclude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SelfCitationPolicy {
    #[default]
    Keep,
    Exclude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub connections_mode: ConnectionsMode,
    pub connections_self_loops: SelfLoops,
    /// Weight on same-type flow inside the Exposure block matrix.
    pub exposure_mix: f64,
    pub self_citation_policy: SelfCitationPolicy,
}

impl Default for MetricConfig {
    fn default() -> Self {
        let ranker = PowerIterationConfig::default();
        MetricConfig {
            damping: ranker.damping,
            tolerance: ranker.tolerance,
            max_iterations: ranker.max_iterations,
            connections_mode: ConnectionsMode::default(),
            connections_self_loops: SelfLoops::default(),
            exposure_mix: 0.5,
            self_citation_policy: SelfCitationPolicy::default(),
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        self.ranker().validate()?;
        if !(self.exposure_mix > 0.0 && self.exposure_mix < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "exposure_mix must lie in (0, 1), got {}",
                self.exposure_mix
            )));
        }
        Ok(())
    }

    pub fn ranker(&self) -> PowerIterationConfig {
        PowerIterationConfig {
            damping: self.damping,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            teleport: Teleport::Uniform,
        }
    }

    /// Hex SHA-256 of the canonical JSON encoding of every knob.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Scores keyed by entity id, ids ascending.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScoreMap {
    ids: Vec<String>,
    values: Vec<f64>,
}

impl ScoreMap {
    pub fn new(ids: Vec<String>, values: Vec<f64>) -> Self {
        assert_eq!(ids.len(), values.len());
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]), "ids must be sorted");
        ScoreMap { ids, values }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.ids
            .binary_search_by(|p| p.as_str().cmp(id))
            .ok()
            .map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.ids.iter().map(String::as_str).zip(self.values.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub kind: MetricKind,
    pub author_scores: ScoreMap,
    /// Only for [`MetricKind::Exposure`].
    pub venue_scores: Option<ScoreMap>,
    pub view_descriptor: ViewScope,
    pub config_fingerprint: String,
    pub iterations_used: usize,
    pub final_residual: f64,
    pub converged: bool,
    /// CV mass that sat on authorless papers and was not credited to anyone.
    pub dropped_mass: f64,
}

impl MetricVector {
    fn counted(view: &DomainView<'_>, kind: MetricKind, cfg: &MetricConfig, scores: Vec<f64>) -> Self {
        MetricVector {
            kind,
            author_scores: ScoreMap::new(view.author_ids(), scores),
            venue_scores: None,
            view_descriptor: view.scope().clone(),
            config_fingerprint: cfg.fingerprint(),
            iterations_used: 0,
            final_residual: 0.0,
            converged: true,
            dropped_mass: 0.0,
        }
    }

    fn iterated(
        view: &DomainView<'_>,
        kind: MetricKind,
        cfg: &MetricConfig,
        scores: Vec<f64>,
        run: Option<&RankVector>,
    ) -> Self {
        let mut mv = Self::counted(view, kind, cfg, scores);
        if let Some(run) = run {
            mv.iterations_used = run.iterations_used;
            mv.final_residual = run.final_residual;
            mv.converged = run.converged;
        }
        mv
    }

    /// Sum of author scores plus, for Exposure, venue scores.
    pub fn total_mass(&self) -> f64 {
        self.author_scores.sum() + self.venue_scores.as_ref().map_or(0.0, ScoreMap::sum)
    }
}

// ---------------------------------------------------------------------------
// Counting metrics
// ---------------------------------------------------------------------------

/// Citation count: every co-author receives the paper's full in-view
/// citation count.
pub fn compute_cc(view: &DomainView<'_>) -> MetricVector {
    compute_cc_with(view, &MetricConfig::default())
}

fn compute_cc_with(view: &DomainView<'_>, cfg: &MetricConfig) -> MetricVector {
    let indeg = view.indegrees();
    let scores = view
        .author_papers()
        .rows()
        .map(|papers| papers.iter().map(|&p| u64::from(indeg[p as usize])).sum::<u64>() as f64)
        .collect();
    MetricVector::counted(view, MetricKind::Cc, cfg, scores)
}

/// Balanced citation count: a paper's citations are split equally among
/// its co-authors.
pub fn compute_bcc(view: &DomainView<'_>) -> MetricVector {
    compute_bcc_with(view, &MetricConfig::default())
}

fn compute_bcc_with(view: &DomainView<'_>, cfg: &MetricConfig) -> MetricVector {
    let indeg = view.indegrees();
    let pa = view.paper_authors();
    let scores = view
        .author_papers()
        .rows()
        .map(|papers| {
            papers
                .iter()
                .map(|&p| f64::from(indeg[p as usize]) / pa.degree(p as usize) as f64)
                .sum()
        })
        .collect();
    MetricVector::counted(view, MetricKind::Bcc, cfg, scores)
}

// ---------------------------------------------------------------------------
// CV
// ---------------------------------------------------------------------------

pub fn compute_cv(view: &DomainView<'_>, cfg: &MetricConfig) -> Result<MetricVector> {
    cfg.validate()?;
    if view.n_papers() == 0 {
        return Ok(MetricVector::counted(
            view,
            MetricKind::Cv,
            cfg,
            vec![0.0; view.n_authors()],
        ));
    }
    let op = row_normalize(&SparseWeights::from_adjacency(view.citations()))?;
    let run = power_iterate(&op, &cfg.ranker())?;
    let mut scores = vec![0.0; view.n_authors()];
    UniformSplit::new(view.paper_authors()).push(&run.values, &mut scores);
    let dropped: f64 = (0..view.n_papers())
        .filter(|&p| view.paper_authors().degree(p) == 0)
        .map(|p| run.values[p])
        .sum();
    let mut mv = MetricVector::iterated(view, MetricKind::Cv, cfg, scores, Some(&run));
    mv.dropped_mass = dropped;
    Ok(mv)
}

// ---------------------------------------------------------------------------
// Influence
// ---------------------------------------------------------------------------

/// `(H)*` with `H = (Aᵀ)*(R)*(A)*`, applied without forming `H`.
pub struct InfluenceOperator<'v> {
    author_papers: &'v Csr,
    citations: &'v Csr,
    paper_authors: &'v Csr,
    /// `1 / rowsum(H)`, or 0 on dangling rows.
    inv_row_sum: Vec<f64>,
    dangling: Vec<u32>,
}

/// `H · 1` computed right-to-left through the factors.
fn influence_row_sums(view: &DomainView<'_>) -> Vec<f64> {
    let has_author: Vec<f64> = (0..view.n_papers())
        .map(|p| f64::from(u8::from(view.paper_authors().degree(p) > 0)))
        .collect();
    let r = UniformSplit::new(view.citations()).row_means(&has_author);
    UniformSplit::new(view.author_papers()).row_means(&r)
}

fn reciprocal_or_dangling(row_sums: &[f64]) -> (Vec<f64>, Vec<u32>) {
    let mut dangling = Vec::new();
    let inv = row_sums
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            if s > 0.0 {
                1.0 / s
            } else {
                dangling.push(i as u32);
                0.0
            }
        })
        .collect();
    (inv, dangling)
}

pub fn build_influence_operator<'v>(view: &'v DomainView<'_>) -> InfluenceOperator<'v> {
    let (inv_row_sum, dangling) = reciprocal_or_dangling(&influence_row_sums(view));
    InfluenceOperator {
        author_papers: view.author_papers(),
        citations: view.citations(),
        paper_authors: view.paper_authors(),
        inv_row_sum,
        dangling,
    }
}

impl InfluenceOperator<'_> {
    /// `out += xᵀ H` (unnormalized).
    fn push_h(&self, x: &[f64], out: &mut [f64]) {
        let n_papers = self.paper_authors.n_rows();
        let mut own = vec![0.0; n_papers];
        UniformSplit::new(self.author_papers).push(x, &mut own);
        let mut cited = vec![0.0; n_papers];
        UniformSplit::new(self.citations).push(&own, &mut cited);
        UniformSplit::new(self.paper_authors).push(&cited, out);
    }
}

impl TransitionOperator for InfluenceOperator<'_> {
    fn dimension(&self) -> usize {
        self.inv_row_sum.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let scaled: Vec<f64> = x.iter().zip(&self.inv_row_sum).map(|(a, b)| a * b).collect();
        out.fill(0.0);
        self.push_h(&scaled, out);
    }

    fn dangling_rows(&self) -> &[u32] {
        &self.dangling
    }
}

fn run_author_walk(
    view: &DomainView<'_>,
    kind: MetricKind,
    cfg: &MetricConfig,
    op: &dyn TransitionOperator,
) -> Result<MetricVector> {
    if op.dimension() == 0 {
        return Ok(MetricVector::iterated(view, kind, cfg, Vec::new(), None));
    }
    let run = power_iterate(op, &cfg.ranker())?;
    Ok(MetricVector::iterated(view, kind, cfg, run.values.clone(), Some(&run)))
}

pub fn compute_influence(view: &DomainView<'_>, cfg: &MetricConfig) -> Result<MetricVector> {
    cfg.validate()?;
    let op = build_influence_operator(view);
    run_author_walk(view, MetricKind::Influence, cfg, &op)
}

// ---------------------------------------------------------------------------
// Followers and Connections
// ---------------------------------------------------------------------------

/// Binary author graph: `i -> j` iff some paper of `i` cites a paper of
/// `j`, `i ≠ j`. Rows sorted.
pub fn followers_adjacency(view: &DomainView<'_>) -> Csr {
    let (ap, cit, pa) = (view.author_papers(), view.citations(), view.paper_authors());
    let mut offsets = Vec::with_capacity(view.n_authors() + 1);
    let mut targets = Vec::new();
    let mut buf: Vec<u32> = Vec::new();
    offsets.push(0);
    for i in 0..view.n_authors() {
        buf.clear();
        for &p in ap.row(i) {
            for &q in cit.row(p as usize) {
                buf.extend(pa.row(q as usize).iter().copied().filter(|&j| j as usize != i));
            }
        }
        buf.sort_unstable();
        buf.dedup();
        targets.extend_from_slice(&buf);
        offsets.push(targets.len());
    }
    Csr::from_parts(offsets, targets)
}

pub fn build_followers_operator(view: &DomainView<'_>) -> Result<SparseTransition> {
    row_normalize(&SparseWeights::from_adjacency(&followers_adjacency(view)))
}

pub fn compute_followers(view: &DomainView<'_>, cfg: &MetricConfig) -> Result<MetricVector> {
    cfg.validate()?;
    let op = build_followers_operator(view)?;
    run_author_walk(view, MetricKind::Followers, cfg, &op)
}

/// Co-authorship weights `N = AᵀA`, shaped by the mode and diagonal knobs.
pub fn connections_weights(view: &DomainView<'_>, cfg: &MetricConfig) -> SparseWeights {
    let (ap, pa) = (view.author_papers(), view.paper_authors());
    let n = view.n_authors();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    let mut buf: Vec<u32> = Vec::new();
    offsets.push(0);
    for i in 0..n {
        buf.clear();
        for &p in ap.row(i) {
            buf.extend(pa.row(p as usize).iter().copied().filter(|&j| {
                j as usize != i || cfg.connections_self_loops == SelfLoops::Include
            }));
        }
        buf.sort_unstable();
        let mut k = 0;
        while k < buf.len() {
            let j = buf[k];
            let run = buf[k..].iter().take_while(|&&x| x == j).count();
            cols.push(j);
            values.push(match cfg.connections_mode {
                ConnectionsMode::Weighted => run as f64,
                ConnectionsMode::Binary => 1.0,
            });
            k += run;
        }
        offsets.push(cols.len());
    }
    SparseWeights::from_parts(n, offsets, cols, values)
}

pub fn compute_connections(view: &DomainView<'_>, cfg: &MetricConfig) -> Result<MetricVector> {
    cfg.validate()?;
    let op = row_normalize(&connections_weights(view, cfg))?;
    run_author_walk(view, MetricKind::Connections, cfg, &op)
}

// ---------------------------------------------------------------------------
// Exposure
// ---------------------------------------------------------------------------

/// `(P)*` over the index space `authors ⊕ venues`.
pub struct ExposureOperator<'v> {
    influence: InfluenceOperator<'v>,
    venue_papers: &'v Csr,
    citations: &'v Csr,
    paper_venue: Csr,
    mix: f64,
    n_authors: usize,
    /// `1 / rowsum(H)` and `1 / rowsum(Y)`, 0 where the block row is empty.
    inv_h: Vec<f64>,
    inv_y: Vec<f64>,
    /// `1 / rowsum(P)`, 0 on dangling rows.
    inv_p: Vec<f64>,
    dangling: Vec<u32>,
}

pub fn build_exposure_operator<'v>(view: &'v DomainView<'_>, cfg: &MetricConfig) -> ExposureOperator<'v> {
    let mix = cfg.exposure_mix;
    let influence = build_influence_operator(view);
    let paper_venue = Csr::from_rows(
        &view
            .paper_venue()
            .iter()
            .map(|v| v.map(|v| vec![v]).unwrap_or_default())
            .collect::<Vec<_>>(),
    );

    let has_venue: Vec<f64> = view
        .paper_venue()
        .iter()
        .map(|v| f64::from(u8::from(v.is_some())))
        .collect();
    let has_author: Vec<f64> = (0..view.n_papers())
        .map(|p| f64::from(u8::from(view.paper_authors().degree(p) > 0)))
        .collect();
    let y_sum = UniformSplit::new(view.venue_papers())
        .row_means(&UniformSplit::new(view.citations()).row_means(&has_venue));
    let tav_sum = UniformSplit::new(view.author_papers()).row_means(&has_venue);
    let tva_sum = UniformSplit::new(view.venue_papers()).row_means(&has_author);
    let (inv_y, _) = reciprocal_or_dangling(&y_sum);

    let block = |normalized_nonempty: bool, cross: f64| {
        mix * f64::from(u8::from(normalized_nonempty)) + (1.0 - mix) * cross
    };
    let mut p_sum: Vec<f64> = influence
        .inv_row_sum
        .iter()
        .zip(&tav_sum)
        .map(|(&ih, &t)| block(ih > 0.0, t))
        .collect();
    p_sum.extend(inv_y.iter().zip(&tva_sum).map(|(&iy, &t)| block(iy > 0.0, t)));
    let (inv_p, dangling) = reciprocal_or_dangling(&p_sum);

    ExposureOperator {
        inv_h: influence.inv_row_sum.clone(),
        influence,
        venue_papers: view.venue_papers(),
        citations: view.citations(),
        paper_venue,
        mix,
        n_authors: view.n_authors(),
        inv_y,
        inv_p,
        dangling,
    }
}

impl TransitionOperator for ExposureOperator<'_> {
    fn dimension(&self) -> usize {
        self.inv_p.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n_a = self.n_authors;
        let n_papers = self.paper_venue.n_rows();
        let w: Vec<f64> = x.iter().zip(&self.inv_p).map(|(a, b)| a * b).collect();
        let (wa, wv) = w.split_at(n_a);
        out.fill(0.0);
        let (out_a, out_v) = out.split_at_mut(n_a);

        // author -> author through m (H)*
        let h_in: Vec<f64> = wa.iter().zip(&self.inv_h).map(|(a, b)| self.mix * a * b).collect();
        self.influence.push_h(&h_in, out_a);

        // author -> venue through (1 − m) T_AV
        let cross_a: Vec<f64> = wa.iter().map(|a| (1.0 - self.mix) * a).collect();
        let mut own = vec![0.0; n_papers];
        UniformSplit::new(self.influence.author_papers).push(&cross_a, &mut own);
        UniformSplit::new(&self.paper_venue).push(&own, out_v);

        // venue -> author through (1 − m) T_VA
        let cross_v: Vec<f64> = wv.iter().map(|v| (1.0 - self.mix) * v).collect();
        let mut published = vec![0.0; n_papers];
        UniformSplit::new(self.venue_papers).push(&cross_v, &mut published);
        UniformSplit::new(self.influence.paper_authors).push(&published, out_a);

        // venue -> venue through m (Y)*
        let y_in: Vec<f64> = wv.iter().zip(&self.inv_y).map(|(v, b)| self.mix * v * b).collect();
        let mut published = vec![0.0; n_papers];
        UniformSplit::new(self.venue_papers).push(&y_in, &mut published);
        let mut cited = vec![0.0; n_papers];
        UniformSplit::new(self.citations).push(&published, &mut cited);
        UniformSplit::new(&self.paper_venue).push(&cited, out_v);
    }

    fn dangling_rows(&self) -> &[u32] {
        &self.dangling
    }
}

pub fn compute_exposure(view: &DomainView<'_>, cfg: &MetricConfig) -> Result<MetricVector> {
    cfg.validate()?;
    let op = build_exposure_operator(view, cfg);
    let n_a = view.n_authors();
    let (authors, venues, run) = if op.dimension() == 0 {
        (Vec::new(), Vec::new(), None)
    } else {
        let run = power_iterate(&op, &cfg.ranker())?;
        let (a, v) = run.values.split_at(n_a);
        (a.to_vec(), v.to_vec(), Some(run))
    };
    let mut mv = MetricVector::iterated(view, MetricKind::Exposure, cfg, authors, run.as_ref());
    mv.venue_scores = Some(ScoreMap::new(view.venue_ids(), venues));
    Ok(mv)
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

/// Computes one metric, applying the self-citation policy first.
pub fn compute_metric(view: &DomainView<'_>, kind: MetricKind, cfg: &MetricConfig) -> Result<MetricVector> {
    cfg.validate()?;
    let filtered;
    let view = if cfg.self_citation_policy == SelfCitationPolicy::Exclude
        && !view.self_citations_excluded()
    {
        filtered = view.exclude_self_citations();
        &filtered
    } else {
        view
    };
    match kind {
        MetricKind::Cc => Ok(compute_cc_with(view, cfg)),
        MetricKind::Bcc => Ok(compute_bcc_with(view, cfg)),
        MetricKind::Cv => compute_cv(view, cfg),
        MetricKind::Influence => compute_influence(view, cfg),
        MetricKind::Followers => compute_followers(view, cfg),
        MetricKind::Connections => compute_connections(view, cfg),
        MetricKind::Exposure => compute_exposure(view, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::{authors, paper};
    use crate::corpus::{Corpus, PaperRecord, VenueRecord};
    use crate::ranker::densify;

    fn corpus(papers: &[PaperRecord], author_ids: &[&str]) -> Corpus {
        Corpus::from_records(papers, &authors(author_ids), &[], &[]).unwrap().0
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn cc_and_bcc_credit_rules() {
        let mut papers = vec![paper("target", &["x", "y"], &["d"], &[])];
        for i in 0..10 {
            papers.push(paper(&format!("c{i}"), &[], &["d"], &["target"]));
        }
        let c = corpus(&papers, &["x", "y", "z"]);
        let v = c.full_view();
        let cc = compute_cc(&v);
        assert_eq!(cc.author_scores.get("x"), Some(10.0));
        assert_eq!(cc.author_scores.get("y"), Some(10.0));
        assert_eq!(cc.author_scores.get("z"), Some(0.0));
        let bcc = compute_bcc(&v);
        assert_eq!(bcc.author_scores.get("x"), Some(5.0));
        assert_eq!(bcc.author_scores.get("y"), Some(5.0));
    }

    #[test]
    fn cv_trivial_cases() {
        let cfg = MetricConfig::default();
        let c = corpus(&[paper("p", &["x"], &[], &[])], &["x"]);
        let cv = compute_cv(&c.full_view(), &cfg).unwrap();
        assert!((cv.author_scores.get("x").unwrap() - 1.0).abs() < 1e-15);

        let c = corpus(
            &[paper("p", &["x"], &[], &[]), paper("q", &["y"], &[], &[])],
            &["x", "y"],
        );
        let cv = compute_cv(&c.full_view(), &cfg).unwrap();
        assert!(close(cv.author_scores.values(), &[0.5, 0.5], 1e-15));
    }

    #[test]
    fn cv_reports_authorless_mass() {
        let c = corpus(
            &[paper("p", &["x"], &[], &[]), paper("q", &[], &[], &[])],
            &["x"],
        );
        let cv = compute_cv(&c.full_view(), &MetricConfig::default()).unwrap();
        assert!((cv.dropped_mass - 0.5).abs() < 1e-12);
        assert!((cv.total_mass() + cv.dropped_mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn influence_single_path_and_split() {
        let c = corpus(
            &[paper("px", &["x"], &[], &["py"]), paper("py", &["y"], &[], &[])],
            &["x", "y"],
        );
        let v = c.full_view();
        let h = densify(&build_influence_operator(&v));
        assert_eq!(h[0], vec![0.0, 1.0]);
        assert_eq!(build_influence_operator(&v).dangling_rows(), &[1]);

        let c = corpus(
            &[paper("px", &["x"], &[], &["py"]), paper("py", &["y", "z"], &[], &[])],
            &["x", "y", "z"],
        );
        let v = c.full_view();
        let h = densify(&build_influence_operator(&v));
        assert_eq!(h[0], vec![0.0, 0.5, 0.5]);
    }

    #[test]
    fn influence_symmetric_and_citation_free() {
        let cfg = MetricConfig::default();
        let c = corpus(
            &[paper("px", &["x"], &[], &["py"]), paper("py", &["y"], &[], &["px"])],
            &["x", "y"],
        );
        let inf = compute_influence(&c.full_view(), &cfg).unwrap();
        assert!(close(inf.author_scores.values(), &[0.5, 0.5], 1e-12));

        let c = corpus(
            &[paper("p1", &["x", "y"], &[], &[]), paper("p2", &["z"], &[], &[])],
            &["x", "y", "z"],
        );
        let inf = compute_influence(&c.full_view(), &cfg).unwrap();
        assert!(close(inf.author_scores.values(), &[1.0 / 3.0; 3], 1e-12));
    }

    #[test]
    fn followers_is_binary() {
        let mut papers = vec![paper("py", &["y"], &[], &[])];
        for i in 0..5 {
            papers.push(paper(&format!("px{i}"), &["x"], &[], &["py"]));
        }
        let c = corpus(&papers, &["x", "y"]);
        let f = followers_adjacency(&c.full_view());
        assert_eq!(f.row(0), &[1]);
        assert_eq!(f.row(1), &[] as &[u32]);
        let op = build_followers_operator(&c.full_view()).unwrap();
        assert_eq!(op.dangling_rows(), &[1]);
    }

    #[test]
    fn connections_modes() {
        let c = corpus(&[paper("p", &["x", "y"], &[], &[])], &["x", "y"]);
        let con = compute_connections(&c.full_view(), &MetricConfig::default()).unwrap();
        assert!(close(con.author_scores.values(), &[0.5, 0.5], 1e-12));

        let mut papers = Vec::new();
        for i in 0..3 {
            papers.push(paper(&format!("a{i}"), &["x", "y"], &[], &[]));
        }
        papers.push(paper("b", &["x", "z"], &[], &[]));
        let c = corpus(&papers, &["x", "y", "z"]);
        let v = c.full_view();
        let w = connections_weights(&v, &MetricConfig::default());
        assert_eq!(w.row(0), (&[1u32, 2][..], &[3.0, 1.0][..]));
        let binary = MetricConfig {
            connections_mode: ConnectionsMode::Binary,
            ..Default::default()
        };
        assert_eq!(connections_weights(&v, &binary).row(0).1, &[1.0, 1.0]);
        let literal = MetricConfig {
            connections_self_loops: SelfLoops::Include,
            ..Default::default()
        };
        assert_eq!(connections_weights(&v, &literal).row(0), (&[0u32, 1, 2][..], &[4.0, 3.0, 1.0][..]));
    }

    #[test]
    fn exposure_renormalizes_single_block_rows() {
        let mut p = paper("p", &["x"], &[], &[]);
        p.venue_id = Some("v".into());
        let (c, _) = Corpus::from_records(
            &[p],
            &authors(&["x"]),
            &[VenueRecord {
                venue_id: "v".into(),
                name: "V".into(),
            }],
            &[],
        )
        .unwrap();
        let v = c.full_view();
        let dense = densify(&build_exposure_operator(&v, &MetricConfig::default()));
        assert_eq!(dense, vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn exposure_halves_with_both_blocks() {
        let mut px = paper("px", &["x"], &[], &["py"]);
        px.venue_id = Some("v".into());
        let py = paper("py", &["y"], &[], &[]);
        let (c, _) = Corpus::from_records(
            &[px, py],
            &authors(&["x", "y"]),
            &[VenueRecord {
                venue_id: "v".into(),
                name: "V".into(),
            }],
            &[],
        )
        .unwrap();
        let v = c.full_view();
        let dense = densify(&build_exposure_operator(&v, &MetricConfig::default()));
        // x: H row -> y with weight 1, T_AV -> v with weight 1; halves.
        assert!(close(&dense[0], &[0.0, 0.5, 0.5], 1e-15));
    }

    #[test]
    fn venues_only_corpus_is_uniform() {
        let venues: Vec<VenueRecord> = ["u", "v", "w"]
            .iter()
            .map(|id| VenueRecord {
                venue_id: id.to_string(),
                name: id.to_string(),
            })
            .collect();
        let papers: Vec<PaperRecord> = ["u", "v", "w"]
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut p = paper(&format!("p{i}"), &[], &[], &[]);
                p.venue_id = Some(v.to_string());
                p
            })
            .collect();
        let (c, _) = Corpus::from_records(&papers, &[], &venues, &[]).unwrap();
        let exp = compute_exposure(&c.full_view(), &MetricConfig::default()).unwrap();
        assert!(exp.author_scores.is_empty());
        assert!(close(exp.venue_scores.unwrap().values(), &[1.0 / 3.0; 3], 1e-12));
    }

    #[test]
    fn empty_view_yields_empty_maps() {
        let c = corpus(&[], &[]);
        for kind in MetricKind::ALL {
            let mv = compute_metric(&c.full_view(), kind, &MetricConfig::default()).unwrap();
            assert!(mv.author_scores.is_empty(), "{kind}");
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("inf".parse::<MetricKind>().unwrap(), MetricKind::Influence);
        assert_eq!("BCC".parse::<MetricKind>().unwrap(), MetricKind::Bcc);
        assert!("h".parse::<MetricKind>().is_err());
    }

    #[test]
    fn fingerprint_tracks_knobs() {
        let a = MetricConfig::default();
        let b = MetricConfig {
            exposure_mix: 0.4,
            ..Default::default()
        };
        assert_eq!(a.fingerprint(), MetricConfig::default().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert!(MetricConfig {
            exposure_mix: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
