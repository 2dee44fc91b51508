//! Seeded synthetic corpora grown by cumulative advantage.
//!
//! Papers are created one at a time in year order. Each new paper cites a
//! Poisson number of distinct earlier papers, choosing targets with
//! probability proportional to `(indegree + 1)^attachment_bias`. Authors
//! enter the pool gradually, so early authors accumulate more papers and
//! more citations than late ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, RawCorpus, ValidationReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YearProfile {
    /// Same number of papers every year.
    #[default]
    Uniform,
    /// Papers per year grow linearly across the span.
    LinearRamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_papers: usize,
    pub n_authors: usize,
    pub n_venues: usize,
    pub n_institutions: usize,
    pub n_domains: usize,
    /// Mean out-degree.
    pub refs_per_paper: f64,
    /// 0 picks citation targets uniformly; larger values favour papers that
    /// are already well cited.
    pub attachment_bias: f64,
    /// Mean byline length, at least 1.
    pub coauthors_per_paper: f64,
    pub year_span: (i32, i32),
    pub year_profile: YearProfile,
    /// Probability that a paper carries a second domain tag.
    pub cross_domain_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 7,
            n_papers: 100,
            n_authors: 40,
            n_venues: 5,
            n_institutions: 8,
            n_domains: 3,
            refs_per_paper: 4.0,
            attachment_bias: 1.0,
            coauthors_per_paper: 2.5,
            year_span: (1990, 2010),
            year_profile: YearProfile::Uniform,
            cross_domain_rate: 0.2,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, v) in [
            ("n_papers", self.n_papers),
            ("n_authors", self.n_authors),
            ("n_venues", self.n_venues),
            ("n_institutions", self.n_institutions),
            ("n_domains", self.n_domains),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if self.refs_per_paper.is_nan() || self.refs_per_paper < 0.0 || self.refs_per_paper >= self.n_papers as f64 {
            return bad(format!(
                "refs_per_paper must lie in [0, n_papers), got {}",
                self.refs_per_paper
            ));
        }
        if !self.attachment_bias.is_finite() || self.attachment_bias < 0.0 {
            return bad(format!("attachment_bias must be >= 0, got {}", self.attachment_bias));
        }
        if self.coauthors_per_paper.is_nan() || self.coauthors_per_paper < 1.0 || self.coauthors_per_paper > self.n_authors as f64 {
            return bad(format!(
                "coauthors_per_paper must lie in [1, n_authors], got {}",
                self.coauthors_per_paper
            ));
        }
        if self.year_span.0 > self.year_span.1 {
            return bad(format!("year span {:?} is reversed", self.year_span));
        }
        if !(0.0..=1.0).contains(&self.cross_domain_rate) {
            return bad(format!("cross_domain_rate must lie in [0, 1], got {}", self.cross_domain_rate));
        }
        Ok(())
    }
}

/// Fenwick tree over nonnegative weights with weighted index sampling.
struct WeightTree {
    tree: Vec<f64>,
    weights: Vec<f64>,
    top_bit: usize,
}

impl WeightTree {
    fn with_capacity(n: usize) -> Self {
        WeightTree {
            tree: vec![0.0; n + 1],
            weights: Vec::with_capacity(n),
            top_bit: if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) },
        }
    }

    fn push(&mut self, w: f64) {
        self.weights.push(0.0);
        self.set(self.weights.len() - 1, w);
    }

    fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.weights[i];
        self.weights[i] = w;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut k = self.weights.len();
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    /// Smallest index whose prefix sum exceeds `target`.
    fn find(&self, mut target: f64) -> usize {
        let mut pos = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next <= self.weights.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(self.weights.len() - 1)
    }
}

fn padded(prefix: char, i: usize, n: usize) -> String {
    let width = n.saturating_sub(1).to_string().len();
    format!("{prefix}{i:0width$}")
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

pub fn generate(cfg: &SynthConfig) -> Result<Corpus> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut raw = RawCorpus::default();

    for i in 0..cfg.n_institutions {
        raw.institution_ids.push(padded('I', i, cfg.n_institutions));
        raw.institution_names.push(format!("Institution {i}"));
    }
    for v in 0..cfg.n_venues {
        raw.venue_ids.push(padded('V', v, cfg.n_venues));
        raw.venue_names.push(format!("Venue {v}"));
    }
    for d in 0..cfg.n_domains {
        raw.domain_ids.push(padded('D', d, cfg.n_domains));
    }
    for a in 0..cfg.n_authors {
        raw.author_ids.push(padded('A', a, cfg.n_authors));
        raw.author_names.push(format!("Author {a}"));
        raw.author_institution
            .push(Some(rng.random_range(0..cfg.n_institutions) as u32));
    }

    let n = cfg.n_papers;
    let span = (cfg.year_span.1 - cfg.year_span.0 + 1) as f64;
    let mut tree = WeightTree::with_capacity(n);
    let mut indegree = vec![0u32; n];
    let mut chosen: Vec<u32> = Vec::new();
    let mut byline: Vec<u32> = Vec::new();
    let mut next_debut = 0usize;
    let weight = |indeg: u32| (f64::from(indeg) + 1.0).powf(cfg.attachment_bias);

    for p in 0..n {
        raw.paper_ids.push(padded('P', p, n));
        let frac = p as f64 / n as f64;
        let offset = match cfg.year_profile {
            YearProfile::Uniform => (frac * span).floor(),
            YearProfile::LinearRamp => (frac.sqrt() * span).floor(),
        };
        raw.paper_years.push(Some(cfg.year_span.0 + offset as i32));
        let venue = rng.random_range(0..cfg.n_venues) as u32;
        raw.paper_venue.push(Some(venue));
        let primary = venue as usize % cfg.n_domains;
        raw.paper_domains.push((p as u32, primary as u32));
        if cfg.n_domains > 1 && rng.random_bool(cfg.cross_domain_rate) {
            let extra = rng.random_range(0..cfg.n_domains);
            if extra != primary {
                raw.paper_domains.push((p as u32, extra as u32));
            }
        }

        // byline: a debuting author first when one is waiting, then draws
        // from everyone who has entered the pool
        let pool = ((p + 1) * cfg.n_authors).div_ceil(n).clamp(1, cfg.n_authors);
        let size = (1 + poisson(&mut rng, cfg.coauthors_per_paper - 1.0)).min(pool);
        byline.clear();
        if next_debut < pool {
            byline.push(next_debut as u32);
            next_debut += 1;
        }
        while byline.len() < size {
            let a = rng.random_range(0..pool) as u32;
            if !byline.contains(&a) {
                byline.push(a);
            }
        }
        for (pos, &a) in byline.iter().enumerate() {
            raw.authorship.push((p as u32, pos as u32 + 1, a));
        }

        // references, sampled without replacement among earlier papers
        let refs = poisson(&mut rng, cfg.refs_per_paper).min(p);
        chosen.clear();
        while chosen.len() < refs {
            let total = tree.total();
            let q = tree.find(rng.random::<f64>() * total);
            if tree.weights[q] == 0.0 {
                continue;
            }
            chosen.push(q as u32);
            tree.set(q, 0.0);
        }
        for &q in &chosen {
            indegree[q as usize] += 1;
            tree.set(q as usize, weight(indegree[q as usize]));
            raw.citations.push((p as u32, q));
        }
        tree.push(weight(0));
    }

    let mut report = ValidationReport::default();
    let corpus = raw.finish(&mut report)?;
    debug_assert_eq!(report.dropped_references(), 0);
    Ok(corpus)
}
