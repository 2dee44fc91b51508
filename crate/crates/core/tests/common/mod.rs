//! Dense reference implementations used by the integration tests.
//!
//! Everything here is rebuilt from corpus records and written as literal
//! matrix algebra on small dense matrices, so it shares no code path with
//! the sparse, matrix-free library implementation.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scirank::corpus::{AuthorRecord, InstitutionRecord, PaperRecord, VenueRecord};
use scirank::metrics::{ConnectionsMode, MetricConfig, SelfLoops};
use scirank::ranker::stationary_exact;
use scirank::{Corpus, DomainView, MetricKind, PowerIterationConfig};

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn transpose(m: &Mat, cols: usize) -> Mat {
    let mut t = zeros(cols, m.len());
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            t[j][i] = x;
        }
    }
    t
}

pub fn matmul(a: &Mat, b: &Mat, inner: usize, cols: usize) -> Mat {
    let mut out = zeros(a.len(), cols);
    for i in 0..a.len() {
        for k in 0..inner {
            if a[i][k] == 0.0 {
                continue;
            }
            for j in 0..cols {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// `(X)*`: each nonzero row divided by its sum, zero rows left alone.
pub fn star(m: &Mat) -> Mat {
    m.iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter().map(|x| x / s).collect()
            } else {
                row.clone()
            }
        })
        .collect()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// The three incidence matrices of a view, in the view's local order.
pub struct Dense {
    pub n_p: usize,
    pub n_a: usize,
    pub n_v: usize,
    /// paper -> cited paper
    pub r: Mat,
    /// paper -> author
    pub a: Mat,
    /// paper -> venue
    pub v: Mat,
}

impl Dense {
    pub fn from_view(view: &DomainView<'_>) -> Dense {
        let corpus = view.corpus();
        let (n_p, n_a, n_v) = (view.n_papers(), view.n_authors(), view.n_venues());
        let venue_ids = view.venue_ids();
        let mut r = zeros(n_p, n_p);
        let mut a = zeros(n_p, n_a);
        let mut v = zeros(n_p, n_v);
        for (local, &global) in view.papers().iter().enumerate() {
            let rec = corpus.paper_record(global as usize);
            assert_eq!(rec.paper_id, view.paper_id(local));
            for author in &rec.authors {
                a[local][view.author_local(author).expect("author in view")] = 1.0;
            }
            for cited in &rec.cites {
                if let Some(q) = view.paper_local(cited) {
                    r[local][q] = 1.0;
                }
            }
            if let Some(vid) = &rec.venue_id {
                let k = venue_ids.iter().position(|x| x == vid).expect("venue in view");
                v[local][k] = 1.0;
            }
        }
        if view.self_citations_excluded() {
            for p in 0..n_p {
                for q in 0..n_p {
                    if (0..n_a).any(|x| a[p][x] > 0.0 && a[q][x] > 0.0) {
                        r[p][q] = 0.0;
                    }
                }
            }
        }
        Dense { n_p, n_a, n_v, r, a, v }
    }

    pub fn indegree(&self) -> Vec<f64> {
        (0..self.n_p)
            .map(|q| (0..self.n_p).map(|p| self.r[p][q]).sum())
            .collect()
    }

    pub fn cc(&self) -> Vec<f64> {
        let indeg = self.indegree();
        (0..self.n_a)
            .map(|x| (0..self.n_p).map(|p| self.a[p][x] * indeg[p]).sum())
            .collect()
    }

    pub fn bcc(&self) -> Vec<f64> {
        let indeg = self.indegree();
        let a = star(&self.a);
        (0..self.n_a)
            .map(|x| (0..self.n_p).map(|p| a[p][x] * indeg[p]).sum())
            .collect()
    }

    /// `H = (Aᵀ)*(R)*(A)*`
    pub fn h(&self) -> Mat {
        let at = star(&transpose(&self.a, self.n_a));
        let rs = star(&self.r);
        let a = star(&self.a);
        matmul(&matmul(&at, &rs, self.n_p, self.n_p), &a, self.n_p, self.n_a)
    }

    /// `Y = (Vᵀ)*(R)*(V)*`
    pub fn y(&self) -> Mat {
        let vt = star(&transpose(&self.v, self.n_v));
        let rs = star(&self.r);
        let v = star(&self.v);
        matmul(&matmul(&vt, &rs, self.n_p, self.n_p), &v, self.n_p, self.n_v)
    }

    /// `F[i][j] = 1` iff author `i` cited a paper of author `j`, `i ≠ j`.
    pub fn f(&self) -> Mat {
        let at = transpose(&self.a, self.n_a);
        let reach = matmul(&matmul(&at, &self.r, self.n_p, self.n_p), &self.a, self.n_p, self.n_a);
        let mut f = zeros(self.n_a, self.n_a);
        for i in 0..self.n_a {
            for j in 0..self.n_a {
                if i != j && reach[i][j] > 0.0 {
                    f[i][j] = 1.0;
                }
            }
        }
        f
    }

    /// `N = AᵀA`, reshaped by the mode and diagonal knobs.
    pub fn n(&self, mode: ConnectionsMode, loops: SelfLoops) -> Mat {
        let at = transpose(&self.a, self.n_a);
        let mut n = matmul(&at, &self.a, self.n_p, self.n_a);
        for (i, row) in n.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                if i == j && loops == SelfLoops::Exclude {
                    *x = 0.0;
                }
                if mode == ConnectionsMode::Binary && *x > 0.0 {
                    *x = 1.0;
                }
            }
        }
        n
    }

    /// The block matrix over authors ⊕ venues, before the final row
    /// normalization.
    pub fn p(&self, mix: f64) -> Mat {
        let (na, nv) = (self.n_a, self.n_v);
        let h = star(&self.h());
        let y = star(&self.y());
        let t_av = matmul(&star(&transpose(&self.a, na)), &star(&self.v), self.n_p, nv);
        let t_va = matmul(&star(&transpose(&self.v, nv)), &star(&self.a), self.n_p, na);
        let mut p = zeros(na + nv, na + nv);
        for i in 0..na {
            for j in 0..na {
                p[i][j] = mix * h[i][j];
            }
            for j in 0..nv {
                p[i][na + j] = (1.0 - mix) * t_av[i][j];
            }
        }
        for i in 0..nv {
            for j in 0..na {
                p[na + i][j] = (1.0 - mix) * t_va[i][j];
            }
            for j in 0..nv {
                p[na + i][na + j] = mix * y[i][j];
            }
        }
        p
    }

    /// Reference scores (authors, then venues for Exposure).
    pub fn metric(&self, kind: MetricKind, cfg: &MetricConfig, solve: Solver) -> Vec<f64> {
        let pr = cfg.ranker();
        let run = |m: &Mat| if m.is_empty() { Vec::new() } else { solve.solve(m, &pr) };
        match kind {
            MetricKind::Cc => self.cc(),
            MetricKind::Bcc => self.bcc(),
            MetricKind::Cv => {
                if self.n_p == 0 {
                    return vec![0.0; self.n_a];
                }
                let pi = run(&self.r);
                let a = star(&self.a);
                (0..self.n_a)
                    .map(|x| (0..self.n_p).map(|p| pi[p] * a[p][x]).sum())
                    .collect()
            }
            MetricKind::Influence => run(&self.h()),
            MetricKind::Followers => run(&self.f()),
            MetricKind::Connections => run(&self.n(cfg.connections_mode, cfg.connections_self_loops)),
            MetricKind::Exposure => run(&self.p(cfg.exposure_mix)),
        }
    }

    /// CV mass sitting on authorless papers.
    pub fn cv_dropped(&self, cfg: &MetricConfig, solve: Solver) -> f64 {
        if self.n_p == 0 {
            return 0.0;
        }
        let pi = solve.solve(&self.r, &cfg.ranker());
        (0..self.n_p)
            .filter(|&p| self.a[p].iter().all(|&x| x == 0.0))
            .map(|p| pi[p])
            .sum()
    }
}

/// How the dense reference solves the damped fixed point.
#[derive(Clone, Copy, Debug)]
pub enum Solver {
    /// The library's Gaussian-elimination solver.
    Exact,
    /// Repeated multiplication by the explicit dense Google matrix.
    GoogleMatrix,
}

impl Solver {
    pub fn solve(self, weights: &Mat, cfg: &PowerIterationConfig) -> Vec<f64> {
        match self {
            Solver::Exact => stationary_exact(weights, cfg).expect("exact solve").values,
            Solver::GoogleMatrix => google_fixed_point(weights, cfg.damping),
        }
    }
}

/// Stationary vector of `G = αC' + (1−α)(1/n)eeᵀ` where `C'` is `weights`
/// row-normalized with zero rows replaced by `1/n`. Uniform teleport only.
pub fn google_fixed_point(weights: &Mat, alpha: f64) -> Vec<f64> {
    let n = weights.len();
    let u = 1.0 / n as f64;
    let mut g = zeros(n, n);
    for i in 0..n {
        let s: f64 = weights[i].iter().sum();
        for j in 0..n {
            let c = if s > 0.0 { weights[i][j] / s } else { u };
            g[i][j] = alpha * c + (1.0 - alpha) * u;
        }
    }
    let mut x = vec![u; n];
    for _ in 0..100_000 {
        let mut next = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                next[j] += x[i] * g[i][j];
            }
        }
        let diff = l1(&next, &x);
        x = next;
        if diff < 1e-15 {
            break;
        }
    }
    x
}

pub fn paper(id: &str, authors: &[&str], cites: &[&str]) -> PaperRecord {
    PaperRecord {
        paper_id: id.to_string(),
        year: Some(2000),
        venue_id: None,
        authors: authors.iter().map(|s| s.to_string()).collect(),
        domains: ["d".to_string()].into_iter().collect(),
        cites: cites.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn authors(ids: &[&str]) -> Vec<AuthorRecord> {
    ids.iter()
        .map(|id| AuthorRecord {
            author_id: id.to_string(),
            name: format!("Author {id}"),
            institution_id: None,
        })
        .collect()
}

pub fn venues(ids: &[&str]) -> Vec<VenueRecord> {
    ids.iter()
        .map(|id| VenueRecord {
            venue_id: id.to_string(),
            name: format!("Venue {id}"),
        })
        .collect()
}

pub fn institutions(ids: &[&str]) -> Vec<InstitutionRecord> {
    ids.iter()
        .map(|id| InstitutionRecord {
            institution_id: id.to_string(),
            name: format!("Institution {id}"),
        })
        .collect()
}

/// Random small corpus: up to 8 papers, 6 authors, 3 venues. Citations
/// may form cycles; some papers may be authorless or venueless; some
/// authors and venues may have no papers.
pub fn random_small_corpus(seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_p = rng.random_range(1..=8usize);
    let n_a = rng.random_range(1..=6usize);
    let n_v = rng.random_range(1..=3usize);
    let density = rng.random_range(0.05..0.6);
    let pid = |i: usize| format!("p{i}");
    let aid = |i: usize| format!("a{i}");
    let vid = |i: usize| format!("v{i}");
    let mut papers = Vec::new();
    for p in 0..n_p {
        let mut by: Vec<String> = (0..n_a)
            .filter(|_| rng.random_bool(0.35))
            .map(aid)
            .collect();
        if by.is_empty() && rng.random_bool(0.8) {
            by.push(aid(rng.random_range(0..n_a)));
        }
        let cites = (0..n_p)
            .filter(|&q| q != p && rng.random_bool(density))
            .map(pid)
            .collect();
        papers.push(PaperRecord {
            paper_id: pid(p),
            year: Some(1990 + rng.random_range(0..20)),
            venue_id: rng.random_bool(0.85).then(|| vid(rng.random_range(0..n_v))),
            authors: by,
            domains: ["d".to_string()].into_iter().collect(),
            cites,
        });
    }
    let author_ids: Vec<String> = (0..n_a).map(aid).collect();
    let venue_ids: Vec<String> = (0..n_v).map(vid).collect();
    Corpus::from_records(
        &papers,
        &authors(&author_ids.iter().map(String::as_str).collect::<Vec<_>>()),
        &venues(&venue_ids.iter().map(String::as_str).collect::<Vec<_>>()),
        &[],
    )
    .expect("valid random corpus")
    .0
}

/// The same corpus with every id renamed by a random bijection, so that
/// the sorted internal order is shuffled. Returns the new corpus and the
/// old-id -> new-id map for authors and venues.
pub fn relabel(corpus: &Corpus, seed: u64) -> (Corpus, std::collections::HashMap<String, String>) {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map = std::collections::HashMap::new();
    let mut rename = |ids: &[String], prefix: &str, rng: &mut ChaCha8Rng| {
        let mut perm: Vec<usize> = (0..ids.len()).collect();
        perm.shuffle(rng);
        for (i, id) in ids.iter().enumerate() {
            map.insert(id.clone(), format!("{prefix}{:04}", perm[i]));
        }
    };
    rename(corpus.paper_ids(), "P", &mut rng);
    rename(corpus.author_ids(), "A", &mut rng);
    rename(corpus.venue_ids(), "V", &mut rng);
    rename(corpus.institution_ids(), "I", &mut rng);
    let papers: Vec<PaperRecord> = (0..corpus.n_papers())
        .map(|p| {
            let mut r = corpus.paper_record(p);
            r.paper_id = map[&r.paper_id].clone();
            r.venue_id = r.venue_id.map(|v| map[&v].clone());
            r.authors = r.authors.iter().map(|a| map[a].clone()).collect();
            r.cites = r.cites.iter().map(|q| map[q].clone()).collect();
            r
        })
        .collect();
    let authors: Vec<AuthorRecord> = (0..corpus.n_authors())
        .map(|a| {
            let mut r = corpus.author_record(a);
            r.author_id = map[&r.author_id].clone();
            r.institution_id = r.institution_id.map(|i| map[&i].clone());
            r
        })
        .collect();
    let venues: Vec<VenueRecord> = corpus
        .venue_ids()
        .iter()
        .map(|v| VenueRecord {
            venue_id: map[v].clone(),
            name: v.clone(),
        })
        .collect();
    let insts: Vec<InstitutionRecord> = corpus
        .institution_ids()
        .iter()
        .map(|i| InstitutionRecord {
            institution_id: map[i].clone(),
            name: i.clone(),
        })
        .collect();
    let (c, _) = Corpus::from_records(&papers, &authors, &venues, &insts).expect("relabelled corpus");
    (c, map)
}

/// The regression fixture: ten papers across two domains with a citation
/// cycle, a dangling paper, an authorless paper, a venueless paper, a
/// multi-author paper and an author with no papers.
pub fn regression_fixture() -> Corpus {
    let rec = |id: &str, venue: Option<&str>, by: &[&str], doms: &[&str], cites: &[&str]| PaperRecord {
        paper_id: id.to_string(),
        year: Some(2000 + id[1..].parse::<i32>().unwrap()),
        venue_id: venue.map(str::to_string),
        authors: by.iter().map(|s| s.to_string()).collect(),
        domains: doms.iter().map(|s| s.to_string()).collect(),
        cites: cites.iter().map(|s| s.to_string()).collect(),
    };
    let papers = vec![
        rec("p0", Some("v0"), &["a0", "a1"], &["d0"], &[]),
        rec("p1", Some("v0"), &["a1"], &["d0"], &["p0"]),
        rec("p2", Some("v1"), &["a2", "a3", "a0"], &["d0", "d1"], &["p0", "p1"]),
        rec("p3", Some("v1"), &["a3"], &["d1"], &["p2", "p4"]),
        rec("p4", Some("v2"), &["a4"], &["d1"], &["p3"]),
        rec("p5", None, &["a0"], &["d0"], &["p2", "p3", "p4"]),
        rec("p6", Some("v2"), &[], &["d1"], &["p5", "p0"]),
        rec("p7", Some("v0"), &["a2", "a5"], &["d0"], &["p6", "p1"]),
        rec("p8", Some("v1"), &["a5"], &["d1"], &["p7", "p2", "p0"]),
        rec("p9", Some("v2"), &["a1", "a4"], &["d0", "d1"], &["p8", "p6", "p3"]),
    ];
    Corpus::from_records(
        &papers,
        &authors(&["a0", "a1", "a2", "a3", "a4", "a5", "a6"]),
        &venues(&["v0", "v1", "v2"]),
        &[],
    )
    .expect("fixture links")
    .0
}

/// Every regular file under `dir`, keyed by relative path.
pub fn tree_bytes(dir: &std::path::Path) -> std::collections::BTreeMap<std::path::PathBuf, Vec<u8>> {
    fn walk(root: &std::path::Path, dir: &std::path::Path, out: &mut std::collections::BTreeMap<std::path::PathBuf, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = std::collections::BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}
