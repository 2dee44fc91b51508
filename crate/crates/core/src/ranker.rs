//! Damped power iteration over matrix-free transition operators.
//!
//! A [`TransitionOperator`] represents a row-substochastic matrix `C` whose
//! rows either sum to one or are entirely zero (dangling). The iteration
//! solves
//!
//! ```text
//! πᵀ = α πᵀ C' + (1 − α) vᵀ
//! ```
//!
//! where `C'` is `C` with every dangling row replaced by the uniform row
//! `(1/n) e`. The replacement is never materialized: the mass sitting on
//! dangling rows is collected each step and spread uniformly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::Csr;

/// Row-(sub)stochastic linear map `x ↦ xᵀC`.
pub trait TransitionOperator: Sync {
    fn dimension(&self) -> usize;

    /// Overwrites `out` with `xᵀC`. Dangling rows contribute nothing.
    fn apply(&self, x: &[f64], out: &mut [f64]);

    /// Rows of `C` that carry no outgoing mass, ascending.
    fn dangling_rows(&self) -> &[u32];
}

/// Materializes `C` by applying the operator to every basis vector.
/// Intended for small operators in tests and audits.
pub fn densify(op: &dyn TransitionOperator) -> Vec<Vec<f64>> {
    let n = op.dimension();
    let mut basis = vec![0.0; n];
    (0..n)
        .map(|i| {
            basis[i] = 1.0;
            let mut row = vec![0.0; n];
            op.apply(&basis, &mut row);
            basis[i] = 0.0;
            row
        })
        .collect()
}

/// Square sparse matrix with nonnegative weights, not yet normalized.
/// Duplicate entries are summed; explicit zeros are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseWeights {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
}

impl SparseWeights {
    pub fn from_triplets(n: usize, mut triplets: Vec<(u32, u32, f64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut offsets = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(u32, u32)> = None;
        for (r, c, w) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("entry exists") += w;
                continue;
            }
            last = Some((r, c));
            offsets[r as usize + 1] += 1;
            cols.push(c);
            values.push(w);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        SparseWeights {
            n,
            offsets,
            cols,
            values,
        }
    }

    /// Assembles from raw CSR arrays; columns within a row must be unique.
    pub fn from_parts(n: usize, offsets: Vec<usize>, cols: Vec<u32>, values: Vec<f64>) -> Self {
        assert_eq!(offsets.len(), n + 1);
        assert_eq!(cols.len(), values.len());
        assert_eq!(*offsets.last().unwrap(), cols.len());
        SparseWeights {
            n,
            offsets,
            cols,
            values,
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let triplets = rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &w)| w != 0.0)
                    .map(move |(j, &w)| (i as u32, j as u32, w))
            })
            .collect();
        Self::from_triplets(n, triplets)
    }

    /// Unit weight on every adjacency entry.
    pub fn from_adjacency(adj: &Csr) -> Self {
        SparseWeights {
            n: adj.n_rows(),
            offsets: (0..=adj.n_rows())
                .scan(0usize, |acc, i| {
                    let v = *acc;
                    if i < adj.n_rows() {
                        *acc += adj.degree(i);
                    }
                    Some(v)
                })
                .collect(),
            cols: adj.rows().flatten().copied().collect(),
            values: vec![1.0; adj.nnz()],
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.cols[r.clone()], &self.values[r])
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }
}

/// Row-normalized sparse matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTransition {
    weights: SparseWeights,
    dangling: Vec<u32>,
}

/// Divides every nonzero row by its sum; zero rows become dangling.
pub fn row_normalize(weights: &SparseWeights) -> Result<SparseTransition> {
    let mut w = weights.clone();
    let mut dangling = Vec::new();
    for i in 0..w.n {
        let range = w.offsets[i]..w.offsets[i + 1];
        let mut sum = 0.0;
        for k in range.clone() {
            let v = w.values[k];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NegativeWeight {
                    row: i,
                    col: w.cols[k] as usize,
                    weight: v,
                });
            }
            sum += v;
        }
        if sum > 0.0 {
            for k in range {
                w.values[k] /= sum;
            }
        } else {
            dangling.push(i as u32);
        }
    }
    Ok(SparseTransition {
        weights: w,
        dangling,
    })
}

impl SparseTransition {
    pub fn weights(&self) -> &SparseWeights {
        &self.weights
    }
}

impl TransitionOperator for SparseTransition {
    fn dimension(&self) -> usize {
        self.weights.n
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (i, &xi) in x.iter().enumerate().take(self.weights.n) {
            if xi == 0.0 {
                continue;
            }
            let (cols, vals) = self.weights.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                out[c as usize] += xi * v;
            }
        }
    }

    fn dangling_rows(&self) -> &[u32] {
        &self.dangling
    }
}

/// Binary rectangular adjacency with each nonempty row split uniformly,
/// i.e. the `(X)*` normalization of a 0/1 matrix.
#[derive(Debug, Clone, Copy)]
pub struct UniformSplit<'a> {
    adj: &'a Csr,
}

impl<'a> UniformSplit<'a> {
    pub fn new(adj: &'a Csr) -> Self {
        UniformSplit { adj }
    }

    /// `out += xᵀ (X)*`.
    pub fn push(&self, x: &[f64], out: &mut [f64]) {
        for (i, targets) in self.adj.rows().enumerate() {
            let xi = x[i];
            if xi == 0.0 || targets.is_empty() {
                continue;
            }
            let share = xi / targets.len() as f64;
            for &t in targets {
                out[t as usize] += share;
            }
        }
    }

    /// `(X)* v`: the mean of `v` over each row's targets, 0 for empty rows.
    pub fn row_means(&self, v: &[f64]) -> Vec<f64> {
        self.adj
            .rows()
            .map(|targets| {
                if targets.is_empty() {
                    0.0
                } else {
                    targets.iter().map(|&t| v[t as usize]).sum::<f64>() / targets.len() as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Teleport {
    #[default]
    Uniform,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerIterationConfig {
    pub damping: f64,
    /// Stop once the L1 distance between successive iterates is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub teleport: Teleport,
}

impl Default for PowerIterationConfig {
    fn default() -> Self {
        PowerIterationConfig {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 200,
            teleport: Teleport::Uniform,
        }
    }
}

impl PowerIterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in (0, 1), got {}",
                self.damping
            )));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if let Teleport::Explicit(v) = &self.teleport {
            if v.iter().any(|&p| p.is_nan() || p < 0.0) {
                return Err(Error::InvalidConfig(
                    "teleport entries must be nonnegative".into(),
                ));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidConfig(format!(
                    "teleport must sum to 1, sums to {sum}"
                )));
            }
        }
        Ok(())
    }

    fn teleport_vector(&self, n: usize) -> Result<Vec<f64>> {
        match &self.teleport {
            Teleport::Uniform => Ok(vec![1.0 / n as f64; n]),
            Teleport::Explicit(v) if v.len() == n => Ok(v.clone()),
            Teleport::Explicit(v) => Err(Error::InvalidConfig(format!(
                "teleport has length {}, operator has dimension {n}",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankVector {
    pub values: Vec<f64>,
    pub iterations_used: usize,
    pub final_residual: f64,
    pub converged: bool,
    /// L1 residual after each iteration.
    pub residuals: Vec<f64>,
}

/// Runs damped power iteration from the uniform vector.
///
/// Non-convergence is not an error: the last iterate is returned with
/// `converged == false`.
pub fn power_iterate(op: &dyn TransitionOperator, cfg: &PowerIterationConfig) -> Result<RankVector> {
    cfg.validate()?;
    let n = op.dimension();
    if n == 0 {
        return Err(Error::EmptyOperator);
    }
    let teleport = cfg.teleport_vector(n)?;
    let alpha = cfg.damping;
    let inv_n = 1.0 / n as f64;

    let mut x = vec![inv_n; n];
    let mut y = vec![0.0; n];
    let mut residuals = Vec::new();
    let mut converged = false;

    for _ in 0..cfg.max_iterations {
        op.apply(&x, &mut y);
        let dangling: f64 = op.dangling_rows().iter().map(|&i| x[i as usize]).sum();
        let spread = alpha * dangling * inv_n;
        for (yj, vj) in y.iter_mut().zip(&teleport) {
            *yj = alpha * *yj + spread + (1.0 - alpha) * vj;
        }
        // removes floating-point drift only; the exact map preserves mass
        let total: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= total);

        let residual: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        residuals.push(residual);
        std::mem::swap(&mut x, &mut y);
        if residual <= cfg.tolerance {
            converged = true;
            break;
        }
    }

    Ok(RankVector {
        values: x,
        iterations_used: residuals.len(),
        final_residual: residuals.last().copied().unwrap_or(0.0),
        converged,
        residuals,
    })
}

/// Largest dimension accepted by [`stationary_exact`].
pub const EXACT_MAX_DIMENSION: usize = 12;

/// Solves the damped fixed point directly by Gaussian elimination.
///
/// `weights` is a dense nonnegative matrix; rows are normalized here and
/// zero rows are replaced by the uniform row, exactly as [`power_iterate`]
/// treats dangling rows.
pub fn stationary_exact(weights: &[Vec<f64>], cfg: &PowerIterationConfig) -> Result<RankVector> {
    cfg.validate()?;
    let n = weights.len();
    if n == 0 {
        return Err(Error::EmptyOperator);
    }
    if n > EXACT_MAX_DIMENSION {
        return Err(Error::InvalidConfig(format!(
            "exact solve supports n <= {EXACT_MAX_DIMENSION}, got {n}"
        )));
    }
    let teleport = cfg.teleport_vector(n)?;
    let alpha = cfg.damping;

    let mut c = vec![vec![0.0; n]; n];
    for (i, row) in weights.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidConfig("matrix is not square".into()));
        }
        for (j, &w) in row.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::NegativeWeight {
                    row: i,
                    col: j,
                    weight: w,
                });
            }
        }
        let sum: f64 = row.iter().sum();
        for j in 0..n {
            c[i][j] = if sum > 0.0 { row[j] / sum } else { 1.0 / n as f64 };
        }
    }

    // (I − α C'ᵀ) π = (1 − α) v
    let mut m = vec![vec![0.0; n + 1]; n];
    for r in 0..n {
        for k in 0..n {
            m[r][k] = if r == k { 1.0 } else { 0.0 } - alpha * c[k][r];
        }
        m[r][n] = (1.0 - alpha) * teleport[r];
    }
    let pi = gauss_solve(m)?;

    let mut residual = 0.0;
    for j in 0..n {
        let mut next = (1.0 - alpha) * teleport[j];
        for i in 0..n {
            next += alpha * pi[i] * c[i][j];
        }
        residual += (next - pi[j]).abs();
    }
    Ok(RankVector {
        values: pi,
        iterations_used: 0,
        final_residual: residual,
        converged: true,
        residuals: Vec::new(),
    })
}

/// Gaussian elimination with partial pivoting on an augmented `n × (n+1)`
/// matrix.
fn gauss_solve(mut m: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("nonempty range");
        if m[pivot][col].abs() < 1e-14 {
            return Err(Error::Singular);
        }
        m.swap(col, pivot);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            if factor == 0.0 {
                continue;
            }
            let (upper, lower) = m.split_at_mut(r);
            for (a, b) in lower[0][col..=n].iter_mut().zip(&upper[col][col..=n]) {
                *a -= factor * b;
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = m[r][n];
        for k in r + 1..n {
            acc -= m[r][k] * x[k];
        }
        x[r] = acc / m[r][r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adjacency(n: usize, edges: &[(u32, u32)]) -> SparseTransition {
        row_normalize(&SparseWeights::from_triplets(
            n,
            edges.iter().map(|&(a, b)| (a, b, 1.0)).collect(),
        ))
        .unwrap()
    }

    fn l1(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    }

    #[test]
    fn equal_split_row() {
        let t = row_normalize(&SparseWeights::from_dense(&[vec![2.0, 2.0], vec![0.0, 0.0]])).unwrap();
        assert_eq!(densify(&t)[0], vec![0.5, 0.5]);
        assert_eq!(t.dangling_rows(), &[1]);
        assert_eq!(densify(&t)[1], vec![0.0, 0.0]);
    }

    #[test]
    fn negative_weight_rejected() {
        let err = row_normalize(&SparseWeights::from_dense(&[vec![1.0, -1.0], vec![0.0, 0.0]]));
        assert!(matches!(err, Err(Error::NegativeWeight { row: 0, col: 1, .. })));
    }

    #[test]
    fn single_node() {
        let op = adjacency(1, &[]);
        let r = power_iterate(&op, &PowerIterationConfig::default()).unwrap();
        assert_eq!(r.values, vec![1.0]);
        assert!(r.converged);
    }

    #[test]
    fn two_cycle_is_symmetric() {
        for damping in [0.1, 0.5, 0.85, 0.99] {
            let cfg = PowerIterationConfig {
                damping,
                ..Default::default()
            };
            let r = power_iterate(&adjacency(2, &[(0, 1), (1, 0)]), &cfg).unwrap();
            assert!(l1(&r.values, &[0.5, 0.5]) < 1e-12);
            let e = stationary_exact(&[vec![0.0, 1.0], vec![1.0, 0.0]], &cfg).unwrap();
            assert!(l1(&e.values, &[0.5, 0.5]) < 1e-12);
        }
    }

    #[test]
    fn no_edges_is_uniform() {
        let e = stationary_exact(&[vec![0.0, 0.0], vec![0.0, 0.0]], &Default::default()).unwrap();
        assert!(l1(&e.values, &[0.5, 0.5]) < 1e-15);
    }

    #[test]
    fn chain_matches_closed_form() {
        // 1 -> 2 -> 3 with node 3 dangling, α = 0.85, uniform teleport.
        // Solving the 3×3 system by hand:
        //   π1 = a + d·π3,  π2 = a + α·π1 + d·π3,  π3 = a + α·π2 + d·π3
        // with a = 0.15/3, d = 0.85/3, then normalizing.
        let alpha: f64 = 0.85;
        let a = (1.0 - alpha) / 3.0;
        let d = alpha / 3.0;
        // Express everything in terms of π3 = t.
        // π1 = a + d t; π2 = a + α(a + d t) + d t; t = a + α π2 + d t.
        let coef_p2 = (a + alpha * a, alpha * d + d);
        let t = (a + alpha * coef_p2.0) / (1.0 - d - alpha * coef_p2.1);
        let p1 = a + d * t;
        let p2 = coef_p2.0 + coef_p2.1 * t;
        let expected = [p1, p2, t];
        assert!((expected.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let cfg = PowerIterationConfig::default();
        let r = power_iterate(&adjacency(3, &[(0, 1), (1, 2)]), &cfg).unwrap();
        assert!(r.converged);
        assert!(l1(&r.values, &expected) < 1e-9);
        let dense = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0; 3]];
        let e = stationary_exact(&dense, &cfg).unwrap();
        assert!(l1(&e.values, &expected) < 1e-12);
    }

    #[test]
    fn small_damping_approaches_teleport() {
        let teleport = vec![0.5, 0.3, 0.2];
        let cfg = PowerIterationConfig {
            damping: 1e-6,
            teleport: Teleport::Explicit(teleport.clone()),
            ..Default::default()
        };
        let r = power_iterate(&adjacency(3, &[(0, 1), (1, 2), (2, 0)]), &cfg).unwrap();
        assert!(l1(&r.values, &teleport) < 1e-4);
    }

    #[test]
    fn non_convergence_is_reported() {
        let cfg = PowerIterationConfig {
            damping: 0.99,
            tolerance: 0.0,
            max_iterations: 3,
            ..Default::default()
        };
        let r = power_iterate(&adjacency(3, &[(0, 1), (1, 2)]), &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations_used, 3);
        assert_eq!(r.residuals.len(), 3);
    }

    #[test]
    fn config_validation() {
        let bad = PowerIterationConfig {
            damping: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = PowerIterationConfig {
            teleport: Teleport::Explicit(vec![0.5, 0.4]),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(matches!(
            power_iterate(&adjacency(0, &[]), &Default::default()),
            Err(Error::EmptyOperator)
        ));
        assert!(stationary_exact(&vec![vec![0.0; 13]; 13], &Default::default()).is_err());
    }
}
