//! Compressed sparse row adjacency with `u32` column indices.

/// Unweighted CSR adjacency. Row `i` lists its targets in
/// `targets[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Default for Csr {
    fn default() -> Self {
        Self::empty(0)
    }
}

impl Csr {
    pub fn empty(n_rows: usize) -> Self {
        Csr {
            offsets: vec![0; n_rows + 1],
            targets: Vec::new(),
        }
    }

    /// Builds from `(row, target)` pairs that are already sorted by row.
    /// Within-row order is preserved.
    pub fn from_sorted_pairs(n_rows: usize, pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut offsets = vec![0usize; n_rows + 1];
        let mut targets = Vec::new();
        let mut last_row = 0u32;
        for (row, target) in pairs {
            debug_assert!(row >= last_row, "pairs must be sorted by row");
            last_row = row;
            offsets[row as usize + 1] += 1;
            targets.push(target);
        }
        for i in 0..n_rows {
            offsets[i + 1] += offsets[i];
        }
        Csr { offsets, targets }
    }

    /// Assembles from raw offsets and targets.
    pub fn from_parts(offsets: Vec<usize>, targets: Vec<u32>) -> Self {
        assert!(!offsets.is_empty() && offsets[0] == 0);
        assert_eq!(*offsets.last().unwrap(), targets.len());
        debug_assert!(offsets.windows(2).all(|w| w[0] <= w[1]));
        Csr { offsets, targets }
    }

    /// Builds from one target list per row.
    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for row in rows {
            targets.extend_from_slice(row.as_ref());
            offsets.push(targets.len());
        }
        Csr { offsets, targets }
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    /// Transpose into a `n_cols`-row CSR. Rows of the result are sorted.
    pub fn transpose(&self, n_cols: usize) -> Csr {
        let mut offsets = vec![0usize; n_cols + 1];
        for &t in &self.targets {
            offsets[t as usize + 1] += 1;
        }
        for i in 0..n_cols {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; self.targets.len()];
        for (row, ts) in self.rows().enumerate() {
            for &t in ts {
                let slot = &mut cursor[t as usize];
                targets[*slot] = row as u32;
                *slot += 1;
            }
        }
        Csr { offsets, targets }
    }

    /// Keeps only the entries for which `keep(row, target)` holds.
    pub fn filter(&self, mut keep: impl FnMut(usize, u32) -> bool) -> Csr {
        let mut offsets = Vec::with_capacity(self.offsets.len());
        let mut targets = Vec::with_capacity(self.targets.len());
        offsets.push(0);
        for (row, ts) in self.rows().enumerate() {
            targets.extend(ts.iter().copied().filter(|&t| keep(row, t)));
            offsets.push(targets.len());
        }
        Csr { offsets, targets }
    }

    /// All `(row, target)` entries in row order.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.rows()
            .enumerate()
            .flat_map(|(r, ts)| ts.iter().map(move |&t| (r as u32, t)))
    }
}
