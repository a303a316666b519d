use num_complex::Complex64;
use rayon::prelude::*;

/// Rows per rayon task in the parallel product.
const PAR_ROWS: usize = 2048;

/// Anything that can act on a complex vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

/// Element type of a sparse matrix that can scale a complex amplitude.
pub trait SparseScalar: Copy + Send + Sync + PartialEq + std::fmt::Debug {
    fn scale(self, x: Complex64) -> Complex64;
    fn to_complex(self) -> Complex64;
}

impl SparseScalar for f64 {
    #[inline]
    fn scale(self, x: Complex64) -> Complex64 {
        x * self
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl SparseScalar for Complex64 {
    #[inline]
    fn scale(self, x: Complex64) -> Complex64 {
        x * self
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: SparseScalar> CsrMatrix<T> {
    /// Build from per-row `(column, value)` lists; duplicates are summed.
    pub fn from_rows(n_cols: usize, rows: Vec<Vec<(usize, T)>>) -> Self
    where
        T: std::ops::Add<Output = T>,
    {
        let n_rows = rows.len();
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let start = col_idx.len();
            for (c, v) in row {
                debug_assert!(c < n_cols);
                if col_idx.len() > start && *col_idx.last().unwrap() == c {
                    let last = values.last_mut().unwrap();
                    *last = *last + v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> Option<T> {
        self.row(r).find(|&(col, _)| col == c).map(|(_, v)| v)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..self.n_cols {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = Vec::with_capacity(self.nnz());
        // fill in row order so columns within each transposed row stay sorted
        let mut slots: Vec<Option<T>> = vec![None; self.nnz()];
        for r in 0..self.n_rows {
            for (c, v) in self.row(r) {
                let pos = next[c];
                col_idx[pos] = r;
                slots[pos] = Some(v);
                next[c] += 1;
            }
        }
        values.extend(slots.into_iter().map(|v| v.expect("every slot filled")));
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![Complex64::new(0.0, 0.0); self.n_cols]; self.n_rows];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] += v.to_complex();
            }
        }
        out
    }

    fn row_dot(&self, r: usize, x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in self.row_ptr[r]..self.row_ptr[r + 1] {
            acc += self.values[k].scale(x[self.col_idx[k]]);
        }
        acc
    }

    /// `y = A x`, row-partitioned across the rayon pool for large matrices.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        if self.n_rows >= 2 * PAR_ROWS {
            y.par_chunks_mut(PAR_ROWS).enumerate().for_each(|(chunk, out)| {
                let base = chunk * PAR_ROWS;
                for (i, yi) in out.iter_mut().enumerate() {
                    *yi = self.row_dot(base + i, x);
                }
            });
        } else {
            for (r, yi) in y.iter_mut().enumerate() {
                *yi = self.row_dot(r, x);
            }
        }
    }
}

impl<T: SparseScalar> LinearOperator for CsrMatrix<T> {
    fn dim(&self) -> usize {
        self.n_rows
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matvec(x, y);
    }
}
