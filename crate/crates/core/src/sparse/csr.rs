use crate::error::{Error, Result};
use crate::scalar::Real;
use std::io::Write;

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

/// Collects `(row, col, value)` entries; duplicates are summed in insertion order.
#[derive(Clone, Debug, Default)]
pub struct TripletBuilder<T> {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> TripletBuilder<T> {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries.push((row, col, value));
    }

    /// Adds a dense local block `local[i * cols.len() + j]` at `(rows[i], cols[j])`.
    pub fn push_block(&mut self, rows: &[usize], cols: &[usize], local: &[T]) {
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                self.push(r, c, local[i * cols.len() + j]);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn build(mut self) -> CsrMatrix<T> {
        // stable sort keeps the canonical accumulation order within each entry
        self.entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.n_rows + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len() / 2);
        let mut values: Vec<T> = Vec::with_capacity(self.entries.len() / 2);
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl<T: Real> CsrMatrix<T> {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(T::zero(), |k| vals[k])
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n_rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n_rows) {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        self.mul_vec(x).iter().zip(x).map(|(&a, &b)| a * b).sum()
    }

    /// `sum_k c_k A_k` over matrices of equal shape. Rows are merged in column order.
    pub fn linear_combination(terms: &[(T, &CsrMatrix<T>)]) -> Result<CsrMatrix<T>> {
        let (n_rows, n_cols) = match terms.first() {
            Some((_, m)) => (m.n_rows, m.n_cols),
            None => return Err(Error::InvalidInput("empty linear combination".into())),
        };
        if terms.iter().any(|(_, m)| m.n_rows != n_rows || m.n_cols != n_cols) {
            return Err(Error::InvalidInput("matrix shapes differ".into()));
        }
        let mut b = TripletBuilder::new(n_rows, n_cols);
        for i in 0..n_rows {
            for &(c, m) in terms {
                let (cols, vals) = m.row(i);
                for (&j, &v) in cols.iter().zip(vals) {
                    b.push(i, j, c * v);
                }
            }
        }
        Ok(b.build())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn frobenius_norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn transpose(&self) -> CsrMatrix<T> {
        let mut b = TripletBuilder::new(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                b.push(j, i, v);
            }
        }
        b.build()
    }

    /// Coordinate text export: one `row col value` line per stored entry.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "% {} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(out, "{} {} {:.17e}", i, j, v)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn norm2<T: Real>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum::<T>().sqrt()
}
