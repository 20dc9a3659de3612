//! Dense matrices over GF(p): exact rank and linear solving by Gaussian
//! elimination.
//!
//! Everything here is deterministic. `solve` fixes the free variables to
//! zero under the elimination's pivot order, so witnesses derived from it
//! are reproducible across runs and platforms.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};

/// A rows x cols matrix over GF(p), stored row-major as reduced
/// representatives. Indices are 0-based.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatF {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    data: Vec<u64>,
}

impl MatF {
    pub fn zero(rows: usize, cols: usize, field: FieldSpec) -> Self {
        MatF {
            rows,
            cols,
            field,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Self::zero(n, n, field);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.modulus();
        }
        m
    }

    /// Builds a matrix from row slices, reducing each entry mod p.
    pub fn from_rows<R: AsRef<[u64]>>(field: FieldSpec, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "ragged rows: expected {cols} entries, found {}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|&v| v % field.modulus()));
        }
        Ok(MatF {
            rows: rows.len(),
            cols,
            field,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.field.element(self.data[i * self.cols + j])
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) -> Result<()> {
        if value.field() != self.field {
            return Err(Error::MixedFields(
                self.field.modulus(),
                value.field().modulus(),
            ));
        }
        self.data[i * self.cols + j] = value.value();
        Ok(())
    }

    #[inline]
    pub(crate) fn get_raw(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set_raw(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> MatF {
        let mut t = MatF::zero(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Matrix rank by row echelon reduction.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| m[r * cols + col] != 0) else {
                continue;
            };
            if pivot != rank {
                for j in 0..cols {
                    m.swap(rank * cols + j, pivot * cols + j);
                }
            }
            let inv = f.inv_raw(m[rank * cols + col]);
            for r in rank + 1..rows {
                let factor = f.mul_raw(m[r * cols + col], inv);
                if factor == 0 {
                    continue;
                }
                for j in col..cols {
                    let delta = f.mul_raw(factor, m[rank * cols + j]);
                    m[r * cols + j] = f.sub_raw(m[r * cols + j], delta);
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// Solves `A x = b` exactly. Returns `None` when the system is
    /// inconsistent; otherwise the unique solution with every free variable
    /// set to zero under the left-to-right pivot order.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: {} rows but {} right-hand entries",
                self.rows,
                b.len()
            )));
        }
        for s in b {
            if s.field() != self.field {
                return Err(Error::MixedFields(
                    self.field.modulus(),
                    s.field().modulus(),
                ));
            }
        }
        let f = self.field;
        let cols = self.cols;
        let width = cols + 1;
        let mut aug: Vec<u64> = Vec::with_capacity(self.rows * width);
        for i in 0..self.rows {
            aug.extend_from_slice(&self.data[i * cols..(i + 1) * cols]);
            aug.push(b[i].value());
        }
        let pivots = rref_in_place(f, &mut aug, self.rows, width, cols);
        // A zero coefficient row with a nonzero right-hand side is a
        // contradiction.
        for r in pivots.len()..self.rows {
            if aug[r * width + cols] != 0 {
                return Ok(None);
            }
        }
        let mut x = vec![f.zero(); cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = f.element(aug[r * width + cols]);
        }
        Ok(Some(x))
    }

    /// `A x`, used to re-check solutions and witnesses.
    pub fn mul_vec(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "mul_vec: {} cols but {} vector entries",
                self.cols,
                x.len()
            )));
        }
        let f = self.field;
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = 0u64;
            for j in 0..self.cols {
                acc = f.add_raw(acc, f.mul_raw(self.data[i * self.cols + j], x[j].value()));
            }
            out.push(f.element(acc));
        }
        Ok(out)
    }
}

/// Reduced row echelon form on a row-major buffer of `rows` x `width`
/// entries, eliminating only within the first `pivot_cols` columns.
/// Pivot rows are compacted to the top; returns the pivot columns in order.
pub(crate) fn rref_in_place(
    f: FieldSpec,
    m: &mut [u64],
    rows: usize,
    width: usize,
    pivot_cols: usize,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    for col in 0..pivot_cols {
        let rank = pivots.len();
        let Some(pivot) = (rank..rows).find(|&r| m[r * width + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for j in 0..width {
                m.swap(rank * width + j, pivot * width + j);
            }
        }
        let inv = f.inv_raw(m[rank * width + col]);
        if inv != 1 {
            for j in col..width {
                m[rank * width + j] = f.mul_raw(m[rank * width + j], inv);
            }
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let factor = m[r * width + col];
            if factor == 0 {
                continue;
            }
            for j in col..width {
                let delta = f.mul_raw(factor, m[rank * width + j]);
                m[r * width + j] = f.sub_raw(m[r * width + j], delta);
            }
        }
        pivots.push(col);
        if pivots.len() == rows {
            break;
        }
    }
    pivots
}
