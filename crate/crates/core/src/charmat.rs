//! Characteristic matrices and nondegeneracy.
//!
//! For a tensor T in F^{n1 x n2 x n3} with slices A_1, ..., A_{n3}, the
//! characteristic matrix is A(s) = sum_k s_k A_k, an n1 x n2 matrix of
//! linear forms in one indeterminate per slice.
//!
//! Two distinct rank notions live here and they are **not** the same:
//!
//! * [`CharMatrix::row_rank`] / [`CharMatrix::col_rank`] — the maximal
//!   number of rows (resp. columns) that are linearly independent **over
//!   F**, i.e. with constant coefficients. A row of A(s) is determined by
//!   its coefficient vector in F^{n2 * n3}, so these are the ranks of the
//!   mode-1 and mode-2 flattenings. They need not be equal: the 1 x 2
//!   matrix [s1  s2] has column rank 2 but row rank 1.
//! * [`CharMatrix::generic_rank_symbolic`] — the rank of A(s) as a matrix
//!   over the rational function field F(s). This is never larger than
//!   either of the above (an F(s)-independent family is in particular
//!   F-independent), and for [s1  s2] it is 1.
//!
//! Each notion has an exact deterministic path and a seeded randomized
//! path (Schwartz–Zippel evaluation in an extension field GF(p^e) with
//! p^e >= 2^20). A randomized value never exceeds the true rank; it
//! undershoots with probability at most min(n1, n2)/p^e per trial, and the
//! maximum over trials is reported.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::extfield::{ext_rank, ExtElem, ExtField};
use crate::field::Scalar;
use crate::mat::MatF;
use crate::mpoly::{fraction_free_rank, MPoly};
use crate::tensor::Tensor3;

/// Default trial count for the randomized paths.
pub const DEFAULT_TRIALS: u32 = 3;

/// Minimum extension-field order for Schwartz–Zippel evaluation.
pub const MIN_EXT_ORDER: u128 = 1 << 20;

/// Which rank path a computation should take.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RankPath {
    /// Deterministic: coefficient ranks by plain elimination over F,
    /// generic rank by fraction-free symbolic elimination.
    Exact,
    Randomized { seed: u64, trials: u32 },
}

impl Default for RankPath {
    fn default() -> Self {
        RankPath::Exact
    }
}

/// A tensor viewed through its characteristic matrix.
pub struct CharMatrix<'a> {
    base: &'a Tensor3,
}

impl<'a> CharMatrix<'a> {
    pub fn new(base: &'a Tensor3) -> Self {
        CharMatrix { base }
    }

    /// dim s: one indeterminate per slice.
    pub fn var_count(&self) -> usize {
        self.base.n3()
    }

    /// Maximal number of rows of A(s) independent over F.
    pub fn row_rank(&self) -> usize {
        self.base.flatten(1).expect("mode 1 is valid").rank()
    }

    /// Maximal number of columns of A(s) independent over F.
    pub fn col_rank(&self) -> usize {
        self.base.flatten(2).expect("mode 2 is valid").rank()
    }

    pub fn row_rank_with(&self, path: RankPath) -> usize {
        match path {
            RankPath::Exact => self.row_rank(),
            RankPath::Randomized { seed, trials } => self.row_rank_randomized(seed, trials),
        }
    }

    pub fn col_rank_with(&self, path: RankPath) -> usize {
        match path {
            RankPath::Exact => self.col_rank(),
            RankPath::Randomized { seed, trials } => self.col_rank_randomized(seed, trials),
        }
    }

    /// Randomized row rank: evaluate A at n3 independent random points of
    /// GF(p^e) and take the rank of the horizontal arrangement
    /// [A(v_1) ... A(v_{n3})]. Evaluation is linear on the row span, so
    /// every trial is a lower bound on [`Self::row_rank`]; choosing the
    /// points as the unit vectors recovers the coefficient matrix exactly,
    /// so generic points achieve it.
    pub fn row_rank_randomized(&self, seed: u64, trials: u32) -> usize {
        self.randomized_coeff_rank(seed, trials, false)
    }

    /// Randomized column rank; the column-family analogue of
    /// [`Self::row_rank_randomized`] (vertical stacking).
    pub fn col_rank_randomized(&self, seed: u64, trials: u32) -> usize {
        self.randomized_coeff_rank(seed, trials, true)
    }

    /// Rank of A(s) over the rational function field F(s), by fraction-free
    /// elimination over the polynomial ring in s.
    pub fn generic_rank_symbolic(&self) -> Result<usize> {
        let (n1, n2, n3) = self.base.dims();
        let field = self.base.field();
        let mut m = vec![vec![MPoly::zero(field, n3); n2]; n1];
        let mut expo = vec![0u16; n3];
        for (i, j, k, v) in self.base.entries() {
            expo[k - 1] = 1;
            m[i - 1][j - 1].add_term(&expo, v.value());
            expo[k - 1] = 0;
        }
        fraction_free_rank(m, field, n3)
    }

    /// Rank of A(s) over F(s) by evaluation at a single random point of
    /// GF(p^e) per trial, maximum over trials. Any r x r minor of A(s) is a
    /// polynomial of total degree at most min(n1, n2), so by
    /// Schwartz–Zippel a trial undershoots with probability at most
    /// min(n1, n2)/p^e.
    pub fn generic_rank_randomized(&self, seed: u64, trials: u32) -> usize {
        let (n1, n2, n3) = self.base.dims();
        let ef = ExtField::with_min_order(self.base.field(), MIN_EXT_ORDER);
        let mut best = 0;
        for trial in 0..trials.max(1) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            let point: Vec<ExtElem> = (0..n3).map(|_| ef.sample(&mut rng)).collect();
            let mut m = vec![vec![ef.zero(); n2]; n1];
            for (i, j, k, v) in self.base.entries() {
                let contrib = ef.mul_base(&point[k - 1], v.value());
                m[i - 1][j - 1] = ef.add(&m[i - 1][j - 1], &contrib);
            }
            best = best.max(ext_rank(&ef, m));
        }
        best
    }

    /// Substitutes concrete field elements for the indeterminates.
    pub fn evaluate(&self, point: &[Scalar]) -> Result<MatF> {
        let (n1, n2, n3) = self.base.dims();
        if point.len() != n3 {
            return Err(crate::error::Error::DimensionMismatch(format!(
                "evaluate: {} points for {} indeterminates",
                point.len(),
                n3
            )));
        }
        let field = self.base.field();
        let mut m = MatF::zero(n1, n2, field);
        for (i, j, k, v) in self.base.entries() {
            let s = point[k - 1].mul(v)?;
            let cur = m.get(i - 1, j - 1);
            m.set(i - 1, j - 1, cur.add(s)?)?;
        }
        Ok(m)
    }

    fn randomized_coeff_rank(&self, seed: u64, trials: u32, columns: bool) -> usize {
        let (n1, n2, n3) = self.base.dims();
        let ef = ExtField::with_min_order(self.base.field(), MIN_EXT_ORDER);
        let mut best = 0;
        for trial in 0..trials.max(1) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            let points: Vec<Vec<ExtElem>> = (0..n3)
                .map(|_| (0..n3).map(|_| ef.sample(&mut rng)).collect())
                .collect();
            let (rows, cols) = if columns {
                (n3 * n1, n2)
            } else {
                (n1, n3 * n2)
            };
            let mut m = vec![vec![ef.zero(); cols]; rows];
            for (i, j, k, v) in self.base.entries() {
                for (t, point) in points.iter().enumerate() {
                    let contrib = ef.mul_base(&point[k - 1], v.value());
                    let (r, c) = if columns {
                        (t * n1 + (i - 1), j - 1)
                    } else {
                        (i - 1, t * n2 + (j - 1))
                    };
                    m[r][c] = ef.add(&m[r][c], &contrib);
                }
            }
            best = best.max(ext_rank(&ef, m));
        }
        best
    }
}

/// The three checks behind nondegeneracy, reported separately so a failure
/// names its cause.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    /// No nontrivial linear combination of the slices vanishes
    /// (the mode-3 flattening has rank n3).
    pub slices_independent: bool,
    /// row rank A(s) = n1.
    pub full_row_rank: bool,
    /// column rank A(s) = n2.
    pub full_col_rank: bool,
}

impl NondegeneracyReport {
    pub fn nondegenerate(&self) -> bool {
        self.slices_independent && self.full_row_rank && self.full_col_rank
    }
}

/// Checks nondegeneracy with the exact rank path.
pub fn is_nondegenerate(t: &Tensor3) -> NondegeneracyReport {
    is_nondegenerate_with(t, RankPath::Exact)
}

pub fn is_nondegenerate_with(t: &Tensor3, path: RankPath) -> NondegeneracyReport {
    let (n1, n2, n3) = t.dims();
    let cm = CharMatrix::new(t);
    // Slice independence is a plain matrix-rank question over F; it has no
    // randomized variant.
    let slices_independent = t.flatten(3).expect("mode 3 is valid").rank() == n3;
    NondegeneracyReport {
        slices_independent,
        full_row_rank: cm.row_rank_with(path) == n1,
        full_col_rank: cm.col_rank_with(path) == n2,
    }
}
