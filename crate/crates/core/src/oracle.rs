//! Exhaustive exact tensor rank over GF(p) at desk scale.
//!
//! The search iterates candidate ranks r upward from the flattening bound.
//! For each r it enumerates canonical factor columns for the first and
//! third modes and solves a linear system for the middle factor:
//!
//! * every a-column (length n1) and c-column (length n3) is nonzero with
//!   first nonzero entry 1 — scalar scaling is quotiented into B, which
//!   absorbs all scalars through the solve, so this loses no
//!   decompositions;
//! * the (a, c) column *pairs* are enumerated in nondecreasing
//!   lexicographic order, quotienting the simultaneous permutation of
//!   columns across all three factors (sorting A and C independently would
//!   not be permutation-complete; the pair order is);
//! * for a fixed (A, C) the tensor equation T[i,j,k] = sum_t A[i,t] B[j,t]
//!   C[k,t] is linear in B: one system with n1*n3 equations per column of
//!   B, the same coefficient matrix for every j. Consistency is decided by
//!   one elimination; free variables are zeroed, so witnesses are
//!   deterministic.
//!
//! A consistent system at rank r proves rank <= r (padding a smaller
//! decomposition with zero B-columns is itself consistent), so exhausting
//! the enumeration at r proves rank > r. Iterating r upward therefore
//! returns the exact rank with a minimal witness.
//!
//! Work is budgeted in linear-system solves (one per candidate) with an
//! optional wall-clock guard; a bit-size guard keeps the enumeration
//! desk-scale. For GF(2) the per-candidate system is packed into one u64
//! per equation and eliminated with xors; the packed and generic paths are
//! cross-checked in the tests.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bounds::flattening_bound;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::mat::rref_in_place;
use crate::tensor::{Decomposition, RankOneTerm, Tensor3};

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Work cap, in linear-system solves (one per enumerated candidate).
    pub max_solves: u64,
    /// Secondary wall-clock cap, checked every few thousand candidates.
    pub wall_limit: Option<Duration>,
    /// Feasibility guard: enumerating an n x r factor matrix over GF(p)
    /// takes n * r * ceil(log2 p) bits; candidates needing more than this
    /// for either factor are refused.
    pub enum_bits_cap: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_solves: 100_000_000,
            wall_limit: None,
            enum_bits_cap: 24,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    /// Rank determined exactly, with a verified witness.
    Exact,
    /// Every rank up to the requested maximum was exhaustively refuted.
    RankExceedsMax,
    /// The work or wall-clock budget ran out first.
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub status: OracleStatus,
    pub rank: Option<usize>,
    pub witness: Option<Decomposition>,
    /// Highest rank whose enumeration completed without finding a witness.
    pub searched_up_to: usize,
    pub solves: u64,
}

/// Exact rank by exhaustive search, from the flattening bound up to
/// `r_max` inclusive.
pub fn exact_rank(t: &Tensor3, r_max: usize, cfg: &OracleConfig) -> Result<OracleResult> {
    if t.is_zero() {
        return Ok(OracleResult {
            status: OracleStatus::Exact,
            rank: Some(0),
            witness: Some(Decomposition::empty(t.field())),
            searched_up_to: 0,
            solves: 0,
        });
    }
    let start = flattening_bound(t).value;
    let mut search = Search::new(t, cfg);
    let mut searched_up_to = start.saturating_sub(1);
    for r in start..=r_max {
        search.check_feasible(r)?;
        match search.run(r) {
            Err(Error::OracleBudget { solves, .. }) => {
                return Ok(OracleResult {
                    status: OracleStatus::BudgetExhausted,
                    rank: None,
                    witness: None,
                    searched_up_to,
                    solves,
                });
            }
            Err(e) => return Err(e),
            Ok(Some((idx, b_columns))) => {
                let witness = search.witness(&idx, &b_columns)?;
                let check = witness.materialize(t.n1(), t.n2(), t.n3())?;
                if &check != t {
                    return Err(Error::Internal("witness fails to re-materialize"));
                }
                return Ok(OracleResult {
                    status: OracleStatus::Exact,
                    rank: Some(r),
                    witness: Some(witness),
                    searched_up_to,
                    solves: search.solves,
                });
            }
            Ok(None) => searched_up_to = r,
        }
    }
    Ok(OracleResult {
        status: OracleStatus::RankExceedsMax,
        rank: None,
        witness: None,
        searched_up_to,
        solves: search.solves,
    })
}

/// True iff no r-term decomposition exists (hence rank > r), by exhausting
/// the same canonical enumeration at exactly rank r. Budget exhaustion is
/// reported as an error, distinct from either verdict.
pub fn refute_rank(t: &Tensor3, r: usize, cfg: &OracleConfig) -> Result<bool> {
    if r == 0 {
        // The empty decomposition is a 0-term witness for the zero tensor.
        return Ok(!t.is_zero());
    }
    let mut search = Search::new(t, cfg);
    search.check_feasible(r)?;
    Ok(search.run(r)?.is_none())
}

struct Search<'a> {
    t: &'a Tensor3,
    field: FieldSpec,
    cfg: &'a OracleConfig,
    n1: usize,
    n2: usize,
    n3: usize,
    a_cols: Vec<Vec<u64>>,
    c_cols: Vec<Vec<u64>>,
    /// dyad[pair][row]: a[i] * c[k] at row = (i * n3 + k), pair-major in
    /// nondecreasing (a, c) lexicographic order.
    dyad: Vec<Vec<u64>>,
    /// rhs[row][j] = T[i, j, k] at row = (i * n3 + k).
    rhs: Vec<Vec<u64>>,
    solves: u64,
    started: Instant,
    /// Disables the GF(2) bit-packed fast path; the tests use this to
    /// check the two paths agree.
    force_generic: bool,
}

impl<'a> Search<'a> {
    fn new(t: &'a Tensor3, cfg: &'a OracleConfig) -> Self {
        let (n1, n2, n3) = t.dims();
        let field = t.field();
        let a_cols = canonical_columns(n1, field);
        let c_cols = canonical_columns(n3, field);
        let mut dyad = Vec::with_capacity(a_cols.len() * c_cols.len());
        for a in &a_cols {
            for c in &c_cols {
                let mut rows = vec![0u64; n1 * n3];
                for (i, &ai) in a.iter().enumerate() {
                    if ai == 0 {
                        continue;
                    }
                    for (k, &ck) in c.iter().enumerate() {
                        rows[i * n3 + k] = field.mul_raw(ai, ck);
                    }
                }
                dyad.push(rows);
            }
        }
        let mut rhs = vec![vec![0u64; n2]; n1 * n3];
        for (i, j, k, v) in t.entries() {
            rhs[(i - 1) * n3 + (k - 1)][j - 1] = v.value();
        }
        Search {
            t,
            field,
            cfg,
            n1,
            n2,
            n3,
            a_cols,
            c_cols,
            dyad,
            rhs,
            solves: 0,
            started: Instant::now(),
            force_generic: false,
        }
    }

    fn check_feasible(&self, r: usize) -> Result<()> {
        let bits_per = 64 - (self.field.modulus() - 1).leading_zeros() as u64;
        let bits = (self.n1.max(self.n3) as u64) * r as u64 * bits_per;
        if bits > self.cfg.enum_bits_cap {
            return Err(Error::OracleInfeasible {
                bits,
                r,
                cap: self.cfg.enum_bits_cap,
            });
        }
        Ok(())
    }

    /// Exhausts the canonical enumeration at exactly rank r. Returns the
    /// first consistent candidate: its pair indices and the solved middle
    /// factor columns.
    fn run(&mut self, r: usize) -> Result<Option<(Vec<usize>, Vec<Vec<u64>>)>> {
        debug_assert!(r >= 1);
        let pair_count = self.dyad.len();
        let nrows = self.n1 * self.n3;
        let packed = !self.force_generic && self.field.modulus() == 2 && r + self.n2 <= 64;
        // Right-hand bits shifted past the coefficient region, rebuilt per r.
        let rhs_packed: Vec<u64> = if packed {
            self.rhs
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .fold(0u64, |acc, (j, &v)| acc | (v << (r + j)))
                })
                .collect()
        } else {
            Vec::new()
        };

        let mut idx = vec![0usize; r];
        let mut row_buf = vec![0u64; nrows.max(1) * (r + self.n2 + 1)];
        loop {
            if self.solves >= self.cfg.max_solves {
                return Err(Error::OracleBudget {
                    solves: self.solves,
                    searched_up_to: r.saturating_sub(1),
                });
            }
            if let Some(limit) = self.cfg.wall_limit {
                if self.solves % 4096 == 0 && self.started.elapsed() > limit {
                    return Err(Error::OracleBudget {
                        solves: self.solves,
                        searched_up_to: r.saturating_sub(1),
                    });
                }
            }
            self.solves += 1;

            let solution = if packed {
                self.solve_packed(&idx, r, &rhs_packed)
            } else {
                self.solve_generic(&idx, r, &mut row_buf)
            };
            if let Some(b) = solution {
                return Ok(Some((idx, b)));
            }

            // Next nondecreasing index vector.
            let Some(pos) = (0..r).rev().find(|&p| idx[p] + 1 < pair_count) else {
                return Ok(None);
            };
            let v = idx[pos] + 1;
            for slot in idx.iter_mut().skip(pos) {
                *slot = v;
            }
        }
    }

    /// GF(2): one u64 per equation, low bits the coefficients, high bits
    /// the right-hand sides; reduced row echelon by xor.
    fn solve_packed(&self, idx: &[usize], r: usize, rhs_packed: &[u64]) -> Option<Vec<Vec<u64>>> {
        let nrows = rhs_packed.len();
        let mut rows: Vec<u64> = Vec::with_capacity(nrows);
        for q in 0..nrows {
            let mut bits = rhs_packed[q];
            for (t, &pair) in idx.iter().enumerate() {
                bits |= self.dyad[pair][q] << t;
            }
            rows.push(bits);
        }
        let mut rank = 0usize;
        let mut pivots = [0usize; 64];
        for col in 0..r {
            let Some(pr) = (rank..nrows).find(|&q| rows[q] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, pr);
            let pivot_row = rows[rank];
            for (q, row) in rows.iter_mut().enumerate() {
                if q != rank && *row >> col & 1 == 1 {
                    *row ^= pivot_row;
                }
            }
            pivots[rank] = col;
            rank += 1;
        }
        // Non-pivot rows have an all-zero coefficient region; any surviving
        // right-hand bit is a contradiction.
        if rows[rank..].iter().any(|&row| row != 0) {
            return None;
        }
        let mut b = vec![vec![0u64; self.n2]; r];
        for q in 0..rank {
            let col = pivots[q];
            for j in 0..self.n2 {
                b[col][j] = rows[q] >> (r + j) & 1;
            }
        }
        Some(b)
    }

    fn solve_generic(&self, idx: &[usize], r: usize, buf: &mut [u64]) -> Option<Vec<Vec<u64>>> {
        let nrows = self.n1 * self.n3;
        let width = r + self.n2;
        let aug = &mut buf[..nrows * width];
        for q in 0..nrows {
            for (t, &pair) in idx.iter().enumerate() {
                aug[q * width + t] = self.dyad[pair][q];
            }
            aug[q * width + r..q * width + width].copy_from_slice(&self.rhs[q]);
        }
        let pivots = rref_in_place(self.field, aug, nrows, width, r);
        for q in pivots.len()..nrows {
            if aug[q * width + r..(q + 1) * width].iter().any(|&v| v != 0) {
                return None;
            }
        }
        let mut b = vec![vec![0u64; self.n2]; r];
        for (q, &col) in pivots.iter().enumerate() {
            b[col].copy_from_slice(&aug[q * width + r..(q + 1) * width]);
        }
        Some(b)
    }

    fn witness(&self, idx: &[usize], b_columns: &[Vec<u64>]) -> Result<Decomposition> {
        let terms = idx
            .iter()
            .zip(b_columns)
            .map(|(&pair, b)| {
                let (ai, ci) = (pair / self.c_cols.len(), pair % self.c_cols.len());
                RankOneTerm {
                    a: self.a_cols[ai].clone(),
                    b: b.clone(),
                    c: self.c_cols[ci].clone(),
                }
            })
            .collect();
        // A zero B-column here would mean a smaller decomposition existed
        // and was missed, which the upward iteration rules out.
        Decomposition::new(self.field, terms)
            .map_err(|_| Error::Internal("zero factor column at minimal rank"))
    }
}

fn canonical_columns(dim: usize, field: FieldSpec) -> Vec<Vec<u64>> {
    let p = field.modulus();
    let mut cols = Vec::new();
    let mut v = vec![0u64; dim];
    loop {
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            cols.push(v.clone());
        }
        let Some(pos) = (0..dim).rev().find(|&i| v[i] + 1 < p) else {
            break;
        };
        v[pos] += 1;
        for x in v.iter_mut().skip(pos + 1) {
            *x = 0;
        }
    }
    cols
}
