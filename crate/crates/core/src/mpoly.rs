//! Sparse multivariate polynomials over GF(p) — just enough ring arithmetic
//! for fraction-free (Bareiss) elimination: add, subtract, multiply, and
//! the exact division by a previous pivot that Bareiss guarantees.
//!
//! Monomials are exponent vectors ordered lexicographically, which is a
//! multiplicative order, so leading-term division is well-defined.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::FieldSpec;

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct MPoly {
    field: FieldSpec,
    vars: usize,
    terms: BTreeMap<Vec<u16>, u64>,
}

impl MPoly {
    pub fn zero(field: FieldSpec, vars: usize) -> Self {
        MPoly {
            field,
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: FieldSpec, vars: usize, value: u64) -> Self {
        let mut p = Self::zero(field, vars);
        p.add_term(&vec![0; vars], value);
        p
    }

    /// coeff * s_var
    pub fn variable_term(field: FieldSpec, vars: usize, var: usize, coeff: u64) -> Self {
        let mut p = Self::zero(field, vars);
        let mut expo = vec![0u16; vars];
        expo[var] = 1;
        p.add_term(&expo, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, expo: &[u16], coeff: u64) {
        let coeff = coeff % self.field.modulus();
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(expo.to_vec()).or_insert(0);
        *entry = self.field.add_raw(*entry, coeff);
        if *entry == 0 {
            self.terms.remove(expo);
        }
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (expo, &coeff) in &other.terms {
            out.add_term(expo, self.field.neg_raw(coeff));
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let f = self.field;
        let mut out = MPoly::zero(f, self.vars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let expo: Vec<u16> = ea.iter().zip(eb).map(|(&x, &y)| x + y).collect();
                out.add_term(&expo, f.mul_raw(ca, cb));
            }
        }
        out
    }

    fn leading(&self) -> Option<(&Vec<u16>, u64)> {
        self.terms.last_key_value().map(|(e, &c)| (e, c))
    }

    /// Exact quotient `self / divisor`. Errors if the division leaves a
    /// remainder, which inside Bareiss elimination signals a bug.
    pub fn exact_div(&self, divisor: &MPoly) -> Result<MPoly> {
        let f = self.field;
        let (lead_expo, lead_coeff) = divisor
            .leading()
            .ok_or(Error::Internal("exact division by the zero polynomial"))?;
        let lead_expo = lead_expo.clone();
        let lead_inv = f.inv_raw(lead_coeff);
        let mut rem = self.clone();
        let mut quot = MPoly::zero(f, self.vars);
        while let Some((rem_expo, rem_coeff)) = rem.leading() {
            let Some(expo) = rem_expo
                .iter()
                .zip(&lead_expo)
                .map(|(&a, &b)| a.checked_sub(b))
                .collect::<Option<Vec<u16>>>()
            else {
                return Err(Error::Internal("non-exact division in elimination"));
            };
            let coeff = f.mul_raw(rem_coeff, lead_inv);
            let mut t = MPoly::zero(f, self.vars);
            t.add_term(&expo, coeff);
            quot.add_term(&expo, coeff);
            rem = rem.sub(&t.mul(divisor));
        }
        Ok(quot)
    }
}

/// Rank over the fraction field F(s) of a matrix of polynomials, by
/// fraction-free elimination with full pivoting. The division at each step
/// is exact by the Sylvester determinant identity.
pub(crate) fn fraction_free_rank(mut m: Vec<Vec<MPoly>>, field: FieldSpec, vars: usize) -> Result<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut prev = MPoly::constant(field, vars, 1);
    let mut step = 0;
    while step < rows.min(cols) {
        // First nonzero entry of the trailing submatrix, scanned row-major.
        let mut found = None;
        'scan: for r in step..rows {
            for c in step..cols {
                if !m[r][c].is_zero() {
                    found = Some((r, c));
                    break 'scan;
                }
            }
        }
        let Some((pr, pc)) = found else {
            break;
        };
        m.swap(step, pr);
        if pc != step {
            for row in m.iter_mut() {
                row.swap(step, pc);
            }
        }
        for r in step + 1..rows {
            for c in step + 1..cols {
                let num = m[step][step].mul(&m[r][c]).sub(&m[r][step].mul(&m[step][c]));
                m[r][c] = num.exact_div(&prev)?;
            }
            m[r][step] = MPoly::zero(field, vars);
        }
        prev = m[step][step].clone();
        step += 1;
    }
    Ok(step)
}
