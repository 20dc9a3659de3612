//! Three-way tensors over GF(p) in sparse coordinate form, with the
//! structural operations the recursive construction is built from: slices,
//! concatenation along the third axis, 2x2 spatial block composition, and
//! mode flattenings.
//!
//! Indices are 1-based throughout, matching the `[n]` convention of the
//! text file format. Entry maps store nonzero values only, so two tensors
//! are equal exactly when their dimensions, field, and nonzero supports
//! coincide.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::mat::MatF;

/// A sparse tensor in F^{n1 x n2 x n3}.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tensor3 {
    n1: usize,
    n2: usize,
    n3: usize,
    field: FieldSpec,
    entries: BTreeMap<(usize, usize, usize), u64>,
}

impl Tensor3 {
    pub fn zero(n1: usize, n2: usize, n3: usize, field: FieldSpec) -> Self {
        Tensor3 {
            n1,
            n2,
            n3,
            field,
            entries: BTreeMap::new(),
        }
    }

    /// The m x m x 1 tensor whose single slice is the identity matrix.
    pub fn identity_slice(m: usize, field: FieldSpec) -> Self {
        let mut t = Self::zero(m, m, 1, field);
        for i in 1..=m {
            t.entries.insert((i, i, 1), 1);
        }
        t
    }

    /// Builds a tensor from `(i, j, k, value)` tuples. Values are reduced
    /// mod p; entries that reduce to zero are dropped. Duplicate index
    /// triples are rejected.
    pub fn from_entries<I>(
        n1: usize,
        n2: usize,
        n3: usize,
        field: FieldSpec,
        entries: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, usize, u64)>,
    {
        let mut t = Self::zero(n1, n2, n3, field);
        for (i, j, k, v) in entries {
            check_index(i, n1)?;
            check_index(j, n2)?;
            check_index(k, n3)?;
            let v = v % field.modulus();
            if v == 0 {
                continue;
            }
            if t.entries.insert((i, j, k), v).is_some() {
                return Err(Error::InvalidParams(format!(
                    "duplicate entry at ({i}, {j}, {k})"
                )));
            }
        }
        Ok(t)
    }

    /// Reassembles a tensor from its slices, in order.
    pub fn from_slices(slices: &[MatF]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::InvalidParams("from_slices: no slices".into()))?;
        let (n1, n2, field) = (first.rows(), first.cols(), first.field());
        let mut t = Self::zero(n1, n2, slices.len(), field);
        for (idx, s) in slices.iter().enumerate() {
            if s.rows() != n1 || s.cols() != n2 {
                return Err(Error::DimensionMismatch(format!(
                    "slice {} is {}x{}, expected {n1}x{n2}",
                    idx + 1,
                    s.rows(),
                    s.cols()
                )));
            }
            if s.field() != field {
                return Err(Error::MixedFields(field.modulus(), s.field().modulus()));
            }
            for i in 0..n1 {
                for j in 0..n2 {
                    let v = s.get_raw(i, j);
                    if v != 0 {
                        t.entries.insert((i + 1, j + 1, idx + 1), v);
                    }
                }
            }
        }
        Ok(t)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n1, self.n2, self.n3)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn n3(&self) -> usize {
        self.n3
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Result<Scalar> {
        check_index(i, self.n1)?;
        check_index(j, self.n2)?;
        check_index(k, self.n3)?;
        Ok(self
            .field
            .element(self.entries.get(&(i, j, k)).copied().unwrap_or(0)))
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Scalar) -> Result<()> {
        check_index(i, self.n1)?;
        check_index(j, self.n2)?;
        check_index(k, self.n3)?;
        if value.field() != self.field {
            return Err(Error::MixedFields(
                self.field.modulus(),
                value.field().modulus(),
            ));
        }
        if value.is_zero() {
            self.entries.remove(&(i, j, k));
        } else {
            self.entries.insert((i, j, k), value.value());
        }
        Ok(())
    }

    /// Nonzero entries in lexicographic index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, Scalar)> + '_ {
        self.entries
            .iter()
            .map(move |(&(i, j, k), &v)| (i, j, k, self.field.element(v)))
    }

    /// The k-th slice: the n1 x n2 matrix B with B[i][j] = T[i, j, k].
    pub fn slice(&self, k: usize) -> Result<MatF> {
        check_index(k, self.n3)?;
        let mut m = MatF::zero(self.n1, self.n2, self.field);
        for (&(i, j, kk), &v) in &self.entries {
            if kk == k {
                m.set_raw(i - 1, j - 1, v);
            }
        }
        Ok(m)
    }

    /// Concatenation along the third axis: the slices of `self` followed by
    /// the slices of `other`.
    pub fn concat(&self, other: &Tensor3) -> Result<Tensor3> {
        if self.field != other.field {
            return Err(Error::MixedFields(
                self.field.modulus(),
                other.field.modulus(),
            ));
        }
        if self.n1 != other.n1 || self.n2 != other.n2 {
            return Err(Error::DimensionMismatch(format!(
                "concat: {}x{} vs {}x{} slices",
                self.n1, self.n2, other.n1, other.n2
            )));
        }
        let mut t = Tensor3::zero(self.n1, self.n2, self.n3 + other.n3, self.field);
        t.entries.extend(self.entries.iter());
        t.entries.extend(
            other
                .entries
                .iter()
                .map(|(&(i, j, k), &v)| ((i, j, k + self.n3), v)),
        );
        Ok(t)
    }

    /// Spatial 2x2 block arrangement of four equal-depth tensors: every
    /// slice of the result is the 2x2 block matrix of the corresponding
    /// slices.
    pub fn block2x2(tl: &Tensor3, tr: &Tensor3, bl: &Tensor3, br: &Tensor3) -> Result<Tensor3> {
        let field = tl.field;
        for t in [tr, bl, br] {
            if t.field != field {
                return Err(Error::MixedFields(field.modulus(), t.field.modulus()));
            }
            if t.n3 != tl.n3 {
                return Err(Error::DimensionMismatch(format!(
                    "block2x2: depths differ ({} vs {})",
                    tl.n3, t.n3
                )));
            }
        }
        if tl.n1 != tr.n1 || bl.n1 != br.n1 || tl.n2 != bl.n2 || tr.n2 != br.n2 {
            return Err(Error::DimensionMismatch(
                "block2x2: block sides do not line up".into(),
            ));
        }
        let (row_off, col_off) = (tl.n1, tl.n2);
        let mut out = Tensor3::zero(tl.n1 + bl.n1, tl.n2 + tr.n2, tl.n3, field);
        out.entries.extend(tl.entries.iter());
        out.entries.extend(
            tr.entries
                .iter()
                .map(|(&(i, j, k), &v)| ((i, j + col_off, k), v)),
        );
        out.entries.extend(
            bl.entries
                .iter()
                .map(|(&(i, j, k), &v)| ((i + row_off, j, k), v)),
        );
        out.entries.extend(
            br.entries
                .iter()
                .map(|(&(i, j, k), &v)| ((i + row_off, j + col_off, k), v)),
        );
        Ok(out)
    }

    /// Mode-m matricization. Rows are indexed by mode `mode`; columns by the
    /// remaining two modes in row-major order (smaller mode major).
    pub fn flatten(&self, mode: usize) -> Result<MatF> {
        let (rows, cols) = match mode {
            1 => (self.n1, self.n2 * self.n3),
            2 => (self.n2, self.n1 * self.n3),
            3 => (self.n3, self.n1 * self.n2),
            _ => {
                return Err(Error::InvalidParams(format!(
                    "flatten: mode {mode} is not 1, 2, or 3"
                )));
            }
        };
        let mut m = MatF::zero(rows, cols, self.field);
        for (&(i, j, k), &v) in &self.entries {
            let (r, c) = match mode {
                1 => (i - 1, (j - 1) * self.n3 + (k - 1)),
                2 => (j - 1, (i - 1) * self.n3 + (k - 1)),
                _ => (k - 1, (i - 1) * self.n2 + (j - 1)),
            };
            m.set_raw(r, c, v);
        }
        Ok(m)
    }
}

/// One simple (rank-1) term: the outer product a (x) b (x) c, held as raw
/// reduced coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankOneTerm {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
}

/// A rank-r witness: r simple terms whose sum reproduces a tensor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decomposition {
    field: FieldSpec,
    terms: Vec<RankOneTerm>,
}

impl Decomposition {
    /// An empty witness (for the zero tensor).
    pub fn empty(field: FieldSpec) -> Self {
        Decomposition {
            field,
            terms: Vec::new(),
        }
    }

    /// Validates that all terms have consistent factor lengths, reduced
    /// values, and no zero factor (a zero factor makes the term the zero
    /// tensor, which contributes nothing).
    pub fn new(field: FieldSpec, terms: Vec<RankOneTerm>) -> Result<Self> {
        let p = field.modulus();
        if let Some(first) = terms.first() {
            let shape = (first.a.len(), first.b.len(), first.c.len());
            for (idx, t) in terms.iter().enumerate() {
                if (t.a.len(), t.b.len(), t.c.len()) != shape {
                    return Err(Error::DimensionMismatch(format!(
                        "term {idx} has mismatched factor lengths"
                    )));
                }
                for v in t.a.iter().chain(&t.b).chain(&t.c) {
                    if *v >= p {
                        return Err(Error::InvalidParams(format!(
                            "term {idx} holds an unreduced value {v} (mod {p})"
                        )));
                    }
                }
                if t.a.iter().all(|&v| v == 0)
                    || t.b.iter().all(|&v| v == 0)
                    || t.c.iter().all(|&v| v == 0)
                {
                    return Err(Error::InvalidWitness(format!(
                        "term {idx} has a zero factor column"
                    )));
                }
            }
        }
        Ok(Decomposition { field, terms })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[RankOneTerm] {
        &self.terms
    }

    /// Sums the outer products into an explicit tensor of the given
    /// dimensions.
    pub fn materialize(&self, n1: usize, n2: usize, n3: usize) -> Result<Tensor3> {
        let f = self.field;
        let mut acc: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
        for (idx, t) in self.terms.iter().enumerate() {
            if t.a.len() != n1 || t.b.len() != n2 || t.c.len() != n3 {
                return Err(Error::DimensionMismatch(format!(
                    "term {idx} does not match dims {n1}x{n2}x{n3}"
                )));
            }
            for (i, &ai) in t.a.iter().enumerate().filter(|(_, &v)| v != 0) {
                for (j, &bj) in t.b.iter().enumerate().filter(|(_, &v)| v != 0) {
                    let ab = f.mul_raw(ai, bj);
                    for (k, &ck) in t.c.iter().enumerate().filter(|(_, &v)| v != 0) {
                        let e = acc.entry((i + 1, j + 1, k + 1)).or_insert(0);
                        *e = f.add_raw(*e, f.mul_raw(ab, ck));
                    }
                }
            }
        }
        acc.retain(|_, v| *v != 0);
        let mut out = Tensor3::zero(n1, n2, n3, f);
        out.entries = acc;
        Ok(out)
    }
}

fn check_index(index: usize, dim: usize) -> Result<()> {
    if index == 0 || index > dim {
        Err(Error::IndexOutOfRange { index, dim })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> FieldSpec {
        FieldSpec::gf2()
    }

    fn e1_cubed() -> Decomposition {
        Decomposition::new(
            gf2(),
            vec![RankOneTerm {
                a: vec![1, 0],
                b: vec![1, 0],
                c: vec![1, 0],
            }],
        )
        .unwrap()
    }

    #[test]
    fn slice_of_identity_tensor() {
        let t = Tensor3::identity_slice(3, gf2());
        assert_eq!(t.slice(1).unwrap(), MatF::identity(3, gf2()));
    }

    #[test]
    fn slice_of_zero_tensor() {
        let t = Tensor3::zero(2, 2, 2, gf2());
        assert_eq!(t.slice(2).unwrap(), MatF::zero(2, 2, gf2()));
        assert!(t.slice(3).is_err());
    }

    #[test]
    fn concat_keeps_slice_order() {
        let a = Tensor3::identity_slice(2, gf2());
        let z = Tensor3::zero(2, 2, 1, gf2());
        let c = a.concat(&z).unwrap();
        assert_eq!(c.dims(), (2, 2, 2));
        assert_eq!(c.slice(1).unwrap(), MatF::identity(2, gf2()));
        assert_eq!(c.slice(2).unwrap(), MatF::zero(2, 2, gf2()));
    }

    #[test]
    fn concat_slices_and_nnz_are_definitional() {
        let a = Tensor3::from_entries(2, 2, 2, gf2(), [(1, 1, 1, 1), (2, 1, 2, 1)]).unwrap();
        let b = Tensor3::from_entries(2, 2, 3, gf2(), [(1, 2, 1, 1), (2, 2, 3, 1)]).unwrap();
        let ab = a.concat(&b).unwrap();
        assert_eq!(ab.nnz(), a.nnz() + b.nnz());
        for j in 1..=b.n3() {
            assert_eq!(ab.slice(a.n3() + j).unwrap(), b.slice(j).unwrap());
        }
        for i in 1..=a.n3() {
            assert_eq!(ab.slice(i).unwrap(), a.slice(i).unwrap());
        }
    }

    #[test]
    fn concat_rejects_mismatches() {
        let a = Tensor3::zero(2, 2, 1, gf2());
        let b = Tensor3::zero(3, 2, 1, gf2());
        assert!(a.concat(&b).is_err());
        let c = Tensor3::zero(2, 2, 1, FieldSpec::new(3).unwrap());
        assert!(a.concat(&c).is_err());
    }

    #[test]
    fn block2x2_of_unit_blocks_is_identity_tensor() {
        let one = Tensor3::identity_slice(1, gf2());
        let z = Tensor3::zero(1, 1, 1, gf2());
        let t = Tensor3::block2x2(&one, &z, &z, &one).unwrap();
        assert_eq!(t, Tensor3::identity_slice(2, gf2()));
    }

    #[test]
    fn block2x2_of_zero_blocks_is_zero() {
        let z = Tensor3::zero(1, 2, 3, gf2());
        let t = Tensor3::block2x2(&z, &z, &z, &z).unwrap();
        assert_eq!(t, Tensor3::zero(2, 4, 3, gf2()));
    }

    #[test]
    fn flatten_of_simple_tensor() {
        let t = e1_cubed().materialize(2, 2, 2).unwrap();
        let m = t.flatten(1).unwrap();
        assert_eq!(m.get(0, 0).value(), 1);
        assert_eq!(
            (0..2)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .filter(|&(i, j)| m.get(i, j).value() != 0)
                .count(),
            1
        );
        for mode in 1..=3 {
            assert!(Tensor3::zero(2, 3, 4, gf2()).flatten(mode).unwrap().is_zero());
        }
    }

    #[test]
    fn materialize_empty_and_single() {
        let z = Decomposition::empty(gf2()).materialize(2, 3, 4).unwrap();
        assert!(z.is_zero());
        let t = e1_cubed().materialize(2, 2, 2).unwrap();
        assert_eq!(t.nnz(), 1);
        assert_eq!(t.get(1, 1, 1).unwrap().value(), 1);
    }

    #[test]
    fn zero_factor_columns_are_rejected() {
        let bad = Decomposition::new(
            gf2(),
            vec![RankOneTerm {
                a: vec![0, 0],
                b: vec![1, 0],
                c: vec![1, 0],
            }],
        );
        assert!(matches!(bad, Err(Error::InvalidWitness(_))));
    }

    #[test]
    fn from_entries_validates() {
        assert!(Tensor3::from_entries(2, 2, 2, gf2(), [(3, 1, 1, 1)]).is_err());
        assert!(Tensor3::from_entries(2, 2, 2, gf2(), [(1, 1, 1, 1), (1, 1, 1, 1)]).is_err());
        // A value reducing to zero is dropped rather than stored.
        let t = Tensor3::from_entries(2, 2, 2, gf2(), [(1, 1, 1, 2)]).unwrap();
        assert_eq!(t.nnz(), 0);
    }

    #[test]
    fn split_and_reconcat_round_trips() {
        let t = Tensor3::from_entries(
            2,
            3,
            4,
            gf2(),
            [(1, 1, 1, 1), (2, 3, 2, 1), (1, 2, 3, 1), (2, 2, 4, 1)],
        )
        .unwrap();
        let front: Vec<_> = (1..=2).map(|k| t.slice(k).unwrap()).collect();
        let back: Vec<_> = (3..=4).map(|k| t.slice(k).unwrap()).collect();
        let rejoined = Tensor3::from_slices(&front)
            .unwrap()
            .concat(&Tensor3::from_slices(&back).unwrap())
            .unwrap();
        assert_eq!(rejoined, t);
    }
}
