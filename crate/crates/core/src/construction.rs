//! The recursive block family A^(0), ..., A^(l).
//!
//! Start from A^(0) = I_{n^{k-1}} (an n^{k-1} x n^{k-1} x 1 tensor) and at
//! every step place three shifted copies of the previous tensor into a 2x2
//! spatial block with doubled depth:
//!
//! ```text
//!   A^(i+1) = | A^(i) 0    0 A^(i) |
//!             | 0 A^(i)    0  0    |
//! ```
//!
//! where juxtaposition is concatenation along the third axis. After
//! l = log2(n) steps the result is an n^k x n^k x n tensor with 3^l n^{k-1}
//! nonzero entries, all of them 1 regardless of the configured field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::tensor::Tensor3;

/// Parameters of the family: side base n (a power of two), exponent k, and
/// the field the entries live in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ConstructionParams {
    n: usize,
    k: u32,
    field: FieldSpec,
    levels: u32,
    #[serde(default = "default_volume_cap")]
    volume_cap: u128,
}

fn default_volume_cap() -> u128 {
    ConstructionParams::DEFAULT_VOLUME_CAP
}

impl ConstructionParams {
    /// Default cap on the nominal slice volume n^k * n^k. The tensors are
    /// sparse, but index arithmetic and the rank checks downstream stop
    /// being desk-scale long before this.
    pub const DEFAULT_VOLUME_CAP: u128 = 1 << 26;

    pub fn new(n: usize, k: u32, field: FieldSpec) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "n must be a power of two >= 2, got {n}"
            )));
        }
        if k < 1 {
            return Err(Error::InvalidParams("k must be >= 1".into()));
        }
        let params = ConstructionParams {
            n,
            k,
            field,
            levels: n.trailing_zeros(),
            volume_cap: Self::DEFAULT_VOLUME_CAP,
        };
        params.check_volume()?;
        Ok(params)
    }

    /// Replaces the volume guard, re-validating against the new cap.
    pub fn with_volume_cap(mut self, cap: u128) -> Result<Self> {
        self.volume_cap = cap;
        self.check_volume()?;
        Ok(self)
    }

    fn check_volume(&self) -> Result<()> {
        let side = (self.n as u128).checked_pow(self.k).ok_or_else(|| {
            Error::InvalidParams(format!("n^k overflows for n={}, k={}", self.n, self.k))
        })?;
        let volume = side * side;
        if volume > self.volume_cap {
            return Err(Error::VolumeCap {
                volume,
                cap: self.volume_cap,
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    /// l = log2(n), the number of recursion steps.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// n^k, the final side length.
    pub fn side(&self) -> usize {
        self.n.pow(self.k)
    }

    /// n^{k-1}, the side length of the base identity.
    pub fn base_side(&self) -> usize {
        self.n.pow(self.k - 1)
    }
}

/// A^(0) = I_{n^{k-1}} as an n^{k-1} x n^{k-1} x 1 tensor.
pub fn level_zero(params: &ConstructionParams) -> Tensor3 {
    Tensor3::identity_slice(params.base_side(), params.field())
}

/// One recursion step. Requires the input to be square in its first two
/// modes; dims go (m, m, p) -> (2m, 2m, 2p) and the nonzero count triples.
pub fn level_step(a: &Tensor3) -> Result<Tensor3> {
    let (n1, n2, n3) = a.dims();
    if n1 != n2 {
        return Err(Error::DimensionMismatch(format!(
            "level_step needs a square tensor, got {n1}x{n2}"
        )));
    }
    let zero = Tensor3::zero(n1, n2, n3, a.field());
    let tl = a.concat(&zero)?;
    let tr = zero.concat(a)?;
    let bl = zero.concat(a)?;
    let br = Tensor3::zero(n1, n2, 2 * n3, a.field());
    Tensor3::block2x2(&tl, &tr, &bl, &br)
}

/// All levels A^(0), ..., A^(l) in order.
pub fn all_levels(params: &ConstructionParams) -> Result<Vec<Tensor3>> {
    let mut levels = Vec::with_capacity(params.levels() as usize + 1);
    levels.push(level_zero(params));
    for _ in 0..params.levels() {
        let next = level_step(levels.last().expect("nonempty"))?;
        levels.push(next);
    }
    Ok(levels)
}

/// The final n^k x n^k x n tensor of the family.
pub fn build(params: &ConstructionParams) -> Result<Tensor3> {
    let mut t = level_zero(params);
    for _ in 0..params.levels() {
        t = level_step(&t)?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charmat::{is_nondegenerate, CharMatrix};
    use crate::mat::MatF;

    fn gf2() -> FieldSpec {
        FieldSpec::gf2()
    }

    fn params(n: usize, k: u32) -> ConstructionParams {
        ConstructionParams::new(n, k, gf2()).unwrap()
    }

    #[test]
    fn rejects_non_powers_of_two() {
        assert!(ConstructionParams::new(3, 1, gf2()).is_err());
        assert!(ConstructionParams::new(1, 1, gf2()).is_err());
        assert!(ConstructionParams::new(6, 2, gf2()).is_err());
        assert!(ConstructionParams::new(2, 0, gf2()).is_err());
    }

    #[test]
    fn volume_cap_guards_large_requests() {
        let err = ConstructionParams::new(1 << 14, 2, gf2());
        assert!(matches!(err, Err(Error::VolumeCap { .. })));
        // Raising the cap admits it; shrinking the cap rejects a small one.
        assert!(params(2, 1).with_volume_cap(1).is_err());
    }

    #[test]
    fn level_zero_is_identity() {
        assert_eq!(level_zero(&params(2, 1)).dims(), (1, 1, 1));
        let t = level_zero(&params(2, 2));
        assert_eq!(t.dims(), (2, 2, 1));
        assert_eq!(t.slice(1).unwrap(), MatF::identity(2, gf2()));
        assert_eq!(t.nnz(), 2);
    }

    #[test]
    fn one_step_from_the_unit_tensor() {
        let t = level_step(&Tensor3::identity_slice(1, gf2())).unwrap();
        assert_eq!(t.dims(), (2, 2, 2));
        assert_eq!(
            t.slice(1).unwrap(),
            MatF::from_rows(gf2(), &[[1u64, 0], [0, 0]]).unwrap()
        );
        assert_eq!(
            t.slice(2).unwrap(),
            MatF::from_rows(gf2(), &[[0u64, 1], [1, 0]]).unwrap()
        );
    }

    #[test]
    fn step_triples_nnz_and_doubles_dims() {
        let mut t = level_zero(&params(4, 2));
        for _ in 0..2 {
            let next = level_step(&t).unwrap();
            let (n1, n2, n3) = t.dims();
            assert_eq!(next.dims(), (2 * n1, 2 * n2, 2 * n3));
            assert_eq!(next.nnz(), 3 * t.nnz());
            t = next;
        }
    }

    #[test]
    fn final_dims_and_nnz() {
        for (n, k, nnz) in [(2usize, 1u32, 3usize), (4, 1, 9), (2, 2, 6), (8, 1, 27)] {
            let p = params(n, k);
            let t = build(&p).unwrap();
            assert_eq!(t.dims(), (p.side(), p.side(), n));
            assert_eq!(t.nnz(), nnz);
            assert_eq!(nnz, 3usize.pow(p.levels()) * p.base_side());
        }
    }

    #[test]
    fn entries_are_zero_one_in_any_field() {
        let gf5 = FieldSpec::new(5).unwrap();
        let t = build(&ConstructionParams::new(4, 1, gf5).unwrap()).unwrap();
        assert!(t.entries().all(|(_, _, _, v)| v.value() == 1));
    }

    #[test]
    fn every_level_is_nondegenerate_with_expected_ranks() {
        for (n, k) in [(2usize, 1u32), (4, 1), (2, 2)] {
            let p = params(n, k);
            for (i, level) in all_levels(&p).unwrap().iter().enumerate() {
                let expected = (1usize << i) * p.base_side();
                assert!(is_nondegenerate(level).nondegenerate(), "n={n} k={k} i={i}");
                let cm = CharMatrix::new(level);
                assert_eq!(cm.row_rank(), expected);
                assert_eq!(cm.col_rank(), expected);
            }
        }
    }

    #[test]
    fn slice_power_of_two_has_full_rank() {
        // Slice 2^i of A^(i) is the full-rank slice the nondegeneracy
        // induction leans on.
        let p = params(4, 1);
        for (i, level) in all_levels(&p).unwrap().iter().enumerate() {
            let s = level.slice(1 << i).unwrap();
            assert_eq!(s.rank(), level.n1(), "level {i}");
        }
    }

    #[test]
    fn vanishing_slice_combinations_are_trivial() {
        let t = build(&params(4, 1)).unwrap();
        assert_eq!(t.flatten(3).unwrap().rank(), t.n3());
    }
}
