//! Machine-checked tensor rank lower bounds.
//!
//! Three bound producers live here, in increasing strength:
//!
//! * [`flattening_bound`] — the baseline: tensor rank is at least the
//!   matrix rank of any mode flattening.
//! * [`partition_bound`] — the Brockett–Dobkin partition cases for a
//!   characteristic matrix split into blocks that do not overlap too much.
//!   Pure arithmetic over caller-verified hypotheses; refuses to produce a
//!   bound if any hypothesis verdict is false.
//! * [`block_bound`] — the derived rule for the four-block tensor
//!   M = [[AE, 0B], [0C, 00]]: R[M] >= R[A] + column rank B(t) +
//!   row rank C(t). The block E participates in the layout but not in the
//!   bound; it is accepted and shape-checked, nothing more.
//!
//! [`certificate`] replays the block rule along the recursive family with
//! A = B = C = A^(i) and E = 0, checking every hypothesis and the block
//! layout itself at every level, and accumulates the telescoping bound
//! R[A^(l)] >= 2 n^k - n^{k-1}.

use serde::{Deserialize, Serialize};

use crate::charmat::{is_nondegenerate_with, CharMatrix, NondegeneracyReport, RankPath};
use crate::construction::{all_levels, ConstructionParams};
use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// A lower bound on tensor rank together with how it was obtained.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: usize,
    pub provenance: Provenance,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Provenance {
    /// Max of the three mode-flattening matrix ranks.
    Flattening { mode_ranks: [usize; 3] },
    /// Exact matrix rank of a single-slice tensor (depth 1).
    ExactMatrixRank,
    /// One of the partition cases, with the operands that entered the max.
    Partition { case: PartitionCase },
    /// The block rule: r_a + b_col_rank + c_row_rank.
    Block {
        r_a: usize,
        b_col_rank: usize,
        c_row_rank: usize,
    },
    /// The telescoped per-level certificate for the recursive family.
    Certificate { n: usize, k: u32 },
    /// Supplied by the caller (e.g. a known rank used as a bound).
    Assumed,
}

/// The three partition cases. Operands are the already-verified rank
/// quantities of the participating blocks; which ones each case consumes
/// follows its shape.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum PartitionCase {
    /// G = [[G1, 0], [G2, G3]]:
    /// R[G] >= max(R[G1] + col rank G3, R[G3] + row rank G1).
    BlockTriangular {
        r_g1: usize,
        g1_row_rank: usize,
        r_g3: usize,
        g3_col_rank: usize,
    },
    /// G = [G1(s) + G2(t) | G3(t)]:
    /// R[G] >= max(R[G1] + col rank G3, R[G3] + dim s).
    AdjoinedColumns {
        r_g1: usize,
        r_g3: usize,
        g3_col_rank: usize,
        dim_s: usize,
    },
    /// G = [G1(s) + G2(t); G3(t)] (stacked):
    /// R[G] >= max(R[G1] + row rank G3, R[G3] + dim s).
    AdjoinedRows {
        r_g1: usize,
        r_g3: usize,
        g3_row_rank: usize,
        dim_s: usize,
    },
}

impl PartitionCase {
    fn branches(&self) -> (usize, usize) {
        match *self {
            PartitionCase::BlockTriangular {
                r_g1,
                g1_row_rank,
                r_g3,
                g3_col_rank,
            } => (r_g1 + g3_col_rank, r_g3 + g1_row_rank),
            PartitionCase::AdjoinedColumns {
                r_g1,
                r_g3,
                g3_col_rank,
                dim_s,
            } => (r_g1 + g3_col_rank, r_g3 + dim_s),
            PartitionCase::AdjoinedRows {
                r_g1,
                r_g3,
                g3_row_rank,
                dim_s,
            } => (r_g1 + g3_row_rank, r_g3 + dim_s),
        }
    }
}

/// Baseline bound: the best of the three flattening ranks.
pub fn flattening_bound(t: &Tensor3) -> LowerBound {
    let mode_ranks = [
        t.flatten(1).expect("mode 1").rank(),
        t.flatten(2).expect("mode 2").rank(),
        t.flatten(3).expect("mode 3").rank(),
    ];
    LowerBound {
        value: mode_ranks.into_iter().max().unwrap_or(0),
        provenance: Provenance::Flattening { mode_ranks },
    }
}

/// Applies one partition case to caller-supplied, already-verified
/// quantities. All three participating blocks must be nondegenerate; a
/// false verdict refuses the bound rather than producing an unsound one.
pub fn partition_bound(
    case: PartitionCase,
    g1: &NondegeneracyReport,
    g2: &NondegeneracyReport,
    g3: &NondegeneracyReport,
) -> Result<LowerBound> {
    if !g1.nondegenerate() {
        return Err(Error::DegenerateInput("G1"));
    }
    if !g2.nondegenerate() {
        return Err(Error::DegenerateInput("G2"));
    }
    if !g3.nondegenerate() {
        return Err(Error::DegenerateInput("G3"));
    }
    let (first, second) = case.branches();
    Ok(LowerBound {
        value: first.max(second),
        provenance: Provenance::Partition { case },
    })
}

fn check_block_dims(a: &Tensor3, b: &Tensor3, c: &Tensor3, e: &Tensor3) -> Result<()> {
    let (m, n, p) = a.dims();
    let (bm, _, bp) = b.dims();
    let (_, cn, cp) = c.dims();
    if bm != m {
        return Err(Error::DimensionMismatch(format!(
            "block: B has {bm} rows, A has {m}"
        )));
    }
    if cn != n {
        return Err(Error::DimensionMismatch(format!(
            "block: C has {cn} columns, A has {n}"
        )));
    }
    if cp != bp {
        return Err(Error::DimensionMismatch(format!(
            "block: B depth {bp} and C depth {cp} differ"
        )));
    }
    if e.dims() != (m, n, bp) {
        return Err(Error::DimensionMismatch(format!(
            "block: E is {:?}, expected {:?}",
            e.dims(),
            (m, n, bp)
        )));
    }
    let _ = p;
    Ok(())
}

/// Assembles M = [[AE, 0B], [0C, 00]] explicitly (concatenation along the
/// third axis inside each block, then the 2x2 spatial arrangement).
pub fn assemble_block(a: &Tensor3, b: &Tensor3, c: &Tensor3, e: &Tensor3) -> Result<Tensor3> {
    check_block_dims(a, b, c, e)?;
    let field = a.field();
    let (m, n, p) = a.dims();
    let (_, bn, bp) = b.dims();
    let (cm, ..) = c.dims();
    let tl = a.concat(e)?;
    let tr = Tensor3::zero(m, bn, p, field).concat(b)?;
    let bl = Tensor3::zero(cm, n, p, field).concat(c)?;
    let br = Tensor3::zero(cm, bn, p + bp, field);
    Tensor3::block2x2(&tl, &tr, &bl, &br)
}

/// The block rule. Checks the shape constraints and the nondegeneracy of
/// A, B, and C (computed here, not assumed), then returns
/// `r_a + column rank B(t) + row rank C(t)`. The value is a valid bound for
/// the assembled M whatever E is; E enters shape checks only.
pub fn block_bound(
    a: &Tensor3,
    b: &Tensor3,
    c: &Tensor3,
    e: &Tensor3,
    r_a: &LowerBound,
) -> Result<LowerBound> {
    check_block_dims(a, b, c, e)?;
    if !is_nondegenerate_with(a, RankPath::Exact).nondegenerate() {
        return Err(Error::DegenerateInput("A"));
    }
    if !is_nondegenerate_with(b, RankPath::Exact).nondegenerate() {
        return Err(Error::DegenerateInput("B"));
    }
    if !is_nondegenerate_with(c, RankPath::Exact).nondegenerate() {
        return Err(Error::DegenerateInput("C"));
    }
    let b_col_rank = CharMatrix::new(b).col_rank();
    let c_row_rank = CharMatrix::new(c).row_rank();
    Ok(LowerBound {
        value: r_a.value + b_col_rank + c_row_rank,
        provenance: Provenance::Block {
            r_a: r_a.value,
            b_col_rank,
            c_row_rank,
        },
    })
}

/// Which rank path a certificate level actually ran.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankPathUsed {
    Exact,
    Randomized,
}

/// One level of the certificate ledger.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: u32,
    pub dims: [usize; 3],
    pub row_rank: usize,
    pub col_rank: usize,
    pub nondegeneracy: NondegeneracyReport,
    /// row_rank + col_rank, the amount the next level adds; absent on the
    /// final level.
    pub increment: Option<usize>,
    /// The bound established for this level's tensor.
    pub cumulative_bound: usize,
    pub rank_path: RankPathUsed,
}

/// The full per-level ledger culminating in R[A^(l)] >= 2 n^k - n^{k-1}.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub params: CertificateParams,
    pub levels: Vec<LevelRecord>,
    pub final_bound: usize,
    pub valid: bool,
    /// Set when `valid` is false: which level failed which check.
    pub failure: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CertificateParams {
    pub n: usize,
    pub k: u32,
    pub field: crate::field::FieldSpec,
    pub levels: u32,
}

impl Certificate {
    /// The certificate's conclusion as a reusable bound.
    pub fn bound(&self) -> LowerBound {
        LowerBound {
            value: self.final_bound,
            provenance: Provenance::Certificate {
                n: self.params.n,
                k: self.params.k,
            },
        }
    }

    pub fn increments(&self) -> Vec<usize> {
        self.levels.iter().filter_map(|l| l.increment).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CertificateOptions {
    pub seed: u64,
    pub trials: u32,
    /// Levels whose smaller side exceeds this use the randomized rank path
    /// instead of the exact one.
    pub symbolic_threshold: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            seed: 0,
            trials: crate::charmat::DEFAULT_TRIALS,
            symbolic_threshold: 64,
        }
    }
}

pub fn certificate(params: &ConstructionParams) -> Result<Certificate> {
    certificate_with(params, &CertificateOptions::default())
}

/// Runs the recursion, and at each level: verifies nondegeneracy (the
/// block rule's hypotheses for A = B = C = A^(i)), verifies the row and
/// column ranks against the expected 2^i n^{k-1}, re-assembles the block
/// layout and compares it against the next level, and accumulates the
/// bound. Any failed check marks the certificate invalid and identifies
/// the level; it does not abort the run with an error.
pub fn certificate_with(
    params: &ConstructionParams,
    opts: &CertificateOptions,
) -> Result<Certificate> {
    let tensors = all_levels(params)?;
    let base_side = params.base_side();
    let last = params.levels() as usize;
    let mut records = Vec::with_capacity(last + 1);
    let mut cumulative = 0usize;
    let mut failure: Option<String> = None;

    for (i, t) in tensors.iter().enumerate() {
        let (n1, n2, n3) = t.dims();
        let path = if n1.min(n2) <= opts.symbolic_threshold {
            RankPath::Exact
        } else {
            RankPath::Randomized {
                seed: opts.seed,
                trials: opts.trials,
            }
        };
        let report = is_nondegenerate_with(t, path);
        let cm = CharMatrix::new(t);
        let row_rank = cm.row_rank_with(path);
        let col_rank = cm.col_rank_with(path);
        let expected = (1usize << i) * base_side;

        if i == 0 {
            // Base case: a single-slice tensor's rank is its matrix rank,
            // and the slice is an identity.
            cumulative = t.slice(1)?.rank();
        }

        let mut check = |ok: bool, what: &str| {
            if !ok && failure.is_none() {
                failure = Some(format!("level {i}: {what}"));
            }
        };
        check(
            (n1, n2, n3) == (expected, expected, 1 << i),
            "unexpected dimensions",
        );
        check(report.nondegenerate(), "nondegeneracy failed");
        check(
            row_rank == expected,
            &format!("row rank {row_rank}, expected {expected}"),
        );
        check(
            col_rank == expected,
            &format!("column rank {col_rank}, expected {expected}"),
        );
        if i == 0 {
            check(cumulative == base_side, "base slice rank != n^(k-1)");
        }
        if i < last {
            // Replay the block layout: the next level must be exactly
            // M = [[A 0, 0 A], [0 A, 0 0]] for A = A^(i).
            let e = Tensor3::zero(n1, n2, n3, params.field());
            let assembled = assemble_block(t, t, t, &e)?;
            check(assembled == tensors[i + 1], "block layout mismatch");
        }

        let increment = (i < last).then_some(row_rank + col_rank);
        records.push(LevelRecord {
            level: i as u32,
            dims: [n1, n2, n3],
            row_rank,
            col_rank,
            nondegeneracy: report,
            increment,
            cumulative_bound: cumulative,
            rank_path: match path {
                RankPath::Exact => RankPathUsed::Exact,
                RankPath::Randomized { .. } => RankPathUsed::Randomized,
            },
        });
        if failure.is_some() {
            break;
        }
        cumulative += increment.unwrap_or(0);
    }

    let final_bound = records.last().map_or(0, |r| r.cumulative_bound);
    if failure.is_none() {
        let expected_final = 2 * params.side() - base_side;
        if final_bound != expected_final {
            failure = Some(format!(
                "final bound {final_bound} != 2 n^k - n^(k-1) = {expected_final}"
            ));
        }
    }

    Ok(Certificate {
        params: CertificateParams {
            n: params.n(),
            k: params.k(),
            field: params.field(),
            levels: params.levels(),
        },
        levels: records,
        final_bound,
        valid: failure.is_none(),
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charmat::is_nondegenerate;
    use crate::construction::{build, level_step};
    use crate::field::FieldSpec;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn gf2() -> FieldSpec {
        FieldSpec::gf2()
    }

    fn assumed(value: usize) -> LowerBound {
        LowerBound {
            value,
            provenance: Provenance::Assumed,
        }
    }

    fn level1() -> Tensor3 {
        level_step(&Tensor3::identity_slice(1, gf2())).unwrap()
    }

    #[test]
    fn flattening_bound_examples() {
        assert_eq!(flattening_bound(&Tensor3::zero(2, 3, 4, gf2())).value, 0);
        assert_eq!(flattening_bound(&Tensor3::identity_slice(5, gf2())).value, 5);
        let lb = flattening_bound(&level1());
        assert_eq!(lb.value, 2);
        assert_eq!(
            lb.provenance,
            Provenance::Flattening {
                mode_ranks: [2, 2, 2]
            }
        );
    }

    fn all_good() -> NondegeneracyReport {
        is_nondegenerate(&Tensor3::identity_slice(1, gf2()))
    }

    fn degenerate() -> NondegeneracyReport {
        is_nondegenerate(&Tensor3::zero(1, 1, 1, gf2()))
    }

    #[test]
    fn partition_adjoined_columns_example() {
        let lb = partition_bound(
            PartitionCase::AdjoinedColumns {
                r_g1: 1,
                r_g3: 2,
                g3_col_rank: 2,
                dim_s: 1,
            },
            &all_good(),
            &all_good(),
            &all_good(),
        )
        .unwrap();
        assert_eq!(lb.value, 3); // max(1 + 2, 2 + 1)
    }

    #[test]
    fn partition_refuses_degenerate_hypotheses() {
        let err = partition_bound(
            PartitionCase::BlockTriangular {
                r_g1: 4,
                g1_row_rank: 4,
                r_g3: 0,
                g3_col_rank: 0,
            },
            &all_good(),
            &all_good(),
            &degenerate(),
        );
        assert_eq!(err, Err(Error::DegenerateInput("G3")));
        let err2 = partition_bound(
            PartitionCase::AdjoinedRows {
                r_g1: 1,
                r_g3: 1,
                g3_row_rank: 1,
                dim_s: 1,
            },
            &degenerate(),
            &all_good(),
            &all_good(),
        );
        assert_eq!(err2, Err(Error::DegenerateInput("G1")));
    }

    #[test]
    fn partition_row_case_mirrors_column_case() {
        let cols = partition_bound(
            PartitionCase::AdjoinedColumns {
                r_g1: 2,
                r_g3: 3,
                g3_col_rank: 4,
                dim_s: 5,
            },
            &all_good(),
            &all_good(),
            &all_good(),
        )
        .unwrap();
        let rows = partition_bound(
            PartitionCase::AdjoinedRows {
                r_g1: 2,
                r_g3: 3,
                g3_row_rank: 4,
                dim_s: 5,
            },
            &all_good(),
            &all_good(),
            &all_good(),
        )
        .unwrap();
        assert_eq!(cols.value, rows.value);
    }

    #[test]
    fn block_bound_unit_case() {
        let unit = Tensor3::identity_slice(1, gf2());
        let e = Tensor3::zero(1, 1, 1, gf2());
        let lb = block_bound(&unit, &unit, &unit, &e, &assumed(1)).unwrap();
        assert_eq!(lb.value, 3);
        // The assembled tensor is exactly one recursion step.
        let m = assemble_block(&unit, &unit, &unit, &e).unwrap();
        assert_eq!(m, level_step(&unit).unwrap());
    }

    #[test]
    fn block_bound_level_one_case() {
        let a = level1();
        let e = Tensor3::zero(2, 2, 2, gf2());
        let lb = block_bound(&a, &a, &a, &e, &assumed(3)).unwrap();
        assert_eq!(lb.value, 7); // 3 + 2 + 2
    }

    #[test]
    fn block_bound_rejects_degenerate_blocks() {
        let a = level1();
        let zero = Tensor3::zero(2, 2, 2, gf2());
        let err = block_bound(&a, &zero, &a, &zero, &assumed(3));
        assert_eq!(err, Err(Error::DegenerateInput("B")));
    }

    #[test]
    fn block_bound_rejects_bad_shapes() {
        let a = level1();
        let b = Tensor3::identity_slice(3, gf2()); // wrong row count
        let e = Tensor3::zero(2, 2, 1, gf2());
        assert!(matches!(
            block_bound(&a, &b, &a, &e, &assumed(1)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn block_bound_ignores_e_content() {
        let mut rng = StdRng::seed_from_u64(9);
        let a = level1();
        let reference = {
            let e = Tensor3::zero(2, 2, 2, gf2());
            block_bound(&a, &a, &a, &e, &assumed(3)).unwrap().value
        };
        for _ in 0..5 {
            let mut e = Tensor3::zero(2, 2, 2, gf2());
            for i in 1..=2 {
                for j in 1..=2 {
                    for k in 1..=2 {
                        e.set(i, j, k, gf2().element(rng.gen_range(0..2))).unwrap();
                    }
                }
            }
            let lb = block_bound(&a, &a, &a, &e, &assumed(3)).unwrap();
            assert_eq!(lb.value, reference);
            // The assembled M differs with E, the bound does not.
            assert!(assemble_block(&a, &a, &a, &e).is_ok());
        }
    }

    fn cert(n: usize, k: u32) -> Certificate {
        let p = ConstructionParams::new(n, k, gf2()).unwrap();
        certificate(&p).unwrap()
    }

    #[test]
    fn certificate_small_instances() {
        let c = cert(2, 1);
        assert!(c.valid, "{:?}", c.failure);
        assert_eq!(c.final_bound, 3);
        assert_eq!(c.increments(), vec![2]);

        let c = cert(4, 1);
        assert!(c.valid);
        assert_eq!(c.final_bound, 7);
        assert_eq!(c.increments(), vec![2, 4]);

        let c = cert(2, 2);
        assert!(c.valid);
        assert_eq!(c.final_bound, 6);
        assert_eq!(c.increments(), vec![4]);
    }

    #[test]
    fn certificate_matches_closed_form() {
        for (n, k) in [(2usize, 1u32), (2, 2), (4, 1), (4, 2), (8, 1)] {
            let c = cert(n, k);
            assert!(c.valid, "n={n} k={k}: {:?}", c.failure);
            let side = n.pow(k);
            let base = n.pow(k - 1);
            assert_eq!(c.final_bound, 2 * side - base);
            for (i, lvl) in c.levels.iter().enumerate() {
                if let Some(inc) = lvl.increment {
                    assert_eq!(inc, (1 << (i + 1)) * base);
                }
                assert!(lvl.nondegeneracy.nondegenerate());
            }
        }
    }

    #[test]
    fn certificate_levels_match_block_bound() {
        let p = ConstructionParams::new(4, 1, gf2()).unwrap();
        let c = certificate(&p).unwrap();
        let tensors = all_levels(&p).unwrap();
        let mut bound = assumed(c.levels[0].cumulative_bound);
        for i in 0..tensors.len() - 1 {
            let t = &tensors[i];
            let e = Tensor3::zero(t.n1(), t.n2(), t.n3(), gf2());
            bound = block_bound(t, t, t, &e, &bound).unwrap();
            assert_eq!(bound.value, c.levels[i + 1].cumulative_bound);
        }
        assert_eq!(bound.value, c.final_bound);
    }

    #[test]
    fn certificate_bound_never_exceeds_flattening_under() {
        // Certified bound dominates the baseline on the family itself.
        for (n, k) in [(2usize, 1u32), (4, 1), (2, 2)] {
            let p = ConstructionParams::new(n, k, gf2()).unwrap();
            let c = certificate(&p).unwrap();
            let t = build(&p).unwrap();
            assert!(flattening_bound(&t).value <= c.final_bound);
        }
    }

    #[test]
    fn certificate_serializes_with_integer_counts_and_valid_flag() {
        let c = cert(2, 1);
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["valid"], serde_json::Value::Bool(true));
        assert_eq!(json["final_bound"], serde_json::json!(3));
        assert_eq!(json["params"]["field"], serde_json::json!(2));
        assert_eq!(json["levels"][0]["increment"], serde_json::json!(2));
        assert!(json["levels"][1]["increment"].is_null());
        let back: Certificate = serde_json::from_value(json).unwrap();
        assert_eq!(back, c);
    }
}
