//! Largest affine spaces of nilpotent matrices of constant rank over small
//! prime fields.
//!
//! Conjugation preserves nilpotency, rank and dimension, so the base point is
//! fixed to a Jordan matrix of each similarity class of rank `r`. For a base
//! `P`, the admissible directions are collected once into a pool of lines
//! (`P + tA` nilpotent of rank `r` for every `t`), and direction subspaces
//! are then enumerated over that pool.

mod dfs;
mod kernel;
mod pool;

use std::sync::atomic::AtomicBool;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::catalog::{conjecture_bound, witness_conjecture};
use crate::error::{Error, Result};
use crate::exactmat::{nullspace, rref_basis, ExactMatrix};
use crate::field::{FieldSpec, Scalar};
use crate::partitions::{partitions_of, Partition};
use crate::reduction::{linear_trace_constraints, rank_tangent_constraints};
use crate::spaces::{
    verify_all_nilpotent_with, verify_constant_rank_with, AffineMatrixSpace, Budget, Strategy,
    VerificationStatus,
};

use kernel::Arith;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Greedy,
}

/// Linear constraints used to shrink the space of candidate directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pruning {
    None,
    /// `tr(P^m A) = 0` for `m < n`; sound when `p >= n + 1`.
    Trace,
    /// The trace constraints plus `w^T A u = 0` for `u` in `ker P`, `w` in
    /// `ker P^T`; the latter are sound when `p >= r + 2`.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchStatus {
    Exhaustive,
    LowerBoundOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: Mode,
    pub pruning: Pruning,
    /// Subspace-search nodes allowed per base point.
    pub max_nodes: u64,
    /// Line representatives examined per base point while building the pool.
    pub max_pool: u64,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    /// Greedy restarts per base point.
    pub restarts: u32,
    /// Record wall time in the report (breaks byte-identical output).
    pub timing: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: Mode::Exhaustive,
            pruning: Pruning::Trace,
            max_nodes: 10_000_000,
            max_pool: 4_000_000_000,
            time_limit: None,
            seed: 0,
            restarts: 16,
            timing: false,
        }
    }
}

/// A base point together with its pool of candidate directions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidatePool {
    pub base: ExactMatrix,
    pub candidates: Vec<ExactMatrix>,
    /// Not every candidate line was examined.
    pub truncated: bool,
    pub enumerated: u64,
    /// Lines excluded up front by the trace constraints.
    pub pruned_by_trace: u64,
    /// Lines inside the trace kernel that fail nilpotency or rank.
    pub pruned_by_rank: u64,
    pub constraints: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub n: usize,
    pub r: usize,
    pub p: u64,
    pub max_dim_found: usize,
    pub witness: AffineMatrixSpace,
    pub status: SearchStatus,
    pub base_points_tried: Vec<Partition>,
    pub nodes_explored: u64,
    pub pruned_by_trace: u64,
    pub pruned_by_rank: u64,
    pub pool_sizes: Vec<usize>,
    pub mode: Mode,
    pub pruning: Pruning,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Partitions of `n` with `n - r` parts, i.e. Jordan types of rank `r`.
pub fn jordan_types(n: usize, r: usize) -> Vec<Partition> {
    partitions_of(n)
        .into_iter()
        .filter(|a| a.len() + r == n)
        .collect()
}

/// Direct sum of shift blocks of the given sizes.
pub fn jordan_matrix(a: &Partition, field: FieldSpec) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(field, a.n(), a.n());
    let mut offset = 0;
    for &k in a.nonzero_parts() {
        for i in 0..k - 1 {
            m.set(offset + i, offset + i + 1, field.one());
        }
        offset += k;
    }
    m
}

/// One Jordan matrix per similarity class of nilpotent `n x n` matrices of rank `r`.
pub fn canonical_bases(n: usize, r: usize, field: FieldSpec) -> Result<Vec<ExactMatrix>> {
    if n == 0 || r >= n {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= r < n, got n = {n}, r = {r}"
        )));
    }
    Ok(jordan_types(n, r)
        .iter()
        .map(|a| jordan_matrix(a, field))
        .collect())
}

fn line_count(p: u64, dim: usize) -> u64 {
    let total = (p as u128).saturating_pow(dim as u32);
    ((total - 1) / (p as u128 - 1)).min(u64::MAX as u128) as u64
}

fn kernel_dim(constraints: &[ExactMatrix], n: usize) -> usize {
    let flat: Vec<Vec<Scalar>> = constraints.iter().map(|c| c.entries().to_vec()).collect();
    n * n - crate::exactmat::vectors_rank(&flat)
}

struct PreparedPool {
    fast: pool::FastPool,
    pruned_by_trace: u64,
    pruned_by_rank: u64,
    constraints: usize,
    warnings: Vec<String>,
}

fn prepare_pool(
    ar: &Arith,
    base: &ExactMatrix,
    r: usize,
    pruning: Pruning,
    limit: u64,
    deadline: Option<Instant>,
) -> Result<PreparedPool> {
    let n = ar.n;
    let p = ar.p as u64;
    let field = base.field();
    let mut warnings = Vec::new();
    let mut trace = Vec::new();
    let mut tangent = Vec::new();
    if pruning != Pruning::None {
        if p > n as u64 {
            trace = linear_trace_constraints(base, n - 1)?;
        } else {
            warnings.push(format!(
                "warning: trace pruning needs p >= n + 1 = {}; disabled for p = {p}",
                n + 1
            ));
        }
    }
    if pruning == Pruning::Full {
        if p >= r as u64 + 2 {
            tangent = rank_tangent_constraints(base)?;
        } else {
            warnings.push(format!(
                "warning: rank-tangent pruning needs p >= r + 2 = {}; disabled for p = {p}",
                r + 2
            ));
        }
    }
    let trace_dim = kernel_dim(&trace, n);
    let all: Vec<ExactMatrix> = trace.iter().chain(&tangent).cloned().collect();
    let basis: Vec<Vec<Scalar>> = if all.is_empty() {
        (0..n * n)
            .map(|i| {
                (0..n * n)
                    .map(|j| if i == j { field.one() } else { field.zero() })
                    .collect()
            })
            .collect()
    } else {
        let rows: Vec<Vec<Scalar>> = all.iter().map(|c| c.entries().to_vec()).collect();
        rref_basis(&nullspace(&ExactMatrix::from_rows(field, rows)?))
    };
    let fast_basis: Vec<kernel::Mat> = basis
        .iter()
        .map(|v| {
            let rows = v.chunks(n).map(|c| c.to_vec()).collect();
            ar.from_exact(&ExactMatrix::from_rows(field, rows).expect("square"))
        })
        .collect();
    let stop = AtomicBool::new(false);
    let fast = pool::build(
        ar,
        &ar.from_exact(base),
        r,
        &fast_basis,
        limit,
        deadline,
        &stop,
    );
    let pruned_by_trace = line_count(p, n * n) - line_count(p, trace_dim);
    let examined_rejects = fast.enumerated - fast.len() as u64;
    let tangent_cut = line_count(p, trace_dim) - line_count(p, basis.len());
    Ok(PreparedPool {
        constraints: all.len(),
        pruned_by_trace,
        pruned_by_rank: examined_rejects.saturating_add(tangent_cut),
        fast,
        warnings,
    })
}

/// Every line representative `A` with `base + tA` nilpotent of rank `r` for all `t`.
pub fn build_candidate_pool(
    base: &ExactMatrix,
    r: usize,
    pruning: Pruning,
    max_pool: u64,
) -> Result<CandidatePool> {
    if !base.is_square() {
        return Err(Error::NotSquare {
            rows: base.rows(),
            cols: base.cols(),
        });
    }
    let ar = Arith::new(base.rows(), base.field())?;
    if !ar.nilpotent_of_rank(&ar.from_exact(base), r) {
        return Err(Error::PreconditionUnmet(format!(
            "base is not nilpotent of rank {r}"
        )));
    }
    let prepared = prepare_pool(&ar, base, r, pruning, max_pool, None)?;
    Ok(CandidatePool {
        base: base.clone(),
        candidates: prepared
            .fast
            .candidates
            .iter()
            .map(|m| ar.to_exact(m))
            .collect(),
        truncated: prepared.fast.truncated,
        enumerated: prepared.fast.enumerated,
        pruned_by_trace: prepared.pruned_by_trace,
        pruned_by_rank: prepared.pruned_by_rank,
        constraints: prepared.constraints,
        warnings: prepared.warnings,
    })
}

/// Re-checks a space found by the search through the exact verifiers.
fn certify(space: &AffineMatrixSpace, r: usize) -> Result<()> {
    let budget = Budget {
        max_evaluations: u64::MAX,
        samples: 0,
        seed: 0,
    };
    let nil = verify_all_nilpotent_with(space, Strategy::Exhaustive, &budget)?;
    let rank = verify_constant_rank_with(space, r, Strategy::Exhaustive, &budget)?;
    if nil.status != VerificationStatus::Proved || rank.status != VerificationStatus::Proved {
        return Err(Error::Inconsistent(format!(
            "search witness of dimension {} failed re-verification",
            space.dim()
        )));
    }
    Ok(())
}

/// Largest dimension of an affine space of nilpotent matrices of rank `r`
/// found over `F_p`; `EXHAUSTIVE` when no budget cut occurred.
pub fn max_affine_dimension(
    n: usize,
    r: usize,
    field: FieldSpec,
    config: &SearchConfig,
) -> Result<SearchReport> {
    if r < 1 || r >= n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= r < n, got n = {n}, r = {r}"
        )));
    }
    let ar = Arith::new(n, field)?;
    let started = Instant::now();
    let deadline = config.time_limit.map(|t| started + t);
    let limits = dfs::Limits {
        max_nodes: config.max_nodes.max(1),
        deadline,
    };
    let mut warnings = Vec::new();
    let mut complete = config.mode == Mode::Exhaustive;
    let (mut nodes, mut by_trace, mut by_rank) = (0u64, 0u64, 0u64);
    let mut best: Option<(usize, ExactMatrix, Vec<ExactMatrix>)> = None;
    let mut pool_sizes = Vec::new();
    let types = jordan_types(n, r);
    for a in &types {
        let base = jordan_matrix(a, field);
        let prepared = prepare_pool(&ar, &base, r, config.pruning, config.max_pool, deadline)?;
        for w in prepared.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        by_trace = by_trace.saturating_add(prepared.pruned_by_trace);
        by_rank = by_rank.saturating_add(prepared.pruned_by_rank);
        let fast = prepared.fast;
        pool_sizes.push(fast.len());
        if fast.truncated {
            complete = false;
        }
        let outcome = match config.mode {
            Mode::Exhaustive => dfs::exhaustive(&ar, &fast, &limits, 0),
            Mode::Greedy => dfs::greedy(&ar, &fast, &limits, config.seed, config.restarts),
        };
        nodes += outcome.nodes;
        if outcome.cut {
            complete = false;
        }
        if best
            .as_ref()
            .map_or(true, |(d, _, _)| outcome.best_dim > *d)
        {
            let dirs = outcome
                .best_basis
                .iter()
                .map(|&i| ar.to_exact(&fast.candidates[i as usize]))
                .collect();
            best = Some((outcome.best_dim, base.clone(), dirs));
        }
    }
    let (max_dim, base, dirs) = best.expect("at least one Jordan type");
    let witness = AffineMatrixSpace::new(base, dirs)?;
    certify(&witness, r)?;
    if !complete && config.mode == Mode::Exhaustive {
        warnings.push("budget exhausted: the maximum is only a lower bound".to_string());
    }
    Ok(SearchReport {
        n,
        r,
        p: field.cardinality().expect("prime field"),
        max_dim_found: max_dim,
        witness,
        status: if complete {
            SearchStatus::Exhaustive
        } else {
            SearchStatus::LowerBoundOnly
        },
        base_points_tried: types,
        nodes_explored: nodes,
        pruned_by_trace: by_trace,
        pruned_by_rank: by_rank,
        pool_sizes,
        mode: config.mode,
        pruning: config.pruning,
        seed: config.seed,
        wall_time_ms: config.timing.then(|| started.elapsed().as_millis() as u64),
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    WitnessExceeds,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub verdict: Verdict,
    pub n: usize,
    pub r: usize,
    pub p: u64,
    pub conjecture_bound: u64,
    /// Dimension of the verified construction, when one was produced.
    pub lower_bound: Option<usize>,
    pub lower_bound_witness: Option<AffineMatrixSpace>,
    pub search: SearchReport,
}

/// Compares the conjectured maximum with a verified construction and a search.
pub fn test_conjecture(
    n: usize,
    r: usize,
    field: FieldSpec,
    config: &SearchConfig,
) -> Result<ConjectureReport> {
    let bound = conjecture_bound(n, r)?;
    let budget = Budget {
        seed: config.seed,
        ..Budget::default()
    };
    let lower = witness_conjecture(n, r, field, &budget)?;
    let search = max_affine_dimension(n, r, field, config)?;
    let found = search.max_dim_found as u64;
    let verdict = if found > bound {
        Verdict::WitnessExceeds
    } else if search.status == SearchStatus::Exhaustive {
        if found < bound {
            return Err(Error::Inconsistent(format!(
                "exhaustive search found {found} but a verified space of dimension {bound} exists"
            )));
        }
        Verdict::Consistent
    } else {
        Verdict::Unresolved
    };
    Ok(ConjectureReport {
        verdict,
        n,
        r,
        p: search.p,
        conjecture_bound: bound,
        lower_bound: lower.as_ref().map(AffineMatrixSpace::dim),
        lower_bound_witness: lower,
        search,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::shift_matrix;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn canonical_base_examples() {
        let fl = f(5);
        assert_eq!(
            canonical_bases(3, 2, fl).unwrap(),
            vec![shift_matrix(3, fl)]
        );
        let two = canonical_bases(4, 2, fl).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(
            two[0],
            shift_matrix(3, fl)
                .direct_sum(&ExactMatrix::zeros(fl, 1, 1))
                .unwrap()
        );
        assert_eq!(
            two[1],
            shift_matrix(2, fl)
                .direct_sum(&shift_matrix(2, fl))
                .unwrap()
        );
        assert_eq!(
            canonical_bases(3, 0, fl).unwrap(),
            vec![ExactMatrix::zeros(fl, 3, 3)]
        );
        assert!(canonical_bases(3, 3, fl).is_err());
    }

    #[test]
    fn small_pool_by_hand() {
        // n = 2, r = 1, p = 3. J_2 + tA has trace t tr(A) and determinant
        // -t^2 (a^2 + bc) - tc for A = [[a, b], [c, -a]], so c = 0 and a = 0;
        // then J_2 + tbE_12 vanishes at t = -1/b, and b = 0 gives A = 0.
        let fl = f(3);
        let pool = build_candidate_pool(&shift_matrix(2, fl), 1, Pruning::None, u64::MAX).unwrap();
        assert!(!pool.truncated);
        assert_eq!(pool.enumerated, 40);
        assert!(pool.candidates.is_empty());
        assert_eq!(pool.pruned_by_rank, 40);
        // over F_5 the same reasoning leaves no line either
        let pool5 =
            build_candidate_pool(&shift_matrix(2, f(5)), 1, Pruning::None, u64::MAX).unwrap();
        assert!(pool5.candidates.is_empty());
        // over F_2 the trace condition is vacuous for a = 1: J_2 + [[0,1],[1,0]] = E_21
        // and J_2 + [[1,0],[1,1]] = [[1,1],[1,1]] are both nilpotent of rank 1
        let pool2 =
            build_candidate_pool(&shift_matrix(2, f(2)), 1, Pruning::None, u64::MAX).unwrap();
        assert_eq!(
            pool2.candidates,
            vec![
                ExactMatrix::from_i64(f(2), &[[0, 1], [1, 0]]).unwrap(),
                ExactMatrix::from_i64(f(2), &[[1, 0], [1, 1]]).unwrap(),
            ]
        );
    }
}
