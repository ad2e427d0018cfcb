use std::collections::HashSet;
use std::time::Duration;

use nilspace::catalog::{conjecture_bound, witness_conjecture};
use nilspace::exactmat::{is_nilpotent, rank, shift_matrix};
use nilspace::search::{
    build_candidate_pool, canonical_bases, max_affine_dimension, test_conjecture, Mode, Pruning,
    SearchConfig, SearchStatus, Verdict,
};
use nilspace::spaces::{verify_all_nilpotent, verify_constant_rank, Budget};
use nilspace::{ExactMatrix, FieldSpec};

fn fp(p: u64) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

fn residues(m: &ExactMatrix) -> Vec<u64> {
    m.entries().iter().map(|x| x.residue().unwrap()).collect()
}

fn from_residues(field: FieldSpec, n: usize, v: &[u64]) -> ExactMatrix {
    let rows: Vec<Vec<i64>> = v
        .chunks(n)
        .map(|c| c.iter().map(|&x| x as i64).collect())
        .collect();
    ExactMatrix::from_i64(field, &rows).unwrap()
}

fn all_vectors(p: u64, len: usize) -> Vec<Vec<u64>> {
    let total = p.pow(len as u32);
    (0..total)
        .map(|mut i| {
            (0..len)
                .map(|_| {
                    let d = i % p;
                    i /= p;
                    d
                })
                .collect()
        })
        .collect()
}

fn normalize(v: &[u64], p: u64) -> Option<Vec<u64>> {
    let lead = *v.iter().find(|&&x| x != 0)?;
    let inv = (1..p).find(|&b| lead * b % p == 1).unwrap();
    Some(v.iter().map(|&x| x * inv % p).collect())
}

fn nilpotent_of_rank(m: &ExactMatrix, r: usize) -> bool {
    rank(m) == r && is_nilpotent(m).unwrap()
}

/// Lines `A` (as normalized residue vectors) with every `P + tA`, `t != 0`, nilpotent of rank `r`.
fn brute_pool(base: &ExactMatrix, r: usize, p: u64) -> HashSet<Vec<u64>> {
    let n = base.rows();
    let field = base.field();
    all_vectors(p, n * n)
        .into_iter()
        .filter(|v| normalize(v, p).as_deref() == Some(v.as_slice()))
        .filter(|v| {
            let a = from_residues(field, n, v);
            (1..p).all(|t| nilpotent_of_rank(&(base + &a.scale(&field.from_u64(t))), r))
        })
        .collect()
}

/// Largest subspace all of whose lines lie in `pool`, by plain DFS over spans.
fn brute_max_dim(pool: &HashSet<Vec<u64>>, p: u64) -> usize {
    let lines: Vec<Vec<u64>> = {
        let mut v: Vec<_> = pool.iter().cloned().collect();
        v.sort();
        v
    };
    fn add(a: &[u64], b: &[u64], c: u64, p: u64) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + c * y) % p).collect()
    }
    fn go(
        span: &[Vec<u64>],
        start: usize,
        lines: &[Vec<u64>],
        pool: &HashSet<Vec<u64>>,
        p: u64,
    ) -> usize {
        let mut best = 0;
        for (i, b) in lines.iter().enumerate().skip(start) {
            if span
                .iter()
                .any(|z| normalize(z, p).as_deref() == Some(b.as_slice()))
            {
                continue;
            }
            let mut grown = span.to_vec();
            let mut ok = true;
            for c in 1..p {
                for z in span {
                    let v = add(z, b, c, p);
                    if normalize(&v, p).is_none_or(|l| !pool.contains(&l)) {
                        ok = false;
                    }
                    grown.push(v);
                }
            }
            if ok {
                best = best.max(1 + go(&grown, i + 1, lines, pool, p));
            }
        }
        best
    }
    go(
        &[vec![0; lines.first().map_or(0, Vec::len)]],
        0,
        &lines,
        pool,
        p,
    )
}

/// All nilpotent matrices of rank `r`, not only Jordan forms.
fn all_nilpotent_of_rank(n: usize, r: usize, p: u64) -> Vec<ExactMatrix> {
    let field = fp(p);
    all_vectors(p, n * n)
        .into_iter()
        .map(|v| from_residues(field, n, &v))
        .filter(|m| nilpotent_of_rank(m, r))
        .collect()
}

#[test]
fn jordan_bases_cover_every_base_point() {
    // the maximum over every nilpotent base of rank r equals the search over Jordan forms
    for &(n, r, p) in &[
        (2usize, 1usize, 2u64),
        (2, 1, 3),
        (3, 1, 2),
        (3, 2, 2),
        (2, 1, 5),
    ] {
        let field = fp(p);
        let oracle = all_nilpotent_of_rank(n, r, p)
            .iter()
            .map(|b| brute_max_dim(&brute_pool(b, r, p), p))
            .max()
            .unwrap();
        let config = SearchConfig {
            pruning: Pruning::None,
            ..SearchConfig::default()
        };
        let rep = max_affine_dimension(n, r, field, &config).unwrap();
        assert_eq!(rep.status, SearchStatus::Exhaustive);
        assert_eq!(rep.max_dim_found, oracle, "n={n} r={r} p={p}");
    }
}

#[test]
fn pools_match_brute_force() {
    for &(n, r, p) in &[(2usize, 1usize, 3u64), (3, 1, 2), (3, 2, 3)] {
        let field = fp(p);
        for base in canonical_bases(n, r, field).unwrap() {
            let pool = build_candidate_pool(&base, r, Pruning::None, u64::MAX).unwrap();
            let got: HashSet<Vec<u64>> = pool.candidates.iter().map(residues).collect();
            assert_eq!(got, brute_pool(&base, r, p), "n={n} r={r} p={p}");
            assert_eq!(brute_max_dim(&got, p), {
                let config = SearchConfig {
                    pruning: Pruning::None,
                    ..SearchConfig::default()
                };
                max_affine_dimension(n, r, field, &config)
                    .unwrap()
                    .max_dim_found
            });
        }
    }
}

#[test]
fn pruning_never_drops_a_candidate() {
    for r in 1..=2 {
        let field = fp(5);
        for base in canonical_bases(3, r, field).unwrap() {
            let none = build_candidate_pool(&base, r, Pruning::None, u64::MAX).unwrap();
            let trace = build_candidate_pool(&base, r, Pruning::Trace, u64::MAX).unwrap();
            let full = build_candidate_pool(&base, r, Pruning::Full, u64::MAX).unwrap();
            assert_eq!(none.candidates, trace.candidates);
            assert_eq!(none.candidates, full.candidates);
            assert!(trace.enumerated < none.enumerated);
            assert!(full.enumerated <= trace.enumerated);
            assert_eq!(none.enumerated, (5u64.pow(9) - 1) / 4);
            assert_eq!(trace.enumerated + trace.pruned_by_trace, none.enumerated);
        }
    }
}

#[test]
fn pool_members_are_exact_lines() {
    let field = fp(5);
    for base in canonical_bases(4, 3, field).unwrap() {
        let pool = build_candidate_pool(&base, 3, Pruning::Trace, u64::MAX).unwrap();
        assert!(!pool.truncated);
        assert!(!pool.candidates.is_empty());
        for a in &pool.candidates {
            assert_eq!(normalize(&residues(a), 5).unwrap(), residues(a));
            for t in 1..5 {
                assert!(nilpotent_of_rank(
                    &(&base + &a.scale(&field.from_u64(t))),
                    3
                ));
            }
        }
    }
}

#[test]
fn small_cases_match_the_closed_forms() {
    let f5 = fp(5);
    let r2 = max_affine_dimension(3, 2, f5, &SearchConfig::default()).unwrap();
    assert_eq!((r2.max_dim_found, r2.status), (1, SearchStatus::Exhaustive));
    let r1 = max_affine_dimension(3, 1, f5, &SearchConfig::default()).unwrap();
    assert_eq!((r1.max_dim_found, r1.status), (1, SearchStatus::Exhaustive));
    let f2 = max_affine_dimension(2, 1, fp(2), &SearchConfig::default()).unwrap();
    assert_eq!(f2.max_dim_found, 1);
    assert!(f2.warnings.iter().any(|w| w.contains("trace pruning")));
    for rep in [&r2, &r1, &f2] {
        assert_eq!(rep.witness.dim(), rep.max_dim_found);
    }
}

#[test]
fn conjecture_verdicts() {
    let consistent = test_conjecture(3, 2, fp(5), &SearchConfig::default()).unwrap();
    assert_eq!(consistent.verdict, Verdict::Consistent);
    assert_eq!(consistent.lower_bound, Some(1));
    let exceeds = test_conjecture(2, 1, fp(2), &SearchConfig::default()).unwrap();
    assert_eq!(exceeds.verdict, Verdict::WitnessExceeds);
    assert_eq!(exceeds.search.max_dim_found, 1);
}

#[test]
fn small_field_beats_the_conjectured_value() {
    // over F_3 (below the field size the (4, 2) case is expected to need)
    // a 4-dimensional space exists
    let rep = test_conjecture(4, 2, fp(3), &SearchConfig::default()).unwrap();
    assert_eq!(rep.verdict, Verdict::WitnessExceeds);
    assert_eq!(rep.search.max_dim_found, 4);
    assert_eq!(conjecture_bound(4, 2).unwrap(), 3);
    let w = &rep.search.witness;
    let budget = Budget::default();
    assert!(verify_all_nilpotent(w, &budget).unwrap().is_proved());
    assert!(verify_constant_rank(w, 2, &budget).unwrap().is_proved());
}

#[test]
fn node_budget_is_monotone() {
    let field = fp(5);
    let mut last = 0;
    for nodes in [1u64, 2, 3, 5, 100] {
        let config = SearchConfig {
            max_nodes: nodes,
            ..SearchConfig::default()
        };
        let rep = max_affine_dimension(3, 1, field, &config).unwrap();
        assert!(rep.max_dim_found >= last, "budget {nodes}");
        last = rep.max_dim_found;
    }
    assert_eq!(last, 1);
    let cut = max_affine_dimension(
        3,
        1,
        field,
        &SearchConfig {
            max_nodes: 1,
            ..SearchConfig::default()
        },
    )
    .unwrap();
    assert_eq!(cut.status, SearchStatus::LowerBoundOnly);
}

#[test]
fn pool_budget_truncates_honestly() {
    let config = SearchConfig {
        max_pool: 10,
        ..SearchConfig::default()
    };
    let rep = max_affine_dimension(3, 1, fp(5), &config).unwrap();
    assert_eq!(rep.status, SearchStatus::LowerBoundOnly);
    let pool = build_candidate_pool(&shift_matrix(3, fp(5)), 2, Pruning::Trace, 10).unwrap();
    assert!(pool.truncated);
    assert_eq!(pool.enumerated, 10);
}

#[test]
fn deadline_gives_a_lower_bound() {
    let config = SearchConfig {
        time_limit: Some(Duration::from_nanos(1)),
        ..SearchConfig::default()
    };
    let rep = max_affine_dimension(3, 2, fp(5), &config).unwrap();
    assert_eq!(rep.status, SearchStatus::LowerBoundOnly);
}

#[test]
fn greedy_is_seeded_and_bounded_by_exhaustive() {
    let field = fp(3);
    let greedy = |seed| SearchConfig {
        mode: Mode::Greedy,
        seed,
        restarts: 4,
        ..SearchConfig::default()
    };
    let a = max_affine_dimension(3, 1, field, &greedy(11)).unwrap();
    let b = max_affine_dimension(3, 1, field, &greedy(11)).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    assert_eq!(a.status, SearchStatus::LowerBoundOnly);
    let exact = max_affine_dimension(3, 1, field, &SearchConfig::default()).unwrap();
    assert!(a.max_dim_found <= exact.max_dim_found);
    assert!(a.max_dim_found >= 1);
}

#[test]
fn conjecture_witness_is_in_the_search_range() {
    let f5 = fp(5);
    let w = witness_conjecture(4, 2, f5, &Budget::default())
        .unwrap()
        .unwrap();
    let config = SearchConfig {
        pruning: Pruning::Full,
        ..SearchConfig::default()
    };
    let rep = max_affine_dimension(4, 2, f5, &config).unwrap();
    assert_eq!(rep.status, SearchStatus::Exhaustive);
    assert_eq!(rep.max_dim_found, w.dim());
}

#[test]
fn pruning_leaves_search_results_unchanged() {
    for r in 1..=2 {
        let reports: Vec<_> = [Pruning::None, Pruning::Trace, Pruning::Full]
            .into_iter()
            .map(|pruning| {
                let config = SearchConfig {
                    pruning,
                    ..SearchConfig::default()
                };
                max_affine_dimension(3, r, fp(5), &config).unwrap()
            })
            .collect();
        for rep in &reports[1..] {
            assert_eq!(rep.max_dim_found, reports[0].max_dim_found);
            assert_eq!(rep.witness, reports[0].witness);
            assert_eq!(rep.pool_sizes, reports[0].pool_sizes);
        }
    }
}

#[test]
fn maxima_respect_the_linear_bound() {
    for &(n, r, p) in &[
        (2usize, 1usize, 2u64),
        (2, 1, 3),
        (3, 1, 3),
        (3, 2, 3),
        (3, 1, 5),
        (3, 2, 5),
    ] {
        let rep = max_affine_dimension(n, r, fp(p), &SearchConfig::default()).unwrap();
        assert!(rep.max_dim_found as u64 <= nilspace::catalog::bound_rank_bounded(n, r).unwrap());
        let budget = Budget::default();
        assert!(verify_all_nilpotent(&rep.witness, &budget)
            .unwrap()
            .is_proved());
        assert!(verify_constant_rank(&rep.witness, r, &budget)
            .unwrap()
            .is_proved());
    }
}
