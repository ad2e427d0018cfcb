//! Depth-first enumeration of direction subspaces over a candidate pool.
//!
//! A subspace `W` is admissible when every line of `W` is a pool candidate.
//! Each admissible `W` is visited once, along its greedy basis: `b_1` is the
//! smallest line of `W`, `b_{k+1}` the smallest line of `W` outside
//! `span(b_1..b_k)`. Extending `Z` by `B` therefore follows that path exactly
//! when `B` is the smallest of the `p^k` new lines `z + B`, `z` in `Z`.
//!
//! Below a node `(Z, B)` every new line has index greater than `B` and is an
//! admissible extension of `Z` on its own, so `p^k (p^e - 1)/(p - 1)` such
//! lines are needed to go `e` levels deeper.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::kernel::{Arith, Mat};
use super::pool::FastPool;

pub(crate) struct Limits {
    pub max_nodes: u64,
    pub deadline: Option<Instant>,
}

pub(crate) struct Outcome {
    pub best_dim: usize,
    /// Pool indices of a basis of a best subspace.
    pub best_basis: Vec<u32>,
    pub nodes: u64,
    /// A budget or deadline stopped the search before it finished.
    pub cut: bool,
}

struct Dfs<'a> {
    ar: &'a Arith,
    pool: &'a FastPool,
    limits: &'a Limits,
    out: Outcome,
}

/// Largest `e` with `p^k (p^e - 1) / (p - 1) <= available`.
fn max_extra_dims(p: u64, k: usize, available: usize) -> usize {
    let pk = (p as u128).saturating_pow(k as u32);
    let mut e = 0usize;
    let mut lines: u128 = 0;
    loop {
        // lines added by level e + 1: p^(k+e)
        let next = lines + pk.saturating_mul((p as u128).saturating_pow(e as u32));
        if next > available as u128 {
            return e;
        }
        lines = next;
        e += 1;
    }
}

impl Dfs<'_> {
    /// `elems` lists every vector of the current subspace, zero first.
    fn visit(&mut self, elems: &[Mat], basis: &mut Vec<u32>, cands: &[u32]) {
        self.out.nodes += 1;
        let k = basis.len();
        if k > self.out.best_dim {
            self.out.best_dim = k;
            self.out.best_basis = basis.clone();
        }
        if self.out.nodes >= self.limits.max_nodes
            || self.limits.deadline.is_some_and(|t| Instant::now() > t)
        {
            self.out.cut = true;
            return;
        }
        let p = self.ar.p as u64;
        for (pos, &b) in cands.iter().enumerate() {
            if self.out.cut {
                return;
            }
            // children draw only from the candidates after `b`
            let rest = cands.len() - pos;
            if k + max_extra_dims(p, k, rest) <= self.out.best_dim {
                return;
            }
            let bm = self.pool.candidates[b as usize];
            let canonical = elems[1..].iter().all(|z| {
                let sum = self.ar.add(z, &bm);
                self.pool.line_index(self.ar, &sum).is_some_and(|i| i >= b)
            });
            if !canonical {
                continue;
            }
            let mut fresh = Vec::with_capacity(elems.len() * (p as usize - 1));
            for lambda in 1..p as u32 {
                let lb = self.ar.scale(&bm, lambda);
                fresh.extend(elems.iter().map(|z| self.ar.add(z, &lb)));
            }
            let child = self.filter(&fresh, &cands[pos + 1..]);
            if k + 1 + max_extra_dims(p, k + 1, child.len()) <= self.out.best_dim {
                continue;
            }
            let mut grown = elems.to_vec();
            grown.extend_from_slice(&fresh);
            basis.push(b);
            self.visit(&grown, basis, &child);
            basis.pop();
        }
    }

    /// Keeps the candidates `L` with every line `u + L`, `u` in `fresh`, in the pool.
    fn filter(&self, fresh: &[Mat], cands: &[u32]) -> Vec<u32> {
        let keep = |&l: &u32| {
            let lm = &self.pool.candidates[l as usize];
            fresh
                .iter()
                .all(|u| self.pool.line_index(self.ar, &self.ar.add(u, lm)).is_some())
        };
        if cands.len() * fresh.len() > 4096 {
            cands.par_iter().copied().filter(|l| keep(l)).collect()
        } else {
            cands.iter().copied().filter(|l| keep(l)).collect()
        }
    }
}

/// Exhaustive search for the largest admissible subspace, starting from
/// `best_dim` found elsewhere (only strictly larger subspaces are recorded).
pub(crate) fn exhaustive(ar: &Arith, pool: &FastPool, limits: &Limits, best_dim: usize) -> Outcome {
    let mut dfs = Dfs {
        ar,
        pool,
        limits,
        out: Outcome {
            best_dim,
            best_basis: Vec::new(),
            nodes: 0,
            cut: false,
        },
    };
    let all: Vec<u32> = (0..pool.len() as u32).collect();
    dfs.visit(&[Mat::ZERO], &mut Vec::new(), &all);
    dfs.out
}

/// Randomised greedy: repeatedly add the sampled candidate that keeps the most
/// candidates admissible. Each restart draws from its own stream of `seed`.
pub(crate) fn greedy(
    ar: &Arith,
    pool: &FastPool,
    limits: &Limits,
    seed: u64,
    restarts: u32,
) -> Outcome {
    const SAMPLE: usize = 32;
    let mut out = Outcome {
        best_dim: 0,
        best_basis: Vec::new(),
        nodes: 0,
        cut: false,
    };
    let p = ar.p;
    for restart in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let mut elems = vec![Mat::ZERO];
        let mut basis: Vec<u32> = Vec::new();
        let mut cands: Vec<u32> = (0..pool.len() as u32).collect();
        while !cands.is_empty() {
            if out.nodes >= limits.max_nodes || limits.deadline.is_some_and(|t| Instant::now() > t)
            {
                out.cut = true;
                break;
            }
            let sample: Vec<u32> = cands
                .choose_multiple(&mut rng, SAMPLE.min(cands.len()))
                .copied()
                .collect();
            let scored: Vec<(usize, Vec<Mat>, Vec<u32>)> = sample
                .par_iter()
                .map(|&b| {
                    let bm = pool.candidates[b as usize];
                    let mut fresh = Vec::new();
                    for lambda in 1..p {
                        let lb = ar.scale(&bm, lambda);
                        fresh.extend(elems.iter().map(|z| ar.add(z, &lb)));
                    }
                    let child: Vec<u32> = cands
                        .iter()
                        .copied()
                        .filter(|&l| {
                            l != b && {
                                let lm = &pool.candidates[l as usize];
                                fresh
                                    .iter()
                                    .all(|u| pool.line_index(ar, &ar.add(u, lm)).is_some())
                            }
                        })
                        .collect();
                    (b as usize, fresh, child)
                })
                .collect();
            out.nodes += scored.len() as u64;
            let (b, fresh, child) = scored
                .into_iter()
                .enumerate()
                .max_by_key(|(i, (_, _, c))| (c.len(), std::cmp::Reverse(*i)))
                .map(|(_, s)| s)
                .expect("nonempty sample");
            elems.extend(fresh);
            basis.push(b as u32);
            cands = child;
        }
        if basis.len() > out.best_dim {
            out.best_dim = basis.len();
            out.best_basis = basis;
        }
        if out.cut {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extra_dims_counts_lines() {
        // from the root, e dimensions need (p^e - 1)/(p - 1) lines
        assert_eq!(max_extra_dims(5, 0, 0), 0);
        assert_eq!(max_extra_dims(5, 0, 1), 1);
        assert_eq!(max_extra_dims(5, 0, 5), 1);
        assert_eq!(max_extra_dims(5, 0, 6), 2);
        assert_eq!(max_extra_dims(2, 0, 7), 3);
        // one level down, e more dimensions need 2^1 (2^e - 1) lines
        assert_eq!(max_extra_dims(2, 1, 5), 1);
        assert_eq!(max_extra_dims(2, 1, 6), 2);
    }
}
