//! Candidate directions: line representatives `A` (first nonzero entry 1) such
//! that every member of `base + tA` is nilpotent of rank `r`.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::kernel::{Arith, Mat};

/// Multiply-shift hashing for packed matrix keys.
#[derive(Default)]
pub(crate) struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(8) ^ b as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
    }

    fn write_u128(&mut self, k: u128) {
        let x = (k as u64) ^ ((k >> 64) as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
        self.0 = (x ^ (x >> 29)).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        self.0 ^= self.0 >> 32;
    }
}

pub(crate) type KeyMap = HashMap<u128, u32, BuildHasherDefault<KeyHasher>>;

pub(crate) struct FastPool {
    /// Sorted by key, which is lexicographic order on flattened entries.
    pub candidates: Vec<Mat>,
    pub index: KeyMap,
    /// Line representatives examined.
    pub enumerated: u64,
    /// Some part of the kernel was never examined.
    pub truncated: bool,
}

impl FastPool {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    /// Index of the line through `m`, or `None` when `m = 0` or the line is not a candidate.
    #[inline]
    pub fn line_index(&self, ar: &Arith, m: &Mat) -> Option<u32> {
        let rep = ar.normalize(m)?;
        self.index.get(&ar.key(&rep)).copied()
    }
}

/// Enumerates the line representatives of `span(basis)` for a reduced echelon
/// `basis` (leading entries 1, increasing leading cells). A combination
/// `Σ c_i b_i` is a representative exactly when its first nonzero coefficient is 1.
///
/// Examines at most `limit` representatives; stops early once `stop` is set or
/// `deadline` passes.
pub(crate) fn build(
    ar: &Arith,
    base: &Mat,
    r: usize,
    basis: &[Mat],
    limit: u64,
    deadline: Option<Instant>,
    stop: &AtomicBool,
) -> FastPool {
    let d = basis.len();
    let p = ar.p as u64;
    let low_cap = {
        let mut l = 0;
        let mut size = 1u64;
        while size * p <= 1 << 16 {
            size *= p;
            l += 1;
        }
        l
    };
    // chunks: (leading index, number of odometer positions, fixed high coefficients as an index)
    let mut chunks: Vec<(usize, usize, u64, u64)> = Vec::new();
    let mut planned: u64 = 0;
    let mut truncated = false;
    'plan: for lead in 0..d {
        let free = d - lead - 1;
        let low = free.min(low_cap);
        let per_chunk = p.pow(low as u32);
        let highs = p.checked_pow((free - low) as u32).unwrap_or(u64::MAX);
        for hi in 0..highs {
            if planned >= limit {
                truncated = true;
                break 'plan;
            }
            let take = per_chunk.min(limit - planned);
            chunks.push((lead, low, hi, take));
            planned += take;
        }
    }
    let timed_out = AtomicBool::new(false);
    let results: Vec<(Vec<Mat>, u64)> = chunks
        .par_iter()
        .map(|&(lead, low, hi, take)| {
            if stop.load(Ordering::Relaxed) || deadline.is_some_and(|t| Instant::now() > t) {
                timed_out.store(true, Ordering::Relaxed);
                return (Vec::new(), 0);
            }
            let mut a = basis[lead];
            let mut rest = hi;
            for b in &basis[lead + 1 + low..] {
                let digit = (rest % p) as u32;
                rest /= p;
                if digit != 0 {
                    a = ar.add(&a, &ar.scale(b, digit));
                }
            }
            let low_basis = &basis[lead + 1..lead + 1 + low];
            let mut digits = vec![0u64; low];
            let mut found = Vec::new();
            for step in 0..take {
                if ar.line_ok(base, &a, r) {
                    found.push(a);
                }
                if step + 1 == take {
                    break;
                }
                // odometer: bumping a digit adds its basis vector, wrap-around included
                for (j, b) in low_basis.iter().enumerate() {
                    ar.add_assign(&mut a, b);
                    digits[j] += 1;
                    if digits[j] < p {
                        break;
                    }
                    digits[j] = 0;
                }
            }
            (found, take)
        })
        .collect();
    if timed_out.load(Ordering::Relaxed) {
        truncated = true;
    }
    let enumerated = results.iter().map(|(_, t)| t).sum();
    let mut keyed: Vec<(u128, Mat)> = results
        .into_iter()
        .flat_map(|(v, _)| v)
        .map(|m| (ar.key(&m), m))
        .collect();
    keyed.par_sort_unstable_by_key(|(k, _)| *k);
    keyed.dedup_by_key(|(k, _)| *k);
    let mut index = KeyMap::default();
    index.reserve(keyed.len());
    for (i, (k, _)) in keyed.iter().enumerate() {
        index.insert(*k, i as u32);
    }
    FastPool {
        candidates: keyed.into_iter().map(|(_, m)| m).collect(),
        index,
        enumerated,
        truncated,
    }
}
