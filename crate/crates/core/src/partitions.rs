//! Integer partitions stored zero-padded to length `n`, with conjugation and
//! the dominance lattice.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A partition `(a_1, ..., a_n)` of `n`: weakly decreasing, non-negative, summing to `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr")]
pub struct Partition {
    n: usize,
    parts: Vec<usize>,
}

#[derive(Deserialize)]
struct PartitionRepr {
    n: usize,
    parts: Vec<usize>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        Partition::new(r.n, r.parts)
    }
}

impl Partition {
    /// Validates `parts` and pads it with zeros to length `n`.
    pub fn new(n: usize, mut parts: Vec<usize>) -> Result<Self> {
        while parts.len() > n && parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.len() > n {
            return Err(Error::InvalidPartition(format!(
                "{} nonzero parts cannot sum to {n}",
                parts.len()
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not weakly decreasing"
            )));
        }
        let total: usize = parts.iter().sum();
        if total != n {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} sums to {total}, not {n}"
            )));
        }
        parts.resize(n, 0);
        Ok(Partition { n, parts })
    }

    /// Builds the partition of `sum(parts)` with the given (possibly unsorted) parts.
    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        let n = parts.iter().sum();
        let mut sorted: Vec<usize> = parts.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(n, sorted)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// All `n` entries, zero padding included.
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn nonzero_parts(&self) -> &[usize] {
        let l = self.len();
        &self.parts[..l]
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.iter().take_while(|&&a| a > 0).count()
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `ā_j = |{i : a_i >= j}|`, padded to length `n`.
    pub fn conjugate(&self) -> Partition {
        let parts = (1..=self.n)
            .map(|j| self.parts.iter().filter(|&&a| a >= j).count())
            .collect();
        Partition { n: self.n, parts }
    }

    /// `[a_1, a_1 + a_2, ..., a_1 + ... + a_n]`.
    pub fn prefix_sums(&self) -> Vec<usize> {
        self.parts
            .iter()
            .scan(0, |acc, &a| {
                *acc += a;
                Some(*acc)
            })
            .collect()
    }

    fn from_prefix_sums(n: usize, sums: &[usize]) -> Partition {
        let mut prev = 0;
        let parts = sums
            .iter()
            .map(|&s| {
                let d = s - prev;
                prev = s;
                d
            })
            .collect();
        Partition { n, parts }
    }

    /// Gerstenhaber's bound `(n^2 - Σ ā_j^2) / 2` for linear nilpotent spaces whose
    /// Jordan partitions are dominated by `self`.
    pub fn partition_bound(&self) -> u64 {
        let n = self.n as u64;
        let sq: u64 = self
            .conjugate()
            .parts
            .iter()
            .map(|&c| (c as u64) * (c as u64))
            .sum();
        let twice = n * n - sq;
        assert!(twice % 2 == 0, "partition bound numerator {twice} is odd");
        twice / 2
    }
}

fn same_n(a: &Partition, b: &Partition) -> Result<()> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(format!(
            "partitions of {} and {} are not comparable",
            a.n, b.n
        )));
    }
    Ok(())
}

/// `a <= b` in dominance order: every prefix sum of `a` is at most that of `b`.
pub fn dominance_leq(a: &Partition, b: &Partition) -> Result<bool> {
    same_n(a, b)?;
    Ok(a.prefix_sums()
        .iter()
        .zip(b.prefix_sums())
        .all(|(x, y)| *x <= y))
}

/// Greatest lower bound: pointwise minimum of prefix sums.
pub fn dominance_meet(a: &Partition, b: &Partition) -> Result<Partition> {
    same_n(a, b)?;
    let sums: Vec<usize> = a
        .prefix_sums()
        .into_iter()
        .zip(b.prefix_sums())
        .map(|(x, y)| x.min(y))
        .collect();
    let meet = Partition::from_prefix_sums(a.n, &sums);
    debug_assert!(meet.parts.windows(2).all(|w| w[0] >= w[1]));
    Ok(meet)
}

/// Least upper bound, realised as `conj(meet(conj a, conj b))`.
pub fn dominance_join(a: &Partition, b: &Partition) -> Result<Partition> {
    same_n(a, b)?;
    Ok(dominance_meet(&a.conjugate(), &b.conjugate())?.conjugate())
}

/// Every partition of `n`, in decreasing lexicographic order (`(n)` first).
pub fn partitions_of(n: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=remaining.min(max)).rev() {
            cur.push(part);
            rec(remaining - part, part, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(n, n, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|mut parts| {
            parts.resize(n, 0);
            Partition { n, parts }
        })
        .collect()
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.iter().sum(), parts.to_vec()).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(Partition::new(3, vec![1, 2]).is_err());
        assert!(Partition::new(3, vec![2, 2]).is_err());
        assert!(Partition::new(2, vec![1, 1, 1]).is_err());
        assert_eq!(
            Partition::new(4, vec![2, 2]).unwrap().parts(),
            &[2, 2, 0, 0]
        );
        assert_eq!(
            Partition::new(3, vec![3, 0, 0, 0]).unwrap().parts(),
            &[3, 0, 0]
        );
        assert_eq!(Partition::from_parts(&[1, 3]).unwrap(), p(&[3, 1, 0, 0]));
        let json: Partition = serde_json::from_str(r#"{"n": 4, "parts": [2,2,0,0]}"#).unwrap();
        assert_eq!(json, p(&[2, 2, 0, 0]));
        assert_eq!(
            serde_json::to_string(&json).unwrap(),
            r#"{"n":4,"parts":[2,2,0,0]}"#
        );
        assert!(serde_json::from_str::<Partition>(r#"{"n": 4, "parts": [1,3,0,0]}"#).is_err());
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(p(&[4, 0, 0, 0]).conjugate(), p(&[1, 1, 1, 1]));
        assert_eq!(p(&[2, 1, 0]).conjugate(), p(&[2, 1, 0]));
        assert_eq!(p(&[3, 1, 0, 0]).conjugate(), p(&[2, 1, 1, 0]));
    }

    #[test]
    fn dominance_examples() {
        let a = p(&[2, 1, 0]);
        assert!(dominance_leq(&a, &a).unwrap());
        assert!(dominance_leq(&p(&[1, 1, 1]), &p(&[3, 0, 0])).unwrap());
        assert!(dominance_leq(&p(&[2, 2, 0]), &p(&[3, 1, 0])).unwrap());
        assert!(!dominance_leq(&p(&[3, 1, 0]), &p(&[2, 2, 0])).unwrap());
        assert!(dominance_leq(&p(&[1, 1]), &p(&[3, 0, 0])).is_err());
    }

    #[test]
    fn meet_and_join_examples() {
        let a = p(&[3, 1, 0, 0]);
        assert_eq!(dominance_meet(&a, &a).unwrap(), a);
        assert_eq!(
            dominance_meet(&p(&[3, 0, 0]), &p(&[1, 1, 1])).unwrap(),
            p(&[1, 1, 1])
        );
        assert_eq!(
            dominance_meet(&a, &p(&[2, 2, 0, 0])).unwrap(),
            p(&[2, 2, 0, 0])
        );
        assert_eq!(dominance_join(&a, &a).unwrap(), a);
        assert_eq!(
            dominance_join(&p(&[3, 0, 0]), &p(&[1, 1, 1])).unwrap(),
            p(&[3, 0, 0])
        );
        assert!(dominance_join(&p(&[1]), &p(&[2, 0])).is_err());
    }

    #[test]
    fn incomparable_join_needs_a_new_partition() {
        // (3,1,1,1) and (2,2,2) are incomparable; the join must dominate both.
        let a = p(&[3, 1, 1, 1, 0, 0]);
        let b = p(&[2, 2, 2, 0, 0, 0]);
        assert!(!dominance_leq(&a, &b).unwrap() && !dominance_leq(&b, &a).unwrap());
        let j = dominance_join(&a, &b).unwrap();
        assert_eq!(j, p(&[3, 2, 1, 0, 0, 0]));
    }

    #[test]
    fn partition_bound_examples() {
        for n in 1..=10 {
            let mut single = vec![0; n];
            single[0] = n;
            assert_eq!(p(&single).partition_bound(), (n * (n - 1) / 2) as u64);
            assert_eq!(p(&vec![1; n]).partition_bound(), 0);
        }
        assert_eq!(p(&[2, 2, 0, 0]).partition_bound(), 4);
    }

    #[test]
    fn enumeration_counts() {
        // p(n) for n = 0..=10
        let expected = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &count) in expected.iter().enumerate() {
            let all = partitions_of(n);
            assert_eq!(all.len(), count, "n = {n}");
            assert!(all.windows(2).all(|w| w[0] > w[1]));
        }
        assert_eq!(partitions_of(3)[0], p(&[3, 0, 0]));
    }
}
