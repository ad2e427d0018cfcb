//! Closed-form dimension bounds and explicit extremal spaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmat::{shift_matrix, unit_matrix, ExactMatrix};
use crate::field::FieldSpec;
use crate::partitions::Partition;
use crate::spaces::{verify_all_nilpotent, verify_constant_rank, AffineMatrixSpace, Budget};

/// Field-size condition under which a bound is known to hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    AnyField,
    /// `|K| >= m`
    AtLeast(u64),
    /// No explicit threshold is known.
    SufficientlyLarge,
}

impl Hypothesis {
    /// `Some(false)` when `field` provably violates the hypothesis, `None` when undecidable.
    pub fn satisfied_by(&self, field: FieldSpec) -> Option<bool> {
        match *self {
            Hypothesis::AnyField => Some(true),
            Hypothesis::AtLeast(m) => Some(field.has_at_least(m)),
            Hypothesis::SufficientlyLarge => match field {
                FieldSpec::Rational => Some(true),
                FieldSpec::Prime(_) => None,
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoundInputs {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub inputs: BoundInputs,
    pub value: u64,
    /// The field-size condition as stated, e.g. `|K| ≥ n+1`.
    pub hypothesis: String,
    /// Smallest field size meeting the hypothesis, when it is explicit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_field_size: Option<u64>,
    #[serde(skip)]
    pub condition: Hypothesis,
}

impl BoundReport {
    fn new(
        name: &str,
        inputs: BoundInputs,
        value: u64,
        hypothesis: &str,
        condition: Hypothesis,
    ) -> Self {
        let min_field_size = match condition {
            Hypothesis::AtLeast(m) => Some(m),
            _ => None,
        };
        BoundReport {
            name: name.to_string(),
            inputs,
            value,
            hypothesis: hypothesis.to_string(),
            min_field_size,
            condition,
        }
    }

    /// A warning line when `field` violates the hypothesis.
    pub fn warning_for(&self, field: FieldSpec) -> Option<String> {
        match self.condition.satisfied_by(field) {
            Some(false) => Some(format!(
                "warning: {} assumes {} but the field is {field}",
                self.name, self.hypothesis
            )),
            _ => None,
        }
    }
}

fn half(twice: i128) -> u64 {
    assert!(
        twice >= 0 && twice % 2 == 0,
        "bound numerator {twice} is not a non-negative even integer"
    );
    (twice / 2) as u64
}

/// Maximal dimension of a linear space of nilpotent matrices: `n(n-1)/2`.
pub fn bound_gerstenhaber(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Linear nilpotent spaces of rank at most `r`: `n(n-1)/2 - (n-r)(n-r-1)/2`.
pub fn bound_rank_bounded(n: usize, r: usize) -> Result<u64> {
    if r > n {
        return Err(Error::InvalidArgument(format!("rank {r} exceeds n = {n}")));
    }
    Ok(bound_gerstenhaber(n) - bound_gerstenhaber(n - r))
}

/// Linear nilpotent spaces of nilindex at most `k` and rank at most `r`:
/// `nr - r^2/2 - r/2 + q^2 (k-1)/2 + q(-2r + k - 1)/2` with `q = floor(r / (k-1))`.
pub fn bound_mms(n: usize, r: usize, k: usize) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "nilindex bound k = {k} must be at least 2"
        )));
    }
    if r < 1 || r >= n {
        return Err(Error::InvalidArgument(format!(
            "rank {r} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    let (n, r, k) = (n as i128, r as i128, k as i128);
    let q = r / (k - 1);
    Ok(half(
        2 * n * r - r * r - r + q * q * (k - 1) + q * (-2 * r + k - 1),
    ))
}

/// Affine nilpotent spaces of rank `n-1`: `(n-1)(n-2)/2`.
pub fn bound_rank_full(n: usize) -> Result<u64> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(bound_gerstenhaber(n - 1))
}

/// Affine nilpotent spaces of rank 1: `n - 2`.
pub fn bound_rank_one(n: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    Ok(n as u64 - 2)
}

/// Conjectured maximum for affine nilpotent spaces of rank `r`:
/// `Σ_{i=1}^{r} (n-1-i) = r(2n-r-3)/2`.
pub fn conjecture_bound(n: usize, r: usize) -> Result<u64> {
    if r < 1 || r >= n {
        return Err(Error::InvalidArgument(format!(
            "rank {r} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    let (n, r) = (n as i128, r as i128);
    Ok(half(r * (2 * n - r - 3)))
}

pub fn report_gerstenhaber(n: usize) -> BoundReport {
    BoundReport::new(
        "bound_gerstenhaber",
        BoundInputs {
            n,
            ..Default::default()
        },
        bound_gerstenhaber(n),
        "any field",
        Hypothesis::AnyField,
    )
}

pub fn report_rank_bounded(n: usize, r: usize) -> Result<BoundReport> {
    Ok(BoundReport::new(
        "bound_rank_bounded",
        BoundInputs {
            n,
            r: Some(r),
            k: None,
        },
        bound_rank_bounded(n, r)?,
        "|K| ≥ r+1",
        Hypothesis::AtLeast(r as u64 + 1),
    ))
}

pub fn report_mms(n: usize, r: usize, k: usize) -> Result<BoundReport> {
    Ok(BoundReport::new(
        "bound_mms",
        BoundInputs {
            n,
            r: Some(r),
            k: Some(k),
        },
        bound_mms(n, r, k)?,
        "|K| > n",
        Hypothesis::AtLeast(n as u64 + 1),
    ))
}

pub fn report_rank_full(n: usize) -> Result<BoundReport> {
    Ok(BoundReport::new(
        "bound_rank_full",
        BoundInputs {
            n,
            r: Some(n.saturating_sub(1)),
            k: None,
        },
        bound_rank_full(n)?,
        "|K| ≥ n+1",
        Hypothesis::AtLeast(n as u64 + 1),
    ))
}

pub fn report_rank_one(n: usize) -> Result<BoundReport> {
    Ok(BoundReport::new(
        "bound_rank_one",
        BoundInputs {
            n,
            r: Some(1),
            k: None,
        },
        bound_rank_one(n)?,
        "|K| ≥ 3",
        Hypothesis::AtLeast(3),
    ))
}

pub fn report_conjecture(n: usize, r: usize) -> Result<BoundReport> {
    Ok(BoundReport::new(
        "conjecture_bound",
        BoundInputs {
            n,
            r: Some(r),
            k: None,
        },
        conjecture_bound(n, r)?,
        "sufficiently large",
        Hypothesis::SufficientlyLarge,
    ))
}

pub fn report_partition(a: &Partition) -> BoundReport {
    BoundReport::new(
        "partition_bound",
        BoundInputs {
            n: a.n(),
            ..Default::default()
        },
        a.partition_bound(),
        "sufficiently large",
        Hypothesis::SufficientlyLarge,
    )
}

/// Every bound that applies to the given parameters.
pub fn applicable_bounds(n: usize, r: Option<usize>, k: Option<usize>) -> Result<Vec<BoundReport>> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if let Some(r) = r {
        if r > n {
            return Err(Error::InvalidArgument(format!("rank {r} exceeds n = {n}")));
        }
    }
    if let Some(k) = k {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "nilindex bound k = {k} must be at least 2"
            )));
        }
    }
    let mut out = vec![report_gerstenhaber(n)];
    if let Some(r) = r {
        out.push(report_rank_bounded(n, r)?);
    }
    if let (Some(r), Some(k)) = (r, k) {
        if (1..n).contains(&r) {
            out.push(report_mms(n, r, k)?);
        }
    }
    if r.is_none_or(|r| r + 1 == n) {
        out.push(report_rank_full(n)?);
    }
    if n >= 2 && r.is_none_or(|r| r == 1) {
        out.push(report_rank_one(n)?);
    }
    if let Some(r) = r {
        if (1..n).contains(&r) {
            out.push(report_conjecture(n, r)?);
        }
    }
    Ok(out)
}

fn e(i: usize, j: usize, n: usize, field: FieldSpec) -> ExactMatrix {
    unit_matrix(i, j, n, field).expect("index in range")
}

/// Rows `1..=r` carry a 1 at `(i, i+1)` and free entries at `(i, j)`, `j >= i+2`;
/// the remaining rows vanish. Every member is strictly upper triangular and in
/// row echelon form with `r` pivots.
fn staircase(n: usize, r: usize, field: FieldSpec) -> Result<AffineMatrixSpace> {
    let mut base = ExactMatrix::zeros(field, n, n);
    let mut directions = Vec::new();
    for i in 1..=r {
        base.set(i - 1, i, field.one());
        for j in i + 2..=n {
            directions.push(e(i, j, n, field));
        }
    }
    AffineMatrixSpace::new(base, directions)
}

/// `J_n + <E_{i,j} : j >= i+2>`, of dimension `(n-1)(n-2)/2`.
pub fn witness_rank_full(n: usize, field: FieldSpec) -> Result<AffineMatrixSpace> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let space = staircase(n, n - 1, field)?;
    debug_assert_eq!(*space.base(), shift_matrix(n, field));
    Ok(space)
}

/// `E_{1,2} + <E_{1,3}, ..., E_{1,n}>`, of dimension `n - 2`.
pub fn witness_rank_one(n: usize, field: FieldSpec) -> Result<AffineMatrixSpace> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    staircase(n, 1, field)
}

/// `J_2 + <[[0,1],[1,0]]>` over `F_2`: both members are nilpotent of rank 1.
pub fn counterexample_f2() -> AffineMatrixSpace {
    let f2 = FieldSpec::Prime(2);
    let swap = ExactMatrix::from_i64(f2, &[[0, 1], [1, 0]]).expect("2x2");
    AffineMatrixSpace::new(shift_matrix(2, f2), vec![swap]).expect("independent")
}

/// A space of dimension `conjecture_bound(n, r)` whose members are nilpotent of
/// rank exactly `r`, returned only after both properties are PROVED.
///
/// Over the rationals, or when exhaustive enumeration does not fit `budget`,
/// constant rank cannot be proved and `None` is returned.
pub fn witness_conjecture(
    n: usize,
    r: usize,
    field: FieldSpec,
    budget: &Budget,
) -> Result<Option<AffineMatrixSpace>> {
    conjecture_bound(n, r)?;
    let space = if r + 1 == n {
        witness_rank_full(n, field)?
    } else if r == 1 {
        witness_rank_one(n, field)?
    } else {
        staircase(n, r, field)?
    };
    let nil = verify_all_nilpotent(&space, budget);
    let rank = verify_constant_rank(&space, r, budget);
    match (nil, rank) {
        (Ok(a), Ok(b)) if a.is_proved() && b.is_proved() => Ok(Some(space)),
        _ => Ok(None),
    }
}
