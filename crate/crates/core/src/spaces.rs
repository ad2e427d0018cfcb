//! Affine matrix spaces `S = P + Z` and exact membership verifiers.
//!
//! Every entry of `(P + Σ t_i A_i)^n` is a polynomial of degree at most `n` in
//! each `t_i`, and every `(r+1)`-minor has degree at most `r + 1 <= n`. Such a
//! polynomial vanishes identically as soon as it vanishes on a product grid
//! with `n + 1` distinct points per axis, so evaluation on `{0, ..., n}^d`
//! certifies "all members nilpotent" and "all members have rank <= r". Over
//! `F_p` the whole space can also be enumerated, which additionally certifies
//! "rank >= r". Over `Q` that lower bound is only ever sampled.
//!
//! The grid argument for several parameters at once is the usual multivariate
//! extension of the one-parameter degree argument.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactmat::{self, inverse, mat_pow, rank, shift_matrix, vectors_rank, ExactMatrix};
use crate::field::{FieldSpec, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct AffineMatrixSpace {
    field: FieldSpec,
    n: usize,
    base: ExactMatrix,
    directions: Vec<ExactMatrix>,
}

/// `{"field": ..., "n": 4, "base": [[...]], "directions": [[[...]], ...]}`
#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    field: FieldSpec,
    n: usize,
    base: Vec<Vec<Value>>,
    directions: Vec<Vec<Vec<Value>>>,
}

impl TryFrom<SpaceRepr> for AffineMatrixSpace {
    type Error = Error;

    fn try_from(r: SpaceRepr) -> Result<Self> {
        let base = ExactMatrix::from_json_rows(r.field, &r.base)?;
        let directions = r
            .directions
            .iter()
            .map(|d| ExactMatrix::from_json_rows(r.field, d))
            .collect::<Result<Vec<_>>>()?;
        let space = AffineMatrixSpace::new(base, directions)?;
        if space.n != r.n {
            return Err(Error::DimensionMismatch(format!(
                "declared n = {} but matrices are {}x{}",
                r.n, space.n, space.n
            )));
        }
        Ok(space)
    }
}

impl From<AffineMatrixSpace> for SpaceRepr {
    fn from(s: AffineMatrixSpace) -> Self {
        SpaceRepr {
            field: s.field,
            n: s.n,
            base: s.base.to_json_rows(),
            directions: s.directions.iter().map(ExactMatrix::to_json_rows).collect(),
        }
    }
}

impl AffineMatrixSpace {
    /// Rejects non-square or mixed-field input and linearly dependent directions.
    pub fn new(base: ExactMatrix, directions: Vec<ExactMatrix>) -> Result<Self> {
        if !base.is_square() {
            return Err(Error::NotSquare {
                rows: base.rows(),
                cols: base.cols(),
            });
        }
        let (n, field) = (base.rows(), base.field());
        for d in &directions {
            if d.field() != field {
                return Err(Error::FieldMismatch {
                    expected: field,
                    found: d.field(),
                });
            }
            if d.rows() != n || d.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "direction is {}x{}, base is {n}x{n}",
                    d.rows(),
                    d.cols()
                )));
            }
        }
        let flat: Vec<Vec<Scalar>> = directions.iter().map(|d| d.entries().to_vec()).collect();
        let rank = vectors_rank(&flat);
        if rank != directions.len() {
            return Err(Error::DependentDirections {
                rank,
                count: directions.len(),
            });
        }
        Ok(AffineMatrixSpace {
            field,
            n,
            base,
            directions,
        })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn base(&self) -> &ExactMatrix {
        &self.base
    }

    pub fn directions(&self) -> &[ExactMatrix] {
        &self.directions
    }

    /// `base + Σ t_i directions[i]`.
    pub fn member(&self, t: &[Scalar]) -> Result<ExactMatrix> {
        if t.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a space of dimension {}",
                t.len(),
                self.dim()
            )));
        }
        let mut m = self.base.clone();
        for (c, d) in t.iter().zip(&self.directions) {
            if c.field() != self.field {
                return Err(Error::FieldMismatch {
                    expected: self.field,
                    found: c.field(),
                });
            }
            if !c.is_zero() {
                m = &m + &d.scale(c);
            }
        }
        Ok(m)
    }

    /// The direction `Z` seen as the affine space `0 + Z`.
    pub fn direction_space(&self) -> AffineMatrixSpace {
        AffineMatrixSpace {
            field: self.field,
            n: self.n,
            base: ExactMatrix::zeros(self.field, self.n, self.n),
            directions: self.directions.clone(),
        }
    }

    /// Spanning set `{P, A_1, ..., A_d}` of the linear span of the space.
    pub fn span_generators(&self) -> Vec<ExactMatrix> {
        std::iter::once(self.base.clone())
            .chain(self.directions.iter().cloned())
            .collect()
    }
}

/// Evaluation limits shared by all verifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest number of member evaluations an exact method may use.
    pub max_evaluations: u64,
    /// Random samples drawn when no exact method fits; 0 disables sampling.
    pub samples: u64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_evaluations: 10_000_000,
            samples: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerificationStatus {
    Refuted,
    SampledPass,
    Proved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    Grid { points_per_axis: u64 },
    Random { sample_count: u64, seed: u64 },
}

impl Method {
    fn strength(&self) -> u8 {
        match self {
            Method::Random { .. } => 0,
            Method::Grid { .. } => 1,
            Method::Exhaustive => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Coefficient vector selecting the offending member.
    pub coefficients: Vec<Scalar>,
    pub member: ExactMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Scalar>,
}

impl Witness {
    fn member(coefficients: Vec<Scalar>, member: ExactMatrix) -> Self {
        Witness {
            coefficients,
            member,
            basis_index: None,
            power: None,
            value: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationOutcome {
    pub status: VerificationStatus,
    pub witness: Option<Witness>,
    pub checks_performed: u64,
    pub method: Method,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationOutcome {
    pub fn is_proved(&self) -> bool {
        self.status == VerificationStatus::Proved
    }

    pub fn is_refuted(&self) -> bool {
        self.status == VerificationStatus::Refuted
    }

    /// Conjunction of two checks: a refutation wins, otherwise the weaker
    /// status and method are kept. Counters add up.
    pub fn merge(self, other: VerificationOutcome) -> VerificationOutcome {
        let checks = self.checks_performed + other.checks_performed;
        let mut notes = self.notes.clone();
        notes.extend(other.notes.iter().cloned());
        let (mut keep, drop) = if self.is_refuted() {
            (self, other)
        } else if other.is_refuted() {
            (other, self)
        } else if (other.status, other.method.strength()) < (self.status, self.method.strength()) {
            (other, self)
        } else {
            (self, other)
        };
        if keep.witness.is_none() {
            keep.witness = drop.witness;
        }
        keep.checks_performed = checks;
        keep.notes = notes;
        keep
    }
}

/// How members are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Exhaustive when it fits the budget, then grid, then sampling.
    Auto,
    /// Every member of a space over `F_p`.
    Exhaustive,
    /// The grid `{0, ..., n}^d`.
    Grid,
}

enum Plan {
    Exhaustive { radix: u64, total: u64 },
    Grid { points: u64, total: u64 },
    Random { count: u64, seed: u64 },
}

fn checked_power(base: u64, exp: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn power_u128(base: u64, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

fn plan(
    space: &AffineMatrixSpace,
    strategy: Strategy,
    grid_points: u64,
    budget: &Budget,
) -> Result<Plan> {
    let d = space.dim();
    let field = space.field;
    let fits = |radix: u64| checked_power(radix, d).filter(|&t| t <= budget.max_evaluations);
    let grid_ok = field.has_at_least(grid_points);
    let exhaustive = field
        .cardinality()
        .and_then(|p| fits(p).map(|total| Plan::Exhaustive { radix: p, total }));
    let grid = if grid_ok {
        fits(grid_points).map(|total| Plan::Grid {
            points: grid_points,
            total,
        })
    } else {
        None
    };
    let exceeded = |radix: u64| Error::BudgetExceeded {
        needed: power_u128(radix, d),
        budget: budget.max_evaluations,
    };
    match strategy {
        Strategy::Exhaustive => {
            let p = field.cardinality().ok_or_else(|| {
                Error::InvalidArgument("exhaustive enumeration needs a finite field".into())
            })?;
            exhaustive.ok_or_else(|| exceeded(p))
        }
        Strategy::Grid => {
            if !grid_ok {
                return Err(Error::FieldTooSmall(format!(
                    "a grid with {grid_points} distinct points per axis does not fit in {field}"
                )));
            }
            grid.ok_or_else(|| exceeded(grid_points))
        }
        Strategy::Auto => {
            if let Some(plan) = exhaustive.or(grid) {
                return Ok(plan);
            }
            if budget.samples == 0 {
                return Err(exceeded(
                    field
                        .cardinality()
                        .map_or(grid_points, |p| p.min(grid_points)),
                ));
            }
            Ok(Plan::Random {
                count: budget.samples,
                seed: budget.seed,
            })
        }
    }
}

fn digits_to_coefficients(field: FieldSpec, mut idx: u64, radix: u64, d: usize) -> Vec<Scalar> {
    (0..d)
        .map(|_| {
            let digit = idx % radix;
            idx /= radix;
            field.from_u64(digit)
        })
        .collect()
}

pub(crate) fn random_coefficients(
    field: FieldSpec,
    d: usize,
    count: u64,
    seed: u64,
) -> Vec<Vec<Scalar>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..d)
                .map(|_| match field {
                    FieldSpec::Prime(p) => field.from_u64(rng.gen_range(0..p)),
                    FieldSpec::Rational => {
                        let num = BigInt::from(rng.gen_range(-1_000_000i64..=1_000_000));
                        let den = BigInt::from(rng.gen_range(1i64..=1000));
                        field.ratio(&num, &den).expect("nonzero denominator")
                    }
                })
                .collect()
        })
        .collect()
}

/// Runs `holds` over the planned members; returns the first failure in
/// enumeration order (deterministic under parallel evaluation).
fn run_plan<F>(space: &AffineMatrixSpace, plan: &Plan, holds: F) -> Result<VerificationOutcome>
where
    F: Fn(&ExactMatrix) -> bool + Sync,
{
    let d = space.dim();
    let field = space.field;
    let check = |t: Vec<Scalar>| -> Option<Witness> {
        let m = space.member(&t).expect("coefficient count matches");
        (!holds(&m)).then(|| Witness::member(t, m))
    };
    let (failure, total, method, exact) = match *plan {
        Plan::Exhaustive { radix, total }
        | Plan::Grid {
            points: radix,
            total,
        } => {
            let found = (0..total)
                .into_par_iter()
                .map(|i| (i, check(digits_to_coefficients(field, i, radix, d))))
                .find_first(|(_, w)| w.is_some());
            let method = match plan {
                Plan::Exhaustive { .. } => Method::Exhaustive,
                _ => Method::Grid {
                    points_per_axis: radix,
                },
            };
            (found, total, method, true)
        }
        Plan::Random { count, seed } => {
            let samples = random_coefficients(field, d, count, seed);
            let found = samples
                .into_par_iter()
                .enumerate()
                .map(|(i, t)| (i as u64, check(t)))
                .find_first(|(_, w)| w.is_some());
            (
                found,
                count,
                Method::Random {
                    sample_count: count,
                    seed,
                },
                false,
            )
        }
    };
    Ok(match failure {
        Some((i, witness)) => VerificationOutcome {
            status: VerificationStatus::Refuted,
            witness,
            checks_performed: i + 1,
            method,
            notes: Vec::new(),
        },
        None => VerificationOutcome {
            status: if exact {
                VerificationStatus::Proved
            } else {
                VerificationStatus::SampledPass
            },
            witness: None,
            checks_performed: total,
            method,
            notes: Vec::new(),
        },
    })
}

fn nilpotent_n(m: &ExactMatrix, n: usize) -> bool {
    mat_pow(m, n as u64).expect("square").is_zero()
}

/// Decides whether every member of the space is nilpotent.
pub fn verify_all_nilpotent(
    space: &AffineMatrixSpace,
    budget: &Budget,
) -> Result<VerificationOutcome> {
    verify_all_nilpotent_with(space, Strategy::Auto, budget)
}

pub fn verify_all_nilpotent_with(
    space: &AffineMatrixSpace,
    strategy: Strategy,
    budget: &Budget,
) -> Result<VerificationOutcome> {
    let n = space.n;
    let plan = plan(space, strategy, n as u64 + 1, budget)?;
    run_plan(space, &plan, |m| nilpotent_n(m, n))
}

/// Decides whether every member has rank exactly `r`.
///
/// Over `F_p` with `p^d` inside the budget every member is checked. Otherwise
/// the grid certifies the upper bound `rank <= r` and the lower bound is only
/// sampled, which caps the status at `SAMPLED_PASS`.
pub fn verify_constant_rank(
    space: &AffineMatrixSpace,
    r: usize,
    budget: &Budget,
) -> Result<VerificationOutcome> {
    verify_constant_rank_with(space, r, Strategy::Auto, budget)
}

pub fn verify_constant_rank_with(
    space: &AffineMatrixSpace,
    r: usize,
    strategy: Strategy,
    budget: &Budget,
) -> Result<VerificationOutcome> {
    if r > space.n {
        return Err(Error::InvalidArgument(format!(
            "rank {r} exceeds n = {}",
            space.n
        )));
    }
    let holds = |m: &ExactMatrix| rank(m) == r;
    let plan = plan(space, strategy, space.n as u64 + 1, budget)?;
    let mut outcome = run_plan(space, &plan, holds)?;
    if outcome.is_refuted() {
        return Ok(outcome);
    }
    match plan {
        Plan::Exhaustive { .. } => Ok(outcome),
        Plan::Grid { .. } => {
            outcome.status = VerificationStatus::SampledPass;
            outcome.notes.push(format!(
                "rank <= {r} certified on the grid; rank >= {r} only checked at the sampled members"
            ));
            if budget.samples > 0 {
                let extra = run_plan(
                    space,
                    &Plan::Random {
                        count: budget.samples,
                        seed: budget.seed,
                    },
                    holds,
                )?;
                outcome = outcome.merge(extra);
            }
            Ok(outcome)
        }
        Plan::Random { .. } => Ok(outcome),
    }
}

/// Checks that every member of the direction space `Z` alone is nilpotent.
pub fn direction_nilpotency(
    space: &AffineMatrixSpace,
    budget: &Budget,
) -> Result<VerificationOutcome> {
    let mut outcome = verify_all_nilpotent(&space.direction_space(), budget)?;
    if !space.field.has_at_least(space.n as u64 + 1) {
        outcome.notes.push(format!(
            "warning: |K| < n + 1 = {}; nilpotency of the directions is not implied by that of the space",
            space.n + 1
        ));
    }
    Ok(outcome)
}

/// For a space with base `J_n`: every direction basis matrix has entry `(n, 1)` equal to zero.
/// Checking the basis suffices since the entry is linear.
pub fn corner_entry_check(space: &AffineMatrixSpace) -> Result<VerificationOutcome> {
    let n = space.n;
    if space.base != shift_matrix(n, space.field) {
        return Err(Error::PreconditionUnmet(
            "corner entry check requires base J_n".into(),
        ));
    }
    let mut outcome = VerificationOutcome {
        status: VerificationStatus::Proved,
        witness: None,
        checks_performed: 0,
        method: Method::Exhaustive,
        notes: Vec::new(),
    };
    for (i, d) in space.directions.iter().enumerate() {
        outcome.checks_performed += 1;
        if !d.get(n - 1, 0).is_zero() {
            let mut t = vec![space.field.zero(); space.dim()];
            t[i] = space.field.one();
            outcome.status = VerificationStatus::Refuted;
            outcome.witness = Some(Witness {
                basis_index: Some(i),
                ..Witness::member(t, d.clone())
            });
            break;
        }
    }
    Ok(outcome)
}

/// Conjugates the whole space: `P -> Q P Q^-1`, `A_i -> Q A_i Q^-1`.
pub fn change_basis(space: &AffineMatrixSpace, q: &ExactMatrix) -> Result<AffineMatrixSpace> {
    if q.rows() != space.n || q.cols() != space.n {
        return Err(Error::DimensionMismatch(format!(
            "change of basis is {}x{}, space is {n}x{n}",
            q.rows(),
            q.cols(),
            n = space.n
        )));
    }
    if q.field() != space.field {
        return Err(Error::FieldMismatch {
            expected: space.field,
            found: q.field(),
        });
    }
    let q_inv = inverse(q)?;
    let conj = |m: &ExactMatrix| &(q * m) * &q_inv;
    AffineMatrixSpace::new(
        conj(&space.base),
        space.directions.iter().map(conj).collect(),
    )
}

/// Every member of a space over `F_p`, in enumeration order (first coefficient fastest).
pub fn enumerate_members(space: &AffineMatrixSpace) -> Result<Vec<(Vec<Scalar>, ExactMatrix)>> {
    let p = space
        .field
        .cardinality()
        .ok_or_else(|| Error::InvalidArgument("enumeration needs a finite field".into()))?;
    let total = checked_power(p, space.dim())
        .ok_or_else(|| Error::Unsupported("member count overflows u64".into()))?;
    (0..total)
        .map(|i| {
            let t = digits_to_coefficients(space.field, i, p, space.dim());
            let m = space.member(&t)?;
            Ok((t, m))
        })
        .collect()
}

pub use exactmat::is_nilpotent;
