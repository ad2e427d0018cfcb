//! Conjugation by polynomials in the shift `J`, and trace identities of
//! nilpotent spans.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmat::{nullspace, shift_matrix, vectors_rank, ExactMatrix};
use crate::field::{FieldSpec, Scalar};
use crate::spaces::{Budget, Method, VerificationOutcome, VerificationStatus, Witness};

/// `C = I + Σ_{i=1}^{n-1} c_i J^i`. Always invertible, and commutes with `J`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftPolynomial {
    n: usize,
    field: FieldSpec,
    coefficients: Vec<Scalar>,
}

impl ShiftPolynomial {
    /// `coefficients` holds `c_1, ..., c_{n-1}`.
    pub fn new(n: usize, field: FieldSpec, coefficients: Vec<Scalar>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if coefficients.len() != n - 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for n = {n}, expected {}",
                coefficients.len(),
                n - 1
            )));
        }
        if let Some(c) = coefficients.iter().find(|c| c.field() != field) {
            return Err(Error::FieldMismatch {
                expected: field,
                found: c.field(),
            });
        }
        Ok(ShiftPolynomial {
            n,
            field,
            coefficients,
        })
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        ShiftPolynomial {
            n,
            field,
            coefficients: vec![field.zero(); n.saturating_sub(1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coefficients
    }

    pub fn is_identity(&self) -> bool {
        self.coefficients.iter().all(Scalar::is_zero)
    }

    /// The nilpotent part `N = Σ c_i J^i` as an upper triangular Toeplitz matrix.
    fn nilpotent_part(&self) -> ExactMatrix {
        toeplitz(self.n, self.field, &self.field.zero(), &self.coefficients)
    }
}

/// Upper triangular Toeplitz matrix with `diag` on the diagonal and `upper[k-1]` on the k-th superdiagonal.
fn toeplitz(n: usize, field: FieldSpec, diag: &Scalar, upper: &[Scalar]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(field, n, n);
    for i in 0..n {
        m.set(i, i, diag.clone());
        for (k, c) in upper.iter().enumerate() {
            if i + k + 1 < n {
                m.set(i, i + k + 1, c.clone());
            }
        }
    }
    m
}

pub fn shift_poly_matrix(sp: &ShiftPolynomial) -> ExactMatrix {
    toeplitz(sp.n, sp.field, &sp.field.one(), &sp.coefficients)
}

/// Inverse via the finite Neumann series `I - N + N^2 - ... ± N^{n-1}`.
pub fn shift_poly_inverse(sp: &ShiftPolynomial) -> ShiftPolynomial {
    let n = sp.n;
    let field = sp.field;
    let neg_n = -&sp.nilpotent_part();
    let mut acc = ExactMatrix::identity(field, n);
    let mut term = ExactMatrix::identity(field, n);
    for _ in 1..n {
        term = &term * &neg_n;
        acc = &acc + &term;
    }
    // first row of an upper triangular Toeplitz matrix carries every coefficient
    let coefficients = (1..n).map(|j| acc.get(0, j).clone()).collect();
    ShiftPolynomial {
        n,
        field,
        coefficients,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugationSide {
    /// `C^{-1} A C`
    CInvAC,
    /// `C A C^{-1}`
    CACInv,
}

pub fn conjugate_by_shift(
    a: &ExactMatrix,
    sp: &ShiftPolynomial,
    side: ConjugationSide,
) -> Result<ExactMatrix> {
    if a.rows() != sp.n || a.cols() != sp.n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, shift polynomial has n = {}",
            a.rows(),
            a.cols(),
            sp.n
        )));
    }
    if a.field() != sp.field {
        return Err(Error::FieldMismatch {
            expected: sp.field,
            found: a.field(),
        });
    }
    let c = shift_poly_matrix(sp);
    let c_inv = shift_poly_matrix(&shift_poly_inverse(sp));
    Ok(match side {
        ConjugationSide::CInvAC => &(&c_inv * a) * &c,
        ConjugationSide::CACInv => &(&c * a) * &c_inv,
    })
}

/// Finds `C` with `B = C A C^{-1}` whose first column is `A[l][1] e_l`.
///
/// Requires `A[l][1] != 0` and `A[i][1] = 0` for `i > l` (1-based `l >= 2`).
/// Since `C^{-1} e_1 = e_1`, the first column of `B` is `C a` where `a` is that
/// of `A`, so `(C a)_{l-k} = a_{l-k} + Σ_{m<=k} c_m a_{l-k+m}` is cleared by
/// solving for `c_1, c_2, ...` in turn.
pub fn clear_first_column(a: &ExactMatrix, l: usize) -> Result<(ShiftPolynomial, ExactMatrix)> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let field = a.field();
    if l < 2 || l > n {
        return Err(Error::IndexOutOfRange(format!("row {l} outside 2..={n}")));
    }
    let col: Vec<Scalar> = (0..n).map(|i| a.get(i, 0).clone()).collect();
    let pivot = &col[l - 1];
    if pivot.is_zero() {
        return Err(Error::PreconditionUnmet(format!("entry ({l},1) is zero")));
    }
    if let Some(i) = (l..n).find(|&i| !col[i].is_zero()) {
        return Err(Error::PreconditionUnmet(format!(
            "entry ({},1) below row {l} is nonzero",
            i + 1
        )));
    }
    let pivot_inv = pivot.inv()?;
    let mut c = vec![field.zero(); n - 1];
    for k in 1..l {
        // row l-k (1-based) of C a, without the c_k a_l term
        let mut s = col[l - k - 1].clone();
        for m in 1..k {
            s = &s + &(&c[m - 1] * &col[l - k + m - 1]);
        }
        c[k - 1] = -&(&s * &pivot_inv);
    }
    let sp = ShiftPolynomial {
        n,
        field,
        coefficients: c,
    };
    let b = conjugate_by_shift(a, &sp, ConjugationSide::CACInv)?;
    Ok((sp, b))
}

/// `X -> Σ coeff[i][j] X[i][j]`.
pub fn pairing(coeff: &ExactMatrix, x: &ExactMatrix) -> Scalar {
    coeff
        .entries()
        .iter()
        .zip(x.entries())
        .fold(coeff.field().zero(), |acc, (c, v)| &acc + &(c * v))
}

/// Coefficient matrices of the functionals `X -> tr(P^m X)` for `m = 0..=m_max`
/// (equal to `tr(X P^m)`), with zero and linearly dependent ones dropped.
///
/// When every member of `P + Z` is nilpotent and `|K| >= n + 1`, the span of
/// `P + Z` consists of nilpotent matrices, so every direction lies in the
/// common kernel as long as `m_max < |K|`.
pub fn linear_trace_constraints(p: &ExactMatrix, m_max: usize) -> Result<Vec<ExactMatrix>> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let mut kept: Vec<ExactMatrix> = Vec::new();
    let mut flat: Vec<Vec<Scalar>> = Vec::new();
    let mut power = ExactMatrix::identity(p.field(), p.rows());
    for m in 0..=m_max {
        if m > 0 {
            power = &power * p;
        }
        if power.is_zero() {
            break;
        }
        let coeff = power.transpose();
        flat.push(coeff.entries().to_vec());
        if vectors_rank(&flat) == flat.len() {
            kept.push(coeff);
        } else {
            flat.pop();
        }
    }
    Ok(kept)
}

/// The kernel constraints for `P = J_n` are the subdiagonal sums of `X`.
pub fn shift_trace_constraints(n: usize, field: FieldSpec) -> Vec<ExactMatrix> {
    linear_trace_constraints(&shift_matrix(n, field), n.saturating_sub(1)).expect("square")
}

/// Coefficient matrices `w u^T` of the functionals `X -> w^T X u` with `u` in
/// the kernel of `P` and `w` in the kernel of `P^T`.
///
/// If every member of the line `P + tX` has rank `r = rank(P)`, each
/// `(r+1)`-minor of `P + tX` is a polynomial of degree at most `r + 1` in `t`
/// vanishing on the whole field; when `|K| >= r + 2` its linear coefficient,
/// which is a combination of these functionals, must vanish too.
pub fn rank_tangent_constraints(p: &ExactMatrix) -> Result<Vec<ExactMatrix>> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let n = p.rows();
    let right = nullspace(p);
    let left = nullspace(&p.transpose());
    let mut out = Vec::with_capacity(right.len() * left.len());
    for w in &left {
        for u in &right {
            let rows = (0..n)
                .map(|i| (0..n).map(|j| &w[i] * &u[j]).collect())
                .collect();
            out.push(ExactMatrix::from_rows(p.field(), rows)?);
        }
    }
    Ok(out)
}

/// Checks `tr(A^m B) = 0` for every `A` in the span of `basis`, every `B` in
/// `basis` and `1 <= m <= m_max`.
///
/// `tr((Σ s_i A_i)^m B)` has degree at most `m_max` in each `s_i`, so the grid
/// `{0, ..., m_max}^d` is a certificate once it fits in the field.
pub fn trace_condition_verify(
    basis: &[ExactMatrix],
    m_max: usize,
    field: FieldSpec,
) -> Result<VerificationOutcome> {
    trace_condition_verify_with(basis, m_max, field, &Budget::default())
}

pub fn trace_condition_verify_with(
    basis: &[ExactMatrix],
    m_max: usize,
    field: FieldSpec,
    budget: &Budget,
) -> Result<VerificationOutcome> {
    if !field.has_at_least(m_max as u64 + 1) {
        return Err(Error::FieldTooSmall(format!(
            "m_max = {m_max} requires |K| > {m_max}"
        )));
    }
    let Some(first) = basis.first() else {
        return Err(Error::InvalidArgument("empty basis".into()));
    };
    let n = first.rows();
    for b in basis {
        if b.field() != field {
            return Err(Error::FieldMismatch {
                expected: field,
                found: b.field(),
            });
        }
        if b.rows() != n || b.cols() != n {
            return Err(Error::DimensionMismatch(
                "basis matrices differ in shape".into(),
            ));
        }
    }
    let d = basis.len();
    let points = m_max as u64 + 1;
    let total = (0..d).try_fold(1u64, |acc, _| acc.checked_mul(points));
    let total = match total {
        Some(t) if t <= budget.max_evaluations => t,
        _ => {
            return Err(Error::BudgetExceeded {
                needed: (points as u128).saturating_pow(d as u32),
                budget: budget.max_evaluations,
            })
        }
    };
    let check = |idx: u64| -> Option<Witness> {
        let mut rest = idx;
        let s: Vec<Scalar> = (0..d)
            .map(|_| {
                let digit = rest % points;
                rest /= points;
                field.from_u64(digit)
            })
            .collect();
        let a = s
            .iter()
            .zip(basis)
            .filter(|(c, _)| !c.is_zero())
            .fold(ExactMatrix::zeros(field, n, n), |acc, (c, b)| {
                &acc + &b.scale(c)
            });
        let mut power = ExactMatrix::identity(field, n);
        for m in 1..=m_max {
            power = &power * &a;
            for (i, b) in basis.iter().enumerate() {
                let value = (&power * b).trace().expect("square");
                if !value.is_zero() {
                    return Some(Witness {
                        coefficients: s,
                        member: a,
                        basis_index: Some(i),
                        power: Some(m as u64),
                        value: Some(value),
                    });
                }
            }
        }
        None
    };
    let found = (0..total)
        .into_par_iter()
        .map(|i| (i, check(i)))
        .find_first(|(_, w)| w.is_some());
    Ok(match found {
        Some((i, witness)) => VerificationOutcome {
            status: VerificationStatus::Refuted,
            witness,
            checks_performed: i + 1,
            method: Method::Grid {
                points_per_axis: points,
            },
            notes: Vec::new(),
        },
        None => VerificationOutcome {
            status: VerificationStatus::Proved,
            witness: None,
            checks_performed: total,
            method: Method::Grid {
                points_per_axis: points,
            },
            notes: Vec::new(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{jordan_partition, nilindex, rank, unit_matrix};

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn sp(n: usize, field: FieldSpec, c: &[i64]) -> ShiftPolynomial {
        ShiftPolynomial::new(n, field, c.iter().map(|&v| field.from_i64(v)).collect()).unwrap()
    }

    #[test]
    fn shift_poly_matrix_examples() {
        let fl = f(5);
        assert_eq!(
            shift_poly_matrix(&sp(3, fl, &[0, 0])),
            ExactMatrix::identity(fl, 3)
        );
        let j = shift_matrix(3, fl);
        assert_eq!(
            shift_poly_matrix(&sp(3, fl, &[1, 0])),
            &ExactMatrix::identity(fl, 3) + &j
        );
        assert_eq!(
            shift_poly_matrix(&sp(3, fl, &[1, 1])),
            ExactMatrix::from_i64(fl, &[[1, 1, 1], [0, 1, 1], [0, 0, 1]]).unwrap()
        );
        assert!(ShiftPolynomial::new(3, fl, vec![fl.one()]).is_err());
    }

    #[test]
    fn inverse_examples() {
        let q = FieldSpec::Rational;
        assert!(shift_poly_inverse(&sp(4, q, &[0, 0, 0])).is_identity());
        assert_eq!(shift_poly_inverse(&sp(3, q, &[1, 0])), sp(3, q, &[-1, 1]));
        let c = sp(5, q, &[3, -2, 7, 1]);
        let prod = &shift_poly_matrix(&c) * &shift_poly_matrix(&shift_poly_inverse(&c));
        assert_eq!(prod, ExactMatrix::identity(q, 5));
        assert_eq!(shift_poly_inverse(&shift_poly_inverse(&c)), c);
    }

    #[test]
    fn conjugation_fixes_j() {
        let fl = f(7);
        let j = shift_matrix(4, fl);
        let c = sp(4, fl, &[2, 5, 3]);
        assert_eq!(
            conjugate_by_shift(&j, &c, ConjugationSide::CInvAC).unwrap(),
            j
        );
        assert_eq!(
            conjugate_by_shift(&j, &c, ConjugationSide::CACInv).unwrap(),
            j
        );
        let a = unit_matrix(2, 1, 4, fl).unwrap();
        assert_eq!(
            conjugate_by_shift(
                &a,
                &ShiftPolynomial::identity(4, fl),
                ConjugationSide::CInvAC
            )
            .unwrap(),
            a
        );
    }

    #[test]
    fn clear_first_column_example() {
        let fl = f(5);
        let a = ExactMatrix::from_i64(fl, &[[1, 0, 0], [1, 0, 0], [1, 0, 0]]).unwrap();
        let (c, b) = clear_first_column(&a, 3).unwrap();
        assert_eq!(c, sp(3, fl, &[-1, 0]));
        assert_eq!(
            (0..3).map(|i| b.get(i, 0).clone()).collect::<Vec<_>>(),
            vec![fl.zero(), fl.zero(), fl.one()]
        );
    }

    #[test]
    fn clear_first_column_already_clean() {
        let fl = f(7);
        let a = ExactMatrix::from_i64(fl, &[[0, 1, 2], [3, 0, 4], [0, 5, 6]]).unwrap();
        let (c, b) = clear_first_column(&a, 2).unwrap();
        assert!(c.is_identity());
        assert_eq!(b, a);
    }

    #[test]
    fn clear_first_column_preconditions() {
        let fl = f(7);
        let a = ExactMatrix::from_i64(fl, &[[1, 0, 0], [0, 0, 0], [1, 0, 0]]).unwrap();
        assert!(matches!(
            clear_first_column(&a, 2),
            Err(Error::PreconditionUnmet(_))
        ));
        let b = ExactMatrix::from_i64(fl, &[[1, 0, 0], [1, 0, 0], [0, 0, 0]]).unwrap();
        assert!(matches!(
            clear_first_column(&b, 3),
            Err(Error::PreconditionUnmet(_))
        ));
        assert!(matches!(
            clear_first_column(&b, 1),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn clear_first_column_preserves_similarity_invariants() {
        let fl = f(7);
        // nilpotent with nonzero first column: J_3 transposed
        let a = shift_matrix(3, fl).transpose();
        let (c, b) = clear_first_column(&a, 2).unwrap();
        assert!(b.get(0, 0).is_zero());
        assert_eq!(b.get(1, 0), a.get(1, 0));
        assert_eq!(rank(&a), rank(&b));
        assert_eq!(nilindex(&a).unwrap(), nilindex(&b).unwrap());
        assert_eq!(jordan_partition(&a).unwrap(), jordan_partition(&b).unwrap());
        assert_eq!(
            conjugate_by_shift(&b, &c, ConjugationSide::CInvAC).unwrap(),
            a
        );
    }

    #[test]
    fn trace_constraint_examples() {
        let fl = f(7);
        for n in 1..=5 {
            let cs = shift_trace_constraints(n, fl);
            assert_eq!(cs.len(), n);
            assert_eq!(cs[0], ExactMatrix::identity(fl, n));
            // tr(J^m X) is the m-th subdiagonal sum of X
            for (m, c) in cs.iter().enumerate() {
                for i in 0..n {
                    for j in 0..n {
                        let expect = if i == j + m { 1 } else { 0 };
                        assert_eq!(*c.get(i, j), fl.from_i64(expect));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_verifier_examples() {
        let fl = f(7);
        for n in 2..=5 {
            let j = shift_matrix(n, fl);
            let out = trace_condition_verify(&[j.clone()], n - 1, fl).unwrap();
            assert!(out.is_proved());
            let bad =
                trace_condition_verify(&[j, unit_matrix(n, 1, n, fl).unwrap()], n - 1, fl).unwrap();
            assert!(bad.is_refuted());
            let w = bad.witness.unwrap();
            assert_eq!(w.power, Some(n as u64 - 1));
            assert_eq!(w.value, Some(fl.one()));
            assert_eq!(w.basis_index, Some(1));
        }
        assert!(matches!(
            trace_condition_verify(&[shift_matrix(3, f(3))], 3, f(3)),
            Err(Error::FieldTooSmall(_))
        ));
    }

    #[test]
    fn rank_tangent_constraints_for_jordan_bases() {
        let fl = f(5);
        // J_3 + J_1: kernel e1, e4; cokernel e3, e4
        let p = shift_matrix(3, fl)
            .direct_sum(&ExactMatrix::zeros(fl, 1, 1))
            .unwrap();
        let cs = rank_tangent_constraints(&p).unwrap();
        assert_eq!(cs.len(), 4);
        let mut support: Vec<(usize, usize)> = cs
            .iter()
            .map(|c| {
                let k = c.entries().iter().position(|x| !x.is_zero()).unwrap();
                (k / 4, k % 4)
            })
            .collect();
        support.sort();
        assert_eq!(support, vec![(2, 0), (2, 3), (3, 0), (3, 3)]);
    }
}
