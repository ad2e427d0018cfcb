//! Dense exact matrices over `F_p` or `Q`.
//!
//! Index-based constructors ([`unit_matrix`], [`submatrix`]) take 1-based
//! indices; accessors such as [`ExactMatrix::get`] are 0-based.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::partitions::Partition;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    entries: Vec<Scalar>,
}

/// JSON form: `{"field": {"prime": 5} | "rational", "rows": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    field: FieldSpec,
    rows: Vec<Vec<Value>>,
}

impl TryFrom<MatrixRepr> for ExactMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        ExactMatrix::from_json_rows(r.field, &r.rows)
    }
}

impl From<ExactMatrix> for MatrixRepr {
    fn from(m: ExactMatrix) -> Self {
        MatrixRepr {
            field: m.field,
            rows: m.to_json_rows(),
        }
    }
}

impl ExactMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            field,
            entries: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = field.one();
        }
        m
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch(
                "matrix must have at least one row and column".into(),
            ));
        }
        let mut entries = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {c}",
                    i + 1,
                    row.len()
                )));
            }
            for s in row {
                if s.field() != field {
                    return Err(Error::FieldMismatch {
                        expected: field,
                        found: s.field(),
                    });
                }
                entries.push(s);
            }
        }
        Ok(ExactMatrix {
            rows: r,
            cols: c,
            field,
            entries,
        })
    }

    /// Convenience constructor from integer rows (reduced into the field).
    pub fn from_i64<R: AsRef<[i64]>>(field: FieldSpec, rows: &[R]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(field, rows)
    }

    pub fn from_json_rows(field: FieldSpec, rows: &[Vec<Value>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| field.scalar_from_json(v))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(field, rows)
    }

    pub fn to_json_rows(&self) -> Vec<Vec<Value>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Scalar::to_json).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i},{j}) out of range"
        );
        assert_eq!(v.field(), self.field, "scalar from a different field");
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field,
                found: other.field,
            });
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field,
                found: other.field,
            });
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (r, k, c) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(self.field, r, c);
        for i in 0..r {
            for l in 0..k {
                let a = &self.entries[i * k + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..c {
                    let b = &other.entries[l * c + j];
                    if !b.is_zero() {
                        let cur = &out.entries[i * c + j];
                        out.entries[i * c + j] = cur + &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        assert_eq!(s.field(), self.field, "scalar from a different field");
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        ExactMatrix {
            rows: self.cols,
            cols: self.rows,
            field: self.field,
            entries,
        }
    }

    pub fn trace(&self) -> Result<Scalar> {
        self.require_square()?;
        Ok((0..self.rows).fold(self.field.zero(), |acc, i| &acc + self.get(i, i)))
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Block-diagonal sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                expected: self.field,
                found: other.field,
            });
        }
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        let mut out = Self::zeros(self.field, r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * c + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.entries[(self.rows + i) * c + self.cols + j] = other.get(i, j).clone();
            }
        }
        Ok(out)
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;

    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.try_add(rhs).expect("matrix addition")
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;

    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.try_sub(rhs).expect("matrix subtraction")
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;

    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        self.try_mul(rhs).expect("matrix product")
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;

    fn neg(self) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            entries: self.entries.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, a) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// The nilpotent shift `J_n`: ones on the superdiagonal.
pub fn shift_matrix(n: usize, field: FieldSpec) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(field, n, n);
    for i in 0..n.saturating_sub(1) {
        m.set(i, i + 1, field.one());
    }
    m
}

/// `E_{i,j}` in `M(n x n)`, 1-based.
pub fn unit_matrix(i: usize, j: usize, n: usize, field: FieldSpec) -> Result<ExactMatrix> {
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::IndexOutOfRange(format!(
            "E_({i},{j}) in dimension {n}"
        )));
    }
    let mut m = ExactMatrix::zeros(field, n, n);
    m.set(i - 1, j - 1, field.one());
    Ok(m)
}

/// Row-reduces `rows` in place (forward elimination only) and returns the pivot columns.
/// Pivots are the first nonzero entry at or below the current row.
fn echelon(rows: &mut [Vec<Scalar>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].inv().expect("pivot is nonzero");
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let factor = &rows[i][c] * &inv;
            for k in c..cols {
                let sub = &factor * &rows[r][k];
                rows[i][k] = &rows[i][k] - &sub;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &ExactMatrix) -> usize {
    let mut rows: Vec<Vec<Scalar>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    echelon(&mut rows, m.cols).len()
}

/// Rank of a family of equal-length vectors.
pub fn vectors_rank(vectors: &[Vec<Scalar>]) -> usize {
    let Some(len) = vectors.first().map(Vec::len) else {
        return 0;
    };
    let mut rows = vectors.to_vec();
    echelon(&mut rows, len).len()
}

/// A basis of the right kernel `{x : m x = 0}`, one vector per free column, in
/// reduced echelon form (each basis vector is 1 at its free column and 0 at the others).
pub fn nullspace(m: &ExactMatrix) -> Vec<Vec<Scalar>> {
    let f = m.field;
    let mut rows: Vec<Vec<Scalar>> = (0..m.rows).map(|i| m.row(i).to_vec()).collect();
    let pivots = echelon(&mut rows, m.cols);
    back_substitute(&mut rows, &pivots, m.cols);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); m.cols];
            v[fc] = f.one();
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = -&rows[pr][fc];
            }
            v
        })
        .collect()
}

/// Turns a forward-eliminated system into reduced echelon form.
fn back_substitute(rows: &mut [Vec<Scalar>], pivots: &[usize], cols: usize) {
    for (pr, &pc) in pivots.iter().enumerate().rev() {
        let inv = rows[pr][pc].inv().expect("pivot is nonzero");
        for k in 0..cols {
            rows[pr][k] = &rows[pr][k] * &inv;
        }
        for i in 0..pr {
            if rows[i][pc].is_zero() {
                continue;
            }
            let factor = rows[i][pc].clone();
            for k in 0..cols {
                let sub = &factor * &rows[pr][k];
                rows[i][k] = &rows[i][k] - &sub;
            }
        }
    }
}

/// Reduced echelon basis of the span of `vectors`: each basis vector has a
/// leading 1 in a column where all the others vanish. Leading columns increase.
pub fn rref_basis(vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let Some(len) = vectors.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut rows = vectors.to_vec();
    let pivots = echelon(&mut rows, len);
    back_substitute(&mut rows, &pivots, len);
    rows.truncate(pivots.len());
    rows
}

pub fn inverse(m: &ExactMatrix) -> Result<ExactMatrix> {
    m.require_square()?;
    let n = m.rows;
    let f = m.field;
    let mut a: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let pr = (c..n)
            .find(|&i| !a[i][c].is_zero())
            .ok_or(Error::Singular)?;
        a.swap(c, pr);
        let inv = a[c][c].inv()?;
        for k in 0..2 * n {
            a[c][k] = &a[c][k] * &inv;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].clone();
            for k in 0..2 * n {
                let sub = &factor * &a[c][k];
                a[i][k] = &a[i][k] - &sub;
            }
        }
    }
    let rows = a.into_iter().map(|row| row[n..].to_vec()).collect();
    ExactMatrix::from_rows(f, rows)
}

/// `m^e` by repeated squaring; `m^0` is the identity.
pub fn mat_pow(m: &ExactMatrix, mut e: u64) -> Result<ExactMatrix> {
    m.require_square()?;
    let mut acc = ExactMatrix::identity(m.field, m.rows);
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    Ok(acc)
}

/// Smallest `k >= 1` with `m^k = 0`, or `None` when `m` is not nilpotent.
pub fn nilindex(m: &ExactMatrix) -> Result<Option<usize>> {
    m.require_square()?;
    let mut power = m.clone();
    for k in 1..=m.rows {
        if power.is_zero() {
            return Ok(Some(k));
        }
        power = &power * m;
    }
    Ok(None)
}

pub fn is_nilpotent(m: &ExactMatrix) -> Result<bool> {
    Ok(nilindex(m)?.is_some())
}

/// `[rank(m^0), rank(m^1), ..., rank(m^n)]`.
pub fn rank_sequence(m: &ExactMatrix) -> Result<Vec<usize>> {
    m.require_square()?;
    let mut ranks = vec![m.rows];
    let mut power = ExactMatrix::identity(m.field, m.rows);
    for _ in 0..m.rows {
        power = &power * m;
        ranks.push(rank(&power));
    }
    Ok(ranks)
}

/// Jordan block sizes of a nilpotent matrix, read off its rank sequence:
/// the number of blocks of size `>= j` is `rank(m^(j-1)) - rank(m^j)`.
pub fn jordan_partition(m: &ExactMatrix) -> Result<Partition> {
    let ranks = rank_sequence(m)?;
    if *ranks.last().expect("nonempty") != 0 {
        return Err(Error::NotNilpotent);
    }
    let counts: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let conj = Partition::new(m.rows, counts)
        .map_err(|e| Error::Inconsistent(format!("rank sequence: {e}")))?;
    Ok(conj.conjugate())
}

/// The block given by the 1-based, strictly increasing `rows` and `cols`.
pub fn submatrix(m: &ExactMatrix, rows: &[usize], cols: &[usize]) -> Result<ExactMatrix> {
    let check = |idx: &[usize], bound: usize, what: &str| -> Result<()> {
        if idx.is_empty() {
            return Err(Error::IndexOutOfRange(format!("empty {what} index list")));
        }
        if idx.iter().any(|&i| i == 0 || i > bound) {
            return Err(Error::IndexOutOfRange(format!(
                "{what} indices {idx:?} outside 1..={bound}"
            )));
        }
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::IndexOutOfRange(format!(
                "{what} indices {idx:?} not strictly increasing"
            )));
        }
        Ok(())
    };
    check(rows, m.rows, "row")?;
    check(cols, m.cols, "column")?;
    let out = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| m.get(i - 1, j - 1).clone()).collect())
        .collect();
    ExactMatrix::from_rows(m.field, out)
}
