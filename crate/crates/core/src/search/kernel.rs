//! Small dense matrices over `F_p` with byte entries, for the search inner loops.

use crate::error::{Error, Result};
use crate::exactmat::ExactMatrix;
use crate::field::FieldSpec;

pub(crate) const MAX_N: usize = 8;
const CELLS: usize = MAX_N * MAX_N;

/// Row-major with stride `n`; cells past `n*n` stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Mat(pub [u8; CELLS]);

impl Mat {
    pub const ZERO: Mat = Mat([0; CELLS]);
}

#[derive(Clone, Debug)]
pub(crate) struct Arith {
    pub p: u32,
    pub n: usize,
    pub nn: usize,
    bits: u32,
    inv: [u8; 256],
}

impl Arith {
    pub fn new(n: usize, field: FieldSpec) -> Result<Self> {
        let p = match field {
            FieldSpec::Prime(p) => p,
            FieldSpec::Rational => {
                return Err(Error::Unsupported(
                    "search runs over prime fields only".into(),
                ))
            }
        };
        if p > 251 {
            return Err(Error::Unsupported(format!(
                "search supports p <= 251, got {p}"
            )));
        }
        if n == 0 || n > MAX_N {
            return Err(Error::Unsupported(format!(
                "search supports 1 <= n <= {MAX_N}, got {n}"
            )));
        }
        let bits = 32 - (p as u32 - 1).leading_zeros();
        if (n * n) as u32 * bits > 128 {
            return Err(Error::Unsupported(format!(
                "{n}x{n} matrices over F_{p} do not fit a 128-bit key"
            )));
        }
        let p = p as u32;
        let mut inv = [0u8; 256];
        for a in 1..p {
            let b = (1..p).find(|b| a * b % p == 1).expect("prime modulus");
            inv[a as usize] = b as u8;
        }
        Ok(Arith {
            p,
            n,
            nn: n * n,
            bits,
            inv,
        })
    }

    pub fn from_exact(&self, m: &ExactMatrix) -> Mat {
        let mut out = Mat::ZERO;
        for (i, v) in m.entries().iter().enumerate() {
            out.0[i] = v.residue().expect("prime field entry") as u8;
        }
        out
    }

    pub fn to_exact(&self, m: &Mat) -> ExactMatrix {
        let field = FieldSpec::Prime(self.p as u64);
        let rows: Vec<Vec<i64>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| m.0[i * self.n + j] as i64).collect())
            .collect();
        ExactMatrix::from_i64(field, &rows).expect("square")
    }

    #[inline]
    pub fn add(&self, a: &Mat, b: &Mat) -> Mat {
        let mut out = *a;
        self.add_assign(&mut out, b);
        out
    }

    #[inline]
    pub fn add_assign(&self, a: &mut Mat, b: &Mat) {
        let p = self.p as u16;
        for i in 0..self.nn {
            let s = a.0[i] as u16 + b.0[i] as u16;
            a.0[i] = if s >= p { (s - p) as u8 } else { s as u8 };
        }
    }

    #[inline]
    pub fn scale(&self, a: &Mat, c: u32) -> Mat {
        let mut out = Mat::ZERO;
        for i in 0..self.nn {
            out.0[i] = (a.0[i] as u32 * c % self.p) as u8;
        }
        out
    }

    pub fn is_zero(&self, a: &Mat) -> bool {
        a.0[..self.nn].iter().all(|&x| x == 0)
    }

    /// Scales so that the first nonzero entry is 1; `None` for the zero matrix.
    #[inline]
    pub fn normalize(&self, a: &Mat) -> Option<Mat> {
        let lead = *a.0[..self.nn].iter().find(|&&x| x != 0)?;
        if lead == 1 {
            return Some(*a);
        }
        Some(self.scale(a, self.inv[lead as usize] as u32))
    }

    /// Packs the entries with the first cell most significant, so keys order
    /// like the flattened entries.
    #[inline]
    pub fn key(&self, a: &Mat) -> u128 {
        let mut k: u128 = 0;
        for i in 0..self.nn {
            k = (k << self.bits) | a.0[i] as u128;
        }
        k
    }

    #[inline]
    pub fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::ZERO;
        for i in 0..n {
            for j in 0..n {
                let mut s: u32 = 0;
                for l in 0..n {
                    s += a.0[i * n + l] as u32 * b.0[l * n + j] as u32;
                }
                out.0[i * n + j] = (s % self.p) as u8;
            }
        }
        out
    }

    pub fn trace(&self, a: &Mat) -> u32 {
        (0..self.n).map(|i| a.0[i * self.n + i] as u32).sum::<u32>() % self.p
    }

    pub fn rank(&self, a: &Mat) -> usize {
        let n = self.n;
        let p = self.p;
        let mut m = *a;
        let mut r = 0;
        for c in 0..n {
            let Some(pr) = (r..n).find(|&i| m.0[i * n + c] != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..n {
                    m.0.swap(pr * n + k, r * n + k);
                }
            }
            let inv = self.inv[m.0[r * n + c] as usize] as u32;
            for i in r + 1..n {
                let v = m.0[i * n + c] as u32;
                if v == 0 {
                    continue;
                }
                let f = v * inv % p;
                for k in c..n {
                    let sub = f * m.0[r * n + k] as u32 % p;
                    m.0[i * n + k] = ((m.0[i * n + k] as u32 + p - sub) % p) as u8;
                }
            }
            r += 1;
            if r == n {
                break;
            }
        }
        r
    }

    /// Nilpotent of rank exactly `r`. Such a matrix has at most `r + 1` as
    /// nilindex, and conversely rank `r` with `M^{r+1} = 0` is nilpotent.
    #[inline]
    pub fn nilpotent_of_rank(&self, m: &Mat, r: usize) -> bool {
        if self.trace(m) != 0 || self.rank(m) != r {
            return false;
        }
        let mut power = *m;
        for _ in 0..r {
            power = self.mul(&power, m);
            if self.is_zero(&power) {
                return true;
            }
        }
        self.is_zero(&power)
    }

    /// Every member `base + t a`, `t != 0`, is nilpotent of rank `r`.
    #[inline]
    pub fn line_ok(&self, base: &Mat, a: &Mat, r: usize) -> bool {
        let mut m = *base;
        for _ in 1..self.p {
            self.add_assign(&mut m, a);
            if !self.nilpotent_of_rank(&m, r) {
                return false;
            }
        }
        true
    }
}
