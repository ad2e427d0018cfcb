//! Exact scalars over a prime field `F_p` or the rationals.
//!
//! A [`Scalar`] always holds its canonical representative: a residue in
//! `[0, p)` or a fully reduced fraction with positive denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Largest accepted modulus; keeps every product of two residues inside a `u64`.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", try_from = "FieldRepr")]
pub enum FieldSpec {
    Prime(u64),
    Rational,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum FieldRepr {
    Prime(u64),
    Rational,
}

impl TryFrom<FieldRepr> for FieldSpec {
    type Error = Error;

    fn try_from(r: FieldRepr) -> Result<Self> {
        match r {
            FieldRepr::Prime(p) => FieldSpec::prime(p),
            FieldRepr::Rational => Ok(FieldSpec::Rational),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// Prime field `F_p`; rejects composite and oversized moduli.
    pub fn prime(p: u64) -> Result<Self> {
        if p > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::Prime(p))
    }

    /// `Some(p)` for `F_p`, `None` (infinite) for the rationals.
    pub fn cardinality(&self) -> Option<u64> {
        match *self {
            FieldSpec::Prime(p) => Some(p),
            FieldSpec::Rational => None,
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        self.cardinality()
    }

    /// True when the field has at least `k` elements.
    pub fn has_at_least(&self, k: u64) -> bool {
        self.cardinality().is_none_or(|q| q >= k)
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => Scalar::Mod {
                value: (v as i128).rem_euclid(p as i128) as u64,
                modulus: p,
            },
            FieldSpec::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => Scalar::Mod {
                value: v % p,
                modulus: p,
            },
            FieldSpec::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    fn from_bigint(&self, v: &BigInt) -> Scalar {
        match *self {
            FieldSpec::Prime(p) => {
                let bp = BigInt::from(p);
                let r = ((v % &bp) + &bp) % &bp;
                Scalar::Mod {
                    value: r.to_u64().expect("residue fits in u64"),
                    modulus: p,
                }
            }
            FieldSpec::Rational => Scalar::Rat(BigRational::from_integer(v.clone())),
        }
    }

    /// The scalar `num / den`.
    pub fn ratio(&self, num: &BigInt, den: &BigInt) -> Result<Scalar> {
        let d = self.from_bigint(den);
        self.from_bigint(num).checked_div(&d)
    }

    /// Parses a textual scalar: an integer or a fraction `a/b`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let parse_int = |t: &str| {
            BigInt::from_str(t.trim())
                .map_err(|_| Error::Parse(format!("bad scalar literal {s:?}")))
        };
        match s.split_once('/') {
            Some((a, b)) => self.ratio(&parse_int(a)?, &parse_int(b)?),
            None => Ok(self.from_bigint(&parse_int(s)?)),
        }
    }

    /// Reads a JSON scalar: an integer, or a string holding an integer or `a/b`.
    pub fn scalar_from_json(&self, v: &Value) -> Result<Scalar> {
        match v {
            Value::Number(num) => {
                if let Some(i) = num.as_i64() {
                    Ok(self.from_i64(i))
                } else if let Some(u) = num.as_u64() {
                    Ok(self.from_u64(u))
                } else {
                    Err(Error::Parse(format!("non-integer numeric entry {num}")))
                }
            }
            Value::String(s) => self.parse_scalar(s),
            other => Err(Error::Parse(format!("expected a scalar, found {other}"))),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "F_{p}"),
            FieldSpec::Rational => write!(f, "Q"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { value: u64, modulus: u64 },
    Rat(BigRational),
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Mod { modulus, .. } => FieldSpec::Prime(*modulus),
            Scalar::Rat(_) => FieldSpec::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 0,
            Scalar::Rat(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 1,
            Scalar::Rat(q) => q.is_one(),
        }
    }

    /// Residue for `F_p` scalars.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Scalar::Mod { value, .. } => Some(*value),
            Scalar::Rat(_) => None,
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: pow_mod(*value, modulus - 2, *modulus),
                modulus: *modulus,
            },
            Scalar::Rat(q) => Scalar::Rat(q.recip()),
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, exp: u64) -> Scalar {
        match self {
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: pow_mod(*value, exp, *modulus),
                modulus: *modulus,
            },
            Scalar::Rat(q) => {
                let e = i32::try_from(exp).expect("exponent fits in i32");
                Scalar::Rat(q.pow(e))
            }
        }
    }

    /// Integers stay JSON numbers when they fit in `i64`; other rationals become `"a/b"`.
    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Mod { value, .. } => Value::from(*value),
            Scalar::Rat(q) if q.is_integer() => match q.numer().to_i64() {
                Some(i) => Value::from(i),
                None => Value::String(q.numer().to_string()),
            },
            Scalar::Rat(q) => Value::String(format!("{}/{}", q.numer(), q.denom())),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { value, .. } => write!(f, "{value}"),
            Scalar::Rat(q) => write!(f, "{q}"),
        }
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (
                Scalar::Mod {
                    value: a,
                    modulus: p,
                },
                Scalar::Mod {
                    value: b,
                    modulus: q,
                },
            ) if p == q => Scalar::Mod {
                value: (a + b) % p,
                modulus: *p,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (
                Scalar::Mod {
                    value: a,
                    modulus: p,
                },
                Scalar::Mod {
                    value: b,
                    modulus: q,
                },
            ) if p == q => Scalar::Mod {
                value: (a + p - b) % p,
                modulus: *p,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            _ => mismatch(self, rhs),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (
                Scalar::Mod {
                    value: a,
                    modulus: p,
                },
                Scalar::Mod {
                    value: b,
                    modulus: q,
                },
            ) if p == q => Scalar::Mod {
                value: a * b % p,
                modulus: *p,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { value, modulus } => Scalar::Mod {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
            Scalar::Rat(q) => Scalar::Rat(-q),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    )*};
}

forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_composite_and_tiny_moduli() {
        assert_eq!(FieldSpec::prime(4), Err(Error::NotPrime(4)));
        assert_eq!(FieldSpec::prime(1), Err(Error::NotPrime(1)));
        assert_eq!(FieldSpec::prime(0), Err(Error::NotPrime(0)));
        assert!(FieldSpec::prime(2).is_ok());
        assert!(FieldSpec::prime(65_521).is_ok());
        assert!(matches!(
            FieldSpec::prime(1 << 40),
            Err(Error::ModulusTooLarge(_))
        ));
    }

    #[test]
    fn canonical_representatives() {
        let f5 = FieldSpec::prime(5).unwrap();
        assert_eq!(f5.from_i64(-1).residue(), Some(4));
        assert_eq!(f5.from_i64(12).residue(), Some(2));
        let q = FieldSpec::Rational;
        let half = q.parse_scalar("2/4").unwrap();
        assert_eq!(half, q.parse_scalar("-1/-2").unwrap());
        assert_eq!(half.to_json(), Value::String("1/2".into()));
        assert_eq!(q.parse_scalar("6/3").unwrap().to_json(), Value::from(2));
    }

    #[test]
    fn division_by_zero_is_rejected() {
        let f7 = FieldSpec::prime(7).unwrap();
        assert_eq!(f7.zero().inv(), Err(Error::DivisionByZero));
        assert_eq!(
            FieldSpec::Rational.parse_scalar("1/0"),
            Err(Error::DivisionByZero)
        );
        assert_eq!(f7.parse_scalar("3/7"), Err(Error::DivisionByZero));
    }

    #[test]
    fn fractions_in_prime_fields() {
        let f7 = FieldSpec::prime(7).unwrap();
        // 1/3 = 5 mod 7
        assert_eq!(f7.parse_scalar("1/3").unwrap().residue(), Some(5));
    }

    #[test]
    fn field_json_forms() {
        let f: FieldSpec = serde_json::from_str(r#"{"prime": 5}"#).unwrap();
        assert_eq!(f, FieldSpec::Prime(5));
        let q: FieldSpec = serde_json::from_str(r#""rational""#).unwrap();
        assert_eq!(q, FieldSpec::Rational);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"prime": 6}"#).is_err());
        assert_eq!(
            serde_json::to_string(&FieldSpec::Prime(3)).unwrap(),
            r#"{"prime":3}"#
        );
        assert_eq!(
            serde_json::to_string(&FieldSpec::Rational).unwrap(),
            r#""rational""#
        );
    }

    fn prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 101, 65_521, 4_294_967_291])
    }

    proptest! {
        #[test]
        fn prime_field_axioms(p in prime(), a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
            let f = FieldSpec::prime(p).unwrap();
            let (a, b, c) = (f.from_i64(a), f.from_i64(b), f.from_i64(c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &(-&a), f.zero());
            prop_assert_eq!(&a - &a, f.zero());
            prop_assert_eq!(&a * &f.one(), a.clone());
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), f.one());
            }
        }

        #[test]
        fn rational_field_axioms(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let q = FieldSpec::Rational;
            let x = q.ratio(&a.into(), &b.into()).unwrap();
            let y = q.ratio(&c.into(), &d.into()).unwrap();
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            prop_assert_eq!(&x * &y, &y * &x);
            if !y.is_zero() {
                prop_assert_eq!((&x * &y).checked_div(&y).unwrap(), x.clone());
            }
        }
    }
}
