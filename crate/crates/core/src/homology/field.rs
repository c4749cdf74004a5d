//! Coefficient fields: exact rationals with an `i64` fast path, and `F_p`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coefficient ring for homology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Coefficients {
    #[default]
    Rationals,
    Prime(u32),
    Integers,
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Rationals => write!(f, "q"),
            Coefficients::Prime(p) => write!(f, "p:{p}"),
            Coefficients::Integers => write!(f, "z"),
        }
    }
}

impl FromStr for Coefficients {
    type Err = Error;

    /// `q`, `z` or `p:PRIME`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "q" => Ok(Coefficients::Rationals),
            "z" => Ok(Coefficients::Integers),
            other => {
                let p = other
                    .strip_prefix("p:")
                    .and_then(|p| p.parse::<u32>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown field {s:?}: expected q, z or p:PRIME")))?;
                PrimeField::new(p)?;
                Ok(Coefficients::Prime(p))
            }
        }
    }
}

impl From<Coefficients> for String {
    fn from(c: Coefficients) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Coefficients {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// An exact rational, kept in `i64` while it fits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Q {
    Small(Rational64),
    Big(BigRational),
}

impl Q {
    pub fn zero() -> Q {
        Q::Small(Rational64::zero())
    }

    pub fn from_i64(v: i64) -> Q {
        Q::Small(Rational64::from_integer(v))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Q::Small(r) => r.is_zero(),
            Q::Big(r) => r.is_zero(),
        }
    }

    fn big(&self) -> BigRational {
        match self {
            Q::Small(r) => BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Q::Big(r) => r.clone(),
        }
    }

    fn normalize(r: BigRational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Q::Small(Rational64::new_raw(n, d)),
            _ => Q::Big(r),
        }
    }

    fn combine(
        &self,
        other: &Q,
        small: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Q {
        if let (Q::Small(a), Q::Small(b)) = (self, other) {
            if let Some(r) = small(a, b) {
                return Q::Small(r);
            }
        }
        Q::normalize(big(self.big(), other.big()))
    }

    pub fn add(&self, other: &Q) -> Q {
        self.combine(other, |a, b| a.checked_add(b), |a, b| a + b)
    }

    pub fn sub(&self, other: &Q) -> Q {
        self.combine(other, |a, b| a.checked_sub(b), |a, b| a - b)
    }

    pub fn mul(&self, other: &Q) -> Q {
        self.combine(other, |a, b| a.checked_mul(b), |a, b| a * b)
    }

    /// Panics on division by zero.
    pub fn div(&self, other: &Q) -> Q {
        assert!(!other.is_zero(), "division by zero");
        self.combine(other, |a, b| a.checked_div(b), |a, b| a / b)
    }

    pub fn neg(&self) -> Q {
        match self {
            Q::Small(r) if *r.numer() != i64::MIN => Q::Small(-r),
            _ => Q::normalize(-self.big()),
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Q::Small(r) => r.is_integer(),
            Q::Big(r) => r.is_integer(),
        }
    }

    /// The residue of this rational in `F_p`, as an integer in `[0, p)`.
    pub fn modulo(&self, p: u32) -> Result<Q> {
        let f = PrimeField::new(p)?;
        Ok(f.to_q(&f.from_q(self)?))
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(r) => write!(f, "{r}"),
            Q::Big(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Q {
    type Err = Error;

    fn from_str(s: &str) -> Result<Q> {
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Q::normalize(BigRational::new(n, d)))
    }
}

impl Serialize for Q {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Arithmetic used by the reductions.
#[allow(clippy::wrong_self_convention)]
pub(crate) trait Field: Sync + Send {
    type E: Clone + PartialEq + Send + Sync + fmt::Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_i64(&self, v: i64) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn div(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn to_q(&self, a: &Self::E) -> Q;
    fn from_q(&self, q: &Q) -> Result<Self::E>;
}

pub(crate) struct RationalField;

impl Field for RationalField {
    type E = Q;

    fn zero(&self) -> Q {
        Q::zero()
    }
    fn one(&self) -> Q {
        Q::from_i64(1)
    }
    fn from_i64(&self, v: i64) -> Q {
        Q::from_i64(v)
    }
    fn is_zero(&self, a: &Q) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Q, b: &Q) -> Q {
        a.add(b)
    }
    fn mul(&self, a: &Q, b: &Q) -> Q {
        a.mul(b)
    }
    fn div(&self, a: &Q, b: &Q) -> Q {
        a.div(b)
    }
    fn neg(&self, a: &Q) -> Q {
        a.neg()
    }
    fn to_q(&self, a: &Q) -> Q {
        a.clone()
    }
    fn from_q(&self, q: &Q) -> Result<Q> {
        Ok(q.clone())
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub(crate) fn new(p: u32) -> Result<Self> {
        let is_prime = p >= 2 && (2..).take_while(|d: &u32| (*d as u64) * (*d as u64) <= p as u64).all(|d| !p.is_multiple_of(d));
        if !is_prime {
            return Err(Error::Parse(format!("{p} is not a prime")));
        }
        Ok(Self { p: p as u64 })
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            exp >>= 1;
        }
        acc
    }

    fn reduce_big(&self, v: &BigInt) -> u64 {
        let m = v % BigInt::from(self.p);
        let m = if m.is_negative() { m + BigInt::from(self.p) } else { m };
        m.to_u64().expect("residue fits")
    }
}

impl Field for PrimeField {
    type E = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn div(&self, a: &u64, b: &u64) -> u64 {
        assert!(*b != 0, "division by zero");
        a * self.pow(*b, self.p - 2) % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a) % self.p
    }
    fn to_q(&self, a: &u64) -> Q {
        Q::from_i64(*a as i64)
    }
    fn from_q(&self, q: &Q) -> Result<u64> {
        let b = q.big();
        let n = self.reduce_big(b.numer());
        let d = self.reduce_big(b.denom());
        if d == 0 {
            return Err(Error::Parse(format!("{q} has no residue mod {}", self.p)));
        }
        Ok(self.div(&n, &d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_coefficients() {
        assert_eq!("q".parse::<Coefficients>().unwrap(), Coefficients::Rationals);
        assert_eq!("p:7".parse::<Coefficients>().unwrap(), Coefficients::Prime(7));
        assert_eq!("Z".parse::<Coefficients>().unwrap(), Coefficients::Integers);
        assert!("p:8".parse::<Coefficients>().is_err());
        assert!("r".parse::<Coefficients>().is_err());
        let json = serde_json::to_string(&Coefficients::Prime(3)).unwrap();
        assert_eq!(json, "\"p:3\"");
        assert_eq!(serde_json::from_str::<Coefficients>(&json).unwrap(), Coefficients::Prime(3));
    }

    #[test]
    fn rational_overflow_promotes() {
        let big = Q::from_i64(i64::MAX);
        let sum = big.add(&big);
        assert!(matches!(sum, Q::Big(_)));
        assert_eq!(sum.sub(&big), big);
        assert!(matches!(sum.sub(&big), Q::Small(_)));
        assert_eq!("-3/6".parse::<Q>().unwrap(), Q::from_i64(-1).div(&Q::from_i64(2)));
        assert_eq!(Q::from_i64(i64::MIN).neg().add(&Q::from_i64(i64::MIN)), Q::zero());
    }

    #[test]
    fn prime_field_inverse() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(&a, &f.div(&1, &a)), 1);
        }
        assert_eq!(f.from_q(&"1/2".parse().unwrap()).unwrap(), 4);
        assert!(f.from_q(&"1/7".parse().unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn rational_ops_match_bigrational(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let x = Q::Small(Rational64::new(a, b));
            let y = Q::Small(Rational64::new(c, d));
            let (bx, by) = (x.big(), y.big());
            prop_assert_eq!(x.add(&y).big(), &bx + &by);
            prop_assert_eq!(x.mul(&y).big(), &bx * &by);
            prop_assert_eq!(x.sub(&y).big(), &bx - &by);
            if !y.is_zero() {
                prop_assert_eq!(x.div(&y).big(), bx / by);
            }
        }
    }
}
