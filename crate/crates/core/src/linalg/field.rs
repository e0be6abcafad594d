//! Exact scalars over a prime field or the rationals.
//!
//! Scalars carry no field tag of their own beyond the variant; all arithmetic
//! goes through a [`FieldSpec`], which owns the modulus. Mixing variants is a
//! programming error and panics.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default modulus for generated packs.
pub const DEFAULT_PRIME: u64 = 32003;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime(u64),
    Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod(u64),
    Rat(BigRational),
}

fn is_prime(p: u64) -> bool {
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
    /// Prime field of order `p`. Moduli are capped at 2^32 so products fit a `u64`.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= 1 << 32 {
            return Err(Error::input(format!("modulus {p} exceeds 2^32")));
        }
        if !is_prime(p) {
            return Err(Error::input(format!("modulus {p} is not prime")));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn default_prime() -> Self {
        FieldSpec::Prime(DEFAULT_PRIME)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Prime(p) => *p,
            FieldSpec::Rational => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Prime(_) => Scalar::Mod(0),
            FieldSpec::Rational => Scalar::Rat(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Prime(_) => Scalar::Mod(1),
            FieldSpec::Rational => Scalar::Rat(BigRational::one()),
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            FieldSpec::Prime(p) => Scalar::Mod(v.rem_euclid(*p as i64) as u64),
            FieldSpec::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Mod(v) => *v == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % p),
            (FieldSpec::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Prime(p), Scalar::Mod(x)) => Scalar::Mod((p - x) % p),
            (FieldSpec::Rational, Scalar::Rat(x)) => Scalar::Rat(-x),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(x * y % p),
            (FieldSpec::Rational, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    /// `acc += a * b`, the inner loop of every elimination.
    pub fn mul_add_assign(&self, acc: &mut Scalar, a: &Scalar, b: &Scalar) {
        match (self, acc, a, b) {
            (FieldSpec::Prime(p), Scalar::Mod(s), Scalar::Mod(x), Scalar::Mod(y)) => {
                *s = (*s + x * y % p) % p;
            }
            (FieldSpec::Rational, Scalar::Rat(s), Scalar::Rat(x), Scalar::Rat(y)) => {
                *s += x * y;
            }
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (FieldSpec::Prime(p), Scalar::Mod(x)) => Some(Scalar::Mod(mod_pow(*x, p - 2, *p))),
            (FieldSpec::Rational, Scalar::Rat(x)) => Some(Scalar::Rat(x.recip())),
            _ => panic!("scalar does not belong to {self}"),
        }
    }

    /// Fixed string encoding: decimal residues for prime fields, reduced
    /// `num/den` with positive denominator for the rationals.
    pub fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Mod(v) => v.to_string(),
            Scalar::Rat(r) => format!("{}/{}", r.numer(), r.denom()),
        }
    }

    pub fn parse(&self, s: &str) -> Result<Scalar> {
        match self {
            FieldSpec::Prime(p) => {
                let v: u64 = s
                    .parse()
                    .map_err(|_| Error::input(format!("`{s}` is not a residue mod {p}")))?;
                if v >= *p {
                    return Err(Error::input(format!("`{s}` is not canonical mod {p}")));
                }
                Ok(Scalar::Mod(v))
            }
            FieldSpec::Rational => {
                let bad = || Error::input(format!("`{s}` is not a reduced fraction"));
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if !d.is_positive() {
                    return Err(bad());
                }
                let r = BigRational::new(n.clone(), d.clone());
                if r.numer() != &n || r.denom() != &d {
                    return Err(bad());
                }
                Ok(Scalar::Rat(r))
            }
        }
    }
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "GF({p})"),
            FieldSpec::Rational => write!(f, "Q"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            FieldSpec::Prime(p) => FieldRepr { kind: "prime".into(), p: Some(*p) },
            FieldSpec::Rational => FieldRepr { kind: "rational".into(), p: None },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = FieldRepr::deserialize(d)?;
        match (repr.kind.as_str(), repr.p) {
            ("prime", Some(p)) => FieldSpec::prime(p).map_err(D::Error::custom),
            ("prime", None) => Err(D::Error::custom("prime field needs `p`")),
            ("rational", None) => Ok(FieldSpec::Rational),
            ("rational", Some(_)) => Err(D::Error::custom("rational field carries no modulus")),
            (k, _) => Err(D::Error::custom(format!("unknown field kind `{k}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_and_tiny_moduli() {
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(0).is_err());
        assert!(FieldSpec::prime(32004).is_err());
        assert!(FieldSpec::prime(2).is_ok());
        assert!(FieldSpec::prime(32003).is_ok());
    }

    #[test]
    fn inverse_round_trips() {
        let f = FieldSpec::prime(7).unwrap();
        for v in 1..7 {
            let a = f.from_i64(v);
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
        }
        assert!(f.inv(&f.zero()).is_none());
    }

    #[test]
    fn scalar_strings() {
        let f = FieldSpec::prime(5).unwrap();
        assert_eq!(f.format(&f.from_i64(-1)), "4");
        assert!(f.parse("5").is_err());
        assert!(f.parse("-1").is_err());
        let q = FieldSpec::Rational;
        let half = q.parse("1/2").unwrap();
        assert_eq!(q.format(&half), "1/2");
        assert_eq!(q.format(&q.from_i64(3)), "3/1");
        assert!(q.parse("2/4").is_err());
        assert!(q.parse("1/-2").is_err());
        assert_eq!(q.parse("-3").unwrap(), q.from_i64(-3));
    }

    #[test]
    fn field_json_shape() {
        let s = serde_json::to_string(&FieldSpec::Prime(32003)).unwrap();
        assert_eq!(s, r#"{"kind":"prime","p":32003}"#);
        let r: FieldSpec = serde_json::from_str(r#"{"kind":"rational"}"#).unwrap();
        assert_eq!(r, FieldSpec::Rational);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"kind":"rational","p":3}"#).is_err());
        assert!(serde_json::from_str::<FieldSpec>(r#"{"kind":"prime","p":9}"#).is_err());
        assert!(serde_json::from_str::<FieldSpec>(r#"{"kind":"prime","p":7,"x":1}"#).is_err());
    }
}
