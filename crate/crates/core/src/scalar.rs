//! Base rings and their scalars.
//!
//! The base ring is picked at runtime. Scalars are untagged values; every
//! operation goes through the [`BaseRing`] that owns them, so containers
//! carry their ring once instead of per coefficient.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;

/// A commutative unital base ring `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseRing {
    /// Arbitrary precision integers.
    Integers,
    /// Exact rationals.
    Rationals,
    /// Residues modulo `m >= 2`.
    Modular(u64),
}

/// A value of some [`BaseRing`]. Rationals are always kept reduced with a
/// positive denominator; residues are kept in `0..m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Int(BigInt),
    Rat(BigRational),
    Mod(u64),
}

impl BaseRing {
    pub fn modular(m: u64) -> Result<Self, AlgebraError> {
        if m < 2 {
            return Err(AlgebraError::InvalidModulus(m));
        }
        Ok(BaseRing::Modular(m))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            BaseRing::Integers => Scalar::Int(BigInt::zero()),
            BaseRing::Rationals => Scalar::Rat(BigRational::zero()),
            BaseRing::Modular(_) => Scalar::Mod(0),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            BaseRing::Integers => Scalar::Int(v.clone()),
            BaseRing::Rationals => Scalar::Rat(BigRational::from_integer(v.clone())),
            BaseRing::Modular(m) => {
                let r = v.mod_floor(&BigInt::from(*m));
                Scalar::Mod(r.to_u64().expect("residue fits in u64"))
            }
        }
    }

    /// Maps a rational into the ring, if its denominator is invertible.
    pub fn from_rational(&self, v: &BigRational) -> Result<Scalar, AlgebraError> {
        match self {
            BaseRing::Rationals => Ok(Scalar::Rat(v.clone())),
            _ => {
                let num = self.from_bigint(v.numer());
                let den = self.from_bigint(v.denom());
                let inv = self
                    .inv(&den)
                    .ok_or_else(|| AlgebraError::NotInvertible(v.denom().to_string(), *self))?;
                Ok(self.mul(&num, &inv))
            }
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Int(v) => v.is_zero(),
            Scalar::Rat(v) => v.is_zero(),
            Scalar::Mod(v) => *v == 0,
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Int(v) => v.is_one(),
            Scalar::Rat(v) => v.is_one(),
            Scalar::Mod(v) => *v == 1,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x + y),
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (Scalar::Mod(x), Scalar::Mod(y)) => {
                let m = self.modulus();
                Scalar::Mod(((*x as u128 + *y as u128) % m as u128) as u64)
            }
            _ => panic!("scalar variants do not match ring {self:?}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Int(x) => Scalar::Int(-x),
            Scalar::Rat(x) => Scalar::Rat(-x),
            Scalar::Mod(x) => {
                let m = self.modulus();
                Scalar::Mod(if *x == 0 { 0 } else { m - x })
            }
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Int(x), Scalar::Int(y)) => Scalar::Int(x * y),
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (Scalar::Mod(x), Scalar::Mod(y)) => {
                let m = self.modulus();
                Scalar::Mod(((*x as u128 * *y as u128) % m as u128) as u64)
            }
            _ => panic!("scalar variants do not match ring {self:?}"),
        }
    }

    /// Multiplicative inverse, when it exists in this ring.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match a {
            Scalar::Int(x) => {
                if x.is_one() || (-x).is_one() {
                    Some(Scalar::Int(x.clone()))
                } else {
                    None
                }
            }
            Scalar::Rat(x) => (!x.is_zero()).then(|| Scalar::Rat(x.recip())),
            Scalar::Mod(x) => {
                let m = self.modulus() as i128;
                let e = (*x as i128).extended_gcd(&m);
                (e.gcd == 1).then(|| Scalar::Mod(e.x.rem_euclid(m) as u64))
            }
        }
    }

    pub fn two_invertible(&self) -> bool {
        match self {
            BaseRing::Integers => false,
            BaseRing::Rationals => true,
            BaseRing::Modular(m) => m % 2 == 1,
        }
    }

    /// `1/2`, or a capability error when 2 is not a unit.
    pub fn half(&self) -> Result<Scalar, AlgebraError> {
        self.inv(&self.from_i64(2))
            .ok_or(AlgebraError::TwoNotInvertible(*self))
    }

    /// Canonical representative of the class of `a` in `C/2C`, read back
    /// as an element of `C`.
    pub fn reduce_mod2(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (BaseRing::Integers, Scalar::Int(x)) => Scalar::Int(x.mod_floor(&BigInt::from(2))),
            (BaseRing::Rationals, _) => self.zero(),
            (BaseRing::Modular(m), Scalar::Mod(x)) => {
                if m % 2 == 0 {
                    Scalar::Mod(x % 2)
                } else {
                    Scalar::Mod(0)
                }
            }
            _ => panic!("scalar variants do not match ring {self:?}"),
        }
    }

    /// Whether the ring is a field (ℚ or ℤ/p).
    pub fn is_field(&self) -> bool {
        match self {
            BaseRing::Integers => false,
            BaseRing::Rationals => true,
            BaseRing::Modular(m) => is_prime(*m),
        }
    }

    /// Lift to a rational, for exact solving over ℚ. Residues lift to
    /// their representative in `0..m`.
    pub fn to_rational(&self, a: &Scalar) -> BigRational {
        match a {
            Scalar::Int(x) => BigRational::from_integer(x.clone()),
            Scalar::Rat(x) => x.clone(),
            Scalar::Mod(x) => BigRational::from_integer(BigInt::from(*x)),
        }
    }

    /// Lift to an integer when the value is integral.
    pub fn to_bigint(&self, a: &Scalar) -> Option<BigInt> {
        match a {
            Scalar::Int(x) => Some(x.clone()),
            Scalar::Rat(x) => x.is_integer().then(|| x.to_integer()),
            Scalar::Mod(x) => Some(BigInt::from(*x)),
        }
    }

    /// Whether `a` renders with a leading minus sign.
    pub fn is_negative(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Int(x) => x.is_negative(),
            Scalar::Rat(x) => x.is_negative(),
            Scalar::Mod(_) => false,
        }
    }

    pub fn render(&self, a: &Scalar) -> String {
        match a {
            Scalar::Int(x) => x.to_string(),
            Scalar::Rat(x) => {
                if x.is_integer() {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            }
            Scalar::Mod(x) => x.to_string(),
        }
    }

    fn modulus(&self) -> u64 {
        match self {
            BaseRing::Modular(m) => *m,
            _ => unreachable!("modulus of a non-modular ring"),
        }
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::Integers => write!(f, "z"),
            BaseRing::Rationals => write!(f, "q"),
            BaseRing::Modular(m) => write!(f, "mod:{m}"),
        }
    }
}

impl FromStr for BaseRing {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "z" | "Z" => Ok(BaseRing::Integers),
            "q" | "Q" => Ok(BaseRing::Rationals),
            _ => {
                let m = s
                    .strip_prefix("mod:")
                    .and_then(|m| m.parse::<u64>().ok())
                    .ok_or_else(|| AlgebraError::UnknownRing(s.to_string()))?;
                BaseRing::modular(m)
            }
        }
    }
}

pub(crate) fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
