//! Coefficient domains: exact rationals and prime fields `F_p`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// Largest prime accepted for `F_p`; residues are multiplied in `u64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// Where polynomial coefficients live.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Domain {
    Rational,
    PrimeField(u64),
}

/// A coefficient. Which variant is valid is decided by the owning [`Domain`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue(u64),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
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

pub(crate) fn mod_inv(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        None
    } else {
        Some(mod_pow(a, p - 2, p))
    }
}

/// Reduces a (possibly negative) big integer into `[0, p)`.
pub(crate) fn reduce_bigint(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

impl Domain {
    /// Prime field `F_p`; `p` must be prime and at most [`MAX_PRIME`].
    pub fn prime_field(p: u64) -> Result<Self, AlgebraError> {
        if p > MAX_PRIME {
            return Err(AlgebraError::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(Domain::PrimeField(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Domain::Rational => 0,
            Domain::PrimeField(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Domain::Rational => Scalar::Rational(BigRational::zero()),
            Domain::PrimeField(_) => Scalar::Residue(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Domain::Rational => Scalar::Rational(BigRational::one()),
            Domain::PrimeField(_) => Scalar::Residue(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Domain::Rational => Scalar::Rational(BigRational::from_integer(n.into())),
            Domain::PrimeField(p) => Scalar::Residue(n.rem_euclid(*p as i64) as u64),
        }
    }

    /// Maps a rational into the domain. Fails over `F_p` when `p` divides the denominator.
    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar, AlgebraError> {
        match self {
            Domain::Rational => Ok(Scalar::Rational(q.clone())),
            Domain::PrimeField(p) => {
                let num = reduce_bigint(q.numer(), *p);
                let den = reduce_bigint(q.denom(), *p);
                let inv = mod_inv(den, *p).ok_or_else(|| AlgebraError::NotInvertible(q.to_string()))?;
                Ok(Scalar::Residue(num * inv % p))
            }
        }
    }

    /// Reduces a scalar of *another* domain into this one (rational → `F_p`, or identity).
    pub fn convert(&self, s: &Scalar) -> Result<Scalar, AlgebraError> {
        match (self, s) {
            (Domain::Rational, Scalar::Rational(_)) => Ok(s.clone()),
            (Domain::PrimeField(p), Scalar::Residue(r)) => Ok(Scalar::Residue(r % p)),
            (Domain::PrimeField(_), Scalar::Rational(q)) => self.from_rational(q),
            (Domain::Rational, Scalar::Residue(_)) => Err(AlgebraError::DomainMismatch),
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (Domain::Rational, Scalar::Rational(_)) => true,
            (Domain::PrimeField(p), Scalar::Residue(r)) => r < p,
            _ => false,
        }
    }

    pub fn is_zero(&self, s: &Scalar) -> bool {
        match s {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Residue(r) => *r == 0,
        }
    }

    pub fn is_one(&self, s: &Scalar) -> bool {
        match s {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Residue(r) => *r == 1,
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Domain::Rational, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            (Domain::PrimeField(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue((x + y) % p)
            }
            _ => panic!("scalar does not belong to {self:?}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Domain::Rational, Scalar::Rational(x)) => Scalar::Rational(-x),
            (Domain::PrimeField(p), Scalar::Residue(x)) => Scalar::Residue((p - x) % p),
            _ => panic!("scalar does not belong to {self:?}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Domain::Rational, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            (Domain::PrimeField(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(x * y % p)
            }
            _ => panic!("scalar does not belong to {self:?}"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar, AlgebraError> {
        match (self, a) {
            (Domain::Rational, Scalar::Rational(x)) => {
                if x.is_zero() {
                    Err(AlgebraError::NotInvertible("0".into()))
                } else {
                    Ok(Scalar::Rational(x.recip()))
                }
            }
            (Domain::PrimeField(p), Scalar::Residue(x)) => mod_inv(*x, *p)
                .map(Scalar::Residue)
                .ok_or_else(|| AlgebraError::NotInvertible(x.to_string())),
            _ => Err(AlgebraError::DomainMismatch),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar, AlgebraError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &Scalar, e: u32) -> Scalar {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// True when the canonical text of the scalar starts with a minus sign.
    pub(crate) fn is_negative(&self, s: &Scalar) -> bool {
        matches!(s, Scalar::Rational(q) if q.is_negative())
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Rational => write!(f, "Q"),
            Domain::PrimeField(p) => write!(f, "F_{p}"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Residue(r) => write!(f, "{r}"),
        }
    }
}

/// Parses `"p/q"`, `"p"`, or `"-p/q"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational, AlgebraError> {
    let s = s.trim();
    let bad = || AlgebraError::Parse(format!("invalid rational `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}
