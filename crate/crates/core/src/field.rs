//! Exact coefficient fields: the rationals and prime fields.
//!
//! A [`FieldTag`] names the field and acts as the arithmetic context for
//! [`Scalar`] values. All arithmetic is exact; there is deliberately no way to
//! build a scalar from a float.

use std::fmt;

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};

/// Largest admissible prime modulus. Products of two reduced residues must
/// fit in a `u64` before reduction.
const MAX_PRIME: u64 = 1 << 31;

fn is_prime(n: u64) -> bool {
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

/// Coefficient field selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldTag {
    /// The field of arbitrary-precision rationals.
    Rationals,
    /// The prime field with the given (validated) modulus.
    Prime(u64),
}

impl FieldTag {
    pub fn rationals() -> Self {
        FieldTag::Rationals
    }

    pub fn prime(p: u64) -> Result<Self> {
        if p >= MAX_PRIME || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldTag::Prime(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldTag::Rationals => 0,
            FieldTag::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldTag::Rationals => Scalar::Rat(BigRational::zero()),
            FieldTag::Prime(_) => Scalar::Mod(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldTag::Rationals => Scalar::Rat(BigRational::one()),
            FieldTag::Prime(_) => Scalar::Mod(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldTag::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            FieldTag::Prime(p) => {
                let m = n.rem_euclid(*p as i64) as u64;
                Scalar::Mod(m)
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldTag::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (FieldTag::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % p),
            _ => panic!("scalar does not belong to field {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldTag::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (FieldTag::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x * y) % p),
            _ => panic!("scalar does not belong to field {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldTag::Rationals, Scalar::Rat(x)) => Scalar::Rat(-x),
            (FieldTag::Prime(p), Scalar::Mod(x)) => Scalar::Mod(if *x == 0 { 0 } else { p - x }),
            _ => panic!("scalar does not belong to field {self}"),
        }
    }

    /// Multiplicative inverse; panics on zero (callers pivot on nonzero entries).
    pub fn inv(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldTag::Rationals, Scalar::Rat(x)) => {
                assert!(!x.is_zero(), "inverse of zero");
                Scalar::Rat(x.recip())
            }
            (FieldTag::Prime(p), Scalar::Mod(x)) => {
                assert!(*x != 0, "inverse of zero");
                Scalar::Mod(mod_inverse(*x, *p))
            }
            _ => panic!("scalar does not belong to field {self}"),
        }
    }
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rationals => write!(f, "q"),
            FieldTag::Prime(p) => write!(f, "fp {p}"),
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid on (a, p), p prime and a nonzero mod p
    let (mut r0, mut r1) = (a as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "inverse of a non-unit");
    s0.rem_euclid(p as i128) as u64
}

/// An element of one of the supported fields. The owning structure (matrix,
/// series, ...) records the [`FieldTag`]; a `Scalar` on its own only carries
/// the reduced value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod(u64),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Mod(x) => *x == 0,
        }
    }

    pub fn from_rational(r: BigRational) -> Scalar {
        Scalar::Rat(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(x) => {
                if x.denom().is_one() {
                    write!(f, "{}", x.numer())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
            Scalar::Mod(x) => write!(f, "{x}"),
        }
    }
}
