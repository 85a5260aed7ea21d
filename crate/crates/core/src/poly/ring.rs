use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::arith::{inv_mod, mul_mod};

/// A commutative ring whose elements are exact.
pub trait CoefficientRing: Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    /// `(u, v)` with the element equal to `u + v·r`, when both fit in `i64`.
    /// Rings without the generator `r` report `v = 0`.
    fn to_small(&self, a: &Self::Elem) -> Option<(i64, i64)>;
}

/// The integers, arbitrary precision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Integers;

impl CoefficientRing for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn from_i64(&self, n: i64) -> BigInt {
        BigInt::from(n)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn to_small(&self, a: &BigInt) -> Option<(i64, i64)> {
        a.to_i64().map(|u| (u, 0))
    }
}

/// `Z_p` for a prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegersMod {
    pub p: u64,
}

impl IntegersMod {
    pub fn new(p: u64) -> Self {
        assert!(crate::arith::is_prime(p), "{p} is not prime");
        IntegersMod { p }
    }

    pub fn inv(&self, a: u64) -> u64 {
        inv_mod(a, self.p)
    }
}

impl CoefficientRing for IntegersMod {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.p - a % self.p) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn is_zero(&self, a: &u64) -> bool {
        a % self.p == 0
    }
    fn to_small(&self, a: &u64) -> Option<(i64, i64)> {
        i64::try_from(*a).ok().map(|u| (u, 0))
    }
}

/// `u + v·r` with `r² + r + 1 = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Eisenstein {
    pub u: BigInt,
    pub v: BigInt,
}

impl Eisenstein {
    pub fn new(u: impl Into<BigInt>, v: impl Into<BigInt>) -> Self {
        Eisenstein {
            u: u.into(),
            v: v.into(),
        }
    }

    /// The generator `r`.
    pub fn r() -> Self {
        Eisenstein::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// `u² - uv + v²`, the product of the element with its conjugate.
    pub fn norm(&self) -> BigInt {
        &self.u * &self.u - &self.u * &self.v + &self.v * &self.v
    }

    pub fn conjugate(&self) -> Self {
        // r ↦ r² = -1 - r
        Eisenstein::new(&self.u - &self.v, -&self.v)
    }

    pub fn is_integer(&self) -> bool {
        self.v.is_zero()
    }
}

impl fmt::Display for Eisenstein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vr = if self.v.is_one() {
            "r".to_string()
        } else if (-&self.v).is_one() {
            "-r".to_string()
        } else {
            format!("{}r", self.v)
        };
        match (self.u.is_zero(), self.v.is_zero()) {
            (_, true) => write!(f, "{}", self.u),
            (true, false) => write!(f, "{vr}"),
            (false, false) => {
                if self.u.is_negative() {
                    write!(f, "{vr} - {}", -&self.u)
                } else {
                    write!(f, "{vr} + {}", self.u)
                }
            }
        }
    }
}

/// `Z[r]`, `r` a primitive cube root of unity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EisensteinIntegers;

impl CoefficientRing for EisensteinIntegers {
    type Elem = Eisenstein;

    fn zero(&self) -> Eisenstein {
        Eisenstein::default()
    }
    fn one(&self) -> Eisenstein {
        Eisenstein::new(1, 0)
    }
    fn from_i64(&self, n: i64) -> Eisenstein {
        Eisenstein::new(n, 0)
    }
    fn add(&self, a: &Eisenstein, b: &Eisenstein) -> Eisenstein {
        Eisenstein::new(&a.u + &b.u, &a.v + &b.v)
    }
    fn neg(&self, a: &Eisenstein) -> Eisenstein {
        Eisenstein::new(-&a.u, -&a.v)
    }
    fn mul(&self, a: &Eisenstein, b: &Eisenstein) -> Eisenstein {
        let vv = &a.v * &b.v;
        Eisenstein::new(&a.u * &b.u - &vv, &a.u * &b.v + &b.u * &a.v - vv)
    }
    fn is_zero(&self, a: &Eisenstein) -> bool {
        a.is_zero()
    }
    fn to_small(&self, a: &Eisenstein) -> Option<(i64, i64)> {
        Some((a.u.to_i64()?, a.v.to_i64()?))
    }
}

/// `b² - ab + a²` for the element `a·r + b`.
pub fn eisenstein_norm(c: &Eisenstein) -> BigInt {
    c.norm()
}
