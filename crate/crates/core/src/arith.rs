//! Machine-word number theory used across the crate: primality, Montgomery
//! multiplication for the multi-modular kernels, CRT and factorization.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn is_prime(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of `a` modulo the prime `p`; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Montgomery form arithmetic modulo an odd `q < 2^63`.
#[derive(Debug, Clone, Copy)]
pub struct Montgomery {
    pub q: u64,
    q_inv_neg: u64,
    r2: u64,
}

impl Montgomery {
    pub fn new(q: u64) -> Self {
        assert!(q % 2 == 1 && q < (1 << 63), "modulus must be odd and below 2^63");
        // Newton iteration for q^{-1} mod 2^64
        let mut inv = q;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % q as u128) as u64;
        let r2 = mul_mod(r, r, q);
        Montgomery {
            q,
            q_inv_neg: inv.wrapping_neg(),
            r2,
        }
    }

    #[inline]
    fn reduce(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.q_inv_neg);
        let u = ((t + m as u128 * self.q as u128) >> 64) as u64;
        if u >= self.q {
            u - self.q
        } else {
            u
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a as u128 * b as u128)
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.q, self.r2)
    }

    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.reduce(a as u128)
    }

    /// Montgomery image of a signed machine integer.
    #[inline]
    pub fn from_i64(&self, v: i64) -> u64 {
        let r = v.rem_euclid(self.q as i64) as u64;
        self.to_mont(r)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    pub fn one(&self) -> u64 {
        self.to_mont(1)
    }
}

/// Primes `q ≡ 1 (mod 6)` just below 2^62, in decreasing order. Every one of
/// them has a primitive cube root of unity.
pub fn channel_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = (1u64 << 62) - ((1u64 << 62) % 6) + 1;
    while out.len() < count {
        c -= 6;
        if is_prime(c) {
            out.push(c);
        }
    }
    out
}

/// A primitive cube root of unity modulo a prime `q ≡ 1 (mod 3)`.
pub fn cube_root_of_unity(q: u64) -> u64 {
    assert!(q % 3 == 1);
    for g in 2.. {
        let w = pow_mod(g, (q - 1) / 3, q);
        if w != 1 {
            return w;
        }
    }
    unreachable!()
}

/// Chinese remaindering of residues modulo pairwise coprime moduli, returning
/// the representative in the symmetric range `(-Q/2, Q/2]`.
pub fn crt_symmetric(residues: &[(u64, u64)]) -> BigInt {
    let mut modulus = BigUint::one();
    let mut value = BigUint::zero();
    for &(q, r) in residues {
        let qb = BigUint::from(q);
        // value + modulus * s ≡ r (mod q)
        let cur = (&value % &qb).to_u64().unwrap();
        let m_mod = (&modulus % &qb).to_u64().unwrap();
        let diff = (r + q - cur) % q;
        let s = mul_mod(diff, inv_mod(m_mod, q), q);
        value += &modulus * s;
        modulus *= qb;
    }
    let half = &modulus >> 1;
    if value > half {
        BigInt::from_biguint(Sign::Plus, value) - BigInt::from_biguint(Sign::Plus, modulus)
    } else {
        BigInt::from_biguint(Sign::Plus, value)
    }
}

pub fn bigint_mod(v: &BigInt, q: u64) -> u64 {
    let qb = BigInt::from(q);
    v.mod_floor(&qb).to_u64().unwrap()
}

/// Prime factorization `(prime, multiplicity)` of `|n|` in increasing order;
/// `n` must be nonzero.
pub fn factorize(n: &BigInt) -> Vec<(BigUint, usize)> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mag = n.abs().to_biguint().unwrap();
    if mag.is_one() {
        return Vec::new();
    }
    let map = num_prime::nt_funcs::factorize(mag);
    map.into_iter().collect()
}

/// Human-readable factorization in the style `- 2^5 · 3`.
pub fn format_factorization(n: &BigInt) -> String {
    if n.is_zero() {
        return "0".into();
    }
    let mut parts: Vec<String> = factorize(n)
        .into_iter()
        .map(|(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect();
    if parts.is_empty() {
        parts.push("1".into());
    }
    let body = parts.join(" · ");
    if n.is_negative() {
        format!("- {body}")
    } else {
        body
    }
}
