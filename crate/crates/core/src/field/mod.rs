//! Exact arithmetic over `F_p` and the `tau`/`iota` lifting maps.
//!
//! `tau` sends a field element to its representative in `{0, ..., p-1}`;
//! `iota` reduces an integer (or a rational with denominator coprime to `p`)
//! back into the field. All element values are kept reduced at all times.

mod matrix;
mod rational;

pub use matrix::{FpMatrix, RrefResult};
pub use rational::OverP;

use crate::{Error, Result};

/// A validated odd prime, `2 < p < 2^31`.
///
/// The upper bound keeps every product of two reduced values inside `u64`
/// without modular-multiplication tricks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p <= 2 || p >= (1 << 31) {
            return Err(Error::PrimeOutOfRange(p));
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for Prime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial-division primality test; p < 2^31 keeps this cheap.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut f = 11u64;
    while f * f <= n {
        if n % f == 0 || n % (f + 2) == 0 {
            return false;
        }
        f += 6;
    }
    true
}

/// An element of `F_p`. The value is always reduced mod `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    p: u64,
}

impl Fp {
    #[inline]
    pub fn new(value: u64, prime: Prime) -> Self {
        Fp { value: value % prime.get(), p: prime.get() }
    }

    /// `iota`: reduce an arbitrary integer into `F_p`.
    #[inline]
    pub fn from_int(n: i64, prime: Prime) -> Self {
        let p = prime.get() as i64;
        Fp { value: n.rem_euclid(p) as u64, p: p as u64 }
    }

    /// `iota(x/y) := iota(x * y^*)` where `y y^* = 1 mod p`; requires `p∤y`.
    pub fn from_ratio(num: i64, den: i64, prime: Prime) -> Result<Self> {
        let d = Fp::from_int(den, prime);
        if d.value == 0 {
            return Err(Error::MalformedData(format!(
                "denominator {den} divisible by p={}",
                prime.get()
            )));
        }
        Ok(Fp::from_int(num, prime) * d.inv())
    }

    #[inline]
    pub fn zero(prime: Prime) -> Self {
        Fp { value: 0, p: prime.get() }
    }

    #[inline]
    pub fn one(prime: Prime) -> Self {
        Fp { value: 1, p: prime.get() }
    }

    /// `tau`: the representative in `{0, ..., p-1}`.
    #[inline]
    pub fn tau(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn prime(self) -> Prime {
        Prime(self.p)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp { value: 1, p: self.p };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero (a usage error, never data).
    #[inline]
    pub fn inv(self) -> Self {
        assert!(self.value != 0, "inverse of zero in F_{}", self.p);
        self.pow(self.p - 2)
    }

    #[inline]
    fn check(self, other: Fp) {
        assert_eq!(self.p, other.p, "mixed primes {} and {}", self.p, other.p);
    }
}

impl std::ops::Add for Fp {
    type Output = Fp;
    #[inline]
    fn add(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let mut v = self.value + rhs.value;
        if v >= self.p {
            v -= self.p;
        }
        Fp { value: v, p: self.p }
    }
}

impl std::ops::Sub for Fp {
    type Output = Fp;
    #[inline]
    fn sub(self, rhs: Fp) -> Fp {
        self.check(rhs);
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.p - rhs.value
        };
        Fp { value: v, p: self.p }
    }
}

impl std::ops::Mul for Fp {
    type Output = Fp;
    #[inline]
    fn mul(self, rhs: Fp) -> Fp {
        self.check(rhs);
        Fp { value: self.value * rhs.value % self.p, p: self.p }
    }
}

impl std::ops::Neg for Fp {
    type Output = Fp;
    #[inline]
    fn neg(self) -> Fp {
        let v = if self.value == 0 { 0 } else { self.p - self.value };
        Fp { value: v, p: self.p }
    }
}

impl std::fmt::Display for Fp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `tau` applied coordinate-wise.
pub fn tau_vec(xs: &[Fp]) -> Vec<u64> {
    xs.iter().map(|x| x.tau()).collect()
}

/// `iota` applied coordinate-wise.
pub fn iota_vec(ns: &[i64], prime: Prime) -> Vec<Fp> {
    ns.iter().map(|&n| Fp::from_int(n, prime)).collect()
}

/// Dot product of two `F_p` vectors.
pub fn dot(a: &[Fp], b: &[Fp]) -> Fp {
    assert_eq!(a.len(), b.len(), "dot product length mismatch");
    let p = a.first().map(|x| x.prime()).unwrap_or(Prime(3));
    a.iter().zip(b).fold(Fp::zero(p), |acc, (&x, &y)| acc + x * y)
}
