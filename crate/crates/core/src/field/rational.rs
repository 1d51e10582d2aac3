//! Exact values in `(1/p)Z`, kept as integer numerators over a fixed prime.
//!
//! Reducibility predicates need to decide membership in `Z` exactly, which
//! is lost once numerators are reduced mod `p`; this type therefore keeps the
//! full integer numerator and offers reduction as an explicit operation.

use super::{Fp, Prime};

/// The rational `numerator / p`, numerator exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OverP {
    pub numerator: i64,
    pub p: u64,
}

impl OverP {
    #[inline]
    pub fn new(numerator: i64, prime: Prime) -> Self {
        OverP { numerator, p: prime.get() }
    }

    #[inline]
    pub fn zero(prime: Prime) -> Self {
        OverP { numerator: 0, p: prime.get() }
    }

    /// Is this value an integer (p divides the numerator)?
    #[inline]
    pub fn is_integral(self) -> bool {
        self.numerator % self.p as i64 == 0
    }

    /// Canonical representative of the class mod `Z`: numerator in `[0, p)`.
    #[inline]
    pub fn reduced(self) -> Self {
        OverP { numerator: self.numerator.rem_euclid(self.p as i64), p: self.p }
    }

    /// Fractional part as a float (diagnostics only; never used in decisions).
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.p as f64
    }

    /// `iota(p * x)`: the induced field element of `p` times this value.
    pub fn induced(self) -> Fp {
        Fp::from_int(self.numerator, Prime::new(self.p).expect("validated prime"))
    }

    #[inline]
    fn check(self, other: OverP) {
        assert_eq!(self.p, other.p, "mixed primes {} and {}", self.p, other.p);
    }
}

impl std::ops::Add for OverP {
    type Output = OverP;
    #[inline]
    fn add(self, rhs: OverP) -> OverP {
        self.check(rhs);
        OverP { numerator: self.numerator + rhs.numerator, p: self.p }
    }
}

impl std::ops::Sub for OverP {
    type Output = OverP;
    #[inline]
    fn sub(self, rhs: OverP) -> OverP {
        self.check(rhs);
        OverP { numerator: self.numerator - rhs.numerator, p: self.p }
    }
}

impl std::ops::Mul<i64> for OverP {
    type Output = OverP;
    #[inline]
    fn mul(self, rhs: i64) -> OverP {
        OverP { numerator: self.numerator * rhs, p: self.p }
    }
}

impl std::ops::Neg for OverP {
    type Output = OverP;
    #[inline]
    fn neg(self) -> OverP {
        OverP { numerator: -self.numerator, p: self.p }
    }
}
