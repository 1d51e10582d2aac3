//! Polynomials with exact `(1/p)Z` coefficients (integer numerators over a
//! fixed prime) and plain integer-coefficient polynomials.
//!
//! All arithmetic is exact in `i64` numerators with `i128` accumulation in
//! evaluations; nothing here ever rounds.

use super::{FpPoly, Mono};
use crate::field::{Fp, OverP, Prime};
use std::collections::BTreeMap;

/// Integer-coefficient sparse polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    d: usize,
    terms: BTreeMap<Mono, i64>,
}

impl IntPoly {
    pub fn zero(d: usize) -> Self {
        IntPoly { d, terms: BTreeMap::new() }
    }

    pub fn constant(c: i64, d: usize) -> Self {
        let mut poly = IntPoly::zero(d);
        poly.add_term(Mono::constant(d), c);
        poly
    }

    pub fn linear(coeffs: &[i64], constant: i64) -> Self {
        let d = coeffs.len();
        let mut poly = IntPoly::constant(constant, d);
        for (i, &c) in coeffs.iter().enumerate() {
            poly.add_term(Mono::var(i, d), c);
        }
        poly
    }

    /// Lift an `F_p` polynomial to integer coefficients via `tau`.
    pub fn lift(poly: &FpPoly) -> Self {
        let mut out = IntPoly::zero(poly.vars());
        for (m, c) in poly.terms() {
            out.add_term(m.clone(), c.tau() as i64);
        }
        out
    }

    pub fn vars(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &i64)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Mono, c: i64) {
        assert_eq!(m.0.len(), self.d);
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().checked_add(c).expect("int poly overflow");
                if s == 0 {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = IntPoly::zero(self.d);
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.checked_mul(c2).expect("int poly overflow"));
            }
        }
        out
    }

    pub fn pow(&self, e: u16) -> IntPoly {
        let mut acc = IntPoly::constant(1, self.d);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &[i64]) -> i64 {
        let mut acc: i128 = 0;
        for (m, &c) in &self.terms {
            acc += c as i128 * m.eval_i128(x);
        }
        i64::try_from(acc).expect("int poly evaluation overflow")
    }
}

/// Polynomial with coefficients in `(1/p)Z`, stored as integer numerators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyOverP {
    d: usize,
    p: u64,
    /// numerators; the coefficient of `m` is `terms[m] / p`
    terms: BTreeMap<Mono, i64>,
}

impl PolyOverP {
    pub fn zero(d: usize, prime: Prime) -> Self {
        PolyOverP { d, p: prime.get(), terms: BTreeMap::new() }
    }

    pub fn from_numerators(d: usize, prime: Prime, terms: Vec<(Mono, i64)>) -> Self {
        let mut out = PolyOverP::zero(d, prime);
        for (m, n) in terms {
            out.add_term(m, n);
        }
        out
    }

    /// Regular lift of an `F_p` polynomial: numerators `tau(coeff)` in
    /// `{0, ..., p-1}`, so coefficients lie in `{0, 1/p, ..., (p-1)/p}`.
    pub fn regular_lift(poly: &FpPoly) -> Self {
        let mut out = PolyOverP::zero(poly.vars(), poly.prime());
        for (m, c) in poly.terms() {
            out.add_term(m.clone(), c.tau() as i64);
        }
        out
    }

    /// `(1/p) * q` for an integer polynomial `q`.
    pub fn from_int_over_p(q: &IntPoly, prime: Prime) -> Self {
        let mut out = PolyOverP::zero(q.vars(), prime);
        for (m, &c) in q.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn prime(&self) -> Prime {
        Prime::new(self.p).expect("validated prime")
    }

    pub fn vars(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &i64)> {
        self.terms.iter()
    }

    pub fn numerator(&self, m: &Mono) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Mono, num: i64) {
        assert_eq!(m.0.len(), self.d);
        if num == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(num);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().checked_add(num).expect("numerator overflow");
                if s == 0 {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn add(&self, other: &PolyOverP) -> PolyOverP {
        assert_eq!(self.p, other.p);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &PolyOverP) -> PolyOverP {
        assert_eq!(self.p, other.p);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> PolyOverP {
        let mut out = PolyOverP::zero(self.d, self.prime());
        for (m, &n) in &self.terms {
            out.add_term(m.clone(), n.checked_mul(c).expect("numerator overflow"));
        }
        out
    }

    /// Product with an integer polynomial stays in `(1/p)Z` coefficients.
    pub fn mul_int(&self, q: &IntPoly) -> PolyOverP {
        let mut out = PolyOverP::zero(self.d, self.prime());
        for (m1, &n1) in &self.terms {
            for (m2, &c2) in q.terms() {
                out.add_term(m1.mul(m2), n1.checked_mul(c2).expect("numerator overflow"));
            }
        }
        out
    }

    pub fn eval(&self, x: &[i64]) -> OverP {
        let mut acc: i128 = 0;
        for (m, &num) in &self.terms {
            acc += num as i128 * m.eval_i128(x);
        }
        OverP::new(i64::try_from(acc).expect("overp evaluation overflow"), self.prime())
    }

    pub fn homogeneous_part(&self, j: u32) -> PolyOverP {
        let mut out = PolyOverP::zero(self.d, self.prime());
        for (m, &num) in &self.terms {
            if m.degree() == j {
                out.add_term(m.clone(), num);
            }
        }
        out
    }

    /// True when every coefficient is an integer.
    pub fn is_integer_coefficient(&self) -> bool {
        self.terms.values().all(|&n| n % self.p as i64 == 0)
    }

    /// Split into the integer-coefficient part and the remainder with
    /// numerators reduced to `[0, p)`.
    pub fn split_integer_part(&self) -> (IntPoly, PolyOverP) {
        let p = self.p as i64;
        let mut int_part = IntPoly::zero(self.d);
        let mut rest = PolyOverP::zero(self.d, self.prime());
        for (m, &num) in &self.terms {
            let r = num.rem_euclid(p);
            let q = (num - r) / p;
            if q != 0 {
                int_part.add_term(m.clone(), q);
            }
            if r != 0 {
                rest.add_term(m.clone(), r);
            }
        }
        (int_part, rest)
    }

    /// The induced `F_p` polynomial `iota ∘ (p·f) ∘ tau`, i.e. numerators
    /// reduced mod `p`.
    pub fn induced(&self) -> FpPoly {
        let prime = self.prime();
        let mut out = FpPoly::zero(self.d, prime);
        for (m, &num) in &self.terms {
            out.add_term(m.clone(), Fp::from_int(num, prime));
        }
        out
    }

    /// Substitute `y_i = sum_j a[i][j] x_j + b[i]`; the result is a
    /// polynomial in `x` with `(1/p)Z` coefficients of the same degree.
    pub fn substitute_affine(&self, a: &[Vec<i64>], b: &[i64]) -> PolyOverP {
        assert_eq!(a.len(), self.d, "substitution arity mismatch");
        assert_eq!(b.len(), self.d);
        let new_d = if a.is_empty() { 0 } else { a[0].len() };
        let lines: Vec<IntPoly> =
            a.iter().zip(b).map(|(row, &c)| IntPoly::linear(row, c)).collect();
        let mut out = PolyOverP::zero(new_d, self.prime());
        for (m, &num) in &self.terms {
            let mut term = IntPoly::constant(1, new_d);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&lines[i].pow(e));
                }
            }
            for (tm, &tc) in term.terms() {
                out.add_term(tm.clone(), num.checked_mul(tc).expect("numerator overflow"));
            }
        }
        out
    }

    /// `Delta_{h_j} ... Delta_{h_1} f(n)`: the alternating sum of `f` over
    /// the corners `n + sum_i eps_i h_i`, evaluated exactly.
    pub fn alternating_difference(&self, n: &[i64], hs: &[Vec<i64>]) -> OverP {
        let j = hs.len();
        let mut acc: i128 = 0;
        let mut corner = vec![0i64; self.d];
        for eps in 0u32..(1 << j) {
            for (t, c) in corner.iter_mut().enumerate() {
                *c = n[t];
            }
            let mut ones = 0u32;
            for (i, h) in hs.iter().enumerate() {
                if eps >> i & 1 == 1 {
                    ones += 1;
                    for (c, &hv) in corner.iter_mut().zip(h) {
                        *c += hv;
                    }
                }
            }
            let sign = if (j as u32 - ones) % 2 == 0 { 1i128 } else { -1i128 };
            let val = self.eval(&corner);
            acc += sign * val.numerator as i128;
        }
        OverP::new(i64::try_from(acc).expect("difference overflow"), self.prime())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn split_and_induce() {
        let p = p5();
        let mut f = PolyOverP::zero(2, p);
        f.add_term(Mono(vec![2, 0]), 7); // 7/5 = 1 + 2/5
        f.add_term(Mono(vec![0, 1]), 10); // integer 2
        let (int_part, rest) = f.split_integer_part();
        assert_eq!(int_part.eval(&[1, 1]), 1 + 2);
        assert_eq!(rest.numerator(&Mono(vec![2, 0])), 2);
        assert!(rest.numerator(&Mono(vec![0, 1])) == 0);
        let induced = f.induced();
        assert_eq!(induced.coeff(&Mono(vec![2, 0])).tau(), 2);
        assert_eq!(induced.coeff(&Mono(vec![0, 1])).tau(), 0);
    }

    #[test]
    fn substitution_matches_pointwise() {
        let p = p5();
        // f(y1, y2) = (1/5)(y1^2 + 3 y1 y2)
        let f = PolyOverP::from_numerators(
            2,
            p,
            vec![(Mono(vec![2, 0]), 1), (Mono(vec![1, 1]), 3)],
        );
        // y = (x1 + 2x2 + 1, 3x1)
        let a = vec![vec![1, 2], vec![3, 0]];
        let b = vec![1, 0];
        let g = f.substitute_affine(&a, &b);
        for x1 in -3..3i64 {
            for x2 in -3..3i64 {
                let y1 = x1 + 2 * x2 + 1;
                let y2 = 3 * x1;
                assert_eq!(g.eval(&[x1, x2]), f.eval(&[y1, y2]));
            }
        }
    }

    #[test]
    fn alternating_difference_of_quadratic() {
        let p = p5();
        // f = (1/5) x1 x2: Delta_{h2} Delta_{h1} f = (h1_1 h2_2 + h1_2 h2_1)/5
        let f = PolyOverP::from_numerators(2, p, vec![(Mono(vec![1, 1]), 1)]);
        let d2 = f.alternating_difference(&[3, 4], &[vec![1, 0], vec![0, 1]]);
        assert_eq!(d2.numerator, 1);
        // second difference of a degree-2 poly is independent of n
        let d2b = f.alternating_difference(&[100, -7], &[vec![1, 0], vec![0, 1]]);
        assert_eq!(d2b.numerator, 1);
        // third difference vanishes
        let d3 = f.alternating_difference(
            &[0, 0],
            &[vec![1, 0], vec![0, 1], vec![1, 1]],
        );
        assert_eq!(d3.numerator, 0);
    }
}
