//! Strings and towers: tuples of `(1/p)Z` frequencies indexed by degree-`j`
//! monomials, identified with homogeneous `(1/p)Z`-coefficient polynomials
//! through `f(n) = sum_{|m|=j} (m!)^* xi_m n^m`.
//!
//! Numerators are kept reduced to `[0, p)`: all predicates downstream are
//! invariant under integer shifts of the coefficients.

use crate::field::{Fp, Prime};
use crate::poly::{monomials_of_degree, PolyOverP};
use crate::{Error, Result};

/// A `(j, d, p)`-string: one numerator per degree-`j` monomial, graded-lex
/// order, values in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HString {
    p: Prime,
    d: usize,
    degree: u32,
    nums: Vec<i64>,
}

impl HString {
    pub fn new(p: Prime, d: usize, degree: u32, nums: Vec<i64>) -> Result<Self> {
        let want = monomials_of_degree(d, degree).len();
        if nums.len() != want {
            return Err(Error::DimensionMismatch(format!(
                "degree-{degree} string in {d} variables wants {want} coefficients, got {}",
                nums.len()
            )));
        }
        let pv = p.get() as i64;
        Ok(HString { p, d, degree, nums: nums.into_iter().map(|n| n.rem_euclid(pv)).collect() })
    }

    pub fn zero(p: Prime, d: usize, degree: u32) -> Self {
        let len = monomials_of_degree(d, degree).len();
        HString { p, d, degree, nums: vec![0; len] }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Numerators over `p` in graded-lex monomial order.
    pub fn numerators(&self) -> &[i64] {
        &self.nums
    }

    pub fn is_zero(&self) -> bool {
        self.nums.iter().all(|&n| n == 0)
    }

    pub fn add(&self, other: &HString) -> HString {
        assert_eq!((self.p, self.d, self.degree), (other.p, other.d, other.degree));
        let pv = self.p.get() as i64;
        let nums = self
            .nums
            .iter()
            .zip(&other.nums)
            .map(|(&a, &b)| (a + b).rem_euclid(pv))
            .collect();
        HString { p: self.p, d: self.d, degree: self.degree, nums }
    }

    /// Integer scalar multiple, reduced.
    pub fn scale(&self, a: i64) -> HString {
        let pv = self.p.get() as i64;
        let nums = self.nums.iter().map(|&n| (n * a.rem_euclid(pv)).rem_euclid(pv)).collect();
        HString { p: self.p, d: self.d, degree: self.degree, nums }
    }

    pub fn sub(&self, other: &HString) -> HString {
        self.add(&other.scale(-1))
    }

    /// The induced `F_p` form of the associated polynomial (`iota` of `p`
    /// times its coefficients).
    pub fn induced_form(&self) -> Result<crate::poly::FpPoly> {
        Ok(string_to_poly(self)?.induced())
    }
}

/// `f(n) = sum (m!)^* xi_m n^m` with `(m!)^*` the integer inverse
/// representative of `m!` in `{1, ..., p-1}`. Requires `j < p` so every
/// `m!` is invertible.
pub fn string_to_poly(xi: &HString) -> Result<PolyOverP> {
    if xi.degree as u64 >= xi.p.get() {
        return Err(Error::Precondition(format!(
            "string/polynomial association wants degree < p, got j = {} >= p = {}",
            xi.degree,
            xi.p
        )));
    }
    let monos = monomials_of_degree(xi.d, xi.degree);
    let mut terms = Vec::with_capacity(monos.len());
    for (m, &num) in monos.into_iter().zip(&xi.nums) {
        if num == 0 {
            continue;
        }
        let fact_inv = Fp::from_int(m.factorial() as i64, xi.p).inv().tau() as i64;
        terms.push((m, fact_inv * num));
    }
    Ok(PolyOverP::from_numerators(xi.d, xi.p, terms))
}

/// Inverse association: `xi_m = m! a_m`, numerators reduced to `[0, p)`.
pub fn poly_to_string(f: &PolyOverP, degree: u32) -> Result<HString> {
    let p = f.prime();
    if degree as u64 >= p.get() {
        return Err(Error::Precondition(format!(
            "string/polynomial association wants degree < p, got j = {degree} >= p = {p}"
        )));
    }
    let monos = monomials_of_degree(f.vars(), degree);
    let mut nums = Vec::with_capacity(monos.len());
    for m in &monos {
        if f.numerator(m) != 0 && m.degree() != degree {
            return Err(Error::Precondition("polynomial is not homogeneous of the stated degree".into()));
        }
        nums.push((m.factorial() as i64).wrapping_mul(f.numerator(m)));
    }
    for (m, _) in f.terms() {
        if m.degree() != degree {
            return Err(Error::Precondition("polynomial is not homogeneous of the stated degree".into()));
        }
    }
    HString::new(p, f.vars(), degree, nums)
}

/// Floors of strings stacked by degree; floor `j` holds `D_j` strings of
/// degree `j`.
#[derive(Debug, Clone)]
pub struct Tower {
    floors: Vec<Vec<HString>>,
}

impl Tower {
    pub fn new(floors: Vec<Vec<HString>>) -> Result<Self> {
        for (i, floor) in floors.iter().enumerate() {
            let degree = (i + 1) as u32;
            if floor.iter().any(|s| s.degree() != degree) {
                return Err(Error::MalformedData(format!(
                    "floor {degree} contains a string of the wrong degree"
                )));
            }
        }
        Ok(Tower { floors })
    }

    /// `(D_1, ..., D_s)`.
    pub fn dimension_vector(&self) -> Vec<usize> {
        self.floors.iter().map(|f| f.len()).collect()
    }

    pub fn floor(&self, j: u32) -> &[HString] {
        &self.floors[(j - 1) as usize]
    }

    pub fn floors(&self) -> &[Vec<HString>] {
        &self.floors
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Mono;
    use rand::Rng;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn degree_one_association_is_identity() {
        // j=1: (1!)^* = 1, so f(n) = sum a_t n_t with a_t = xi_t / p.
        let p = p5();
        let xi = HString::new(p, 3, 1, vec![2, 0, 4]).unwrap();
        let f = string_to_poly(&xi).unwrap();
        assert_eq!(f.numerator(&Mono(vec![1, 0, 0])), 2);
        assert_eq!(f.numerator(&Mono(vec![0, 0, 1])), 4);
    }

    #[test]
    fn squared_coefficient_picks_up_factorial_inverse() {
        // j=2, d=1, p=5: xi_{(2)} = 1/5 -> f(n) = (2!)^* (1/5) n^2 = (3/5) n^2.
        let p = p5();
        let xi = HString::new(p, 1, 2, vec![1]).unwrap();
        let f = string_to_poly(&xi).unwrap();
        assert_eq!(f.numerator(&Mono(vec![2])), 3);
        let back = poly_to_string(&f, 2).unwrap();
        assert_eq!(back, xi);
    }

    #[test]
    fn round_trip_random_strings() {
        let p = Prime::new(7).unwrap();
        let mut rng = crate::rng::stream(15, "strings/roundtrip");
        for _ in 0..50 {
            let len = monomials_of_degree(3, 3).len();
            let nums: Vec<i64> = (0..len).map(|_| rng.gen_range(0..7)).collect();
            let xi = HString::new(p, 3, 3, nums).unwrap();
            let f = string_to_poly(&xi).unwrap();
            let back = poly_to_string(&f, 3).unwrap();
            assert_eq!(back, xi);
        }
    }

    #[test]
    fn degree_at_least_p_is_rejected() {
        let p = Prime::new(3).unwrap();
        let xi = HString::zero(p, 2, 3);
        assert!(string_to_poly(&xi).is_err());
    }

    #[test]
    fn tower_floor_degrees_are_checked() {
        let p = p5();
        let good = Tower::new(vec![
            vec![HString::zero(p, 2, 1)],
            vec![HString::zero(p, 2, 2), HString::zero(p, 2, 2)],
        ])
        .unwrap();
        assert_eq!(good.dimension_vector(), vec![1, 2]);
        assert!(Tower::new(vec![vec![HString::zero(p, 2, 2)]]).is_err());
    }
}
