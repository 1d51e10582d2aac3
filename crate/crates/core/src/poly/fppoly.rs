//! Sparse polynomials with `F_p` coefficients.

use super::Mono;
use crate::field::{Fp, Prime};
use crate::{Error, Result};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    d: usize,
    prime: Prime,
    terms: BTreeMap<Mono, Fp>,
}

impl FpPoly {
    pub fn zero(d: usize, prime: Prime) -> Self {
        FpPoly { d, prime, terms: BTreeMap::new() }
    }

    pub fn constant(c: Fp, d: usize) -> Self {
        let mut poly = FpPoly::zero(d, c.prime());
        poly.add_term(Mono::constant(d), c);
        poly
    }

    pub fn from_terms(d: usize, prime: Prime, terms: Vec<(Mono, Fp)>) -> Self {
        let mut poly = FpPoly::zero(d, prime);
        for (m, c) in terms {
            poly.add_term(m, c);
        }
        poly
    }

    /// The quadratic generator `(nA)·n` of a form's ideal.
    pub fn quad_generator(form: &crate::quadform::QuadraticForm) -> Self {
        let d = form.dim();
        let p = form.prime();
        let mut poly = FpPoly::zero(d, p);
        for i in 0..d {
            for j in 0..d {
                let mut e = vec![0u16; d];
                e[i] += 1;
                e[j] += 1;
                poly.add_term(Mono(e), form.matrix()[(i, j)]);
            }
        }
        poly
    }

    /// The linear generator `(hA)·n`.
    pub fn linear_generator(form: &crate::quadform::QuadraticForm, h: &[Fp]) -> Self {
        let d = form.dim();
        let p = form.prime();
        let ha = form.matrix().row_vec_mul(h);
        let mut poly = FpPoly::zero(d, p);
        for (j, &c) in ha.iter().enumerate() {
            poly.add_term(Mono::var(j, d), c);
        }
        poly
    }

    pub fn vars(&self) -> usize {
        self.d
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Fp)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Mono) -> Fp {
        self.terms.get(m).copied().unwrap_or(Fp::zero(self.prime))
    }

    pub fn add_term(&mut self, m: Mono, c: Fp) {
        assert_eq!(m.0.len(), self.d, "monomial arity mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn is_homogeneous_of(&self, j: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == j)
    }

    pub fn scale(&self, c: Fp) -> FpPoly {
        let mut out = FpPoly::zero(self.d, self.prime);
        for (m, &a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        self.add(&other.scale(-Fp::one(self.prime)))
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        let mut out = FpPoly::zero(self.d, self.prime);
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_mono(&self, m: &Mono, c: Fp) -> FpPoly {
        let mut out = FpPoly::zero(self.d, self.prime);
        for (m1, &c1) in &self.terms {
            out.add_term(m1.mul(m), c1 * c);
        }
        out
    }

    pub fn eval(&self, x: &[Fp]) -> Fp {
        let mut acc = Fp::zero(self.prime);
        for (m, &c) in &self.terms {
            let mut t = c;
            for (&e, &xi) in m.0.iter().zip(x) {
                t = t * xi.pow(e as u64);
            }
            acc = acc + t;
        }
        acc
    }

    /// Homogeneous part of the given degree.
    pub fn homogeneous_part(&self, j: u32) -> FpPoly {
        let mut out = FpPoly::zero(self.d, self.prime);
        for (m, &c) in &self.terms {
            if m.degree() == j {
                out.add_term(m.clone(), c);
            }
        }
        out
    }
}

impl std::fmt::Display for FpPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 (mod {})", self.prime);
        }
        let mut first = true;
        // Emit highest-degree terms first, graded-lex within a degree.
        let mut ordered: Vec<(&Mono, &Fp)> = self.terms.iter().collect();
        ordered.sort_by(|(a, _), (b, _)| {
            b.degree().cmp(&a.degree()).then_with(|| a.cmp(b))
        });
        for (m, c) in ordered {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let factors: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, e)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c.tau() == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", c, factors.join("*"))?;
            }
        }
        write!(f, " (mod {})", self.prime)
    }
}

/// Parse the textual polynomial format, e.g. `3*x1^2*x2 + 2*x3^3 (mod 7)`.
/// The variable count is the largest index mentioned unless `d` is given.
pub fn parse_fp_poly(text: &str, d: Option<usize>) -> Result<FpPoly> {
    let text = text.trim();
    let (body, modpart) = text
        .rsplit_once("(mod ")
        .ok_or_else(|| Error::Parse("missing (mod p) suffix".into()))?;
    let p: u64 = modpart
        .trim()
        .strip_suffix(')')
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad modulus in {modpart:?}")))?;
    let prime = Prime::new(p)?;

    let mut parsed: Vec<(Vec<(usize, u16)>, i64)> = Vec::new();
    let mut max_var = 0usize;
    for term in body.split('+') {
        let term = term.trim();
        if term.is_empty() || term == "0" {
            continue;
        }
        let mut coeff: i64 = 1;
        let mut seen_coeff = false;
        let mut exps: Vec<(usize, u16)> = Vec::new();
        for factor in term.split('*') {
            let factor = factor.trim();
            if let Some(rest) = factor.strip_prefix('x') {
                let (idx, e) = match rest.split_once('^') {
                    Some((i, e)) => (
                        i.parse::<usize>().map_err(|_| Error::Parse(format!("bad var {factor:?}")))?,
                        e.parse::<u16>().map_err(|_| Error::Parse(format!("bad exp {factor:?}")))?,
                    ),
                    None => (
                        rest.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad var {factor:?}")))?,
                        1,
                    ),
                };
                if idx == 0 {
                    return Err(Error::Parse("variables are 1-indexed".into()));
                }
                max_var = max_var.max(idx);
                exps.push((idx - 1, e));
            } else {
                let c: i64 =
                    factor.parse().map_err(|_| Error::Parse(format!("bad coefficient {factor:?}")))?;
                coeff = if seen_coeff { coeff * c } else { c };
                seen_coeff = true;
            }
        }
        parsed.push((exps, coeff));
    }
    let d = d.unwrap_or(max_var);
    if max_var > d {
        return Err(Error::Parse(format!("variable x{max_var} exceeds dimension {d}")));
    }
    let mut poly = FpPoly::zero(d, prime);
    for (exps, coeff) in parsed {
        let mut e = vec![0u16; d];
        for (i, ei) in exps {
            e[i] += ei;
        }
        poly.add_term(Mono(e), Fp::from_int(coeff, prime));
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_emit() {
        let poly = parse_fp_poly("3*x1^2*x2 + 2*x3^3 (mod 7)", None).unwrap();
        assert_eq!(poly.vars(), 3);
        assert_eq!(poly.degree(), 3);
        assert_eq!(poly.to_string(), "3*x1^2*x2 + 2*x3^3 (mod 7)");
        let again = parse_fp_poly(&poly.to_string(), Some(3)).unwrap();
        assert_eq!(again, poly);
    }

    #[test]
    fn generators_match_forms() {
        let p = Prime::new(5).unwrap();
        let form = crate::quadform::QuadraticForm::dot_form(3, p);
        let q = FpPoly::quad_generator(&form);
        assert!(q.is_homogeneous_of(2));
        let x = crate::field::iota_vec(&[1, 2, 0], p);
        assert_eq!(q.eval(&x), form.eval(&x)); // homogeneous form agrees
        let h = crate::field::iota_vec(&[1, 1, 0], p);
        let l = FpPoly::linear_generator(&form, &h);
        assert!(l.is_homogeneous_of(1));
        assert_eq!(l.eval(&x), form.bilinear(&h, &x));
    }

    #[test]
    fn arithmetic_consistency() {
        let p = Prime::new(7).unwrap();
        let a = parse_fp_poly("x1 + 2*x2 (mod 7)", Some(2)).unwrap();
        let b = parse_fp_poly("3*x1 (mod 7)", Some(2)).unwrap();
        let prod = a.mul(&b);
        for i in 0..7i64 {
            for j in 0..7i64 {
                let x = crate::field::iota_vec(&[i, j], p);
                assert_eq!(prod.eval(&x), a.eval(&x) * b.eval(&x));
            }
        }
        assert!(a.sub(&a).is_zero());
    }
}
