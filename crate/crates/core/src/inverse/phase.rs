//! Polynomial phases `phi(n) = exp(P(tau(n)))` with regular-lifted `P`
//! (coefficients in `{0, 1/p, ..., (p-1)/p}`, degree below `p`). These are
//! `p`-periodic by construction: shifting the argument by `p Z^d` changes
//! `P` by an integer.

use crate::field::{Fp, Prime};
use crate::gowers::{phase_table, GridFunction};
use crate::poly::{FpPoly, Mono, PolyOverP};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct PolyPhase {
    poly: PolyOverP,
    degree: u32,
}

impl PolyPhase {
    /// Canonicalize: numerators reduced to `[0, p)`; integer parts of the
    /// coefficients never change the phase on integer points.
    pub fn new(poly: PolyOverP) -> Result<Self> {
        let p = poly.prime();
        let (_, reduced) = poly.split_integer_part();
        let degree = reduced.degree();
        if degree as u64 >= p.get() {
            return Err(Error::Precondition(format!(
                "phase degree {degree} reaches p = {p}; regular lifting undefined"
            )));
        }
        Ok(PolyPhase { poly: reduced, degree })
    }

    /// The character `n -> exp(tau(xi·n)/p)` as a degree-1 phase.
    pub fn character(p: Prime, d: usize, xi: &[u64]) -> Result<Self> {
        if xi.len() != d {
            return Err(Error::DimensionMismatch("frequency dimension mismatch".into()));
        }
        let terms: Vec<(Mono, i64)> = xi
            .iter()
            .enumerate()
            .filter(|(_, &x)| x % p.get() != 0)
            .map(|(i, &x)| (Mono::var(i, d), (x % p.get()) as i64))
            .collect();
        PolyPhase::new(PolyOverP::from_numerators(d, p, terms))
    }

    /// Conjugate character `n -> exp(-tau(xi·n)/p)`.
    pub fn character_conj(p: Prime, d: usize, xi: &[u64]) -> Result<Self> {
        let neg: Vec<u64> = xi.iter().map(|&x| (p.get() - x % p.get()) % p.get()).collect();
        Self::character(p, d, &neg)
    }

    /// Regular lift of an `F_p` polynomial as a phase.
    pub fn from_form(poly: &FpPoly) -> Result<Self> {
        PolyPhase::new(PolyOverP::regular_lift(poly))
    }

    /// Seeded random phase of exact degree `s` (dense coefficients).
    pub fn random<R: Rng>(p: Prime, d: usize, s: u32, rng: &mut R) -> Result<Self> {
        let mut terms = Vec::new();
        for j in 1..=s {
            for m in crate::poly::monomials_of_degree(d, j) {
                terms.push((m, rng.gen_range(0..p.get()) as i64));
            }
        }
        let poly = PolyOverP::from_numerators(d, p, terms);
        let phase = PolyPhase::new(poly)?;
        if phase.degree != s {
            // top layer happened to vanish; force one monomial
            let mut terms: BTreeMap<Mono, i64> =
                phase.poly.terms().map(|(m, &n)| (m.clone(), n)).collect();
            let lead = crate::poly::monomials_of_degree(d, s)
                .into_iter()
                .next()
                .expect("degree-s monomial exists");
            terms.insert(lead, 1 + rng.gen_range(0..p.get() as i64 - 1));
            return PolyPhase::new(PolyOverP::from_numerators(
                d,
                p,
                terms.into_iter().collect(),
            ));
        }
        Ok(phase)
    }

    pub fn prime(&self) -> Prime {
        self.poly.prime()
    }

    pub fn dim(&self) -> usize {
        self.poly.vars()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn poly(&self) -> &PolyOverP {
        &self.poly
    }

    /// `exp(P(n))` at integer coordinates (any lift).
    pub fn eval_int(&self, n: &[i64]) -> Complex64 {
        let val = self.poly.eval(n);
        let p = self.prime().get();
        let num = val.numerator.rem_euclid(p as i64) as u64;
        phase_table(p)[num as usize]
    }

    /// `phi(n)` on reduced `tau` coordinates.
    pub fn eval_raw(&self, n: &[u64]) -> Complex64 {
        let ints: Vec<i64> = n.iter().map(|&x| x as i64).collect();
        self.eval_int(&ints)
    }

    pub fn eval_fp(&self, n: &[Fp]) -> Complex64 {
        let ints: Vec<i64> = n.iter().map(|&x| x.tau() as i64).collect();
        self.eval_int(&ints)
    }

    /// Materialize as a dense grid function.
    pub fn to_grid_function(&self) -> GridFunction {
        let table = phase_table(self.prime().get());
        let p = self.prime().get() as i64;
        let mut f = GridFunction::from_fn(self.prime(), self.dim(), |pt| {
            let ints: Vec<i64> = pt.iter().map(|&x| x as i64).collect();
            let num = self.poly.eval(&ints).numerator.rem_euclid(p) as usize;
            table[num]
        });
        f.verify_one_bounded();
        f
    }

    /// Serialize as a coefficient map with denominator `p`:
    /// `{p, d, degree, coefficients: {"e1,e2,...": numerator}}`.
    pub fn to_json(&self) -> String {
        let coefficients: BTreeMap<String, i64> = self
            .poly
            .terms()
            .map(|(m, &n)| {
                let key: Vec<String> = m.0.iter().map(|e| e.to_string()).collect();
                (key.join(","), n)
            })
            .collect();
        serde_json::json!({
            "p": self.prime().get(),
            "d": self.dim(),
            "degree": self.degree,
            "coefficients": coefficients,
        })
        .to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct Doc {
            p: u64,
            d: usize,
            coefficients: BTreeMap<String, i64>,
        }
        let doc: Doc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let p = Prime::new(doc.p)?;
        let mut terms = Vec::with_capacity(doc.coefficients.len());
        for (key, num) in doc.coefficients {
            let exps: Vec<u16> = key
                .split(',')
                .map(|t| t.trim().parse::<u16>().map_err(|_| Error::Parse(format!("bad exponent {t:?}"))))
                .collect::<Result<_>>()?;
            if exps.len() != doc.d {
                return Err(Error::Parse(format!("exponent vector {key:?} wants {} entries", doc.d)));
            }
            terms.push((Mono(exps), num));
        }
        PolyPhase::new(PolyOverP::from_numerators(doc.d, p, terms))
    }
}

/// Compose with an affine map: the result agrees pointwise with
/// `n -> phi(L(n) + c)`, where `L` is a `d' x d` matrix acting by
/// `L(n)_i = sum_j L[i][j] n_j` and `phi` lives on `F_p^{d'}`.
///
/// The lift substitutes `tau(L)` and `tau(c)` into the phase polynomial
/// and re-reduces coefficients into `{0, 1/p, ..., (p-1)/p}`; pointwise
/// agreement follows from the `p`-periodicity of the reduced polynomial.
pub fn affine_pullback(
    phase: &PolyPhase,
    l: &crate::field::FpMatrix,
    c: &[Fp],
) -> Result<PolyPhase> {
    if l.rows() != phase.dim() || c.len() != phase.dim() {
        return Err(Error::DimensionMismatch(format!(
            "pullback wants a {}-row matrix and offset, got {} rows and {} offsets",
            phase.dim(),
            l.rows(),
            c.len()
        )));
    }
    let rows: Vec<Vec<i64>> = (0..l.rows())
        .map(|i| (0..l.cols()).map(|j| l[(i, j)].tau() as i64).collect())
        .collect();
    let offs: Vec<i64> = c.iter().map(|x| x.tau() as i64).collect();
    let substituted = phase.poly.substitute_affine(&rows, &offs);
    PolyPhase::new(substituted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FpMatrix;
    use crate::quadform::PointIter;

    fn p7() -> Prime {
        Prime::new(7).unwrap()
    }

    #[test]
    fn phases_are_unimodular_and_p_periodic() {
        let p = p7();
        let mut rng = crate::rng::stream(31, "phase/periodic");
        let phase = PolyPhase::random(p, 2, 2, &mut rng).unwrap();
        for pt in PointIter::new(p, 2) {
            let z = phase.eval_raw(&pt);
            assert!((z.norm() - 1.0).abs() < 1e-12);
            // re-lift: adding p m to the argument leaves the value fixed
            let lifted: Vec<i64> =
                pt.iter().enumerate().map(|(i, &x)| x as i64 + 7 * (i as i64 + 1)).collect();
            assert!((phase.eval_int(&lifted) - z).norm() < 1e-12);
        }
    }

    #[test]
    fn character_phase_matches_grid_character() {
        let p = p7();
        let xi = [3u64, 5];
        let phase = PolyPhase::character(p, 2, &xi).unwrap();
        let grid = GridFunction::character(p, 2, &xi);
        for pt in PointIter::new(p, 2) {
            let idx = grid.index_of(&pt);
            assert!((phase.eval_raw(&pt) - grid.scalar(idx)).norm() < 1e-12);
        }
    }

    #[test]
    fn pullback_identity_is_identity() {
        let p = p7();
        let mut rng = crate::rng::stream(32, "phase/pullback-id");
        let phase = PolyPhase::random(p, 3, 2, &mut rng).unwrap();
        let id = FpMatrix::identity(3, p);
        let zero = vec![Fp::zero(p); 3];
        let pulled = affine_pullback(&phase, &id, &zero).unwrap();
        assert_eq!(pulled.poly(), phase.poly());
    }

    #[test]
    fn pullback_by_permutation_permutes_coefficients() {
        let p = p7();
        // linear phase with distinct coefficients
        let phase = PolyPhase::character(p, 3, &[1, 2, 3]).unwrap();
        // cyclic permutation x -> (x2, x3, x1): L(n)_1 = n_2 etc.
        let l = FpMatrix::from_ints(3, 3, &[0, 1, 0, 0, 0, 1, 1, 0, 0], p);
        let zero = vec![Fp::zero(p); 3];
        let pulled = affine_pullback(&phase, &l, &zero).unwrap();
        // phi(L n) = exp((1*n_2 + 2*n_3 + 3*n_1)/p)
        let expect = PolyPhase::character(p, 3, &[3, 1, 2]).unwrap();
        assert_eq!(pulled.poly(), expect.poly());
    }

    #[test]
    fn pullback_agrees_pointwise_exhaustively() {
        let p = p7();
        let mut rng = crate::rng::stream(33, "phase/pullback");
        for _ in 0..5 {
            let phase = PolyPhase::random(p, 3, 2, &mut rng).unwrap();
            let entries: Vec<i64> = (0..9).map(|_| rng.gen_range(0..7)).collect();
            let l = FpMatrix::from_ints(3, 3, &entries, p);
            let c: Vec<Fp> = (0..3).map(|_| Fp::new(rng.gen_range(0..7), p)).collect();
            let pulled = affine_pullback(&phase, &l, &c).unwrap();
            for pt in PointIter::new(p, 3) {
                let n: Vec<Fp> = pt.iter().map(|&x| Fp::new(x, p)).collect();
                // L(n) + c with the column action
                let ln: Vec<Fp> = (0..3)
                    .map(|i| {
                        let mut acc = c[i];
                        for j in 0..3 {
                            acc = acc + l[(i, j)] * n[j];
                        }
                        acc
                    })
                    .collect();
                let direct = phase.eval_fp(&ln);
                let via = pulled.eval_fp(&n);
                assert!((direct - via).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn degree_overflow_is_rejected() {
        let p = Prime::new(3).unwrap();
        let poly = PolyOverP::from_numerators(1, p, vec![(Mono(vec![3]), 1)]);
        assert!(PolyPhase::new(poly).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = p7();
        let mut rng = crate::rng::stream(34, "phase/json");
        let phase = PolyPhase::random(p, 2, 2, &mut rng).unwrap();
        let json = phase.to_json();
        let back = PolyPhase::from_json(&json).unwrap();
        assert_eq!(back.poly(), phase.poly());
    }
}
