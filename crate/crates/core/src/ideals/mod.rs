//! Form ideals, strings, reducibility predicates, decomposition witnesses
//! and almost linear Freiman maps.
//!
//! The ideal of a form with shifts `h_1, ..., h_k` is generated by
//! `(nA)·n` and the linear forms `(h_i A)·n`. Membership of a homogeneous
//! polynomial reduces to an exact linear system in homogeneous cofactors
//! (the generators are homogeneous, so the ideal is graded and the
//! degree-matching projection of any witness is again a witness).

mod att5;
mod freiman;
mod reduce;
mod strings;

pub use att5::{att5_decompose, Att5Hypotheses, Att5Witness, LiftedForm};
pub use freiman::{is_freiman, AlmostLinearFunction, FreimanMode, FreimanReport};
pub use reduce::{
    is_reducible_direct, is_reducible_ideal, string_combination, strings_independent,
    CombinationSearch, IndependenceOutcome, ReduceMode, ReduceOutcome, ReducibleIdealOutcome,
};
pub use strings::{poly_to_string, string_to_poly, HString, Tower};

use crate::field::{Fp, FpMatrix};
use crate::poly::{monomials_of_degree, FpPoly, Mono};
use crate::quadform::QuadraticForm;
use crate::{Error, Result};

/// Handle for `<(nA)·n, (h_1 A)·n, ..., (h_k A)·n>`.
#[derive(Debug, Clone)]
pub struct MIdealHandle {
    form: QuadraticForm,
    shifts: Vec<Vec<Fp>>,
}

impl MIdealHandle {
    pub fn new(form: QuadraticForm, shifts: Vec<Vec<Fp>>) -> Result<Self> {
        for h in &shifts {
            if h.len() != form.dim() {
                return Err(Error::DimensionMismatch("shift dimension mismatch".into()));
            }
        }
        Ok(MIdealHandle { form, shifts })
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn shifts(&self) -> &[Vec<Fp>] {
        &self.shifts
    }

    pub fn generators(&self) -> Vec<FpPoly> {
        let mut gens = vec![FpPoly::quad_generator(&self.form)];
        for h in &self.shifts {
            gens.push(FpPoly::linear_generator(&self.form, h));
        }
        gens
    }
}

/// Cofactors certifying `F = (nA)·n g_0 + sum_i ((h_i A)·n) g_i`.
#[derive(Debug, Clone)]
pub struct IdealWitness {
    /// degree `j - 2` cofactor of the quadratic generator (`None` for j=1)
    pub g0: Option<FpPoly>,
    /// degree `j - 1` cofactors of the linear generators
    pub gs: Vec<FpPoly>,
}

impl IdealWitness {
    /// Reassemble the combination this witness certifies.
    pub fn combination(&self, handle: &MIdealHandle) -> FpPoly {
        let d = handle.form.dim();
        let p = handle.form.prime();
        let mut acc = FpPoly::zero(d, p);
        if let Some(g0) = &self.g0 {
            acc = acc.add(&FpPoly::quad_generator(&handle.form).mul(g0));
        }
        for (h, g) in handle.shifts.iter().zip(&self.gs) {
            acc = acc.add(&FpPoly::linear_generator(&handle.form, h).mul(g));
        }
        acc
    }
}

/// Decide membership of a homogeneous `F` in the handle's ideal by solving
/// the exact cofactor system; returns the witness when solvable.
pub fn ideal_member(f: &FpPoly, handle: &MIdealHandle) -> Result<Option<IdealWitness>> {
    let d = handle.form.dim();
    let p = handle.form.prime();
    if f.vars() != d || f.prime() != p {
        return Err(Error::DimensionMismatch("polynomial and form grids differ".into()));
    }
    let j = f.degree();
    if j < 1 || !f.is_homogeneous_of(j) {
        return Err(Error::Precondition(format!(
            "ideal membership wants homogeneous degree >= 1, got degree {j}"
        )));
    }
    let target_monos = monomials_of_degree(d, j);
    let mono_index: std::collections::HashMap<&Mono, usize> =
        target_monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let quad = FpPoly::quad_generator(&handle.form);
    let linears: Vec<FpPoly> =
        handle.shifts.iter().map(|h| FpPoly::linear_generator(&handle.form, h)).collect();

    // unknown layout: [g0 coeffs over deg j-2][g_i coeffs over deg j-1]*
    let g0_monos = if j >= 2 { monomials_of_degree(d, j - 2) } else { vec![] };
    let gi_monos = monomials_of_degree(d, j - 1);
    let unknowns = g0_monos.len() + handle.shifts.len() * gi_monos.len();
    if unknowns == 0 {
        // no cofactors available: member iff F is zero (j = 1, no shifts)
        return Ok(if f.is_zero() {
            Some(IdealWitness { g0: None, gs: vec![] })
        } else {
            None
        });
    }

    let mut matrix = FpMatrix::zeros(target_monos.len(), unknowns, p);
    let mut col = 0usize;
    let fill = |gen: &FpPoly, monos: &[Mono], matrix: &mut FpMatrix, col: &mut usize| {
        for m in monos {
            let shifted = gen.mul_mono(m, Fp::one(p));
            for (tm, &c) in shifted.terms() {
                let row = mono_index[tm];
                matrix[(row, *col)] = matrix[(row, *col)] + c;
            }
            *col += 1;
        }
    };
    if j >= 2 {
        fill(&quad, &g0_monos, &mut matrix, &mut col);
    }
    for lin in &linears {
        fill(lin, &gi_monos, &mut matrix, &mut col);
    }

    let rhs: Vec<Fp> = target_monos.iter().map(|m| f.coeff(m)).collect();
    let Some(solution) = matrix.solve(&rhs)? else {
        return Ok(None);
    };

    let mut pos = 0usize;
    let g0 = if j >= 2 {
        let mut g = FpPoly::zero(d, p);
        for m in &g0_monos {
            g.add_term(m.clone(), solution[pos]);
            pos += 1;
        }
        Some(g)
    } else {
        None
    };
    let mut gs = Vec::with_capacity(handle.shifts.len());
    for _ in 0..handle.shifts.len() {
        let mut g = FpPoly::zero(d, p);
        for m in &gi_monos {
            g.add_term(m.clone(), solution[pos]);
            pos += 1;
        }
        gs.push(g);
    }
    let witness = IdealWitness { g0, gs };
    debug_assert!(witness.combination(handle).sub(f).is_zero());
    Ok(Some(witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{iota_vec, Prime};
    use crate::poly::parse_fp_poly;

    fn p7() -> Prime {
        Prime::new(7).unwrap()
    }

    #[test]
    fn quadratic_generator_is_a_member() {
        let p = p7();
        let m = QuadraticForm::dot_form(3, p);
        let handle = MIdealHandle::new(m.clone(), vec![]).unwrap();
        let f = FpPoly::quad_generator(&m);
        let w = ideal_member(&f, &handle).unwrap().expect("member");
        assert_eq!(w.g0.as_ref().unwrap().degree(), 0);
        assert!(w.combination(&handle).sub(&f).is_zero());
    }

    #[test]
    fn generator_times_linear_is_a_member() {
        let p = p7();
        let m = QuadraticForm::dot_form(4, p);
        let h = iota_vec(&[1, 2, 0, 3], p);
        let handle = MIdealHandle::new(m.clone(), vec![h.clone()]).unwrap();
        let l = parse_fp_poly("x1 + 5*x4 (mod 7)", Some(4)).unwrap();
        let f = FpPoly::linear_generator(&m, &h).mul(&l);
        let w = ideal_member(&f, &handle).unwrap().expect("member");
        assert!(w.combination(&handle).sub(&f).is_zero());
    }

    #[test]
    fn generic_cubic_is_rejected_with_infeasible_system() {
        let p = p7();
        let m = QuadraticForm::dot_form(6, p);
        let h = iota_vec(&[1, 0, 0, 0, 0, 0], p);
        let handle = MIdealHandle::new(m, vec![h]).unwrap();
        let mut rng = crate::rng::stream(14, "ideals/generic-cubic");
        let mut rejected = 0;
        for _ in 0..10 {
            let mut f = FpPoly::zero(6, p);
            for mono in monomials_of_degree(6, 3) {
                f.add_term(mono, Fp::new(rand::Rng::gen_range(&mut rng, 0..7), p));
            }
            if ideal_member(&f, &handle).unwrap().is_none() {
                rejected += 1;
            }
        }
        assert!(rejected > 0, "random cubics should miss the ideal sometimes");
    }

    #[test]
    fn non_homogeneous_is_an_error() {
        let p = p7();
        let m = QuadraticForm::dot_form(2, p);
        let handle = MIdealHandle::new(m, vec![]).unwrap();
        let f = parse_fp_poly("x1^2 + x2 (mod 7)", Some(2)).unwrap();
        assert!(ideal_member(&f, &handle).is_err());
    }

    #[test]
    fn linear_membership_is_span_of_shift_generators() {
        let p = p7();
        let m = QuadraticForm::dot_form(3, p);
        let h = iota_vec(&[2, 1, 0], p);
        let handle = MIdealHandle::new(m.clone(), vec![h.clone()]).unwrap();
        let gen = FpPoly::linear_generator(&m, &h);
        let f = gen.scale(Fp::new(3, p));
        assert!(ideal_member(&f, &handle).unwrap().is_some());
        let off = parse_fp_poly("x3 (mod 7)", Some(3)).unwrap();
        assert!(ideal_member(&gen.add(&off), &handle).unwrap().is_none());
    }
}
