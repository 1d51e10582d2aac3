//! Quadratic function families built from a form's bilinear structure,
//! their common zero sets, standard representations, I-decompositions and
//! Fubini averaging.
//!
//! A function here is `F(n_1,...,n_k) = sum_{i<=j} b_ij (n_i A)·n_j +
//! sum_i v_i·n_i + u`; everything in this module is linear algebra on the
//! coefficient vectors `v_M(F)` (blocks listed from the highest variable
//! index down, constant term last). Decompositions operate on the span of
//! the listed functions, which covers every set the analysis builds.

mod json;

pub use json::{family_from_json, family_to_json};

use crate::field::{dot, Fp, FpMatrix, Prime};
use crate::gowers::OmegaDescriptor;
use crate::quadform::{PointIter, QuadraticForm};
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeSet;

/// Coefficients of one `(M,k)`-integral quadratic function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MIntegralQuadratic {
    k: usize,
    d: usize,
    p: Prime,
    /// `b[(i,j)]` with `i <= j` (0-indexed blocks), coefficient of `(n_i A)·n_j`.
    b: std::collections::BTreeMap<(usize, usize), Fp>,
    /// `v[i]`, the linear coefficient vector on block `i`.
    v: Vec<Vec<Fp>>,
    u: Fp,
}

impl MIntegralQuadratic {
    pub fn zero(k: usize, d: usize, p: Prime) -> Self {
        MIntegralQuadratic {
            k,
            d,
            p,
            b: Default::default(),
            v: vec![vec![Fp::zero(p); d]; k],
            u: Fp::zero(p),
        }
    }

    pub fn with_b(mut self, i: usize, j: usize, c: Fp) -> Self {
        self.set_b(i, j, c);
        self
    }

    pub fn set_b(&mut self, i: usize, j: usize, c: Fp) {
        let key = (i.min(j), i.max(j));
        assert!(key.1 < self.k);
        if c.is_zero() {
            self.b.remove(&key);
        } else {
            self.b.insert(key, c);
        }
    }

    pub fn b(&self, i: usize, j: usize) -> Fp {
        let key = (i.min(j), i.max(j));
        self.b.get(&key).copied().unwrap_or(Fp::zero(self.p))
    }

    pub fn set_v(&mut self, i: usize, vec: Vec<Fp>) {
        assert_eq!(vec.len(), self.d);
        self.v[i] = vec;
    }

    pub fn v(&self, i: usize) -> &[Fp] {
        &self.v[i]
    }

    pub fn set_u(&mut self, u: Fp) {
        self.u = u;
    }

    pub fn u(&self) -> Fp {
        self.u
    }

    pub fn blocks(&self) -> usize {
        self.k
    }

    pub fn is_pure(&self) -> bool {
        self.v.iter().all(|vi| vi.iter().all(|x| x.is_zero()))
    }

    /// `F(x_1,...,x_k)` for the bound form's matrix `A`.
    pub fn eval(&self, form: &QuadraticForm, xs: &[Vec<Fp>]) -> Fp {
        assert_eq!(xs.len(), self.k, "block count mismatch");
        let mut acc = self.u;
        for (&(i, j), &c) in &self.b {
            acc = acc + c * form.bilinear(&xs[i], &xs[j]);
        }
        for (vi, xi) in self.v.iter().zip(xs) {
            acc = acc + dot(vi, xi);
        }
        acc
    }

    /// Length of `v_M` for given `k`, `d`.
    pub fn vm_len(k: usize, d: usize) -> usize {
        k * (k + 1) / 2 + k * d + 1
    }

    /// The coefficient vector `(b_{k,k}, b_{k,k-1}, ..., b_{k,1}, v_k,
    /// b_{k-1,k-1}, ..., v_{k-1}, ..., b_{1,1}, v_1, u)`.
    pub fn v_m(&self) -> Vec<Fp> {
        let mut out = Vec::with_capacity(Self::vm_len(self.k, self.d));
        for block in (0..self.k).rev() {
            for j in (0..=block).rev() {
                out.push(self.b(block, j));
            }
            out.extend_from_slice(&self.v[block]);
        }
        out.push(self.u);
        out
    }

    /// `v_M` without the trailing constant coordinate.
    pub fn v_m_prime(&self) -> Vec<Fp> {
        let mut out = self.v_m();
        out.pop();
        out
    }

    /// Rebuild a function from its `v_M` coordinates.
    pub fn from_v_m(coords: &[Fp], k: usize, d: usize, p: Prime) -> Self {
        assert_eq!(coords.len(), Self::vm_len(k, d));
        let mut f = MIntegralQuadratic::zero(k, d, p);
        let mut pos = 0usize;
        for block in (0..k).rev() {
            for j in (0..=block).rev() {
                f.set_b(block, j, coords[pos]);
                pos += 1;
            }
            f.set_v(block, coords[pos..pos + d].to_vec());
            pos += d;
        }
        f.set_u(coords[pos]);
        f
    }

    /// Blocks this coordinate position of `v'_M` touches.
    fn touched_blocks(k: usize, d: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(Self::vm_len(k, d) - 1);
        for block in (0..k).rev() {
            for j in (0..=block).rev() {
                out.push(if block == j { vec![block] } else { vec![j, block] });
            }
            for _ in 0..d {
                out.push(vec![block]);
            }
        }
        out
    }

    /// The highest block index with a nonzero coefficient, if any.
    pub fn top_block(&self) -> Option<usize> {
        let touched = Self::touched_blocks(self.k, self.d);
        let coords = self.v_m_prime();
        coords
            .iter()
            .zip(&touched)
            .filter(|(c, _)| !c.is_zero())
            .flat_map(|(_, blocks)| blocks.iter().copied())
            .max()
    }

    /// Transform by a bijective block-mixing map plus shift:
    /// `F(L(x) + w)` with `L(x)_i = sum_s c[(s,i)] x_s`.
    pub fn compose_affine(
        &self,
        form: &QuadraticForm,
        c: &FpMatrix,
        shift: &[Vec<Fp>],
    ) -> MIntegralQuadratic {
        let k = self.k;
        let p = self.p;
        assert_eq!(c.rows(), k);
        assert_eq!(c.cols(), k);
        assert_eq!(shift.len(), k);
        let mut out = MIntegralQuadratic::zero(k, self.d, p);
        // quadratic part accumulates into a full k x k table first
        let mut q = vec![vec![Fp::zero(p); k]; k];
        let mut vnew = vec![vec![Fp::zero(p); self.d]; k];
        let mut unew = self.u;
        let a_w: Vec<Vec<Fp>> =
            shift.iter().map(|w| form.matrix().mat_vec_mul(w)).collect();
        for (&(i, j), &bij) in &self.b {
            for s in 0..k {
                for t in 0..k {
                    q[s][t] = q[s][t] + bij * c[(s, i)] * c[(t, j)];
                }
            }
            for s in 0..k {
                // (x_s A)·w_j and (w_i A)·x_s pieces
                for t in 0..self.d {
                    vnew[s][t] = vnew[s][t]
                        + bij * c[(s, i)] * a_w[j][t]
                        + bij * c[(s, j)] * a_w[i][t];
                }
            }
            unew = unew + bij * form.bilinear(&shift[i], &shift[j]);
        }
        for i in 0..k {
            for s in 0..k {
                let ci = c[(s, i)];
                if !ci.is_zero() {
                    for t in 0..self.d {
                        vnew[s][t] = vnew[s][t] + ci * self.v[i][t];
                    }
                }
            }
            unew = unew + dot(&self.v[i], &shift[i]);
        }
        for s in 0..k {
            for t in s..k {
                let coeff = if s == t { q[s][s] } else { q[s][t] + q[t][s] };
                out.set_b(s, t, coeff);
            }
            out.set_v(s, vnew[s].clone());
        }
        out.set_u(unew);
        out
    }
}

/// Flags of a family per the coefficient-vector definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct FamilyFlags {
    pub consistent: bool,
    pub independent: bool,
    pub dimension: usize,
}

/// A list of `(M,k)`-integral quadratic functions sharing the form and `k`.
#[derive(Debug, Clone)]
pub struct MFamily {
    form: QuadraticForm,
    k: usize,
    functions: Vec<MIntegralQuadratic>,
}

impl MFamily {
    pub fn new(form: QuadraticForm, k: usize, functions: Vec<MIntegralQuadratic>) -> Result<Self> {
        for f in &functions {
            if f.k != k || f.d != form.dim() || f.p != form.prime() {
                return Err(Error::DimensionMismatch(
                    "family functions must share (p, d, k) with the form".into(),
                ));
            }
        }
        Ok(MFamily { form, k, functions })
    }

    /// The corner family of `Box_s(V(M))` in blocks `(n, h_1, ..., h_s)`:
    /// `M(n)` plus `M(n + eps·h) - M(n)` for every nonzero corner.
    pub fn box_family(form: &QuadraticForm, s: usize) -> MFamily {
        let d = form.dim();
        let p = form.prime();
        let k = s + 1;
        let mut functions = Vec::new();
        // M(n) itself: b_00 = 1, v_0 = u, const = v
        let mut base = MIntegralQuadratic::zero(k, d, p);
        base.set_b(0, 0, Fp::one(p));
        base.set_v(0, form.linear_part().to_vec());
        base.set_u(form.constant_part());
        functions.push(base);
        let two = Fp::new(2, p);
        for eps in 1u32..(1 << s) {
            // M(n + y) - M(n) with y = sum of chosen h blocks:
            // 2 (nA)·y + (yA)·y + u·y
            let mut f = MIntegralQuadratic::zero(k, d, p);
            let chosen: Vec<usize> =
                (0..s).filter(|i| eps >> i & 1 == 1).map(|i| i + 1).collect();
            for &bl in &chosen {
                f.set_b(0, bl, two);
                f.set_v(bl, form.linear_part().to_vec());
            }
            for (ai, &bi) in chosen.iter().enumerate() {
                for &bj in &chosen[ai..] {
                    let coeff = if bi == bj { Fp::one(p) } else { two };
                    f.set_b(bi, bj, coeff);
                }
            }
            functions.push(f);
        }
        MFamily { form: form.clone(), k, functions }
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn blocks(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[MIntegralQuadratic] {
        &self.functions
    }

    pub fn prime(&self) -> Prime {
        self.form.prime()
    }

    fn vm_matrix(&self) -> FpMatrix {
        let d = self.form.dim();
        let rows: Vec<Vec<Fp>> = self.functions.iter().map(|f| f.v_m()).collect();
        FpMatrix::from_rows(&rows, MIntegralQuadratic::vm_len(self.k, d), self.prime())
    }

    fn vm_prime_matrix(&self) -> FpMatrix {
        let d = self.form.dim();
        let rows: Vec<Vec<Fp>> = self.functions.iter().map(|f| f.v_m_prime()).collect();
        FpMatrix::from_rows(&rows, MIntegralQuadratic::vm_len(self.k, d) - 1, self.prime())
    }

    /// Consistency, independence and dimension from the coefficient vectors.
    pub fn flags(&self) -> FamilyFlags {
        if self.functions.is_empty() {
            return FamilyFlags { consistent: true, independent: true, dimension: 0 };
        }
        let rank_full = self.vm_matrix().rank();
        let dimension = self.vm_prime_matrix().rank();
        FamilyFlags {
            consistent: rank_full == dimension,
            independent: dimension == self.functions.len(),
            dimension,
        }
    }

    /// Row-reduce `v_M`, regenerate the functions, and group rows by the
    /// highest block each depends on. Requires an independent family;
    /// returns the standard family and the dimension vector `(r_1,...,r_k)`.
    pub fn standard_representation(&self) -> Result<(MFamily, Vec<usize>)> {
        let flags = self.flags();
        if !flags.independent {
            return Err(Error::Precondition("standard representation wants an independent family".into()));
        }
        Ok(self.reduce_to_standard())
    }

    /// RREF path without the independence gate: nonzero rows only, so a
    /// dependent generating set reduces to its independent core.
    fn reduce_to_standard(&self) -> (MFamily, Vec<usize>) {
        let d = self.form.dim();
        let p = self.prime();
        if self.functions.is_empty() {
            return (self.clone(), vec![0; self.k]);
        }
        let red = self.vm_matrix().rref();
        let mut functions = Vec::with_capacity(red.rank);
        let mut dim_vector = vec![0usize; self.k];
        for r in 0..red.rank {
            let f = MIntegralQuadratic::from_v_m(red.matrix.row(r), self.k, d, p);
            let block = f
                .top_block()
                .expect("independent row must touch a block");
            dim_vector[block] += 1;
            functions.push(f);
        }
        (MFamily { form: self.form.clone(), k: self.k, functions }, dim_vector)
    }

    /// Split the span into combinations supported on blocks in `i_set`
    /// (`J'`) and a complement whose nonzero combinations all touch some
    /// block outside `i_set` (`J''`).
    pub fn i_decomposition(&self, i_set: &BTreeSet<usize>) -> (MFamily, MFamily) {
        let d = self.form.dim();
        let p = self.prime();
        let (core, _) = self.reduce_to_standard();
        if core.functions.is_empty() {
            return (core.clone(), core);
        }
        let touched = MIntegralQuadratic::touched_blocks(self.k, d);
        let outside: Vec<usize> = (0..touched.len())
            .filter(|&pos| touched[pos].iter().any(|b| !i_set.contains(b)))
            .collect();
        let rho = core.functions.len();
        // rows: for each outside coordinate, the column over core functions
        let mut entries = Vec::with_capacity(outside.len() * rho);
        let prime_rows: Vec<Vec<Fp>> =
            core.functions.iter().map(|f| f.v_m_prime()).collect();
        for &pos in &outside {
            for row in &prime_rows {
                entries.push(row[pos]);
            }
        }
        let constraint = FpMatrix::new(outside.len(), rho, entries, p);
        let null = constraint.null_space();
        let mut j_prime_functions = Vec::with_capacity(null.len());
        let vm_rows: Vec<Vec<Fp>> = core.functions.iter().map(|f| f.v_m()).collect();
        let vm_len = MIntegralQuadratic::vm_len(self.k, d);
        for coeffs in &null {
            let mut combo = vec![Fp::zero(p); vm_len];
            for (c, row) in coeffs.iter().zip(&vm_rows) {
                if c.is_zero() {
                    continue;
                }
                for (o, &x) in combo.iter_mut().zip(row) {
                    *o = *o + *c * x;
                }
            }
            j_prime_functions.push(MIntegralQuadratic::from_v_m(&combo, self.k, d, p));
        }
        // complement: core functions at non-pivot coefficient positions
        let pivot_set: BTreeSet<usize> = if null.is_empty() {
            BTreeSet::new()
        } else {
            FpMatrix::from_rows(&null, rho, p).rref().pivots.into_iter().collect()
        };
        let j_second_functions: Vec<MIntegralQuadratic> = (0..rho)
            .filter(|t| !pivot_set.contains(t))
            .map(|t| core.functions[t].clone())
            .collect();
        (
            MFamily { form: self.form.clone(), k: self.k, functions: j_prime_functions },
            MFamily { form: self.form.clone(), k: self.k, functions: j_second_functions },
        )
    }

    /// Does every family member vanish at `xs`?
    pub fn vanishes_at(&self, xs: &[Vec<Fp>]) -> bool {
        self.functions.iter().all(|f| f.eval(&self.form, xs).is_zero())
    }

    /// Apply a block-mixing affine transformation to every function.
    pub fn compose_affine(&self, c: &FpMatrix, shift: &[Vec<Fp>]) -> MFamily {
        let functions = self
            .functions
            .iter()
            .map(|f| f.compose_affine(&self.form, c, shift))
            .collect();
        MFamily { form: self.form.clone(), k: self.k, functions }
    }
}

/// The common zero set of a family, with its derived data.
#[derive(Debug, Clone)]
pub struct MSet {
    family: MFamily,
}

impl MSet {
    pub fn new(family: MFamily) -> Self {
        MSet { family }
    }

    pub fn family(&self) -> &MFamily {
        &self.family
    }

    pub fn blocks(&self) -> usize {
        self.family.k
    }

    pub fn membership(&self, xs: &[Vec<Fp>]) -> bool {
        self.family.vanishes_at(xs)
    }

    /// Dimension of an extracted independent subfamily spanning the same
    /// row space. Errors on inconsistent generating families.
    pub fn total_codimension(&self) -> Result<usize> {
        let flags = self.family.flags();
        if !flags.consistent {
            return Err(Error::Precondition("inconsistent family".into()));
        }
        Ok(flags.dimension)
    }

    /// Standard representation (after reducing to an independent core).
    pub fn standard_representation(&self) -> Result<(MFamily, Vec<usize>)> {
        let flags = self.family.flags();
        if !flags.consistent {
            return Err(Error::Precondition("inconsistent family".into()));
        }
        Ok(self.family.reduce_to_standard())
    }

    /// All member points, each a list of `k` blocks; brute enumeration.
    pub fn enumerate(&self, budget: u128) -> Result<Vec<Vec<Vec<Fp>>>> {
        let p = self.family.prime();
        let d = self.family.form.dim();
        let k = self.family.k;
        let space = (p.get() as u128).pow((d * k) as u32);
        if space > budget {
            return Err(Error::BudgetExceeded { required: space, budget });
        }
        let mut out = Vec::new();
        for raw in PointIter::new(p, d * k) {
            let xs: Vec<Vec<Fp>> = (0..k)
                .map(|i| raw[i * d..(i + 1) * d].iter().map(|&x| Fp::new(x, p)).collect())
                .collect();
            if self.membership(&xs) {
                out.push(xs);
            }
        }
        Ok(out)
    }

    pub fn count(&self, budget: u128) -> Result<u64> {
        Ok(self.enumerate(budget)?.len() as u64)
    }

    /// Project onto the blocks in `i_set` and return the projection set
    /// together with a fiber factory for the complementary blocks.
    pub fn projection_and_fibers(&self, i_set: &BTreeSet<usize>) -> Result<(MSet, FiberFactory)> {
        let k = self.family.k;
        if i_set.iter().any(|&b| b >= k) {
            return Err(Error::DimensionMismatch("projection block out of range".into()));
        }
        let (j_proj, j_fiber) = self.family.i_decomposition(i_set);
        let i_blocks: Vec<usize> = i_set.iter().copied().collect();
        let j_blocks: Vec<usize> = (0..k).filter(|b| !i_set.contains(b)).collect();
        let projection = MSet::new(reindex_family(&j_proj, &i_blocks)?);
        let factory = FiberFactory {
            family: j_fiber,
            i_blocks,
            j_blocks,
        };
        Ok((projection, factory))
    }
}

fn reindex_family(family: &MFamily, kept: &[usize]) -> Result<MFamily> {
    let d = family.form.dim();
    let p = family.prime();
    let pos_of = |b: usize| kept.iter().position(|&x| x == b);
    let mut functions = Vec::with_capacity(family.functions.len());
    for f in &family.functions {
        let mut g = MIntegralQuadratic::zero(kept.len(), d, p);
        for (&(i, j), &c) in &f.b {
            let (Some(ni), Some(nj)) = (pos_of(i), pos_of(j)) else {
                return Err(Error::Precondition(
                    "reindex: function touches a dropped block".into(),
                ));
            };
            g.set_b(ni, nj, c);
        }
        for (i, vi) in f.v.iter().enumerate() {
            if vi.iter().all(|x| x.is_zero()) {
                continue;
            }
            let Some(ni) = pos_of(i) else {
                return Err(Error::Precondition(
                    "reindex: function touches a dropped block".into(),
                ));
            };
            g.set_v(ni, vi.clone());
        }
        g.set_u(f.u);
        functions.push(g);
    }
    MFamily::new(family.form.clone(), kept.len(), functions)
}

/// Produces the fiber set over the complementary blocks for a given point
/// of the projection.
#[derive(Debug, Clone)]
pub struct FiberFactory {
    family: MFamily,
    i_blocks: Vec<usize>,
    j_blocks: Vec<usize>,
}

impl FiberFactory {
    pub fn complement_blocks(&self) -> &[usize] {
        &self.j_blocks
    }

    /// Substitute the projection point into the complement family.
    pub fn fiber(&self, x_i: &[Vec<Fp>]) -> Result<MSet> {
        assert_eq!(x_i.len(), self.i_blocks.len());
        let form = &self.family.form;
        let d = form.dim();
        let p = self.family.prime();
        let in_i = |b: usize| self.i_blocks.iter().position(|&x| x == b);
        let in_j = |b: usize| self.j_blocks.iter().position(|&x| x == b);
        let mut functions = Vec::with_capacity(self.family.functions.len());
        for f in &self.family.functions {
            let mut g = MIntegralQuadratic::zero(self.j_blocks.len(), d, p);
            let mut unew = f.u;
            let mut vnew = vec![vec![Fp::zero(p); d]; self.j_blocks.len()];
            for (&(i, j), &c) in &f.b {
                match (in_i(i), in_i(j)) {
                    (Some(ii), Some(jj)) => {
                        unew = unew + c * form.bilinear(&x_i[ii], &x_i[jj]);
                    }
                    (Some(ii), None) => {
                        let t = in_j(j).expect("block is in I or its complement");
                        let xa = form.matrix().row_vec_mul(&x_i[ii]);
                        for (o, &a) in vnew[t].iter_mut().zip(&xa) {
                            *o = *o + c * a;
                        }
                    }
                    (None, Some(jj)) => {
                        let t = in_j(i).expect("block is in I or its complement");
                        let xa = form.matrix().row_vec_mul(&x_i[jj]);
                        for (o, &a) in vnew[t].iter_mut().zip(&xa) {
                            *o = *o + c * a;
                        }
                    }
                    (None, None) => {
                        let ti = in_j(i).expect("complement block");
                        let tj = in_j(j).expect("complement block");
                        g.set_b(ti, tj, g.b(ti, tj) + c);
                    }
                }
            }
            for (i, vi) in f.v.iter().enumerate() {
                if let Some(ii) = in_i(i) {
                    unew = unew + dot(vi, &x_i[ii]);
                } else {
                    let t = in_j(i).expect("complement block");
                    for (o, &a) in vnew[t].iter_mut().zip(vi) {
                        *o = *o + a;
                    }
                }
            }
            for (t, vv) in vnew.into_iter().enumerate() {
                g.set_v(t, vv);
            }
            g.set_u(unew);
            functions.push(g);
        }
        Ok(MSet::new(MFamily::new(form.clone(), self.j_blocks.len(), functions)?))
    }
}

/// Outcome of a flat-vs-iterated average comparison.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FubiniReport {
    pub flat: (f64, f64),
    pub iterated: (f64, f64),
    pub discrepancy: f64,
    /// projection points whose fiber came out empty (skipped in the
    /// iterated mean, counted here per the exceptional-set accounting)
    pub empty_fibers: u64,
    pub projection_points: u64,
    pub set_points: u64,
}

/// Compare the flat average of `f` over the set against the iterated
/// average over projection then fibers. Both sides come from one pass of
/// per-fiber sums; the fiber sizes are enumerated, never assumed.
pub fn fubini_check(
    f: &mut dyn FnMut(&[Vec<Fp>]) -> Complex64,
    omega: &MSet,
    i_set: &BTreeSet<usize>,
    budget: u128,
) -> Result<FubiniReport> {
    let (projection, fibers) = omega.projection_and_fibers(i_set)?;
    let proj_points = projection.enumerate(budget)?;
    if proj_points.is_empty() {
        return Err(Error::EmptyDomain("projection of the set".into()));
    }
    let k = omega.blocks();
    let i_blocks: Vec<usize> = i_set.iter().copied().collect();
    let j_blocks: Vec<usize> = (0..k).filter(|b| !i_set.contains(b)).collect();
    let mut flat_sum = Complex64::new(0.0, 0.0);
    let mut flat_count = 0u64;
    let mut iter_sum = Complex64::new(0.0, 0.0);
    let mut nonempty = 0u64;
    let mut empty_fibers = 0u64;
    for x in &proj_points {
        let fiber = fibers.fiber(x)?;
        let fiber_points = fiber.enumerate(budget)?;
        if fiber_points.is_empty() {
            empty_fibers += 1;
            continue;
        }
        let mut local = Complex64::new(0.0, 0.0);
        for y in &fiber_points {
            let mut full: Vec<Vec<Fp>> = vec![Vec::new(); k];
            for (pos, &b) in i_blocks.iter().enumerate() {
                full[b] = x[pos].clone();
            }
            for (pos, &b) in j_blocks.iter().enumerate() {
                full[b] = y[pos].clone();
            }
            local += f(&full);
        }
        flat_sum += local;
        flat_count += fiber_points.len() as u64;
        iter_sum += local / fiber_points.len() as f64;
        nonempty += 1;
    }
    if flat_count == 0 {
        return Err(Error::EmptyDomain("set has no points over its projection".into()));
    }
    let flat = flat_sum / flat_count as f64;
    let iterated = iter_sum / nonempty as f64;
    Ok(FubiniReport {
        flat: (flat.re, flat.im),
        iterated: (iterated.re, iterated.im),
        discrepancy: (flat - iterated).norm(),
        empty_fibers,
        projection_points: proj_points.len() as u64,
        set_points: flat_count,
    })
}

/// View an `MSet` on one block (`k = 1`) as an averaging domain.
pub fn mset_as_omega(set: &MSet, budget: u128) -> Result<OmegaDescriptor> {
    if set.blocks() != 1 {
        return Err(Error::Precondition("omega view wants a one-block set".into()));
    }
    let pts = set.enumerate(budget)?;
    let points: BTreeSet<Vec<u64>> =
        pts.into_iter().map(|xs| xs[0].iter().map(|x| x.tau()).collect()).collect();
    Ok(OmegaDescriptor::Explicit {
        p: set.family.prime(),
        d: set.family.form.dim(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadform::random_homogeneous_form;
    use rand::Rng;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    fn dot_m(d: usize, p: Prime) -> QuadraticForm {
        QuadraticForm::dot_form(d, p)
    }

    #[test]
    fn eval_matches_definition() {
        let p = p5();
        let m = dot_m(2, p);
        let mut f = MIntegralQuadratic::zero(2, 2, p);
        f.set_b(0, 1, Fp::new(2, p));
        f.set_v(1, vec![Fp::one(p), Fp::zero(p)]);
        f.set_u(Fp::new(3, p));
        let x0 = crate::field::iota_vec(&[1, 2], p);
        let x1 = crate::field::iota_vec(&[3, 4], p);
        // 2*(x0·x1) + x1_1 + 3 = 2*(3+8) + 3 + 3 = 28 ≡ 3 (mod 5)
        assert_eq!(f.eval(&m, &[x0, x1]).tau(), 3);
    }

    #[test]
    fn vm_round_trip() {
        let p = p5();
        let mut rng = crate::rng::stream(8, "mset/vm");
        for _ in 0..20 {
            let k = rng.gen_range(1..4usize);
            let d = rng.gen_range(1..4usize);
            let mut f = MIntegralQuadratic::zero(k, d, p);
            for i in 0..k {
                for j in i..k {
                    f.set_b(i, j, Fp::new(rng.gen_range(0..5), p));
                }
                f.set_v(i, (0..d).map(|_| Fp::new(rng.gen_range(0..5), p)).collect());
            }
            f.set_u(Fp::new(rng.gen_range(0..5), p));
            let coords = f.v_m();
            assert_eq!(coords.len(), MIntegralQuadratic::vm_len(k, d));
            assert_eq!(MIntegralQuadratic::from_v_m(&coords, k, d, p), f);
        }
    }

    #[test]
    fn vm_ordering_is_block_major_from_top() {
        // k=2, d=1: v_M = (b_22, b_21, v_2, b_11, v_1, u) in paper labels,
        // i.e. blocks (1,1),(1,0),v[1],(0,0),v[0],u in 0-indexed code.
        let p = p5();
        let mut f = MIntegralQuadratic::zero(2, 1, p);
        f.set_b(1, 1, Fp::new(1, p));
        f.set_b(0, 1, Fp::new(2, p));
        f.set_v(1, vec![Fp::new(3, p)]);
        f.set_b(0, 0, Fp::new(4, p));
        f.set_v(0, vec![Fp::new(1, p)]);
        f.set_u(Fp::new(2, p));
        let taus: Vec<u64> = f.v_m().iter().map(|x| x.tau()).collect();
        assert_eq!(taus, vec![1, 2, 3, 4, 1, 2]);
    }

    #[test]
    fn family_flag_examples() {
        let p = p5();
        let m = dot_m(3, p);
        // {M(n)} nondegenerate homogeneous: consistent, independent, dim 1
        let fam = MFamily::box_family(&m, 0);
        let flags = fam.flags();
        assert!(flags.consistent && flags.independent);
        assert_eq!(flags.dimension, 1);

        // {M(n), M(n)+1}: difference is the constant 1 -> inconsistent
        let mut shifted = fam.functions[0].clone();
        shifted.set_u(shifted.u() + Fp::one(p));
        let fam2 = MFamily::new(m.clone(), 1, vec![fam.functions[0].clone(), shifted]).unwrap();
        let flags2 = fam2.flags();
        assert!(!flags2.consistent);
        assert!(!flags2.independent);

        // {F, 2F}: consistent, dependent, dim 1
        let double = {
            let coords: Vec<Fp> =
                fam.functions[0].v_m().iter().map(|&c| c * Fp::new(2, p)).collect();
            MIntegralQuadratic::from_v_m(&coords, 1, 3, p)
        };
        let fam3 = MFamily::new(m, 1, vec![fam.functions[0].clone(), double]).unwrap();
        let flags3 = fam3.flags();
        assert!(flags3.consistent && !flags3.independent);
        assert_eq!(flags3.dimension, 1);
    }

    #[test]
    fn box1_standard_representation_has_dimension_vector_1_1() {
        let p = p5();
        let m = dot_m(3, p); // pure homogeneous
        let fam = MFamily::box_family(&m, 1);
        let (std_fam, dims) = fam.standard_representation().unwrap();
        assert_eq!(dims, vec![1, 1]);
        assert_eq!(std_fam.len(), 2);
        // idempotence: reducing again returns the same functions
        let (again, dims2) = std_fam.standard_representation().unwrap();
        assert_eq!(dims2, dims);
        for (a, b) in std_fam.functions().iter().zip(again.functions()) {
            assert_eq!(a.v_m(), b.v_m());
        }
    }

    #[test]
    fn box2_family_has_total_dimension_4() {
        let p = p5();
        let m = dot_m(4, p);
        let fam = MFamily::box_family(&m, 2);
        assert_eq!(fam.len(), 4);
        assert_eq!(fam.flags().dimension, 4);
        let set = MSet::new(MFamily::box_family(&m, 1));
        assert_eq!(set.total_codimension().unwrap(), 2);
        let empty = MSet::new(MFamily::new(m, 1, vec![]).unwrap());
        assert_eq!(empty.total_codimension().unwrap(), 0);
    }

    #[test]
    fn box_family_membership_matches_corner_conditions() {
        let p = Prime::new(3).unwrap();
        let mut rng = crate::rng::stream(13, "mset/box-membership");
        let m = random_homogeneous_form(&mut rng, p, 2);
        let fam = MFamily::box_family(&m, 2);
        let set = MSet::new(fam);
        let omega = OmegaDescriptor::Sphere(crate::quadform::SphereSet::new(m.clone(), vec![]));
        for raw in PointIter::new(p, 6) {
            let xs: Vec<Vec<Fp>> = (0..3)
                .map(|i| raw[i * 2..(i + 1) * 2].iter().map(|&x| Fp::new(x, p)).collect())
                .collect();
            let tuple = crate::gowers::BoxTuple {
                n: raw[0..2].to_vec(),
                hs: vec![raw[2..4].to_vec(), raw[4..6].to_vec()],
            };
            assert_eq!(set.membership(&xs), crate::gowers::box_member(&omega, &tuple));
        }
    }

    #[test]
    fn codimension_invariant_under_redundancy_and_transformations() {
        let p = Prime::new(7).unwrap();
        let mut rng = crate::rng::stream(21, "mset/codim-invariance");
        for _ in 0..20 {
            let m = random_homogeneous_form(&mut rng, p, 3);
            let fam = MFamily::box_family(&m, 1);
            let base = MSet::new(fam.clone()).total_codimension().unwrap();
            // add random combinations: same span, same codimension
            let mut fns = fam.functions().to_vec();
            let c1 = Fp::new(rng.gen_range(0..7), p);
            let c2 = Fp::new(rng.gen_range(0..7), p);
            let combo: Vec<Fp> = fns[0]
                .v_m()
                .iter()
                .zip(fns[1].v_m().iter())
                .map(|(&a, &b)| a * c1 + b * c2)
                .collect();
            fns.push(MIntegralQuadratic::from_v_m(&combo, 2, 3, p));
            let redundant = MSet::new(MFamily::new(m.clone(), 2, fns).unwrap());
            assert_eq!(redundant.total_codimension().unwrap(), base);

            // bijective block mix + shift preserves codimension exactly
            let c = loop {
                let cand = FpMatrix::from_ints(
                    2,
                    2,
                    &[
                        rng.gen_range(0..7),
                        rng.gen_range(0..7),
                        rng.gen_range(0..7),
                        rng.gen_range(0..7),
                    ],
                    p,
                );
                if cand.rank() == 2 {
                    break cand;
                }
            };
            let shift: Vec<Vec<Fp>> = (0..2)
                .map(|_| (0..3).map(|_| Fp::new(rng.gen_range(0..7), p)).collect())
                .collect();
            let moved = MSet::new(fam.compose_affine(&c, &shift));
            assert_eq!(moved.total_codimension().unwrap(), base);
        }
    }

    #[test]
    fn compose_affine_evaluates_pointwise() {
        let p = Prime::new(3).unwrap();
        let mut rng = crate::rng::stream(17, "mset/compose");
        let m = random_homogeneous_form(&mut rng, p, 2);
        let fam = MFamily::box_family(&m, 1);
        let c = FpMatrix::from_ints(2, 2, &[1, 2, 1, 1], p); // det = -1, bijective
        let shift: Vec<Vec<Fp>> = (0..2)
            .map(|_| (0..2).map(|_| Fp::new(rng.gen_range(0..3), p)).collect())
            .collect();
        let composed = fam.compose_affine(&c, &shift);
        for raw in PointIter::new(p, 4) {
            let xs: Vec<Vec<Fp>> = (0..2)
                .map(|i| raw[i * 2..(i + 1) * 2].iter().map(|&x| Fp::new(x, p)).collect())
                .collect();
            // y_i = sum_s c[(s,i)] x_s + w_i
            let ys: Vec<Vec<Fp>> = (0..2)
                .map(|i| {
                    let mut y = shift[i].clone();
                    for s in 0..2 {
                        for t in 0..2 {
                            y[t] = y[t] + c[(s, i)] * xs[s][t];
                        }
                    }
                    y
                })
                .collect();
            for (orig, comp) in fam.functions().iter().zip(composed.functions()) {
                assert_eq!(orig.eval(&m, &ys), comp.eval(&m, &xs));
            }
        }
    }

    #[test]
    fn i_decomposition_of_box1() {
        // J = {M(n), M(n+h)-M(n)}, I = {n}: J' spans {M(n)}, J'' the rest.
        let p = p5();
        let m = dot_m(3, p);
        let fam = MFamily::box_family(&m, 1);
        let i_set: BTreeSet<usize> = [0].into();
        let (jp, js) = fam.i_decomposition(&i_set);
        assert_eq!(jp.len(), 1);
        assert_eq!(js.len(), 1);
        // J' element is a multiple of M(n): b_00 nonzero, nothing on block 1
        let f = &jp.functions()[0];
        assert!(!f.b(0, 0).is_zero());
        assert!(f.b(0, 1).is_zero() && f.b(1, 1).is_zero());
        assert!(f.v(1).iter().all(|x| x.is_zero()));
        // dimension count: span(J') ⊕ span(J'') = span(J)
        let all = MFamily::new(
            m.clone(),
            2,
            jp.functions().iter().chain(js.functions()).cloned().collect(),
        )
        .unwrap();
        assert_eq!(all.flags().dimension, fam.flags().dimension);

        // I = all blocks: J' spans everything, J'' empty
        let every: BTreeSet<usize> = [0, 1].into();
        let (jp2, js2) = fam.i_decomposition(&every);
        assert_eq!(jp2.flags().dimension, fam.flags().dimension);
        assert!(js2.is_empty());

        // family with no I-only combination: {(nA)·h} with I = {n}
        let mut cross = MIntegralQuadratic::zero(2, 3, p);
        cross.set_b(0, 1, Fp::one(p));
        let fam3 = MFamily::new(m, 2, vec![cross]).unwrap();
        let (jp3, js3) = fam3.i_decomposition(&i_set);
        assert!(jp3.is_empty());
        assert_eq!(js3.len(), 1);
    }

    #[test]
    fn decomposition_membership_equivalence_exhaustive() {
        // x in Omega  <=>  x_I satisfies J' and x satisfies J''; p=3.
        let p = Prime::new(3).unwrap();
        let mut rng = crate::rng::stream(30, "mset/decomp-equiv");
        let m = random_homogeneous_form(&mut rng, p, 2);
        let fam = MFamily::box_family(&m, 1);
        let set = MSet::new(fam.clone());
        let i_set: BTreeSet<usize> = [0].into();
        let (jp, js) = fam.i_decomposition(&i_set);
        for raw in PointIter::new(p, 4) {
            let xs: Vec<Vec<Fp>> = (0..2)
                .map(|i| raw[i * 2..(i + 1) * 2].iter().map(|&x| Fp::new(x, p)).collect())
                .collect();
            let both = jp.vanishes_at(&xs) && js.vanishes_at(&xs);
            assert_eq!(set.membership(&xs), both);
        }
    }

    #[test]
    fn projection_and_fibers_of_box1() {
        let p = p5();
        let m = dot_m(3, p);
        let set = MSet::new(MFamily::box_family(&m, 1));
        let i_set: BTreeSet<usize> = [0].into();
        let (projection, fibers) = set.projection_and_fibers(&i_set).unwrap();
        // projection is V(M)
        let sphere = crate::quadform::SphereSet::new(m.clone(), vec![]);
        let proj_pts = projection.enumerate(1 << 24).unwrap();
        let sphere_pts = sphere.points(1 << 24).unwrap();
        assert_eq!(proj_pts.len(), sphere_pts.len());
        // fiber over n is {h : M(n+h) = 0}, verified by substitution
        let n = &proj_pts[3][0];
        let fiber = fibers.fiber(std::slice::from_ref(n)).unwrap();
        for h_pt in fiber.enumerate(1 << 24).unwrap() {
            let nh: Vec<Fp> = n.iter().zip(&h_pt[0]).map(|(&a, &b)| a + b).collect();
            assert!(m.eval(&nh).is_zero());
        }
        // fiber sizes equal |V(M)| here (translation bijection)
        assert_eq!(fiber.count(1 << 24).unwrap() as usize, sphere_pts.len());
    }

    #[test]
    fn set_size_tracks_codimension() {
        // |Omega| = p^{dk - r}(1 + eps), |eps| <= 3 p^{-1/2}, at p in {5,7}.
        for (pv, d) in [(5u64, 3usize), (7, 3)] {
            let p = Prime::new(pv).unwrap();
            let mut rng = crate::rng::stream(pv, "mset/size");
            let m = random_homogeneous_form(&mut rng, p, d);
            let set = MSet::new(MFamily::box_family(&m, 1));
            let r = set.total_codimension().unwrap() as i32;
            let count = set.count(1 << 34).unwrap() as f64;
            let predicted = (pv as f64).powi((d * 2) as i32 - r);
            let eps = (count / predicted - 1.0).abs();
            assert!(
                eps <= 3.0 * (pv as f64).powf(-0.5),
                "p={pv}: count {count}, predicted {predicted}, eps {eps}"
            );
        }
    }

    #[test]
    fn fubini_on_box1_small() {
        let p = Prime::new(7).unwrap();
        let mut rng = crate::rng::stream(77, "mset/fubini");
        let m = random_homogeneous_form(&mut rng, p, 3);
        let set = MSet::new(MFamily::box_family(&m, 1));
        let i_set: BTreeSet<usize> = [0].into();
        // f identically 1: flat and iterated agree to rounding here because
        // the fibers are translates of the sphere (equal sizes).
        let mut ones = |_: &[Vec<Fp>]| Complex64::new(1.0, 0.0);
        let report = fubini_check(&mut ones, &set, &i_set, 1 << 34).unwrap();
        assert!(report.discrepancy <= 3.0 * 7f64.powf(-0.5));
        assert_eq!(report.empty_fibers, 0);

        // a nontrivial bounded f stays within the stated tolerance
        let table = crate::gowers::phase_table(7);
        let mut phase = |xs: &[Vec<Fp>]| {
            let t = (xs[0][0].tau() * xs[1][1].tau() + xs[1][0].tau()) % 7;
            table[t as usize]
        };
        let report2 = fubini_check(&mut phase, &set, &i_set, 1 << 34).unwrap();
        assert!(report2.discrepancy <= 3.0 * 7f64.powf(-0.5));
    }
}
