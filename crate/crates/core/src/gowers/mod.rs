//! Gowers sets `Box_s(Omega)`, local Gowers norms, and the multidimensional
//! discrete Fourier transform over `F_p^d`.
//!
//! Grid functions are stored densely in lexicographic `tau` order: the value
//! at `n` lives at index `sum_i tau(n_i) p^{d-1-i}`. Complex arithmetic is
//! double precision; exactness claims are stated at `1e-9` absolute
//! tolerance throughout.

mod count;
mod dft;
mod io;

pub use count::{
    counter_by_name, BoxCountStrategy, CountEstimate, ExhaustiveCount, FourierCount, SampledCount,
    COUNT_STRATEGY_NAMES,
};
pub use dft::{dft, idft, pla_bound, u2_fourier, PlaBound};
pub use io::{read_grid_function, write_grid_function};

use crate::field::{Fp, Prime};
use crate::quadform::{PointIter, SphereSet};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeSet;

/// Dense map `F_p^d -> C^D`.
#[derive(Debug, Clone)]
pub struct GridFunction {
    p: Prime,
    d: usize,
    dim_out: usize,
    values: Vec<Complex64>,
    one_bounded: bool,
}

impl GridFunction {
    pub fn new(p: Prime, d: usize, dim_out: usize, values: Vec<Complex64>) -> Result<Self> {
        let points = (p.get() as u128).pow(d as u32);
        let expect = points
            .checked_mul(dim_out as u128)
            .filter(|&n| n <= usize::MAX as u128)
            .ok_or(Error::BudgetExceeded { required: points, budget: usize::MAX as u128 })?;
        if values.len() as u128 != expect {
            return Err(Error::DimensionMismatch(format!(
                "grid function wants {expect} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::MalformedData("non-finite grid value".into()));
        }
        Ok(GridFunction { p, d, dim_out, values, one_bounded: false })
    }

    pub fn constant(p: Prime, d: usize, value: Complex64) -> Self {
        let n = (p.get() as usize).pow(d as u32);
        let mut f = GridFunction { p, d, dim_out: 1, values: vec![value; n], one_bounded: false };
        f.one_bounded = value.norm() <= 1.0 + 1e-12;
        f
    }

    pub fn ones(p: Prime, d: usize) -> Self {
        Self::constant(p, d, Complex64::new(1.0, 0.0))
    }

    /// Scalar function from raw `tau` coordinates.
    pub fn from_fn(p: Prime, d: usize, mut f: impl FnMut(&[u64]) -> Complex64) -> Self {
        let n = (p.get() as usize).pow(d as u32);
        let mut values = Vec::with_capacity(n);
        for pt in PointIter::new(p, d) {
            values.push(f(&pt));
        }
        GridFunction { p, d, dim_out: 1, values, one_bounded: false }
    }

    /// The character `n -> exp(tau(xi·n)/p)` with `exp(x) = e^{2 pi i x}`.
    pub fn character(p: Prime, d: usize, xi: &[u64]) -> Self {
        assert_eq!(xi.len(), d);
        let pv = p.get();
        let table = phase_table(pv);
        let mut f = Self::from_fn(p, d, |pt| {
            let mut acc: u128 = 0;
            for (&x, &n) in xi.iter().zip(pt) {
                acc += (x * n) as u128;
            }
            table[(acc % pv as u128) as usize]
        });
        f.one_bounded = true;
        f
    }

    /// Indicator of a membership domain as a scalar grid function.
    pub fn indicator(omega: &OmegaDescriptor) -> Self {
        let p = omega.prime();
        let d = omega.dim();
        let mut f = Self::from_fn(p, d, |pt| {
            if omega.contains_raw(pt) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        f.one_bounded = true;
        f
    }

    /// Seeded uniform random phases (unimodular values).
    pub fn random_unimodular<R: Rng>(p: Prime, d: usize, rng: &mut R) -> Self {
        let mut f = Self::from_fn(p, d, |_| {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::new(theta.cos(), theta.sin())
        });
        f.one_bounded = true;
        f
    }

    /// Seeded random signs.
    pub fn random_signs<R: Rng>(p: Prime, d: usize, rng: &mut R) -> Self {
        let mut f = Self::from_fn(p, d, |_| {
            if rng.gen_bool(0.5) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(-1.0, 0.0)
            }
        });
        f.one_bounded = true;
        f
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    #[inline]
    pub fn points(&self) -> usize {
        if self.dim_out == 0 {
            0
        } else {
            self.values.len() / self.dim_out
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        self.one_bounded = false;
        &mut self.values
    }

    #[inline]
    pub fn index_of(&self, pt: &[u64]) -> usize {
        let p = self.p.get() as usize;
        let mut idx = 0usize;
        for &x in pt {
            idx = idx * p + x as usize;
        }
        idx
    }

    #[inline]
    pub fn value(&self, idx: usize) -> &[Complex64] {
        &self.values[idx * self.dim_out..(idx + 1) * self.dim_out]
    }

    #[inline]
    pub fn scalar(&self, idx: usize) -> Complex64 {
        debug_assert_eq!(self.dim_out, 1);
        self.values[idx]
    }

    /// Verify and set the 1-bounded flag: every point value has Euclidean
    /// magnitude at most `1 + 1e-12`.
    pub fn verify_one_bounded(&mut self) -> bool {
        let ok = (0..self.points()).all(|i| {
            let norm_sq: f64 = self.value(i).iter().map(|z| z.norm_sqr()).sum();
            norm_sq.sqrt() <= 1.0 + 1e-12
        });
        self.one_bounded = ok;
        ok
    }

    pub fn is_one_bounded(&self) -> bool {
        self.one_bounded
    }

    /// Pointwise product with a scalar grid function (e.g. an indicator).
    pub fn pointwise_mul(&self, g: &GridFunction) -> Result<GridFunction> {
        if g.dim_out != 1 || g.p != self.p || g.d != self.d {
            return Err(Error::DimensionMismatch(
                "pointwise_mul wants a scalar factor on the same grid".into(),
            ));
        }
        let mut values = self.values.clone();
        for i in 0..self.points() {
            let w = g.values[i];
            for c in 0..self.dim_out {
                values[i * self.dim_out + c] *= w;
            }
        }
        GridFunction::new(self.p, self.d, self.dim_out, values)
    }

    /// Rescale all values by a real factor.
    pub fn scale(&mut self, t: f64) {
        for v in &mut self.values {
            *v *= t;
        }
        self.one_bounded = false;
    }
}

/// `e^{2 pi i j / p}` for `j` in `0..p`.
pub fn phase_table(p: u64) -> Vec<Complex64> {
    (0..p)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / p as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

/// The averaging domain: the full grid, a sphere set, or explicit points.
#[derive(Debug, Clone)]
pub enum OmegaDescriptor {
    FullGrid { p: Prime, d: usize },
    Sphere(SphereSet),
    Explicit { p: Prime, d: usize, points: BTreeSet<Vec<u64>> },
}

impl OmegaDescriptor {
    pub fn prime(&self) -> Prime {
        match self {
            OmegaDescriptor::FullGrid { p, .. } => *p,
            OmegaDescriptor::Sphere(s) => s.prime(),
            OmegaDescriptor::Explicit { p, .. } => *p,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OmegaDescriptor::FullGrid { d, .. } => *d,
            OmegaDescriptor::Sphere(s) => s.dim(),
            OmegaDescriptor::Explicit { d, .. } => *d,
        }
    }

    pub fn contains_raw(&self, n: &[u64]) -> bool {
        match self {
            OmegaDescriptor::FullGrid { .. } => true,
            OmegaDescriptor::Sphere(s) => s.contains_raw(n),
            OmegaDescriptor::Explicit { points, .. } => points.contains(n),
        }
    }

    pub fn contains(&self, n: &[Fp]) -> bool {
        let raw: Vec<u64> = n.iter().map(|x| x.tau()).collect();
        self.contains_raw(&raw)
    }

    /// All member points in lexicographic `tau` order.
    pub fn enumerate(&self, budget: u128) -> Result<Vec<Vec<u64>>> {
        let required = (self.prime().get() as u128).pow(self.dim() as u32);
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        match self {
            OmegaDescriptor::Explicit { points, .. } => Ok(points.iter().cloned().collect()),
            _ => Ok(PointIter::new(self.prime(), self.dim())
                .filter(|pt| self.contains_raw(pt))
                .collect()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            OmegaDescriptor::FullGrid { p, d } => format!("full grid F_{p}^{d}"),
            OmegaDescriptor::Sphere(s) => {
                let mut out = format!("V(M), {} shift(s)", s.shifts().len());
                if s.constraint().is_some() {
                    out.push_str(", affine constraint");
                }
                out
            }
            OmegaDescriptor::Explicit { points, .. } => format!("{} explicit points", points.len()),
        }
    }
}

/// A candidate element `(n, h_1, ..., h_s)` of `Box_s(Omega)`.
#[derive(Debug, Clone)]
pub struct BoxTuple {
    pub n: Vec<u64>,
    pub hs: Vec<Vec<u64>>,
}

/// Exact corner check: all `2^s` corners `n + eps·h` lie in `Omega`.
pub fn box_member(omega: &OmegaDescriptor, t: &BoxTuple) -> bool {
    let p = omega.prime().get();
    let s = t.hs.len();
    let mut corner = t.n.clone();
    for eps in 0u32..(1 << s) {
        corner.copy_from_slice(&t.n);
        for (k, h) in t.hs.iter().enumerate() {
            if eps >> k & 1 == 1 {
                for (c, &hv) in corner.iter_mut().zip(h) {
                    *c = (*c + hv) % p;
                }
            }
        }
        if !omega.contains_raw(&corner) {
            return false;
        }
    }
    true
}

/// How a norm average is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum NormMode {
    Exhaustive,
    /// Collect this many uniform Box tuples by seeded rejection sampling.
    Sampled { samples: u64, seed: u64 },
}

/// Result of a (possibly vector-valued) Gowers average.
#[derive(Debug, Clone)]
pub struct GowersValue {
    /// Mean of the `2^s`-corner tensor product; length `D^{2^s}`.
    pub tensor_mean: Vec<Complex64>,
    /// Euclidean magnitude of the tensor mean.
    pub magnitude: f64,
    /// `magnitude^{1/2^s}`, the norm value.
    pub norm: f64,
    /// Number of Box tuples averaged (all of them, or the sample size).
    pub tuples: u64,
    /// Standard error of the magnitude, sampled mode only.
    pub standard_error: Option<f64>,
}

/// The `s`-th `Omega`-Gowers norm of `f`.
///
/// Exhaustive mode generates `Box_s(Omega)` through the member list of
/// `Omega`: tuples arise as `(n, z_1 - n, ..., z_s - n)` with `n, z_k`
/// members and the remaining corners checked. Sampled mode draws uniform Box
/// tuples by seeded rejection. An empty Gowers set is a domain error.
pub fn gowers_norm(
    f: &GridFunction,
    omega: &OmegaDescriptor,
    s: usize,
    mode: NormMode,
    budget: u128,
) -> Result<GowersValue> {
    if f.prime() != omega.prime() || f.dim() != omega.dim() {
        return Err(Error::DimensionMismatch("function and domain grids differ".into()));
    }
    let tensor_len = (f.dim_out() as u128).checked_pow(1 << s as u32).unwrap_or(u128::MAX);
    if tensor_len > 1 << 16 {
        return Err(Error::BudgetExceeded { required: tensor_len, budget: 1 << 16 });
    }
    match mode {
        NormMode::Exhaustive => gowers_norm_exhaustive(f, omega, s, budget),
        NormMode::Sampled { samples, seed } => {
            gowers_norm_sampled(f, omega, s, samples, seed, budget)
        }
    }
}

pub(crate) fn corner_indices(f: &GridFunction, n: &[u64], hs: &[Vec<u64>]) -> Vec<usize> {
    let p = f.prime().get();
    let s = hs.len();
    let mut out = Vec::with_capacity(1 << s);
    let mut corner = vec![0u64; n.len()];
    for eps in 0u32..(1 << s) {
        corner.copy_from_slice(n);
        for (k, h) in hs.iter().enumerate() {
            if eps >> k & 1 == 1 {
                for (c, &hv) in corner.iter_mut().zip(h) {
                    *c = (*c + hv) % p;
                }
            }
        }
        out.push(f.index_of(&corner));
    }
    out
}

/// Tensor product over corners with conjugation `C^{|eps|}`; `eps` runs in
/// increasing binary order, bit `k` standing for `eps_{k+1}`.
fn corner_tensor(f: &GridFunction, corners: &[usize]) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(1.0, 0.0)];
    for (eps, &idx) in corners.iter().enumerate() {
        let conj = (eps.count_ones() % 2) == 1;
        let v = f.value(idx);
        let mut next = Vec::with_capacity(acc.len() * v.len());
        for &a in &acc {
            for &b in v {
                next.push(if conj { a * b.conj() } else { a * b });
            }
        }
        acc = next;
    }
    acc
}

fn finish(acc: Vec<Complex64>, tuples: u64, s: usize, se: Option<f64>) -> GowersValue {
    let tensor_mean: Vec<Complex64> = acc.into_iter().map(|z| z / tuples as f64).collect();
    let magnitude = tensor_mean.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    GowersValue {
        magnitude,
        norm: magnitude.powf(1.0 / (1u64 << s) as f64),
        tensor_mean,
        tuples,
        standard_error: se,
    }
}

fn gowers_norm_exhaustive(
    f: &GridFunction,
    omega: &OmegaDescriptor,
    s: usize,
    budget: u128,
) -> Result<GowersValue> {
    let p = f.prime().get();
    let d = f.dim();
    let members = omega.enumerate(budget)?;
    if members.is_empty() {
        return Err(Error::EmptyDomain(omega.describe()));
    }
    let work = (members.len() as u128).checked_pow(s as u32 + 1).unwrap_or(u128::MAX);
    if work > budget {
        return Err(Error::BudgetExceeded { required: work, budget });
    }
    let tensor_len = f.dim_out().pow(1 << s as u32);
    let mut acc = vec![Complex64::new(0.0, 0.0); tensor_len];
    let mut tuples = 0u64;
    let mut hs = vec![vec![0u64; d]; s];
    let mut choice = vec![0usize; s];
    for n in &members {
        if s == 0 {
            let corners = corner_indices(f, n, &[]);
            for (a, b) in acc.iter_mut().zip(corner_tensor(f, &corners)) {
                *a += b;
            }
            tuples += 1;
            continue;
        }
        choice.iter_mut().for_each(|c| *c = 0);
        let mut level = 0usize;
        loop {
            if choice[level] == members.len() {
                if level == 0 {
                    break;
                }
                choice[level] = 0;
                level -= 1;
                choice[level] += 1;
                continue;
            }
            let z = &members[choice[level]];
            for (h, (&zt, &nt)) in hs[level].iter_mut().zip(z.iter().zip(n)) {
                *h = (zt + p - nt) % p;
            }
            if level + 1 < s {
                level += 1;
                continue;
            }
            let t = BoxTuple { n: n.clone(), hs: hs.clone() };
            if box_member(omega, &t) {
                let corners = corner_indices(f, n, &hs);
                for (a, b) in acc.iter_mut().zip(corner_tensor(f, &corners)) {
                    *a += b;
                }
                tuples += 1;
            }
            choice[level] += 1;
        }
    }
    if tuples == 0 {
        return Err(Error::EmptyDomain(format!("Box_{s}({})", omega.describe())));
    }
    Ok(finish(acc, tuples, s, None))
}

fn gowers_norm_sampled(
    f: &GridFunction,
    omega: &OmegaDescriptor,
    s: usize,
    samples: u64,
    seed: u64,
    budget: u128,
) -> Result<GowersValue> {
    let p = f.prime().get();
    let d = f.dim();
    let members = omega.enumerate(budget)?;
    if members.is_empty() {
        return Err(Error::EmptyDomain(omega.describe()));
    }
    let mut rng = crate::rng::stream(seed, "gowers/sampled-norm");
    let tensor_len = f.dim_out().pow(1 << s as u32);
    let mut acc = vec![Complex64::new(0.0, 0.0); tensor_len];
    let mut terms: Vec<Vec<Complex64>> = Vec::with_capacity(samples as usize);
    let max_attempts = samples.saturating_mul(100_000);
    let mut attempts = 0u64;
    let mut accepted = 0u64;
    let mut hs = vec![vec![0u64; d]; s];
    while accepted < samples {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::BudgetExceeded {
                required: attempts as u128,
                budget: max_attempts as u128,
            });
        }
        // n uniform on Omega, h_k uniform on the grid; conditioning on the
        // corner checks leaves the uniform distribution on Box_s(Omega).
        let n = members[rng.gen_range(0..members.len())].clone();
        for h in hs.iter_mut() {
            for c in h.iter_mut() {
                *c = rng.gen_range(0..p);
            }
        }
        let t = BoxTuple { n: n.clone(), hs: hs.clone() };
        if !box_member(omega, &t) {
            continue;
        }
        let corners = corner_indices(f, &n, &hs);
        let term = corner_tensor(f, &corners);
        for (a, &b) in acc.iter_mut().zip(&term) {
            *a += b;
        }
        terms.push(term);
        accepted += 1;
    }
    let mut value = finish(acc, accepted, s, None);
    let mean = value.tensor_mean.clone();
    let var: f64 = terms
        .iter()
        .map(|t| t.iter().zip(&mean).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>())
        .sum::<f64>()
        / (accepted.max(2) - 1) as f64;
    value.standard_error = Some((var / accepted as f64).sqrt());
    Ok(value)
}
