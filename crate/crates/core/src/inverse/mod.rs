//! The constructive degree-1 inverse step on spheres, polynomial phases
//! (the `p`-periodic abelian degree-`s` objects), correlation computation
//! and converse checks.

mod phase;

pub use phase::{affine_pullback, PolyPhase};

use crate::field::Prime;
use crate::gowers::{dft, gowers_norm, GowersValue, GridFunction, NormMode, OmegaDescriptor};
use crate::quadform::{rank_restriction, QuadraticForm, SphereSet};
use crate::{Error, Result};
use num_complex::Complex64;

/// Frequency certificate produced by the degree-1 inversion.
#[derive(Debug, Clone, serde::Serialize)]
pub struct InverseCertificate {
    pub xi: Vec<u64>,
    /// `|E_{n in V(M)} f(n) exp(-tau(xi·n)/p)|`, recomputable exactly.
    pub correlation: f64,
    /// `(eps/2)^4`, the bound the certificate is measured against.
    pub threshold: f64,
    pub p: u64,
    pub d: usize,
}

impl InverseCertificate {
    /// Direct recomputation of the recorded correlation magnitude.
    pub fn recompute(&self, f: &GridFunction, m: &QuadraticForm) -> Result<f64> {
        let omega = OmegaDescriptor::Sphere(SphereSet::new(m.clone(), vec![]));
        let phase = PolyPhase::character(m.prime(), self.d, &self.xi)?;
        let c = correlate_phase(f, &phase, &omega, u128::MAX)?;
        Ok(c.magnitude)
    }
}

/// Tensor-valued correlation `E_{n in Omega} f(n) ⊗ g(n)`.
#[derive(Debug, Clone)]
pub struct CorrelationValue {
    pub tensor: Vec<Complex64>,
    pub magnitude: f64,
    pub points: u64,
}

/// `E_{n in Omega} f(n) ⊗ g(n)` by exact enumeration over `Omega`.
pub fn correlate(
    f: &GridFunction,
    g: &GridFunction,
    omega: &OmegaDescriptor,
    budget: u128,
) -> Result<CorrelationValue> {
    if f.prime() != g.prime() || f.dim() != g.dim() {
        return Err(Error::DimensionMismatch("correlate wants matching grids".into()));
    }
    let members = omega.enumerate(budget)?;
    if members.is_empty() {
        return Err(Error::EmptyDomain(omega.describe()));
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); f.dim_out() * g.dim_out()];
    for n in &members {
        let idx = f.index_of(n);
        let fv = f.value(idx);
        let gv = g.value(idx);
        let mut t = 0usize;
        for &a in fv {
            for &b in gv {
                acc[t] += a * b;
                t += 1;
            }
        }
    }
    let points = members.len() as u64;
    let tensor: Vec<Complex64> = acc.into_iter().map(|z| z / points as f64).collect();
    let magnitude = tensor.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(CorrelationValue { tensor, magnitude, points })
}

/// Correlation against a polynomial phase, evaluated on the fly.
pub fn correlate_phase(
    f: &GridFunction,
    phase: &PolyPhase,
    omega: &OmegaDescriptor,
    budget: u128,
) -> Result<CorrelationValue> {
    if f.prime() != phase.prime() || f.dim() != phase.dim() {
        return Err(Error::DimensionMismatch("correlate wants matching grids".into()));
    }
    let members = omega.enumerate(budget)?;
    if members.is_empty() {
        return Err(Error::EmptyDomain(omega.describe()));
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); f.dim_out()];
    for n in &members {
        let idx = f.index_of(n);
        let w = phase.eval_raw(n);
        for (a, &b) in acc.iter_mut().zip(f.value(idx)) {
            *a += b * w;
        }
    }
    let points = members.len() as u64;
    let tensor: Vec<Complex64> = acc.into_iter().map(|z| z / points as f64).collect();
    let magnitude = tensor.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(CorrelationValue { tensor, magnitude, points })
}

/// The degree-1 inversion: DFT of `1_{V(M)} f`, take the peak frequency
/// (lexicographically least `tau(xi)` on ties), and certify the correlation
/// over the sphere. Returns `None` only when the peak correlation falls
/// below `(eps/2)^4 (1 - 5 p^{-1/2})`.
pub fn sgi1_invert(
    f: &GridFunction,
    m: &QuadraticForm,
    eps: f64,
) -> Result<Option<InverseCertificate>> {
    if f.dim_out() != 1 {
        return Err(Error::Precondition("sgi1_invert wants a scalar function".into()));
    }
    if f.dim() != m.dim() || f.prime() != m.prime() {
        return Err(Error::DimensionMismatch("function and form grids differ".into()));
    }
    let p = f.prime().get();
    let omega = OmegaDescriptor::Sphere(SphereSet::new(m.clone(), vec![]));
    let delta = GridFunction::indicator(&omega);
    let sphere_size: f64 = delta.values().iter().map(|z| z.re).sum();
    if sphere_size < 0.5 {
        return Err(Error::EmptyDomain("V(M)".into()));
    }
    let g = f.pointwise_mul(&delta)?;
    let g_hat = dft(&g);
    let (mut best_idx, mut best) = (0usize, -1.0f64);
    for (i, z) in g_hat.values().iter().enumerate() {
        let mag = z.norm();
        if mag > best + 1e-15 * best.abs() {
            best = mag;
            best_idx = i;
        }
    }
    // E_{n in V} f e(-tau(xi·n)/p) = (p^d / |V|) * g_hat(xi)
    let correlation = best * (p as f64).powi(f.dim() as i32) / sphere_size;
    let threshold = (eps / 2.0).powi(4);
    let slack = threshold * (1.0 - 5.0 * (p as f64).powf(-0.5));
    if correlation < slack {
        return Ok(None);
    }
    let mut xi = vec![0u64; f.dim()];
    let mut rem = best_idx;
    for t in (0..f.dim()).rev() {
        xi[t] = (rem % p as usize) as u64;
        rem /= p as usize;
    }
    Ok(Some(InverseCertificate { xi, correlation, threshold, p, d: f.dim() }))
}

/// Both quantities of the converse direction: correlation of `f` with a
/// degree-`s` phase on the domain, and the `U^{s+1}` norm of `f` there.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConverseReport {
    pub correlation: f64,
    pub u_norm: f64,
    pub s: usize,
    /// `rank(M|_{V+c}) >= s^2 + 3s + 5`, the stated guarantee regime.
    pub rank_ok: bool,
}

pub fn converse_check(
    f: &GridFunction,
    phase: &PolyPhase,
    sphere: &SphereSet,
    s: usize,
    mode: NormMode,
    budget: u128,
) -> Result<ConverseReport> {
    let omega = OmegaDescriptor::Sphere(sphere.clone());
    let corr = correlate_phase(f, phase, &omega, budget)?;
    let norm: GowersValue = gowers_norm(f, &omega, s + 1, mode, budget)?;
    let rank_here = match sphere.constraint() {
        Some(sub) => rank_restriction(sphere.form(), sub),
        None => sphere.form().rank(),
    };
    Ok(ConverseReport {
        correlation: corr.magnitude,
        u_norm: norm.norm,
        s,
        rank_ok: rank_here >= s * s + 3 * s + 5,
    })
}

/// Measure the `U^2(V(M))` norm of `f` through the exact spectral identity
/// (`pla` left-hand side), returning the norm itself.
pub fn u2_sphere_norm(f: &GridFunction, m: &QuadraticForm) -> Result<f64> {
    let bound = crate::gowers::pla_bound(f, m, true)?;
    Ok(bound.lhs.max(0.0).powf(0.25))
}
