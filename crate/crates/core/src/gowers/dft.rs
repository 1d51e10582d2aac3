//! Multidimensional DFT over `F_p^d` and the Fourier route to `U^2` norms.
//!
//! Convention: `dft` returns `f^(xi) = E_x f(x) exp(-tau(xi·x)/p)`, the
//! average-normalized transform, computed by `d` passes of length-`p`
//! transforms. The inequality bound in [`pla_bound`] is stated for the
//! sum-normalized transform, i.e. `p^{1-d} |sum_x ...| = p |f^(xi)|`.

use super::{phase_table, GridFunction, OmegaDescriptor};
use crate::quadform::{QuadraticForm, SphereSet};
use crate::{Error, Result};
use num_complex::Complex64;

fn axis_pass(values: &mut [Complex64], p: usize, d: usize, dim_out: usize, axis: usize, table: &[Complex64], forward: bool) {
    let points = values.len() / dim_out;
    let stride = p.pow((d - 1 - axis) as u32) * dim_out;
    let block = stride * p;
    let total = points * dim_out;
    let mut line = vec![Complex64::new(0.0, 0.0); p];
    let mut base = 0usize;
    while base < total {
        for lo in 0..stride {
            let start = base + lo;
            for j in 0..p {
                line[j] = values[start + j * stride];
            }
            for k in 0..p {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &x) in line.iter().enumerate() {
                    let idx = j * k % p;
                    let w = if forward { table[idx].conj() } else { table[idx] };
                    acc += x * w;
                }
                values[start + k * stride] = acc;
            }
        }
        base += block;
    }
}

/// `f^(xi) = E_x f(x) exp(-tau(xi·x)/p)`, componentwise for vector values.
pub fn dft(f: &GridFunction) -> GridFunction {
    let p = f.prime().get() as usize;
    let d = f.dim();
    let mut values = f.values().to_vec();
    let table = phase_table(p as u64);
    for axis in 0..d {
        axis_pass(&mut values, p, d, f.dim_out(), axis, &table, true);
    }
    let scale = 1.0 / (p as f64).powi(d as i32);
    for v in &mut values {
        *v *= scale;
    }
    GridFunction::new(f.prime(), d, f.dim_out(), values).expect("same shape")
}

/// Inverse transform: `f(x) = sum_xi f^(xi) exp(+tau(xi·x)/p)`.
pub fn idft(g: &GridFunction) -> GridFunction {
    let p = g.prime().get() as usize;
    let d = g.dim();
    let mut values = g.values().to_vec();
    let table = phase_table(p as u64);
    for axis in 0..d {
        axis_pass(&mut values, p, d, g.dim_out(), axis, &table, false);
    }
    GridFunction::new(g.prime(), d, g.dim_out(), values).expect("same shape")
}

/// `(sum_xi |f^(xi)|^4)^{1/4}`: equals the `U^2` norm over the full grid.
pub fn u2_fourier(f: &GridFunction) -> Result<f64> {
    if f.dim_out() != 1 {
        return Err(Error::Precondition("u2_fourier wants a scalar function".into()));
    }
    let g = dft(f);
    Ok(g.values().iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>().powf(0.25))
}

/// Both sides of the `U^2(V(M))` spectral bound.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PlaBound {
    /// `||f||^4_{U^2(V(M))}`, via the exact parallelogram identity
    /// `p^{3d} * sum_xi |(1_V f)^(xi)|^4 / |Box_2(V(M))|`.
    pub lhs: f64,
    /// `sup_xi p^{1-d} |sum_x (1_V f)(x) e(-tau(xi·x)/p)| * (1 + 3 p^{-1/8})`.
    pub rhs: f64,
    /// The maximizing frequency (lexicographically least on ties).
    pub sup_xi: Vec<u64>,
    /// `p * |(1_V f)^(sup_xi)|`, the sum-normalized peak without the slack.
    pub sup_value: f64,
    /// Exact additive-quadruple count of `V(M)`, the `|Box_2|` denominator.
    pub box2_count: f64,
    /// Hypothesis report: `d >= 9` and `M` nondegenerate.
    pub hypotheses_met: bool,
}

/// Compute the two sides of the degree-1 inverse inequality: the fourth
/// power of the `U^2(V(M))` norm against the normalized Fourier peak of
/// `1_{V(M)} f`. Preconditions `d >= 9`, `M` nondegenerate, `f` 1-bounded
/// can be bypassed with `force` (hypotheses are then reported unmet).
pub fn pla_bound(f: &GridFunction, m: &QuadraticForm, force: bool) -> Result<PlaBound> {
    if f.dim_out() != 1 {
        return Err(Error::Precondition("pla_bound wants a scalar function".into()));
    }
    if f.dim() != m.dim() || f.prime() != m.prime() {
        return Err(Error::DimensionMismatch("function and form grids differ".into()));
    }
    let hypotheses_met = f.dim() >= 9 && m.is_nondegenerate();
    if !hypotheses_met && !force {
        return Err(Error::Precondition(format!(
            "lemma hypotheses unmet (d = {}, rank = {}); pass force to compute anyway",
            f.dim(),
            m.rank()
        )));
    }
    let p = f.prime().get() as f64;
    let d = f.dim() as i32;

    let omega = OmegaDescriptor::Sphere(SphereSet::new(m.clone(), vec![]));
    let delta = GridFunction::indicator(&omega);
    let delta_hat = dft(&delta);
    let sum4_delta: f64 = delta_hat.values().iter().map(|z| z.norm_sqr().powi(2)).sum();
    let box2 = p.powi(3 * d) * sum4_delta;
    if box2 < 0.5 {
        return Err(Error::EmptyDomain("Box_2(V(M))".into()));
    }

    let g = f.pointwise_mul(&delta)?;
    let g_hat = dft(&g);
    let sum4: f64 = g_hat.values().iter().map(|z| z.norm_sqr().powi(2)).sum();
    let lhs = p.powi(3 * d) * sum4 / box2;

    let (mut best_idx, mut best) = (0usize, -1.0f64);
    for (i, z) in g_hat.values().iter().enumerate() {
        let mag = z.norm();
        if mag > best + 1e-15 * best.abs() {
            best = mag;
            best_idx = i;
        }
    }
    let sup_value = p * best;
    let rhs = sup_value * (1.0 + 3.0 * p.powf(-0.125));

    let mut xi = vec![0u64; f.dim()];
    let mut rem = best_idx;
    for t in (0..f.dim()).rev() {
        xi[t] = (rem % f.prime().get() as usize) as u64;
        rem /= f.prime().get() as usize;
    }
    Ok(PlaBound { lhs, rhs, sup_xi: xi, sup_value, box2_count: box2, hypotheses_met })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;
    use crate::gowers::{gowers_norm, NormMode};
    use crate::quadform::PointIter;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    #[test]
    fn dft_of_one_is_delta_at_zero() {
        let f = GridFunction::ones(p3(), 2);
        let g = dft(&f);
        for (i, z) in g.values().iter().enumerate() {
            let expect = if i == 0 { 1.0 } else { 0.0 };
            assert!((z - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_of_character_is_delta_at_frequency() {
        let p = Prime::new(5).unwrap();
        let xi0 = [2u64, 4];
        let f = GridFunction::character(p, 2, &xi0);
        let g = dft(&f);
        let peak = g.index_of(&xi0);
        for (i, z) in g.values().iter().enumerate() {
            let expect = if i == peak { 1.0 } else { 0.0 };
            assert!((z.norm() - expect).abs() < 1e-12, "index {i}");
        }
    }

    #[test]
    fn dft_matches_naive_double_sum() {
        let p = p3();
        let mut rng = crate::rng::stream(2, "dft/naive");
        let f = GridFunction::random_unimodular(p, 2, &mut rng);
        let fast = dft(&f);
        let table = phase_table(3);
        for xi in PointIter::new(p, 2) {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in PointIter::new(p, 2) {
                let dotv = (xi[0] * x[0] + xi[1] * x[1]) % 3;
                acc += f.scalar(f.index_of(&x)) * table[dotv as usize].conj();
            }
            acc /= 9.0;
            assert!((acc - fast.scalar(fast.index_of(&xi))).norm() < 1e-9);
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let p = p3();
        let mut rng = crate::rng::stream(3, "dft/roundtrip");
        let f = GridFunction::random_unimodular(p, 3, &mut rng);
        let g = dft(&f);
        let back = idft(&g);
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-9);
        }
        let lhs: f64 = g.values().iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 =
            f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() / f.points() as f64;
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn u2_fourier_examples() {
        let p = p3();
        assert!((u2_fourier(&GridFunction::ones(p, 2)).unwrap() - 1.0).abs() < 1e-12);

        // single-point indicator: p^{-3d/4}
        let mut f = GridFunction::constant(p, 1, Complex64::new(0.0, 0.0));
        f.values_mut()[1] = Complex64::new(1.0, 0.0);
        let expect = 3f64.powf(-3.0 / 4.0);
        assert!((u2_fourier(&f).unwrap() - expect).abs() < 1e-12);
        // exhaustive oracle at p=3, d=1
        let omega = OmegaDescriptor::FullGrid { p, d: 1 };
        let v = gowers_norm(&f, &omega, 2, NormMode::Exhaustive, 1 << 20).unwrap();
        assert!((v.norm - expect).abs() < 1e-9);
    }

    #[test]
    fn u2_fourier_matches_exhaustive_norm() {
        let p = p3();
        let omega = OmegaDescriptor::FullGrid { p, d: 2 };
        let mut rng = crate::rng::stream(6, "dft/u2");
        for _ in 0..10 {
            let f = GridFunction::random_unimodular(p, 2, &mut rng);
            let a = u2_fourier(&f).unwrap();
            let b = gowers_norm(&f, &omega, 2, NormMode::Exhaustive, 1 << 26).unwrap().norm;
            assert!((a - b).abs() < 1e-9, "fourier {a} vs exhaustive {b}");
        }
    }

    #[test]
    fn pla_identity_route_matches_exhaustive_u2_on_sphere() {
        // The lhs of pla_bound is an exact identity for the U^2(V(M)) norm;
        // cross-check against the direct Box_2 enumeration at p=3, d=3.
        let p = p3();
        let m = QuadraticForm::dot_form(3, p);
        let omega = OmegaDescriptor::Sphere(SphereSet::new(m.clone(), vec![]));
        let mut rng = crate::rng::stream(7, "dft/pla-small");
        let f = GridFunction::random_unimodular(p, 3, &mut rng);
        let bound = pla_bound(&f, &m, true).unwrap();
        let direct = gowers_norm(&f, &omega, 2, NormMode::Exhaustive, 1 << 30).unwrap();
        assert!((bound.lhs - direct.magnitude).abs() < 1e-9);
        assert!((bound.box2_count - direct.tuples as f64).abs() < 1e-6);
    }

    #[test]
    fn pla_rhs_dominates_for_constant_function() {
        let p = p3();
        let m = QuadraticForm::dot_form(3, p);
        let f = GridFunction::ones(p, 3);
        let b = pla_bound(&f, &m, true).unwrap();
        assert!(!b.hypotheses_met);
        assert!(b.lhs <= b.rhs, "lhs {} rhs {}", b.lhs, b.rhs);
        assert_eq!(b.sup_xi, vec![0, 0, 0]);
    }
}
