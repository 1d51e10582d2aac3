//! Almost linear functions `h -> sum_i {alpha_i · tau(h)} beta_i` with
//! values in `(1/p)Z`, and the Freiman homomorphism check over additive
//! quadruples. All arithmetic runs on numerators over `p^2`, exactly.

use crate::field::{OverP, Prime};
use crate::{Error, Result};
use rand::Rng;
use std::collections::HashSet;

/// Data `(K, alpha_i, beta_i)` with `alpha_i = a_i / p` and
/// `beta_i = b_i / p` stored as integer numerators.
#[derive(Debug, Clone)]
pub struct AlmostLinearFunction {
    alphas: Vec<Vec<i64>>,
    betas: Vec<i64>,
    p: Prime,
    d: usize,
}

impl AlmostLinearFunction {
    pub fn new(alphas: Vec<Vec<i64>>, betas: Vec<i64>, p: Prime) -> Result<Self> {
        if alphas.len() != betas.len() || alphas.is_empty() {
            return Err(Error::DimensionMismatch(
                "almost linear data wants matching nonempty alpha/beta lists".into(),
            ));
        }
        let d = alphas[0].len();
        if alphas.iter().any(|a| a.len() != d) {
            return Err(Error::DimensionMismatch("ragged alpha list".into()));
        }
        Ok(AlmostLinearFunction { alphas, betas, p, d })
    }

    /// The canonical map `h -> tau(h_1)/p`.
    pub fn canonical(p: Prime, d: usize) -> Self {
        let mut alpha = vec![0i64; d];
        alpha[0] = 1;
        AlmostLinearFunction { alphas: vec![alpha], betas: vec![p.get() as i64], p, d }
    }

    pub fn complexity(&self) -> usize {
        self.alphas.len()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// Numerator of the value over `p^2`.
    fn eval_num_p2(&self, h: &[u64]) -> i64 {
        let p = self.p.get() as i64;
        let mut acc: i64 = 0;
        for (a, &b) in self.alphas.iter().zip(&self.betas) {
            let mut dot: i128 = 0;
            for (&ai, &hi) in a.iter().zip(h) {
                dot += ai as i128 * hi as i128;
            }
            let frac = (dot.rem_euclid(p as i128)) as i64; // {a·tau(h)/p} numerator
            acc += frac * b;
        }
        acc
    }

    /// Evaluate; an answer outside `(1/p)Z` signals malformed data for the
    /// declared domain.
    pub fn eval(&self, h: &[u64]) -> Result<OverP> {
        if h.len() != self.d {
            return Err(Error::DimensionMismatch("point dimension mismatch".into()));
        }
        let p = self.p.get() as i64;
        let num = self.eval_num_p2(h);
        if num % p != 0 {
            return Err(Error::MalformedData(format!(
                "value {num}/{p}^2 at {h:?} is outside (1/p)Z"
            )));
        }
        Ok(OverP::new(num / p, self.p))
    }

    /// Check the `(1/p)Z`-valuedness invariant on an explicit domain.
    pub fn validate_on(&self, domain: &[Vec<u64>]) -> Result<()> {
        for h in domain {
            self.eval(h)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub enum FreimanMode {
    Exhaustive,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct FreimanReport {
    pub holds: bool,
    /// `(h1, h2, h3, h4)` with `h1 + h2 = h3 + h4` violating the congruence.
    pub violation: Option<[Vec<u64>; 4]>,
    pub quadruples_checked: u64,
    pub exhaustive: bool,
}

/// Is `xi` a Freiman homomorphism on `H`: for every additive quadruple
/// `h1 + h2 = h3 + h4` in `H`, `xi(h1) + xi(h2) = xi(h3) + xi(h4) mod Z`?
pub fn is_freiman(
    xi: &AlmostLinearFunction,
    domain: &[Vec<u64>],
    mode: FreimanMode,
    budget: u128,
) -> Result<FreimanReport> {
    xi.validate_on(domain)?;
    let p = xi.prime().get();
    let p2 = (p * p) as i64;
    let lookup: HashSet<&[u64]> = domain.iter().map(|h| h.as_slice()).collect();
    let fourth = |h1: &[u64], h2: &[u64], h3: &[u64]| -> Vec<u64> {
        h1.iter()
            .zip(h2)
            .zip(h3)
            .map(|((&a, &b), &c)| (a + b + p - c) % p)
            .collect()
    };
    let check = |h1: &[u64], h2: &[u64], h3: &[u64], h4: &[u64]| -> bool {
        let s = xi.eval_num_p2(h1) + xi.eval_num_p2(h2)
            - xi.eval_num_p2(h3)
            - xi.eval_num_p2(h4);
        s % p2 == 0
    };
    match mode {
        FreimanMode::Exhaustive => {
            let work = (domain.len() as u128).pow(3);
            if work > budget {
                return Err(Error::BudgetExceeded { required: work, budget });
            }
            let mut checked = 0u64;
            for h1 in domain {
                for h2 in domain {
                    for h3 in domain {
                        let h4 = fourth(h1, h2, h3);
                        if !lookup.contains(h4.as_slice()) {
                            continue;
                        }
                        checked += 1;
                        if !check(h1, h2, h3, &h4) {
                            return Ok(FreimanReport {
                                holds: false,
                                violation: Some([h1.clone(), h2.clone(), h3.clone(), h4]),
                                quadruples_checked: checked,
                                exhaustive: true,
                            });
                        }
                    }
                }
            }
            Ok(FreimanReport {
                holds: true,
                violation: None,
                quadruples_checked: checked,
                exhaustive: true,
            })
        }
        FreimanMode::Sampled { samples, seed } => {
            let mut rng = crate::rng::stream(seed, "freiman/sampled");
            let mut checked = 0u64;
            let mut attempts = 0u64;
            let max_attempts = samples.saturating_mul(10_000);
            while checked < samples {
                attempts += 1;
                if attempts > max_attempts {
                    return Err(Error::BudgetExceeded {
                        required: attempts as u128,
                        budget: max_attempts as u128,
                    });
                }
                let h1 = &domain[rng.gen_range(0..domain.len())];
                let h2 = &domain[rng.gen_range(0..domain.len())];
                let h3 = &domain[rng.gen_range(0..domain.len())];
                let h4 = fourth(h1, h2, h3);
                if !lookup.contains(h4.as_slice()) {
                    continue;
                }
                checked += 1;
                if !check(h1, h2, h3, &h4) {
                    return Ok(FreimanReport {
                        holds: false,
                        violation: Some([h1.clone(), h2.clone(), h3.clone(), h4]),
                        quadruples_checked: checked,
                        exhaustive: false,
                    });
                }
            }
            Ok(FreimanReport {
                holds: true,
                violation: None,
                quadruples_checked: checked,
                exhaustive: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_domain(p: u64, d: usize) -> Vec<Vec<u64>> {
        crate::quadform::PointIter::new(Prime::new(p).unwrap(), d).collect()
    }

    #[test]
    fn canonical_map_is_freiman_on_the_full_line() {
        let p = Prime::new(5).unwrap();
        let xi = AlmostLinearFunction::canonical(p, 1);
        let domain = full_domain(5, 1);
        assert_eq!(xi.eval(&[3]).unwrap().numerator, 3);
        let report = is_freiman(&xi, &domain, FreimanMode::Exhaustive, 1 << 20).unwrap();
        assert!(report.holds);
        assert!(report.quadruples_checked > 0);
    }

    #[test]
    fn zero_map_is_freiman() {
        let p = Prime::new(5).unwrap();
        let xi = AlmostLinearFunction::new(vec![vec![0]], vec![0], p).unwrap();
        let domain = full_domain(5, 1);
        assert!(is_freiman(&xi, &domain, FreimanMode::Exhaustive, 1 << 20).unwrap().holds);
    }

    #[test]
    fn fractional_beta_leaves_one_over_p_lattice() {
        // K=1, alpha = 1/5, beta = 1/5: values land in (1/25)Z.
        let p = Prime::new(5).unwrap();
        let xi = AlmostLinearFunction::new(vec![vec![1]], vec![1], p).unwrap();
        let domain = full_domain(5, 1);
        let err = is_freiman(&xi, &domain, FreimanMode::Exhaustive, 1 << 20);
        assert!(matches!(err, Err(Error::MalformedData(_))));
    }

    #[test]
    fn perturbed_variant_fails_with_explicit_quadruple() {
        // Valid on all of F_7 but not a Freiman homomorphism:
        // xi(h) = {tau(h)/7}/7 + {2 tau(h)/7} * 3/7.
        let p = Prime::new(7).unwrap();
        let xi = AlmostLinearFunction::new(vec![vec![1], vec![2]], vec![1, 3], p).unwrap();
        let domain = full_domain(7, 1);
        xi.validate_on(&domain).unwrap();
        let report = is_freiman(&xi, &domain, FreimanMode::Exhaustive, 1 << 22).unwrap();
        assert!(!report.holds);
        let [h1, h2, h3, h4] = report.violation.unwrap();
        // the witness really is an additive quadruple violating the congruence
        assert_eq!((h1[0] + h2[0]) % 7, (h3[0] + h4[0]) % 7);
        let s = xi.eval(&h1).unwrap().numerator + xi.eval(&h2).unwrap().numerator
            - xi.eval(&h3).unwrap().numerator
            - xi.eval(&h4).unwrap().numerator;
        assert!(s % 7 != 0);
    }

    #[test]
    fn sampled_mode_is_deterministic() {
        let p = Prime::new(7).unwrap();
        let xi = AlmostLinearFunction::canonical(p, 2);
        let domain = full_domain(7, 2);
        let a = is_freiman(&xi, &domain, FreimanMode::Sampled { samples: 500, seed: 3 }, 1 << 20)
            .unwrap();
        let b = is_freiman(&xi, &domain, FreimanMode::Sampled { samples: 500, seed: 3 }, 1 << 20)
            .unwrap();
        assert!(a.holds && b.holds);
        assert_eq!(a.quadruples_checked, b.quadruples_checked);
    }
}
