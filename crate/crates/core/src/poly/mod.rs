//! Sparse multivariate polynomials.
//!
//! Two coefficient domains are needed: `F_p` (forms, ideal membership) and
//! exact `(1/p)Z` numerators (reducibility, phases, decomposition
//! witnesses). Monomials are exponent vectors ordered graded-lex with
//! `x1 > x2 > ...`, so `(j,0,..,0)` comes first within degree `j`.

mod fppoly;
mod overp;

pub use fppoly::{parse_fp_poly, FpPoly};
pub use overp::{IntPoly, PolyOverP};

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn constant(d: usize) -> Self {
        Mono(vec![0; d])
    }

    pub fn var(i: usize, d: usize) -> Self {
        let mut e = vec![0u16; d];
        e[i] = 1;
        Mono(e)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect())
    }

    /// `m! = prod m_i!` as an integer; tiny for the degrees we use.
    pub fn factorial(&self) -> u64 {
        self.0
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>())
            .product()
    }

    /// Evaluate `x^m` at integer coordinates, exactly.
    pub fn eval_i128(&self, x: &[i64]) -> i128 {
        let mut acc: i128 = 1;
        for (&e, &xi) in self.0.iter().zip(x) {
            for _ in 0..e {
                acc *= xi as i128;
            }
        }
        acc
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // graded, then lexicographic with larger leading exponents first
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

/// All exponent vectors of total degree exactly `j` in `d` variables,
/// in graded-lex order (leading variable exponent descending).
pub fn monomials_of_degree(d: usize, j: u32) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut current = vec![0u16; d];
    fill(&mut out, &mut current, 0, j);
    out
}

fn fill(out: &mut Vec<Mono>, current: &mut Vec<u16>, pos: usize, remaining: u32) {
    if pos == current.len() {
        if remaining == 0 {
            out.push(Mono(current.clone()));
        }
        return;
    }
    if pos == current.len() - 1 {
        current[pos] = remaining as u16;
        out.push(Mono(current.clone()));
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e as u16;
        fill(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}
