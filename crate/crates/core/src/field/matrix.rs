//! Dense matrices over `F_p` with exact row reduction.
//!
//! Pivoting is deterministic (first nonzero entry in scan order), so reduced
//! forms — and everything derived from them, like standard representations —
//! are reproducible across runs.

use super::{Fp, Prime};
use crate::{Error, Result};

/// Row-major dense matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    prime: Prime,
    entries: Vec<Fp>,
}

/// Output of [`FpMatrix::rref`].
#[derive(Debug, Clone)]
pub struct RrefResult {
    pub matrix: FpMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl FpMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Fp>, prime: Prime) -> Self {
        assert_eq!(rows * cols, entries.len(), "entry count mismatch");
        FpMatrix { rows, cols, prime, entries }
    }

    pub fn zeros(rows: usize, cols: usize, prime: Prime) -> Self {
        FpMatrix { rows, cols, prime, entries: vec![Fp::zero(prime); rows * cols] }
    }

    pub fn identity(n: usize, prime: Prime) -> Self {
        let mut m = Self::zeros(n, n, prime);
        for i in 0..n {
            m[(i, i)] = Fp::one(prime);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fp>], cols: usize, prime: Prime) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            entries.extend_from_slice(r);
        }
        FpMatrix { rows: rows.len(), cols, prime, entries }
    }

    /// Build from integer entries via `iota`.
    pub fn from_ints(rows: usize, cols: usize, vals: &[i64], prime: Prime) -> Self {
        assert_eq!(rows * cols, vals.len());
        let entries = vals.iter().map(|&v| Fp::from_int(v, prime)).collect();
        FpMatrix { rows, cols, prime, entries }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn row(&self, i: usize) -> &[Fp] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(self.cols, self.rows, self.prime);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self[(i, j)] != self[(j, i)] {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = FpMatrix::zeros(self.rows, other.cols, self.prime);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Row-vector times matrix: `x * A` for horizontal `x`.
    pub fn row_vec_mul(&self, x: &[Fp]) -> Vec<Fp> {
        assert_eq!(x.len(), self.rows, "row-vector length mismatch");
        let mut out = vec![Fp::zero(self.prime); self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] = out[j] + xi * self[(i, j)];
            }
        }
        out
    }

    /// Matrix times column vector: `A * x^T`.
    pub fn mat_vec_mul(&self, x: &[Fp]) -> Vec<Fp> {
        assert_eq!(x.len(), self.cols, "column-vector length mismatch");
        let mut out = vec![Fp::zero(self.prime); self.rows];
        for i in 0..self.rows {
            let mut acc = Fp::zero(self.prime);
            for j in 0..self.cols {
                acc = acc + self[(i, j)] * x[j];
            }
            out[i] = acc;
        }
        out
    }

    /// The unique reduced row echelon form, with rank and pivot columns.
    pub fn rref(&self) -> RrefResult {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // First nonzero entry in scan order.
            let Some(pr) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m[(r, c)].inv();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)] * inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let factor = m[(i, c)];
                    for j in c..m.cols {
                        let sub = factor * m[(r, j)];
                        m[(i, j)] = m[(i, j)] - sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        RrefResult { matrix: m, rank: r, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Solve `A x^T = b^T`, free variables zeroed in pivot order.
    /// Returns `None` when inconsistent.
    pub fn solve(&self, b: &[Fp]) -> Result<Option<Vec<Fp>>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: A is {}x{}, b has length {}",
                self.rows,
                self.cols,
                b.len()
            )));
        }
        let mut aug = FpMatrix::zeros(self.rows, self.cols + 1, self.prime);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, self.cols)] = b[i];
        }
        let red = aug.rref();
        // Inconsistent iff a pivot lands in the augmented column.
        if red.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Fp::zero(self.prime); self.cols];
        for (row, &pc) in red.pivots.iter().enumerate() {
            x[pc] = red.matrix[(row, self.cols)];
        }
        Ok(Some(x))
    }

    /// Basis of the right null space `{v : A v^T = 0}`.
    pub fn null_space(&self) -> Vec<Vec<Fp>> {
        let red = self.rref();
        let pivot_set: std::collections::HashSet<usize> = red.pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Fp::zero(self.prime); self.cols];
            v[fc] = Fp::one(self.prime);
            for (row, &pc) in red.pivots.iter().enumerate() {
                v[pc] = -red.matrix[(row, fc)];
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for FpMatrix {
    type Output = Fp;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Fp {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FpMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Fp {
        &mut self.entries[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p5() -> Prime {
        Prime::new(5).unwrap()
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = FpMatrix::identity(3, p5());
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);

        let z = FpMatrix::zeros(2, 4, p5());
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert_eq!(r.rank, 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn rref_dependent_rows() {
        // [[1,2],[2,4]] over F_5: second row is 2 * first.
        let m = FpMatrix::from_ints(2, 2, &[1, 2, 2, 4], p5());
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.matrix, FpMatrix::from_ints(2, 2, &[1, 2, 0, 0], p5()));
    }

    #[test]
    fn solve_cases() {
        let id = FpMatrix::identity(2, p5());
        let b = super::super::iota_vec(&[2, 3], p5());
        assert_eq!(id.solve(&b).unwrap().unwrap(), b);

        // Free variable zeroed: [[1,1]] x = (0) -> x = (0,0).
        let m = FpMatrix::from_ints(1, 2, &[1, 1], p5());
        let x = m.solve(&[Fp::zero(p5())]).unwrap().unwrap();
        assert_eq!(x, super::super::iota_vec(&[0, 0], p5()));

        // Inconsistent: [[0]] x = (1).
        let m = FpMatrix::from_ints(1, 1, &[0], p5());
        assert!(m.solve(&[Fp::one(p5())]).unwrap().is_none());

        let m = FpMatrix::from_ints(1, 1, &[0], p5());
        assert!(m.solve(&[Fp::one(p5()), Fp::one(p5())]).is_err());
    }

    #[test]
    fn null_space_cases() {
        assert!(FpMatrix::identity(3, p5()).null_space().is_empty());
        assert_eq!(FpMatrix::zeros(2, 3, p5()).null_space().len(), 3);

        // A = [[1,2,0]] over F_5; each basis vector must satisfy Av = 0.
        let m = FpMatrix::from_ints(1, 3, &[1, 2, 0], p5());
        let ns = m.null_space();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mat_vec_mul(v).iter().all(|x| x.is_zero()));
        }
    }

    fn random_matrix(seed: u64, rows: usize, cols: usize, p: u64) -> FpMatrix {
        // Tiny deterministic generator keeps these tests dependency-free.
        let prime = Prime::new(p).unwrap();
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let vals: Vec<i64> = (0..rows * cols)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % p) as i64
            })
            .collect();
        FpMatrix::from_ints(rows, cols, &vals, prime)
    }

    proptest! {
        #[test]
        fn rank_nullity_and_solutions(seed in 0u64..500, rows in 1usize..5, cols in 1usize..5) {
            let m = random_matrix(seed, rows, cols, 7);
            let r = m.rref();
            // rank + nullity = cols
            prop_assert_eq!(r.rank + m.null_space().len(), cols);
            // row space preserved: rref rows are combinations; check rank of stacked = rank
            let mut stacked_rows: Vec<Vec<Fp>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
            for i in 0..rows {
                stacked_rows.push(r.matrix.row(i).to_vec());
            }
            let stacked = FpMatrix::from_rows(&stacked_rows, cols, m.prime());
            prop_assert_eq!(stacked.rank(), r.rank);
            // every null vector really is null
            for v in m.null_space() {
                prop_assert!(m.mat_vec_mul(&v).iter().all(|x| x.is_zero()));
            }
            // Ax = b check by substitution when consistent
            let b = random_matrix(seed.wrapping_add(1), rows, 1, 7);
            let bv: Vec<Fp> = (0..rows).map(|i| b[(i, 0)]).collect();
            if let Some(x) = m.solve(&bv).unwrap() {
                prop_assert_eq!(m.mat_vec_mul(&x), bv);
            }
        }
    }
}
