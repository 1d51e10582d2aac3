//! Quadratic forms over `F_p` and their geometry: evaluation, rank, purity,
//! isotropy, restriction to affine subspaces, and the sphere sets
//! `V(M)^{h_1,...,h_r}`.

mod text;

pub use text::parse_form;

use crate::field::{dot, Fp, FpMatrix, Prime};
use crate::{Error, Result};
use rand::Rng;

/// `M(n) = (nA)·n + n·u + v` with `A` symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    a: FpMatrix,
    u: Vec<Fp>,
    v: Fp,
    d: usize,
}

impl QuadraticForm {
    pub fn new(a: FpMatrix, u: Vec<Fp>, v: Fp) -> Result<Self> {
        let d = a.rows();
        if a.cols() != d || u.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "form wants square A and |u| = d, got A {}x{}, |u| = {}",
                a.rows(),
                a.cols(),
                u.len()
            )));
        }
        if !a.is_symmetric() {
            return Err(Error::MalformedData("A must be exactly symmetric".into()));
        }
        Ok(QuadraticForm { a, u, v, d })
    }

    /// The dot-product form `M(n) = n·n` in dimension `d`.
    pub fn dot_form(d: usize, prime: Prime) -> Self {
        QuadraticForm {
            a: FpMatrix::identity(d, prime),
            u: vec![Fp::zero(prime); d],
            v: Fp::zero(prime),
            d,
        }
    }

    /// Homogeneous form with the given symmetric matrix.
    pub fn homogeneous(a: FpMatrix) -> Result<Self> {
        let p = a.prime();
        let d = a.rows();
        QuadraticForm::new(a, vec![Fp::zero(p); d], Fp::zero(p))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.a.prime()
    }

    #[inline]
    pub fn matrix(&self) -> &FpMatrix {
        &self.a
    }

    #[inline]
    pub fn linear_part(&self) -> &[Fp] {
        &self.u
    }

    #[inline]
    pub fn constant_part(&self) -> Fp {
        self.v
    }

    pub fn eval(&self, n: &[Fp]) -> Fp {
        assert_eq!(n.len(), self.d, "eval: point dimension mismatch");
        let an = self.a.row_vec_mul(n);
        dot(&an, n) + dot(n, &self.u) + self.v
    }

    /// Evaluation on raw `tau` coordinates; the hot path for enumeration.
    pub fn eval_raw(&self, n: &[u64]) -> u64 {
        let p = self.prime().get();
        let mut acc: u128 = 0;
        for i in 0..self.d {
            let mut row: u128 = 0;
            for j in 0..self.d {
                row += (self.a[(i, j)].tau() * n[j]) as u128;
            }
            acc += (row % p as u128) * n[i] as u128;
            acc += (self.u[i].tau() * n[i]) as u128;
        }
        ((acc + self.v.tau() as u128) % p as u128) as u64
    }

    /// The associated bilinear map `(xA)·y`.
    pub fn bilinear(&self, x: &[Fp], y: &[Fp]) -> Fp {
        dot(&self.a.row_vec_mul(x), y)
    }

    pub fn rank(&self) -> usize {
        self.a.rank()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.rank() == self.d
    }

    pub fn is_pure(&self) -> bool {
        self.u.iter().all(|x| x.is_zero())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_pure() && self.v.is_zero()
    }

    /// `M(phi(·)+c)` on `F_p^r`, where `phi(m) = m * B` for the `r x d`
    /// matrix `B` whose rows must span the target subspace injectively.
    pub fn restrict(&self, phi: &FpMatrix, c: &[Fp]) -> Result<QuadraticForm> {
        let r = phi.rows();
        if phi.cols() != self.d || c.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "restrict: phi is {}x{}, form dimension {}",
                phi.rows(),
                phi.cols(),
                self.d
            )));
        }
        if phi.rank() != r {
            return Err(Error::Precondition("phi not injective".into()));
        }
        let p = self.prime();
        // M(mB + c) = m(BAB^T)m^T + m·(2BAc^T + Bu^T) + (cAc^T + c·u + v)
        let bab = phi.mul(&self.a).mul(&phi.transpose());
        let two = Fp::new(2, p);
        let ac = self.a.mat_vec_mul(c);
        let mut u_new = Vec::with_capacity(r);
        for i in 0..r {
            let row = phi.row(i);
            u_new.push(two * dot(row, &ac) + dot(row, &self.u));
        }
        let v_new = self.eval(c);
        QuadraticForm::new(bab, u_new, v_new)
    }
}

/// An affine subspace `V + c` given by an independent basis of `V`.
/// Normal vectors (a basis of the dot-orthogonal complement) are cached so
/// membership tests in enumeration loops stay linear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSubspace {
    basis: Vec<Vec<Fp>>,
    normals: Vec<Vec<Fp>>,
    offset: Vec<Fp>,
    ambient: usize,
}

impl AffineSubspace {
    pub fn new(basis: Vec<Vec<Fp>>, offset: Vec<Fp>, prime: Prime) -> Result<Self> {
        let ambient = offset.len();
        for b in &basis {
            if b.len() != ambient {
                return Err(Error::DimensionMismatch("ragged subspace basis".into()));
            }
        }
        let normals = if basis.is_empty() {
            // zero subspace: every coordinate direction is normal
            (0..ambient)
                .map(|i| {
                    let mut e = vec![Fp::zero(prime); ambient];
                    e[i] = Fp::one(prime);
                    e
                })
                .collect()
        } else {
            let m = FpMatrix::from_rows(&basis, ambient, prime);
            if m.rank() != basis.len() {
                return Err(Error::Precondition("subspace basis not independent".into()));
            }
            m.null_space()
        };
        Ok(AffineSubspace { basis, normals, offset, ambient })
    }

    pub fn full(d: usize, prime: Prime) -> Self {
        let basis = (0..d)
            .map(|i| {
                let mut e = vec![Fp::zero(prime); d];
                e[i] = Fp::one(prime);
                e
            })
            .collect();
        AffineSubspace {
            basis,
            normals: Vec::new(),
            offset: vec![Fp::zero(prime); d],
            ambient: d,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<Fp>] {
        &self.basis
    }

    pub fn offset(&self) -> &[Fp] {
        &self.offset
    }

    /// The basis stacked as a `dim x ambient` matrix; also the canonical
    /// bijection `phi: F_p^dim -> V`, `phi(m) = m * B`.
    pub fn basis_matrix(&self, prime: Prime) -> FpMatrix {
        FpMatrix::from_rows(&self.basis, self.ambient, prime)
    }

    /// Map `m in F_p^dim` to the ambient point `phi(m) + c`.
    pub fn embed(&self, m: &[Fp], prime: Prime) -> Vec<Fp> {
        assert_eq!(m.len(), self.dim());
        let mut out = self.offset.clone();
        for (coef, bvec) in m.iter().zip(&self.basis) {
            for (o, b) in out.iter_mut().zip(bvec) {
                *o = *o + *coef * *b;
            }
        }
        let _ = prime;
        out
    }

    /// Does `n - c` lie in `V`? Tested against the cached normals.
    pub fn contains(&self, n: &[Fp], prime: Prime) -> bool {
        let _ = prime;
        let diff: Vec<Fp> = n.iter().zip(&self.offset).map(|(&a, &b)| a - b).collect();
        self.normals.iter().all(|w| dot(w, &diff).is_zero())
    }

    /// Membership on raw `tau` coordinates.
    pub fn contains_raw(&self, n: &[u64], p: u64) -> bool {
        self.normals.iter().all(|w| {
            let mut acc: u128 = 0;
            for ((&wi, &ni), &ci) in w.iter().zip(n).zip(&self.offset) {
                acc += wi.tau() as u128 * (ni + p - ci.tau()) as u128;
            }
            acc % p as u128 == 0
        })
    }
}

/// `V^{perp_M} = {n : (mA)·n = 0 for all m in V}`, as a basis.
pub fn perp(basis: &[Vec<Fp>], form: &QuadraticForm) -> Vec<Vec<Fp>> {
    let p = form.prime();
    if basis.is_empty() {
        return AffineSubspace::full(form.dim(), p).basis().to_vec();
    }
    let b = FpMatrix::from_rows(basis, form.dim(), p);
    b.mul(form.matrix()).null_space()
}

/// `rank(M|_{V+c}) = dim(V) - dim(V ∩ V^{perp_M})`, computed as
/// `rank(B A B^T)`. Independent of the offset and of the choice of basis.
pub fn rank_restriction(form: &QuadraticForm, subspace: &AffineSubspace) -> usize {
    if subspace.dim() == 0 {
        return 0;
    }
    let b = subspace.basis_matrix(form.prime());
    b.mul(form.matrix()).mul(&b.transpose()).rank()
}

/// Is the span of `hs` an `M`-isotropic subspace? The zero subspace (empty
/// list or all-zero vectors) is declared non-isotropic so the predicate is
/// total.
pub fn is_isotropic(hs: &[Vec<Fp>], form: &QuadraticForm) -> bool {
    let p = form.prime();
    let nonzero: Vec<Vec<Fp>> =
        hs.iter().filter(|h| h.iter().any(|x| !x.is_zero())).cloned().collect();
    if nonzero.is_empty() {
        return false;
    }
    let stacked = FpMatrix::from_rows(&nonzero, form.dim(), p);
    let red = stacked.rref();
    let basis: Vec<Vec<Fp>> = (0..red.rank).map(|i| red.matrix.row(i).to_vec()).collect();
    let b = FpMatrix::from_rows(&basis, form.dim(), p);
    // span ∩ span^{perp_M} != {0}  <=>  B A B^T singular on the span
    b.mul(form.matrix()).mul(&b.transpose()).rank() < red.rank
}

/// Iterator over all points of `F_p^d` in lexicographic `tau` order.
pub struct PointIter {
    p: u64,
    d: usize,
    next: Option<Vec<u64>>,
}

impl PointIter {
    pub fn new(prime: Prime, d: usize) -> Self {
        PointIter { p: prime.get(), d, next: Some(vec![0; d]) }
    }
}

impl Iterator for PointIter {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // increment least-significant-last, lexicographic order
        let mut i = self.d;
        loop {
            if i == 0 {
                self.next = None;
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.p {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        if self.d == 0 {
            self.next = None;
        }
        Some(current)
    }
}

/// `V(M)^{h_1,...,h_r}` optionally intersected with an affine subspace;
/// the point list materializes lazily and in deterministic order.
#[derive(Debug, Clone)]
pub struct SphereSet {
    form: QuadraticForm,
    shifts: Vec<Vec<Fp>>,
    constraint: Option<AffineSubspace>,
}

impl SphereSet {
    pub fn new(form: QuadraticForm, shifts: Vec<Vec<Fp>>) -> Self {
        SphereSet { form, shifts, constraint: None }
    }

    pub fn with_constraint(form: QuadraticForm, shifts: Vec<Vec<Fp>>, s: AffineSubspace) -> Self {
        SphereSet { form, shifts, constraint: Some(s) }
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn shifts(&self) -> &[Vec<Fp>] {
        &self.shifts
    }

    pub fn constraint(&self) -> Option<&AffineSubspace> {
        self.constraint.as_ref()
    }

    pub fn prime(&self) -> Prime {
        self.form.prime()
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn contains(&self, n: &[Fp]) -> bool {
        let raw: Vec<u64> = n.iter().map(|x| x.tau()).collect();
        self.contains_raw(&raw)
    }

    /// Membership on raw `tau` coordinates; the enumeration hot path.
    pub fn contains_raw(&self, n: &[u64]) -> bool {
        let p = self.prime().get();
        if self.form.eval_raw(n) != 0 {
            return false;
        }
        let mut buf = vec![0u64; n.len()];
        for h in &self.shifts {
            for (t, b) in buf.iter_mut().enumerate() {
                *b = (n[t] + h[t].tau()) % p;
            }
            if self.form.eval_raw(&buf) != 0 {
                return false;
            }
        }
        match &self.constraint {
            Some(s) => s.contains_raw(n, p),
            None => true,
        }
    }

    /// Exact point list by enumeration in lexicographic `tau` order.
    pub fn points(&self, budget: u128) -> Result<Vec<Vec<Fp>>> {
        let p = self.prime();
        let required = (p.get() as u128).pow(self.dim() as u32);
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let mut out = Vec::new();
        for raw in PointIter::new(p, self.dim()) {
            if self.contains_raw(&raw) {
                out.push(raw.iter().map(|&x| Fp::new(x, p)).collect());
            }
        }
        Ok(out)
    }

    pub fn count(&self, budget: u128) -> Result<u64> {
        Ok(self.points(budget)?.len() as u64)
    }
}

/// Exhaustive or sampled census of linearly dependent and `M`-isotropic
/// `k`-tuples in `(F_p^d)^k`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CensusResult {
    pub dependent: u64,
    pub isotropic: u64,
    pub total: u128,
    /// `None` for an exhaustive census, `Some(n)` when `n` tuples sampled.
    pub sample_size: Option<u64>,
}

pub fn isotropy_census(
    form: &QuadraticForm,
    k: usize,
    budget: u128,
    sampled: Option<(u64, u64)>, // (sample size, seed)
) -> Result<CensusResult> {
    let p = form.prime();
    let d = form.dim();
    let total = (p.get() as u128).pow((d * k) as u32);
    let mut dependent = 0u64;
    let mut isotropic = 0u64;

    let classify = |tuple: &[Vec<Fp>]| -> (bool, bool) {
        let m = FpMatrix::from_rows(tuple, d, p);
        let dep = m.rank() < k;
        let iso = is_isotropic(tuple, form);
        (dep, iso)
    };

    match sampled {
        None => {
            if total > budget {
                return Err(Error::BudgetExceeded { required: total, budget });
            }
            for raw in PointIter::new(p, d * k) {
                let tuple: Vec<Vec<Fp>> = (0..k)
                    .map(|i| raw[i * d..(i + 1) * d].iter().map(|&x| Fp::new(x, p)).collect())
                    .collect();
                let (dep, iso) = classify(&tuple);
                dependent += dep as u64;
                isotropic += iso as u64;
            }
            Ok(CensusResult { dependent, isotropic, total, sample_size: None })
        }
        Some((n, seed)) => {
            let mut rng = crate::rng::stream(seed, "isotropy-census");
            for _ in 0..n {
                let tuple: Vec<Vec<Fp>> = (0..k)
                    .map(|_| (0..d).map(|_| Fp::new(rng.gen_range(0..p.get()), p)).collect())
                    .collect();
                let (dep, iso) = classify(&tuple);
                dependent += dep as u64;
                isotropic += iso as u64;
            }
            Ok(CensusResult { dependent, isotropic, total, sample_size: Some(n) })
        }
    }
}

/// Random symmetric form; resamples until nondegenerate when asked.
pub fn random_form<R: Rng>(rng: &mut R, prime: Prime, d: usize, nondegenerate: bool) -> QuadraticForm {
    loop {
        let mut a = FpMatrix::zeros(d, d, prime);
        for i in 0..d {
            for j in i..d {
                let x = Fp::new(rng.gen_range(0..prime.get()), prime);
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        let u = (0..d).map(|_| Fp::new(rng.gen_range(0..prime.get()), prime)).collect();
        let v = Fp::new(rng.gen_range(0..prime.get()), prime);
        let m = QuadraticForm::new(a, u, v).expect("constructed symmetric");
        if !nondegenerate || m.is_nondegenerate() {
            return m;
        }
    }
}

/// Random homogeneous nondegenerate form.
pub fn random_homogeneous_form<R: Rng>(rng: &mut R, prime: Prime, d: usize) -> QuadraticForm {
    loop {
        let mut a = FpMatrix::zeros(d, d, prime);
        for i in 0..d {
            for j in i..d {
                let x = Fp::new(rng.gen_range(0..prime.get()), prime);
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        if a.rank() == d {
            return QuadraticForm::homogeneous(a).expect("symmetric");
        }
    }
}

/// Random affine subspace of the requested codimension.
pub fn random_subspace<R: Rng>(
    rng: &mut R,
    prime: Prime,
    d: usize,
    codim: usize,
) -> AffineSubspace {
    assert!(codim <= d);
    let offset: Vec<Fp> = (0..d).map(|_| Fp::new(rng.gen_range(0..prime.get()), prime)).collect();
    if codim == 0 {
        let mut s = AffineSubspace::full(d, prime);
        s.offset = offset;
        return s;
    }
    loop {
        let normals: Vec<i64> =
            (0..codim * d).map(|_| rng.gen_range(0..prime.get()) as i64).collect();
        let n = FpMatrix::from_ints(codim, d, &normals, prime);
        if n.rank() != codim {
            continue;
        }
        let basis = n.null_space();
        return AffineSubspace::new(basis, offset, prime).expect("null space basis independent");
    }
}
