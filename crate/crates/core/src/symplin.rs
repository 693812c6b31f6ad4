//! Exact symplectic linear algebra over the rationals.
//!
//! Vectors are rows of rationals in the coordinates of a fixed basis of the
//! ambient space; the form is `Ω(u, v) = uᵀ G v` for the ambient gram `G`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactpoly::Q;

pub type QVec = Vec<Q>;
pub type QMat = Vec<QVec>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymplinError {
    #[error("gram matrix must be square of even size, antisymmetric and invertible: {0}")]
    NotSymplectic(String),
    #[error("vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("subspaces live in different ambient spaces")]
    AmbientMismatch,
    #[error("exponent k = {k} outside 1..={n}")]
    BadExponent { k: usize, n: usize },
    #[error("hyperplane covectors are linearly dependent")]
    DependentHyperplanes,
    #[error("subspace is not coisotropic")]
    NotCoisotropic,
    #[error("subspace is not Lagrangian")]
    NotLagrangian,
    #[error("vector does not lie in the subspace")]
    NotInSubspace,
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// Reduced row echelon form of `rows` (each of length `ncols`) and its
/// pivot columns; zero rows are dropped.
pub fn rref(rows: &[QVec], ncols: usize) -> (QMat, Vec<usize>) {
    let mut m: QMat = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{v : rows · v = 0}`.
pub fn kernel(rows: &[QVec], ncols: usize) -> QMat {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mat_vec(m: &[QVec], v: &[Q]) -> QVec {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Pfaffian of an antisymmetric matrix of even size, by expansion along the
/// first row.
pub fn pfaffian(a: &[QVec]) -> Q {
    let idx: Vec<usize> = (0..a.len()).collect();
    pfaffian_on(a, &idx)
}

fn pfaffian_on(a: &[QVec], idx: &[usize]) -> Q {
    if idx.is_empty() {
        return Q::one();
    }
    if idx.len() % 2 == 1 {
        return Q::zero();
    }
    let first = idx[0];
    let mut acc = Q::zero();
    for j in 1..idx.len() {
        let entry = &a[first][idx[j]];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|(k, _)| k + 1 != j).map(|(_, &v)| v).collect();
        let term = entry * pfaffian_on(a, &rest);
        if j % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn factorial(k: usize) -> Q {
    (1..=k as i64).fold(Q::one(), |acc, i| acc * q(i))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticSpace {
    n: usize,
    gram: QMat,
}

impl SymplecticSpace {
    /// `Ω(e_i, e_{n+i}) = 1`, all other independent pairings zero.
    pub fn standard(n: usize) -> Self {
        let mut gram = vec![vec![Q::zero(); 2 * n]; 2 * n];
        for i in 0..n {
            gram[i][n + i] = Q::one();
            gram[n + i][i] = -Q::one();
        }
        Self { n, gram }
    }

    pub fn from_gram(gram: QMat) -> Result<Self, SymplinError> {
        let size = gram.len();
        if size % 2 == 1 || gram.iter().any(|r| r.len() != size) {
            return Err(SymplinError::NotSymplectic("shape".into()));
        }
        for i in 0..size {
            for j in 0..size {
                if gram[i][j] != -gram[j][i].clone() {
                    return Err(SymplinError::NotSymplectic("not antisymmetric".into()));
                }
            }
        }
        if rank(&gram, size) != size {
            return Err(SymplinError::NotSymplectic("degenerate".into()));
        }
        Ok(Self { n: size / 2, gram })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn gram(&self) -> &QMat {
        &self.gram
    }

    pub fn omega(&self, u: &[Q], v: &[Q]) -> Q {
        dot(u, &mat_vec(&self.gram, v))
    }

    /// Covector `Ω(u, ·)`.
    pub fn contract(&self, u: &[Q]) -> QVec {
        (0..self.dim())
            .map(|j| u.iter().zip(&self.gram).map(|(a, row)| a * &row[j]).sum())
            .collect()
    }

    fn check_len(&self, v: &[Q]) -> Result<(), SymplinError> {
        if v.len() != self.dim() {
            return Err(SymplinError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    pub fn whole(&self) -> SymplecticSubspace {
        let basis = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
            .collect();
        SymplecticSubspace {
            ambient: self.clone(),
            basis,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SymplecticSubspace {
    ambient: SymplecticSpace,
    basis: QMat,
}

impl SymplecticSubspace {
    /// Requires linearly independent basis vectors.
    pub fn new(ambient: SymplecticSpace, basis: QMat) -> Result<Self, SymplinError> {
        for v in &basis {
            ambient.check_len(v)?;
        }
        if rank(&basis, ambient.dim()) != basis.len() {
            return Err(SymplinError::DependentBasis);
        }
        Ok(Self { ambient, basis })
    }

    /// Span of arbitrary vectors; the stored basis is the reduced echelon
    /// form.
    pub fn span(ambient: SymplecticSpace, vectors: &[QVec]) -> Result<Self, SymplinError> {
        for v in vectors {
            ambient.check_len(v)?;
        }
        let (basis, _) = rref(vectors, ambient.dim());
        Ok(Self { ambient, basis })
    }

    /// Span of standard basis vectors, 1-based as in `e1, e2, …`.
    pub fn coordinate(ambient: SymplecticSpace, indices: &[usize]) -> Result<Self, SymplinError> {
        let dim = ambient.dim();
        let basis = indices
            .iter()
            .map(|&i| (0..dim).map(|j| if j + 1 == i { Q::one() } else { Q::zero() }).collect())
            .collect();
        Self::new(ambient, basis)
    }

    pub fn ambient(&self) -> &SymplecticSpace {
        &self.ambient
    }

    pub fn basis(&self) -> &QMat {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient.dim() - self.dim()
    }

    /// Canonical representative: reduced row echelon form of the basis.
    pub fn canonical_basis(&self) -> QMat {
        rref(&self.basis, self.ambient.dim()).0
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rank(&rows, self.ambient.dim()) == self.dim()
    }

    pub fn contains_subspace(&self, other: &SymplecticSubspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Gram matrix of Ω restricted to the basis.
    pub fn restricted_gram(&self) -> QMat {
        self.basis
            .iter()
            .map(|u| self.basis.iter().map(|v| self.ambient.omega(u, v)).collect())
            .collect()
    }

    fn same_ambient(&self, other: &SymplecticSubspace) -> Result<(), SymplinError> {
        if self.ambient != other.ambient {
            return Err(SymplinError::AmbientMismatch);
        }
        Ok(())
    }
}

impl PartialEq for SymplecticSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.canonical_basis() == other.canonical_basis()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Isotropic,
    Coisotropic,
    Lagrangian,
    None,
}

impl Classification {
    pub fn is_coisotropic(self) -> bool {
        matches!(self, Classification::Coisotropic | Classification::Lagrangian)
    }
}

/// Ω-orthogonal complement.
pub fn perp(c: &SymplecticSubspace) -> SymplecticSubspace {
    let rows: QMat = c.basis.iter().map(|w| c.ambient.contract(w)).collect();
    // Ω(w, v) = 0 for all basis w is the same condition as Ω(v, w) = 0.
    SymplecticSubspace {
        ambient: c.ambient.clone(),
        basis: kernel(&rows, c.ambient.dim()),
    }
}

pub fn classify(c: &SymplecticSubspace) -> Classification {
    let p = perp(c);
    let iso = p.contains_subspace(c);
    let coiso = c.contains_subspace(&p);
    match (iso, coiso) {
        (true, true) => Classification::Lagrangian,
        (true, false) => Classification::Isotropic,
        (false, true) => Classification::Coisotropic,
        (false, false) => Classification::None,
    }
}

/// Whether `Ω^k` restricts to zero on `C`: every `2k`-subset of the basis
/// is tested, using `Ω^k(v_1, …, v_2k) = k!·Pf(Ω(v_a, v_b))`.
pub fn wedge_power_vanishes(c: &SymplecticSubspace, k: usize) -> Result<bool, SymplinError> {
    let n = c.ambient.n();
    if k == 0 || k > n {
        return Err(SymplinError::BadExponent { k, n });
    }
    Ok(wedge_power_values(c, k).iter().all(|v| v.is_zero()))
}

/// Values of `Ω^k` on all `2k`-subsets of the basis, in lexicographic
/// subset order. `k = 0` gives the single value 1.
pub fn wedge_power_values(c: &SymplecticSubspace, k: usize) -> Vec<Q> {
    if 2 * k > c.dim() {
        return Vec::new();
    }
    let a = c.restricted_gram();
    let kf = factorial(k);
    combinations(c.dim(), 2 * k)
        .iter()
        .map(|s| &kf * pfaffian_on(&a, s))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HyperplaneVerdict {
    pub coisotropic: bool,
    /// First failing pair `(i, j)`, 1-based.
    pub witness: Option<(usize, usize)>,
}

/// Pairwise test of `Ω^{n-1}` on `D_i ∩ D_j` for `D_i = ker α_i`.
pub fn coisotropic_via_hyperplanes(
    space: &SymplecticSpace,
    covectors: &[QVec],
) -> Result<HyperplaneVerdict, SymplinError> {
    for a in covectors {
        space.check_len(a)?;
    }
    if rank(covectors, space.dim()) != covectors.len() {
        return Err(SymplinError::DependentHyperplanes);
    }
    let n = space.n();
    for i in 0..covectors.len() {
        for j in i + 1..covectors.len() {
            let pair = [covectors[i].clone(), covectors[j].clone()];
            let sub = SymplecticSubspace {
                ambient: space.clone(),
                basis: kernel(&pair, space.dim()),
            };
            let vanishes = wedge_power_values(&sub, n - 1).iter().all(|v| v.is_zero());
            if !vanishes {
                return Ok(HyperplaneVerdict {
                    coisotropic: false,
                    witness: Some((i + 1, j + 1)),
                });
            }
        }
    }
    Ok(HyperplaneVerdict {
        coisotropic: true,
        witness: None,
    })
}

/// Intersection of the hyperplanes `ker α_i`.
pub fn hyperplane_intersection(space: &SymplecticSpace, covectors: &[QVec]) -> SymplecticSubspace {
    SymplecticSubspace {
        ambient: space.clone(),
        basis: kernel(covectors, space.dim()),
    }
}

pub fn intersect(a: &SymplecticSubspace, b: &SymplecticSubspace) -> Result<SymplecticSubspace, SymplinError> {
    a.same_ambient(b)?;
    let dim = a.ambient.dim();
    // Σ s_i a_i = Σ t_j b_j  ⟺  (s, -t) in the kernel of [A; B]ᵀ.
    let stacked: QMat = a.basis.iter().chain(&b.basis).cloned().collect();
    let transposed: QMat = (0..dim)
        .map(|c| stacked.iter().map(|row| row[c].clone()).collect())
        .collect();
    let coeffs = kernel(&transposed, stacked.len());
    let vectors: QMat = coeffs
        .iter()
        .map(|s| {
            (0..dim)
                .map(|c| a.basis.iter().zip(s).map(|(row, x)| &row[c] * x).sum())
                .collect()
        })
        .collect();
    SymplecticSubspace::span(a.ambient.clone(), &vectors)
}

pub fn sum(a: &SymplecticSubspace, b: &SymplecticSubspace) -> Result<SymplecticSubspace, SymplinError> {
    a.same_ambient(b)?;
    let vectors: QMat = a.basis.iter().chain(&b.basis).cloned().collect();
    SymplecticSubspace::span(a.ambient.clone(), &vectors)
}

/// The symplectic quotient `D/D⊥` of a coisotropic subspace.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub quotient: SymplecticSpace,
    /// Vectors of `D` whose classes form the quotient basis.
    pub representatives: QMat,
    /// Basis of `D⊥`.
    pub kernel: QMat,
}

impl Reduction {
    /// Coordinates of the class of `v ∈ D` in the quotient basis.
    pub fn project(&self, v: &[Q]) -> Result<QVec, SymplinError> {
        let r = self.representatives.len();
        let cols: QMat = self.representatives.iter().chain(&self.kernel).cloned().collect();
        let dim = v.len();
        // Solve Σ c_i cols_i = v via the augmented system.
        let aug: QMat = (0..dim)
            .map(|row| {
                let mut line: QVec = cols.iter().map(|c| c[row].clone()).collect();
                line.push(v[row].clone());
                line
            })
            .collect();
        let (red, pivots) = rref(&aug, cols.len() + 1);
        if pivots.last() == Some(&cols.len()) {
            return Err(SymplinError::NotInSubspace);
        }
        let mut sol = vec![Q::zero(); cols.len()];
        for (line, &p) in red.iter().zip(&pivots) {
            sol[p] = line[cols.len()].clone();
        }
        sol.truncate(r);
        Ok(sol)
    }
}

pub fn reduce(d: &SymplecticSubspace) -> Result<Reduction, SymplinError> {
    if !classify(d).is_coisotropic() {
        return Err(SymplinError::NotCoisotropic);
    }
    let kernel_basis = perp(d).basis;
    let dim = d.ambient.dim();
    let mut acc = kernel_basis.clone();
    let mut reps = Vec::new();
    for v in &d.basis {
        acc.push(v.clone());
        if rank(&acc, dim) == acc.len() {
            reps.push(v.clone());
        } else {
            acc.pop();
        }
    }
    let gram: QMat = reps
        .iter()
        .map(|u| reps.iter().map(|v| d.ambient.omega(u, v)).collect())
        .collect();
    Ok(Reduction {
        quotient: SymplecticSpace::from_gram(gram)?,
        representatives: reps,
        kernel: kernel_basis,
    })
}

fn check_pair(c: &SymplecticSubspace, d: &SymplecticSubspace) -> Result<(), SymplinError> {
    c.same_ambient(d)?;
    if classify(c) != Classification::Lagrangian {
        return Err(SymplinError::NotLagrangian);
    }
    if !classify(d).is_coisotropic() {
        return Err(SymplinError::NotCoisotropic);
    }
    Ok(())
}

/// `C ∩ D + D⊥`.
pub fn lag_project(c: &SymplecticSubspace, d: &SymplecticSubspace) -> Result<SymplecticSubspace, SymplinError> {
    check_pair(c, d)?;
    sum(&intersect(c, d)?, &perp(d))
}

/// Image of `C ∩ D` in `D/D⊥`, together with the reduction used.
pub fn lag_reduce(
    c: &SymplecticSubspace,
    d: &SymplecticSubspace,
) -> Result<(Reduction, SymplecticSubspace), SymplinError> {
    check_pair(c, d)?;
    let red = reduce(d)?;
    let images = intersect(c, d)?
        .basis
        .iter()
        .map(|v| red.project(v))
        .collect::<Result<Vec<_>, _>>()?;
    let image = SymplecticSubspace::span(red.quotient.clone(), &images)?;
    Ok((red, image))
}

/// Subspace of the given dimension with integer basis entries in `-5..=5`.
pub fn random_subspace<R: Rng + ?Sized>(rng: &mut R, space: &SymplecticSpace, dim: usize) -> SymplecticSubspace {
    let total = space.dim();
    assert!(dim <= total);
    loop {
        let basis: QMat = (0..dim)
            .map(|_| (0..total).map(|_| q(rng.random_range(-5..=5))).collect())
            .collect();
        if rank(&basis, total) == dim {
            return SymplecticSubspace {
                ambient: space.clone(),
                basis,
            };
        }
    }
}

fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> QMat {
    let mut s = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = q(rng.random_range(-bound..=bound));
            s[i][j] = v.clone();
            s[j][i] = v;
        }
    }
    s
}

/// Random linear symplectomorphism of the standard space, as a product of
/// shears `(x, y) ↦ (x, y + Sx)` and `(x, y) ↦ (x + Ty, y)` with symmetric
/// integer `S`, `T`. Rows are images of the standard basis.
pub fn random_symplectic_map<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QMat {
    let dim = 2 * n;
    let mut m: QMat = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    for step in 0..3 {
        let s = random_symmetric(rng, n, 2);
        for row in m.iter_mut() {
            let (x, y): (QVec, QVec) = (row[..n].to_vec(), row[n..].to_vec());
            if step % 2 == 0 {
                for i in 0..n {
                    row[n + i] = &y[i] + dot(&s[i], &x);
                }
            } else {
                for i in 0..n {
                    row[i] = &x[i] + dot(&s[i], &y);
                }
            }
        }
    }
    m
}

/// Random isotropic subspace of dimension `dim ≤ n` in the standard space.
pub fn random_isotropic<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize) -> SymplecticSubspace {
    assert!(dim <= n);
    let space = SymplecticSpace::standard(n);
    let map = random_symplectic_map(rng, n);
    loop {
        let combos: QMat = (0..dim)
            .map(|_| (0..n).map(|_| q(rng.random_range(-3..=3))).collect())
            .collect();
        let vectors: QMat = combos
            .iter()
            .map(|c| {
                (0..2 * n)
                    .map(|j| c.iter().zip(&map[..n]).map(|(a, row)| a * &row[j]).sum())
                    .collect()
            })
            .collect();
        if rank(&vectors, 2 * n) == dim {
            return SymplecticSubspace::span(space, &vectors).expect("lengths match");
        }
    }
}

pub fn random_lagrangian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SymplecticSubspace {
    random_isotropic(rng, n, n)
}

/// Random coisotropic subspace of codimension `codim ≤ n`.
pub fn random_coisotropic<R: Rng + ?Sized>(rng: &mut R, n: usize, codim: usize) -> SymplecticSubspace {
    perp(&random_isotropic(rng, n, codim))
}

/// Subspace of a random standard space (`n ≤ max_n`), drawn so that all
/// four classifications occur.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, max_n: usize) -> SymplecticSubspace {
    let n = rng.random_range(1..=max_n);
    match rng.random_range(0..4) {
        0 => random_lagrangian(rng, n),
        1 => {
            let dim = rng.random_range(0..=n);
            random_isotropic(rng, n, dim)
        }
        2 => {
            let codim = rng.random_range(0..=n);
            random_coisotropic(rng, n, codim)
        }
        _ => {
            let dim = rng.random_range(0..=2 * n);
            random_subspace(rng, &SymplecticSpace::standard(n), dim)
        }
    }
}

/// Covectors cutting out `C`, i.e. a basis of its annihilator.
pub fn annihilator(c: &SymplecticSubspace) -> QMat {
    kernel(&c.basis, c.ambient.dim())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriteriaAgreement {
    pub classification: Classification,
    /// Classification from `Ω|_C = 0` and `Ω^{n-m+1}|_C = 0`.
    pub wedge: Classification,
    /// Pairwise hyperplane test on the annihilator of `C`.
    pub hyperplane_coisotropic: bool,
    pub agree: bool,
}

/// Compares `classify` with the wedge-power and hyperplane criteria.
pub fn criteria_agreement(c: &SymplecticSubspace) -> Result<CriteriaAgreement, SymplinError> {
    let n = c.ambient.n();
    let m = c.codim();
    let isotropic = c.dim() < 2 || wedge_power_vanishes(c, 1)?;
    // Codimension m is coisotropic iff Ω^{n-m+1} vanishes; m = 0 is the
    // whole space and m > n can never be coisotropic.
    let coisotropic = match m {
        0 => true,
        m if m > n => false,
        m => wedge_power_values(c, n - m + 1).iter().all(|v| v.is_zero()),
    };
    let wedge = match (isotropic, coisotropic) {
        (true, true) => Classification::Lagrangian,
        (true, false) => Classification::Isotropic,
        (false, true) => Classification::Coisotropic,
        (false, false) => Classification::None,
    };
    let hyperplane_coisotropic = coisotropic_via_hyperplanes(&c.ambient, &annihilator(c))?.coisotropic;
    let classification = classify(c);
    Ok(CriteriaAgreement {
        agree: classification == wedge && hyperplane_coisotropic == classification.is_coisotropic(),
        classification,
        wedge,
        hyperplane_coisotropic,
    })
}

/// JSON form of a subspace: rationals written as strings such as `"3/4"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceInput {
    pub n: usize,
    #[serde(default)]
    pub gram: Option<Vec<Vec<String>>>,
    pub basis: Vec<Vec<String>>,
}

pub fn parse_rational(s: &str) -> Result<Q, SymplinError> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| SymplinError::BadRational(s.to_string()))
}

fn parse_rows(rows: &[Vec<String>]) -> Result<QMat, SymplinError> {
    rows.iter()
        .map(|r| r.iter().map(|s| parse_rational(s)).collect())
        .collect()
}

impl SubspaceInput {
    pub fn build(&self) -> Result<SymplecticSubspace, SymplinError> {
        let space = match &self.gram {
            Some(g) => {
                let s = SymplecticSpace::from_gram(parse_rows(g)?)?;
                if s.n() != self.n {
                    return Err(SymplinError::DimensionMismatch {
                        expected: 2 * self.n,
                        found: s.dim(),
                    });
                }
                s
            }
            None => SymplecticSpace::standard(self.n),
        };
        SymplecticSubspace::new(space, parse_rows(&self.basis)?)
    }
}

pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}{}/{}", if x.is_negative() { "-" } else { "" }, x.numer().abs(), x.denom())
    }
}
