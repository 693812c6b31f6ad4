//! Integer intersection calculus of Lagrangian classes around a flop of a
//! Lagrangian `P^n`: Euler bookkeeping, the Plücker-type relation, the
//! normalized Legendre transformation, K3 reflections and the
//! Beauville–Bogomolov–Fujiki fit.
//!
//! Conventions: `σ = (-1)^n`, `N = n + 1`, `P·P = P*·P* = σN`. A table
//! stores `s_ij = C_i·C_j`, `a_i = C_i·P`, `b_i = C_i∨·P*` and
//! `s'_ij = C_i∨·C_j∨`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactpoly::Q;
use crate::symplin::format_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LagError {
    #[error("{0} is not symmetric")]
    NotSymmetric(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Plücker-type relation fails for classes {0} and {1}")]
    PlueckerViolation(String, String),
    #[error("unknown class {0}")]
    MissingClass(String),
    #[error("P·P = {0}, expected -2")]
    NotMinusTwo(i64),
    #[error("projection class has zero self-intersection")]
    DegenerateProjection,
    #[error("every sample has q(φ) = 0")]
    AllNull,
    #[error("derived dual pairing for {0} and {1} is not an integer")]
    NonIntegralDual(String, String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("n must be at least 1")]
    BadDimension,
    #[error("integer overflow")]
    Overflow,
}

fn sign(n: u32) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// `χ(C) = (-1)^n C·C`.
pub fn euler_from_class(n: u32, self_intersection: i64) -> i64 {
    sign(n) * self_intersection
}

/// `Σ (-1)^k dim Ext^k(O_{C1}, O_{C2}) = (-1)^n C1·C2`.
pub fn ext_euler(n: u32, c1_dot_c2: i64) -> i64 {
    sign(n) * c1_dot_c2
}

/// `C1·C2 = (-1)^{dim D} e(D)` for a clean intersection `D`.
pub fn clean_intersection_euler(dim_d: u32, euler_d: i64) -> i64 {
    sign(dim_d) * euler_d
}

/// `P·P` for a Lagrangian `P^n`.
pub fn center_self_intersection(n: u32) -> i64 {
    sign(n) * (n as i64 + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LagrangianClassTable {
    n: u32,
    labels: Vec<String>,
    s: Vec<Vec<i64>>,
    a: Vec<i64>,
    b: Vec<i64>,
    s_dual: Vec<Vec<i64>>,
}

/// JSON form of a table. `b` may be omitted for `n = 1` when `k3_default`
/// is set, giving `b = -a`; `s_dual` may be omitted and is then derived
/// from the Plücker-type relation.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct TableInput {
    pub n: u32,
    pub labels: Vec<String>,
    pub s: Vec<Vec<i64>>,
    pub a: Vec<i64>,
    #[serde(default)]
    pub b: Option<Vec<i64>>,
    #[serde(default)]
    pub s_dual: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub k3_default: bool,
}

fn check_square(m: &[Vec<i64>], k: usize, name: &'static str) -> Result<(), LagError> {
    if m.len() != k || m.iter().any(|r| r.len() != k) {
        return Err(LagError::DimensionMismatch(format!("{name} must be {k}×{k}")));
    }
    for i in 0..k {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(LagError::NotSymmetric(name));
            }
        }
    }
    Ok(())
}

impl TableInput {
    pub fn build(self) -> Result<LagrangianClassTable, LagError> {
        let b = match self.b {
            Some(b) => b,
            None if self.k3_default && self.n == 1 => self.a.iter().map(|v| -v).collect(),
            None => return Err(LagError::MissingData("b (only n = 1 tables may request k3_default)".into())),
        };
        match self.s_dual {
            Some(s_dual) => LagrangianClassTable::new(self.n, self.labels, self.s, self.a, b, s_dual),
            None => LagrangianClassTable::with_derived_dual(self.n, self.labels, self.s, self.a, b),
        }
    }
}

impl LagrangianClassTable {
    pub fn new(
        n: u32,
        labels: Vec<String>,
        s: Vec<Vec<i64>>,
        a: Vec<i64>,
        b: Vec<i64>,
        s_dual: Vec<Vec<i64>>,
    ) -> Result<Self, LagError> {
        if n == 0 {
            return Err(LagError::BadDimension);
        }
        let k = labels.len();
        if a.len() != k || b.len() != k {
            return Err(LagError::DimensionMismatch(format!("a and b must have {k} entries")));
        }
        check_square(&s, k, "s")?;
        check_square(&s_dual, k, "s_dual")?;
        let t = Self { n, labels, s, a, b, s_dual };
        for i in 0..k {
            for j in i..k {
                let (l, r) = t.pluecker_sides(i, j);
                if l != r {
                    return Err(LagError::PlueckerViolation(t.labels[i].clone(), t.labels[j].clone()));
                }
            }
        }
        Ok(t)
    }

    /// Fills in `s'` from `s' = s - σ(a a^T - b b^T)/N`.
    pub fn with_derived_dual(
        n: u32,
        labels: Vec<String>,
        s: Vec<Vec<i64>>,
        a: Vec<i64>,
        b: Vec<i64>,
    ) -> Result<Self, LagError> {
        if n == 0 {
            return Err(LagError::BadDimension);
        }
        let k = labels.len();
        if a.len() != k || b.len() != k {
            return Err(LagError::DimensionMismatch(format!("a and b must have {k} entries")));
        }
        check_square(&s, k, "s")?;
        let big_n = n as i64 + 1;
        let mut s_dual = vec![vec![0; k]; k];
        for i in 0..k {
            for j in 0..k {
                let num = (a[i] as i128 * a[j] as i128) - (b[i] as i128 * b[j] as i128);
                if num % big_n as i128 != 0 {
                    return Err(LagError::NonIntegralDual(labels[i].clone(), labels[j].clone()));
                }
                let v = s[i][j] as i128 - sign(n) as i128 * num / big_n as i128;
                s_dual[i][j] = i64::try_from(v).map_err(|_| LagError::Overflow)?;
            }
        }
        Self::new(n, labels, s, a, b, s_dual)
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn len(&self) -> usize {
        self.labels.len()
    }
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
    pub fn s(&self) -> &[Vec<i64>] {
        &self.s
    }
    pub fn a(&self) -> &[i64] {
        &self.a
    }
    pub fn b(&self) -> &[i64] {
        &self.b
    }
    pub fn s_dual(&self) -> &[Vec<i64>] {
        &self.s_dual
    }

    pub fn center_self_intersection(&self) -> i64 {
        center_self_intersection(self.n)
    }

    pub fn class_index(&self, name: &str) -> Result<usize, LagError> {
        self.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| LagError::MissingClass(name.to_string()))
    }

    fn pluecker_sides(&self, i: usize, j: usize) -> (Q, Q) {
        // Denominator (-1)^{n+1}(n+1) = -σN.
        let den = q(-self.center_self_intersection());
        let lhs = q(self.s[i][j]) + q(self.a[i]) * q(self.a[j]) / &den;
        let rhs = q(self.s_dual[i][j]) + q(self.b[i]) * q(self.b[j]) / &den;
        (lhs, rhs)
    }

    /// Coefficient of `P*` in `ℒ(C_i) = C_i∨ + κ_i P*`, with
    /// `κ_i = (a_i + (-1)^{n+1} b_i)/(n+1)`.
    pub fn transform_coefficient(&self, i: usize) -> Q {
        (q(self.a[i]) - q(sign(self.n) * self.b[i])) / q(self.n as i64 + 1)
    }

    pub fn to_input(&self) -> TableInput {
        TableInput {
            n: self.n,
            labels: self.labels.clone(),
            s: self.s.clone(),
            a: self.a.clone(),
            b: Some(self.b.clone()),
            s_dual: Some(self.s_dual.clone()),
            k3_default: false,
        }
    }
}

/// Both sides of `C_i·C_j + a_i a_j/((-1)^{n+1}(n+1)) = C_i∨·C_j∨ + b_i b_j/((-1)^{n+1}(n+1))`.
pub fn pluecker_type_check(t: &LagrangianClassTable, i: &str, j: &str) -> Result<(Q, Q), LagError> {
    Ok(t.pluecker_sides(t.class_index(i)?, t.class_index(j)?))
}

/// A rational combination of table classes and the center, on either side
/// of the flop.
#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub classes: Vec<Q>,
    pub center: Q,
}

impl Combination {
    pub fn class(k: usize, i: usize) -> Self {
        let mut classes = vec![Q::zero(); k];
        classes[i] = Q::one();
        Self { classes, center: Q::zero() }
    }

    pub fn center(k: usize, coeff: Q) -> Self {
        Self {
            classes: vec![Q::zero(); k],
            center: coeff,
        }
    }

    pub fn format(&self, labels: &[String], dual: bool, center_name: &str) -> String {
        let mut parts = Vec::new();
        for (c, l) in self.classes.iter().zip(labels) {
            if !c.is_zero() {
                let name = if dual { format!("dual({l})") } else { l.clone() };
                parts.push(term(c, &name));
            }
        }
        if !self.center.is_zero() {
            parts.push(term(&self.center, center_name));
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => out.push_str(&format!(" - {rest}")),
                None => out.push_str(&format!(" + {p}")),
            }
        }
        out
    }
}

fn term(c: &Q, name: &str) -> String {
    if c.is_one() {
        name.to_string()
    } else if *c == -Q::one() {
        format!("-{name}")
    } else {
        format!("{}*{name}", format_rational(c))
    }
}

fn bilinear(t: &LagrangianClassTable, u: &Combination, v: &Combination, dual: bool) -> Q {
    let (s, a) = if dual { (&t.s_dual, &t.b) } else { (&t.s, &t.a) };
    let k = t.len();
    let mut acc = Q::zero();
    for i in 0..k {
        if u.classes[i].is_zero() {
            continue;
        }
        for j in 0..k {
            if !v.classes[j].is_zero() {
                acc += &u.classes[i] * &v.classes[j] * q(s[i][j]);
            }
        }
        acc += &u.classes[i] * &v.center * q(a[i]);
    }
    for j in 0..k {
        acc += &u.center * &v.classes[j] * q(a[j]);
    }
    acc + &u.center * &v.center * q(t.center_self_intersection())
}

/// Intersection pairing on the original side (`P` as center).
pub fn pair_original(t: &LagrangianClassTable, u: &Combination, v: &Combination) -> Q {
    bilinear(t, u, v, false)
}

/// Intersection pairing on the flopped side (`C∨`, `P*`).
pub fn pair_flopped(t: &LagrangianClassTable, u: &Combination, v: &Combination) -> Q {
    bilinear(t, u, v, true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformedClass {
    pub label: String,
    pub image: Combination,
    /// False when the coefficient of `P*` is not an integer, so the image is
    /// only a rational class.
    pub integral: bool,
}

impl TransformedClass {
    pub fn expression(&self, labels: &[String]) -> String {
        self.image.format(labels, true, "P_dual")
    }
}

/// `ℒ(C_i) = C_i∨ + κ_i P*`.
pub fn normalized_transform(t: &LagrangianClassTable, name: &str) -> Result<TransformedClass, LagError> {
    let i = t.class_index(name)?;
    Ok(transform_index(t, i))
}

fn transform_index(t: &LagrangianClassTable, i: usize) -> TransformedClass {
    let kappa = t.transform_coefficient(i);
    let integral = kappa.is_integer();
    let mut image = Combination::class(t.len(), i);
    image.center = kappa;
    TransformedClass {
        label: t.labels[i].clone(),
        image,
        integral,
    }
}

/// `ℒ(P) = (-1)^n P*`.
pub fn transform_center(t: &LagrangianClassTable) -> Combination {
    Combination::center(t.len(), q(sign(t.n)))
}

/// Extends `ℒ` linearly to combinations on the original side.
pub fn transform_combination(t: &LagrangianClassTable, c: &Combination) -> Combination {
    let mut out = Combination::center(t.len(), &c.center * q(sign(t.n)));
    for (i, coeff) in c.classes.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        out.classes[i] += coeff;
        out.center += coeff * t.transform_coefficient(i);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductReport {
    pub classes_preserved: bool,
    pub center_preserved: bool,
    pub mixed_preserved: bool,
    pub failures: Vec<String>,
}

impl ProductReport {
    pub fn holds(&self) -> bool {
        self.classes_preserved && self.center_preserved && self.mixed_preserved
    }
}

/// Checks `ℒ(C_i)·ℒ(C_j) = C_i·C_j`, `ℒ(P)·ℒ(P) = P·P` and
/// `ℒ(C_i)·ℒ(P) = C_i·P` exactly.
pub fn product_report(t: &LagrangianClassTable) -> ProductReport {
    let k = t.len();
    let images: Vec<Combination> = (0..k).map(|i| transform_index(t, i).image).collect();
    let lp = transform_center(t);
    let mut failures = Vec::new();
    let mut classes_preserved = true;
    let mut mixed_preserved = true;
    for i in 0..k {
        for j in i..k {
            if pair_flopped(t, &images[i], &images[j]) != q(t.s[i][j]) {
                classes_preserved = false;
                failures.push(format!("{}·{}", t.labels[i], t.labels[j]));
            }
        }
        if pair_flopped(t, &images[i], &lp) != q(t.a[i]) {
            mixed_preserved = false;
            failures.push(format!("{}·P", t.labels[i]));
        }
    }
    let center_preserved = pair_flopped(t, &lp, &lp) == q(t.center_self_intersection());
    if !center_preserved {
        failures.push("P·P".into());
    }
    ProductReport {
        classes_preserved,
        center_preserved,
        mixed_preserved,
        failures,
    }
}

pub fn transform_preserves_product(t: &LagrangianClassTable) -> bool {
    product_report(t).holds()
}

/// Random table with `k` classes satisfying the Plücker-type relation and
/// all pairings bounded by `bound` in absolute value.
pub fn random_table<R: Rng + ?Sized>(rng: &mut R, n: u32, k: usize, bound: i64) -> LagrangianClassTable {
    let big_n = n as i64 + 1;
    loop {
        // a_i = ε b_i + N m_i makes a_i a_j - b_i b_j divisible by N.
        let eps = if rng.random_bool(0.5) { 1 } else { -1 };
        let b: Vec<i64> = (0..k).map(|_| rng.random_range(-4..=4)).collect();
        let a: Vec<i64> = b
            .iter()
            .map(|bi| eps * bi + big_n * rng.random_range(-1..=1))
            .collect();
        let mut s = vec![vec![0; k]; k];
        for i in 0..k {
            for j in i..k {
                let v = rng.random_range(-bound..=bound);
                s[i][j] = v;
                s[j][i] = v;
            }
        }
        let labels = (1..=k).map(|i| format!("C{i}")).collect();
        let Ok(t) = LagrangianClassTable::with_derived_dual(n, labels, s, a.clone(), b.clone()) else {
            continue;
        };
        let in_range = |v: &i64| v.abs() <= bound;
        if t.s_dual.iter().flatten().all(in_range) && a.iter().all(in_range) {
            return t;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GramLattice {
    gram: Vec<Vec<i64>>,
}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self, LagError> {
        check_square(&gram, gram.len(), "gram")?;
        Ok(Self { gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn dot(&self, u: &[i64], v: &[i64]) -> Result<i64, LagError> {
        let r = self.rank();
        if u.len() != r || v.len() != r {
            return Err(LagError::DimensionMismatch(format!("vectors must have {r} entries")));
        }
        let mut acc: i128 = 0;
        for i in 0..r {
            for j in 0..r {
                acc += u[i] as i128 * self.gram[i][j] as i128 * v[j] as i128;
            }
        }
        i64::try_from(acc).map_err(|_| LagError::Overflow)
    }

    fn check_minus_two(&self, p: &[i64]) -> Result<(), LagError> {
        let pp = self.dot(p, p)?;
        if pp != -2 {
            return Err(LagError::NotMinusTwo(pp));
        }
        Ok(())
    }
}

fn combine(c: &[i64], coeff: i64, p: &[i64]) -> Result<Vec<i64>, LagError> {
    c.iter()
        .zip(p)
        .map(|(x, y)| {
            coeff
                .checked_mul(*y)
                .and_then(|t| x.checked_add(t))
                .ok_or(LagError::Overflow)
        })
        .collect()
}

/// `C - (C·P)P`, the K3 display taken verbatim. This is not an isometry:
/// `P ↦ 3P`.
pub fn k3_reflection(l: &GramLattice, p: &[i64], c: &[i64]) -> Result<Vec<i64>, LagError> {
    l.check_minus_two(p)?;
    let cp = l.dot(c, p)?;
    combine(c, -cp, p)
}

/// `C + (C·P)P`, the Picard–Lefschetz reflection in a `(-2)`-class.
pub fn picard_lefschetz(l: &GramLattice, p: &[i64], c: &[i64]) -> Result<Vec<i64>, LagError> {
    l.check_minus_two(p)?;
    let cp = l.dot(c, p)?;
    combine(c, cp, p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReflectionReport {
    pub isometry: bool,
    pub involution: bool,
    pub fixes_orthogonal: bool,
    pub negates_center: bool,
}

/// Checks the Picard–Lefschetz reflection against the Gram form on the
/// standard basis together with `extra` vectors.
pub fn reflection_report(l: &GramLattice, p: &[i64], extra: &[Vec<i64>]) -> Result<ReflectionReport, LagError> {
    l.check_minus_two(p)?;
    let r = l.rank();
    let mut vectors: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    vectors.extend(extra.iter().cloned());
    vectors.push(p.to_vec());
    let images: Vec<Vec<i64>> = vectors
        .iter()
        .map(|v| picard_lefschetz(l, p, v))
        .collect::<Result<_, _>>()?;
    let mut isometry = true;
    for i in 0..vectors.len() {
        for j in i..vectors.len() {
            isometry &= l.dot(&images[i], &images[j])? == l.dot(&vectors[i], &vectors[j])?;
        }
    }
    let mut involution = true;
    let mut fixes_orthogonal = true;
    for (v, img) in vectors.iter().zip(&images) {
        involution &= picard_lefschetz(l, p, img)? == *v;
        if l.dot(v, p)? == 0 {
            fixes_orthogonal &= img == v;
        }
    }
    let negated: Vec<i64> = p.iter().map(|x| -x).collect();
    Ok(ReflectionReport {
        isometry,
        involution,
        fixes_orthogonal,
        negates_center: picard_lefschetz(l, p, p)? == negated,
    })
}

/// Pairings of a modification along a `P^k`-bundle. Index `(i, j)`:
/// `cross[i][j] = C_i·C_j^proj`, `proj[i][j] = C_i^proj·C_j^proj`, and the
/// same on the modified side with `C∨` and `C∨^proj`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MukaiCenterData {
    pub k: u32,
    pub labels: Vec<String>,
    pub s: Vec<Vec<i64>>,
    pub s_dual: Vec<Vec<i64>>,
    pub cross: Vec<Vec<i64>>,
    pub proj: Vec<Vec<i64>>,
    pub cross_dual: Vec<Vec<i64>>,
    pub proj_dual: Vec<Vec<i64>>,
}

impl MukaiCenterData {
    pub fn validate(&self) -> Result<(), LagError> {
        let m = self.labels.len();
        check_square(&self.s, m, "s")?;
        check_square(&self.s_dual, m, "s_dual")?;
        check_square(&self.proj, m, "proj")?;
        check_square(&self.proj_dual, m, "proj_dual")?;
        for (name, c) in [("cross", &self.cross), ("cross_dual", &self.cross_dual)] {
            if c.len() != m || c.iter().any(|r| r.len() != m) {
                return Err(LagError::DimensionMismatch(format!("{name} must be {m}×{m}")));
            }
        }
        for i in 0..m {
            if self.proj[i][i] == 0 {
                return Err(LagError::DegenerateProjection);
            }
            if self.proj[i][i] != self.proj_dual[i][i] {
                return Err(LagError::DimensionMismatch(format!(
                    "projection self-intersections differ for {}",
                    self.labels[i]
                )));
            }
        }
        Ok(())
    }

    /// The flop of `P^n` as a modification with `C^proj = P` for every
    /// class.
    pub fn from_flop_table(t: &LagrangianClassTable) -> Self {
        let k = t.len();
        let pp = t.center_self_intersection();
        // cross[i][j] = C_i·P whatever j is.
        let rows = |v: &[i64]| -> Vec<Vec<i64>> { v.iter().map(|&x| vec![x; k]).collect() };
        Self {
            k: t.n,
            labels: t.labels.clone(),
            s: t.s.clone(),
            s_dual: t.s_dual.clone(),
            cross: rows(&t.a),
            proj: vec![vec![pp; k]; k],
            cross_dual: rows(&t.b),
            proj_dual: vec![vec![pp; k]; k],
        }
    }

    fn pair_projected(&self, i: usize, j: usize, dual: bool) -> Q {
        let (s, cross, proj) = if dual {
            (&self.s_dual, &self.cross_dual, &self.proj_dual)
        } else {
            (&self.s, &self.cross, &self.proj)
        };
        let ai = q(cross[i][i]) / q(proj[i][i]);
        let aj = q(cross[j][j]) / q(proj[j][j]);
        // (C_i - α_i C_i^p)·(C_j - α_j C_j^p); cross[j][i] = C_j·C_i^p.
        q(s[i][j]) - &aj * q(cross[i][j]) - &ai * q(cross[j][i]) + ai * aj * q(proj[i][j])
    }

    /// `β_i` in `ℒ(C_i) = C_i∨ + β_i C_i∨^proj`.
    pub fn transform_coefficient(&self, i: usize) -> Q {
        (q(sign(self.k) * self.cross[i][i]) - q(self.cross_dual[i][i])) / q(self.proj[i][i])
    }

    /// `ℒ(C_i)·ℒ(C_j)` on the modified side.
    pub fn transformed_pairing(&self, i: usize, j: usize) -> Q {
        let (bi, bj) = (self.transform_coefficient(i), self.transform_coefficient(j));
        q(self.s_dual[i][j])
            + &bj * q(self.cross_dual[i][j])
            + &bi * q(self.cross_dual[j][i])
            + bi * bj * q(self.proj_dual[i][j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MukaiCheck {
    pub lhs: Q,
    pub rhs: Q,
    pub transformed: Q,
    pub product_preserved: bool,
}

/// Both sides of the general Plücker-type formula, with each class
/// projected away from its own `C^proj` on the original side and from
/// `C∨^proj` on the modified side, plus the pairing of the general `ℒ`.
pub fn mukai_pluecker_check(d: &MukaiCenterData, i: &str, j: &str) -> Result<MukaiCheck, LagError> {
    d.validate()?;
    let idx = |name: &str| {
        d.labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| LagError::MissingClass(name.to_string()))
    };
    let (i, j) = (idx(i)?, idx(j)?);
    let transformed = d.transformed_pairing(i, j);
    Ok(MukaiCheck {
        lhs: d.pair_projected(i, j, false),
        rhs: d.pair_projected(i, j, true),
        product_preserved: transformed == q(d.s[i][j]),
        transformed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FujikiFit {
    pub constant: Q,
    pub max_defect: Q,
}

/// Least-squares fit of `∫ φ^{2n-2k} = c q(φ)^{n-k}` over the supplied
/// samples `(φ, ∫ φ^{2n-2k})`.
pub fn bb_fujiki_fit(q_gram: &GramLattice, samples: &[(Vec<i64>, i64)], n: u32, k: u32) -> Result<FujikiFit, LagError> {
    if k > n {
        return Err(LagError::DimensionMismatch("k must not exceed n".into()));
    }
    let mut weights = Vec::with_capacity(samples.len());
    for (phi, _) in samples {
        let qv = BigInt::from(q_gram.dot(phi, phi)?);
        weights.push(Q::from_integer(qv.pow(n - k)));
    }
    let norm: Q = weights.iter().map(|w| w * w).sum();
    if norm.is_zero() {
        return Err(LagError::AllNull);
    }
    let dot: Q = weights.iter().zip(samples).map(|(w, (_, v))| w * q(*v)).sum();
    let constant = dot / norm;
    let max_defect = weights
        .iter()
        .zip(samples)
        .map(|(w, (_, v))| (q(*v) - &constant * w).abs())
        .max()
        .unwrap_or_else(Q::zero);
    Ok(FujikiFit { constant, max_defect })
}

/// Greatest common divisor of the `P*` denominators in a table; 1 when all
/// transforms are integral.
pub fn transform_denominator(t: &LagrangianClassTable) -> BigInt {
    (0..t.len()).fold(BigInt::one(), |acc, i| acc.lcm(t.transform_coefficient(i).denom()))
}
