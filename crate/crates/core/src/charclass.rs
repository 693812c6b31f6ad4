//! Truncated characteristic-class algebra. Series are polynomials in
//! Chern classes (elementary symmetric functions of formal roots) with
//! exact rational coefficients; the variable `c_i` has degree `i`.
//! Multiplicative genera are built as `exp(Σ q_k p_k)` where `log Q(t) =
//! Σ q_k t^k` and the power sums `p_k` come from Newton's identities.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactpoly::{MultiPoly, Q};

pub const MAX_TRUNCATION: u32 = 12;
pub const MAX_IDENTITY_TRUNCATION: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error("truncation degree {0} exceeds the cap {1}")]
    TruncationTooLarge(u32, u32),
    #[error("constant term must be 1")]
    BadConstantTerm,
    #[error("series live in different rings")]
    RingMismatch,
    #[error("rank must be at least 1")]
    ZeroRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GenusKind {
    #[serde(rename = "a_hat")]
    AHat,
    #[serde(rename = "todd")]
    Todd,
    #[serde(rename = "l")]
    L,
}

impl std::str::FromStr for GenusKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a_hat" | "ahat" | "a-hat" => Ok(Self::AHat),
            "todd" | "td" => Ok(Self::Todd),
            "l" => Ok(Self::L),
            _ => Err(format!("unknown genus {s}")),
        }
    }
}

/// A truncated series in weighted variables.
#[derive(Clone, PartialEq)]
pub struct FormalClassSeries {
    names: Vec<String>,
    weights: Vec<u32>,
    truncation: u32,
    poly: MultiPoly,
}

fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

fn chern_names(prefix: &str, rank: usize) -> Vec<String> {
    (1..=rank).map(|i| format!("{prefix}{i}")).collect()
}

impl FormalClassSeries {
    /// The ring of Chern classes `c1..c_r` of one bundle.
    pub fn ring(rank: usize, truncation: u32) -> Result<Self, CharError> {
        Self::ring_of(&[("c", rank)], truncation)
    }

    /// Chern classes of several bundles, e.g. `[("c", 2), ("d", 1)]`.
    pub fn ring_of(bundles: &[(&str, usize)], truncation: u32) -> Result<Self, CharError> {
        if truncation > MAX_TRUNCATION {
            return Err(CharError::TruncationTooLarge(truncation, MAX_TRUNCATION));
        }
        if bundles.iter().any(|(_, r)| *r == 0) {
            return Err(CharError::ZeroRank);
        }
        let mut names = Vec::new();
        let mut weights = Vec::new();
        for (prefix, rank) in bundles {
            names.extend(chern_names(prefix, *rank));
            weights.extend(1..=*rank as u32);
        }
        let nvars = names.len();
        Ok(Self {
            names,
            weights,
            truncation,
            poly: MultiPoly::zero(nvars),
        })
    }

    fn with_poly(&self, poly: MultiPoly) -> Self {
        let mut out = Self {
            names: self.names.clone(),
            weights: self.weights.clone(),
            truncation: self.truncation,
            poly,
        };
        out.truncate();
        out
    }

    fn weight(&self, e: &[u32]) -> u32 {
        e.iter().zip(&self.weights).map(|(k, w)| k * w).sum()
    }

    fn truncate(&mut self) {
        let keep: Vec<_> = self
            .poly
            .terms()
            .filter(|(e, _)| self.weight(e) <= self.truncation)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        self.poly = MultiPoly::from_terms(self.poly.nvars(), keep);
    }

    pub fn constant(&self, c: Q) -> Self {
        self.with_poly(MultiPoly::constant(self.poly.nvars(), c))
    }

    pub fn one(&self) -> Self {
        self.constant(Q::one())
    }

    /// Variable `index` (0-based, across all bundles).
    pub fn var(&self, index: usize) -> Self {
        self.with_poly(MultiPoly::var(self.poly.nvars(), index))
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn constant_term(&self) -> Q {
        self.poly.coeff(&vec![0; self.poly.nvars()])
    }

    /// Homogeneous component of degree `k`.
    pub fn component(&self, k: u32) -> Self {
        let terms: Vec<_> = self
            .poly
            .terms()
            .filter(|(e, _)| self.weight(e) == k)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        self.with_poly(MultiPoly::from_terms(self.poly.nvars(), terms))
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    fn same_ring(&self, other: &Self) -> Result<(), CharError> {
        if self.weights != other.weights || self.names != other.names {
            return Err(CharError::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CharError> {
        self.same_ring(other)?;
        Ok(self.with_poly(&self.poly + &other.poly).min_truncation(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CharError> {
        self.same_ring(other)?;
        Ok(self.with_poly(&self.poly - &other.poly).min_truncation(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CharError> {
        self.same_ring(other)?;
        let n = self.truncation.min(other.truncation);
        // Truncate while multiplying to keep intermediate sizes down.
        let mut acc = MultiPoly::zero(self.poly.nvars());
        for (ea, ca) in self.poly.terms() {
            let wa = self.weight(ea);
            if wa > n {
                continue;
            }
            for (eb, cb) in other.poly.terms() {
                if wa + self.weight(eb) <= n {
                    let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                    acc.add_term(e, ca * cb);
                }
            }
        }
        let mut out = self.with_poly(acc);
        out.truncation = n;
        Ok(out)
    }

    fn min_truncation(mut self, other: &Self) -> Self {
        self.truncation = self.truncation.min(other.truncation);
        self.truncate();
        self
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.with_poly(self.poly.scale(c))
    }

    /// Substitutes `c_i ↦ (-1)^i c_i`, the Chern classes of the dual bundle.
    pub fn dual(&self) -> Self {
        let terms: Vec<_> = self
            .poly
            .terms()
            .map(|(e, c)| {
                let c = if self.weight(e) % 2 == 1 { -c.clone() } else { c.clone() };
                (e.clone(), c)
            })
            .collect();
        self.with_poly(MultiPoly::from_terms(self.poly.nvars(), terms))
    }

    /// `exp(s)` for `s` without constant term.
    fn exp_nilpotent(&self) -> Self {
        let mut out = self.one();
        let mut power = self.one();
        for m in 1..=self.truncation {
            power = power.mul(self).expect("same ring").scale(&Q::new(BigInt::one(), BigInt::from(m)));
            if power.is_zero() {
                break;
            }
            out = out.add(&power).expect("same ring");
        }
        out
    }

    /// `log(s)` for `s` with constant term 1.
    fn log_unit(&self) -> Result<Self, CharError> {
        if !self.constant_term().is_one() {
            return Err(CharError::BadConstantTerm);
        }
        let u = self.sub(&self.one())?;
        let mut out = self.constant(Q::zero());
        let mut power = self.one();
        for m in 1..=self.truncation as i64 {
            power = power.mul(&u)?;
            if power.is_zero() {
                break;
            }
            let sign = if m % 2 == 1 { Q::one() } else { -Q::one() };
            out = out.add(&power.scale(&(sign / qi(m))))?;
        }
        Ok(out)
    }

    /// Expands a single-bundle series in formal roots `t_1..t_r`.
    pub fn in_roots(&self) -> MultiPoly {
        let r = self.names.len();
        let roots: Vec<MultiPoly> = (0..r).map(|i| MultiPoly::var(r, i)).collect();
        // Elementary symmetric polynomials of the roots.
        let mut e = vec![MultiPoly::one(r)];
        e.extend((0..r).map(|_| MultiPoly::zero(r)));
        for t in &roots {
            for k in (1..=r).rev() {
                e[k] = &e[k] + &(&e[k - 1] * t);
            }
        }
        let mut out = MultiPoly::zero(r);
        for (exp, c) in self.poly.terms() {
            let mut term = MultiPoly::constant(r, c.clone());
            for (i, &k) in exp.iter().enumerate() {
                // weight of variable i is its index within the bundle
                term = &term * &e[self.weights[i] as usize].pow(k);
            }
            out = &out + &term;
        }
        out
    }
}

impl fmt::Display for FormalClassSeries {
    /// Terms by increasing degree; within a degree, by decreasing exponent
    /// of the first variable.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.poly.terms().collect();
        terms.sort_by(|(a, _), (b, _)| self.weight(a).cmp(&self.weight(b)).then(b.cmp(a)));
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts = Vec::new();
            let is_const = e.iter().all(|&x| x == 0);
            if !mag.is_one() || is_const {
                parts.push(mag.to_string());
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => parts.push(self.names[i].clone()),
                    _ => parts.push(format!("{}^{x}", self.names[i])),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for FormalClassSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalClassSeries[N={}]({self})", self.truncation)
    }
}

/// Total Chern class `1 + c1 + ... + c_r` of the bundle occupying
/// variables `offset..offset + rank` in `ring`.
pub fn total_chern(ring: &FormalClassSeries, offset: usize, rank: usize) -> FormalClassSeries {
    (0..rank).fold(ring.one(), |acc, i| acc.add(&ring.var(offset + i)).expect("same ring"))
}

/// Replaces variable `i` of `s` by `values[i]`, landing in the ring of the
/// values.
pub fn substitute(s: &FormalClassSeries, values: &[FormalClassSeries]) -> Result<FormalClassSeries, CharError> {
    let ring = values.first().ok_or(CharError::RingMismatch)?;
    if values.len() != s.names.len() {
        return Err(CharError::RingMismatch);
    }
    let mut out = ring.constant(Q::zero());
    for (e, c) in s.poly.terms() {
        let mut term = ring.constant(c.clone());
        for (v, &k) in values.iter().zip(e) {
            for _ in 0..k {
                term = term.mul(v)?;
            }
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// `c(E ⊕ E*) = c(E) c(E*)`, expressed in the Chern classes of `E`.
pub fn chern_of_e_plus_edual(c: &FormalClassSeries) -> FormalClassSeries {
    c.mul(&c.dual()).expect("same ring")
}

/// `p_k = (-1)^k c_{2k}(E ⊕ E*)`.
pub fn pontryagin(c: &FormalClassSeries, k: u32) -> FormalClassSeries {
    let comp = chern_of_e_plus_edual(c).component(2 * k);
    if k % 2 == 1 {
        comp.scale(&-Q::one())
    } else {
        comp
    }
}

/// Power sums `p_1..p_N` of the roots of the bundle at `offset..offset+rank`,
/// by Newton's identities.
pub fn power_sums(ring: &FormalClassSeries, offset: usize, rank: usize) -> Vec<FormalClassSeries> {
    let n = ring.truncation as usize;
    let e = |i: usize| -> FormalClassSeries {
        if i >= 1 && i <= rank {
            ring.var(offset + i - 1)
        } else {
            ring.constant(Q::zero())
        }
    };
    let mut p: Vec<FormalClassSeries> = vec![ring.constant(Q::zero())];
    for k in 1..=n {
        let mut acc = e(k).scale(&qi(if k % 2 == 1 { k as i64 } else { -(k as i64) }));
        for i in 1..k {
            let term = e(i).mul(&p[k - i]).expect("same ring");
            acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) }.expect("same ring");
        }
        p.push(acc);
    }
    p.remove(0);
    p
}

// Univariate power series helpers, coefficients lowest first.

fn series_mul(a: &[Q], b: &[Q], n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_inverse(a: &[Q], n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n + 1];
    out[0] = a[0].recip();
    for k in 1..=n {
        let s: Q = (1..=k.min(a.len() - 1)).map(|i| &a[i] * &out[k - i]).sum();
        out[k] = -s * &out[0];
    }
    out
}

fn series_log(a: &[Q], n: usize) -> Vec<Q> {
    // (log a)' = a'/a
    let da: Vec<Q> = (1..a.len()).map(|i| &a[i] * qi(i as i64)).collect();
    let q = series_mul(&da, &series_inverse(a, n), n);
    let mut out = vec![Q::zero(); n + 1];
    for k in 1..=n {
        out[k] = &q[k - 1] / qi(k as i64);
    }
    out
}

fn factorial(k: usize) -> Q {
    qi((1..=k as i64).product::<i64>().max(1))
}

/// Characteristic power series `Q(t)` of the genus.
pub fn characteristic_series(kind: GenusKind, n: usize) -> Vec<Q> {
    let m = n + 1;
    match kind {
        GenusKind::AHat => {
            // sinh(t/2)/(t/2) = Σ (t/2)^{2j} / (2j+1)!
            let s: Vec<Q> = (0..=m)
                .map(|k| {
                    if k % 2 == 0 {
                        Q::one() / (factorial(k + 1) * qi(2i64.pow(k as u32)))
                    } else {
                        Q::zero()
                    }
                })
                .collect();
            series_inverse(&s, n)
        }
        GenusKind::Todd => {
            // (1 - e^{-t})/t = Σ (-1)^k t^k/(k+1)!
            let s: Vec<Q> = (0..=m)
                .map(|k| {
                    let v = Q::one() / factorial(k + 1);
                    if k % 2 == 1 {
                        -v
                    } else {
                        v
                    }
                })
                .collect();
            series_inverse(&s, n)
        }
        GenusKind::L => {
            // t/tanh t = cosh t / (sinh t / t)
            let cosh: Vec<Q> = (0..=m).map(|k| if k % 2 == 0 { Q::one() / factorial(k) } else { Q::zero() }).collect();
            let sinc: Vec<Q> = (0..=m)
                .map(|k| if k % 2 == 0 { Q::one() / factorial(k + 1) } else { Q::zero() })
                .collect();
            series_mul(&cosh, &series_inverse(&sinc, n), n)
        }
    }
}

/// `exp(Σ q_k p_k)` for the given power sums.
fn genus_from_power_sums(ring: &FormalClassSeries, kind: GenusKind, p: &[FormalClassSeries]) -> FormalClassSeries {
    let n = ring.truncation as usize;
    let logq = series_log(&characteristic_series(kind, n), n);
    let mut s = ring.constant(Q::zero());
    for k in 1..=n {
        if !logq[k].is_zero() {
            s = s.add(&p[k - 1].scale(&logq[k])).expect("same ring");
        }
    }
    s.exp_nilpotent()
}

fn check_truncation(n: u32, cap: u32) -> Result<(), CharError> {
    if n > cap {
        return Err(CharError::TruncationTooLarge(n, cap));
    }
    Ok(())
}

/// The multiplicative sequence of `kind` for a bundle of the given rank.
pub fn genus_series(kind: GenusKind, rank: usize, n: u32) -> Result<FormalClassSeries, CharError> {
    check_truncation(n, MAX_TRUNCATION)?;
    let ring = FormalClassSeries::ring(rank, n)?;
    Ok(genus_in(&ring, kind, 0, rank))
}

/// Genus of the bundle at `offset..offset + rank` inside `ring`.
pub fn genus_in(ring: &FormalClassSeries, kind: GenusKind, offset: usize, rank: usize) -> FormalClassSeries {
    genus_from_power_sums(ring, kind, &power_sums(ring, offset, rank))
}

/// Genus of `E ⊕ E*` in the Chern classes of `E`: its power sums are
/// `(1 + (-1)^k) p_k(E)`.
pub fn genus_of_e_plus_edual(kind: GenusKind, rank: usize, n: u32) -> Result<FormalClassSeries, CharError> {
    check_truncation(n, MAX_TRUNCATION)?;
    let ring = FormalClassSeries::ring(rank, n)?;
    let p: Vec<FormalClassSeries> = power_sums(&ring, 0, rank)
        .into_iter()
        .enumerate()
        .map(|(i, pk)| if i % 2 == 1 { pk.scale(&qi(2)) } else { ring.constant(Q::zero()) })
        .collect();
    Ok(genus_from_power_sums(&ring, kind, &p))
}

/// The unique square root with constant term 1.
pub fn sqrt_series(s: &FormalClassSeries) -> Result<FormalClassSeries, CharError> {
    let log = s.log_unit()?;
    Ok(log.scale(&Q::new(BigInt::one(), BigInt::from(2))).exp_nilpotent())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub rank: usize,
    pub degree: u32,
    pub todd_equals_a_hat: bool,
    pub a_hat_equals_square: bool,
    pub a_hat_square: String,
}

/// `Td(E ⊕ E*) = Â(E ⊕ E*) = Â(E)²` through degree `n`.
pub fn a_hat_square_report(rank: usize, n: u32) -> Result<IdentityReport, CharError> {
    check_truncation(n, MAX_IDENTITY_TRUNCATION)?;
    let todd = genus_of_e_plus_edual(GenusKind::Todd, rank, n)?;
    let ahat_sum = genus_of_e_plus_edual(GenusKind::AHat, rank, n)?;
    let ahat = genus_series(GenusKind::AHat, rank, n)?;
    let square = ahat.mul(&ahat)?;
    Ok(IdentityReport {
        rank,
        degree: n,
        todd_equals_a_hat: todd == ahat_sum,
        a_hat_equals_square: ahat_sum == square,
        a_hat_square: square.to_string(),
    })
}

pub fn a_hat_square_identity(rank: usize, n: u32) -> Result<bool, CharError> {
    let r = a_hat_square_report(rank, n)?;
    Ok(r.todd_equals_a_hat && r.a_hat_equals_square)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Q {
        Q::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn rank_one_genera() {
        let a = genus_series(GenusKind::AHat, 1, 4).unwrap();
        assert_eq!(a.to_string(), "1 - 1/24*c1^2 + 7/5760*c1^4");
        let l = genus_series(GenusKind::L, 1, 4).unwrap();
        assert_eq!(l.to_string(), "1 + 1/3*c1^2 - 1/45*c1^4");
        let t = genus_series(GenusKind::Todd, 1, 2).unwrap();
        assert_eq!(t.to_string(), "1 + 1/2*c1 + 1/12*c1^2");
        assert_eq!(genus_series(GenusKind::L, 1, 13).unwrap_err(), CharError::TruncationTooLarge(13, 12));
    }

    #[test]
    fn todd_rank_two() {
        // Td = 1 + c1/2 + (c1² + c2)/12 + c1c2/24
        let t = genus_series(GenusKind::Todd, 2, 3).unwrap();
        assert_eq!(t.to_string(), "1 + 1/2*c1 + 1/12*c1^2 + 1/12*c2 + 1/24*c1*c2");
    }

    #[test]
    fn sum_with_dual() {
        let ring = FormalClassSeries::ring(1, 4).unwrap();
        let s = chern_of_e_plus_edual(&total_chern(&ring, 0, 1));
        assert_eq!(s.to_string(), "1 - c1^2");
        for r in 1..=4 {
            let ring = FormalClassSeries::ring(r, 8).unwrap();
            let c = total_chern(&ring, 0, r);
            let s = chern_of_e_plus_edual(&c);
            for k in (1..=8).step_by(2) {
                assert!(s.component(k).is_zero(), "rank {r} degree {k}");
            }
            // Top class: c_{2r}(E ⊕ E*) = (-1)^r c_r(E)².
            let top = s.component(2 * r as u32);
            let cr = ring.var(r - 1);
            let sign = if r % 2 == 0 { Q::one() } else { -Q::one() };
            if 2 * r <= 8 {
                assert_eq!(top, cr.mul(&cr).unwrap().scale(&sign));
            }
        }
        let ring = FormalClassSeries::ring(2, 4).unwrap();
        let s = chern_of_e_plus_edual(&total_chern(&ring, 0, 2));
        assert_eq!(s.component(2).to_string(), "-c1^2 + 2*c2");
        // Root expansion: (1+t1)(1+t2)(1-t1)(1-t2).
        let roots = s.in_roots();
        let t1 = MultiPoly::var(2, 0);
        let t2 = MultiPoly::var(2, 1);
        let one = MultiPoly::one(2);
        let expect = &(&(&one + &t1) * &(&one - &t1)) * &(&(&one + &t2) * &(&one - &t2));
        assert_eq!(roots, expect);
        assert_eq!(pontryagin(&total_chern(&ring, 0, 2), 1).to_string(), "c1^2 - 2*c2");
    }

    #[test]
    fn square_roots() {
        let l = genus_series(GenusKind::L, 1, 4).unwrap();
        let r = sqrt_series(&l).unwrap();
        assert_eq!(r.component(2).to_string(), "1/6*c1^2");
        assert_eq!(r.mul(&r).unwrap(), l);
        assert_eq!(sqrt_series(&l.one()).unwrap(), l.one());
        assert_eq!(sqrt_series(&l.constant(q(2, 1))).unwrap_err(), CharError::BadConstantTerm);
        let a = genus_series(GenusKind::AHat, 2, 8).unwrap();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sqrt_series(&sq).unwrap(), a);
    }

    #[test]
    fn a_hat_square_identities() {
        assert!(a_hat_square_identity(1, 4).unwrap());
        assert!(a_hat_square_identity(2, 6).unwrap());
        assert!(a_hat_square_identity(3, 8).unwrap());
        assert_eq!(a_hat_square_identity(1, 9).unwrap_err(), CharError::TruncationTooLarge(9, 8));
    }

    #[test]
    fn multiplicativity() {
        for kind in [GenusKind::AHat, GenusKind::Todd, GenusKind::L] {
            let ring = FormalClassSeries::ring_of(&[("c", 2), ("d", 1)], 6).unwrap();
            // c_k(E ⊕ F) is the degree-k part of c(E) c(F).
            let total = total_chern(&ring, 0, 2).mul(&total_chern(&ring, 2, 1)).unwrap();
            let classes: Vec<_> = (1..=3).map(|k| total.component(k)).collect();
            let g_sum = substitute(&genus_series(kind, 3, 6).unwrap(), &classes).unwrap();
            let g_prod = genus_in(&ring, kind, 0, 2).mul(&genus_in(&ring, kind, 2, 1)).unwrap();
            assert_eq!(g_sum, g_prod, "{kind:?}");
        }
    }
}
