//! Pointwise Legendre transform of homogeneous polynomials.
//!
//! `f∨(ξ) = Σ x_i ξ_i - f(x)` where `∇f(x) = ξ`. The gradient map is a
//! branched cover for degree `p ≥ 3`, and different preimages of the same
//! `ξ` give different values of `f∨` (for `f(x) = x0³ - x1²x2` the four
//! preimages give `±x0³ ± x1²x2`). [`dual_value`] returns the value on
//! whichever branch Newton finds; [`dual_value_near`] follows the branch
//! through a given point.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::exactpoly::{HomogeneousPolynomial, PolyError, Q};
use crate::numeric::{complex_gaussian, norm, pair, sample_rng, solve, sub, CVec, FloatPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LegendreError {
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gradient map of a degree-{0} form cannot be inverted")]
    DegreeOne(u32),
    #[error("Newton inversion failed after all restarts (best residual {best_residual:e})")]
    NoConvergence { best_residual: f64 },
    #[error("invalid Newton configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonConfig {
    /// Accept when `|∇f(x) - ξ| ≤ tolerance · max(1, |ξ|)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 60,
            restarts: 16,
            seed: 0,
        }
    }
}

impl NewtonConfig {
    fn validate(&self) -> Result<(), LegendreError> {
        if !(self.tolerance > 0.0) {
            return Err(LegendreError::InvalidConfig("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendrePoint {
    pub x: CVec,
    pub xi: CVec,
    pub f_value: Complex64,
    pub f_dual_value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inversion {
    pub x: CVec,
    /// `|∇f(x) - ξ|`.
    pub residual: f64,
    /// Hessian numerically degenerate at `x`.
    pub singular: bool,
    /// Index of the start that converged (0 is the first start).
    pub start: usize,
}

/// Gradient and Hessian of a form, compiled for float evaluation.
#[derive(Debug, Clone)]
pub struct GradientMap {
    f: FloatPoly,
    grad: Vec<FloatPoly>,
    hess: Vec<Vec<FloatPoly>>,
    degree: u32,
}

impl GradientMap {
    pub fn new(f: &HomogeneousPolynomial) -> Result<Self, LegendreError> {
        let grad = f.gradient()?;
        let hess = f.hessian()?;
        Ok(Self {
            f: FloatPoly::new(f.as_poly()),
            grad: grad.iter().map(|g| FloatPoly::new(g.as_poly())).collect(),
            hess: hess
                .iter()
                .map(|row| row.iter().map(|h| FloatPoly::new(h.as_poly())).collect())
                .collect(),
            degree: f.degree(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.grad.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn value(&self, x: &[Complex64]) -> Complex64 {
        self.f.eval(x)
    }

    pub fn gradient(&self, x: &[Complex64]) -> CVec {
        self.grad.iter().map(|g| g.eval(x)).collect()
    }

    pub fn hessian(&self, x: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.nvars();
        DMatrix::from_fn(n, n, |i, j| self.hess[i][j].eval(x))
    }

    fn check_len(&self, v: &[Complex64]) -> Result<(), LegendreError> {
        if v.len() != self.nvars() {
            return Err(LegendreError::DimensionMismatch {
                expected: self.nvars(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `Σ x_i ξ_i - f(x)`.
    pub fn dual_at(&self, x: &[Complex64], xi: &[Complex64]) -> Complex64 {
        pair(x, xi) - self.value(x)
    }

    fn is_singular(&self, x: &[Complex64]) -> bool {
        let h = self.hessian(x);
        let scale = h.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return true;
        }
        let sv = h.map(|z| z / scale).svd(false, false).singular_values;
        sv.min() < 1e-10
    }

    /// Damped Newton on `∇f(x) = ξ` from one start.
    fn newton(&self, xi: &[Complex64], start: CVec, cfg: &NewtonConfig) -> (CVec, f64) {
        let target = cfg.tolerance * norm(xi).max(1.0);
        let mut x = start;
        let mut r = sub(&self.gradient(&x), xi);
        let mut res = norm(&r);
        for _ in 0..cfg.max_iterations {
            if res <= target {
                break;
            }
            let Some(step) = solve(&self.hessian(&x), &r) else {
                break;
            };
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..=30 {
                let trial: CVec = x.iter().zip(&step).map(|(a, s)| a - s * t).collect();
                let tr = sub(&self.gradient(&trial), xi);
                let tres = norm(&tr);
                if tres < res {
                    x = trial;
                    r = tr;
                    res = tres;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (x, res)
    }

    /// Multistart inversion of the gradient map; the first start is `ξ`
    /// itself, then random complex Gaussians scaled like `|ξ|^{1/(p-1)}`.
    pub fn invert(&self, xi: &[Complex64], cfg: &NewtonConfig) -> Result<Inversion, LegendreError> {
        let starts = std::iter::once(xi.to_vec());
        self.invert_from(xi, starts, cfg)
    }

    /// As [`GradientMap::invert`], trying the given starts before the random
    /// ones.
    pub fn invert_from<I: IntoIterator<Item = CVec>>(
        &self,
        xi: &[Complex64],
        first: I,
        cfg: &NewtonConfig,
    ) -> Result<Inversion, LegendreError> {
        cfg.validate()?;
        self.check_len(xi)?;
        if self.degree < 2 {
            return Err(LegendreError::DegreeOne(self.degree));
        }
        let n = self.nvars();
        let target = cfg.tolerance * norm(xi).max(1.0);
        let radius = norm(xi).powf(1.0 / (self.degree as f64 - 1.0)).max(1e-3) / (n as f64).sqrt();
        let random = (0..cfg.restarts).map(|k| {
            let mut rng = sample_rng(cfg.seed, k as u64);
            complex_gaussian(&mut rng, n, radius)
        });
        let mut best = f64::INFINITY;
        for (k, start) in first.into_iter().chain(random).enumerate() {
            let (x, res) = self.newton(xi, start, cfg);
            if res <= target {
                return Ok(Inversion {
                    singular: self.is_singular(&x),
                    x,
                    residual: res,
                    start: k,
                });
            }
            if res.is_finite() {
                best = best.min(res);
            }
        }
        Err(LegendreError::NoConvergence { best_residual: best })
    }
}

pub fn legendre_map(f: &HomogeneousPolynomial, x: &[Complex64]) -> Result<LegendrePoint, LegendreError> {
    let g = GradientMap::new(f)?;
    g.check_len(x)?;
    let xi = g.gradient(x);
    Ok(LegendrePoint {
        f_value: g.value(x),
        f_dual_value: g.dual_at(x, &xi),
        x: x.to_vec(),
        xi,
    })
}

pub fn legendre_invert(
    f: &HomogeneousPolynomial,
    xi: &[Complex64],
    cfg: &NewtonConfig,
) -> Result<Inversion, LegendreError> {
    GradientMap::new(f)?.invert(xi, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualValue {
    pub value: Complex64,
    pub inversion: Inversion,
    /// `|value - (p-1) f(x)|` at the preimage found.
    pub homogeneity_gap: f64,
}

/// `f∨(ξ)` on the branch Newton lands on.
pub fn dual_value(
    f: &HomogeneousPolynomial,
    xi: &[Complex64],
    cfg: &NewtonConfig,
) -> Result<DualValue, LegendreError> {
    let g = GradientMap::new(f)?;
    let inv = g.invert(xi, cfg)?;
    Ok(finish_dual(&g, xi, inv))
}

/// `f∨(ξ)` on the branch through `hint`: Newton starts at `hint`, so for
/// `hint` near a preimage of `ξ` that preimage is found.
pub fn dual_value_near(
    f: &HomogeneousPolynomial,
    xi: &[Complex64],
    hint: &[Complex64],
    cfg: &NewtonConfig,
) -> Result<DualValue, LegendreError> {
    let g = GradientMap::new(f)?;
    g.check_len(hint)?;
    let inv = g.invert_from(xi, std::iter::once(hint.to_vec()), cfg)?;
    Ok(finish_dual(&g, xi, inv))
}

fn finish_dual(g: &GradientMap, xi: &[Complex64], inversion: Inversion) -> DualValue {
    let value = g.dual_at(&inversion.x, xi);
    let expected = g.value(&inversion.x) * (g.degree as f64 - 1.0);
    DualValue {
        value,
        homogeneity_gap: (value - expected).norm(),
        inversion,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvolutionReport {
    /// `x ↦ ∇f(x) ↦ ∇f∨`, compared with `x` up to scale.
    pub primal_residual: f64,
    /// `ξ ↦ ∇f∨(ξ) ↦ ∇f`, compared with `ξ` up to scale.
    pub dual_residual: f64,
    pub samples: usize,
    /// Samples skipped because the Hessian was nearly degenerate.
    pub skipped: usize,
}

/// Distance from `a` to the complex line through `b`, relative to `|a|`.
pub fn projective_residual(a: &[Complex64], b: &[Complex64]) -> f64 {
    let bb: f64 = norm(b).powi(2);
    let coeff = crate::numeric::hdot(b, a) / bb;
    let r: CVec = a.iter().zip(b).map(|(x, y)| x - coeff * y).collect();
    norm(&r) / norm(a)
}

/// `∇f∨` at `ξ` by central differences of the branch through `x`, where
/// `∇f(x) = ξ`.
pub fn dual_gradient_fd(
    g: &GradientMap,
    xi: &[Complex64],
    x: &[Complex64],
    cfg: &NewtonConfig,
) -> Result<CVec, LegendreError> {
    let h = 1e-5 * norm(xi).max(1e-300);
    let mut out = Vec::with_capacity(xi.len());
    for i in 0..xi.len() {
        let mut vals = [Complex64::new(0.0, 0.0); 2];
        for (slot, sign) in [1.0, -1.0].into_iter().enumerate() {
            let mut shifted = xi.to_vec();
            shifted[i] += sign * h;
            let inv = g.invert_from(&shifted, std::iter::once(x.to_vec()), cfg)?;
            vals[slot] = g.dual_at(&inv.x, &shifted);
        }
        out.push((vals[0] - vals[1]) / (2.0 * h));
    }
    Ok(out)
}

/// Checks both compositions of gradient maps on seeded random points.
pub fn involution_check(
    f: &HomogeneousPolynomial,
    samples: usize,
    cfg: &NewtonConfig,
) -> Result<InvolutionReport, LegendreError> {
    let g = GradientMap::new(f)?;
    if f.degree() < 2 {
        return Err(LegendreError::DegreeOne(f.degree()));
    }
    let n = g.nvars();
    let mut primal: f64 = 0.0;
    let mut dual: f64 = 0.0;
    let mut skipped = 0;
    let mut used = 0;
    let mut k = 0u64;
    while used < samples && k < 20 * samples as u64 + 20 {
        let mut rng = sample_rng(cfg.seed ^ 0x1e6e_d7e5, k);
        k += 1;
        let x = complex_gaussian(&mut rng, n, 1.0);
        if g.is_singular(&x) {
            skipped += 1;
            continue;
        }
        let xi = g.gradient(&x);
        let back = dual_gradient_fd(&g, &xi, &x, cfg)?;
        primal = primal.max(projective_residual(&back, &x));

        // ξ-side: start from an independent ξ, find a preimage, go back.
        let eta = complex_gaussian(&mut rng, n, 1.0);
        let inv = match g.invert(&eta, cfg) {
            Ok(inv) if !inv.singular => inv,
            _ => {
                skipped += 1;
                continue;
            }
        };
        let y = dual_gradient_fd(&g, &eta, &inv.x, cfg)?;
        dual = dual.max(projective_residual(&g.gradient(&y), &eta));
        used += 1;
    }
    Ok(InvolutionReport {
        primal_residual: primal,
        dual_residual: dual,
        samples: used,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    /// `max |f∨(∇f(x)) - (p-1) f(x)| / (1 + |f(x)|)` over generic samples.
    pub max_relation_gap: f64,
    /// `max |f∨(∇f(x))|` over samples on `{f = 0}`.
    pub max_zero_set_value: f64,
    pub samples: usize,
    pub zero_set_samples: usize,
}

/// Checks `f∨(∇f(x)) = (p-1) f(x)` at seeded generic points, inverting from
/// a start perturbed by a relative `1e-3` so that Newton has to do work and
/// lands on the branch through `x`, and `f∨ = 0` on conormals of `{f = 0}`.
pub fn homogeneous_relation_check(
    f: &HomogeneousPolynomial,
    samples: usize,
    cfg: &NewtonConfig,
) -> Result<RelationReport, LegendreError> {
    if f.degree() < 2 {
        return Err(LegendreError::DegreeOne(f.degree()));
    }
    let g = GradientMap::new(f)?;
    let n = g.nvars();
    let p = g.degree() as f64;
    let mut gap: f64 = 0.0;
    let mut used = 0;
    let mut k = 0u64;
    while used < samples && k < 20 * samples as u64 + 20 {
        let mut rng = sample_rng(cfg.seed ^ 0x5e1a_7104, k);
        k += 1;
        let x = complex_gaussian(&mut rng, n, 1.0);
        if g.is_singular(&x) {
            continue;
        }
        let xi = g.gradient(&x);
        let hint: CVec = x.iter().map(|z| z * 1.001).collect();
        let inv = g.invert_from(&xi, std::iter::once(hint), cfg)?;
        let value = g.dual_at(&inv.x, &xi);
        let fx = g.value(&x);
        gap = gap.max((value - fx * (p - 1.0)).norm() / (1.0 + fx.norm()));
        used += 1;
    }
    let zeros = crate::numeric::sample_zero_set(f, samples, cfg.seed ^ 0x2e70, 1e-3);
    let mut zero_value: f64 = 0.0;
    for x in &zeros {
        let xi = g.gradient(x);
        let hint: CVec = x.iter().map(|z| z * 1.001).collect();
        let inv = g.invert_from(&xi, std::iter::once(hint), cfg)?;
        zero_value = zero_value.max(g.dual_at(&inv.x, &xi).norm());
    }
    Ok(RelationReport {
        max_relation_gap: gap,
        max_zero_set_value: zero_value,
        samples: used,
        zero_set_samples: zeros.len(),
    })
}

/// Conjugate exponent and degree of the dual of the Fermat hypersurface of
/// degree `p` in `P^n`.
pub fn fermat_dual(p: u32, n: u32) -> Result<(Q, u64), LegendreError> {
    if p < 2 {
        return Err(LegendreError::DegreeOne(p));
    }
    let q = BigRational::new(p.into(), (p - 1).into());
    let deg = p as u64 * (p as u64 - 1).pow(n.saturating_sub(1));
    Ok((q, deg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn form(s: &str, n: usize) -> HomogeneousPolynomial {
        HomogeneousPolynomial::parse(s, n).unwrap()
    }

    #[test]
    fn map_examples() {
        let f = form("x0*x1", 2);
        let p = legendre_map(&f, &[c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(p.xi, vec![c(3.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(p.f_dual_value, c(6.0, 0.0));
        let q = form("x0*x2 - x1^2", 3);
        let p = legendre_map(&q, &[c(1.0, 0.0); 3]).unwrap();
        assert_eq!(p.xi, vec![c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(p.f_dual_value, c(0.0, 0.0));
        assert!(matches!(
            legendre_map(&q, &[c(1.0, 0.0)]),
            Err(LegendreError::DimensionMismatch { expected: 3, found: 1 })
        ));
    }

    #[test]
    fn inversion_examples() {
        let cfg = NewtonConfig::default();
        let f = form("x0*x1", 2);
        let inv = legendre_invert(&f, &[c(3.0, 0.0), c(2.0, 0.0)], &cfg).unwrap();
        assert!((inv.x[0] - c(2.0, 0.0)).norm() < 1e-14 && (inv.x[1] - c(3.0, 0.0)).norm() < 1e-14);
        let q = form("x0*x2 - x1^2", 3);
        let inv = legendre_invert(&q, &[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)], &cfg).unwrap();
        assert!(inv.residual <= 1e-12);
        assert!(sub(&inv.x, &[c(1.0, 0.0); 3]).iter().all(|z| z.norm() < 1e-12));
        let cube = form("x0^3", 1);
        let inv = legendre_invert(&cube, &[c(0.0, 0.0)], &cfg).unwrap();
        assert!(inv.singular && inv.x[0].norm() == 0.0);
        let line = form("x0 + x1", 2);
        assert_eq!(
            legendre_invert(&line, &[c(1.0, 0.0), c(1.0, 0.0)], &cfg),
            Err(LegendreError::DegreeOne(1))
        );
    }

    #[test]
    fn dual_value_examples() {
        let cfg = NewtonConfig::default();
        let v = dual_value(&form("x0*x1", 2), &[c(2.0, 0.0), c(3.0, 0.0)], &cfg).unwrap();
        assert!((v.value - c(6.0, 0.0)).norm() < 1e-12);
        let cone = form("x0^2 - x1^2 - x2^2", 3);
        let x = [c(1.0, 0.0), c(0.6, 0.0), c(0.8, 0.0)];
        let xi = legendre_map(&cone, &x).unwrap().xi;
        assert!(dual_value(&cone, &xi, &cfg).unwrap().value.norm() < 1e-9);
        let zero = dual_value(&form("x0^3 - x1^2*x2", 3), &[c(0.0, 0.0); 3], &cfg).unwrap();
        assert_eq!(zero.value, c(0.0, 0.0));
    }

    #[test]
    fn branches_differ_for_cubics() {
        // ξ = ∇f(x) has the preimage x and also (-x0, x1, x2) etc.
        let f = form("x0^3 - x1^2*x2", 3);
        let x = [c(0.7, 0.2), c(-0.4, 0.9), c(1.1, -0.3)];
        let g = GradientMap::new(&f).unwrap();
        let xi = g.gradient(&x);
        let flipped = [-x[0], x[1], x[2]];
        assert!(sub(&g.gradient(&flipped), &xi).iter().all(|z| z.norm() < 1e-14));
        assert!((g.dual_at(&x, &xi) - g.dual_at(&flipped, &xi)).norm() > 0.1);
        let cfg = NewtonConfig { seed: 5, ..NewtonConfig::default() };
        let hint: CVec = x.iter().map(|z| z * 1.001).collect();
        let near = dual_value_near(&f, &xi, &hint, &cfg).unwrap();
        assert!((near.value - g.value(&x) * 2.0).norm() < 1e-9);
    }

    #[test]
    fn involution_quadrics() {
        let cfg = NewtonConfig { seed: 1, ..NewtonConfig::default() };
        let r = involution_check(&form("x0*x1", 2), 100, &cfg).unwrap();
        assert!(r.primal_residual <= 1e-9 && r.dual_residual <= 1e-9, "{r:?}");
        let r = involution_check(&form("x0*x2 - x1^2", 3), 100, &cfg).unwrap();
        assert!(r.primal_residual <= 1e-8 && r.dual_residual <= 1e-8, "{r:?}");
        assert_eq!(r.samples, 100);
        assert_eq!(
            involution_check(&form("x0", 1), 5, &cfg),
            Err(LegendreError::DegreeOne(1))
        );
    }

    #[test]
    fn involution_cubic() {
        let cfg = NewtonConfig { seed: 2, ..NewtonConfig::default() };
        let r = involution_check(&form("x0^3 + x1^3 + x2^3", 3), 20, &cfg).unwrap();
        assert!(r.primal_residual <= 1e-7 && r.dual_residual <= 1e-7, "{r:?}");
    }

    #[test]
    fn relation_holds_on_branch() {
        let cfg = NewtonConfig { seed: 3, ..NewtonConfig::default() };
        for (text, n) in [("x0*x1", 2), ("x0*x2 - x1^2", 3), ("x0^3 - x1^2*x2", 3)] {
            let r = homogeneous_relation_check(&form(text, n), 30, &cfg).unwrap();
            assert_eq!(r.samples, 30);
            assert!(r.zero_set_samples > 0);
            assert!(r.max_relation_gap <= 1e-9, "{text}: {r:?}");
            assert!(r.max_zero_set_value <= 1e-9, "{text}: {r:?}");
        }
    }

    #[test]
    fn fermat_examples() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(fermat_dual(2, 3).unwrap(), (q(2, 1), 2));
        assert_eq!(fermat_dual(3, 2).unwrap(), (q(3, 2), 6));
        assert_eq!(fermat_dual(4, 2).unwrap(), (q(4, 3), 12));
        assert!(fermat_dual(1, 2).is_err());
    }
}
