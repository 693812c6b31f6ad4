//! The hyperkähler quotient model of `T*P^n`: pairs `(x, ξ)` in
//! `C^{n+1} × C^{n+1}` with `ξ(x) = 0` and `|x|² - |ξ|² = 1`, modulo
//! `(x, ξ) ~ (e^{iθ}x, e^{-iθ}ξ)`. The flop sends such a pair to the
//! opposite side, where `|ξ|² - |x|² = 1`.
//!
//! Both sides use complex moment level `ξ(x) = 0`. A point on the opposite
//! side stores the new fiber vector in `x` and the new base vector in
//! `xi`, so the roles of the two norms swap.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dualcurve::{dual_polynomial, normalized_residual, DualError};
use crate::exactpoly::HomogeneousPolynomial;
use crate::legendre::{dual_value_near, LegendreError, NewtonConfig};
use crate::numeric::{
    complex_gaussian, gaussian, gauge_phase, hdot, norm, norm_sqr, pair, sample_rng, sample_zero_set, scale,
    CVec,
};

/// Relative tolerance for `ξ(x) = 0` on input.
pub const MOMENT_TOLERANCE: f64 = 1e-12;
/// Samplers keep `|ξ|` above this.
pub const ZERO_SECTION_GAP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HkError {
    #[error("expected vectors of equal length, found {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("complex moment ξ(x) = {0} is not zero")]
    ComplexMomentNonzero(Complex64),
    #[error("no positive rescaling reaches the level set")]
    Unnormalizable,
    #[error("point lies on the zero section, where the flop is undefined")]
    ZeroSection,
    #[error("finite-difference metric is not Hermitian (residual {0:e})")]
    NumericBreakdown(f64),
    #[error("only {found} of {requested} smooth samples found on the zero set")]
    SingularSample { found: usize, requested: usize },
    #[error("invalid numeric configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Legendre(#[from] LegendreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    #[serde(rename = "M")]
    M,
    #[serde(rename = "M_prime")]
    MPrime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientPoint {
    pub x: CVec,
    pub xi: CVec,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericConfig {
    pub fd_step: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            fd_step: 1e-3,
            tolerance: 1e-8,
            samples: 100,
            seed: 0,
        }
    }
}

impl NumericConfig {
    fn validate(&self) -> Result<(), HkError> {
        if !(self.fd_step > 0.0 && self.tolerance > 0.0) {
            return Err(HkError::InvalidConfig("fd_step and tolerance must be positive".into()));
        }
        Ok(())
    }
}

fn check_lengths(x: &[Complex64], xi: &[Complex64]) -> Result<(), HkError> {
    if x.len() != xi.len() {
        return Err(HkError::DimensionMismatch(x.len(), xi.len()));
    }
    Ok(())
}

/// `(μ_J, μ_c) = (i(|x|² - |ξ|²), ξ(x))`; `μ_J` is returned as a complex
/// number with zero real part.
pub fn moment_maps(x: &[Complex64], xi: &[Complex64]) -> Result<(Complex64, Complex64), HkError> {
    check_lengths(x, xi)?;
    let mu_j = Complex64::new(0.0, norm_sqr(x) - norm_sqr(xi));
    Ok((mu_j, pair(xi, x)))
}

fn apply_phase(x: &[Complex64], xi: &[Complex64], phase: Complex64) -> (CVec, CVec) {
    (scale(x, phase), scale(xi, phase.conj()))
}

/// Rescales `(x, ξ) ↦ (t x, ξ / t)` with `t > 0` onto `|x|² - |ξ|² = 1` and
/// fixes the phase so that the first nonzero coordinate of `x` is real and
/// positive.
pub fn level_normalize(x: &[Complex64], xi: &[Complex64]) -> Result<QuotientPoint, HkError> {
    check_lengths(x, xi)?;
    let nx = norm_sqr(x);
    let nxi = norm_sqr(xi);
    let mu = pair(xi, x);
    if mu.norm() > MOMENT_TOLERANCE * (nx * nxi).sqrt().max(1.0) {
        return Err(HkError::ComplexMomentNonzero(mu));
    }
    if nx == 0.0 {
        return Err(HkError::Unnormalizable);
    }
    // u = t² solves u² |x|² - u - |ξ|² = 0.
    let u = (1.0 + (1.0 + 4.0 * nx * nxi).sqrt()) / (2.0 * nx);
    let t = u.sqrt();
    let xs: CVec = x.iter().map(|z| z * t).collect();
    let xis: CVec = xi.iter().map(|z| z / t).collect();
    let phase = gauge_phase(&xs, 1e-300);
    let (x, xi) = apply_phase(&xs, &xis, phase);
    Ok(QuotientPoint { x, xi, side: Side::M })
}

/// Unit representative of the base point: `x (1 + |ξ|²)^{-1/2}` on `M`,
/// and `ξ (1 + |x|²)^{-1/2}` (a point of the dual projective space) on the
/// opposite side.
pub fn to_base(p: &QuotientPoint) -> CVec {
    match p.side {
        Side::M => scale(&p.x, Complex64::new((1.0 + norm_sqr(&p.xi)).powf(-0.5), 0.0)),
        Side::MPrime => scale(&p.xi, Complex64::new((1.0 + norm_sqr(&p.x)).powf(-0.5), 0.0)),
    }
}

/// The ambient formula `(x, ξ) ↦ (|ξ|/|x| · x, |x|/|ξ| · ξ)`, without gauge
/// fixing.
pub fn flop_ambient(x: &[Complex64], xi: &[Complex64]) -> (CVec, CVec) {
    let (a, b) = (norm(x), norm(xi));
    (
        x.iter().map(|z| z * (b / a)).collect(),
        xi.iter().map(|z| z * (a / b)).collect(),
    )
}

/// The flop. From `M` the result stores `x' = |ξ|/|x| · x` and
/// `ξ' = |x|/|ξ| · ξ`; from the opposite side the same formula returns to
/// `M`. The gauge is fixed on the base vector of the target side.
pub fn flop(p: &QuotientPoint) -> Result<QuotientPoint, HkError> {
    let fiber = match p.side {
        Side::M => &p.xi,
        Side::MPrime => &p.x,
    };
    if norm(fiber) == 0.0 {
        return Err(HkError::ZeroSection);
    }
    let (x, xi) = flop_ambient(&p.x, &p.xi);
    Ok(match p.side {
        Side::M => {
            let phase = gauge_phase(&xi, 1e-300).conj();
            let (x, xi) = apply_phase(&x, &xi, phase);
            QuotientPoint { x, xi, side: Side::MPrime }
        }
        Side::MPrime => {
            let phase = gauge_phase(&x, 1e-300);
            let (x, xi) = apply_phase(&x, &xi, phase);
            QuotientPoint { x, xi, side: Side::M }
        }
    })
}

/// `x ⊗ ξ`, entry `(i, j) = x_i ξ_j`. The flop commutes with this map.
pub fn blowdown(p: &QuotientPoint) -> DMatrix<Complex64> {
    let n = p.x.len();
    DMatrix::from_fn(n, n, |i, j| p.x[i] * p.xi[j])
}

/// Distance between two points of the same side after aligning phases.
pub fn phase_aligned_distance(a: &QuotientPoint, b: &QuotientPoint) -> f64 {
    let mut va = a.x.clone();
    va.extend(a.xi.iter().map(|z| z.conj()));
    let mut vb = b.x.clone();
    vb.extend(b.xi.iter().map(|z| z.conj()));
    // (e^{iθ}x, e^{-iθ}ξ) acts as a scalar on (x, conj ξ).
    let h = hdot(&vb, &va);
    let phase = if h.norm() > 0.0 { h / h.norm() } else { Complex64::new(1.0, 0.0) };
    let d: CVec = va.iter().zip(&vb).map(|(p, q)| p - q * phase).collect();
    norm(&d)
}

/// Residuals of the two level constraints on the point's side.
pub fn level_residual(p: &QuotientPoint) -> f64 {
    let real = match p.side {
        Side::M => norm_sqr(&p.x) - norm_sqr(&p.xi) - 1.0,
        Side::MPrime => norm_sqr(&p.xi) - norm_sqr(&p.x) - 1.0,
    };
    real.abs().max(pair(&p.xi, &p.x).norm())
}

/// Random point of `M` with `|ξ|` at least [`ZERO_SECTION_GAP`].
pub fn random_level_point(n: usize, seed: u64, index: u64) -> QuotientPoint {
    let mut attempt = 0u64;
    loop {
        let mut rng = sample_rng(seed, index.wrapping_mul(64).wrapping_add(attempt));
        attempt += 1;
        let x = complex_gaussian(&mut rng, n + 1, 1.0);
        let mut xi = complex_gaussian(&mut rng, n + 1, 1.0);
        let c = pair(&xi, &x) / norm_sqr(&x);
        for (e, z) in xi.iter_mut().zip(&x) {
            *e -= c * z.conj();
        }
        if let Ok(p) = level_normalize(&x, &xi) {
            if norm(&p.xi) >= ZERO_SECTION_GAP {
                return p;
            }
        }
    }
}

/// Chart `(z, ζ)` of `T*P^n` near `[1, 0, …, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CotangentChart {
    pub z: CVec,
    pub zeta: CVec,
}

/// `√(1+4t) - log(1 + √(1+4t))`.
pub fn fiber_potential(t: f64) -> f64 {
    let s = (1.0 + 4.0 * t).sqrt();
    s - (1.0 + s).ln()
}

/// `t = (1 + |z|²)(|ζ|² + |z·ζ|²)` with the bilinear pairing `z·ζ`.
pub fn calabi_t(c: &CotangentChart) -> f64 {
    (1.0 + norm_sqr(&c.z)) * (norm_sqr(&c.zeta) + pair(&c.z, &c.zeta).norm_sqr())
}

/// `log(1 + |z|²) + f(t)`.
pub fn calabi_potential(c: &CotangentChart) -> f64 {
    (1.0 + norm_sqr(&c.z)).ln() + fiber_potential(calabi_t(c))
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricSample {
    pub min_eigenvalue: f64,
    pub det: f64,
    pub hermitian_residual: f64,
    #[serde(skip)]
    pub metric: DMatrix<Complex64>,
}

fn real_coords(c: &CotangentChart) -> Vec<f64> {
    c.z.iter()
        .chain(&c.zeta)
        .flat_map(|w| [w.re, w.im])
        .collect()
}

fn from_real(v: &[f64], n: usize) -> CotangentChart {
    let w: CVec = v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    CotangentChart {
        z: w[..n].to_vec(),
        zeta: w[n..].to_vec(),
    }
}

/// Second derivative `∂_a ∂_b K` by central differences with step `h`.
fn second_difference<F: Fn(&[f64]) -> f64>(k: &F, v: &[f64], a: usize, b: usize, h: f64) -> f64 {
    let at = |da: f64, db: f64| {
        let mut w = v.to_vec();
        w[a] += da;
        w[b] += db;
        k(&w)
    };
    if a == b {
        (at(h, 0.0) - 2.0 * k(v) + at(-h, 0.0)) / (h * h)
    } else {
        (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h)
    }
}

/// `g_{ij̄} = ∂²K / ∂w_i ∂w̄_j` in the holomorphic coordinates `w = (z, ζ)`,
/// from Richardson-extrapolated central differences of the real Hessian.
pub fn calabi_metric(c: &CotangentChart, cfg: &NumericConfig) -> Result<MetricSample, HkError> {
    cfg.validate()?;
    check_lengths(&c.z, &c.zeta)?;
    let n = c.z.len();
    let m = 2 * n;
    let v = real_coords(c);
    let k = |w: &[f64]| calabi_potential(&from_real(w, n));
    let h = cfg.fd_step;
    let hess = |a: usize, b: usize| {
        let d1 = second_difference(&k, &v, a, b, h);
        let d2 = second_difference(&k, &v, a, b, 2.0 * h);
        (4.0 * d1 - d2) / 3.0
    };
    let mut real = vec![vec![0.0; 2 * m]; 2 * m];
    for a in 0..2 * m {
        for b in 0..2 * m {
            real[a][b] = hess(a, b);
        }
    }
    let g = DMatrix::from_fn(m, m, |i, j| {
        let (ai, bi, aj, bj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        Complex64::new(
            real[ai][aj] + real[bi][bj],
            real[ai][bj] - real[bi][aj],
        ) * 0.25
    });
    let herm = (&g - g.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let scale = g.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    if herm > cfg.tolerance * scale {
        return Err(HkError::NumericBreakdown(herm));
    }
    let sym = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.clone().symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let det = sym.determinant().re;
    Ok(MetricSample {
        min_eigenvalue,
        det,
        hermitian_residual: herm,
        metric: g,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CalabiReport {
    pub n: usize,
    pub samples: Vec<MetricSample>,
    pub max_hermitian_residual: f64,
    pub min_eigenvalue: f64,
    /// `(max det - min det) / |mean det|`.
    pub det_spread: f64,
    pub mean_det: f64,
}

/// Chart points with coordinates drawn from complex Gaussians; the first
/// sample is the origin.
pub fn calabi_check(n: usize, cfg: &NumericConfig) -> Result<CalabiReport, HkError> {
    let samples: Vec<MetricSample> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let chart = if i == 0 {
                CotangentChart {
                    z: vec![Complex64::new(0.0, 0.0); n],
                    zeta: vec![Complex64::new(0.0, 0.0); n],
                }
            } else {
                let mut rng = sample_rng(cfg.seed, i);
                CotangentChart {
                    z: complex_gaussian(&mut rng, n, 0.7),
                    zeta: complex_gaussian(&mut rng, n, 0.7),
                }
            };
            calabi_metric(&chart, cfg)
        })
        .collect::<Result<_, _>>()?;
    let dets: Vec<f64> = samples.iter().map(|s| s.det).collect();
    let mean = dets.iter().sum::<f64>() / dets.len().max(1) as f64;
    let spread = (dets.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - dets.iter().cloned().fold(f64::INFINITY, f64::min))
        / mean.abs();
    Ok(CalabiReport {
        n,
        max_hermitian_residual: samples.iter().map(|s| s.hermitian_residual).fold(0.0, f64::max),
        min_eigenvalue: samples.iter().map(|s| s.min_eigenvalue).fold(f64::INFINITY, f64::min),
        det_spread: if samples.is_empty() { 0.0 } else { spread },
        mean_det: mean,
        samples,
    })
}

/// Orthonormal real basis (in `R^{4(n+1)}`, coordinates `Re x, Im x, Re ξ,
/// Im ξ` interleaved per entry) of the level-set tangents orthogonal to the
/// circle orbit.
fn horizontal_basis(x: &[Complex64], xi: &[Complex64]) -> Vec<Vec<f64>> {
    let m = x.len();
    let dim = 4 * m;
    let pack = |dx: &[Complex64], dxi: &[Complex64]| -> Vec<f64> {
        dx.iter().chain(dxi).flat_map(|z| [z.re, z.im]).collect()
    };
    // Real gradients of Re ξ(x), Im ξ(x), |x|² - |ξ|², and the orbit (ix, -iξ).
    let conj = |v: &[Complex64]| -> CVec { v.iter().map(|z| z.conj()).collect() };
    let re_mu = pack(&conj(xi), &conj(x));
    let i = Complex64::i();
    let im_mu = pack(&scale(&conj(xi), -i), &scale(&conj(x), -i));
    let level = pack(&scale(x, Complex64::new(2.0, 0.0)), &scale(xi, Complex64::new(-2.0, 0.0)));
    let orbit = pack(&scale(x, i), &scale(xi, -i));
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let add = |v: Vec<f64>, ortho: &mut Vec<Vec<f64>>| -> Option<Vec<f64>> {
        let mut w = v;
        for _ in 0..2 {
            for o in ortho.iter() {
                let d: f64 = w.iter().zip(o).map(|(a, b)| a * b).sum();
                for (a, b) in w.iter_mut().zip(o) {
                    *a -= d * b;
                }
            }
        }
        let nw = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nw > 1e-8 {
            let u: Vec<f64> = w.iter().map(|a| a / nw).collect();
            ortho.push(u.clone());
            Some(u)
        } else {
            None
        }
    };
    for v in [re_mu, im_mu, level, orbit] {
        add(v, &mut ortho);
    }
    let mut basis = Vec::new();
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        if let Some(u) = add(e, &mut ortho) {
            basis.push(u);
        }
    }
    basis
}

fn unpack(v: &[f64], m: usize) -> (CVec, CVec) {
    let w: CVec = v.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    (w[..m].to_vec(), w[m..].to_vec())
}

/// Holomorphic form `Σ (u_x v_ξ - v_x u_ξ)` on packed real tangent vectors.
fn omega(u: &[f64], v: &[f64], m: usize) -> Complex64 {
    let (ux, uxi) = unpack(u, m);
    let (vx, vxi) = unpack(v, m);
    pair(&ux, &vxi) - pair(&vx, &uxi)
}

fn flop_packed(p: &[f64], m: usize) -> Vec<f64> {
    let (x, xi) = unpack(p, m);
    let (a, b) = flop_ambient(&x, &xi);
    a.iter().chain(&b).flat_map(|z| [z.re, z.im]).collect()
}

/// Pullback discrepancy `max |Ω'(dΦ u, dΦ v) - Ω(u, v)|` at one point.
pub fn pullback_residual(p: &QuotientPoint, h: f64) -> f64 {
    let m = p.x.len();
    let base: Vec<f64> = p.x.iter().chain(&p.xi).flat_map(|z| [z.re, z.im]).collect();
    let basis = horizontal_basis(&p.x, &p.xi);
    let shifted = |v: &[f64], t: f64| -> Vec<f64> {
        let q: Vec<f64> = base.iter().zip(v).map(|(a, b)| a + t * b).collect();
        flop_packed(&q, m)
    };
    let push: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| {
            let (p1, m1, p2, m2) = (shifted(v, h), shifted(v, -h), shifted(v, 2.0 * h), shifted(v, -2.0 * h));
            (0..base.len())
                .map(|k| {
                    let d1 = (p1[k] - m1[k]) / (2.0 * h);
                    let d2 = (p2[k] - m2[k]) / (4.0 * h);
                    (4.0 * d1 - d2) / 3.0
                })
                .collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let before = omega(&basis[i], &basis[j], m);
            let after = omega(&push[i], &push[j], m);
            worst = worst.max((after - before).norm());
        }
    }
    worst
}

pub fn symplectic_pullback_check(n: usize, cfg: &NumericConfig) -> Result<f64, HkError> {
    cfg.validate()?;
    Ok((0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| pullback_residual(&random_level_point(n, cfg.seed, i), cfg.fd_step))
        .reduce(|| 0.0, f64::max))
}

#[derive(Debug, Clone, Serialize)]
pub struct FlopSample {
    pub level: f64,
    pub involution: f64,
    pub symplectic: f64,
    pub blowdown: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlopReport {
    pub n: usize,
    pub max_level_residual: f64,
    pub max_involution_residual: f64,
    pub max_symplectic_residual: f64,
    /// `|π(Φ(p)) - π(p)|`, which vanishes since both equal `x ⊗ ξ`.
    pub max_blowdown_residual: f64,
    pub per_sample: Vec<FlopSample>,
}

/// Level preservation, involution and symplectic pullback at seeded level
/// points.
pub fn flop_check(n: usize, cfg: &NumericConfig) -> Result<FlopReport, HkError> {
    cfg.validate()?;
    let per_sample: Vec<FlopSample> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let p = random_level_point(n, cfg.seed, i);
            let q = flop(&p)?;
            let back = flop(&q)?;
            let bd = (blowdown(&q) - blowdown(&p)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok(FlopSample {
                level: level_residual(&q),
                involution: phase_aligned_distance(&back, &p),
                symplectic: pullback_residual(&p, cfg.fd_step),
                blowdown: bd,
            })
        })
        .collect::<Result<_, HkError>>()?;
    let max = |f: fn(&FlopSample) -> f64| per_sample.iter().map(f).fold(0.0, f64::max);
    Ok(FlopReport {
        n,
        max_level_residual: max(|s| s.level),
        max_involution_residual: max(|s| s.involution),
        max_symplectic_residual: max(|s| s.symplectic),
        max_blowdown_residual: max(|s| s.blowdown),
        per_sample,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConormalSample {
    pub x: CVec,
    /// Unit representative of the flopped base point in the dual space.
    pub dual_point: CVec,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConormalReport {
    /// `dual_polynomial` for plane curves, otherwise the Legendre dual.
    pub method: String,
    pub dual_poly: Option<String>,
    pub max_residual: f64,
    pub per_sample: Vec<ConormalSample>,
}

/// Pushes conormal covectors of `{f = 0}` through the flop and checks that
/// the resulting base points lie on the dual hypersurface.
pub fn conormal_transport(
    f: &HomogeneousPolynomial,
    samples: usize,
    cfg: &NumericConfig,
) -> Result<ConormalReport, HkError> {
    cfg.validate()?;
    let points = sample_zero_set(f, samples, cfg.seed, 1e-3);
    if points.len() < samples {
        return Err(HkError::SingularSample {
            found: points.len(),
            requested: samples,
        });
    }
    let grad = f.gradient().map_err(LegendreError::from)?;
    let p = f.degree() as f64;
    let plane = f.nvars() == 3;
    let dual = if plane { Some(dual_polynomial(f)?) } else { None };
    let newton = NewtonConfig {
        seed: cfg.seed,
        ..NewtonConfig::default()
    };
    let per_sample = points
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let g: CVec = grad.iter().map(|d| d.as_poly().eval_complex(x)).collect();
            let c = gaussian(&mut sample_rng(cfg.seed ^ 0xc0c0, i as u64)).exp();
            let point = level_normalize(x, &scale(&g, Complex64::new(c, 0.0)))?;
            let flopped = flop(&point)?;
            let y = to_base(&flopped);
            let ny = norm(&y);
            let y: CVec = y.iter().map(|z| z / ny).collect();
            let residual = match &dual {
                Some(d) => normalized_residual(&d.dual_poly, &y),
                None => {
                    // y = e^{iφ} g / |g|, so λx with λ^{p-1} = e^{iφ}/|g| is a preimage.
                    let ng = norm(&g);
                    let phase = hdot(&g, &y) / ng;
                    let lambda = (phase / ng).powf(1.0 / (p - 1.0));
                    let hint = scale(x, lambda);
                    dual_value_near(f, &y, &hint, &newton)?.value.norm()
                }
            };
            Ok(ConormalSample {
                x: x.clone(),
                dual_point: y,
                residual,
            })
        })
        .collect::<Result<Vec<_>, HkError>>()?;
    Ok(ConormalReport {
        method: if plane { "dual_polynomial" } else { "legendre_dual_value" }.to_string(),
        dual_poly: dual.map(|d| d.dual_poly.to_string()),
        max_residual: per_sample.iter().map(|s| s.residual).fold(0.0, f64::max),
        per_sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn r2() -> f64 {
        2f64.sqrt()
    }

    #[test]
    fn moment_examples() {
        let (j, m) = moment_maps(&[c(r2()), c(0.0), c(0.0)], &[c(0.0), c(1.0), c(0.0)]).unwrap();
        assert!((j - Complex64::i()).norm() < 1e-15 && m == c(0.0));
        assert_eq!(moment_maps(&[c(0.0)], &[c(0.0)]).unwrap(), (c(0.0), c(0.0)));
        let (j, m) = moment_maps(&[c(1.0), c(0.0)], &[c(1.0), c(0.0)]).unwrap();
        assert_eq!((j, m), (c(0.0), c(1.0)));
        assert!(moment_maps(&[c(1.0)], &[c(1.0), c(0.0)]).is_err());
    }

    #[test]
    fn normalize_examples() {
        let p = level_normalize(&[c(2.0), c(0.0), c(0.0)], &[c(0.0), c(1.0), c(0.0)]).unwrap();
        assert!(level_residual(&p) < 1e-14);
        // u = (1 + √17)/8
        let u = (1.0 + 17f64.sqrt()) / 8.0;
        assert!((p.x[0].re - 2.0 * u.sqrt()).abs() < 1e-14);
        let p = level_normalize(&[c(1.0), c(0.0), c(0.0)], &[c(0.0); 3]).unwrap();
        assert_eq!(p.x, vec![c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(
            level_normalize(&[c(1.0), c(0.0)], &[c(1.0), c(0.0)]),
            Err(HkError::ComplexMomentNonzero(_))
        ));
        assert_eq!(level_normalize(&[c(0.0)], &[c(1.0)]), Err(HkError::Unnormalizable));
    }

    #[test]
    fn base_and_blowdown_examples() {
        let p = QuotientPoint {
            x: vec![c(r2()), c(0.0), c(0.0)],
            xi: vec![c(0.0), c(1.0), c(0.0)],
            side: Side::M,
        };
        let y = to_base(&p);
        assert!((y[0] - c(1.0)).norm() < 1e-15 && y[1].norm() == 0.0);
        let a = blowdown(&p);
        assert!((a[(0, 1)] - c(r2())).norm() < 1e-15);
        assert_eq!(a.iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert_eq!(a.trace(), c(0.0));
        let q = QuotientPoint {
            x: vec![c(0.0), c(r2()), c(0.0)],
            xi: vec![c(1.0), c(0.0), c(0.0)],
            side: Side::M,
        };
        let y = to_base(&q);
        assert!((y[1] - c(1.0)).norm() < 1e-15);
        let zero = QuotientPoint {
            x: vec![c(1.0), c(0.0), c(0.0)],
            xi: vec![c(0.0); 3],
            side: Side::M,
        };
        assert_eq!(to_base(&zero), zero.x);
        assert!(blowdown(&zero).iter().all(|z| z.norm() == 0.0));
        assert_eq!(flop(&zero), Err(HkError::ZeroSection));
    }

    #[test]
    fn flop_example() {
        let p = QuotientPoint {
            x: vec![c(r2()), c(0.0), c(0.0)],
            xi: vec![c(0.0), c(1.0), c(0.0)],
            side: Side::M,
        };
        let q = flop(&p).unwrap();
        assert_eq!(q.side, Side::MPrime);
        assert!((q.xi[1] - c(r2())).norm() < 1e-15);
        assert!((q.x[0] - c(1.0)).norm() < 1e-15);
        assert!(level_residual(&q) < 1e-15);
        assert!(phase_aligned_distance(&flop(&q).unwrap(), &p) < 1e-15);
    }

    #[test]
    fn phase_invariance() {
        let p = random_level_point(2, 9, 0);
        let e = Complex64::from_polar(1.0, 0.7);
        let (x, xi) = apply_phase(&p.x, &p.xi, e);
        let (j0, m0) = moment_maps(&p.x, &p.xi).unwrap();
        let (j1, m1) = moment_maps(&x, &xi).unwrap();
        assert!((j0 - j1).norm() < 1e-14 && (m0 - m1).norm() < 1e-14);
        let rotated = QuotientPoint { x, xi, side: Side::M };
        assert!((blowdown(&rotated) - blowdown(&p)).iter().all(|z| z.norm() < 1e-14));
        assert!(phase_aligned_distance(&rotated, &p) < 1e-14);
        let renorm = level_normalize(&rotated.x, &rotated.xi).unwrap();
        assert!(phase_aligned_distance(&renorm, &p) < 1e-14);
        assert!((renorm.x[0] - p.x[0]).norm() < 1e-14);
    }

    #[test]
    fn potential_values() {
        let origin = CotangentChart { z: vec![c(0.0)], zeta: vec![c(0.0)] };
        assert!((calabi_potential(&origin) - (1.0 - 2f64.ln())).abs() < 1e-15);
        let fiber = CotangentChart { z: vec![c(0.0)], zeta: vec![Complex64::new(0.3, 0.4)] };
        assert!((calabi_potential(&fiber) - fiber_potential(0.25)).abs() < 1e-15);
        let e = Complex64::from_polar(1.0, 1.3);
        let p = CotangentChart { z: vec![c(0.5), Complex64::new(0.1, -0.7)], zeta: vec![c(1.0), c(-0.2)] };
        let q = CotangentChart { z: scale(&p.z, e), zeta: scale(&p.zeta, e.conj()) };
        assert!((calabi_t(&p) - calabi_t(&q)).abs() < 1e-14);
    }

    #[test]
    fn metric_at_origin() {
        let cfg = NumericConfig::default();
        let origin = CotangentChart { z: vec![c(0.0)], zeta: vec![c(0.0)] };
        let s = calabi_metric(&origin, &cfg).unwrap();
        assert!(s.min_eigenvalue > 0.0);
        assert!(s.hermitian_residual <= 1e-6);
    }

    #[test]
    fn metric_determinant_constant() {
        for n in [1, 2] {
            let cfg = NumericConfig { samples: 20, seed: 3, ..NumericConfig::default() };
            let r = calabi_check(n, &cfg).unwrap();
            assert!(r.min_eigenvalue > 0.0, "{n}");
            assert!(r.det_spread <= 1e-6, "n={n} spread {}", r.det_spread);
        }
    }

    #[test]
    fn flop_suite_small() {
        for n in [1, 2, 3] {
            let cfg = NumericConfig { samples: 20, seed: 7, ..NumericConfig::default() };
            let r = flop_check(n, &cfg).unwrap();
            assert!(r.max_level_residual <= 1e-10, "{n}: {r:?}");
            assert!(r.max_involution_residual <= 1e-10);
            assert!(r.max_symplectic_residual <= 1e-6, "{n}: {}", r.max_symplectic_residual);
            assert!(r.max_blowdown_residual <= 1e-12);
        }
    }

    #[test]
    fn conormal_conic_and_quadric() {
        let cfg = NumericConfig { seed: 4, ..NumericConfig::default() };
        for text in ["x0*x2 - x1^2", "x0^2 - x1^2 - x2^2"] {
            let f = HomogeneousPolynomial::parse(text, 3).unwrap();
            let r = conormal_transport(&f, 20, &cfg).unwrap();
            assert!(r.max_residual <= 1e-8, "{text}: {}", r.max_residual);
            assert_eq!(r.per_sample.len(), 20);
        }
    }

    #[test]
    fn conormal_cuspidal_cubic() {
        let cfg = NumericConfig { seed: 5, ..NumericConfig::default() };
        let f = HomogeneousPolynomial::parse("x0^3 - x1^2*x2", 3).unwrap();
        let r = conormal_transport(&f, 20, &cfg).unwrap();
        assert!(r.max_residual <= 1e-7, "{}", r.max_residual);
    }

    #[test]
    fn conormal_surface_uses_legendre() {
        let cfg = NumericConfig { seed: 6, ..NumericConfig::default() };
        let f = HomogeneousPolynomial::parse("x0^3 + x1^3 + x2^3 + x3^3", 4).unwrap();
        let r = conormal_transport(&f, 10, &cfg).unwrap();
        assert_eq!(r.method, "legendre_dual_value");
        assert!(r.max_residual <= 1e-8, "{}", r.max_residual);
    }
}
