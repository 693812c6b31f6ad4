//! Floating-point helpers shared by the numerical modules: seeded sampling,
//! complex vectors, univariate root finding and small dense solves.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::exactpoly::{q_to_f64, HomogeneousPolynomial, MultiPoly};

pub type CVec = Vec<Complex64>;

/// Independent, reproducible stream for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Gaussian vector with independent N(0, scale^2) real and
/// imaginary parts.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, len: usize, scale: f64) -> CVec {
    (0..len)
        .map(|_| Complex64::new(scale * gaussian(rng), scale * gaussian(rng)))
        .collect()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// Bilinear pairing `sum a_i b_i` (no conjugation).
pub fn pair(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hermitian inner product `sum conj(a_i) b_i`.
pub fn hdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn scale(v: &[Complex64], s: Complex64) -> CVec {
    v.iter().map(|z| z * s).collect()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> CVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> CVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    norm(&sub(a, b))
}

/// A polynomial with its coefficients rounded to `f64`, for repeated
/// evaluation at complex points.
#[derive(Debug, Clone)]
pub struct FloatPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, f64)>,
}

impl FloatPoly {
    pub fn new(p: &MultiPoly) -> Self {
        Self {
            nvars: p.nvars(),
            terms: p.terms().map(|(e, c)| (e.clone(), q_to_f64(c))).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = Complex64::new(*c, 0.0);
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }
}

/// Solves `a x = b` by LU with partial pivoting; `None` if singular.
pub fn solve(a: &DMatrix<Complex64>, b: &[Complex64]) -> Option<CVec> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    a.clone()
        .lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .filter(|x: &CVec| x.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
}

fn horner(coeffs: &[Complex64], t: Complex64) -> (Complex64, Complex64) {
    // coefficients lowest degree first; returns (p(t), p'(t))
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

/// All complex roots of `sum coeffs[k] t^k` by Aberth–Ehrlich iteration,
/// each polished with a few Newton steps. Trailing zero coefficients are
/// ignored.
pub fn polynomial_roots(coeffs: &[Complex64]) -> CVec {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().map(|z| z.norm() == 0.0).unwrap_or(false) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|z| z / lead).collect();
    // Cauchy bound for the initial circle.
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
    let mut roots: CVec = (0..deg)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64;
            Complex64::from_polar(0.5 * radius, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = horner(&monic, roots[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (roots[i] - roots[j]))
                .sum();
            let step = ratio / (1.0 - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                roots[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + roots[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&monic, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            *r -= step;
        }
    }
    roots
}

/// Coefficients (lowest first) of the degree-`deg` polynomial `g` from its
/// values on a circle of radius `r`, via the discrete Fourier transform.
pub fn interpolate_on_circle<F: Fn(Complex64) -> Complex64>(g: F, deg: usize, r: f64) -> CVec {
    let m = deg + 1;
    let nodes: CVec = (0..m)
        .map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / m as f64))
        .collect();
    let vals: CVec = nodes.iter().map(|&t| g(t)).collect();
    (0..m)
        .map(|j| {
            let s: Complex64 = (0..m)
                .map(|k| {
                    vals[k]
                        * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64)
                })
                .sum();
            s / (m as f64 * r.powi(j as i32))
        })
        .collect()
}

/// Points on the zero set of `f` (normalized to unit length), cut out by
/// random complex lines and polished with Newton steps along each line.
/// Points whose gradient norm falls below `grad_floor` are skipped, which
/// keeps samples away from singular points.
pub fn sample_zero_set(
    f: &HomogeneousPolynomial,
    count: usize,
    seed: u64,
    grad_floor: f64,
) -> Vec<CVec> {
    let n = f.nvars();
    let d = f.degree() as usize;
    let grad = match f.gradient() {
        Ok(g) => g,
        Err(_) => return Vec::new(),
    };
    let eval_grad = |x: &[Complex64]| -> CVec {
        grad.iter().map(|g| g.as_poly().eval_complex(x)).collect()
    };
    let mut out = Vec::with_capacity(count);
    let mut line = 0u64;
    while out.len() < count && line < 50 * count as u64 + 100 {
        let mut rng = sample_rng(seed, line);
        line += 1;
        let a = complex_gaussian(&mut rng, n, 1.0);
        let b = complex_gaussian(&mut rng, n, 1.0);
        let on_line = |t: Complex64| -> CVec { add(&a, &scale(&b, t)) };
        let g = |t: Complex64| f.as_poly().eval_complex(&on_line(t));
        let coeffs = interpolate_on_circle(g, d, 1.0);
        for mut t in polynomial_roots(&coeffs) {
            for _ in 0..4 {
                let x = on_line(t);
                let val = f.as_poly().eval_complex(&x);
                let slope = pair(&eval_grad(&x), &b);
                if slope.norm() == 0.0 {
                    break;
                }
                t -= val / slope;
            }
            let x = on_line(t);
            let nx = norm(&x);
            if !(nx.is_finite() && nx > 0.0) {
                continue;
            }
            let x = scale(&x, Complex64::new(1.0 / nx, 0.0));
            if norm(&eval_grad(&x)) < grad_floor {
                continue;
            }
            out.push(x);
            if out.len() == count {
                break;
            }
        }
    }
    out
}

/// Multiplies by a unit phase so that the first coordinate with modulus
/// above `eps` becomes real and positive; returns the phase used.
pub fn gauge_phase(v: &[Complex64], eps: f64) -> Complex64 {
    match v.iter().find(|z| z.norm() > eps) {
        Some(z) => z.conj() / z.norm(),
        None => Complex64::new(1.0, 0.0),
    }
}
