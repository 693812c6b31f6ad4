//! Dual plane curves by resultant elimination, and the classical
//! Plücker/Euler-characteristic bookkeeping for plane curves.
//!
//! The curve `S = {f = 0}` lives in `P^2` with coordinates `x0, x1, x2`; its
//! dual is written in the dual coordinates, printed with the same variable
//! names `x0, x1, x2`.
//!
//! `chi_bar_formula` implements `d^2 - 3d + 2δ + 3κ` exactly as stated. For a
//! smooth curve this is `-(χ_top(S))`, i.e. the opposite sign of the
//! topological Euler characteristic `3d - d^2`. The function does not try
//! to reconcile the two conventions.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::exactpoly::{
    gcd, is_squarefree, resultant_formal, squarefree_decomposition, squarefree_part,
    HomogeneousPolynomial, MultiPoly, PolyError, Q,
};
use crate::numeric::{norm, sample_zero_set};

/// Largest curve degree accepted by the elimination.
pub const MAX_ELIMINATION_DEGREE: u32 = 4;
/// Smooth sample points used to vet each candidate factor.
pub const MEMBERSHIP_SAMPLES: usize = 20;
/// Maximum |factor(ξ)| at a unit tangent covector for a retained factor.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-8;
const MEMBERSHIP_SEED: u64 = 0x5eed_d0a1;
const SMOOTH_GRADIENT_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error("expected a form in 3 variables, found {0}")]
    NotPlaneCurve(usize),
    #[error("input is not reduced (it has a repeated factor)")]
    NonReduced,
    #[error("degree {0} exceeds the elimination limit")]
    DegreeTooLarge(u32),
    #[error("degree {0} is too small: lines and points have no dual curve")]
    DegreeTooSmall(u32),
    #[error("elimination collapsed: no factor of the resultant survives")]
    EliminationCollapse,
    #[error("invalid Plücker data: {0}")]
    InvalidTriple(String),
    #[error("dual degree {given} inconsistent with Plücker value {expected}")]
    InconsistentDualDegree { given: u32, expected: i64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Degree, node count and cusp count of a plane curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlueckerTriple {
    pub d: u32,
    pub delta: u32,
    pub kappa: u32,
}

impl PlueckerTriple {
    pub fn new(d: u32, delta: u32, kappa: u32) -> Result<Self, DualError> {
        if d == 0 {
            return Err(DualError::InvalidTriple("degree must be at least 1".into()));
        }
        let genus_bound = (d as u64 - 1) * (d as u64).saturating_sub(2) / 2;
        if delta as u64 + kappa as u64 > genus_bound {
            return Err(DualError::InvalidTriple(format!(
                "δ + κ = {} exceeds (d-1)(d-2)/2 = {genus_bound}",
                delta + kappa
            )));
        }
        Ok(Self { d, delta, kappa })
    }
}

/// `(d∨, κ∨)` from `d∨ = d(d-1) - 2δ - 3κ` and `κ∨ = 3d² - 6d - 6δ - 8κ`.
pub fn pluecker(t: PlueckerTriple) -> Result<(i64, i64), DualError> {
    if t.d < 2 {
        return Err(DualError::DegreeTooSmall(t.d));
    }
    let (d, delta, kappa) = (t.d as i64, t.delta as i64, t.kappa as i64);
    let d_dual = d * (d - 1) - 2 * delta - 3 * kappa;
    let kappa_dual = 3 * d * d - 6 * d - 6 * delta - 8 * kappa;
    Ok((d_dual, kappa_dual))
}

/// `d² - 3d + 2δ + 3κ`.
pub fn chi_bar_formula(t: PlueckerTriple) -> i64 {
    let (d, delta, kappa) = (t.d as i64, t.delta as i64, t.kappa as i64);
    d * d - 3 * d + 2 * delta + 3 * kappa
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeIdentityReport {
    pub lhs: i64,
    pub rhs: i64,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Both sides of `3 d∨ = -χ̄(S) - 2 χ̄(S∨)`. Reports; never asserts.
pub fn degree_identity_report(
    t: PlueckerTriple,
    t_dual: PlueckerTriple,
) -> Result<DegreeIdentityReport, DualError> {
    let (expected, _) = pluecker(t)?;
    if t_dual.d as i64 != expected {
        return Err(DualError::InconsistentDualDegree {
            given: t_dual.d,
            expected,
        });
    }
    let lhs = 3 * t_dual.d as i64;
    let rhs = -chi_bar_formula(t) - 2 * chi_bar_formula(t_dual);
    Ok(DegreeIdentityReport {
        lhs,
        rhs,
        matches: lhs == rhs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrippedFactor {
    pub factor: HomogeneousPolynomial,
    pub multiplicity: u32,
    /// Largest |factor(ξ)| seen over the membership samples.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualCurveResult {
    /// Squarefree, integer content 1, positive graded-lex leading term.
    pub dual_poly: HomogeneousPolynomial,
    pub dual_degree: u32,
    pub extraneous_factors_removed: Vec<StrippedFactor>,
    /// Largest membership residual over the retained factors.
    pub membership_residual: f64,
}

/// Evaluates a form at a unit covector after scaling the form to have
/// largest coefficient 1.
pub fn normalized_residual(p: &HomogeneousPolynomial, xi: &[Complex64]) -> f64 {
    let nx = norm(xi);
    let unit: Vec<Complex64> = xi.iter().map(|z| z / nx).collect();
    let scale = p.as_poly().max_abs_coeff();
    p.as_poly().eval_complex(&unit).norm() / scale
}

/// Equation of the dual curve of the reduced plane curve `f = 0`.
///
/// Working in the chart `ξ2 = 1`, the tangent line `ξ·x = 0` is eliminated
/// against `f` and against a tangency minor (resultants in `x2`), then the
/// two binary forms are eliminated in the remaining variable. Two minors
/// are used and only the common squarefree part is kept; the result must
/// vanish on tangent covectors `∇f(x)` at sampled smooth points.
pub fn dual_polynomial(f: &HomogeneousPolynomial) -> Result<DualCurveResult, DualError> {
    if f.nvars() != 3 {
        return Err(DualError::NotPlaneCurve(f.nvars()));
    }
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial.into());
    }
    let d = f.degree();
    if d < 2 {
        return Err(DualError::DegreeTooSmall(d));
    }
    if d > MAX_ELIMINATION_DEGREE {
        return Err(DualError::DegreeTooLarge(d));
    }
    if !is_squarefree(f.as_poly()) {
        return Err(DualError::NonReduced);
    }

    let (eliminant, dropped) = combined_eliminant(f)?;
    if eliminant.is_constant() {
        return Err(DualError::EliminationCollapse);
    }

    let grad = f.gradient()?;
    let covectors: Vec<Vec<Complex64>> =
        sample_zero_set(f, MEMBERSHIP_SAMPLES, MEMBERSHIP_SEED, SMOOTH_GRADIENT_FLOOR)
            .iter()
            .map(|x| grad.iter().map(|g| g.as_poly().eval_complex(x)).collect())
            .collect();
    let residual_of = |form: &HomogeneousPolynomial| {
        covectors
            .iter()
            .map(|xi| normalized_residual(form, xi))
            .fold(0.0, f64::max)
    };
    let lift = |p: &MultiPoly| -> Result<HomogeneousPolynomial, DualError> {
        let deg = p.total_degree().unwrap_or(0);
        Ok(HomogeneousPolynomial::new(p.embed(3, &[0, 1]).homogenize(2, deg))?)
    };

    let mut stripped = Vec::new();
    for (factor, multiplicity) in dropped {
        let form = lift(&factor)?;
        stripped.push(StrippedFactor {
            residual: residual_of(&form),
            factor: form.normalized(),
            multiplicity,
        });
    }
    let form = lift(&eliminant)?;
    let membership_residual = residual_of(&form);
    if covectors.is_empty() || membership_residual > MEMBERSHIP_TOLERANCE {
        return Err(DualError::EliminationCollapse);
    }
    let kept = form.into_poly();
    if kept.is_constant() {
        return Err(DualError::EliminationCollapse);
    }
    let dual_poly = HomogeneousPolynomial::new(kept)?.normalized();
    Ok(DualCurveResult {
        dual_degree: dual_poly.degree(),
        dual_poly,
        extraneous_factors_removed: stripped,
        membership_residual,
    })
}

/// Resultant in `(ξ0, ξ1)` (chart `ξ2 = 1`) vanishing on tangent lines.
///
/// `k` selects the tangency minor `∂f/∂x_k - ξ_k ∂f/∂x2` (`k` is 0 or 1).
/// By the Euler relation the resultant also picks up the pencil of lines
/// through the points of `S` with `x_{1-k} = 0`, so the two choices share
/// only the genuine tangency locus.
fn tangency_eliminant(f: &HomogeneousPolynomial, k: usize) -> Result<MultiPoly, DualError> {
    // ring: x0, x1, x2, ξ0, ξ1
    const NV: usize = 5;
    let d = f.degree();
    let lift = |p: &MultiPoly| p.embed(NV, &[0, 1, 2]);
    let var = |i| MultiPoly::var(NV, i);
    let fx = lift(f.as_poly());
    let grad = f.gradient()?;
    let fk = lift(grad[k].as_poly());
    let f2 = lift(grad[2].as_poly());
    let tangent_line = &(&(&var(3) * &var(0)) + &(&var(4) * &var(1))) + &var(2);
    let minor = &fk - &(&var(3 + k) * &f2);

    let on_line = resultant_formal(&fx, &tangent_line, 2, d, 1)?;
    if on_line.is_zero() || minor.is_zero() {
        return Ok(MultiPoly::zero(2));
    }
    let minor_on_line = resultant_formal(&minor, &tangent_line, 2, d - 1, 1)?;
    if minor_on_line.is_zero() {
        return Ok(MultiPoly::zero(2));
    }
    // Binary forms in (x0, x1): dehomogenize x_{1-k} = 1, keep formal degrees.
    let one = Q::from_integer(1.into());
    let h1 = on_line.set_var(1 - k, &one);
    let h2 = minor_on_line.set_var(1 - k, &one);
    let r = resultant_formal(&h1, &h2, k, d, d - 1)?;
    Ok(r.remove_var(2).remove_var(1).remove_var(0))
}

/// Common part of the two eliminants, with the factors dropped from each.
fn combined_eliminant(f: &HomogeneousPolynomial) -> Result<(MultiPoly, Vec<(MultiPoly, u32)>), DualError> {
    let e0 = tangency_eliminant(f, 0)?;
    let e1 = tangency_eliminant(f, 1)?;
    let (common, others) = match (e0.is_zero(), e1.is_zero()) {
        (true, true) => return Err(DualError::EliminationCollapse),
        (false, true) => (squarefree_part(&e0), vec![e0]),
        (true, false) => (squarefree_part(&e1), vec![e1]),
        (false, false) => (squarefree_part(&gcd(&e0, &e1)), vec![e0, e1]),
    };
    let mut dropped = Vec::new();
    for e in others {
        let mut rest = e;
        while let Some(q) = rest.div_exact(&common) {
            rest = q;
        }
        dropped.extend(squarefree_decomposition(&rest));
    }
    Ok((common, dropped))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BidualReport {
    pub proportional: bool,
    /// `c` with `(S∨)∨ = c·f`, when proportional.
    pub scalar: Option<Q>,
    pub dual: DualCurveResult,
    pub bidual: DualCurveResult,
}

/// Dualizes twice and tests proportionality with `f`.
pub fn bidual_check(f: &HomogeneousPolynomial) -> Result<BidualReport, DualError> {
    let dual = dual_polynomial(f)?;
    if dual.dual_degree > MAX_ELIMINATION_DEGREE {
        return Err(DualError::DegreeTooLarge(dual.dual_degree));
    }
    let bidual = dual_polynomial(&dual.dual_poly)?;
    let scalar = bidual.dual_poly.proportionality(f);
    Ok(BidualReport {
        proportional: scalar.is_some(),
        scalar,
        dual,
        bidual,
    })
}
