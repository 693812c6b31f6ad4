use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;

use super::multipoly::MultiPoly;
use super::parse::parse_multipoly;
use super::{PolyError, Q};

/// A homogeneous form with exact rational coefficients.
///
/// The zero form keeps an explicit degree tag, so `degree()` is always
/// defined.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousPolynomial {
    poly: MultiPoly,
    degree: u32,
}

/// A point at which a form can be evaluated.
pub enum Point<'a> {
    Rational(&'a [Q]),
    Complex(&'a [Complex64]),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(Q),
    Complex(Complex64),
}

impl HomogeneousPolynomial {
    /// Wraps a polynomial, checking homogeneity. A zero polynomial gets
    /// degree tag 0; use [`HomogeneousPolynomial::zero`] for another tag.
    pub fn new(poly: MultiPoly) -> Result<Self, PolyError> {
        if poly.nvars() == 0 {
            return Err(PolyError::NoVariables);
        }
        if !poly.is_homogeneous() {
            return Err(PolyError::NotHomogeneous);
        }
        let degree = poly.total_degree().unwrap_or(0);
        Ok(Self { poly, degree })
    }

    pub fn zero(nvars: usize, degree: u32) -> Self {
        Self {
            poly: MultiPoly::zero(nvars),
            degree,
        }
    }

    pub fn parse(text: &str, nvars: usize) -> Result<Self, PolyError> {
        Self::new(parse_multipoly(text, nvars)?)
    }

    pub fn nvars(&self) -> usize {
        self.poly.nvars()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn as_poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn into_poly(self) -> MultiPoly {
        self.poly
    }

    pub fn num_terms(&self) -> usize {
        self.poly.len()
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.poly.coeff(e)
    }

    /// Partial derivatives; every entry is homogeneous of degree `p - 1`
    /// (degree-0 input is rejected since the gradient would be identically
    /// zero with a negative degree tag).
    pub fn gradient(&self) -> Result<Vec<HomogeneousPolynomial>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.degree == 0 {
            return Err(PolyError::ConstantForm);
        }
        Ok((0..self.nvars())
            .map(|i| HomogeneousPolynomial {
                poly: self.poly.derivative(i),
                degree: self.degree - 1,
            })
            .collect())
    }

    /// Hessian entries `[i][j] = d^2 f / dx_i dx_j`.
    pub fn hessian(&self) -> Result<Vec<Vec<HomogeneousPolynomial>>, PolyError> {
        let grad = self.gradient()?;
        grad.iter()
            .map(|g| {
                if g.degree == 0 {
                    // Linear f: every second derivative vanishes.
                    Ok((0..self.nvars())
                        .map(|_| HomogeneousPolynomial::zero(self.nvars(), 0))
                        .collect())
                } else if g.is_zero() {
                    Ok((0..self.nvars())
                        .map(|_| HomogeneousPolynomial::zero(self.nvars(), g.degree - 1))
                        .collect())
                } else {
                    g.gradient()
                }
            })
            .collect()
    }

    /// Checks `sum_i x_i df/dx_i == p f` exactly.
    pub fn euler_identity_check(&self) -> Result<bool, PolyError> {
        let grad = self.gradient()?;
        let n = self.nvars();
        let mut lhs = MultiPoly::zero(n);
        for (i, g) in grad.iter().enumerate() {
            lhs = &lhs + &(&MultiPoly::var(n, i) * &g.poly);
        }
        let rhs = self.poly.scale(&Q::from_integer(BigInt::from(self.degree)));
        Ok(lhs == rhs)
    }

    pub fn evaluate(&self, point: Point<'_>) -> Result<Scalar, PolyError> {
        match point {
            Point::Rational(x) => Ok(Scalar::Rational(self.eval_rational(x)?)),
            Point::Complex(x) => Ok(Scalar::Complex(self.eval_complex(x)?)),
        }
    }

    pub fn eval_rational(&self, x: &[Q]) -> Result<Q, PolyError> {
        self.check_len(x.len())?;
        Ok(self.poly.eval_rational(x))
    }

    pub fn eval_complex(&self, x: &[Complex64]) -> Result<Complex64, PolyError> {
        self.check_len(x.len())?;
        Ok(self.poly.eval_complex(x))
    }

    fn check_len(&self, len: usize) -> Result<(), PolyError> {
        if len != self.nvars() {
            return Err(PolyError::DimensionMismatch {
                expected: self.nvars(),
                found: len,
            });
        }
        Ok(())
    }

    /// Integer coefficients, content 1, positive graded-lex leading
    /// coefficient.
    pub fn normalized(&self) -> HomogeneousPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let (p, _) = self.poly.primitive_integer();
        // primitive_integer fixes the lex-leading sign; switch to grlex.
        let lead_neg = p
            .grlex_terms()
            .first()
            .map(|(_, c)| num_traits::Signed::is_negative(*c))
            .unwrap_or(false);
        let p = if lead_neg { -&p } else { p };
        HomogeneousPolynomial {
            poly: p,
            degree: self.degree,
        }
    }

    /// `Some(c)` when `self == c * other` for a rational `c`.
    pub fn proportionality(&self, other: &HomogeneousPolynomial) -> Option<Q> {
        if self.nvars() != other.nvars() || self.degree != other.degree {
            return None;
        }
        if self.is_zero() || other.is_zero() {
            return None;
        }
        let (e, c) = other.poly.leading_term()?;
        let ratio = self.poly.coeff(e) / c;
        if self.poly == other.poly.scale(&ratio) {
            Some(ratio)
        } else {
            None
        }
    }
}

impl fmt::Display for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

impl fmt::Debug for HomogeneousPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[n={}, d={}]({})", self.nvars(), self.degree, self.poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Q {
        Q::from_integer(BigInt::from(n))
    }

    #[test]
    fn parse_examples() {
        let f = HomogeneousPolynomial::parse("x0*x2 - x1^2", 3).unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.num_terms(), 2);
        assert_eq!(f.coeff(&[1, 0, 1]), q(1));
        assert_eq!(f.coeff(&[0, 2, 0]), q(-1));
        assert_eq!(
            HomogeneousPolynomial::parse("x0^2 + x1", 2),
            Err(PolyError::NotHomogeneous)
        );
        let g = HomogeneousPolynomial::parse("x0^3 - x1^2*x2", 3).unwrap();
        assert_eq!((g.degree(), g.num_terms()), (3, 2));
    }

    #[test]
    fn zero_form_keeps_tag() {
        let z = HomogeneousPolynomial::parse("x0 - x0", 1).unwrap();
        assert!(z.is_zero());
        assert_eq!(HomogeneousPolynomial::zero(3, 4).degree(), 4);
        assert_eq!(z.gradient(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn gradient_examples() {
        let f = HomogeneousPolynomial::parse("x0*x2 - x1^2", 3).unwrap();
        let g: Vec<String> = f.gradient().unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(g, ["x2", "-2*x1", "x0"]);
        let c = HomogeneousPolynomial::parse("x0^3 - x1^2*x2", 3).unwrap();
        let g: Vec<String> = c.gradient().unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(g, ["3*x0^2", "-2*x1*x2", "-x1^2"]);
        let p = HomogeneousPolynomial::parse("x0^7", 1).unwrap();
        let g = p.gradient().unwrap();
        assert_eq!(g[0].to_string(), "7*x0^6");
        assert_eq!(g[0].degree(), 6);
    }

    #[test]
    fn euler_examples() {
        for s in ["x0*x2 - x1^2", "x0^3 - x1^2*x2", "x0^4 + 3*x0*x1^2*x2 - 5/7*x2^4"] {
            assert!(HomogeneousPolynomial::parse(s, 3).unwrap().euler_identity_check().unwrap());
        }
    }

    #[test]
    fn evaluation_examples() {
        let f = HomogeneousPolynomial::parse("x0*x2 - x1^2", 3).unwrap();
        assert_eq!(f.eval_rational(&[q(1), q(1), q(1)]).unwrap(), q(0));
        assert_eq!(f.eval_rational(&[q(1), q(0), q(0)]).unwrap(), q(0));
        let c = HomogeneousPolynomial::parse("x0^3 - x1^2*x2", 3).unwrap();
        assert_eq!(c.eval_rational(&[q(1), q(1), q(1)]).unwrap(), q(0));
        let z = Complex64::new(0.3, -1.1);
        let v = c.eval_complex(&[z, z, z]).unwrap();
        assert!(v.norm() < 1e-14);
        assert_eq!(
            f.eval_rational(&[q(1), q(1)]),
            Err(PolyError::DimensionMismatch { expected: 3, found: 2 })
        );
        assert!(matches!(
            f.evaluate(Point::Rational(&[q(2), q(1), q(3)])).unwrap(),
            Scalar::Rational(r) if r == q(5)
        ));
    }

    #[test]
    fn normalization_and_proportionality() {
        let f = HomogeneousPolynomial::parse("-1/2*x1^2 + 2*x0*x2", 3).unwrap();
        let n = f.normalized();
        assert_eq!(n.to_string(), "4*x0*x2 - x1^2");
        assert_eq!(f.proportionality(&n), Some(Q::new(1.into(), 2.into())));
    }
}
