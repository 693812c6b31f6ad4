//! Exact multivariate polynomials over the rationals.
//!
//! [`MultiPoly`] is the general sparse ring element used internally for
//! elimination; [`HomogeneousPolynomial`] is the validated form type the
//! rest of the crate consumes.

mod gcd;
mod homogeneous;
mod multipoly;
mod parse;
mod resultant;

use thiserror::Error;

pub use gcd::{content_in, gcd, is_squarefree, primitive_part_in, squarefree_decomposition, squarefree_part};
pub use homogeneous::{HomogeneousPolynomial, Point, Scalar};
pub use multipoly::{q_to_f64, Monomial, MultiPoly};
pub use parse::{infer_nvars, parse_multipoly};
pub use resultant::{bareiss_determinant, resultant, resultant_formal, sylvester_matrix};

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Q = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("operation undefined for a nonzero constant form")]
    ConstantForm,
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable x{index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("a polynomial needs at least one variable")]
    NoVariables,
    #[error("formal degree smaller than actual degree")]
    DegreeMismatch,
}
