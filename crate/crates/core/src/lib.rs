//! Computational toolkit for holomorphic symplectic geometry of `T*P^n`:
//! exact polynomial elimination, dual plane curves and Plücker numbers,
//! symplectic linear algebra over the rationals, pointwise Legendre
//! transforms, the explicit hyperkähler quotient and its flop, integer
//! intersection calculus of Lagrangian classes, and formal
//! characteristic-class genera.

pub mod charclass;
pub mod dualcurve;
pub mod exactpoly;
pub mod hkquotient;
pub mod lagclass;
pub mod legendre;
pub mod numeric;
pub mod symplin;
pub mod verify;

pub use exactpoly::{HomogeneousPolynomial, MultiPoly, PolyError, Q};
