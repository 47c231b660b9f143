//! Piecewise-polynomial calculus over the element lattice.
//!
//! Fields are stored per element as polynomials in the local coordinate
//! `xi in [-1/2, 1/2]`. The inner product is `<z, u> = (1/h) int z u dx`,
//! which on polynomial pieces reduces to a plain `xi`-integral per element.

mod field;
mod poly;
mod quadrature;

pub use field::{JsonScalar, PiecewiseField, Side};
pub use poly::{Polynomial, DEFAULT_DEGREE_CAP};
pub use quadrature::GaussLegendre;
