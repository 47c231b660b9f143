//! Holistic finite differences for Burgers' equation `u_t + a u u_x = u_xx`
//! on a periodic lattice, together with the centre-manifold projection of
//! initial fields onto the discretisation.
//!
//! The pieces:
//!
//! * [`grid`]: the periodic element lattice and model state.
//! * [`polyfield`]: piecewise polynomials in the element coordinate, in
//!   `f64` or exact rational arithmetic.
//! * [`subgrid`]: the subgrid field `v(u, x)` and tangent vectors `e_j`.
//! * [`model`]: the holistic evolution equation and RK4 integration.
//! * [`projector`]: projection vectors `z_j` and initial-condition projection.
//! * [`derive`]: exact-rational derivation and verification of the linear
//!   projection vectors.
//! * [`reference`]: a conventional fine-grid Burgers solver used as oracle.
//! * [`diagnostics`]: moments, residuals and strategy comparisons.
//! * [`cli`]: JSON-configured commands behind the `holifd` binary.

pub mod cli;
pub mod derive;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod initial;
pub mod model;
pub mod polyfield;
pub mod projector;
pub mod reference;
pub mod scalar;
pub mod subgrid;

pub use error::{HolifdError, Result};
pub use grid::{Grid, GridState};
pub use initial::{InitialField, PointMass, Profile};
pub use model::IntegrationConfig;
pub use subgrid::ModelParams;
