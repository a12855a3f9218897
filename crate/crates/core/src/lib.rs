//! Regularization of first-order field Lagrangians by 2-contact Lepagean
//! equivalents, the associated generalized Legendre transformation, and
//! Hamilton p2-equations.

pub mod chart;
pub mod cli_io;
pub mod error;
pub mod expr;
pub mod gtensor;
pub mod hamilton;
pub mod lagrangian;
pub mod legendre;
pub mod linalg;
pub mod presets;
pub mod verify;

pub use chart::{Chart, Coordinate, JetPoint};
pub use error::{Error, Result};
pub use expr::{equals, parse, Expr, Name};
