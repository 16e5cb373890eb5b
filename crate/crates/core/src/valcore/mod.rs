//! Exact scalars, Laurent polynomials, Gauss valuations and Newton polygons.

pub mod laurent;
pub mod newton;
pub mod rational;
pub mod scalar;

pub use laurent::{Derivation, LaurentPoly};
pub use newton::{newton_polygon, split_by_slope, NewtonPolygon, SlopeSplit};
pub use rational::{fmt_q, parse_q, q, qf, Q};
pub use scalar::{FieldMode, Scalar, USeries, Val};
