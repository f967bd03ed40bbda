//! Domain types and numeric primitives shared by every other module.

mod code;
mod interval;
mod monotone;
mod repr;
mod solve;

pub use code::{BivariateCode, Direction};
pub use interval::Interval;
pub(crate) use interval::linspace;
pub use monotone::MonotoneFunction;
pub use repr::{AdditiveRepresentation, AffineMap, Gauge};
pub(crate) use solve::bisect_predicate;
pub use solve::{
    bisect, invert_in_first, invert_in_first_tol, invert_in_second, invert_in_second_tol,
    INVERSION_TOL, MAX_BISECTIONS,
};
