//! Numerical tests of the permutability equation `G(G(y,r),t) = G(G(y,t),r)`
//! and construction of additive representations `G(y,r) = f⁻¹(f(y) + g(r))`.

// `!(a < b)` is used deliberately so that NaN fails the condition
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
pub mod corpus;
pub mod error;
pub mod fitter;
pub mod grid;
pub mod holder;
pub mod lawcore;

pub use error::{Error, Result};
pub use axioms::CheckReport;
pub use grid::{Grid2, Grid3};
pub use lawcore::{
    AdditiveRepresentation, AffineMap, BivariateCode, Direction, Gauge, Interval, MonotoneFunction,
};
