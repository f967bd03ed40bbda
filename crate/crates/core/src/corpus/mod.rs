//! Built-in laws with their closed-form representations, synthetic codes, and
//! grid ingestion.

mod gridfile;
mod laws;
mod synthetic;

pub use gridfile::{load_grid, GridTable};
pub use laws::{analytic_reference, make_law, AnalyticReference, Domain, LawName, LawSpec};
pub use synthetic::{make_synthetic, Synthetic, SyntheticKnots};
