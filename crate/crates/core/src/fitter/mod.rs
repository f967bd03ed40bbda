//! Monotone least-squares fitting of additive representations and affine
//! alignment of representations.

mod align;
mod fit;
mod param;

pub use align::{
    affine_align, affine_align_fn, affine_align_values, check_gauge_uniqueness, shared_samples,
    GaugeConfig, GaugeUniquenessReport, PairAlignment, ALIGN_TOL,
};
pub use fit::{default_knots, fit_additive, uniform_knots, FitOptions, FitResult, DEFAULT_KNOTS};
pub use param::MonotoneParam;
