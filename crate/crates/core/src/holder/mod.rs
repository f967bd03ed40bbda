//! The partial operation `•`, the five Hölder conditions, standard sequences
//! and the orbit construction of `f` and `g`.

mod conditions;
mod construct;
mod represent;
mod sequence;
mod structure;

pub use conditions::{check_holder_conditions, ArchimedeanSummary, HolderConditionsReport};
pub use construct::{
    construct_f, construct_g, construct_representation, default_r0, Construction,
    ConstructionMeta, GConstruction, StepMode, DEFAULT_DEPTH,
};
pub use represent::{
    check_differentiability, derivative_series, residual_report, symmetric_representation,
    DerivativeSeries, DifferentiabilityReport, SymmetricRepresentation, CONSTANT_TOL, RATIO_TOL,
};
pub use sequence::{
    archimedean_count, archimedean_count_capped, standard_sequence, SequenceEnd,
    StandardSequence, ARCHIMEDEAN_CAP,
};
pub use structure::{bullet, HolderStructure};
