//! Numerical checks of the code axioms, solvability, comonotonicity and the
//! (quasi-)permutability equations.

mod code_axioms;
mod comonotone;
mod permutability;
mod report;
mod solvability;

pub use code_axioms::{check_code_axioms, CodeAxiomsReport, CONTINUITY_RATIO};
pub use comonotone::{
    check_comonotonic, check_m_permutable_implies_g, construct_f_comonotone, sample_pairs,
    shared_domain, ArgPair, ComonotonicPair, ComonotonicReport, ImpliedPermutabilityReport, TIE_TOL,
};
pub use permutability::{check_permutability, check_quasi_permutability, MAX_SKIP_FRACTION};
pub use report::{relative_residual, CheckReport};
pub use solvability::{check_solvability, SolvabilityReport, X0Candidate};
