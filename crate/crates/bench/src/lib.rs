//! Fixtures shared by the benchmarks.

use permlaw_core::corpus::{make_law, LawName, LawSpec, Synthetic};
use permlaw_core::holder::HolderStructure;
use permlaw_core::BivariateCode;

pub fn law(name: LawName) -> BivariateCode {
    make_law(&LawSpec::new(name)).expect("built-in laws construct")
}

/// Holder structure with neutral element 1, inside every built-in `J`.
pub fn structure(name: LawName) -> HolderStructure {
    HolderStructure::new(law(name), 1.0).expect("1 lies in J")
}

pub fn synthetic(seed: u64) -> Synthetic {
    Synthetic::random(seed, 10).expect("random tables are monotone")
}
