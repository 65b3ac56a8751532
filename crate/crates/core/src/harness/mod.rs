//! Numeric checkers for the information-theoretic lemmas, soundness bound
//! calculators and Monte Carlo success estimation.

mod bounds;
mod lemmas;
mod stats;

pub use bounds::{
    bound_informal, bound_public, bound_three, reduction_floor_public, reduction_floor_three, BoundValue, InformalVariant,
};
pub use lemmas::{
    bad_correlations_law, flooding_check, hppw_check, raz_check, LemmaCheck, ENUMERATION_LIMIT, SLACK,
};
pub use stats::{estimate_success, wilson_interval, Estimate, WILSON_Z};
