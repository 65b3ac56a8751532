//! The public-coin and three-message reductions from a `k`-fold prover to a
//! single-fold prover, with their projections and run records.

mod checkcoins;
mod deferred;
mod external;
mod params;
mod public;
mod record;
mod softdecision;
mod three;

pub use checkcoins::{checkcoins, CheckCoinsFamily};
pub use deferred::{deferred_measurement_check, random_instance, DeferredCheck, DeferredInstance};
pub use external::{LiveVerifier, ScriptedVerifier, VerifierSession};
pub use params::{DecisionRule, DeskValues, ParamMode, ReductionKind, ReductionParams, ResolvedParams};
pub use public::run_public_coin_reduction;
pub use record::{AbortCause, Attempt, CopyAttempt, ReductionRunRecord, RoundLog};
pub use softdecision::{
    complete_query, decision_probability, omega_unit, others_accepting, softdecision, softdecision_pvm,
    softdecision_probability, softdecision_proj, SoftDecisionFamily,
};
pub use three::run_three_message_reduction;

use alloc::vec::Vec;

use crate::hilbert::QuantumState;
use crate::protocols::ProverStrategy;

/// `n` fresh copies of the prover's initial state.
pub fn fresh_copies(prover: &ProverStrategy, n: usize) -> Vec<QuantumState> {
    (0..n).map(|_| prover.initial().clone()).collect()
}
