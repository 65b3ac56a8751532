//! Interactive protocols, their threshold parallel repetitions, and prover
//! strategies given as explicit query-indexed unitaries.

pub mod catalog;
mod interaction;
mod optimal;
mod protocol;
mod prover;
mod success;
mod transcript;

pub use interaction::{run_interaction, Interaction};
pub use optimal::{optimal_over, optimal_prover, optimal_success};
pub use protocol::{
    repeat, threshold_verdict, PrivateAcceptFn, Protocol, PublicAcceptFn, PublicCoinProtocol, QueryFn,
    RepeatedProtocol, ThreeMessageProtocol,
};
pub use prover::{CopyAction, JointAction, ProverStrategy, RoundAction};
pub use success::{
    enumerate_tuples, public_query_operator, public_residual_operator, success_probability,
    three_query_groups, three_success_operator, Residual,
};
pub use transcript::Transcript;
pub(crate) use success::three_layout;
