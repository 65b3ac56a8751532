//! Flooding the state with random projections so it stops remembering which
//! projection was applied.
//!
//! [`prepare`] and [`repair_prime`] are the sampled procedures;
//! [`forgetfulness_distance`] propagates the same procedures as quantum
//! channels to get the exact hybrid distance on small instances.

mod family;
mod flood;
mod forget;
pub mod instances;

pub use family::{ProjectionFamily, PvmSampler};
pub use flood::{prepare, repair_prime, FloodLog, FloodRecord, Flooded, FloodingParams, Procedure};
pub use forget::{forgetfulness_distance, forgetfulness_distance_sampled, ForgetMode, ForgetReport};
