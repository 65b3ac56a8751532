//! Exact, small-dimension simulation of the post-quantum parallel repetition
//! reductions for public-coin and three-message interactive arguments.
//!
//! Everything here is `no_std` with `alloc`. Linear algebra is dense and
//! complex-valued; all randomness flows through [`rng::StreamRng`] so that a
//! run is a pure function of its seed.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod harness;
pub mod hilbert;
pub mod linalg;
pub mod math;
pub mod measure;
pub mod memoryless;
pub mod protocols;
pub mod reductions;
pub mod rng;

pub use error::{Error, Result};
