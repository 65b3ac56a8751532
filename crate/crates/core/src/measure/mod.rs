//! Value estimation and state repair.
//!
//! A [`ValueFamily`] wraps a Hermitian operator with spectrum in `[0, 1]`
//! (usually a game's success operator). Its [`ValueMeasurement`]s are the
//! spectral measurements with eigenvalues rounded onto a uniform grid: they
//! are exactly projective, so repeated measurements agree and the grid
//! rounding is the only source of error.

mod game;
mod grid;
mod repair;
mod value;

pub use game::{AdversaryFn, GameSpec, VerdictFn};
pub use grid::Grid;
pub use repair::{repair, repair_budget, repair_channel, CallCount, RepairOutcome};
pub use value::{ValueFamily, ValueMeasurement, ValueOutcome};
