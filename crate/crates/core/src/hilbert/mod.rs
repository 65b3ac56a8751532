//! Registers, states, operators and distances on small Hilbert spaces.
//!
//! A [`RegisterLayout`] names the tensor factors of a space; basis indices are
//! mixed-radix with the first register most significant. Local operators act
//! through index arithmetic, so the full lift of a gate is never built unless
//! a caller asks for it.

mod distance;
mod layout;
pub(crate) mod local;
mod operator;
mod state;

pub use distance::{cq_trace_distance, total_variation, trace_distance, trace_distance_matrices, CqState};
pub use layout::{Register, RegisterLayout};
pub use operator::{LocalUnitary, Projector, Pvm, Unitary};
pub use state::{QuantumState, StateData};
