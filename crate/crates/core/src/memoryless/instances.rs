//! Small instances for exercising the flooding procedures.

use alloc::vec::Vec;

use super::ProjectionFamily;
use crate::hilbert::{Projector, Pvm, QuantumState, RegisterLayout};
use crate::linalg::{self, c, random_projector, random_unit_interval_operator, random_vector, Matrix};
use crate::math;
use crate::measure::ValueFamily;
use crate::rng::StreamRng;
use crate::Result;

/// A value operator, a projection family and a state on a common space.
#[derive(Clone, Debug)]
pub struct FloodInstance {
    pub value: ValueFamily,
    pub family: ProjectionFamily,
    pub state: QuantumState,
    /// Size of the space in qubits.
    pub ell: f64,
}

/// Two qubits: `v` carries the value, `m` is a memory qubit. The family
/// measures `m` either in the computational basis or in a basis rotated by
/// `theta`; both commute with the value operator, so repairs never fire and
/// the only thing that can leak the real projection is the memory qubit
/// itself, which records the basis of the last measurement applied to it.
pub fn recording_instance(theta: f64) -> Result<FloodInstance> {
    let layout = RegisterLayout::qubits(&["v", "m"])?;
    let value = ValueFamily::from_operator(
        layout.clone(),
        linalg::kron(&linalg::from_real_diagonal(&[0.2, 0.7]), &linalg::identity(2)),
    )?;
    let (s, co) = (math::sin(theta / 2.0), math::cos(theta / 2.0));
    let rotated = |k: usize| -> Matrix {
        let v = if k == 0 { [c(co), c(s)] } else { [c(-s), c(co)] };
        let mut m = Matrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        linalg::kron(&linalg::identity(2), &m)
    };
    let z = Pvm::computational(&layout, "m")?;
    let x = Pvm::from_matrices(layout.clone(), alloc::vec![rotated(0), rotated(1)])?;
    let h = 1.0 / math::sqrt(2.0);
    let state = QuantumState::pure(
        layout,
        linalg::Vector::from_vec(alloc::vec![c(h), c(0.0), c(h), c(0.0)]),
    )?;
    Ok(FloodInstance { value, family: ProjectionFamily::new(alloc::vec![z, x])?, state, ell: 2.0 })
}

/// Random instance on `qubits` qubits: value operator with uniform spectrum,
/// `members` random binary measurements of half rank, random pure state.
pub fn random_instance(qubits: usize, members: usize, rng: &mut StreamRng) -> Result<FloodInstance> {
    let names: Vec<alloc::string::String> = (0..qubits).map(|i| alloc::format!("q{i}")).collect();
    let layout = RegisterLayout::new(names.iter().map(|n| (n.clone(), 2usize)))?;
    let n = layout.dim();
    let value = ValueFamily::from_operator(layout.clone(), random_unit_interval_operator(n, rng))?;
    let pvms = (0..members)
        .map(|_| Pvm::binary(Projector::new(layout.clone(), random_projector(n, n / 2, rng))?))
        .collect::<Result<Vec<_>>>()?;
    let state = QuantumState::pure(layout, random_vector(n, rng))?;
    Ok(FloodInstance { value, family: ProjectionFamily::new(pvms)?, state, ell: qubits as f64 })
}
