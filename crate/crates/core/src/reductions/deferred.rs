use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::CheckCoinsFamily;
use crate::hilbert::{QuantumState, RegisterLayout};
use crate::linalg::{random_unitary, random_vector};
use crate::measure::{Grid, ValueFamily};
use crate::protocols::{catalog, public_residual_operator, repeat, ProverStrategy, RepeatedProtocol, Transcript};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Results of measuring the value then the responses, versus the responses
/// then the value of the residual game. Keys are `(grid cell, z̄)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeferredCheck {
    pub value_first: Vec<(usize, Vec<usize>, f64)>,
    pub response_first: Vec<(usize, Vec<usize>, f64)>,
    pub total_variation: f64,
}

const BRANCH_LIMIT: usize = 1 << 16;

/// Enumerates both orderings exactly on a state at the start of round
/// `ℓ = prefix.queries.len()` with query vector `q̄`.
pub fn deferred_measurement_check(
    rep: &RepeatedProtocol,
    prover: &ProverStrategy,
    prefix: &Transcript,
    qbar: &[usize],
    state: &QuantumState,
    epsilon: f64,
    delta: f64,
) -> Result<DeferredCheck> {
    let round = prefix.queries.len();
    let checks = CheckCoinsFamily::new(rep, prover, prefix, epsilon, delta)?;
    let m = checks.measurement(qbar)?;
    if state.layout() != m.layout() {
        return Err(Error::Dimension("state does not carry the registers of this round".into()));
    }
    let regs = prover.response_registers(round);
    let zdim = state.layout().select(regs)?.dim();
    if m.grid().len() * zdim > BRANCH_LIMIT {
        return Err(Error::InvalidParameter("too many branches to enumerate".into()));
    }
    let grid: Grid = *m.grid();
    let gates = prover.gates(round, qbar)?;
    let sub = state.layout().select(regs)?;

    let mut a: BTreeMap<(usize, Vec<usize>), f64> = BTreeMap::new();
    for (value, proj) in m.projectors() {
        let w = state.projector_weight(&proj);
        let Some(post) = state.project(&proj) else { continue };
        let after = post.apply_all(&gates)?;
        for (z, pz) in after.register_distribution(regs)?.into_iter().enumerate() {
            *a.entry((grid.cell_of(value), sub.digits(z))).or_default() += w * pz;
        }
    }

    let mut b: BTreeMap<(usize, Vec<usize>), f64> = BTreeMap::new();
    let after = state.apply_all(&gates)?;
    for (z, pz) in after.register_distribution(regs)?.into_iter().enumerate() {
        if pz <= 1e-300 {
            continue;
        }
        let zbar = sub.digits(z);
        let cond = after.condition_registers(regs, z, true)?;
        let mut next = prefix.clone();
        next.queries.push(qbar.to_vec());
        next.responses.push(zbar.clone());
        let res = public_residual_operator(rep, prover, &next)?;
        let mv = ValueFamily::from_operator(res.layout, res.operator)?.measurement(epsilon, delta)?;
        for (value, pv) in mv.outcome_distribution(&cond) {
            *b.entry((grid.cell_of(value), zbar.clone())).or_default() += pz * pv;
        }
    }

    let keys: alloc::collections::BTreeSet<_> = a.keys().chain(b.keys()).cloned().collect();
    let tv = 0.5 * keys.iter().map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs()).sum::<f64>();
    let flat = |m: BTreeMap<(usize, Vec<usize>), f64>| m.into_iter().map(|((c, z), p)| (c, z, p)).collect();
    Ok(DeferredCheck { value_first: flat(a), response_first: flat(b), total_variation: tv })
}

/// A seeded two-qubit instance: two rounds of a game accepting iff both
/// responses are `1`, a random prover unitary per query in each round (the
/// first acting on both qubits), and a random initial state.
pub struct DeferredInstance {
    pub rep: RepeatedProtocol,
    pub prover: ProverStrategy,
    pub qbar: Vec<usize>,
    pub state: QuantumState,
}

pub fn random_instance(rng: &mut StreamRng) -> Result<DeferredInstance> {
    let protocol = catalog::chained(&[(2, 2), (2, 2)])?;
    let rep = repeat(protocol, 1, 1)?;
    let layout = RegisterLayout::qubits(&["z1", "z2"])?;
    let initial = QuantumState::pure(layout, random_vector(4, rng))?;
    let first = (0..2).map(|_| random_unitary(4, rng)).collect();
    let second = (0..2).map(|_| random_unitary(2, rng)).collect();
    let prover = ProverStrategy::single_copy(
        "random",
        initial.clone(),
        None,
        &["z1", "z2"],
        alloc::vec![(alloc::vec!["z1", "z2"], first), (alloc::vec!["z2"], second)],
    )?;
    let qbar = alloc::vec![rng.below(2)];
    Ok(DeferredInstance { rep, prover, qbar, state: initial })
}
