use alloc::vec::Vec;

use super::{Protocol, ProverStrategy, RepeatedProtocol, Transcript};
use crate::rng::StreamRng;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Interaction {
    pub transcript: Transcript,
    pub verdicts: Vec<bool>,
    pub accepted: bool,
}

/// Simulates one execution: the verifier samples its coins, the prover
/// applies its round unitary and its response registers are measured.
pub fn run_interaction(prover: &ProverStrategy, rep: &RepeatedProtocol, rng: &mut StreamRng) -> Result<Interaction> {
    let k = rep.k();
    if prover.copies() != k || prover.rounds() != rep.base().response_rounds() {
        return Err(Error::Dimension("prover does not match the repeated protocol".into()));
    }
    let mut state = prover.initial().clone();
    let mut tr = Transcript::default();
    match rep.base() {
        Protocol::PublicCoin(p) => {
            for round in 0..p.rounds() {
                let qbar: Vec<usize> = (0..k).map(|_| rng.below(p.query_size(round))).collect();
                state = state.apply_all(&prover.gates(round, &qbar)?)?;
                let (zbar, next) = state.measure_registers(prover.response_registers(round), true, rng)?;
                state = next;
                tr.queries.push(qbar);
                tr.responses.push(zbar);
            }
        }
        Protocol::ThreeMessage(p) => {
            let z1bar = match prover.first_registers() {
                Some(first) => {
                    let (z1bar, next) = state.measure_registers(first, true, rng)?;
                    state = next;
                    z1bar
                }
                None => alloc::vec![0; k],
            };
            let rbar: Vec<usize> = (0..k).map(|_| rng.below(p.randomness())).collect();
            let qbar: Vec<usize> = rbar.iter().zip(&z1bar).map(|(&r, &z1)| p.query_of(r, z1)).collect();
            state = state.apply_all(&prover.gates(0, &qbar)?)?;
            let (z2bar, _) = state.measure_registers(prover.response_registers(0), true, rng)?;
            tr.first = Some(z1bar);
            tr.coins = Some(rbar);
            tr.queries.push(qbar);
            tr.responses.push(z2bar);
        }
    }
    let verdicts = rep.coordinate_verdicts(&tr)?;
    let accepted = super::threshold_verdict(&verdicts, rep.t())?;
    tr.verdicts = Some(verdicts.clone());
    Ok(Interaction { transcript: tr, verdicts, accepted })
}
