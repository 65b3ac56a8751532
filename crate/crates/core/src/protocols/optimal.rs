use alloc::vec::Vec;

use super::{enumerate_tuples, success_probability, Protocol, ProverStrategy, RepeatedProtocol, Transcript};
use crate::hilbert::{QuantumState, RegisterLayout};
use crate::linalg::{self, c, Matrix};
use crate::{Error, Result};

const ENUMERATION_LIMIT: f64 = 1e7;

/// Maximum acceptance probability over classical deterministic provers,
/// by backward induction over rounds.
pub fn optimal_success(rep: &RepeatedProtocol) -> Result<f64> {
    let k = rep.k() as i32;
    match rep.base() {
        Protocol::PublicCoin(p) => {
            let leaves: f64 =
                (0..p.rounds()).map(|l| crate::math::powi((p.query_size(l) * p.response_size(l)) as f64, k)).product();
            if leaves > ENUMERATION_LIMIT {
                return Err(Error::InvalidParameter(alloc::format!("{leaves:.0} transcripts exceed the enumeration limit")));
            }
            public_value(rep, &Transcript::default())
        }
        Protocol::ThreeMessage(p) => {
            let leaves = crate::math::powi((p.first_size() * p.randomness() * p.second_size()) as f64, k);
            if leaves > ENUMERATION_LIMIT {
                return Err(Error::InvalidParameter(alloc::format!("{leaves:.0} transcripts exceed the enumeration limit")));
            }
            let mut best = 0.0_f64;
            for z1bar in enumerate_tuples(&alloc::vec![p.first_size(); rep.k()]) {
                best = best.max(three_value(rep, &z1bar)?.0);
            }
            Ok(best)
        }
    }
}

fn public_value(rep: &RepeatedProtocol, prefix: &Transcript) -> Result<f64> {
    let Protocol::PublicCoin(p) = rep.base() else { unreachable!() };
    let round = prefix.queries.len();
    if round == p.rounds() {
        return Ok(if rep.accept(prefix)? { 1.0 } else { 0.0 });
    }
    let queries = enumerate_tuples(&alloc::vec![p.query_size(round); rep.k()]);
    let responses = enumerate_tuples(&alloc::vec![p.response_size(round); rep.k()]);
    let mut total = 0.0;
    for qbar in &queries {
        let mut best = 0.0_f64;
        for zbar in &responses {
            let mut next = prefix.clone();
            next.queries.push(qbar.clone());
            next.responses.push(zbar.clone());
            best = best.max(public_value(rep, &next)?);
        }
        total += best;
    }
    Ok(total / queries.len() as f64)
}

/// Value with first messages `z1bar` and the lexicographically first best
/// second message for each query vector.
fn three_value(rep: &RepeatedProtocol, z1bar: &[usize]) -> Result<(f64, Vec<(Vec<usize>, Vec<usize>)>)> {
    let Protocol::ThreeMessage(p) = rep.base() else { unreachable!() };
    let responses = enumerate_tuples(&alloc::vec![p.second_size(); rep.k()]);
    let mut total = 0.0;
    let mut choices = Vec::new();
    for (qbar, members) in super::three_query_groups(rep, z1bar)? {
        let mut best = (-1.0_f64, Vec::new());
        for z2bar in &responses {
            let mut mass = 0.0;
            for (rbar, w) in &members {
                let tr = Transcript {
                    first: Some(z1bar.to_vec()),
                    coins: Some(rbar.clone()),
                    queries: alloc::vec![qbar.clone()],
                    responses: alloc::vec![z2bar.clone()],
                    aborted: false,
                    verdicts: None,
                };
                if rep.accept(&tr)? {
                    mass += w;
                }
            }
            if mass > best.0 {
                best = (mass, z2bar.clone());
            }
        }
        total += best.0;
        choices.push((qbar, best.1));
    }
    Ok((total, choices))
}

/// Unitary on one register exchanging `|0⟩` and `|z⟩`.
fn swap_into(dim: usize, z: usize) -> Matrix {
    let mut m = linalg::zeros(dim);
    for i in 0..dim {
        let j = if i == 0 { z } else if i == z { 0 } else { i };
        m[(j, i)] = c(1.0);
    }
    m
}

/// Single-copy classical deterministic prover attaining `optimal_success`
/// (one-round public-coin or three-message protocols).
pub fn optimal_prover(protocol: &Protocol) -> Result<ProverStrategy> {
    let rep = RepeatedProtocol::new(protocol.clone(), 1, 1)?;
    match protocol {
        Protocol::PublicCoin(p) => {
            if p.rounds() != 1 {
                return Err(Error::InvalidParameter("optimal_prover needs history for multi-round protocols".into()));
            }
            let zdim = p.response_size(0);
            let layout = RegisterLayout::single("z", zdim);
            let mats = (0..p.query_size(0))
                .map(|q| {
                    let z = (0..zdim).find(|&z| p.accept(&[q], &[z])).unwrap_or(0);
                    swap_into(zdim, z)
                })
                .collect();
            ProverStrategy::single_copy("optimal", QuantumState::basis(layout, 0)?, None, &["z"], alloc::vec![(alloc::vec!["z"], mats)])
        }
        Protocol::ThreeMessage(p) => {
            let mut best: Option<(f64, usize, Vec<(Vec<usize>, Vec<usize>)>)> = None;
            for z1 in 0..p.first_size() {
                let (v, choices) = three_value(&rep, &[z1])?;
                if best.as_ref().map_or(true, |b| v > b.0) {
                    best = Some((v, z1, choices));
                }
            }
            let (_, z1, choices) = best.expect("nonempty first-message space");
            let zdim = p.second_size();
            let mut mats: Vec<Matrix> = (0..p.query_size()).map(|_| linalg::identity(zdim)).collect();
            for (qbar, z2bar) in choices {
                mats[qbar[0]] = swap_into(zdim, z2bar[0]);
            }
            let layout = RegisterLayout::new([("z1", p.first_size()), ("z2", zdim)])?;
            let initial = QuantumState::basis_digits(layout, &[z1, 0])?;
            ProverStrategy::single_copy("optimal", initial, Some("z1"), &["z2"], alloc::vec![(alloc::vec!["z2"], mats)])
        }
    }
}

/// Best of a declared family of provers: `(index, exact success)`, first
/// index on ties.
pub fn optimal_over(rep: &RepeatedProtocol, provers: &[ProverStrategy]) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in provers.iter().enumerate() {
        let v = success_probability(rep, s)?;
        if best.map_or(true, |b| v > b.1 + 1e-12) {
            best = Some((i, v));
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("empty prover family".into()))
}
