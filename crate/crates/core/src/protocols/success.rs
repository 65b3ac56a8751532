use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Protocol, ProverStrategy, RepeatedProtocol, Transcript};
use crate::hilbert::local::gather;
use crate::hilbert::RegisterLayout;
use crate::linalg::{self, Matrix};
use crate::{Error, Result};

/// Residual success operator on the prover's current registers.
#[derive(Clone, Debug)]
pub struct Residual {
    pub layout: RegisterLayout,
    pub operator: Matrix,
}

/// All tuples of `[sizes[0]] x [sizes[1]] x ...`, last coordinate fastest.
pub fn enumerate_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = sizes.iter().product();
    (0..total)
        .map(|mut n| {
            let mut t = alloc::vec![0; sizes.len()];
            for (slot, &s) in t.iter_mut().zip(sizes).rev() {
                *slot = n % s;
                n /= s;
            }
            t
        })
        .collect()
}

/// `⊕_z |z⟩⟨z| ⊗ block(z)` where `z` ranges over joint values of `registers`
/// and each block acts on `layout` without them.
fn embed(layout: &RegisterLayout, registers: &[String], mut block: impl FnMut(&[usize]) -> Result<Matrix>) -> Result<Matrix> {
    let pos = layout.positions(registers)?;
    let sub = layout.select(registers)?;
    let g = gather(layout, &pos);
    let mut out = linalg::zeros(layout.dim());
    for z in 0..g.target_dim {
        let b = block(&sub.digits(z))?;
        if b.nrows() != g.groups.len() {
            return Err(Error::Dimension("embedded block has the wrong dimension".into()));
        }
        for (a, ga) in g.groups.iter().enumerate() {
            for (bb, gb) in g.groups.iter().enumerate() {
                out[(ga[z], gb[z])] = b[(a, bb)];
            }
        }
    }
    Ok(out)
}

fn public_of(rep: &RepeatedProtocol) -> Result<&super::PublicCoinProtocol> {
    match rep.base() {
        Protocol::PublicCoin(p) => Ok(p),
        Protocol::ThreeMessage(_) => Err(Error::InvalidParameter("expected a public-coin protocol".into())),
    }
}

fn three_of(rep: &RepeatedProtocol) -> Result<&super::ThreeMessageProtocol> {
    match rep.base() {
        Protocol::ThreeMessage(p) => Ok(p),
        Protocol::PublicCoin(_) => Err(Error::InvalidParameter("expected a three-message protocol".into())),
    }
}

fn check_prover(rep: &RepeatedProtocol, prover: &ProverStrategy) -> Result<()> {
    if prover.copies() != rep.k() || prover.rounds() != rep.base().response_rounds() {
        return Err(Error::Dimension(alloc::format!(
            "prover has {} copies and {} rounds, protocol needs {} and {}",
            prover.copies(),
            prover.rounds(),
            rep.k(),
            rep.base().response_rounds()
        )));
    }
    Ok(())
}

/// Layout at the start of public-coin round `round`: responses of earlier
/// rounds have been measured and dropped.
pub(crate) fn public_layout(prover: &ProverStrategy, round: usize) -> Result<RegisterLayout> {
    let mut dropped: Vec<String> = Vec::new();
    for r in 0..round {
        dropped.extend(prover.response_registers(r).iter().cloned());
    }
    prover.layout().without(&dropped)
}

/// `U(q̄)† [⊕_z̄ S_{ℓ+1}(τ q̄ z̄)] U(q̄)` for round `ℓ = prefix.queries.len()`.
pub fn public_query_operator(
    rep: &RepeatedProtocol,
    prover: &ProverStrategy,
    prefix: &Transcript,
    qbar: &[usize],
) -> Result<Residual> {
    let p = public_of(rep)?;
    check_prover(rep, prover)?;
    let round = prefix.queries.len();
    if round >= p.rounds() || prefix.responses.len() != round {
        return Err(Error::InvalidParameter(alloc::format!("round {round} out of range")));
    }
    if qbar.len() != rep.k() || qbar.iter().any(|&q| q >= p.query_size(round)) {
        return Err(Error::Dimension("query vector outside Q^k".into()));
    }
    let layout = public_layout(prover, round)?;
    let regs = prover.response_registers(round);
    let mut x = embed(&layout, regs, |zbar| {
        let mut next = prefix.clone();
        next.queries.push(qbar.to_vec());
        next.responses.push(zbar.to_vec());
        if round + 1 == p.rounds() {
            let passed = rep.accept(&next)?;
            let dim = layout.without(regs)?.dim();
            Ok(if passed { linalg::identity(dim) } else { linalg::zeros(dim) })
        } else {
            Ok(public_residual_operator(rep, prover, &next)?.operator)
        }
    })?;
    for g in prover.gates(round, qbar)?.iter().rev() {
        g.heisenberg(&layout, &mut x)?;
    }
    Ok(Residual { layout, operator: linalg::hermitian_part(&x) })
}

/// `S_ℓ(τ)`: success probability of the prover over uniform continuations
/// of the prefix `τ` (threshold verdict), as an operator on the registers
/// present at the start of round `ℓ = prefix.queries.len()`. A complete
/// prefix gives `Accept(τ)·I`.
pub fn public_residual_operator(rep: &RepeatedProtocol, prover: &ProverStrategy, prefix: &Transcript) -> Result<Residual> {
    let p = public_of(rep)?;
    check_prover(rep, prover)?;
    let round = prefix.queries.len();
    if round == p.rounds() {
        let layout = public_layout(prover, round)?;
        let dim = layout.dim();
        let op = if rep.accept(prefix)? { linalg::identity(dim) } else { linalg::zeros(dim) };
        return Ok(Residual { layout, operator: op });
    }
    let sizes = alloc::vec![p.query_size(round); rep.k()];
    let all = enumerate_tuples(&sizes);
    let layout = public_layout(prover, round)?;
    let mut total = linalg::zeros(layout.dim());
    for qbar in &all {
        total += public_query_operator(rep, prover, prefix, qbar)?.operator;
    }
    Ok(Residual { layout, operator: total.unscale(all.len() as f64) })
}

/// For fixed first messages, the verifier randomness vectors grouped by the
/// query vector they produce, each with its probability.
pub fn three_query_groups(rep: &RepeatedProtocol, z1bar: &[usize]) -> Result<BTreeMap<Vec<usize>, Vec<(Vec<usize>, f64)>>> {
    let p = three_of(rep)?;
    if z1bar.len() != rep.k() {
        return Err(Error::Dimension("first message width differs from k".into()));
    }
    let all = enumerate_tuples(&alloc::vec![p.randomness(); rep.k()]);
    let w = 1.0 / all.len() as f64;
    let mut groups: BTreeMap<Vec<usize>, Vec<(Vec<usize>, f64)>> = BTreeMap::new();
    for rbar in all {
        let qbar: Vec<usize> = rbar.iter().zip(z1bar).map(|(&r, &z1)| p.query_of(r, z1)).collect();
        groups.entry(qbar).or_default().push((rbar, w));
    }
    Ok(groups)
}

/// Layout after the first messages have been measured and dropped.
pub(crate) fn three_layout(prover: &ProverStrategy) -> Result<RegisterLayout> {
    match prover.first_registers() {
        Some(f) => prover.layout().without(f),
        None => Ok(prover.layout().clone()),
    }
}

/// Success operator of the three-message prover once `z̄_1` is fixed:
/// `Σ_q̄ U_q̄† D_q̄ U_q̄`, with `D_q̄` diagonal over `𝓩_2` holding the
/// probability mass of `r̄ → q̄` whose threshold verdict accepts.
pub fn three_success_operator(rep: &RepeatedProtocol, prover: &ProverStrategy, z1bar: &[usize]) -> Result<Residual> {
    check_prover(rep, prover)?;
    let layout = three_layout(prover)?;
    let regs = prover.response_registers(0);
    let pos = layout.positions(regs)?;
    let sub = layout.select(regs)?;
    let g = gather(&layout, &pos);
    let mut total = linalg::zeros(layout.dim());
    for (qbar, members) in three_query_groups(rep, z1bar)? {
        let mut diag = alloc::vec![0.0; layout.dim()];
        for z in 0..g.target_dim {
            let z2bar = sub.digits(z);
            let mass: f64 = members
                .iter()
                .filter(|(rbar, _)| {
                    let tr = Transcript {
                        first: Some(z1bar.to_vec()),
                        coins: Some(rbar.clone()),
                        queries: alloc::vec![qbar.clone()],
                        responses: alloc::vec![z2bar.clone()],
                        aborted: false,
                        verdicts: None,
                    };
                    rep.accept(&tr).unwrap_or(false)
                })
                .map(|(_, w)| w)
                .sum();
            for grp in &g.groups {
                diag[grp[z]] = mass;
            }
        }
        let mut x = linalg::from_real_diagonal(&diag);
        for gate in prover.gates(0, &qbar)?.iter().rev() {
            gate.heisenberg(&layout, &mut x)?;
        }
        total += x;
    }
    Ok(Residual { layout, operator: linalg::hermitian_part(&total) })
}

/// Exact acceptance probability of the prover against the repeated verifier.
pub fn success_probability(rep: &RepeatedProtocol, prover: &ProverStrategy) -> Result<f64> {
    check_prover(rep, prover)?;
    let op = match rep.base() {
        Protocol::PublicCoin(_) => public_residual_operator(rep, prover, &Transcript::default())?.operator,
        Protocol::ThreeMessage(p) => match prover.first_registers() {
            Some(first) => embed(prover.layout(), first, |z1bar| {
                if z1bar.iter().any(|&z| z >= p.first_size()) {
                    return Ok(linalg::zeros(prover.layout().without(first)?.dim()));
                }
                Ok(three_success_operator(rep, prover, z1bar)?.operator)
            })?,
            None => three_success_operator(rep, prover, &alloc::vec![0; rep.k()])?.operator,
        },
    };
    Ok(prover.initial().expectation(&op))
}

