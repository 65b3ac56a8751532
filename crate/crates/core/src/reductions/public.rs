use alloc::vec::Vec;

use super::external::VerifierSession;
use super::record::{AbortCause, Attempt, CopyAttempt, ReductionRunRecord, RoundLog};
use super::{CheckCoinsFamily, ReductionKind, ReductionParams};
use crate::hilbert::QuantumState;
use crate::measure::{CallCount, ValueFamily};
use crate::memoryless::{prepare, repair_prime};
use crate::protocols::{public_residual_operator, Protocol, ProverStrategy, RepeatedProtocol, Transcript};
use crate::rng::StreamRng;
use crate::{Error, Result};

fn residual_family(rep: &RepeatedProtocol, prover: &ProverStrategy, tau: &Transcript) -> Result<ValueFamily> {
    let res = public_residual_operator(rep, prover, tau)?;
    ValueFamily::from_operator(res.layout, res.operator)
}

pub(crate) fn check_inputs(
    prover: &ProverStrategy,
    rep: &RepeatedProtocol,
    params: &ReductionParams,
    copies: &[QuantumState],
    kind: ReductionKind,
) -> Result<()> {
    params.validate()?;
    if params.kind != kind {
        return Err(Error::InvalidParameter("parameters were derived for the other reduction".into()));
    }
    if params.k != rep.k() || params.t != rep.t() || params.m != rep.base().response_rounds() {
        return Err(Error::InvalidParameter("parameters disagree with the repeated protocol".into()));
    }
    if prover.copies() != rep.k() {
        return Err(Error::Dimension("prover does not play k copies".into()));
    }
    if copies.len() < params.iter() {
        return Err(Error::InvalidParameter(alloc::format!("need {} copies of the initial state, got {}", params.iter(), copies.len())));
    }
    if copies.iter().any(|c| c.layout() != prover.layout()) {
        return Err(Error::Dimension("copies do not match the prover's registers".into()));
    }
    Ok(())
}

/// The public-coin reduction `𝒜`: simulates the `k`-fold prover against a
/// single-fold verifier by embedding its queries at a random coordinate `i`
/// and repairing forgetfully after each rejected CheckCoins.
pub fn run_public_coin_reduction(
    prover: &ProverStrategy,
    rep: &RepeatedProtocol,
    params: &ReductionParams,
    external: &mut dyn VerifierSession,
    copies: &[QuantumState],
    rng: &mut StreamRng,
) -> Result<ReductionRunRecord> {
    check_inputs(prover, rep, params, copies, ReductionKind::PublicCoin)?;
    let Protocol::PublicCoin(base) = rep.base() else {
        return Err(Error::InvalidParameter("expected a public-coin protocol".into()));
    };
    let (eps, delta) = (params.epsilon(), params.delta());
    let flood = params.flooding(prover.qubits())?;
    let iter = params.iter();
    let i = rng.below(rep.k());
    let mut rec = ReductionRunRecord {
        seed: rng.seed(),
        trial: rng.trial(),
        kind: ReductionKind::PublicCoin,
        i,
        step2: Vec::new(),
        rounds: Vec::new(),
        abort_cause: None,
        transcript: None,
        verdicts: None,
        accepted: None,
        external_verdict: None,
        final_decision: None,
        conformant: params.desk.is_none() && flood.is_conformant(),
        calls: CallCount::default(),
    };
    let abort = |mut rec: ReductionRunRecord, cause| {
        rec.abort_cause = Some(cause);
        Ok(rec)
    };

    let mut tau = Transcript::default();
    let mut family = residual_family(rep, prover, &tau)?;
    let mut m = family.measurement(eps, delta)?;
    let mut rho = None;
    for (s, copy) in copies.iter().take(iter).enumerate() {
        let out = m.measure(copy, rng);
        rec.calls.value_measurements += 1;
        rec.step2.push(CopyAttempt { copy: s, first: None, value: out.value });
        if out.value >= params.step2_threshold() {
            rho = Some(out.state);
            break;
        }
    }
    let Some(mut rho) = rho else { return abort(rec, AbortCause::Step2Exhausted) };

    for round in 0..base.rounds() {
        let ell = round + 1;
        if round > 0 {
            family = residual_family(rep, prover, &tau)?;
            m = family.measurement(eps, delta)?;
        }
        let checks = CheckCoinsFamily::new(rep, prover, &tau, eps, delta)?;
        let q = external.query()?;
        let mut log = RoundLog { round: ell, external_query: q, attempts: Vec::new(), response: None };
        let mut accepted = None;
        for s in 1..=iter {
            let qbar = checks.sample_conditioned(i, q, rng);
            let pi = checks.member(&qbar)?;
            let out = m.measure(&rho, rng);
            let mut calls = CallCount { value_measurements: 1, projections: 0 };
            let prep = prepare(&family, &checks, &out.state, &flood, rng)?;
            calls += prep.log.calls;
            let threshold = params.prepare_threshold(ell, s);
            let mut attempt = Attempt {
                s,
                qbar: qbar.clone(),
                r_minus_i: None,
                omega: None,
                p_measure: out.value,
                p_prepare: prep.value,
                prepare_threshold: threshold,
                projection_value: None,
                projection_outcome: None,
                accepted: false,
                prepare_t: prep.log.sampled_t,
                calls,
            };
            if prep.value < threshold {
                rec.calls += attempt.calls;
                log.attempts.push(attempt);
                rec.rounds.push(log);
                return abort(rec, AbortCause::PrepareLow);
            }
            let (y, sigma) = pi.measure(&prep.state, rng);
            attempt.calls.projections += 1;
            let p = checks.grid().value(y);
            attempt.projection_value = Some(p);
            attempt.projection_outcome = Some(y);
            if p >= params.checkcoins_threshold(ell) {
                attempt.accepted = true;
                rec.calls += attempt.calls;
                log.attempts.push(attempt);
                accepted = Some((qbar, sigma));
                break;
            }
            if s == iter {
                rec.calls += attempt.calls;
                log.attempts.push(attempt);
                rec.rounds.push(log);
                return abort(rec, AbortCause::CheckcoinsExhausted);
            }
            let rep_out = repair_prime(&family, &checks, &pi, y, &sigma, prep.value, &flood, rng)?;
            attempt.calls += rep_out.log.calls;
            rec.calls += attempt.calls;
            log.attempts.push(attempt);
            rho = rep_out.state;
        }
        let (qbar, sigma) = accepted.expect("loop either accepts or aborts");
        // the coherent evaluation is undone; apply the round unitary and
        // measure the responses
        let state = sigma.apply_all(&prover.gates(round, &qbar)?)?;
        let (zbar, next) = state.measure_registers(prover.response_registers(round), true, rng)?;
        external.respond(zbar[i])?;
        log.response = Some(zbar.clone());
        rec.rounds.push(log);
        tau.queries.push(qbar);
        tau.responses.push(zbar);
        rho = next;
    }
    let verdicts = rep.coordinate_verdicts(&tau)?;
    rec.accepted = Some(crate::protocols::threshold_verdict(&verdicts, rep.t())?);
    tau.verdicts = Some(verdicts.clone());
    rec.verdicts = Some(verdicts);
    rec.transcript = Some(tau);
    rec.external_verdict = external.verdict();
    Ok(rec)
}
