use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::external::VerifierSession;
use super::public::check_inputs;
use super::record::{AbortCause, Attempt, CopyAttempt, ReductionRunRecord, RoundLog};
use super::{complete_query, softdecision, ReductionKind, ReductionParams, SoftDecisionFamily};
use crate::hilbert::QuantumState;
use crate::measure::{CallCount, ValueFamily};
use crate::memoryless::{prepare, repair_prime};
use crate::protocols::{three_success_operator, Protocol, ProverStrategy, RepeatedProtocol, Transcript};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// The three-message reduction `𝒜`: fixes first messages from a copy whose
/// estimated value is high, then looks for second messages through
/// SoftDecisionProj with forgetful repair in between.
pub fn run_three_message_reduction(
    prover: &ProverStrategy,
    rep: &RepeatedProtocol,
    params: &ReductionParams,
    external: &mut dyn VerifierSession,
    copies: &[QuantumState],
    rng: &mut StreamRng,
) -> Result<ReductionRunRecord> {
    check_inputs(prover, rep, params, copies, ReductionKind::ThreeMessage)?;
    let Protocol::ThreeMessage(base) = rep.base() else {
        return Err(Error::InvalidParameter("expected a three-message protocol".into()));
    };
    let k = rep.k();
    let (eps, delta, nu) = (params.epsilon(), params.delta(), params.nu());
    let flood = params.flooding(prover.qubits())?;
    let iter = params.iter();
    let i = rng.below(k);
    let mut rec = ReductionRunRecord {
        seed: rng.seed(),
        trial: rng.trial(),
        kind: ReductionKind::ThreeMessage,
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

    // step 2
    let mut fixed = None;
    let mut families: BTreeMap<Vec<usize>, ValueFamily> = BTreeMap::new();
    for (s, copy) in copies.iter().take(iter).enumerate() {
        let (z1bar, rho0) = match prover.first_registers() {
            Some(first) => copy.measure_registers(first, true, rng)?,
            None => (alloc::vec![0; k], copy.clone()),
        };
        let family = match families.get(&z1bar) {
            Some(f) => f.clone(),
            None => {
                let res = three_success_operator(rep, prover, &z1bar)?;
                let f = ValueFamily::from_operator(res.layout, res.operator)?;
                families.insert(z1bar.clone(), f.clone());
                f
            }
        };
        let out = family.measurement(eps, delta)?.measure(&rho0, rng);
        rec.calls.value_measurements += 1;
        rec.step2.push(CopyAttempt { copy: s, first: Some(z1bar.clone()), value: out.value });
        if out.value >= params.step2_threshold() {
            fixed = Some((z1bar, family, out.state));
            break;
        }
    }
    let Some((z1bar, family, mut rho)) = fixed else { return abort(rec, AbortCause::Step2Exhausted) };
    external.first_message(z1bar[i])?;

    let m = family.measurement(eps, delta)?;
    let projections = SoftDecisionFamily::new(rep, prover, &z1bar, params.rule, nu)?;
    let q = external.query()?;
    let mut log = RoundLog { round: 1, external_query: q, attempts: Vec::new(), response: None };
    let mut accepted = None;
    for s in 1..=iter {
        let r_minus_i: Vec<usize> = (0..k - 1).map(|_| rng.below(base.randomness())).collect();
        let omega = rand::RngCore::next_u64(rng);
        let qbar = complete_query(rep, &z1bar, i, &r_minus_i, q)?;
        let pi = projections.member(i, &r_minus_i, q, omega)?;
        let out = m.measure(&rho, rng);
        let mut calls = CallCount { value_measurements: 1, projections: 0 };
        let prep = prepare(&family, &projections, &out.state, &flood, rng)?;
        calls += prep.log.calls;
        let threshold = params.prepare_threshold(1, s);
        let mut attempt = Attempt {
            s,
            qbar: qbar.clone(),
            r_minus_i: Some(r_minus_i.clone()),
            omega: Some(omega),
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
        let (b, sigma) = pi.measure(&prep.state, rng);
        attempt.calls.projections += 1;
        attempt.projection_value = Some(b as f64);
        attempt.projection_outcome = Some(b);
        if b == 1 {
            attempt.accepted = true;
            rec.calls += attempt.calls;
            log.attempts.push(attempt);
            accepted = Some((qbar, r_minus_i, omega, sigma));
            break;
        }
        if s == iter {
            rec.calls += attempt.calls;
            log.attempts.push(attempt);
            rec.rounds.push(log);
            return abort(rec, AbortCause::SoftdecisionExhausted);
        }
        let rep_out = repair_prime(&family, &projections, &pi, 0, &sigma, prep.value, &flood, rng)?;
        attempt.calls += rep_out.log.calls;
        rec.calls += attempt.calls;
        log.attempts.push(attempt);
        rho = rep_out.state;
    }

    // step 6: q̄* is the query vector assembled for the successful projection
    let (qbar, r_minus_i, omega, sigma) = accepted.expect("loop either accepts or aborts");
    let state = sigma.apply_all(&prover.gates(0, &qbar)?)?;
    let (z2bar, _) = state.measure_registers(prover.response_registers(0), true, rng)?;
    external.respond(z2bar[i])?;
    log.response = Some(z2bar.clone());
    rec.rounds.push(log);

    let mut tau = Transcript {
        first: Some(z1bar),
        coins: None,
        queries: alloc::vec![qbar],
        responses: alloc::vec![z2bar],
        aborted: false,
        verdicts: None,
    };
    rec.final_decision = Some(softdecision(rep, params.rule, nu, i, &r_minus_i, &tau, omega)?);
    if let Some(r_i) = external.revealed_randomness() {
        let mut rbar = r_minus_i;
        rbar.insert(i, r_i);
        tau.coins = Some(rbar);
        let verdicts = rep.coordinate_verdicts(&tau)?;
        rec.accepted = Some(crate::protocols::threshold_verdict(&verdicts, rep.t())?);
        tau.verdicts = Some(verdicts.clone());
        rec.verdicts = Some(verdicts);
    }
    rec.transcript = Some(tau);
    rec.external_verdict = external.verdict();
    Ok(rec)
}
