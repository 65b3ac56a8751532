use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ReductionKind, ReductionParams};
use crate::measure::CallCount;
use crate::protocols::Transcript;

/// Why a run returned `(i, ⊥)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortCause {
    Step2Exhausted,
    PrepareLow,
    CheckcoinsExhausted,
    SoftdecisionExhausted,
}

/// One copy of the initial state tried in step 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyAttempt {
    pub copy: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first: Option<Vec<usize>>,
    pub value: f64,
}

/// One iteration `s` of the inner loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub s: usize,
    /// The sampled (public-coin) or completed (three-message) query vector.
    pub qbar: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_minus_i: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<u64>,
    pub p_measure: f64,
    pub p_prepare: f64,
    pub prepare_threshold: f64,
    /// CheckCoins value, or the bit `b` of SoftDecisionProj.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection_outcome: Option<usize>,
    pub accepted: bool,
    pub prepare_t: Option<usize>,
    pub calls: CallCount,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    /// 1-based round number.
    pub round: usize,
    pub external_query: usize,
    pub attempts: Vec<Attempt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionRunRecord {
    pub seed: u64,
    pub trial: u64,
    pub kind: ReductionKind,
    pub i: usize,
    pub step2: Vec<CopyAttempt>,
    pub rounds: Vec<RoundLog>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort_cause: Option<AbortCause>,
    /// `τ_m`, or `None` for `⊥`. For three-message runs `coins` holds the
    /// verifier randomness only when the external session revealed it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Transcript>,
    /// Per-coordinate verdicts on `τ`, when computable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_verdict: Option<bool>,
    /// Three-message runs: SoftDecision re-evaluated on the final `τ` with the
    /// `(i, r^{(−i)}, ω)` of the last projection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_decision: Option<bool>,
    pub conformant: bool,
    pub calls: CallCount,
}

impl ReductionRunRecord {
    pub fn completed(&self) -> bool {
        self.abort_cause.is_none() && self.transcript.is_some()
    }

    /// Every logged query vector carries the external query at coordinate `i`.
    pub fn embedding_ok(&self) -> bool {
        self.rounds
            .iter()
            .all(|r| r.attempts.iter().all(|a| a.qbar.get(self.i) == Some(&r.external_query)))
            && self.transcript.as_ref().map_or(true, |t| {
                t.queries.iter().zip(&self.rounds).all(|(q, r)| q.get(self.i) == Some(&r.external_query))
            })
    }

    /// Logged Prepare thresholds equal the formula for each round and attempt.
    pub fn thresholds_ok(&self, params: &ReductionParams) -> bool {
        self.rounds.iter().all(|r| {
            r.attempts.iter().all(|a| (a.prepare_threshold - params.prepare_threshold(r.round, a.s)).abs() <= 1e-15)
        })
    }

    /// The last attempt of a completed run is the accepting one.
    pub fn last_attempts_accepted(&self) -> bool {
        !self.completed() || self.rounds.iter().all(|r| r.attempts.last().is_some_and(|a| a.accepted))
    }
}
