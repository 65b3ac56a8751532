use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::PvmSampler;
use crate::hilbert::{Pvm, QuantumState};
use crate::math;
use crate::measure::{repair, CallCount, ValueFamily, ValueMeasurement};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Parameters of the flooding procedures. `ell` is the size in qubits of the
/// state being flooded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloodingParams {
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
    pub ell: f64,
    /// Replaces the round count `ceil(4ℓ/η³)`. Runs using it are not
    /// covered by the forgetfulness guarantee.
    pub rounds_override: Option<usize>,
}

impl FloodingParams {
    pub fn new(epsilon: f64, delta: f64, eta: f64, ell: f64) -> Result<Self> {
        let p = Self { epsilon, delta, eta, ell, rounds_override: None };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds_override = Some(rounds);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("epsilon {} outside (0, 1]", self.epsilon)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("delta {} outside (0, 1)", self.delta)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("eta {} outside (0, 1]", self.eta)));
        }
        if !(self.ell >= 0.0) {
            return Err(Error::InvalidParameter("state size must be non-negative".into()));
        }
        if self.rounds_override == Some(0) {
            return Err(Error::InvalidParameter("at least one flooding round".into()));
        }
        Ok(())
    }

    pub fn conformant_rounds(&self) -> usize {
        math::ceil_usize(4.0 * self.ell / (self.eta * self.eta * self.eta) - 1e-9).max(1)
    }

    pub fn is_conformant(&self) -> bool {
        self.rounds_override.map_or(true, |t| t >= self.conformant_rounds())
    }

    /// `T`.
    pub fn rounds(&self) -> usize {
        self.rounds_override.unwrap_or_else(|| self.conformant_rounds())
    }

    pub fn inner_epsilon(&self) -> f64 {
        self.epsilon / (2.0 * self.rounds() as f64)
    }

    pub fn inner_delta(&self) -> f64 {
        let t = self.rounds() as f64;
        self.delta * self.delta / (64.0 * t * t)
    }

    pub fn inner_eta(&self) -> f64 {
        self.eta / (2.0 * self.rounds() as f64)
    }

    /// `8 (T + T²/η)`.
    pub fn call_bound(&self) -> f64 {
        let t = self.rounds() as f64;
        8.0 * (t + t * t / self.eta)
    }

    pub fn inner_measurement(&self, family: &ValueFamily) -> Result<ValueMeasurement> {
        family.measurement(self.inner_epsilon(), self.inner_delta())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Procedure {
    Prepare,
    RepairPrime,
}

/// One flooding round: measured value, sampled projection and its outcome,
/// and how the repair went.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloodRecord {
    pub value: f64,
    pub member: u64,
    pub outcome: usize,
    pub alternations: usize,
    pub exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloodLog {
    pub procedure: Procedure,
    pub rounds: usize,
    /// The uniformly sampled stopping round `t` (prepare only).
    pub sampled_t: Option<usize>,
    /// The repair of the real projection (repair-prime only).
    pub initial_repair: Option<FloodRecord>,
    pub floods: Vec<FloodRecord>,
    pub final_value: f64,
    pub calls: CallCount,
}

#[derive(Clone, Debug)]
pub struct Flooded {
    pub state: QuantumState,
    pub value: f64,
    pub log: FloodLog,
}

fn flood_round(
    m: &ValueMeasurement,
    sampler: &dyn PvmSampler,
    state: QuantumState,
    eta: f64,
    calls: &mut CallCount,
    rng: &mut StreamRng,
) -> Result<(QuantumState, FloodRecord)> {
    let out = m.measure(&state, rng);
    calls.value_measurements += 1;
    let (member, pi) = sampler.sample(rng)?;
    let (y, s) = pi.measure(&out.state, rng);
    calls.projections += 1;
    let rep = repair(m, &pi, y, s, out.value, eta, rng);
    *calls += rep.calls;
    let rec = FloodRecord { value: out.value, member, outcome: y, alternations: rep.alternations, exhausted: rep.exhausted };
    Ok((rep.state, rec))
}

/// Flooded preparation: returns a state close to an eigenstate of the value
/// measurement together with its value, while hiding how many random
/// projections were applied.
pub fn prepare(
    family: &ValueFamily,
    sampler: &dyn PvmSampler,
    state: &QuantumState,
    params: &FloodingParams,
    rng: &mut StreamRng,
) -> Result<Flooded> {
    params.validate()?;
    let m = params.inner_measurement(family)?;
    let t = 1 + rng.below(params.rounds());
    let mut calls = CallCount::default();
    let mut sigma = state.clone();
    let mut floods = Vec::with_capacity(t - 1);
    for _ in 1..t {
        let (s, rec) = flood_round(&m, sampler, sigma, params.inner_eta(), &mut calls, rng)?;
        sigma = s;
        floods.push(rec);
    }
    let fin = m.measure(&sigma, rng);
    calls.value_measurements += 1;
    Ok(Flooded {
        state: fin.state,
        value: fin.value,
        log: FloodLog {
            procedure: Procedure::Prepare,
            rounds: params.rounds(),
            sampled_t: Some(t),
            initial_repair: None,
            floods,
            final_value: fin.value,
            calls,
        },
    })
}

/// Repairs after the real projection `pi` returned `y`, then floods for `T`
/// rounds so the result no longer depends on `pi`.
#[allow(clippy::too_many_arguments)]
pub fn repair_prime(
    family: &ValueFamily,
    sampler: &dyn PvmSampler,
    pi: &Pvm,
    y: usize,
    state: &QuantumState,
    p_prime: f64,
    params: &FloodingParams,
    rng: &mut StreamRng,
) -> Result<Flooded> {
    params.validate()?;
    let m = params.inner_measurement(family)?;
    let eta = params.inner_eta();
    let mut calls = CallCount::default();
    let rep = repair(&m, pi, y, state.clone(), p_prime, eta, rng);
    calls += rep.calls;
    let initial = FloodRecord { value: p_prime, member: u64::MAX, outcome: y, alternations: rep.alternations, exhausted: rep.exhausted };
    let mut sigma = rep.state;
    let mut floods = Vec::with_capacity(params.rounds());
    for _ in 0..params.rounds() {
        let (s, rec) = flood_round(&m, sampler, sigma, eta, &mut calls, rng)?;
        sigma = s;
        floods.push(rec);
    }
    let fin = m.measure(&sigma, rng);
    calls.value_measurements += 1;
    Ok(Flooded {
        state: fin.state,
        value: fin.value,
        log: FloodLog {
            procedure: Procedure::RepairPrime,
            rounds: params.rounds(),
            sampled_t: None,
            initial_repair: Some(initial),
            floods,
            final_value: fin.value,
            calls,
        },
    })
}
