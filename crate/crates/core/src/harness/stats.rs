use crate::math;
use crate::protocols::{run_interaction, ProverStrategy, RepeatedProtocol};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub point: f64,
    pub low: f64,
    pub high: f64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Result<Self> {
        let (low, high) = wilson_interval(successes, trials)?;
        Ok(Estimate { successes, trials, point: successes as f64 / trials as f64, low, high })
    }

    pub fn half_width(&self) -> f64 {
        (self.high - self.low) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.low <= x && x <= self.high
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::InvalidParameter("need 0 <= successes <= trials, trials >= 1".into()));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * math::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // the interval always contains p; clamp round-off at the ends
    let low = if successes == 0 { 0.0 } else { (centre - half).max(0.0).min(p) };
    let high = if successes == trials { 1.0 } else { (centre + half).min(1.0).max(p) };
    Ok((low, high))
}

/// Acceptance frequency of `prover` against the threshold verifier, trial
/// `n` drawing from stream `(seed, n)`.
pub fn estimate_success(prover: &ProverStrategy, rep: &RepeatedProtocol, trials: u64, seed: u64) -> Result<Estimate> {
    let mut wins = 0;
    for n in 0..trials {
        let mut rng = StreamRng::new(seed, n);
        if run_interaction(prover, rep, &mut rng)?.accepted {
            wins += 1;
        }
    }
    Estimate::from_counts(wins, trials)
}
