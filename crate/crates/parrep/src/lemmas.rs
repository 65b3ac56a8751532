//! Suites of exact lemma checks.

use anyhow::Result;
use parrep_core::harness::{bad_correlations_law, flooding_check, hppw_check, raz_check, LemmaCheck};
use parrep_core::memoryless::{forgetfulness_distance, instances, FloodingParams};
use parrep_core::rng::StreamRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::LemmaSuite;

/// Parameter of the shipped recording instance; among the angles tried it
/// leaks the most.
pub const RECORDING_THETA: f64 = 0.2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub label: String,
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckRecord {
    fn new(label: String, c: LemmaCheck) -> Self {
        CheckRecord { label, lhs: c.lhs, bound: c.bound, pass: c.pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: LemmaSuite,
    pub checks: usize,
    pub passed: usize,
    /// Largest `lhs - bound` seen.
    pub max_excess: f64,
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    fn new(suite: LemmaSuite, records: Vec<CheckRecord>) -> Self {
        let passed = records.iter().filter(|r| r.pass).count();
        let max_excess = records.iter().map(|r| r.lhs - r.bound).fold(f64::NEG_INFINITY, f64::max);
        SuiteReport { suite, checks: records.len(), passed, max_excess, records }
    }

    pub fn all_pass(&self) -> bool {
        self.checks > 0 && self.passed == self.checks
    }
}

fn index_of(bits: &[usize]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | b)
}

/// Every nonempty event over `k` fair bits, for each `k` in `sizes`.
pub fn raz_suite(sizes: &[usize]) -> Result<SuiteReport> {
    let mut records = Vec::new();
    for &k in sizes {
        anyhow::ensure!((1..=4).contains(&k), "raz sweep supports 1 <= k <= 4");
        let fair = vec![vec![0.5, 0.5]; k];
        let events = 1u64 << (1 << k);
        let batch: Vec<CheckRecord> = (1..events)
            .into_par_iter()
            .map(|mask| {
                let c = raz_check(&fair, &|x| mask >> index_of(x) & 1 == 1)?;
                Ok(CheckRecord::new(format!("raz k={k} event={mask:#x}"), c))
            })
            .collect::<Result<_>>()?;
        records.extend(batch);
    }
    Ok(SuiteReport::new(LemmaSuite::Raz, records))
}

/// Every one-bit memory map for `t <= exhaustive`, then `samples` uniformly
/// random maps for each `t` in `sampled`.
pub fn flooding_suite(exhaustive: usize, sampled: &[usize], samples: usize, seed: u64) -> Result<SuiteReport> {
    anyhow::ensure!(exhaustive <= 4, "exhaustive flooding sweep supports t <= 4");
    let fair = [0.5, 0.5];
    let mut records = Vec::new();
    for t in 1..=exhaustive {
        let batch: Vec<CheckRecord> = (0u64..1 << (1 << t))
            .into_par_iter()
            .map(|table| {
                let c = flooding_check(1, t, &fair, &|y| (table >> index_of(y) & 1) as usize)?;
                Ok(CheckRecord::new(format!("flooding t={t} map={table:#x}"), c))
            })
            .collect::<Result<_>>()?;
        records.extend(batch);
    }
    for &t in sampled {
        anyhow::ensure!(t <= 12, "sampled flooding sweep supports t <= 12");
        let batch: Vec<CheckRecord> = (0..samples as u64)
            .into_par_iter()
            .map(|n| {
                let mut rng = StreamRng::new(seed, (t as u64) << 32 | n);
                let table: Vec<usize> = (0..1usize << t).map(|_| rng.below(2)).collect();
                let c = flooding_check(1, t, &fair, &|y| table[index_of(y)])?;
                Ok(CheckRecord::new(format!("flooding t={t} sample={n}"), c))
            })
            .collect::<Result<_>>()?;
        records.extend(batch);
    }
    Ok(SuiteReport::new(LemmaSuite::Flooding, records))
}

/// Bad-correlations laws over `k <= max_k`, every `t`, and `random_laws`
/// random joint laws with `k <= max_k`.
pub fn hppw_suite(max_k: usize, random_laws: usize, seed: u64) -> Result<SuiteReport> {
    let mut records = Vec::new();
    for k in 1..=max_k {
        for delta in [0.5, 0.7, 0.9] {
            let law = bad_correlations_law(k, delta)?;
            for nu in [0.5, 1.0, 2.0] {
                for t in 1..=k {
                    let c = hppw_check(&law, nu, t)?;
                    records.push(CheckRecord::new(format!("hppw bad-correlations k={k} delta={delta} nu={nu} t={t}"), c));
                }
            }
        }
    }
    let batch: Vec<CheckRecord> = (0..random_laws as u64)
        .into_par_iter()
        .map(|n| {
            let mut rng = StreamRng::new(seed, n);
            let k = 1 + rng.below(max_k);
            // cubing spreads the weights so some laws are far from uniform
            let mut law: Vec<f64> = (0..1 << k).map(|_| rng.uniform().powi(3)).collect();
            let s: f64 = law.iter().sum();
            law.iter_mut().for_each(|x| *x /= s);
            let t = 1 + rng.below(k);
            let nu = [0.5, 1.0, 2.0][rng.below(3)];
            let c = hppw_check(&law, nu, t)?;
            Ok(CheckRecord::new(format!("hppw random law={n} k={k} nu={nu} t={t}"), c))
        })
        .collect::<Result<_>>()?;
    records.extend(batch);
    Ok(SuiteReport::new(LemmaSuite::Hppw, records))
}

/// Exact forgetfulness distance on the recording instance and `random`
/// seeded two-qubit instances, `ε = 0.1`, `δ = 0.05`, `η = 0.5`.
pub fn forgetfulness_suite(random: usize, seed: u64) -> Result<SuiteReport> {
    let mut insts = vec![("recording".to_string(), instances::recording_instance(RECORDING_THETA)?)];
    for n in 0..random as u64 {
        let mut rng = StreamRng::new(seed, n);
        insts.push((format!("random={n}"), instances::random_instance(2, 2, &mut rng)?));
    }
    let records = insts
        .into_par_iter()
        .map(|(label, inst)| {
            let params = FloodingParams::new(0.1, 0.05, 0.5, inst.ell)?;
            let r = forgetfulness_distance(&inst.value, &inst.family, &inst.state, &params)?;
            let c = LemmaCheck { lhs: r.distance, bound: r.bound, pass: r.distance <= r.bound + 1e-6 && r.conformant };
            Ok(CheckRecord::new(format!("forgetfulness {label} T={}", r.rounds), c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteReport::new(LemmaSuite::Forgetfulness, records))
}

/// Default sweep for each suite.
pub fn run_suite(suite: LemmaSuite, size: Option<usize>, seed: u64) -> Result<SuiteReport> {
    match suite {
        LemmaSuite::Raz => match size {
            Some(k) => raz_suite(&[k]),
            None => raz_suite(&[2, 3]),
        },
        LemmaSuite::Flooding => flooding_suite(size.unwrap_or(4), &[5, 6, 7, 8], 10_000, seed),
        LemmaSuite::Hppw => hppw_suite(size.unwrap_or(6), 500, seed),
        LemmaSuite::Forgetfulness => forgetfulness_suite(size.unwrap_or(5), seed),
    }
}
