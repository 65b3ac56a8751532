use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context, Result};
use parrep_core::harness::{reduction_floor_public, reduction_floor_three, Estimate};
use parrep_core::protocols::{catalog, repeat, success_probability, Protocol, ProverStrategy, RepeatedProtocol};
use parrep_core::reductions::{
    fresh_copies, run_public_coin_reduction, run_three_message_reduction, LiveVerifier, ParamMode, ReductionKind,
    ReductionParams, ReductionRunRecord, ResolvedParams,
};
use parrep_core::rng::StreamRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bounds::{bound_table, BoundRow};
use crate::config::{ExperimentConfig, ExperimentKind, ParamsConfig};
use crate::lemmas::{run_suite, SuiteReport};

/// Stream offset separating the external verifier's coins from the
/// reduction's own.
const EXTERNAL_STREAM: u64 = 1 << 40;

/// Everything a reduction experiment needs, resolved from a config.
pub struct ReductionSetup {
    pub base: Protocol,
    pub rep: RepeatedProtocol,
    pub prover: ProverStrategy,
    pub params: ReductionParams,
}

impl ReductionSetup {
    pub fn new(protocol: &str, prover: &str, cfg: &ParamsConfig) -> Result<Self> {
        let base = catalog::protocol(protocol)?;
        let rep = repeat(base.clone(), cfg.k, cfg.t)?;
        let prover = catalog::prover(prover, &base, cfg.k)?;
        let kind = match base {
            Protocol::PublicCoin(_) => ReductionKind::PublicCoin,
            Protocol::ThreeMessage(_) => ReductionKind::ThreeMessage,
        };
        let xi = match cfg.xi {
            Some(x) => x,
            None => success_probability(&rep, &prover)?,
        };
        let m = base.response_rounds();
        let params = match cfg.mode {
            ParamMode::Desk => ReductionParams::desk(kind, xi, cfg.k, cfg.t, m, cfg.desk_values(xi))?,
            ParamMode::Paper => {
                let lambda = cfg.lambda.ok_or_else(|| anyhow!("paper mode needs lambda"))?;
                ReductionParams::paper(kind, xi, lambda, cfg.k, cfg.t, m)?
            }
        }
        .with_rule(cfg.rule);
        Ok(ReductionSetup { base, rep, prover, params })
    }

    /// Trial `n` uses reduction stream `(seed, n)` and external stream
    /// `(seed, n + 2^40)`.
    pub fn run_trial(&self, seed: u64, trial: u64) -> Result<ReductionRunRecord> {
        let mut ext = LiveVerifier::new(self.base.clone(), StreamRng::new(seed, trial + EXTERNAL_STREAM));
        let copies = fresh_copies(&self.prover, self.params.iter());
        let mut rng = StreamRng::new(seed, trial);
        let rec = match self.params.kind {
            ReductionKind::PublicCoin => {
                run_public_coin_reduction(&self.prover, &self.rep, &self.params, &mut ext, &copies, &mut rng)?
            }
            ReductionKind::ThreeMessage => {
                run_three_message_reduction(&self.prover, &self.rep, &self.params, &mut ext, &copies, &mut rng)?
            }
        };
        Ok(rec)
    }

    /// Trials `first..first + count` in parallel, returned in trial order.
    pub fn run_trials(&self, seed: u64, first: u64, count: u64) -> Result<Vec<ReductionRunRecord>> {
        (first..first + count).into_par_iter().map(|n| self.run_trial(seed, n)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub params: ResolvedParams,
    pub runs: usize,
    pub completion: Estimate,
    /// External verdict 1 over all runs.
    pub embedded_success: Estimate,
    pub abort_causes: BTreeMap<String, usize>,
    /// Completed runs whose transcript the threshold verifier rejects.
    pub completed_rejecting: usize,
    pub embedding_failures: usize,
    pub threshold_failures: usize,
    /// Completed three-message runs whose last decision was not an accepting one.
    pub decision_failures: usize,
    /// `(t/k) · completion`.
    pub mechanics_target: f64,
    pub mechanics_pass: bool,
    /// The reduction's guaranteed success with the negligible term dropped.
    pub theorem_floor: f64,
    /// The upper interval edge reaches the floor.
    pub theorem_pass: bool,
    pub negl_dropped: bool,
}

impl ReductionSummary {
    pub fn new(setup: &ReductionSetup, records: &[ReductionRunRecord]) -> Result<Self> {
        let p = &setup.params;
        let runs = records.len() as u64;
        let completed = records.iter().filter(|r| r.completed()).count() as u64;
        let wins = records.iter().filter(|r| r.external_verdict == Some(true)).count() as u64;
        let completion = Estimate::from_counts(completed, runs)?;
        let embedded_success = Estimate::from_counts(wins, runs)?;
        let mut abort_causes = BTreeMap::new();
        for r in records {
            let key = match r.abort_cause {
                Some(c) => serde_json::to_value(c)?.as_str().unwrap_or("unknown").to_string(),
                None => "none".to_string(),
            };
            *abort_causes.entry(key).or_insert(0) += 1;
        }
        let completed_rejecting = records.iter().filter(|r| r.completed() && r.accepted == Some(false)).count();
        let embedding_failures = records.iter().filter(|r| !r.embedding_ok()).count();
        let threshold_failures = records.iter().filter(|r| !r.thresholds_ok(p)).count();
        let decision_failures = records
            .iter()
            .filter(|r| r.completed() && r.kind == ReductionKind::ThreeMessage && !three_message_decision_ok(r))
            .count();
        let mechanics_target = p.t as f64 / p.k as f64 * completion.point;
        let mechanics_pass = embedded_success.point >= mechanics_target - embedded_success.half_width();
        let theorem_floor = match p.kind {
            ReductionKind::PublicCoin => reduction_floor_public(p.xi, p.m, p.k, p.t)?,
            ReductionKind::ThreeMessage => reduction_floor_three(p.xi, p.k, p.t)?,
        };
        Ok(ReductionSummary {
            params: p.resolve(),
            runs: records.len(),
            completion,
            embedded_success,
            abort_causes,
            completed_rejecting,
            embedding_failures,
            threshold_failures,
            decision_failures,
            mechanics_target,
            mechanics_pass,
            theorem_floor,
            theorem_pass: embedded_success.high >= theorem_floor,
            negl_dropped: true,
        })
    }

    pub fn all_pass(&self) -> bool {
        self.completed_rejecting == 0
            && self.embedding_failures == 0
            && self.threshold_failures == 0
            && self.decision_failures == 0
            && self.mechanics_pass
    }
}

/// The last projection of every round accepted with bit 1, carried its
/// `(r^{(-i)}, ω)`, and SoftDecision on the final transcript agrees.
pub fn three_message_decision_ok(r: &ReductionRunRecord) -> bool {
    let k = r.transcript.as_ref().and_then(|t| t.queries.first()).map_or(0, Vec::len);
    r.final_decision == Some(true)
        && r.last_attempts_accepted()
        && r.rounds.iter().all(|round| {
            round.attempts.last().is_some_and(|a| {
                a.projection_outcome == Some(1) && a.omega.is_some() && a.r_minus_i.as_ref().is_some_and(|v| v.len() + 1 == k)
            })
        })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Summary {
    LemmaCheck { suite: crate::config::LemmaSuite, checks: usize, passed: usize, max_excess: f64, pass: bool },
    ReductionRun(Box<ReductionSummary>),
    BoundTable { rows: usize },
}

impl Summary {
    pub fn pass(&self) -> bool {
        match self {
            Summary::LemmaCheck { pass, .. } => *pass,
            Summary::ReductionRun(s) => s.all_pass(),
            Summary::BoundTable { .. } => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub records: Vec<Value>,
    pub summary: Summary,
    /// Not written to the output file.
    pub wall_clock: Duration,
}

impl ExperimentResult {
    /// Config line, one line per record, summary line.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&serde_json::to_string(&serde_json::json!({ "config": self.config }))?);
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&serde_json::json!({ "summary": self.summary }))?);
        out.push('\n');
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = self.to_jsonl()?;
        let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        f.write_all(text.as_bytes())?;
        Ok(())
    }
}

fn lemma_records(report: &SuiteReport) -> Result<Vec<Value>> {
    report.records.iter().map(|r| Ok(serde_json::to_value(r)?)).collect()
}

/// Runs the configured experiment and writes its output file if one is set.
pub fn run_config(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let (records, summary) = match config.kind {
        ExperimentKind::LemmaCheck => {
            let suite = config.suite.expect("validated");
            let report = run_suite(suite, config.size, config.seed)?;
            let summary = Summary::LemmaCheck {
                suite,
                checks: report.checks,
                passed: report.passed,
                max_excess: report.max_excess,
                pass: report.all_pass(),
            };
            (lemma_records(&report)?, summary)
        }
        ExperimentKind::ReductionRun => {
            let setup = ReductionSetup::new(
                config.protocol.as_deref().expect("validated"),
                config.prover.as_deref().expect("validated"),
                config.params.as_ref().expect("validated"),
            )?;
            let runs = setup.run_trials(config.seed, 0, config.trials)?;
            let summary = Summary::ReductionRun(Box::new(ReductionSummary::new(&setup, &runs)?));
            let records = runs.iter().map(serde_json::to_value).collect::<serde_json::Result<Vec<_>>>()?;
            (records, summary)
        }
        ExperimentKind::BoundTable => {
            let grid = config.grid.clone().unwrap_or_else(|| vec![10, 100, 1000, 10_000]);
            let rows: Vec<BoundRow> = bound_table(config.variant.as_deref().expect("validated"), &grid)?;
            let n = rows.len();
            let records = rows.iter().map(serde_json::to_value).collect::<serde_json::Result<Vec<_>>>()?;
            (records, Summary::BoundTable { rows: n })
        }
    };
    let result = ExperimentResult { config: config.clone(), records, summary, wall_clock: start.elapsed() };
    if let Some(path) = &config.output {
        result.write(path)?;
    }
    Ok(result)
}
