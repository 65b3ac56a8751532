//! Seeded property sweeps over each module, for the `props` subcommand.

use anyhow::Result;
use parrep_core::harness::{bound_public, bound_three, Estimate};
use parrep_core::hilbert::{trace_distance, QuantumState, RegisterLayout};
use parrep_core::linalg::{random_unit_interval_operator, random_vector};
use parrep_core::measure::ValueFamily;
use parrep_core::memoryless::{forgetfulness_distance, instances, prepare, FloodingParams};
use parrep_core::protocols::{catalog, optimal_success, repeat, success_probability, threshold_verdict};
use parrep_core::reductions::softdecision_probability;
use parrep_core::rng::StreamRng;
use serde::{Deserialize, Serialize};

use crate::config::ParamsConfig;
use crate::experiment::ReductionSetup;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropReport {
    pub module: String,
    pub property: String,
    pub cases: usize,
    pub passed: usize,
}

impl PropReport {
    pub fn pass(&self) -> bool {
        self.passed == self.cases
    }
}

fn sweep(module: &str, property: &str, cases: usize, mut f: impl FnMut(u64) -> Result<bool>) -> Result<PropReport> {
    let mut passed = 0;
    for n in 0..cases as u64 {
        if f(n)? {
            passed += 1;
        }
    }
    Ok(PropReport { module: module.into(), property: property.into(), cases, passed })
}

fn hilbert(seed: u64) -> Result<Vec<PropReport>> {
    let layout = RegisterLayout::qubits(&["a", "b"])?;
    let td = sweep("hilbert", "trace distance is a metric bounded by 1", 200, |n| {
        let mut rng = StreamRng::new(seed, n);
        let s: Vec<QuantumState> =
            (0..3).map(|_| QuantumState::pure(layout.clone(), random_vector(4, &mut rng))).collect::<Result<_, _>>()?;
        let (ab, bc, ac) = (trace_distance(&s[0], &s[1])?, trace_distance(&s[1], &s[2])?, trace_distance(&s[0], &s[2])?);
        let ba = trace_distance(&s[1], &s[0])?;
        Ok((ab - ba).abs() < 1e-12 && ab <= 1.0 + 1e-12 && ac <= ab + bc + 1e-12)
    })?;
    let born = sweep("hilbert", "register distributions sum to 1", 200, |n| {
        let mut rng = StreamRng::new(seed, n);
        let s = QuantumState::pure(layout.clone(), random_vector(4, &mut rng))?;
        let p = s.register_distribution(&["a".to_string()])?;
        Ok((p.iter().sum::<f64>() - 1.0).abs() < 1e-12)
    })?;
    Ok(vec![td, born])
}

fn measure(seed: u64) -> Result<Vec<PropReport>> {
    let repeat_prop = sweep("measure", "repeated value measurement agrees", 100, |n| {
        let mut rng = StreamRng::new(seed, n);
        let layout = RegisterLayout::single("a", 6);
        let f = ValueFamily::from_operator(layout.clone(), random_unit_interval_operator(6, &mut rng))?;
        let m = f.measurement(0.05, 0.01)?;
        let s = QuantumState::pure(layout, random_vector(6, &mut rng))?;
        let a = m.measure(&s, &mut rng);
        let b = m.measure(&a.state, &mut rng);
        Ok(a.cell == b.cell)
    })?;
    Ok(vec![repeat_prop])
}

fn memoryless(seed: u64) -> Result<Vec<PropReport>> {
    let inst = instances::recording_instance(0.2)?;
    let params = FloodingParams::new(0.1, 0.05, 0.5, inst.ell)?;
    let on_grid = sweep("memoryless", "prepare reports a value on the inner grid", 20, |n| {
        let mut rng = StreamRng::new(seed, n);
        let out = prepare(&inst.value, &inst.family, &inst.state, &params, &mut rng)?;
        let grid = params.inner_measurement(&inst.value)?.grid().clone();
        Ok((grid.round(out.value) - out.value).abs() < 1e-12)
    })?;
    let forget = sweep("memoryless", "forgetfulness within N·η", 1, |_| {
        let r = forgetfulness_distance(&inst.value, &inst.family, &inst.state, &params)?;
        Ok(r.distance <= r.bound + 1e-6)
    })?;
    Ok(vec![on_grid, forget])
}

fn protocols(seed: u64) -> Result<Vec<PropReport>> {
    let threshold = sweep("protocols", "threshold verdict counts accepting coordinates", 500, |n| {
        let mut rng = StreamRng::new(seed, n);
        let k = 1 + rng.below(12);
        let v: Vec<bool> = (0..k).map(|_| rng.bernoulli(0.5)).collect();
        let t = 1 + rng.below(k);
        Ok(threshold_verdict(&v, t)? == (v.iter().filter(|&&b| b).count() >= t))
    })?;
    let p = catalog::subset(4, 2)?;
    let opt = optimal_success(&repeat(p.clone(), 2, 1)?)?;
    let below = sweep("protocols", "rotation provers do not beat the optimum", 50, |n| {
        let mut rng = StreamRng::new(seed, n);
        let probs: Vec<String> = (0..4).map(|_| format!("{:.6}", rng.uniform())).collect();
        let prover = catalog::prover(&format!("rotation(p={})", probs.join(":")), &p, 2)?;
        Ok(success_probability(&repeat(p.clone(), 2, 1)?, &prover)? <= opt + 1e-12)
    })?;
    Ok(vec![threshold, below])
}

fn reductions(seed: u64) -> Result<Vec<PropReport>> {
    let cfg: ParamsConfig = toml::from_str("mode = \"desk\"\nk = 2\nt = 2\neta = 1.0\n")?;
    let setup = ReductionSetup::new("subset(n=2,s=2)", "rotation(p=0.9:0.9)", &cfg)?;
    let records = setup.run_trials(seed, 0, 20)?;
    let mechanics = PropReport {
        module: "reductions".into(),
        property: "completed runs accept, queries embedded, thresholds logged".into(),
        cases: records.len(),
        passed: records.iter().filter(|r| r.embedding_ok() && r.thresholds_ok(&setup.params) && (!r.completed() || r.accepted == Some(true))).count(),
    };
    let soft = sweep("reductions", "soft decision probability is in (0, 1] and monotone", 200, |n| {
        let mut rng = StreamRng::new(seed, n);
        let nu = 0.1 + 2.0 * rng.uniform();
        let t = 1 + rng.below(8);
        let l = rng.below(8);
        let (a, b) = (softdecision_probability(nu, t, l), softdecision_probability(nu, t, l + 1));
        Ok(a > 0.0 && a <= b && b <= 1.0)
    })?;
    Ok(vec![mechanics, soft])
}

fn harness(seed: u64) -> Result<Vec<PropReport>> {
    let wilson = sweep("harness", "Wilson interval contains the point and narrows", 500, |n| {
        let mut rng = StreamRng::new(seed, n);
        let trials = 1 + rng.below(1000) as u64;
        let s = rng.below(trials as usize + 1) as u64;
        let e = Estimate::from_counts(s, trials)?;
        let d = Estimate::from_counts(2 * s, 2 * trials)?;
        Ok(e.contains(e.point) && d.high - d.low <= e.high - e.low + 1e-12)
    })?;
    let monotone = sweep("harness", "corollary bounds decrease in k", 1, |_| {
        let mut ok = true;
        let (mut lp, mut lt) = (f64::INFINITY, f64::INFINITY);
        for k in (1000..20_000).step_by(1000) {
            let p = bound_public(0.3, 2, k, (0.8 * k as f64) as usize)?.raw;
            let q = bound_three(0.0, k, k)?.raw;
            ok &= p <= lp + 1e-15 && q <= lt + 1e-15;
            lp = p;
            lt = q;
        }
        Ok(ok)
    })?;
    Ok(vec![wilson, monotone])
}

pub const MODULES: [&str; 6] = ["hilbert", "measure", "memoryless", "protocols", "reductions", "harness"];

pub fn run_props(module: Option<&str>, seed: u64) -> Result<Vec<PropReport>> {
    let mut out = Vec::new();
    for m in MODULES {
        if module.is_some_and(|x| x != m) {
            continue;
        }
        out.extend(match m {
            "hilbert" => hilbert(seed)?,
            "measure" => measure(seed)?,
            "memoryless" => memoryless(seed)?,
            "protocols" => protocols(seed)?,
            "reductions" => reductions(seed)?,
            _ => harness(seed)?,
        });
    }
    anyhow::ensure!(!out.is_empty(), "unknown module {:?}", module);
    Ok(out)
}
