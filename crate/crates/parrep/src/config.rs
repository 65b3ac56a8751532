use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use parrep_core::reductions::{DecisionRule, DeskValues, ParamMode};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    LemmaCheck,
    ReductionRun,
    BoundTable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaSuite {
    Raz,
    Flooding,
    Hppw,
    Forgetfulness,
}

impl std::str::FromStr for LemmaSuite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "raz" => Self::Raz,
            "flooding" => Self::Flooding,
            "hppw" => Self::Hppw,
            "forgetfulness" => Self::Forgetfulness,
            _ => bail!("unknown lemma suite `{s}`"),
        })
    }
}

/// Reduction parameters as written in a config file. `xi` defaults to the
/// prover's exact success probability; desk defaults put `eps0` at `xi/4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub mode: ParamMode,
    pub k: usize,
    pub t: usize,
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default = "default_rule")]
    pub rule: DecisionRule,
    #[serde(default)]
    pub iter: Option<usize>,
    #[serde(default)]
    pub eps0: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub flood_rounds: Option<usize>,
}

fn default_rule() -> DecisionRule {
    DecisionRule::Soft
}

impl ParamsConfig {
    pub fn desk_values(&self, xi: f64) -> DeskValues {
        DeskValues {
            iter: self.iter.unwrap_or(4),
            eps0: self.eps0.unwrap_or(xi / 4.0),
            epsilon: self.epsilon.unwrap_or(0.02),
            delta: self.delta.unwrap_or(0.01),
            eta: self.eta.unwrap_or(0.5),
            nu: self.nu.unwrap_or(1.0),
            flood_rounds: self.flood_rounds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Catalog protocol, e.g. `subset(n=4,s=4)`.
    #[serde(default)]
    pub protocol: Option<String>,
    /// Catalog prover, e.g. `rotation(p=0.9:0.9:0.9:0.9)`.
    #[serde(default)]
    pub prover: Option<String>,
    #[serde(default)]
    pub params: Option<ParamsConfig>,
    #[serde(default)]
    pub suite: Option<LemmaSuite>,
    /// Raz: coordinate count; flooding: largest exhaustive `t`.
    #[serde(default)]
    pub size: Option<usize>,
    /// Bound table variant: `public`, `three`, or an informal variant name.
    #[serde(default)]
    pub variant: Option<String>,
    /// Bound table values of `k`.
    #[serde(default)]
    pub grid: Option<Vec<usize>>,
}

fn default_trials() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).context("parsing experiment config")?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        match self.kind {
            ExperimentKind::ReductionRun => {
                if self.protocol.is_none() || self.prover.is_none() || self.params.is_none() {
                    bail!("reduction-run needs protocol, prover and [params]");
                }
            }
            ExperimentKind::LemmaCheck => {
                if self.suite.is_none() {
                    bail!("lemma-check needs a suite");
                }
            }
            ExperimentKind::BoundTable => {
                if self.variant.is_none() {
                    bail!("bound-table needs a variant");
                }
            }
        }
        Ok(())
    }
}
