use serde::{Deserialize, Serialize};

use crate::math;
use crate::measure::Grid;
use crate::memoryless::FloodingParams;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReductionKind {
    PublicCoin,
    ThreeMessage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamMode {
    Paper,
    Desk,
}

/// How the three-message reduction accepts a candidate response.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionRule {
    /// Accept with probability `min{1, 2^{ν(ℓ+1−t)}}`.
    Soft,
    /// Accept only if all `k − 1` other coordinates accept.
    Hard,
}

/// User-supplied values for desk-scale runs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeskValues {
    pub iter: usize,
    pub eps0: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
    pub nu: f64,
    /// Flooding rounds `T`; `None` uses `ceil(4Λ/η³)`.
    pub flood_rounds: Option<usize>,
}

/// Parameters of either reduction. In paper mode every derived value is
/// recomputed from `(ξ, λ, k, t, m)` on access.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub kind: ReductionKind,
    pub xi: f64,
    pub lambda: f64,
    pub k: usize,
    pub t: usize,
    pub m: usize,
    pub rule: DecisionRule,
    pub desk: Option<DeskValues>,
}

/// Every parameter value a run actually uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub mode: ParamMode,
    pub kind: ReductionKind,
    pub rule: DecisionRule,
    pub xi: f64,
    pub lambda: f64,
    pub k: usize,
    pub t: usize,
    pub m: usize,
    pub iter: usize,
    pub eps0: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
    pub nu: f64,
    pub grid_size: usize,
    pub flood_rounds: Option<usize>,
    /// Paper-mode parameters throughout.
    pub conformant: bool,
    /// Flooding uses `T = ceil(4Λ/η³)` rather than an override.
    pub flooding_conformant: bool,
}

impl ReductionParams {
    pub fn paper(kind: ReductionKind, xi: f64, lambda: f64, k: usize, t: usize, m: usize) -> Result<Self> {
        let p = Self { kind, xi, lambda, k, t, m, rule: DecisionRule::Soft, desk: None };
        p.validate()?;
        Ok(p)
    }

    pub fn desk(kind: ReductionKind, xi: f64, k: usize, t: usize, m: usize, values: DeskValues) -> Result<Self> {
        let p = Self { kind, xi, lambda: 0.0, k, t, m, rule: DecisionRule::Soft, desk: Some(values) };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rule(mut self, rule: DecisionRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn mode(&self) -> ParamMode {
        if self.desk.is_some() {
            ParamMode::Desk
        } else {
            ParamMode::Paper
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("xi {} outside (0, 1]", self.xi)));
        }
        if self.t == 0 || self.t > self.k || self.m == 0 {
            return Err(Error::InvalidParameter("need 1 <= t <= k and m >= 1".into()));
        }
        if self.kind == ReductionKind::ThreeMessage && self.m != 1 {
            return Err(Error::InvalidParameter("three-message protocols have one query round".into()));
        }
        match &self.desk {
            None => {
                if !(self.lambda >= 1.0) {
                    return Err(Error::InvalidParameter("paper mode needs lambda >= 1".into()));
                }
            }
            Some(d) => {
                let unit = |x: f64| x > 0.0 && x <= 1.0;
                if d.iter == 0 || !unit(d.eps0) || !unit(d.epsilon) || !unit(d.eta) || !(d.delta > 0.0 && d.delta < 1.0) || !(d.nu > 0.0) {
                    return Err(Error::InvalidParameter("desk values out of range".into()));
                }
                if d.flood_rounds == Some(0) {
                    return Err(Error::InvalidParameter("at least one flooding round".into()));
                }
            }
        }
        Ok(())
    }

    pub fn iter(&self) -> usize {
        match (&self.desk, self.kind) {
            (Some(d), _) => d.iter,
            (None, ReductionKind::PublicCoin) => math::ceil_usize(self.lambda * (self.m * self.m) as f64 / self.xi - 1e-9),
            (None, ReductionKind::ThreeMessage) => math::ceil_usize(4.0 * self.lambda / self.xi - 1e-9),
        }
    }

    pub fn eps0(&self) -> f64 {
        match (&self.desk, self.kind) {
            (Some(d), _) => d.eps0,
            (None, ReductionKind::PublicCoin) => self.xi / (self.m * self.m) as f64,
            (None, ReductionKind::ThreeMessage) => self.xi / 4.0,
        }
    }

    pub fn epsilon(&self) -> f64 {
        match &self.desk {
            Some(d) => d.epsilon,
            None => self.eps0() / (16.0 * self.iter() as f64),
        }
    }

    pub fn delta(&self) -> f64 {
        match &self.desk {
            Some(d) => d.delta,
            None => math::exp2(-self.lambda).min(math::exp2(-(self.k as f64))),
        }
    }

    /// `N_{ε,δ}`, the number of value-measurement outcomes.
    pub fn grid_size(&self) -> usize {
        Grid::new(self.epsilon()).map(|g| g.len()).unwrap_or(0)
    }

    pub fn eta(&self) -> f64 {
        let n = self.grid_size() as f64;
        match (&self.desk, self.kind) {
            (Some(d), _) => d.eta,
            (None, ReductionKind::PublicCoin) => 1.0 / (2.0 * (self.k * self.m) as f64 * self.iter() as f64) / n,
            (None, ReductionKind::ThreeMessage) => 1.0 / (4.0 * self.k as f64 * self.iter() as f64) / n,
        }
    }

    /// `ν = √(−log₂ ξ / k)`.
    pub fn nu(&self) -> f64 {
        match &self.desk {
            Some(d) => d.nu,
            None => math::sqrt(-math::log2(self.xi) / self.k as f64),
        }
    }

    /// Flooding parameters for a prover of `qubits` qubits.
    pub fn flooding(&self, qubits: f64) -> Result<FloodingParams> {
        let f = FloodingParams::new(self.epsilon(), self.delta(), self.eta(), qubits)?;
        Ok(match self.desk.and_then(|d| d.flood_rounds) {
            Some(t) => f.with_rounds(t),
            None => f,
        })
    }

    /// Prepare-abort threshold in (1-based) round `ell`, attempt `s`.
    pub fn prepare_threshold(&self, ell: usize, s: usize) -> f64 {
        let rounds = match self.kind {
            ReductionKind::PublicCoin => ell as f64,
            ReductionKind::ThreeMessage => 1.0,
        };
        self.xi - rounds * self.eps0() - (4.0 * s as f64 + 1.0) * self.epsilon()
    }

    /// CheckCoins success threshold `ξ − (ℓ+1)ε₀` in (1-based) round `ell`.
    pub fn checkcoins_threshold(&self, ell: usize) -> f64 {
        self.xi - (ell as f64 + 1.0) * self.eps0()
    }

    /// First-copy acceptance threshold `ξ − ε₀`.
    pub fn step2_threshold(&self) -> f64 {
        self.xi - self.eps0()
    }

    pub fn resolve(&self) -> ResolvedParams {
        ResolvedParams {
            mode: self.mode(),
            kind: self.kind,
            rule: self.rule,
            xi: self.xi,
            lambda: self.lambda,
            k: self.k,
            t: self.t,
            m: self.m,
            iter: self.iter(),
            eps0: self.eps0(),
            epsilon: self.epsilon(),
            delta: self.delta(),
            eta: self.eta(),
            nu: self.nu(),
            grid_size: self.grid_size(),
            flood_rounds: self.desk.and_then(|d| d.flood_rounds),
            conformant: self.mode() == ParamMode::Paper,
            flooding_conformant: self.desk.and_then(|d| d.flood_rounds).is_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_public_coin_values() {
        let p = ReductionParams::paper(ReductionKind::PublicCoin, 0.5, 2.0, 4, 4, 2).unwrap();
        assert_eq!(p.iter(), 16);
        assert!((p.eps0() - 0.125).abs() < 1e-15);
        assert!((p.epsilon() - 0.125 / 256.0).abs() < 1e-15);
        assert!((p.delta() - 0.0625).abs() < 1e-15);
        assert_eq!(p.grid_size(), 2049);
        assert!((p.eta() - 1.0 / (2.0 * 8.0 * 16.0) / 2049.0).abs() < 1e-18);
    }

    #[test]
    fn paper_three_message_values() {
        let p = ReductionParams::paper(ReductionKind::ThreeMessage, 0.25, 3.0, 8, 6, 1).unwrap();
        assert_eq!(p.iter(), 48);
        assert!((p.eps0() - 0.0625).abs() < 1e-15);
        assert!((p.delta() - 1.0 / 256.0).abs() < 1e-15);
        assert!((p.nu() - 0.5).abs() < 1e-15);
        assert!((p.prepare_threshold(1, 2) - (0.25 - 0.0625 - 9.0 * p.epsilon())).abs() < 1e-15);
    }

    #[test]
    fn desk_values_pass_through() {
        let d = DeskValues { iter: 3, eps0: 0.2, epsilon: 0.05, delta: 0.01, eta: 0.5, nu: 1.0, flood_rounds: Some(2) };
        let p = ReductionParams::desk(ReductionKind::PublicCoin, 0.7, 3, 3, 1, d).unwrap();
        assert_eq!(p.iter(), 3);
        assert_eq!(p.mode(), ParamMode::Desk);
        assert!(!p.resolve().conformant);
        assert!((p.prepare_threshold(1, 1) - (0.7 - 0.2 - 0.25)).abs() < 1e-15);
        assert!((p.checkcoins_threshold(1) - 0.3).abs() < 1e-15);
        assert_eq!(p.flooding(3.0).unwrap().rounds(), 2);
    }
}
