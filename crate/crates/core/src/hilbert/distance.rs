use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::QuantumState;
use crate::linalg::{self, Matrix};
use crate::{Error, Result};

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension("trace distance between different dimensions".into()));
    }
    if let Some(ov) = a.overlap(b) {
        return Ok(crate::math::sqrt((1.0 - ov.norm_sqr()).max(0.0)));
    }
    Ok(trace_distance_matrices(&a.density(), &b.density()))
}

/// `½‖A − B‖₁` for Hermitian operators of equal size.
pub fn trace_distance_matrices(a: &Matrix, b: &Matrix) -> f64 {
    0.5 * linalg::trace_norm_hermitian(&(a - b))
}

/// Total variation distance between two probability vectors; the shorter one
/// is padded with zeros.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    0.5 * (0..n)
        .map(|i| (p.get(i).copied().unwrap_or(0.0) - q.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// Classical-quantum state `Σ_x |x><x| ⊗ ρ_x`, stored as unnormalised blocks
/// `ρ_x` keyed by the classical value.
#[derive(Clone, Debug, PartialEq)]
pub struct CqState<K: Ord> {
    dim: usize,
    blocks: BTreeMap<K, Matrix>,
}

impl<K: Ord + Clone> CqState<K> {
    pub fn new(dim: usize) -> Self {
        Self { dim, blocks: BTreeMap::new() }
    }

    /// Builds from `(key, weight, state)` triples; repeated keys accumulate.
    pub fn from_entries(entries: impl IntoIterator<Item = (K, f64, QuantumState)>) -> Result<Self> {
        let mut out: Option<Self> = None;
        for (k, w, s) in entries {
            let cq = out.get_or_insert_with(|| Self::new(s.dim()));
            if s.dim() != cq.dim {
                return Err(Error::Dimension("ensemble members differ in dimension".into()));
            }
            cq.add(k, &s.density().scale(w));
        }
        out.ok_or_else(|| Error::InvalidState("empty ensemble".into()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&mut self, key: K, block: &Matrix) {
        match self.blocks.get_mut(&key) {
            Some(m) => *m += block,
            None => {
                self.blocks.insert(key, block.clone());
            }
        }
    }

    pub fn blocks(&self) -> &BTreeMap<K, Matrix> {
        &self.blocks
    }

    pub fn total_weight(&self) -> f64 {
        self.blocks.values().map(|m| m.trace().re).sum()
    }

    /// Marginal distribution of the classical part.
    pub fn classical_marginal(&self) -> Vec<(K, f64)> {
        self.blocks.iter().map(|(k, m)| (k.clone(), m.trace().re)).collect()
    }
}

/// Trace distance between two classical-quantum states: keys are orthogonal
/// classical values, so the distance splits into a sum over keys.
pub fn cq_trace_distance<K: Ord + Clone>(a: &CqState<K>, b: &CqState<K>) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::Dimension("cq states of different dimension".into()));
    }
    let mut total = 0.0;
    for (k, ma) in &a.blocks {
        total += match b.blocks.get(k) {
            Some(mb) => trace_distance_matrices(ma, mb),
            None => 0.5 * linalg::trace_norm_hermitian(ma),
        };
    }
    for (k, mb) in &b.blocks {
        if !a.blocks.contains_key(k) {
            total += 0.5 * linalg::trace_norm_hermitian(mb);
        }
    }
    Ok(total)
}
