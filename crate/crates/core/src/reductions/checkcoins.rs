use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::hilbert::{Pvm, QuantumState};
use crate::measure::{Grid, ValueFamily, ValueMeasurement};
use crate::memoryless::PvmSampler;
use crate::protocols::{public_query_operator, Protocol, ProverStrategy, RepeatedProtocol, Transcript};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// The projections `CheckCoins_{ℓ, τ, q̄}` for all `q̄ ∈ Q_ℓ^k`, built on
/// demand. Each one is the value measurement of
/// `U_ℓ(q̄)† [⊕_z̄ S_{ℓ+1}(τ q̄ z̄)] U_ℓ(q̄)`; the coherent evaluation and its
/// uncomputation leave exactly this projective measurement behind.
pub struct CheckCoinsFamily<'a> {
    rep: &'a RepeatedProtocol,
    prover: &'a ProverStrategy,
    prefix: Transcript,
    epsilon: f64,
    delta: f64,
    query_size: usize,
    cache: RefCell<BTreeMap<Vec<usize>, (Arc<Pvm>, ValueMeasurement)>>,
}

impl<'a> CheckCoinsFamily<'a> {
    pub fn new(rep: &'a RepeatedProtocol, prover: &'a ProverStrategy, prefix: &Transcript, epsilon: f64, delta: f64) -> Result<Self> {
        let p = match rep.base() {
            Protocol::PublicCoin(p) => p,
            Protocol::ThreeMessage(_) => return Err(Error::InvalidParameter("CheckCoins needs a public-coin protocol".into())),
        };
        let round = prefix.queries.len();
        if round >= p.rounds() {
            return Err(Error::InvalidParameter(alloc::format!("round {} out of range", round + 1)));
        }
        Grid::new(epsilon)?;
        Ok(Self {
            rep,
            prover,
            prefix: prefix.clone(),
            epsilon,
            delta,
            query_size: p.query_size(round),
            cache: RefCell::new(BTreeMap::new()),
        })
    }

    pub fn round(&self) -> usize {
        self.prefix.queries.len()
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.epsilon).expect("checked in new")
    }

    fn entry(&self, qbar: &[usize]) -> Result<(Arc<Pvm>, ValueMeasurement)> {
        if let Some(e) = self.cache.borrow().get(qbar) {
            return Ok(e.clone());
        }
        let res = public_query_operator(self.rep, self.prover, &self.prefix, qbar)?;
        let m = ValueFamily::from_operator(res.layout, res.operator)?.measurement(self.epsilon, self.delta)?;
        let e = (Arc::new(m.pvm()), m);
        self.cache.borrow_mut().insert(qbar.to_vec(), e.clone());
        Ok(e)
    }

    /// `CheckCoins_{q̄}` as a PVM indexed by grid cell.
    pub fn member(&self, qbar: &[usize]) -> Result<Arc<Pvm>> {
        Ok(self.entry(qbar)?.0)
    }

    pub fn measurement(&self, qbar: &[usize]) -> Result<ValueMeasurement> {
        Ok(self.entry(qbar)?.1)
    }

    /// Mixed-radix identifier of `q̄`.
    pub fn member_id(&self, qbar: &[usize]) -> u64 {
        qbar.iter().fold(0u64, |acc, &q| acc * self.query_size as u64 + q as u64)
    }

    /// Uniform `q̄` with coordinate `i` fixed to `q`.
    pub fn sample_conditioned(&self, i: usize, q: usize, rng: &mut StreamRng) -> Vec<usize> {
        (0..self.rep.k()).map(|j| if j == i { q } else { rng.below(self.query_size) }).collect()
    }
}

impl PvmSampler for CheckCoinsFamily<'_> {
    fn outcomes(&self) -> usize {
        self.grid().len()
    }

    fn sample(&self, rng: &mut StreamRng) -> Result<(u64, Arc<Pvm>)> {
        let qbar: Vec<usize> = (0..self.rep.k()).map(|_| rng.below(self.query_size)).collect();
        Ok((self.member_id(&qbar), self.member(&qbar)?))
    }
}

/// Applies `CheckCoins_{ℓ, τ, q̄}` once: returns the grid value, its cell and
/// the post-measurement state.
#[allow(clippy::too_many_arguments)]
pub fn checkcoins(
    rep: &RepeatedProtocol,
    prover: &ProverStrategy,
    prefix: &Transcript,
    qbar: &[usize],
    state: &QuantumState,
    epsilon: f64,
    delta: f64,
    rng: &mut StreamRng,
) -> Result<(f64, usize, QuantumState)> {
    let family = CheckCoinsFamily::new(rep, prover, prefix, epsilon, delta)?;
    let m = family.measurement(qbar)?;
    if state.layout() != m.layout() {
        return Err(Error::Dimension("state does not carry the registers of this round".into()));
    }
    let out = m.measure(state, rng);
    Ok((out.value, out.cell, out.state))
}
