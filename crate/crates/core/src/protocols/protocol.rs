use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::Transcript;
use crate::{Error, Result};

/// Verdict on a full single-fold public-coin transcript `(q_1..q_m, z_1..z_m)`.
pub type PublicAcceptFn = Arc<dyn Fn(&[usize], &[usize]) -> bool + Send + Sync>;
/// Verifier message from its randomness and the prover's first message.
pub type QueryFn = Arc<dyn Fn(usize, usize) -> usize + Send + Sync>;
/// Private-coin verdict on `(r, z_1, q, z_2)`.
pub type PrivateAcceptFn = Arc<dyn Fn(usize, usize, usize, usize) -> bool + Send + Sync>;

/// Public-coin protocol: in round `ℓ` the verifier sends a uniform query from
/// `[query_sizes[ℓ]]` and the prover answers from `[response_sizes[ℓ]]`.
#[derive(Clone)]
pub struct PublicCoinProtocol {
    name: String,
    query_sizes: Vec<usize>,
    response_sizes: Vec<usize>,
    accept: PublicAcceptFn,
}

impl PublicCoinProtocol {
    pub fn new(name: impl Into<String>, query_sizes: Vec<usize>, response_sizes: Vec<usize>, accept: PublicAcceptFn) -> Result<Self> {
        if query_sizes.is_empty() || query_sizes.len() != response_sizes.len() {
            return Err(Error::InvalidParameter("need one query and one response space per round".into()));
        }
        if query_sizes.iter().chain(&response_sizes).any(|&s| s == 0) {
            return Err(Error::InvalidParameter("message spaces must be nonempty".into()));
        }
        Ok(Self { name: name.into(), query_sizes, response_sizes, accept })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rounds(&self) -> usize {
        self.query_sizes.len()
    }

    pub fn query_size(&self, round: usize) -> usize {
        self.query_sizes[round]
    }

    pub fn response_size(&self, round: usize) -> usize {
        self.response_sizes[round]
    }

    pub fn accept(&self, queries: &[usize], responses: &[usize]) -> bool {
        if queries.len() != self.rounds() || responses.len() != self.rounds() {
            return false;
        }
        if queries.iter().zip(&self.query_sizes).any(|(q, s)| q >= s)
            || responses.iter().zip(&self.response_sizes).any(|(z, s)| z >= s)
        {
            return false;
        }
        (self.accept)(queries, responses)
    }
}

/// Three-message private-coin protocol: prover sends `z_1`, verifier samples
/// `r` and sends `q = query_of(r, z_1)`, prover answers `z_2`.
#[derive(Clone)]
pub struct ThreeMessageProtocol {
    name: String,
    randomness: usize,
    first_size: usize,
    query_size: usize,
    second_size: usize,
    query_of: QueryFn,
    accept: PrivateAcceptFn,
}

impl ThreeMessageProtocol {
    pub fn new(
        name: impl Into<String>,
        randomness: usize,
        first_size: usize,
        query_size: usize,
        second_size: usize,
        query_of: QueryFn,
        accept: PrivateAcceptFn,
    ) -> Result<Self> {
        if [randomness, first_size, query_size, second_size].contains(&0) {
            return Err(Error::InvalidParameter("message spaces must be nonempty".into()));
        }
        for r in 0..randomness {
            for z1 in 0..first_size {
                if query_of(r, z1) >= query_size {
                    return Err(Error::InvalidParameter("query_of leaves the query space".into()));
                }
            }
        }
        Ok(Self { name: name.into(), randomness, first_size, query_size, second_size, query_of, accept })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn randomness(&self) -> usize {
        self.randomness
    }

    pub fn first_size(&self) -> usize {
        self.first_size
    }

    pub fn query_size(&self) -> usize {
        self.query_size
    }

    pub fn second_size(&self) -> usize {
        self.second_size
    }

    pub fn query_of(&self, r: usize, z1: usize) -> usize {
        (self.query_of)(r, z1)
    }

    /// Evaluated only on transcripts whose `q` matches `query_of(r, z_1)`.
    pub fn accept(&self, r: usize, z1: usize, q: usize, z2: usize) -> bool {
        r < self.randomness
            && z1 < self.first_size
            && z2 < self.second_size
            && q == self.query_of(r, z1)
            && (self.accept)(r, z1, q, z2)
    }
}

#[derive(Clone)]
pub enum Protocol {
    PublicCoin(PublicCoinProtocol),
    ThreeMessage(ThreeMessageProtocol),
}

impl Protocol {
    pub fn name(&self) -> &str {
        match self {
            Protocol::PublicCoin(p) => p.name(),
            Protocol::ThreeMessage(p) => p.name(),
        }
    }

    /// Prover response rounds (`m` for public-coin, one for three-message).
    pub fn response_rounds(&self) -> usize {
        match self {
            Protocol::PublicCoin(p) => p.rounds(),
            Protocol::ThreeMessage(_) => 1,
        }
    }
}

impl core::fmt::Debug for Protocol {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// `1` iff at least `t` of the verdicts are `1`.
pub fn threshold_verdict(verdicts: &[bool], t: usize) -> Result<bool> {
    if t == 0 || t > verdicts.len() {
        return Err(Error::InvalidParameter(alloc::format!("threshold {t} outside 1..={}", verdicts.len())));
    }
    Ok(verdicts.iter().filter(|&&v| v).count() >= t)
}

/// `t`-out-of-`k` parallel repetition.
#[derive(Clone, Debug)]
pub struct RepeatedProtocol {
    base: Protocol,
    k: usize,
    t: usize,
}

pub fn repeat(base: Protocol, k: usize, t: usize) -> Result<RepeatedProtocol> {
    RepeatedProtocol::new(base, k, t)
}

impl RepeatedProtocol {
    pub fn new(base: Protocol, k: usize, t: usize) -> Result<Self> {
        if t == 0 || t > k {
            return Err(Error::InvalidParameter(alloc::format!("need 1 <= t <= k, got t={t}, k={k}")));
        }
        Ok(Self { base, k, t })
    }

    pub fn base(&self) -> &Protocol {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// `Accept_j` for coordinate `j` of a transcript.
    pub fn coordinate_verdict(&self, tr: &Transcript, j: usize) -> Result<bool> {
        self.check_widths(tr)?;
        Ok(match &self.base {
            Protocol::PublicCoin(p) => {
                let qs: Vec<usize> = tr.queries.iter().map(|q| q[j]).collect();
                let zs: Vec<usize> = tr.responses.iter().map(|z| z[j]).collect();
                p.accept(&qs, &zs)
            }
            Protocol::ThreeMessage(p) => {
                let first = tr.first.as_ref().ok_or_else(|| Error::InvalidParameter("missing first message".into()))?;
                let coins = tr.coins.as_ref().ok_or_else(|| Error::InvalidParameter("missing verifier randomness".into()))?;
                p.accept(coins[j], first[j], tr.queries[0][j], tr.responses[0][j])
            }
        })
    }

    pub fn coordinate_verdicts(&self, tr: &Transcript) -> Result<Vec<bool>> {
        (0..self.k).map(|j| self.coordinate_verdict(tr, j)).collect()
    }

    pub fn accept(&self, tr: &Transcript) -> Result<bool> {
        threshold_verdict(&self.coordinate_verdicts(tr)?, self.t)
    }

    fn check_widths(&self, tr: &Transcript) -> Result<()> {
        let rounds = self.base.response_rounds();
        if tr.aborted || tr.queries.len() != rounds || tr.responses.len() != rounds {
            return Err(Error::InvalidParameter("transcript is not complete".into()));
        }
        let widths_ok = tr.queries.iter().chain(&tr.responses).all(|v| v.len() == self.k)
            && tr.first.as_ref().map_or(true, |f| f.len() == self.k)
            && tr.coins.as_ref().map_or(true, |c| c.len() == self.k);
        if !widths_ok {
            return Err(Error::Dimension(alloc::format!("transcript widths differ from k = {}", self.k)));
        }
        Ok(())
    }
}
