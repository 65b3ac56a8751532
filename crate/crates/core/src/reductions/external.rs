use alloc::vec::Vec;

use crate::protocols::Protocol;
use crate::rng::StreamRng;
use crate::{Error, Result};

/// The single-fold verifier the reduction talks to: queries out, responses
/// in, a verdict once the interaction is complete.
pub trait VerifierSession {
    /// Three-message protocols only: the prover's first message.
    fn first_message(&mut self, z1: usize) -> Result<()>;
    fn query(&mut self) -> Result<usize>;
    fn respond(&mut self, z: usize) -> Result<()>;
    fn verdict(&self) -> Option<bool>;
    /// The verifier's private randomness, if it is willing to reveal it after
    /// the run (used only for offline consistency checks).
    fn revealed_randomness(&self) -> Option<usize> {
        None
    }
}

/// Honest verifier sampling its own coins.
pub struct LiveVerifier {
    protocol: Protocol,
    rng: StreamRng,
    first: Option<usize>,
    randomness: Option<usize>,
    queries: Vec<usize>,
    responses: Vec<usize>,
}

impl LiveVerifier {
    pub fn new(protocol: Protocol, rng: StreamRng) -> Self {
        Self { protocol, rng, first: None, randomness: None, queries: Vec::new(), responses: Vec::new() }
    }
}

impl VerifierSession for LiveVerifier {
    fn first_message(&mut self, z1: usize) -> Result<()> {
        match &self.protocol {
            Protocol::ThreeMessage(p) if self.first.is_none() && z1 < p.first_size() => {
                self.first = Some(z1);
                Ok(())
            }
            _ => Err(Error::InvalidParameter("unexpected first message".into())),
        }
    }

    fn query(&mut self) -> Result<usize> {
        if self.queries.len() != self.responses.len() {
            return Err(Error::InvalidParameter("query requested before the previous response".into()));
        }
        let q = match &self.protocol {
            Protocol::PublicCoin(p) => {
                let round = self.queries.len();
                if round >= p.rounds() {
                    return Err(Error::InvalidParameter("no rounds left".into()));
                }
                self.rng.below(p.query_size(round))
            }
            Protocol::ThreeMessage(p) => {
                let z1 = self.first.ok_or_else(|| Error::InvalidParameter("query before the first message".into()))?;
                if !self.queries.is_empty() {
                    return Err(Error::InvalidParameter("no rounds left".into()));
                }
                let r = self.rng.below(p.randomness());
                self.randomness = Some(r);
                p.query_of(r, z1)
            }
        };
        self.queries.push(q);
        Ok(q)
    }

    fn respond(&mut self, z: usize) -> Result<()> {
        if self.responses.len() + 1 != self.queries.len() {
            return Err(Error::InvalidParameter("response without a pending query".into()));
        }
        self.responses.push(z);
        Ok(())
    }

    fn verdict(&self) -> Option<bool> {
        match &self.protocol {
            Protocol::PublicCoin(p) => {
                (self.responses.len() == p.rounds()).then(|| p.accept(&self.queries, &self.responses))
            }
            Protocol::ThreeMessage(p) => match (self.first, self.randomness, self.responses.first()) {
                (Some(z1), Some(r), Some(&z2)) => Some(p.accept(r, z1, self.queries[0], z2)),
                _ => None,
            },
        }
    }

    fn revealed_randomness(&self) -> Option<usize> {
        self.randomness
    }
}

/// Replays recorded queries and a recorded verdict; collects what the
/// reduction sends.
#[derive(Clone, Debug, Default)]
pub struct ScriptedVerifier {
    pub queries: Vec<usize>,
    pub recorded_verdict: Option<bool>,
    pub randomness: Option<usize>,
    pub received_first: Option<usize>,
    pub received: Vec<usize>,
    served: usize,
}

impl ScriptedVerifier {
    pub fn new(queries: Vec<usize>, recorded_verdict: Option<bool>) -> Self {
        Self { queries, recorded_verdict, ..Self::default() }
    }
}

impl VerifierSession for ScriptedVerifier {
    fn first_message(&mut self, z1: usize) -> Result<()> {
        self.received_first = Some(z1);
        Ok(())
    }

    fn query(&mut self) -> Result<usize> {
        let q = *self.queries.get(self.served).ok_or_else(|| Error::InvalidParameter("script exhausted".into()))?;
        self.served += 1;
        Ok(q)
    }

    fn respond(&mut self, z: usize) -> Result<()> {
        self.received.push(z);
        Ok(())
    }

    fn verdict(&self) -> Option<bool> {
        (self.received.len() == self.queries.len()).then_some(self.recorded_verdict).flatten()
    }

    fn revealed_randomness(&self) -> Option<usize> {
        self.randomness
    }
}
