use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::hilbert::{LocalUnitary, QuantumState, RegisterLayout};
use crate::linalg::{self, c, Matrix};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Gates the adversary applies for a given coin, in application order.
pub type AdversaryFn = Arc<dyn Fn(usize) -> Vec<LocalUnitary> + Send + Sync>;
/// Verifier verdict on `(coin, measured response)`.
pub type VerdictFn = Arc<dyn Fn(usize, usize) -> bool + Send + Sync>;

/// One-shot game: sample a coin `r`, apply the adversary's unitary `U_r`,
/// measure the response registers in the computational basis to get `z`, and
/// accept iff `verdict(r, z)`.
#[derive(Clone)]
pub struct GameSpec {
    layout: RegisterLayout,
    coins: usize,
    response: Vec<String>,
    adversary: AdversaryFn,
    verdict: VerdictFn,
}

impl core::fmt::Debug for GameSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GameSpec")
            .field("layout", &self.layout)
            .field("coins", &self.coins)
            .field("response", &self.response)
            .finish_non_exhaustive()
    }
}

impl GameSpec {
    pub fn new(
        layout: RegisterLayout,
        coins: usize,
        response: Vec<String>,
        adversary: AdversaryFn,
        verdict: VerdictFn,
    ) -> Result<Self> {
        if coins == 0 {
            return Err(Error::InvalidParameter("a game needs at least one coin value".into()));
        }
        layout.positions(&response)?;
        Ok(Self { layout, coins, response, adversary, verdict })
    }

    /// Game with no coins and no response whose verdict is the constant `b`.
    pub fn deterministic(layout: RegisterLayout, b: bool) -> Self {
        Self {
            layout,
            coins: 1,
            response: Vec::new(),
            adversary: Arc::new(|_| Vec::new()),
            verdict: Arc::new(move |_, _| b),
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn coins(&self) -> usize {
        self.coins
    }

    pub fn response(&self) -> &[String] {
        &self.response
    }

    pub fn gates(&self, r: usize) -> Vec<LocalUnitary> {
        (self.adversary)(r)
    }

    pub fn verdict(&self, r: usize, z: usize) -> bool {
        (self.verdict)(r, z)
    }

    /// Diagonal of the accepting projector `D_r` on the full space.
    fn accept_diagonal(&self, r: usize) -> Result<Vec<bool>> {
        let pos = self.layout.positions(&self.response)?;
        let sub = self.layout.select(&self.response)?;
        Ok((0..self.layout.dim())
            .map(|i| {
                let d = self.layout.digits(i);
                let z = sub.index(&pos.iter().map(|&p| d[p]).collect::<Vec<_>>());
                self.verdict(r, z)
            })
            .collect())
    }

    /// `E_r U_r† D_r U_r`.
    pub fn success_operator(&self) -> Result<Matrix> {
        let n = self.layout.dim();
        let mut total = linalg::zeros(n);
        for r in 0..self.coins {
            let diag = self.accept_diagonal(r)?;
            let mut x = Matrix::from_fn(n, n, |i, j| if i == j && diag[i] { c(1.0) } else { c(0.0) });
            for g in self.gates(r).iter().rev() {
                g.heisenberg(&self.layout, &mut x)?;
            }
            total += x;
        }
        Ok(linalg::hermitian_part(&total.unscale(self.coins as f64)))
    }

    pub fn success_probability(&self, state: &QuantumState) -> Result<f64> {
        Ok(state.expectation(&self.success_operator()?))
    }

    /// Plays once; returns `(coin, response, verdict)`.
    pub fn play(&self, state: &QuantumState, rng: &mut StreamRng) -> Result<(usize, usize, bool)> {
        let r = rng.below(self.coins);
        let s = state.apply_all(&self.gates(r))?;
        let z = if self.response.is_empty() {
            0
        } else {
            let probs = s.register_distribution(&self.response)?;
            rng.categorical(&probs)
        };
        Ok((r, z, self.verdict(r, z)))
    }
}
