use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::hilbert::{LocalUnitary, QuantumState, RegisterLayout, StateData, Unitary};
use crate::linalg::Matrix;
use crate::math;
use crate::{Error, Result};

/// Gates for a whole query vector.
pub type JointAction = Arc<dyn Fn(&[usize]) -> Vec<LocalUnitary> + Send + Sync>;

/// Copy `j`'s response to its own query: `unitaries[q]` on `targets`.
#[derive(Clone, Debug)]
pub struct CopyAction {
    pub targets: Vec<String>,
    pub unitaries: Vec<Unitary>,
}

#[derive(Clone)]
pub enum RoundAction {
    /// One [`CopyAction`] per coordinate, acting independently.
    Product(Vec<CopyAction>),
    Joint(JointAction),
}

/// A (possibly `k`-fold) prover: an initial state and, for each response
/// round, the unitary it applies on receiving the query vector before the
/// response registers are measured. For three-message protocols the first
/// message registers are measured directly from the initial state.
#[derive(Clone)]
pub struct ProverStrategy {
    name: String,
    initial: QuantumState,
    copies: usize,
    first: Option<Vec<String>>,
    responses: Vec<Vec<String>>,
    actions: Vec<RoundAction>,
}

impl core::fmt::Debug for ProverStrategy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ProverStrategy")
            .field("name", &self.name)
            .field("copies", &self.copies)
            .field("layout", self.initial.layout())
            .finish_non_exhaustive()
    }
}

impl ProverStrategy {
    pub fn new(
        name: impl Into<String>,
        initial: QuantumState,
        copies: usize,
        first: Option<Vec<String>>,
        responses: Vec<Vec<String>>,
        actions: Vec<RoundAction>,
    ) -> Result<Self> {
        let layout = initial.layout();
        if copies == 0 || responses.len() != actions.len() {
            return Err(Error::InvalidParameter("one action per response round and at least one copy".into()));
        }
        if let Some(f) = &first {
            if f.len() != copies {
                return Err(Error::Dimension("one first-message register per copy".into()));
            }
            layout.positions(f)?;
        }
        for (round, regs) in responses.iter().enumerate() {
            if regs.len() != copies {
                return Err(Error::Dimension(alloc::format!("round {round}: one response register per copy")));
            }
            layout.positions(regs)?;
            let mut measured: Vec<String> = first.iter().flatten().cloned().collect();
            measured.extend(responses[..round].iter().flatten().cloned());
            if let RoundAction::Product(acts) = &actions[round] {
                if acts.iter().any(|a| a.targets.iter().any(|t| measured.contains(t))) {
                    return Err(Error::InvalidParameter(alloc::format!("round {round} acts on an already measured register")));
                }
                if acts.len() != copies {
                    return Err(Error::Dimension(alloc::format!("round {round}: one copy action per copy")));
                }
                for a in acts {
                    let sub = layout.select(&a.targets)?;
                    if a.unitaries.iter().any(|u| u.layout().dim() != sub.dim()) {
                        return Err(Error::Dimension("copy unitary does not match its targets".into()));
                    }
                }
            }
        }
        Ok(Self { name: name.into(), initial, copies, first, responses, actions })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn initial(&self) -> &QuantumState {
        &self.initial
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.initial.layout()
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// `Λ = log₂ dim`.
    pub fn qubits(&self) -> f64 {
        math::log2(self.layout().dim() as f64)
    }

    pub fn first_registers(&self) -> Option<&[String]> {
        self.first.as_deref()
    }

    pub fn response_registers(&self, round: usize) -> &[String] {
        &self.responses[round]
    }

    pub fn rounds(&self) -> usize {
        self.actions.len()
    }

    pub fn action(&self, round: usize) -> &RoundAction {
        &self.actions[round]
    }

    /// Gates applied in `round` on query vector `qbar`.
    pub fn gates(&self, round: usize, qbar: &[usize]) -> Result<Vec<LocalUnitary>> {
        match &self.actions[round] {
            RoundAction::Product(acts) => acts
                .iter()
                .zip(qbar)
                .map(|(a, &q)| {
                    let u = a.unitaries.get(q).ok_or_else(|| Error::InvalidParameter(alloc::format!("no unitary for query {q}")))?;
                    Ok(LocalUnitary { unitary: u.clone(), targets: a.targets.clone() })
                })
                .collect(),
            RoundAction::Joint(f) => Ok(f(qbar)),
        }
    }

    /// `k`-fold tensor power of a single-copy strategy with product actions.
    /// Copy `j`'s register `X` becomes `c{j}.X`; copies are laid out in order.
    pub fn power(&self, k: usize) -> Result<Self> {
        if self.copies != 1 {
            return Err(Error::InvalidParameter("power of a strategy that already has several copies".into()));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        let rename = |j: usize, r: &str| alloc::format!("c{j}.{r}");
        let mut initial: Option<QuantumState> = None;
        for j in 0..k {
            let regs = self.layout().registers().iter().map(|r| (rename(j, &r.name), r.dim));
            let layout = RegisterLayout::new(regs)?;
            let copy = match self.initial.data() {
                StateData::Pure(v) => QuantumState::pure(layout, v.clone())?,
                StateData::Mixed(m) => QuantumState::mixed(layout, m.clone())?,
            };
            initial = Some(match initial {
                None => copy,
                Some(s) => s.tensor(&copy)?,
            });
        }
        let first = self.first.as_ref().map(|f| (0..k).map(|j| rename(j, &f[0])).collect());
        let responses = self.responses.iter().map(|r| (0..k).map(|j| rename(j, &r[0])).collect()).collect();
        let actions = self
            .actions
            .iter()
            .map(|a| match a {
                RoundAction::Product(acts) => Ok(RoundAction::Product(
                    (0..k)
                        .map(|j| CopyAction {
                            targets: acts[0].targets.iter().map(|t| rename(j, t)).collect(),
                            unitaries: acts[0].unitaries.clone(),
                        })
                        .collect(),
                )),
                RoundAction::Joint(_) => Err(Error::InvalidParameter("cannot take powers of joint actions".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alloc::format!("{}^{k}", self.name), initial.expect("k >= 1"), k, first, responses, actions)
    }

    /// Helper for single-copy strategies whose round actions are given as
    /// plain matrices on `targets`.
    pub fn single_copy(
        name: impl Into<String>,
        initial: QuantumState,
        first: Option<&str>,
        responses: &[&str],
        rounds: Vec<(Vec<&str>, Vec<Matrix>)>,
    ) -> Result<Self> {
        let layout = initial.layout().clone();
        let actions = rounds
            .into_iter()
            .map(|(targets, mats)| {
                let sub = layout.select(&targets)?;
                let unitaries = mats.into_iter().map(|m| Unitary::new(sub.clone(), m)).collect::<Result<Vec<_>>>()?;
                Ok(RoundAction::Product(alloc::vec![CopyAction {
                    targets: targets.iter().map(|t| t.to_string()).collect(),
                    unitaries,
                }]))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            name,
            initial,
            1,
            first.map(|f| alloc::vec![f.to_string()]),
            responses.iter().map(|r| alloc::vec![r.to_string()]).collect(),
            actions,
        )
    }
}
