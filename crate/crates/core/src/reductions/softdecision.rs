use alloc::sync::Arc;
use alloc::vec::Vec;

use super::DecisionRule;
use crate::hilbert::local::gather;
use crate::hilbert::{Projector, Pvm, QuantumState, RegisterLayout};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::memoryless::PvmSampler;
use crate::protocols::{Protocol, ProverStrategy, RepeatedProtocol, ThreeMessageProtocol, Transcript};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// `min{1, 2^{ν(ℓ+1−t)}}`.
pub fn softdecision_probability(nu: f64, t: usize, ell: usize) -> f64 {
    math::exp2(nu * (ell as f64 + 1.0 - t as f64)).min(1.0)
}

/// Acceptance probability of `rule` when `ell` of the other `k − 1`
/// coordinates accept.
pub fn decision_probability(rule: DecisionRule, nu: f64, t: usize, k: usize, ell: usize) -> f64 {
    match rule {
        DecisionRule::Soft => softdecision_probability(nu, t, ell),
        DecisionRule::Hard => {
            if ell + 1 >= k {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// `ω` as a uniform point of `[0, 1)`.
pub fn omega_unit(omega: u64) -> f64 {
    (omega >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn three_base(rep: &RepeatedProtocol) -> Result<&ThreeMessageProtocol> {
    match rep.base() {
        Protocol::ThreeMessage(p) => Ok(p),
        Protocol::PublicCoin(_) => Err(Error::InvalidParameter("soft decisions need a three-message protocol".into())),
    }
}

/// Coordinates other than `j`, in order, paired with `r^{(−j)}`.
fn others(k: usize, j: usize, r_minus_j: &[usize]) -> Result<impl Iterator<Item = (usize, usize)> + '_> {
    if j >= k || r_minus_j.len() + 1 != k {
        return Err(Error::Dimension(alloc::format!("r^(-j) must have k-1 = {} coordinates", k.saturating_sub(1))));
    }
    Ok((0..k).filter(move |&c| c != j).zip(r_minus_j.iter().copied()))
}

/// `Σ_{j′≠j} Accept_{j′}(r^{(−j)}, τ)` on a transcript with first messages,
/// queries and second messages.
pub fn others_accepting(rep: &RepeatedProtocol, j: usize, r_minus_j: &[usize], tau: &Transcript) -> Result<usize> {
    let p = three_base(rep)?;
    let k = rep.k();
    let z1 = tau.first.as_ref().ok_or_else(|| Error::InvalidParameter("transcript has no first message".into()))?;
    let (q, z2) = match (tau.queries.first(), tau.responses.first()) {
        (Some(q), Some(z2)) if !tau.aborted => (q, z2),
        _ => return Err(Error::InvalidParameter("transcript is not complete".into())),
    };
    if z1.len() != k || q.len() != k || z2.len() != k {
        return Err(Error::Dimension("transcript widths differ from k".into()));
    }
    Ok(others(k, j, r_minus_j)?.filter(|&(c, r)| p.accept(r, z1[c], q[c], z2[c])).count())
}

/// `SoftDecision_{ν,t}(j, r^{(−j)}, τ, ω)` (or its hard-decision variant).
pub fn softdecision(
    rep: &RepeatedProtocol,
    rule: DecisionRule,
    nu: f64,
    j: usize,
    r_minus_j: &[usize],
    tau: &Transcript,
    omega: u64,
) -> Result<bool> {
    let ell = others_accepting(rep, j, r_minus_j, tau)?;
    Ok(omega_unit(omega) < decision_probability(rule, nu, rep.t(), rep.k(), ell))
}

/// `q̄` from `r^{(−j)}` and the embedded query `q` at coordinate `j`.
pub fn complete_query(rep: &RepeatedProtocol, z1bar: &[usize], j: usize, r_minus_j: &[usize], q: usize) -> Result<Vec<usize>> {
    let p = three_base(rep)?;
    if z1bar.len() != rep.k() {
        return Err(Error::Dimension("first message width differs from k".into()));
    }
    if q >= p.query_size() {
        return Err(Error::InvalidParameter("query outside Q".into()));
    }
    let mut qbar = alloc::vec![q; rep.k()];
    for (c, r) in others(rep.k(), j, r_minus_j)? {
        qbar[c] = p.query_of(r, z1bar[c]);
    }
    Ok(qbar)
}

/// Full unitary of the prover's response round on query `q̄`.
fn round_unitary(prover: &ProverStrategy, layout: &RegisterLayout, qbar: &[usize]) -> Result<Matrix> {
    let mut u = linalg::identity(layout.dim());
    for g in prover.gates(0, qbar)? {
        g.apply_left(layout, &mut u)?;
    }
    Ok(u)
}

/// Smallest `ℓ` the decision accepts at this `ω` (`k` if none).
fn acceptance_level(rule: DecisionRule, nu: f64, t: usize, k: usize, omega: u64) -> usize {
    let u = omega_unit(omega);
    (0..k).find(|&ell| u < decision_probability(rule, nu, t, k, ell)).unwrap_or(k)
}

/// The binary PVM `{Π_0, Π_1}` of `SoftDecisionProj_{z̄₁, j, r^{(−j)}, q, ω}`
/// with `Π_1 = U_q̄† (Σ_{z̄₂ : SoftDecision = 1} |z̄₂⟩⟨z̄₂|) U_q̄`; outcome
/// index is the bit `b`.
#[allow(clippy::too_many_arguments)]
pub fn softdecision_pvm(
    rep: &RepeatedProtocol,
    prover: &ProverStrategy,
    z1bar: &[usize],
    j: usize,
    r_minus_j: &[usize],
    q: usize,
    omega: u64,
    rule: DecisionRule,
    nu: f64,
) -> Result<Pvm> {
    let p = three_base(rep)?;
    let qbar = complete_query(rep, z1bar, j, r_minus_j, q)?;
    let layout = crate::protocols::three_layout(prover)?;
    let regs = prover.response_registers(0);
    let pos = layout.positions(regs)?;
    let sub = layout.select(regs)?;
    let g = gather(&layout, &pos);
    let level = acceptance_level(rule, nu, rep.t(), rep.k(), omega);
    let udag = round_unitary(prover, &layout, &qbar)?.adjoint();
    let (mut one, mut zero) = (Vec::new(), Vec::new());
    for z in 0..g.target_dim {
        let z2bar = sub.digits(z);
        let ell = others(rep.k(), j, r_minus_j)?
            .filter(|&(c, r)| p.accept(r, z1bar[c], qbar[c], z2bar[c]))
            .count();
        let target = if ell >= level { &mut one } else { &mut zero };
        target.extend(g.groups.iter().map(|grp| grp[z]));
    }
    let cols = |idx: &[usize]| {
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        let mut b = Matrix::zeros(layout.dim(), sorted.len());
        for (c, &x) in sorted.iter().enumerate() {
            b.set_column(c, &udag.column(x));
        }
        b
    };
    // columns of a unitary, so both families are orthonormal and complementary
    let p1 = Projector::from_basis_unchecked(layout.clone(), cols(&one));
    let p0 = Projector::from_basis_unchecked(layout.clone(), cols(&zero));
    Ok(Pvm::new_unchecked(layout, alloc::vec![p0, p1]))
}

/// Applies `SoftDecisionProj` and returns `(post-state, b)`.
#[allow(clippy::too_many_arguments)]
pub fn softdecision_proj(
    rep: &RepeatedProtocol,
    prover: &ProverStrategy,
    z1bar: &[usize],
    j: usize,
    r_minus_j: &[usize],
    q: usize,
    omega: u64,
    state: &QuantumState,
    rule: DecisionRule,
    nu: f64,
    rng: &mut StreamRng,
) -> Result<(QuantumState, bool)> {
    let pvm = softdecision_pvm(rep, prover, z1bar, j, r_minus_j, q, omega, rule, nu)?;
    if state.layout() != pvm.layout() {
        return Err(Error::Dimension("state does not match the second-round registers".into()));
    }
    let (b, s) = pvm.measure(state, rng);
    Ok((s, b == 1))
}

/// The family `{SoftDecisionProj_{z̄₁, j, r^{(−j)}, q, ω}}` sampled with `j`,
/// `r^{(−j)}` and `ω` uniform and `q` drawn as the verifier would,
/// `q = query_of(r, z̄₁^j)` for fresh uniform `r`.
pub struct SoftDecisionFamily<'a> {
    rep: &'a RepeatedProtocol,
    prover: &'a ProverStrategy,
    z1bar: Vec<usize>,
    rule: DecisionRule,
    nu: f64,
}

impl<'a> SoftDecisionFamily<'a> {
    pub fn new(rep: &'a RepeatedProtocol, prover: &'a ProverStrategy, z1bar: &[usize], rule: DecisionRule, nu: f64) -> Result<Self> {
        three_base(rep)?;
        if z1bar.len() != rep.k() {
            return Err(Error::Dimension("first message width differs from k".into()));
        }
        Ok(Self { rep, prover, z1bar: z1bar.to_vec(), rule, nu })
    }

    pub fn member(&self, j: usize, r_minus_j: &[usize], q: usize, omega: u64) -> Result<Pvm> {
        softdecision_pvm(self.rep, self.prover, &self.z1bar, j, r_minus_j, q, omega, self.rule, self.nu)
    }

    /// Identifier of the member, determined by `(j, r^{(−j)}, q)` and the
    /// acceptance level `ω` induces.
    pub fn member_id(&self, j: usize, r_minus_j: &[usize], q: usize, omega: u64) -> u64 {
        let p = three_base(self.rep).expect("checked in new");
        let k = self.rep.k() as u64;
        let mut id = j as u64;
        for &r in r_minus_j {
            id = id * p.randomness() as u64 + r as u64;
        }
        id = id * p.query_size() as u64 + q as u64;
        id * (k + 1) + acceptance_level(self.rule, self.nu, self.rep.t(), self.rep.k(), omega) as u64
    }
}

impl PvmSampler for SoftDecisionFamily<'_> {
    fn outcomes(&self) -> usize {
        2
    }

    fn sample(&self, rng: &mut StreamRng) -> Result<(u64, Arc<Pvm>)> {
        let p = three_base(self.rep)?;
        let k = self.rep.k();
        let j = rng.below(k);
        let r_minus_j: Vec<usize> = (0..k - 1).map(|_| rng.below(p.randomness())).collect();
        let q = p.query_of(rng.below(p.randomness()), self.z1bar[j]);
        let omega = rand::RngCore::next_u64(rng);
        Ok((self.member_id(j, &r_minus_j, q, omega), Arc::new(self.member(j, &r_minus_j, q, omega)?)))
    }
}
