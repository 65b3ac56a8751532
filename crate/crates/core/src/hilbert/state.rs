use alloc::vec::Vec;

use super::local::{self, gather};
use super::operator::checked_gather;
use super::{LocalUnitary, Projector, RegisterLayout, Unitary};
use crate::linalg::{self, c, Matrix, Vector, C64, CLAMP_TOL, STRUCTURE_TOL};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Below this weight an outcome is treated as impossible.
const NEGLIGIBLE: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Pure(Vector),
    Mixed(Matrix),
}

/// Density operator on a layout; pure states stay as vectors until a mixing
/// operation forces the promotion.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    layout: RegisterLayout,
    data: StateData,
}

impl QuantumState {
    pub fn pure(layout: RegisterLayout, v: Vector) -> Result<Self> {
        if v.len() != layout.dim() {
            return Err(Error::Dimension(alloc::format!("vector of length {} on dimension {}", v.len(), layout.dim())));
        }
        let n = v.norm();
        if (n - 1.0).abs() > STRUCTURE_TOL {
            return Err(Error::InvalidState(alloc::format!("vector norm {n}")));
        }
        Ok(Self { layout, data: StateData::Pure(v) })
    }

    pub fn mixed(layout: RegisterLayout, rho: Matrix) -> Result<Self> {
        let n = layout.dim();
        if rho.nrows() != n || rho.ncols() != n {
            return Err(Error::Dimension(alloc::format!("{}x{} density on dimension {n}", rho.nrows(), rho.ncols())));
        }
        let h = linalg::hermiticity_defect(&rho);
        if h > STRUCTURE_TOL {
            return Err(Error::NotHermitian(h));
        }
        let t = rho.trace();
        if (t.re - 1.0).abs() > STRUCTURE_TOL || t.im.abs() > STRUCTURE_TOL {
            return Err(Error::InvalidState(alloc::format!("trace {t}")));
        }
        let min = linalg::eigvalsh(&rho).first().copied().unwrap_or(0.0);
        if min < -CLAMP_TOL {
            return Err(Error::InvalidState(alloc::format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { layout, data: StateData::Mixed(linalg::hermitian_part(&rho)) })
    }

    /// Computational basis state `|index>`.
    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let n = layout.dim();
        if index >= n {
            return Err(Error::Dimension(alloc::format!("basis index {index} on dimension {n}")));
        }
        let mut v = Vector::zeros(n);
        v[index] = c(1.0);
        Ok(Self { layout, data: StateData::Pure(v) })
    }

    pub fn basis_digits(layout: RegisterLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.len() || digits.iter().zip(layout.registers()).any(|(&d, r)| d >= r.dim) {
            return Err(Error::Dimension("digits do not fit the layout".into()));
        }
        let i = layout.index(digits);
        Self::basis(layout, i)
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let n = layout.dim();
        Self { layout, data: StateData::Mixed(linalg::identity(n).unscale(n as f64)) }
    }

    /// Diagonal density operator from a probability vector.
    pub fn classical(layout: RegisterLayout, probs: &[f64]) -> Result<Self> {
        if probs.len() != layout.dim() {
            return Err(Error::Dimension("probability vector length".into()));
        }
        Self::mixed(layout, linalg::from_real_diagonal(probs))
    }

    /// Convex combination of states on a common layout.
    pub fn mix(parts: &[(f64, QuantumState)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let layout = first.1.layout.clone();
        let mut rho = linalg::zeros(layout.dim());
        for (w, s) in parts {
            if s.layout != layout {
                return Err(Error::Dimension("mixture over different layouts".into()));
            }
            if *w < 0.0 {
                return Err(Error::InvalidParameter("negative mixture weight".into()));
            }
            rho += s.density().scale(*w);
        }
        Self::mixed(layout, rho)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn data(&self) -> &StateData {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn is_pure_repr(&self) -> bool {
        matches!(self.data, StateData::Pure(_))
    }

    pub fn density(&self) -> Matrix {
        match &self.data {
            StateData::Pure(v) => linalg::outer(v, v),
            StateData::Mixed(m) => m.clone(),
        }
    }

    /// Checks the invariants a state must satisfy at `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        match &self.data {
            StateData::Pure(v) => {
                let n = v.norm();
                if (n - 1.0).abs() > tol {
                    return Err(Error::InvalidState(alloc::format!("vector norm {n}")));
                }
            }
            StateData::Mixed(m) => {
                let h = linalg::hermiticity_defect(m);
                if h > tol {
                    return Err(Error::NotHermitian(h));
                }
                let t = m.trace().re;
                if (t - 1.0).abs() > tol {
                    return Err(Error::InvalidState(alloc::format!("trace {t}")));
                }
                let min = linalg::eigvalsh(m).first().copied().unwrap_or(0.0);
                if min < -tol {
                    return Err(Error::InvalidState(alloc::format!("negative eigenvalue {min:e}")));
                }
            }
        }
        Ok(())
    }

    /// `Tr(A ρ)` for Hermitian `A` (real part).
    pub fn expectation(&self, a: &Matrix) -> f64 {
        match &self.data {
            StateData::Pure(v) => (v.adjoint() * a * v)[(0, 0)].re,
            StateData::Mixed(m) => (a * m).trace().re,
        }
    }

    pub fn tensor(&self, other: &QuantumState) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        let data = match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => StateData::Pure(a.kronecker(b)),
            _ => StateData::Mixed(self.density().kronecker(&other.density())),
        };
        Ok(Self { layout, data })
    }

    /// Applies `u` to the registers `targets` (in the order of `u`'s layout).
    pub fn apply<S: AsRef<str>>(&self, u: &Unitary, targets: &[S]) -> Result<Self> {
        let g = checked_gather(&self.layout, targets, u.layout())?;
        Ok(self.apply_gathered(&g, u.matrix()))
    }

    pub fn apply_local(&self, u: &LocalUnitary) -> Result<Self> {
        self.apply(&u.unitary, &u.targets)
    }

    pub fn apply_all(&self, us: &[LocalUnitary]) -> Result<Self> {
        let mut s = self.clone();
        for u in us {
            s = s.apply_local(u)?;
        }
        Ok(s)
    }

    /// Applies a unitary on the whole space.
    pub fn apply_full(&self, u: &Matrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::Dimension("full-space operator size".into()));
        }
        let data = match &self.data {
            StateData::Pure(v) => StateData::Pure(u * v),
            StateData::Mixed(m) => StateData::Mixed(u * m * u.adjoint()),
        };
        Ok(Self { layout: self.layout.clone(), data })
    }

    fn apply_gathered(&self, g: &local::Gather, u: &Matrix) -> Self {
        let data = match &self.data {
            StateData::Pure(v) => {
                let mut v = v.clone();
                local::apply_vec(g, u, &mut v);
                StateData::Pure(v)
            }
            StateData::Mixed(m) => {
                let mut m = m.clone();
                local::conjugate(g, u, &mut m);
                StateData::Mixed(m)
            }
        };
        Self { layout: self.layout.clone(), data }
    }

    /// Reduced state on `keep`, in the order given.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self> {
        let kept = self.layout.select(keep)?;
        let pos = self.layout.positions(keep)?;
        let g = gather(&self.layout, &pos);
        let d = g.target_dim;
        let mut out = linalg::zeros(d);
        match &self.data {
            StateData::Pure(v) => {
                for grp in &g.groups {
                    for a in 0..d {
                        let va = v[grp[a]];
                        for b in 0..d {
                            out[(a, b)] += va * v[grp[b]].conj();
                        }
                    }
                }
            }
            StateData::Mixed(m) => {
                for grp in &g.groups {
                    for a in 0..d {
                        for b in 0..d {
                            out[(a, b)] += m[(grp[a], grp[b])];
                        }
                    }
                }
            }
        }
        Ok(Self { layout: kept, data: StateData::Mixed(out) })
    }

    /// `Tr(P ρ)`.
    pub fn projector_weight(&self, p: &Projector) -> f64 {
        let b = p.basis();
        match &self.data {
            StateData::Pure(v) => (b.adjoint() * v).norm_squared(),
            StateData::Mixed(m) => p.weight(m),
        }
    }

    /// Normalised `P ρ P`, or `None` when the outcome has zero weight.
    pub fn project(&self, p: &Projector) -> Option<Self> {
        let b = p.basis();
        let data = match &self.data {
            StateData::Pure(v) => {
                let w = b * (b.adjoint() * v);
                let n = w.norm();
                if n * n <= NEGLIGIBLE {
                    return None;
                }
                StateData::Pure(w.unscale(n))
            }
            StateData::Mixed(m) => {
                let s = p.sandwich(m);
                let t = s.trace().re;
                if t <= NEGLIGIBLE {
                    return None;
                }
                StateData::Mixed(s.unscale(t))
            }
        };
        Some(Self { layout: self.layout.clone(), data })
    }

    /// Normalised `(I - P) ρ (I - P)`.
    pub fn project_complement(&self, p: &Projector) -> Option<Self> {
        let b = p.basis();
        let data = match &self.data {
            StateData::Pure(v) => {
                let w = v - b * (b.adjoint() * v);
                let n = w.norm();
                if n * n <= NEGLIGIBLE {
                    return None;
                }
                StateData::Pure(w.unscale(n))
            }
            StateData::Mixed(m) => {
                let s = p.sandwich_complement(m);
                let t = s.trace().re;
                if t <= NEGLIGIBLE {
                    return None;
                }
                StateData::Mixed(s.unscale(t))
            }
        };
        Some(Self { layout: self.layout.clone(), data })
    }

    /// Measures `{P, I - P}`; `true` means the `P` outcome.
    pub fn measure_binary(&self, p: &Projector, rng: &mut StreamRng) -> (bool, Self) {
        let w = self.projector_weight(p).clamp(0.0, 1.0);
        if rng.bernoulli(w) {
            if let Some(s) = self.project(p) {
                return (true, s);
            }
        }
        match self.project_complement(p) {
            Some(s) => (false, s),
            None => (true, self.project(p).expect("one branch has weight")),
        }
    }

    /// Distribution of a computational-basis measurement of `registers`,
    /// indexed by the joint value (first register most significant).
    pub fn register_distribution<S: AsRef<str>>(&self, registers: &[S]) -> Result<Vec<f64>> {
        let pos = self.layout.positions(registers)?;
        let g = gather(&self.layout, &pos);
        let mut probs = alloc::vec![0.0; g.target_dim];
        for grp in &g.groups {
            for (t, &idx) in grp.iter().enumerate() {
                probs[t] += match &self.data {
                    StateData::Pure(v) => v[idx].norm_sqr(),
                    StateData::Mixed(m) => m[(idx, idx)].re,
                };
            }
        }
        Ok(probs)
    }

    /// Measures `registers` in the computational basis; returns the value of
    /// each register and the post-state, either keeping the measured registers
    /// (collapsed) or dropping them from the layout.
    pub fn measure_registers<S: AsRef<str>>(
        &self,
        registers: &[S],
        drop: bool,
        rng: &mut StreamRng,
    ) -> Result<(Vec<usize>, Self)> {
        let probs = self.register_distribution(registers)?;
        let t = rng.categorical(&probs);
        let state = self.condition_registers(registers, t, drop)?;
        let sub = self.layout.select(registers)?;
        Ok((sub.digits(t), state))
    }

    /// Post-measurement state for joint outcome `value` on `registers`.
    pub fn condition_registers<S: AsRef<str>>(&self, registers: &[S], value: usize, drop: bool) -> Result<Self> {
        let pos = self.layout.positions(registers)?;
        let g = gather(&self.layout, &pos);
        let idx: Vec<usize> = g.groups.iter().map(|grp| grp[value]).collect();
        let kept_layout = if drop { self.layout.without(registers)? } else { self.layout.clone() };
        let data = match &self.data {
            StateData::Pure(v) => {
                let w = if drop {
                    Vector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
                } else {
                    let mut w = Vector::zeros(v.len());
                    for &i in &idx {
                        w[i] = v[i];
                    }
                    w
                };
                let n = w.norm();
                if n * n <= NEGLIGIBLE {
                    return Err(Error::InvalidState("conditioning on an impossible outcome".into()));
                }
                StateData::Pure(w.unscale(n))
            }
            StateData::Mixed(m) => {
                let w = if drop {
                    Matrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
                } else {
                    let mut w = linalg::zeros(m.nrows());
                    for &a in &idx {
                        for &b in &idx {
                            w[(a, b)] = m[(a, b)];
                        }
                    }
                    w
                };
                let t = w.trace().re;
                if t <= NEGLIGIBLE {
                    return Err(Error::InvalidState("conditioning on an impossible outcome".into()));
                }
                StateData::Mixed(w.unscale(t))
            }
        };
        Ok(Self { layout: kept_layout, data })
    }

    /// Inner product `<self|other>` of two pure representations.
    pub(crate) fn overlap(&self, other: &QuantumState) -> Option<C64> {
        match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => Some(a.dotc(b)),
            _ => None,
        }
    }
}
