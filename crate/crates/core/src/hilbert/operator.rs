use alloc::string::String;
use alloc::vec::Vec;

use super::local::{self, gather};
use super::{QuantumState, RegisterLayout};
use crate::linalg::{self, c, Matrix, STRUCTURE_TOL};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Unitary on a layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    layout: RegisterLayout,
    matrix: Matrix,
}

impl Unitary {
    pub fn new(layout: RegisterLayout, matrix: Matrix) -> Result<Self> {
        check_square(&layout, &matrix)?;
        let defect = linalg::unitarity_defect(&matrix);
        if defect > STRUCTURE_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { layout, matrix })
    }

    pub fn identity(layout: RegisterLayout) -> Self {
        let n = layout.dim();
        Self { layout, matrix: linalg::identity(n) }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { layout: self.layout.clone(), matrix: self.matrix.adjoint() }
    }

    /// `self` then `next`.
    pub fn then(&self, next: &Unitary) -> Result<Self> {
        if self.layout != next.layout {
            return Err(Error::Dimension("composed unitaries act on different layouts".into()));
        }
        Ok(Self { layout: self.layout.clone(), matrix: &next.matrix * &self.matrix })
    }

    /// Materialises `self` acting on `targets` (in order) inside `full`.
    pub fn lift<S: AsRef<str>>(&self, full: &RegisterLayout, targets: &[S]) -> Result<Matrix> {
        let g = checked_gather(full, targets, &self.layout)?;
        let mut m = linalg::identity(full.dim());
        local::apply_left(&g, &self.matrix, &mut m);
        Ok(m)
    }
}

/// A unitary together with the registers it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    pub unitary: Unitary,
    pub targets: Vec<String>,
}

impl LocalUnitary {
    pub fn new<S: Into<String>>(unitary: Unitary, targets: impl IntoIterator<Item = S>) -> Self {
        Self { unitary, targets: targets.into_iter().map(Into::into).collect() }
    }

    /// Applies `U` on the left of every column of `m`, where `m`'s rows are
    /// indexed by `full`.
    pub fn apply_left(&self, full: &RegisterLayout, m: &mut Matrix) -> Result<()> {
        let g = checked_gather(full, &self.targets, self.unitary.layout())?;
        local::apply_left(&g, self.unitary.matrix(), m);
        Ok(())
    }

    /// `U† m U`.
    pub fn heisenberg(&self, full: &RegisterLayout, m: &mut Matrix) -> Result<()> {
        let g = checked_gather(full, &self.targets, self.unitary.layout())?;
        local::conjugate(&g, &self.unitary.matrix().adjoint(), m);
        Ok(())
    }
}

pub(crate) fn checked_gather<S: AsRef<str>>(
    full: &RegisterLayout,
    targets: &[S],
    local_layout: &RegisterLayout,
) -> Result<local::Gather> {
    let pos = full.positions(targets)?;
    let dims: Vec<usize> = pos.iter().map(|&p| full.registers()[p].dim).collect();
    let want: Vec<usize> = local_layout.registers().iter().map(|r| r.dim).collect();
    if dims != want {
        return Err(Error::Dimension(alloc::format!("target dimensions {dims:?} do not match operator layout {want:?}")));
    }
    Ok(gather(full, &pos))
}

fn check_square(layout: &RegisterLayout, m: &Matrix) -> Result<()> {
    let n = layout.dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension(alloc::format!(
            "{}x{} matrix on a {n}-dimensional layout",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Orthogonal projector stored as an orthonormal basis of its range, so
/// applying it costs `O(n r)` rather than `O(n^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    layout: RegisterLayout,
    basis: Matrix,
}

impl Projector {
    pub fn new(layout: RegisterLayout, matrix: Matrix) -> Result<Self> {
        check_square(&layout, &matrix)?;
        let herm = linalg::hermiticity_defect(&matrix);
        if herm > STRUCTURE_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let idem = linalg::max_abs(&(&matrix * &matrix - &matrix));
        if idem > 1e-8 {
            return Err(Error::InvalidMeasurement(alloc::format!("P^2 != P (deviation {idem:e})")));
        }
        let (vals, vecs) = linalg::eigh(&matrix);
        let cols: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
        let basis = Matrix::from_fn(matrix.nrows(), cols.len(), |r, k| vecs[(r, cols[k])]);
        Ok(Self { layout, basis })
    }

    /// Projector onto the span of the given orthonormal columns.
    pub fn from_basis(layout: RegisterLayout, basis: Matrix) -> Result<Self> {
        if basis.nrows() != layout.dim() {
            return Err(Error::Dimension("basis rows do not match layout".into()));
        }
        let gram = basis.adjoint() * &basis;
        let defect = linalg::max_abs(&(gram - linalg::identity(basis.ncols())));
        if defect > 1e-8 {
            return Err(Error::InvalidMeasurement(alloc::format!("basis is not orthonormal ({defect:e})")));
        }
        Ok(Self { layout, basis })
    }

    /// As [`Projector::from_basis`] for columns orthonormal by construction.
    pub(crate) fn from_basis_unchecked(layout: RegisterLayout, basis: Matrix) -> Self {
        Self { layout, basis }
    }

    /// Projector onto computational basis vectors.
    pub fn from_indices(layout: RegisterLayout, indices: &[usize]) -> Self {
        let n = layout.dim();
        let mut basis = Matrix::zeros(n, indices.len());
        for (k, &i) in indices.iter().enumerate() {
            basis[(i, k)] = c(1.0);
        }
        Self { layout, basis }
    }

    pub fn zero(layout: RegisterLayout) -> Self {
        let n = layout.dim();
        Self { layout, basis: Matrix::zeros(n, 0) }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn matrix(&self) -> Matrix {
        &self.basis * self.basis.adjoint()
    }

    /// `P ρ P` for an unnormalised operator `ρ`.
    pub fn sandwich(&self, rho: &Matrix) -> Matrix {
        let inner = self.basis.adjoint() * rho * &self.basis;
        &self.basis * inner * self.basis.adjoint()
    }

    /// `(I - P) ρ (I - P)`.
    pub fn sandwich_complement(&self, rho: &Matrix) -> Matrix {
        let p = self.matrix();
        let rp = rho * &p;
        let prp = &p * &rp;
        rho - &p * rho - rp + prp
    }

    /// `Tr(P ρ)`.
    pub fn weight(&self, rho: &Matrix) -> f64 {
        let mut w = 0.0;
        for k in 0..self.basis.ncols() {
            let col = self.basis.column(k);
            w += (col.adjoint() * rho * col)[(0, 0)].re;
        }
        w
    }
}

/// Projective measurement; outcome labels are indices into the projector list.
#[derive(Clone, Debug, PartialEq)]
pub struct Pvm {
    layout: RegisterLayout,
    projectors: Vec<Projector>,
}

impl Pvm {
    pub fn new(layout: RegisterLayout, projectors: Vec<Projector>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::InvalidMeasurement("no outcomes".into()));
        }
        let n = layout.dim();
        let mut sum = linalg::zeros(n);
        for p in &projectors {
            if p.layout() != &layout {
                return Err(Error::Dimension("projector layout differs from measurement layout".into()));
            }
            sum += p.matrix();
        }
        let defect = linalg::max_abs(&(sum - linalg::identity(n)));
        if defect > 1e-8 {
            return Err(Error::InvalidMeasurement(alloc::format!("projectors sum to I up to {defect:e}")));
        }
        Ok(Self { layout, projectors })
    }

    /// As [`Pvm::new`] for projectors known to resolve the identity.
    pub(crate) fn new_unchecked(layout: RegisterLayout, projectors: Vec<Projector>) -> Self {
        Self { layout, projectors }
    }

    pub fn from_matrices(layout: RegisterLayout, matrices: Vec<Matrix>) -> Result<Self> {
        let ps = matrices
            .into_iter()
            .map(|m| Projector::new(layout.clone(), m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(layout, ps)
    }

    /// Two-outcome measurement `{P, I - P}`; outcome 0 is `P`.
    pub fn binary(p: Projector) -> Result<Self> {
        let layout = p.layout().clone();
        let comp = Projector::new(layout.clone(), linalg::identity(layout.dim()) - p.matrix())?;
        Self::new(layout, alloc::vec![p, comp])
    }

    /// Computational-basis measurement of one register.
    pub fn computational(layout: &RegisterLayout, register: &str) -> Result<Self> {
        let pos = layout.position(register)?;
        let d = layout.registers()[pos].dim;
        let mut buckets: Vec<Vec<usize>> = alloc::vec![Vec::new(); d];
        for i in 0..layout.dim() {
            buckets[layout.digits(i)[pos]].push(i);
        }
        Ok(Self {
            layout: layout.clone(),
            projectors: buckets.iter().map(|b| Projector::from_indices(layout.clone(), b)).collect(),
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn projector(&self, y: usize) -> &Projector {
        &self.projectors[y]
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn probabilities(&self, state: &QuantumState) -> Vec<f64> {
        self.projectors.iter().map(|p| state.projector_weight(p)).collect()
    }

    /// Samples an outcome and returns it with the normalised post-state.
    pub fn measure(&self, state: &QuantumState, rng: &mut StreamRng) -> (usize, QuantumState) {
        let probs = self.probabilities(state);
        let y = rng.categorical(&probs);
        (y, state.project(&self.projectors[y]).expect("sampled outcome has positive weight"))
    }

    /// Measures `{P_y, I - P_y}`; returns `true` on `P_y`.
    pub fn measure_binary(&self, y: usize, state: &QuantumState, rng: &mut StreamRng) -> (bool, QuantumState) {
        state.measure_binary(&self.projectors[y], rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ci, random_projector, random_unitary};

    fn hadamard() -> Matrix {
        let h = 1.0 / crate::math::sqrt(2.0);
        Matrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)])
    }

    #[test]
    fn rejects_non_unitary() {
        let l = RegisterLayout::single("a", 2);
        let m = Matrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        assert!(matches!(Unitary::new(l, m), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn lift_matches_kron() {
        let full = RegisterLayout::new([("a", 2), ("b", 3)]).unwrap();
        let u = Unitary::new(RegisterLayout::single("x", 2), hadamard()).unwrap();
        let lifted = u.lift(&full, &["a"]).unwrap();
        let expect = linalg::kron(&hadamard(), &linalg::identity(3));
        assert!(linalg::max_abs(&(lifted - expect)) < 1e-14);

        let mut rng = StreamRng::new(3, 0);
        let v = random_unitary(3, &mut rng);
        let uv = Unitary::new(RegisterLayout::single("y", 3), v.clone()).unwrap();
        let lifted = uv.lift(&full, &["b"]).unwrap();
        let expect = linalg::kron(&linalg::identity(2), &v);
        assert!(linalg::max_abs(&(lifted - expect)) < 1e-14);
    }

    #[test]
    fn lift_respects_target_order() {
        let full = RegisterLayout::new([("a", 2), ("b", 2)]).unwrap();
        let mut cnot = linalg::identity(4);
        cnot[(2, 2)] = c(0.0);
        cnot[(3, 3)] = c(0.0);
        cnot[(2, 3)] = c(1.0);
        cnot[(3, 2)] = c(1.0);
        let u = Unitary::new(RegisterLayout::qubits(&["c", "t"]).unwrap(), cnot.clone()).unwrap();
        let ab = u.lift(&full, &["a", "b"]).unwrap();
        assert!(linalg::max_abs(&(ab - &cnot)) < 1e-14);
        let ba = u.lift(&full, &["b", "a"]).unwrap();
        // control on b: |01> <-> |11>
        assert_eq!(ba[(3, 1)], c(1.0));
        assert_eq!(ba[(1, 3)], c(1.0));
        assert_eq!(ba[(0, 0)], c(1.0));
    }

    #[test]
    fn projector_from_matrix_recovers_rank() {
        let mut rng = StreamRng::new(4, 0);
        let p = random_projector(6, 3, &mut rng);
        let proj = Projector::new(RegisterLayout::single("a", 6), p.clone()).unwrap();
        assert_eq!(proj.rank(), 3);
        assert!(linalg::max_abs(&(proj.matrix() - p)) < 1e-10);
    }

    #[test]
    fn pvm_rejects_incomplete_sets() {
        let l = RegisterLayout::single("a", 2);
        let p0 = Projector::from_indices(l.clone(), &[0]);
        assert!(Pvm::new(l.clone(), alloc::vec![p0.clone()]).is_err());
        let p1 = Projector::from_indices(l.clone(), &[1]);
        assert!(Pvm::new(l, alloc::vec![p0, p1]).is_ok());
    }

    #[test]
    fn heisenberg_is_adjoint_action() {
        let full = RegisterLayout::new([("a", 2), ("b", 2)]).unwrap();
        let mut rng = StreamRng::new(5, 0);
        let v = random_unitary(2, &mut rng);
        let lu = LocalUnitary::new(Unitary::new(RegisterLayout::single("q", 2), v).unwrap(), ["b"]);
        let m = Matrix::from_fn(4, 4, |i, j| ci((i + 2 * j) as f64, (i * j) as f64));
        let mut h = m.clone();
        lu.heisenberg(&full, &mut h).unwrap();
        let u = lu.unitary.lift(&full, &["b"]).unwrap();
        let expect = u.adjoint() * m * u;
        assert!(linalg::max_abs(&(h - expect)) < 1e-12);
    }
}
