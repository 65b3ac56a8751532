use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{GameSpec, Grid};
use crate::hilbert::{Projector, Pvm, QuantumState, RegisterLayout};
use crate::linalg::{self, Matrix, STRUCTURE_TOL};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Eigenvalues closer than this are treated as one degenerate eigenspace.
const CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug)]
struct Spectrum {
    layout: RegisterLayout,
    operator: Matrix,
    /// `(eigenvalue, eigenvector columns)` per degenerate eigenspace, ascending.
    clusters: Vec<(f64, Matrix)>,
}

/// Hermitian operator with spectrum in `[0, 1]` and its eigendecomposition.
/// Clones share the decomposition.
#[derive(Clone, Debug)]
pub struct ValueFamily {
    spectrum: Arc<Spectrum>,
}

impl ValueFamily {
    pub fn from_operator(layout: RegisterLayout, operator: Matrix) -> Result<Self> {
        let n = layout.dim();
        if operator.nrows() != n || operator.ncols() != n {
            return Err(Error::Dimension("operator size does not match layout".into()));
        }
        let h = linalg::hermiticity_defect(&operator);
        if h > STRUCTURE_TOL {
            return Err(Error::NotHermitian(h));
        }
        let operator = linalg::hermitian_part(&operator);
        let (mut vals, vecs) = linalg::eigh(&operator);
        linalg::clamp_spectrum(&mut vals, 0.0, 1.0).map_err(Error::SpectrumOutOfRange)?;

        let mut clusters = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && vals[end] - vals[end - 1] <= CLUSTER_TOL {
                end += 1;
            }
            let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
            clusters.push((mean, vecs.columns(start, end - start).into_owned()));
            start = end;
        }
        Ok(Self { spectrum: Arc::new(Spectrum { layout, operator, clusters }) })
    }

    pub fn from_game(game: &GameSpec) -> Result<Self> {
        Self::from_operator(game.layout().clone(), game.success_operator()?)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.spectrum.layout
    }

    pub fn operator(&self) -> &Matrix {
        &self.spectrum.operator
    }

    /// Distinct eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum.clusters.iter().map(|c| c.0).collect()
    }

    /// `Tr(M ρ)`.
    pub fn expectation(&self, state: &QuantumState) -> f64 {
        state.expectation(&self.spectrum.operator)
    }

    /// The value measurement at precision `epsilon`. `delta` is recorded for
    /// parameter bookkeeping; the spectral construction never errs beyond the
    /// grid rounding.
    pub fn measurement(&self, epsilon: f64, delta: f64) -> Result<ValueMeasurement> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("failure probability {delta} outside (0, 1)")));
        }
        let grid = Grid::new(epsilon)?;
        let n = self.layout().dim();
        let mut bins: Vec<(usize, Vec<usize>)> = Vec::new();
        for (k, (val, _)) in self.spectrum.clusters.iter().enumerate() {
            let cell = grid.cell_of(*val);
            match bins.last_mut() {
                Some((c, ks)) if *c == cell => ks.push(k),
                _ => bins.push((cell, alloc::vec![k])),
            }
        }
        let bins = bins
            .into_iter()
            .map(|(cell, ks)| {
                let width: usize = ks.iter().map(|&k| self.spectrum.clusters[k].1.ncols()).sum();
                let mut basis = Matrix::zeros(n, width);
                let mut col = 0;
                for &k in &ks {
                    let block = &self.spectrum.clusters[k].1;
                    basis.columns_mut(col, block.ncols()).copy_from(block);
                    col += block.ncols();
                }
                Bin { cell, value: grid.value(cell), projector: Projector::from_basis_unchecked(self.layout().clone(), basis) }
            })
            .collect();
        Ok(ValueMeasurement { family: self.clone(), grid, delta, bins: Arc::new(bins) })
    }
}

#[derive(Clone, Debug)]
struct Bin {
    cell: usize,
    value: f64,
    projector: Projector,
}

/// Result of one value measurement.
#[derive(Clone, Debug)]
pub struct ValueOutcome {
    pub value: f64,
    pub cell: usize,
    pub state: QuantumState,
}

/// Spectral value measurement at a fixed grid.
#[derive(Clone, Debug)]
pub struct ValueMeasurement {
    family: ValueFamily,
    grid: Grid,
    delta: f64,
    bins: Arc<Vec<Bin>>,
}

impl ValueMeasurement {
    pub fn family(&self) -> &ValueFamily {
        &self.family
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn epsilon(&self) -> f64 {
        self.grid.epsilon()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.family.layout()
    }

    /// Number of grid cells carrying spectral weight.
    pub fn outcome_count(&self) -> usize {
        self.bins.len()
    }

    /// Outcome distribution as `(value, probability)`, ascending in value.
    pub fn outcome_distribution(&self, state: &QuantumState) -> Vec<(f64, f64)> {
        self.bins.iter().map(|b| (b.value, state.projector_weight(&b.projector))).collect()
    }

    /// Exact mean of the unrounded spectral measurement, `Tr(M ρ)`.
    pub fn prebinned_mean(&self, state: &QuantumState) -> f64 {
        self.family.expectation(state)
    }

    pub fn measure(&self, state: &QuantumState, rng: &mut StreamRng) -> ValueOutcome {
        if self.bins.len() == 1 {
            let b = &self.bins[0];
            return ValueOutcome { value: b.value, cell: b.cell, state: state.clone() };
        }
        let weights: Vec<f64> = self.bins.iter().map(|b| state.projector_weight(&b.projector)).collect();
        let k = rng.categorical(&weights);
        let b = &self.bins[k];
        ValueOutcome {
            value: b.value,
            cell: b.cell,
            state: state.project(&b.projector).expect("sampled bin has weight"),
        }
    }

    /// `(value, P_b ρ P_b)` for every bin, on an unnormalised operator.
    pub fn blocks(&self, rho: &Matrix) -> Vec<(f64, Matrix)> {
        if self.bins.len() == 1 {
            return alloc::vec![(self.bins[0].value, rho.clone())];
        }
        self.bins.iter().map(|b| (b.value, b.projector.sandwich(rho))).collect()
    }

    /// Bin projectors with their reported values.
    pub fn projectors(&self) -> Vec<(f64, Projector)> {
        self.bins.iter().map(|b| (b.value, b.projector.clone())).collect()
    }

    /// The measurement as a PVM indexed by grid cell; cells without spectral
    /// weight get the zero projector.
    pub fn pvm(&self) -> Pvm {
        let mut ps: Vec<Projector> = (0..self.grid.len()).map(|_| Projector::zero(self.layout().clone())).collect();
        for b in self.bins.iter() {
            ps[b.cell] = b.projector.clone();
        }
        Pvm::new_unchecked(self.layout().clone(), ps)
    }
}
