use crate::math;
use crate::{Error, Result};

/// Uniform grid on `[0, 1]` with `ceil(1/ε) + 1` points, both endpoints
/// included. The spacing is `1 / ceil(1/ε) ≤ ε`; a value is reported as its
/// nearest grid point, i.e. the midpoint of its cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    epsilon: f64,
    intervals: usize,
}

impl Grid {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(alloc::format!("grid precision {epsilon} outside (0, 1]")));
        }
        let intervals = math::ceil_usize(1.0 / epsilon - 1e-12).max(1);
        Ok(Self { epsilon, intervals })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn value(&self, cell: usize) -> f64 {
        if cell >= self.intervals {
            1.0
        } else {
            cell as f64 / self.intervals as f64
        }
    }

    pub fn cell_of(&self, x: f64) -> usize {
        let c = math::round(x.clamp(0.0, 1.0) * self.intervals as f64);
        (c as usize).min(self.intervals)
    }

    pub fn round(&self, x: f64) -> f64 {
        self.value(self.cell_of(x))
    }
}
