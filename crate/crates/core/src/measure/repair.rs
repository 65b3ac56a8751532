use core::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::ValueMeasurement;
use crate::hilbert::{Pvm, QuantumState};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::rng::StreamRng;

/// Number of calls made to measurements, for cost accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallCount {
    pub value_measurements: u64,
    pub projections: u64,
}

impl CallCount {
    pub fn total(&self) -> u64 {
        self.value_measurements + self.projections
    }
}

impl AddAssign for CallCount {
    fn add_assign(&mut self, rhs: Self) {
        self.value_measurements += rhs.value_measurements;
        self.projections += rhs.projections;
    }
}

/// Alternation budget `ceil(4/η)`.
pub fn repair_budget(eta: f64) -> usize {
    math::ceil_usize(4.0 / eta - 1e-12).max(1)
}

#[derive(Clone, Debug)]
pub struct RepairOutcome {
    pub state: QuantumState,
    /// Binary measurements performed.
    pub alternations: usize,
    pub exhausted: bool,
    /// Last value measured.
    pub value: f64,
    pub calls: CallCount,
}

/// Alternates the value measurement `m` with `{Π_y, I − Π_y}` until `m`
/// reports a value within `2ε` of `target`, or the budget of `ceil(4/η)`
/// alternations runs out.
pub fn repair(
    m: &ValueMeasurement,
    pi: &Pvm,
    y: usize,
    state: QuantumState,
    target: f64,
    eta: f64,
    rng: &mut StreamRng,
) -> RepairOutcome {
    let budget = repair_budget(eta);
    let tol = 2.0 * m.epsilon() + 1e-12;
    let mut calls = CallCount::default();
    let mut state = state;
    let mut alternations = 0;
    loop {
        let out = m.measure(&state, rng);
        calls.value_measurements += 1;
        if (out.value - target).abs() <= tol {
            return RepairOutcome { state: out.state, alternations, exhausted: false, value: out.value, calls };
        }
        if alternations == budget {
            return RepairOutcome { state: out.state, alternations, exhausted: true, value: out.value, calls };
        }
        state = pi.measure_binary(y, &out.state, rng).1;
        calls.projections += 1;
        alternations += 1;
    }
}

/// The repair procedure as a quantum channel on an unnormalised operator.
/// Branches whose remaining weight drops below `1e-15` of the input are
/// folded into the output as if the budget had run out.
pub fn repair_channel(m: &ValueMeasurement, pi: &Pvm, y: usize, rho: &Matrix, target: f64, eta: f64) -> Matrix {
    let budget = repair_budget(eta);
    let tol = 2.0 * m.epsilon() + 1e-12;
    let p = pi.projector(y);
    let floor = 1e-15 * rho.trace().re.abs();
    let mut done = linalg::zeros(rho.nrows());
    let mut running = rho.clone();
    let mut alternations = 0;
    loop {
        let mut rest = linalg::zeros(rho.nrows());
        for (value, block) in m.blocks(&running) {
            if (value - target).abs() <= tol {
                done += block;
            } else {
                rest += block;
            }
        }
        if alternations == budget || rest.trace().re <= floor {
            done += rest;
            return done;
        }
        running = p.sandwich(&rest) + p.sandwich_complement(&rest);
        alternations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Projector, RegisterLayout};
    use crate::linalg::{random_projector, random_unit_interval_operator, random_vector};
    use crate::measure::ValueFamily;

    #[test]
    fn budget_is_ceiling() {
        assert_eq!(repair_budget(0.5), 8);
        assert_eq!(repair_budget(0.3), 14);
        assert_eq!(repair_budget(4.0), 1);
    }

    #[test]
    fn commuting_projection_needs_no_alternation() {
        let l = RegisterLayout::single("a", 2);
        let f = ValueFamily::from_operator(l.clone(), linalg::from_real_diagonal(&[0.2, 0.8])).unwrap();
        let m = f.measurement(0.05, 0.1).unwrap();
        let pi = Pvm::computational(&l, "a").unwrap();
        let mut rng = StreamRng::new(61, 0);
        let s = QuantumState::basis(l, 1).unwrap();
        let out = repair(&m, &pi, 1, s, 0.8, 0.5, &mut rng);
        assert_eq!(out.alternations, 0);
        assert!(!out.exhausted);
    }

    #[test]
    fn channel_preserves_trace() {
        let mut rng = StreamRng::new(62, 0);
        let l = RegisterLayout::single("a", 4);
        let f = ValueFamily::from_operator(l.clone(), random_unit_interval_operator(4, &mut rng)).unwrap();
        let m = f.measurement(0.05, 0.1).unwrap();
        let p = Projector::new(l.clone(), random_projector(4, 2, &mut rng)).unwrap();
        let pi = Pvm::binary(p).unwrap();
        let v = random_vector(4, &mut rng);
        let rho = linalg::outer(&v, &v);
        let out = repair_channel(&m, &pi, 0, &rho, 0.5, 0.5);
        assert!((out.trace().re - 1.0).abs() < 1e-12);
    }
}
