use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{FloodingParams, ProjectionFamily};
use crate::hilbert::{trace_distance_matrices, QuantumState};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::measure::{repair_channel, ValueFamily, ValueMeasurement};
use crate::rng::StreamRng;
use crate::{Error, Result};

/// Families larger than this are handled by sampling members.
pub const EXACT_MEMBER_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ForgetMode {
    Exact,
    Sampled { samples: usize, std_error: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForgetReport {
    /// `TD((Π, σ*_Π), (Π', σ*_Π))` with `Π'` drawn independently.
    pub distance: f64,
    /// `N · η`.
    pub bound: f64,
    pub rounds: usize,
    pub conformant: bool,
    /// `½‖σ*_Π − E_Π' σ*_Π'‖₁` per member considered.
    pub per_member: Vec<f64>,
    pub mode: ForgetMode,
}

const SKIP: f64 = 1e-18;

fn dephase(m: &ValueMeasurement, rho: &Matrix) -> Matrix {
    let mut out = linalg::zeros(rho.nrows());
    for (_, b) in m.blocks(rho) {
        out += b;
    }
    out
}

/// One flooding round (value measurement, uniformly random member, its
/// outcome, repair) as a channel.
fn flood_channel(m: &ValueMeasurement, family: &ProjectionFamily, rho: &Matrix, eta: f64) -> Matrix {
    let w = 1.0 / family.len() as f64;
    let mut out = linalg::zeros(rho.nrows());
    for (v, x) in m.blocks(rho) {
        if x.trace().re <= SKIP {
            continue;
        }
        for pi in family.members() {
            for (y, p) in pi.projectors().iter().enumerate() {
                let branch = p.sandwich(&x);
                if branch.trace().re <= SKIP {
                    continue;
                }
                out += repair_channel(m, pi, y, &branch, v, eta).scale(w);
            }
        }
    }
    out
}

/// Output of `Prepare` before its last value measurement, i.e. the uniform
/// mixture over `t` of `t - 1` flooding rounds.
fn prepared(m: &ValueMeasurement, family: &ProjectionFamily, rho: &Matrix, rounds: usize, eta: f64) -> Matrix {
    let mut s = rho.clone();
    let mut acc = s.clone();
    for _ in 1..rounds {
        s = flood_channel(m, family, &s, eta);
        acc += &s;
    }
    acc.unscale(rounds as f64)
}

/// `σ*_Π` for one member: measure `Π` on the prepared state, repair towards
/// the prepared value, flood `T` rounds, measure the value once more.
fn hybrid_output(
    m: &ValueMeasurement,
    family: &ProjectionFamily,
    keyed: &[(f64, Matrix)],
    member: usize,
    rounds: usize,
    eta: f64,
) -> Matrix {
    let pi = family.member(member);
    let n = keyed.first().map_or(0, |k| k.1.nrows());
    let mut a = linalg::zeros(n);
    for (v, x) in keyed {
        for (y, p) in pi.projectors().iter().enumerate() {
            let branch = p.sandwich(x);
            if branch.trace().re <= SKIP {
                continue;
            }
            a += repair_channel(m, pi, y, &branch, *v, eta);
        }
    }
    for _ in 0..rounds {
        a = flood_channel(m, family, &a, eta);
    }
    dephase(m, &a)
}

fn setup(
    value: &ValueFamily,
    family: &ProjectionFamily,
    state: &QuantumState,
    params: &FloodingParams,
) -> Result<(ValueMeasurement, Vec<(f64, Matrix)>)> {
    params.validate()?;
    if family.layout().dim() != value.layout().dim() || state.dim() != value.layout().dim() {
        return Err(Error::Dimension("state, value operator and projections must share a space".into()));
    }
    let outer = value.measurement(params.epsilon, params.delta)?;
    let inner = params.inner_measurement(value)?;
    let rho0 = dephase(&outer, &state.density());
    let pre = prepared(&inner, family, &rho0, params.rounds(), params.inner_eta());
    let keyed = inner.blocks(&pre);
    Ok((inner, keyed))
}

fn report(outputs: &[Matrix], params: &FloodingParams, outcomes: usize, mode: ForgetMode) -> ForgetReport {
    let n = outputs[0].nrows();
    let mut mean = linalg::zeros(n);
    for o in outputs {
        mean += o;
    }
    mean.unscale_mut(outputs.len() as f64);
    let per_member: Vec<f64> = outputs.iter().map(|o| trace_distance_matrices(o, &mean)).collect();
    let distance = per_member.iter().sum::<f64>() / per_member.len() as f64;
    ForgetReport {
        distance,
        bound: outcomes as f64 * params.eta,
        rounds: params.rounds(),
        conformant: params.is_conformant(),
        per_member,
        mode,
    }
}

/// Exact forgetfulness distance of the flooding hybrid, computed by
/// propagating density operators through every branch. Falls back to
/// [`forgetfulness_distance_sampled`] for families larger than
/// [`EXACT_MEMBER_LIMIT`].
pub fn forgetfulness_distance(
    value: &ValueFamily,
    family: &ProjectionFamily,
    state: &QuantumState,
    params: &FloodingParams,
) -> Result<ForgetReport> {
    if family.len() > EXACT_MEMBER_LIMIT {
        let mut rng = StreamRng::new(0x464f_5247, 0);
        return forgetfulness_distance_sampled(value, family, state, params, EXACT_MEMBER_LIMIT, &mut rng);
    }
    let (inner, keyed) = setup(value, family, state, params)?;
    let outputs: Vec<Matrix> = (0..family.len())
        .map(|i| hybrid_output(&inner, family, &keyed, i, params.rounds(), params.inner_eta()))
        .collect();
    let n = family.member(0).outcomes();
    Ok(report(&outputs, params, n, ForgetMode::Exact))
}

/// Estimates the distance from `samples` randomly chosen members. The mean
/// output is itself estimated from the same sample, which biases the
/// estimate upwards.
pub fn forgetfulness_distance_sampled(
    value: &ValueFamily,
    family: &ProjectionFamily,
    state: &QuantumState,
    params: &FloodingParams,
    samples: usize,
    rng: &mut StreamRng,
) -> Result<ForgetReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two sampled members".into()));
    }
    let (inner, keyed) = setup(value, family, state, params)?;
    let outputs: Vec<Matrix> = (0..samples)
        .map(|_| hybrid_output(&inner, family, &keyed, rng.below(family.len()), params.rounds(), params.inner_eta()))
        .collect();
    let n = family.member(0).outcomes();
    let mut r = report(&outputs, params, n, ForgetMode::Exact);
    let mean = r.distance;
    let var = r.per_member.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (samples - 1) as f64;
    r.mode = ForgetMode::Sampled { samples, std_error: math::sqrt(var / samples as f64) };
    Ok(r)
}
