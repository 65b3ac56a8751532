//! Index bookkeeping for operators acting on a subset of registers.

use alloc::vec::Vec;

use super::RegisterLayout;
use crate::linalg::{Matrix, Vector, C64};

/// `groups[rest][t]` is the full basis index whose target digits spell `t`
/// (first target most significant) and whose remaining digits spell `rest`.
#[derive(Clone, Debug)]
pub(crate) struct Gather {
    pub groups: Vec<Vec<usize>>,
    pub target_dim: usize,
}

pub(crate) fn gather(layout: &RegisterLayout, targets: &[usize]) -> Gather {
    let regs = layout.registers();
    let strides = layout.strides();
    let target_dim: usize = targets.iter().map(|&p| regs[p].dim).product();
    let rest: Vec<usize> = (0..regs.len()).filter(|p| !targets.contains(p)).collect();
    let rest_dim: usize = rest.iter().map(|&p| regs[p].dim).product();

    let offsets_of = |positions: &[usize], count: usize| -> Vec<usize> {
        let mut out = Vec::with_capacity(count);
        for mut k in 0..count {
            let mut off = 0;
            for &p in positions.iter().rev() {
                let d = regs[p].dim;
                off += (k % d) * strides[p];
                k /= d;
            }
            out.push(off);
        }
        out
    };
    let t_off = offsets_of(targets, target_dim);
    let r_off = offsets_of(&rest, rest_dim);
    let groups = r_off
        .iter()
        .map(|&r| t_off.iter().map(|&t| r + t).collect())
        .collect();
    Gather { groups, target_dim }
}

pub(crate) fn apply_vec(g: &Gather, u: &Matrix, v: &mut Vector) {
    let n = g.target_dim;
    let mut buf: Vec<C64> = alloc::vec![C64::new(0.0, 0.0); n];
    for grp in &g.groups {
        for (t, b) in buf.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (s, &idx) in grp.iter().enumerate() {
                acc += u[(t, s)] * v[idx];
            }
            *b = acc;
        }
        for (t, &idx) in grp.iter().enumerate() {
            v[idx] = buf[t];
        }
    }
}

/// `m <- U m` with `U` acting on the gathered registers.
pub(crate) fn apply_left(g: &Gather, u: &Matrix, m: &mut Matrix) {
    let n = g.target_dim;
    let mut buf: Vec<C64> = alloc::vec![C64::new(0.0, 0.0); n];
    for col in 0..m.ncols() {
        for grp in &g.groups {
            for (t, b) in buf.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (s, &idx) in grp.iter().enumerate() {
                    acc += u[(t, s)] * m[(idx, col)];
                }
                *b = acc;
            }
            for (t, &idx) in grp.iter().enumerate() {
                m[(idx, col)] = buf[t];
            }
        }
    }
}

/// `m <- m U†`.
pub(crate) fn apply_right_adjoint(g: &Gather, u: &Matrix, m: &mut Matrix) {
    let n = g.target_dim;
    let mut buf: Vec<C64> = alloc::vec![C64::new(0.0, 0.0); n];
    for row in 0..m.nrows() {
        for grp in &g.groups {
            for (t, b) in buf.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (s, &idx) in grp.iter().enumerate() {
                    acc += m[(row, idx)] * u[(t, s)].conj();
                }
                *b = acc;
            }
            for (t, &idx) in grp.iter().enumerate() {
                m[(row, idx)] = buf[t];
            }
        }
    }
}

/// `U m U†`.
pub(crate) fn conjugate(g: &Gather, u: &Matrix, m: &mut Matrix) {
    apply_left(g, u, m);
    apply_right_adjoint(g, u, m);
}
