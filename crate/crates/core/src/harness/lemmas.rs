use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::hilbert::total_variation;
use crate::math;
use crate::{Error, Result};

/// Additive slack allowed on every exact lemma inequality.
pub const SLACK: f64 = 1e-9;

/// Largest joint outcome space the checkers will enumerate.
pub const ENUMERATION_LIMIT: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LemmaCheck {
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

impl LemmaCheck {
    fn new(lhs: f64, bound: f64) -> Self {
        LemmaCheck { lhs, bound, pass: lhs <= bound + SLACK }
    }
}

/// Mixed-radix enumeration of a product space, first coordinate slowest.
fn points(sizes: &[usize]) -> Result<Vec<Vec<usize>>> {
    let total = sizes.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n).filter(|&v| v <= ENUMERATION_LIMIT));
    let total = total.ok_or_else(|| Error::InvalidParameter("joint space too large to enumerate".into()))?;
    let mut out = Vec::with_capacity(total);
    let mut x = vec![0usize; sizes.len()];
    for _ in 0..total {
        out.push(x.clone());
        for c in (0..sizes.len()).rev() {
            x[c] += 1;
            if x[c] < sizes[c] {
                break;
            }
            x[c] = 0;
        }
    }
    Ok(out)
}

fn check_law(p: &[f64]) -> Result<()> {
    let s: f64 = p.iter().sum();
    if p.is_empty() || p.iter().any(|&x| !(x >= 0.0)) || math::abs(s - 1.0) > 1e-9 {
        return Err(Error::InvalidParameter("not a probability vector".into()));
    }
    Ok(())
}

/// Conditioning a product distribution on `event`, versus first drawing
/// `x_i` from its unconditioned law and then the rest given `(event, x_i)`.
/// Values of `x_i` incompatible with the event carry their mass to a point
/// outside the support of the first distribution.
pub fn raz_check(marginals: &[Vec<f64>], event: &dyn Fn(&[usize]) -> bool) -> Result<LemmaCheck> {
    let k = marginals.len();
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one coordinate".into()));
    }
    for m in marginals {
        check_law(m)?;
    }
    let sizes: Vec<usize> = marginals.iter().map(Vec::len).collect();
    let pts = points(&sizes)?;
    let prob: Vec<f64> = pts.iter().map(|x| x.iter().enumerate().map(|(c, &v)| marginals[c][v]).product()).collect();
    let inside: Vec<bool> = pts.iter().map(|x| event(x)).collect();
    let pw: f64 = prob.iter().zip(&inside).filter(|(_, &w)| w).map(|(p, _)| p).sum();
    if pw <= 0.0 {
        return Err(Error::InvalidParameter("event has zero probability".into()));
    }
    let mut lhs = 0.0;
    for i in 0..k {
        // Pr[W, X_i = v]
        let mut joint = vec![0.0; sizes[i]];
        for ((x, &p), &w) in pts.iter().zip(&prob).zip(&inside) {
            if w {
                joint[x[i]] += p;
            }
        }
        let mut td = 0.0;
        for ((x, &p), &w) in pts.iter().zip(&prob).zip(&inside) {
            if !w {
                continue;
            }
            let first = p / pw;
            let v = x[i];
            let second = marginals[i][v] * p / joint[v];
            td += math::abs(first - second);
        }
        let lost: f64 = (0..sizes[i]).filter(|&v| joint[v] <= 0.0).map(|v| marginals[i][v]).sum();
        lhs += 0.5 * (td + lost);
    }
    lhs /= k as f64;
    let bound = math::sqrt(-math::log2(pw).min(0.0) / k as f64);
    Ok(LemmaCheck::new(lhs, bound))
}

/// Classical flooding: `t` i.i.d. draws from `marginal`, an `ell`-bit memory
/// `s = memory(ȳ)`. Compares `(j, ȳ_{<j}, y_j, s)` with the same tuple where
/// `y_j` is replaced by a fresh draw.
pub fn flooding_check(ell: usize, t: usize, marginal: &[f64], memory: &dyn Fn(&[usize]) -> usize) -> Result<LemmaCheck> {
    check_law(marginal)?;
    if t == 0 {
        return Err(Error::InvalidParameter("need t >= 1".into()));
    }
    let states = 1usize.checked_shl(ell as u32).filter(|&s| s <= ENUMERATION_LIMIT);
    let states = states.ok_or_else(|| Error::InvalidParameter("memory too large".into()))?;
    let pts = points(&vec![marginal.len(); t])?;
    let mut mass = Vec::with_capacity(pts.len());
    for y in &pts {
        let s = memory(y);
        if s >= states {
            return Err(Error::InvalidParameter("memory map output exceeds ell bits".into()));
        }
        mass.push((y.iter().map(|&v| marginal[v]).product::<f64>(), s));
    }
    let a = marginal.len();
    let mut lhs = 0.0;
    for j in 0..t {
        // (prefix, y_j, s) -> probability
        let mut real: BTreeMap<(Vec<usize>, usize, usize), f64> = BTreeMap::new();
        let mut prefix_s: BTreeMap<(Vec<usize>, usize), f64> = BTreeMap::new();
        for (y, &(p, s)) in pts.iter().zip(&mass) {
            *real.entry((y[..j].to_vec(), y[j], s)).or_insert(0.0) += p;
            *prefix_s.entry((y[..j].to_vec(), s)).or_insert(0.0) += p;
        }
        let mut first = Vec::new();
        let mut second = Vec::new();
        for ((prefix, s), &q) in &prefix_s {
            for v in 0..a {
                first.push(real.get(&(prefix.clone(), v, *s)).copied().unwrap_or(0.0));
                second.push(q * marginal[v]);
            }
        }
        lhs += total_variation(&first, &second);
    }
    lhs /= t as f64;
    Ok(LemmaCheck::new(lhs, math::sqrt(ell as f64 / (2.0 * t as f64))))
}

/// `law[x]` is the probability of the outcome whose bit `i` is `D_i`.
pub fn hppw_check(law: &[f64], nu: f64, t: usize) -> Result<LemmaCheck> {
    check_law(law)?;
    if !law.len().is_power_of_two() || law.len() < 2 {
        return Err(Error::InvalidParameter("law length must be 2^k with k >= 1".into()));
    }
    let k = law.len().trailing_zeros() as usize;
    if t > k || !(nu > 0.0) {
        return Err(Error::InvalidParameter("need t <= k and nu > 0".into()));
    }
    let eps: f64 = (0..law.len()).filter(|x| x.count_ones() as usize >= t).map(|x| law[x]).sum();
    if eps <= 0.0 {
        return Err(Error::InvalidParameter("threshold event has zero mass".into()));
    }
    let mut pw = 0.0;
    let mut zeros = vec![0.0; k];
    for (x, &p) in law.iter().enumerate() {
        let l = x.count_ones() as f64;
        let w = p * math::exp2(nu * (l - t as f64)).min(1.0);
        pw += w;
        for (i, z) in zeros.iter_mut().enumerate() {
            if x >> i & 1 == 0 {
                *z += w;
            }
        }
    }
    let kf = k as f64;
    let lhs = zeros.iter().sum::<f64>() / (pw * kf);
    let rhs = 1.0 - t as f64 / kf + (math::log2(kf) - math::log2(eps)) / (kf * nu) + 4.0 / (nu * nu * kf * kf);
    Ok(LemmaCheck::new(lhs, rhs))
}

/// Joint law of `k` binary variables that are all 1 with probability
/// `delta^k` and otherwise miss exactly one uniformly chosen coordinate.
pub fn bad_correlations_law(k: usize, delta: f64) -> Result<Vec<f64>> {
    if k == 0 || k > 16 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter("need 1 <= k <= 16 and 0 < delta < 1".into()));
    }
    let all = (1usize << k) - 1;
    let full = math::powi(delta, k as i32);
    let mut law = vec![0.0; 1 << k];
    law[all] = full;
    for j in 0..k {
        law[all ^ (1 << j)] += (1.0 - full) / k as f64;
    }
    Ok(law)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raz_or_event() {
        let fair = vec![vec![0.5, 0.5]; 2];
        let c = raz_check(&fair, &|x| x[0] == 1 || x[1] == 1).unwrap();
        assert!((c.bound - 0.455_542_3).abs() < 1e-6);
        // Pr[X_1 = 1 | W] = 2/3 against 1/2
        assert!((c.lhs - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn flooding_identity_map_single_round() {
        // s = y_1 with t = 1: the fresh draw is independent of s, TD = 1/2
        let c = flooding_check(1, 1, &[0.5, 0.5], &|y| y[0]).unwrap();
        assert!((c.lhs - 0.5).abs() < 1e-12);
        assert!((c.bound - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
