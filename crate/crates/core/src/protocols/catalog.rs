//! Toy protocols with closed-form soundness, and prover strategies for them.
//! Entries are addressable as `name(key=value,...)`; list values are
//! separated by `:`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{optimal_prover, Protocol, ProverStrategy, PublicCoinProtocol, RoundAction, ThreeMessageProtocol};
use crate::hilbert::{QuantumState, RegisterLayout};
use crate::linalg::{self, c, Matrix};
use crate::math;
use crate::{Error, Result};

/// Query `q ← [n]`; accept iff `q < s` and the prover answers `1`.
/// Soundness `s/n`.
pub fn subset(n: usize, s: usize) -> Result<Protocol> {
    chained(&[(n, s)])
}

/// Independent subset games in sequence; accept iff every round accepts.
/// Soundness `∏ s_ℓ/n_ℓ`.
pub fn chained(rounds: &[(usize, usize)]) -> Result<Protocol> {
    if rounds.iter().any(|&(n, s)| s > n) {
        return Err(Error::InvalidParameter("subset size exceeds the query space".into()));
    }
    let sizes: Vec<usize> = rounds.iter().map(|r| r.1).collect();
    let name = if rounds.len() == 1 {
        alloc::format!("subset(n={},s={})", rounds[0].0, rounds[0].1)
    } else {
        let ns: Vec<String> = rounds.iter().map(|r| r.0.to_string()).collect();
        let ss: Vec<String> = rounds.iter().map(|r| r.1.to_string()).collect();
        alloc::format!("chained(n={},s={})", ns.join(":"), ss.join(":"))
    };
    PublicCoinProtocol::new(
        name,
        rounds.iter().map(|r| r.0).collect(),
        alloc::vec![2; rounds.len()],
        Arc::new(move |qs, zs| qs.iter().zip(zs).zip(&sizes).all(|((&q, &z), &s)| q < s && z == 1)),
    )
    .map(Protocol::PublicCoin)
}

/// `r ← [n]`, `q = r mod w`, accept iff `z_2 = r`. Soundness `min(n, w)/n`.
pub fn preimage(n: usize, w: usize) -> Result<Protocol> {
    ThreeMessageProtocol::new(
        alloc::format!("preimage(n={n},w={w})"),
        n,
        1,
        w,
        n,
        Arc::new(move |r, _| r % w),
        Arc::new(|r, _, _, z2| z2 == r),
    )
    .map(Protocol::ThreeMessage)
}

/// Verdict-programmable game: `r ← [2]`, `q = r`, accept iff the prover's
/// token `z_2` is `1`.
pub fn programmable() -> Protocol {
    Protocol::ThreeMessage(
        ThreeMessageProtocol::new("programmable()", 2, 1, 2, 2, Arc::new(|r, _| r), Arc::new(|_, _, _, z2| z2 == 1))
            .expect("static parameters"),
    )
}

/// One trivial round that always accepts.
pub fn always() -> Protocol {
    Protocol::PublicCoin(
        PublicCoinProtocol::new("always()", alloc::vec![1], alloc::vec![1], Arc::new(|_, _| true)).expect("static parameters"),
    )
}

/// Closed-form soundness of a catalog protocol.
pub fn soundness(protocol: &Protocol) -> Result<f64> {
    let (name, args) = split_spec(protocol.name())?;
    match name.as_str() {
        "subset" | "chained" => {
            let ns = list(&args, "n")?;
            let ss = list(&args, "s")?;
            Ok(ns.iter().zip(&ss).map(|(n, s)| s / n).product())
        }
        "preimage" => {
            let n = usize_arg(&args, "n")?;
            let w = usize_arg(&args, "w")?;
            Ok(n.min(w) as f64 / n as f64)
        }
        "programmable" | "always" => Ok(1.0),
        _ => Err(Error::Parse(alloc::format!("unknown protocol {name}"))),
    }
}

fn ry(theta: f64) -> Matrix {
    let (co, si) = (math::cos(theta / 2.0), math::sin(theta / 2.0));
    Matrix::from_row_slice(2, 2, &[c(co), c(-si), c(si), c(co)])
}

/// Rotation in the plane of `|0⟩` and `|a⟩`.
fn plane_rotation(dim: usize, a: usize, theta: f64) -> Matrix {
    let mut m = linalg::identity(dim);
    if a != 0 {
        let (co, si) = (math::cos(theta), math::sin(theta));
        m[(0, 0)] = c(co);
        m[(a, 0)] = c(si);
        m[(0, a)] = c(-si);
        m[(a, a)] = c(co);
    }
    m
}

/// Single-copy prover for two-response one-round public-coin games: on query
/// `q` it rotates a qubit so that it answers `1` with probability `probs[q]`.
pub fn rotation(protocol: &Protocol, probs: &[f64]) -> Result<ProverStrategy> {
    let p = match protocol {
        Protocol::PublicCoin(p) if p.rounds() == 1 && p.response_size(0) == 2 => p,
        _ => return Err(Error::InvalidParameter("rotation provers answer one-round binary public-coin games".into())),
    };
    if probs.len() != p.query_size(0) || probs.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::InvalidParameter("need one probability in [0,1] per query".into()));
    }
    let mats = probs.iter().map(|&x| ry(2.0 * math::asin(math::sqrt(x)))).collect();
    let layout = RegisterLayout::single("z", 2);
    ProverStrategy::single_copy("rotation", QuantumState::basis(layout, 0)?, None, &["z"], alloc::vec![(alloc::vec!["z"], mats)])
}

/// Single-copy prover for preimage games: on query `q` it rotates `|0⟩` by
/// `angles[q]` toward the largest preimage of `q`.
pub fn preimage_rotation(protocol: &Protocol, angles: &[f64]) -> Result<ProverStrategy> {
    let p = match protocol {
        Protocol::ThreeMessage(p) => p,
        _ => return Err(Error::InvalidParameter("preimage rotation needs a three-message protocol".into())),
    };
    if angles.len() != p.query_size() {
        return Err(Error::InvalidParameter("need one angle per query".into()));
    }
    let n = p.second_size();
    let mats = (0..p.query_size())
        .map(|q| {
            let a = (0..p.randomness().min(n)).filter(|&r| p.query_of(r, 0) == q).max().unwrap_or(0);
            plane_rotation(n, a, angles[q])
        })
        .collect();
    let layout = RegisterLayout::new([("z1", p.first_size()), ("z2", n)])?;
    ProverStrategy::single_copy(
        "preimage_rotation",
        QuantumState::basis(layout, 0)?,
        Some("z1"),
        &["z2"],
        alloc::vec![(alloc::vec!["z2"], mats)],
    )
}

/// `k`-copy classical randomized prover for the verdict-programmable game:
/// every copy accepts with probability `δ^k`, otherwise exactly one uniformly
/// chosen copy rejects.
pub fn bad_correlations(k: usize, delta: f64) -> Result<ProverStrategy> {
    if !(delta > 0.0 && delta < 1.0) || k == 0 {
        return Err(Error::InvalidParameter(alloc::format!("need 0 < delta < 1 and k >= 1, got {delta}, {k}")));
    }
    let names: Vec<String> = (0..k).map(|j| alloc::format!("c{j}.z2")).collect();
    let layout = RegisterLayout::new(names.iter().map(|n| (n.clone(), 2)))?;
    let all = (1usize << k) - 1;
    let mut probs = alloc::vec![0.0; 1 << k];
    let full = math::powi(delta, k as i32);
    probs[all] = full;
    for j in 0..k {
        // copy 0 is the most significant bit
        probs[all ^ (1 << (k - 1 - j))] += (1.0 - full) / k as f64;
    }
    let initial = QuantumState::classical(layout, &probs)?;
    ProverStrategy::new(
        alloc::format!("bad_correlations(k={k},delta={delta})"),
        initial,
        k,
        None,
        alloc::vec![names],
        alloc::vec![RoundAction::Joint(Arc::new(|_| Vec::new()))],
    )
}

/// Splits `name(key=value,...)` into its name and arguments.
pub fn split_spec(spec: &str) -> Result<(String, BTreeMap<String, String>)> {
    let spec = spec.trim();
    let (name, rest) = match spec.find('(') {
        Some(i) => {
            let body = spec[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(alloc::format!("missing ')' in {spec}")))?;
            (&spec[..i], body)
        }
        None => (spec, ""),
    };
    let mut args = BTreeMap::new();
    for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse(alloc::format!("expected key=value, got {part}")))?;
        if args.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(alloc::format!("duplicate key {k}")));
        }
    }
    Ok((name.trim().to_string(), args))
}

fn arg<'a>(args: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    args.get(key).map(String::as_str).ok_or_else(|| Error::Parse(alloc::format!("missing argument {key}")))
}

fn usize_arg(args: &BTreeMap<String, String>, key: &str) -> Result<usize> {
    arg(args, key)?.parse().map_err(|_| Error::Parse(alloc::format!("{key} is not an integer")))
}

fn list(args: &BTreeMap<String, String>, key: &str) -> Result<Vec<f64>> {
    arg(args, key)?
        .split(':')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(alloc::format!("bad number in {key}"))))
        .collect()
}

fn no_args(name: &str, args: &BTreeMap<String, String>) -> Result<()> {
    if args.is_empty() {
        Ok(())
    } else {
        Err(Error::Parse(alloc::format!("{name} takes no arguments")))
    }
}

/// Resolves a protocol spec such as `subset(n=8,s=2)`.
pub fn protocol(spec: &str) -> Result<Protocol> {
    let (name, args) = split_spec(spec)?;
    match name.as_str() {
        "subset" => subset(usize_arg(&args, "n")?, usize_arg(&args, "s")?),
        "chained" => {
            let ns = list(&args, "n")?;
            let ss = list(&args, "s")?;
            if ns.len() != ss.len() || ns.is_empty() {
                return Err(Error::Parse("chained needs matching n and s lists".into()));
            }
            let rounds: Vec<(usize, usize)> = ns.iter().zip(&ss).map(|(&n, &s)| (n as usize, s as usize)).collect();
            chained(&rounds)
        }
        "preimage" => preimage(usize_arg(&args, "n")?, usize_arg(&args, "w")?),
        "programmable" => no_args(&name, &args).map(|_| programmable()),
        "always" => no_args(&name, &args).map(|_| always()),
        _ => Err(Error::Parse(alloc::format!("unknown protocol {name}"))),
    }
}

/// Resolves a `k`-copy prover spec against a protocol: `optimal()`,
/// `rotation(p=...)`, `preimage_rotation(theta=...)`, `bad_correlations(delta=...)`.
/// Single-copy strategies are taken to their `k`-th tensor power.
pub fn prover(spec: &str, protocol: &Protocol, k: usize) -> Result<ProverStrategy> {
    let (name, args) = split_spec(spec)?;
    let single = match name.as_str() {
        "optimal" | "classical" => optimal_prover(protocol)?,
        "rotation" => rotation(protocol, &list(&args, "p")?)?,
        "preimage_rotation" => preimage_rotation(protocol, &list(&args, "theta")?)?,
        "bad_correlations" => {
            let delta: f64 = arg(&args, "delta")?.parse().map_err(|_| Error::Parse("delta is not a number".into()))?;
            return bad_correlations(k, delta);
        }
        _ => return Err(Error::Parse(alloc::format!("unknown prover {name}"))),
    };
    single.power(k)
}
