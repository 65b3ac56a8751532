use crate::math;
use crate::{Error, Result};

/// A soundness bound as evaluated, before and after clamping to 1.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoundValue {
    pub raw: f64,
    pub clamped: f64,
    /// `raw >= 1` or the precondition fails.
    pub vacuous: bool,
    pub precondition: bool,
}

impl BoundValue {
    fn new(raw: f64, precondition: bool) -> Self {
        BoundValue { raw, clamped: raw.min(1.0), vacuous: raw >= 1.0 || !precondition, precondition }
    }
}

fn check_kt(k: usize, t: usize) -> Result<()> {
    if k == 0 || t > k {
        return Err(Error::InvalidParameter(alloc::format!("need 1 <= k and t <= k, got k={k}, t={t}")));
    }
    Ok(())
}

/// `6m^2 exp(-k/(4m^2) (t/k - eps)^2)` for `m`-round public-coin protocols.
pub fn bound_public(epsilon: f64, m: usize, k: usize, t: usize) -> Result<BoundValue> {
    check_kt(k, t)?;
    if m == 0 {
        return Err(Error::InvalidParameter("need m >= 1".into()));
    }
    let (kf, m2) = (k as f64, (m * m) as f64);
    let gap = t as f64 / kf - epsilon;
    let raw = 6.0 * m2 * math::exp(-kf / (4.0 * m2) * gap * gap);
    Ok(BoundValue::new(raw, epsilon < t as f64 / kf))
}

/// `2 exp(-k/9 ((t - 2 sqrt(k) log k)/k - eps)^2)` for three-message protocols.
pub fn bound_three(epsilon: f64, k: usize, t: usize) -> Result<BoundValue> {
    check_kt(k, t)?;
    let kf = k as f64;
    let shifted = t as f64 / kf - 2.0 * math::log2(kf) / math::sqrt(kf);
    let gap = shifted - epsilon;
    let raw = 2.0 * math::exp(-kf / 9.0 * gap * gap);
    Ok(BoundValue::new(raw, epsilon < shifted))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InformalVariant {
    /// `2^{-(1-s)^2}` raised to `k/m^2`.
    Public,
    /// `2^{-(t/k-s)^2}` raised to `k/m^2`.
    PublicThreshold,
    /// `2^{-(1-s)^2}` raised to `k`; the vanishing correction is dropped.
    Three,
    /// `2^{-(t/k-s)^2}` raised to `k`.
    ThreeThreshold,
}

impl core::str::FromStr for InformalVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "public" => Ok(Self::Public),
            "public-threshold" => Ok(Self::PublicThreshold),
            "three" => Ok(Self::Three),
            "three-threshold" => Ok(Self::ThreeThreshold),
            _ => Err(Error::Parse(alloc::format!("unknown bound variant `{s}`"))),
        }
    }
}

/// Unit-constant informal bound `f(s)^{k/m^2}` (or `f(s)^k`). A gap that is
/// not positive gives `f = 1`.
pub fn bound_informal(s: f64, k: usize, m: usize, t: usize, variant: InformalVariant) -> Result<f64> {
    check_kt(k, t)?;
    if m == 0 || !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter("need m >= 1 and s in [0, 1]".into()));
    }
    let kf = k as f64;
    let gap = match variant {
        InformalVariant::Public | InformalVariant::Three => 1.0 - s,
        InformalVariant::PublicThreshold | InformalVariant::ThreeThreshold => t as f64 / kf - s,
    }
    .max(0.0);
    let exponent = match variant {
        InformalVariant::Public | InformalVariant::PublicThreshold => kf / (m * m) as f64,
        InformalVariant::Three | InformalVariant::ThreeThreshold => kf,
    };
    Ok(math::exp2(-gap * gap * exponent))
}

/// Success the public-coin reduction guarantees, `t/k - 2m sqrt(-log(ξ/3m^2)/k)`.
pub fn reduction_floor_public(xi: f64, m: usize, k: usize, t: usize) -> Result<f64> {
    check_kt(k, t)?;
    if m == 0 || !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::InvalidParameter("need m >= 1 and xi in (0, 1]".into()));
    }
    let (kf, mf) = (k as f64, m as f64);
    Ok(t as f64 / kf - 2.0 * mf * math::sqrt(-math::log2(xi / (3.0 * mf * mf)) / kf))
}

/// Success the three-message reduction guarantees,
/// `t/k - 2 log k / sqrt k - 3 sqrt(-log ξ / k)`.
pub fn reduction_floor_three(xi: f64, k: usize, t: usize) -> Result<f64> {
    check_kt(k, t)?;
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::InvalidParameter("need xi in (0, 1]".into()));
    }
    let kf = k as f64;
    Ok(t as f64 / kf - 2.0 * math::log2(kf) / math::sqrt(kf) - 3.0 * math::sqrt(-math::log2(xi) / kf))
}
