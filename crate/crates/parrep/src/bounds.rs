use anyhow::Result;
use parrep_core::harness::{bound_informal, bound_public, bound_three, InformalVariant};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub variant: String,
    pub k: usize,
    pub t: usize,
    pub m: usize,
    /// Base soundness `ε` (corollaries) or `s` (informal).
    pub soundness: f64,
    pub raw: f64,
    pub clamped: f64,
    pub vacuous: bool,
    pub precondition: bool,
    pub note: Option<String>,
}

const RATIOS: [f64; 2] = [0.75, 1.0];
const SOUNDNESS: [f64; 3] = [0.0, 0.25, 0.5];

fn threshold(ratio: f64, k: usize) -> usize {
    ((ratio * k as f64).round() as usize).clamp(1, k)
}

/// One row per `(k, t/k, m, soundness)` on a fixed small grid.
pub fn bound_table(variant: &str, ks: &[usize]) -> Result<Vec<BoundRow>> {
    let mut rows = Vec::new();
    for &k in ks {
        for ratio in RATIOS {
            let t = threshold(ratio, k);
            for eps in SOUNDNESS {
                match variant {
                    "public" => {
                        for m in [1, 2, 4] {
                            let b = bound_public(eps, m, k, t)?;
                            rows.push(BoundRow {
                                variant: variant.into(),
                                k,
                                t,
                                m,
                                soundness: eps,
                                raw: b.raw,
                                clamped: b.clamped,
                                vacuous: b.vacuous,
                                precondition: b.precondition,
                                note: None,
                            });
                        }
                    }
                    "three" => {
                        let b = bound_three(eps, k, t)?;
                        rows.push(BoundRow {
                            variant: variant.into(),
                            k,
                            t,
                            m: 1,
                            soundness: eps,
                            raw: b.raw,
                            clamped: b.clamped,
                            vacuous: b.vacuous,
                            precondition: b.precondition,
                            note: None,
                        });
                    }
                    other => {
                        let v: InformalVariant = other.parse()?;
                        let ms: &[usize] = match v {
                            InformalVariant::Public | InformalVariant::PublicThreshold => &[1, 2, 4],
                            _ => &[1],
                        };
                        for &m in ms {
                            let raw = bound_informal(eps, k, m, t, v)?;
                            rows.push(BoundRow {
                                variant: variant.into(),
                                k,
                                t,
                                m,
                                soundness: eps,
                                raw,
                                clamped: raw.min(1.0),
                                vacuous: raw >= 1.0,
                                precondition: true,
                                note: Some("unit-constant informal bound".into()),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}
