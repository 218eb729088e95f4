//! Entropy-based similarity between two distributions on a shared support.
//!
//! All logarithms are base 2, so entropies are in bits. Terms whose
//! probability is zero contribute nothing to a sum over that distribution.
//! Sums run in support order with compensated accumulation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::EmpiricalDistribution;
use crate::numeric::compensated_sum;

/// Negative KL values down to this magnitude are rounding noise from an
/// unrenormalised smoothed reference and are reported as zero.
const KL_NEGATIVE_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("distributions are defined on different supports")]
    SupportMismatch,
    #[error("reference has zero probability at index {index} where the sample has mass; smooth it first")]
    UnsmoothedZero { index: usize },
    #[error("cross-entropy is zero while the reference entropy is positive")]
    DegenerateCrossEntropy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "sce")]
    Sce,
    #[serde(rename = "jsd")]
    JsdSim,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub value: f64,
    pub metric_kind: MetricKind,
    /// Whether `value` was clamped into `[0, 1]`.
    pub clamped: bool,
    /// The value before clamping.
    pub raw: f64,
}

impl MetricScore {
    fn exact(metric_kind: MetricKind, value: f64) -> Self {
        Self { value, metric_kind, clamped: false, raw: value }
    }
}

fn same_support(p: &EmpiricalDistribution, q: &EmpiricalDistribution) -> Result<(), MetricError> {
    if p.support() == q.support() && p.len() == q.len() {
        Ok(())
    } else {
        Err(MetricError::SupportMismatch)
    }
}

fn entropy_bits(p: &[f64]) -> f64 {
    let h = -compensated_sum(p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()));
    h.max(0.0)
}

fn cross_entropy_bits(p: &[f64], q: &[f64]) -> Result<f64, MetricError> {
    let mut terms = Vec::with_capacity(p.len());
    for (index, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(MetricError::UnsmoothedZero { index });
            }
            terms.push(pi * qi.log2());
        }
    }
    Ok(-compensated_sum(terms))
}

/// `p log2(p / m)` with the zero convention. Symmetric accumulation below
/// relies on this being a pure function of its arguments.
fn kl_term(p: f64, m: f64) -> f64 {
    if p > 0.0 {
        p * (p / m).log2()
    } else {
        0.0
    }
}

/// Two-KL form against the midpoint. Each per-symbol term is computed
/// identically for `(p, q)` and `(q, p)`, so the result is exactly symmetric.
fn js_bits(p: &[f64], q: &[f64]) -> f64 {
    let d = 0.5
        * compensated_sum(p.iter().zip(q).map(|(&a, &b)| {
            let m = 0.5 * (a + b);
            kl_term(a, m) + kl_term(b, m)
        }));
    d.clamp(0.0, 1.0)
}

/// Shannon entropy `H(P)` in bits.
pub fn shannon_entropy(p: &EmpiricalDistribution) -> f64 {
    entropy_bits(p.probs())
}

/// Cross-entropy `H(P, Q) = -sum P(u) log2 Q(u)` in bits.
///
/// `q` is normally the smoothed reference. Fails if `q` is zero anywhere `p`
/// has mass.
pub fn cross_entropy(p: &EmpiricalDistribution, q: &EmpiricalDistribution) -> Result<f64, MetricError> {
    same_support(p, q)?;
    cross_entropy_bits(p.probs(), q.probs())
}

/// `D_KL(P || Q) = sum P(u) log2(P(u) / Q(u))` in bits, evaluated directly.
///
/// Equals `cross_entropy(p, q) - shannon_entropy(p)`. With an
/// unrenormalised smoothed `q` the value can dip a hair below zero; dips
/// within 1e-9 are reported as 0.
pub fn kl_divergence(p: &EmpiricalDistribution, q: &EmpiricalDistribution) -> Result<f64, MetricError> {
    same_support(p, q)?;
    let mut terms = Vec::with_capacity(p.len());
    for (index, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(MetricError::UnsmoothedZero { index });
            }
            terms.push(pi * (pi / qi).log2());
        }
    }
    let kl = compensated_sum(terms);
    Ok(if (-KL_NEGATIVE_SLACK..0.0).contains(&kl) { 0.0 } else { kl })
}

/// Structural cross-entropy ratio `H(Q) / H(P, Q)`.
///
/// `p` is the sample distribution and `q` the smoothed reference. Special
/// cases, decided on the unsmoothed vectors:
///
/// * identical distributions score exactly 1;
/// * a point-mass reference (zero entropy) that differs from `p` scores 0.
///
/// The raw ratio is not bounded by 1; for example `P = (1, 0)`,
/// `Q = (0.9, 0.1)` gives about 3.085. With `clamp` the value is clipped to
/// `[0, 1]` and the unclipped ratio is kept in [`MetricScore::raw`].
pub fn sce_similarity(
    p: &EmpiricalDistribution,
    q: &EmpiricalDistribution,
    clamp: bool,
) -> Result<MetricScore, MetricError> {
    same_support(p, q)?;
    if p.unsmoothed() == q.unsmoothed() {
        return Ok(MetricScore::exact(MetricKind::Sce, 1.0));
    }
    if entropy_bits(q.unsmoothed()) == 0.0 {
        return Ok(MetricScore::exact(MetricKind::Sce, 0.0));
    }
    let h_q = entropy_bits(q.probs());
    let h_pq = cross_entropy_bits(p.probs(), q.probs())?;
    if h_pq <= 0.0 {
        return Err(MetricError::DegenerateCrossEntropy);
    }
    let raw = h_q / h_pq;
    let value = if clamp { raw.clamp(0.0, 1.0) } else { raw };
    Ok(MetricScore { value, metric_kind: MetricKind::Sce, clamped: value != raw, raw })
}

/// Jensen-Shannon divergence in bits, in `[0, 1]`.
///
/// Always uses the unsmoothed vectors; the midpoint keeps every term finite.
pub fn js_divergence(p: &EmpiricalDistribution, q: &EmpiricalDistribution) -> Result<f64, MetricError> {
    same_support(p, q)?;
    Ok(js_bits(p.unsmoothed(), q.unsmoothed()))
}

/// The entropy form `H(M) - (H(P) + H(Q)) / 2` of the same divergence.
/// Agrees with [`js_divergence`] to rounding error.
pub fn js_divergence_entropy_form(
    p: &EmpiricalDistribution,
    q: &EmpiricalDistribution,
) -> Result<f64, MetricError> {
    same_support(p, q)?;
    let (p, q) = (p.unsmoothed(), q.unsmoothed());
    let m: Vec<f64> = p.iter().zip(q).map(|(&a, &b)| 0.5 * (a + b)).collect();
    Ok(entropy_bits(&m) - 0.5 * (entropy_bits(p) + entropy_bits(q)))
}

/// `1 - D_JS(P || Q)`.
pub fn jsd_similarity(
    p: &EmpiricalDistribution,
    q: &EmpiricalDistribution,
) -> Result<MetricScore, MetricError> {
    let d = js_divergence(p, q)?;
    Ok(MetricScore::exact(MetricKind::JsdSim, 1.0 - d))
}
