//! Symbol multisets and the empirical distributions built from them.

use std::collections::btree_map::{self, BTreeMap};
use std::sync::Arc;

use thiserror::Error;

use crate::codec::SubtreeSymbol;
use crate::numeric::compensated_sum;

/// Default smoothing floor applied to the reference distribution.
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Tolerance on the sum-to-one check of unsmoothed distributions.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("cannot build a distribution from an empty multiset")]
    Empty,
    #[error("symbol {0} is not in the support")]
    SupportMismatch(String),
    #[error("smoothing constant must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("expected {expected} probabilities, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),
    #[error("multiset counts must be at least 1")]
    ZeroCount,
}

/// Symbol to occurrence count, iterated in canonical-form order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubtreeMultiset {
    counts: BTreeMap<SubtreeSymbol, u64>,
    total: u64,
}

impl SubtreeMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts<I>(counts: I) -> Result<Self, DistributionError>
    where
        I: IntoIterator<Item = (SubtreeSymbol, u64)>,
    {
        let mut ms = Self::new();
        for (symbol, count) in counts {
            if count == 0 {
                return Err(DistributionError::ZeroCount);
            }
            *ms.counts.entry(symbol).or_insert(0) += count;
            ms.total += count;
        }
        Ok(ms)
    }

    pub fn insert(&mut self, symbol: SubtreeSymbol) {
        *self.counts.entry(symbol).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn count(&self, symbol: &SubtreeSymbol) -> u64 {
        self.counts.get(symbol).copied().unwrap_or(0)
    }

    /// Total occurrences, counted with multiplicity.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct symbols.
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn iter(&self) -> btree_map::Iter<'_, SubtreeSymbol, u64> {
        self.counts.iter()
    }

    /// `count<TAB>canonical_form` per distinct symbol, sorted by canonical form.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for (symbol, count) in &self.counts {
            out.push_str(&format!("{count}\t{symbol}\n"));
        }
        out
    }
}

impl<'a> IntoIterator for &'a SubtreeMultiset {
    type Item = (&'a SubtreeSymbol, &'a u64);
    type IntoIter = btree_map::Iter<'a, SubtreeSymbol, u64>;
    fn into_iter(self) -> Self::IntoIter {
        self.counts.iter()
    }
}

/// Sorted, duplicate-free list of symbols shared by a pair of distributions.
#[derive(Clone, Debug)]
pub struct JointSupport {
    symbols: Arc<[SubtreeSymbol]>,
}

impl PartialEq for JointSupport {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.symbols, &other.symbols) || self.symbols == other.symbols
    }
}

impl JointSupport {
    /// Sorts and de-duplicates `symbols`.
    pub fn from_symbols<I>(symbols: I) -> Result<Self, DistributionError>
    where
        I: IntoIterator<Item = SubtreeSymbol>,
    {
        let mut v: Vec<_> = symbols.into_iter().collect();
        v.sort();
        v.dedup();
        if v.is_empty() {
            return Err(DistributionError::Empty);
        }
        Ok(Self { symbols: v.into() })
    }

    pub fn symbols(&self) -> &[SubtreeSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &SubtreeSymbol) -> Option<usize> {
        self.symbols.binary_search(symbol).ok()
    }
}

/// Union of the key sets of `a` and `b`, in canonical-form order.
pub fn joint_support(a: &SubtreeMultiset, b: &SubtreeMultiset) -> Result<JointSupport, DistributionError> {
    if a.is_empty() || b.is_empty() {
        return Err(DistributionError::Empty);
    }
    // Both key sets are already sorted; merge them.
    let mut merged = Vec::with_capacity(a.distinct().max(b.distinct()));
    let mut left = a.counts.keys().peekable();
    let mut right = b.counts.keys().peekable();
    loop {
        let next = match (left.peek(), right.peek()) {
            (Some(x), Some(y)) => match x.cmp(y) {
                std::cmp::Ordering::Less => left.next(),
                std::cmp::Ordering::Greater => right.next(),
                std::cmp::Ordering::Equal => {
                    right.next();
                    left.next()
                }
            },
            (Some(_), None) => left.next(),
            (None, Some(_)) => right.next(),
            (None, None) => break,
        };
        merged.extend(next.cloned());
    }
    Ok(JointSupport { symbols: merged.into() })
}

/// Probability vector indexed by a [`JointSupport`].
///
/// A smoothed distribution keeps the vector it was smoothed from, so
/// consumers that must not see the floor (Jensen-Shannon) can get it back.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    support: JointSupport,
    probs: Vec<f64>,
    unsmoothed: Option<Vec<f64>>,
    epsilon: f64,
    renormalized: bool,
    sample_size: Option<u64>,
}

/// Relative frequencies `count(u) / total` over `support`; zero for absent symbols.
pub fn empirical(
    mult: &SubtreeMultiset,
    support: &JointSupport,
) -> Result<EmpiricalDistribution, DistributionError> {
    if mult.is_empty() {
        return Err(DistributionError::Empty);
    }
    let n = mult.total() as f64;
    let mut probs = vec![0.0; support.len()];
    // Multiset keys and support are both sorted: walk them together.
    let mut slots = support.symbols.iter().enumerate();
    for (symbol, &count) in mult.iter() {
        let idx = loop {
            match slots.next() {
                Some((i, s)) if s == symbol => break i,
                Some(_) => continue,
                None => return Err(DistributionError::SupportMismatch(symbol.to_string())),
            }
        };
        probs[idx] = count as f64 / n;
    }
    Ok(EmpiricalDistribution {
        support: support.clone(),
        probs,
        unsmoothed: None,
        epsilon: 0.0,
        renormalized: false,
        sample_size: Some(mult.total()),
    })
}

/// Floor every entry at `epsilon` without renormalising.
pub fn smooth(
    dist: &EmpiricalDistribution,
    epsilon: f64,
) -> Result<EmpiricalDistribution, DistributionError> {
    dist.smoothed(epsilon, false)
}

impl EmpiricalDistribution {
    /// Wrap an explicit probability vector. Entries must be finite and
    /// non-negative and sum to one within [`SUM_TOLERANCE`].
    pub fn from_probabilities(support: &JointSupport, probs: Vec<f64>) -> Result<Self, DistributionError> {
        if probs.len() != support.len() {
            return Err(DistributionError::LengthMismatch { expected: support.len(), actual: probs.len() });
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(DistributionError::InvalidProbabilities(format!("entry {bad}")));
        }
        let sum = compensated_sum(probs.iter().copied());
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(DistributionError::InvalidProbabilities(format!("sum {sum}")));
        }
        Ok(Self {
            support: support.clone(),
            probs,
            unsmoothed: None,
            epsilon: 0.0,
            renormalized: false,
            sample_size: None,
        })
    }

    /// `max(p, epsilon)` per entry; with `renormalize`, the floored vector is
    /// then divided by its sum.
    ///
    /// Smoothing an already smoothed distribution re-applies the floor to the
    /// current entries and keeps the original unsmoothed vector.
    pub fn smoothed(&self, epsilon: f64, renormalize: bool) -> Result<Self, DistributionError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(DistributionError::InvalidEpsilon(epsilon));
        }
        if let Some(n) = self.sample_size {
            if epsilon >= 1.0 / n as f64 {
                log::warn!("smoothing constant {epsilon} is not small against 1/{n}");
            }
        }
        let mut probs: Vec<f64> = self.probs.iter().map(|&p| p.max(epsilon)).collect();
        if renormalize {
            let sum = compensated_sum(probs.iter().copied());
            probs.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self {
            support: self.support.clone(),
            probs,
            unsmoothed: Some(self.unsmoothed().to_vec()),
            epsilon,
            renormalized: renormalize || self.renormalized,
            sample_size: self.sample_size,
        })
    }

    pub fn support(&self) -> &JointSupport {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// The relative frequencies before any smoothing.
    pub fn unsmoothed(&self) -> &[f64] {
        self.unsmoothed.as_deref().unwrap_or(&self.probs)
    }

    pub fn is_smoothed(&self) -> bool {
        self.unsmoothed.is_some()
    }

    /// Smoothing floor, 0 when unsmoothed.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.probs.iter().copied())
    }
}
