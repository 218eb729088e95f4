//! Distributions built from raw count vectors over a synthetic support.

use dashu_int::IBig;
use dashu_ratio::RBig;
use proptest::prelude::*;
use structural_entropy::{empirical, EmpiricalDistribution, JointSupport, SubtreeMultiset, SubtreeSymbol};

fn symbol(i: usize) -> SubtreeSymbol {
    let name = format!("s{i:02}");
    SubtreeSymbol::parse(&format!("F{}:{name}", name.len())).unwrap()
}

pub fn support(m: usize) -> JointSupport {
    JointSupport::from_symbols((0..m).map(symbol)).unwrap()
}

/// Empirical distribution of `counts` (zeros allowed, not all zero).
pub fn from_counts(counts: &[u64], support: &JointSupport) -> EmpiricalDistribution {
    let ms = SubtreeMultiset::from_counts(
        counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (symbol(i), c)),
    )
    .unwrap();
    empirical(&ms, support).unwrap()
}

/// The same distribution as exact fractions.
pub fn exact(counts: &[u64]) -> Vec<RBig> {
    let n: u64 = counts.iter().sum();
    counts.iter().map(|&c| RBig::from_parts(IBig::from(c), n.into())).collect()
}

/// Count vectors of length `m` with at least one positive entry.
pub fn counts(m: usize, max: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..=max, m).prop_filter("all zero", |v| v.iter().any(|&c| c > 0))
}

/// Two count vectors sharing a random length in `1..=max_len`.
pub fn count_pair(max_len: usize) -> impl Strategy<Value = (Vec<u64>, Vec<u64>)> {
    (1..=max_len).prop_flat_map(|m| (counts(m, 20), counts(m, 20)))
}

pub fn count_triple(max_len: usize) -> impl Strategy<Value = (Vec<u64>, Vec<u64>, Vec<u64>)> {
    (1..=max_len).prop_flat_map(|m| (counts(m, 20), counts(m, 20), counts(m, 20)))
}
