//! Independent reference pipeline.
//!
//! Walks tree-sitter trees directly (no `ParseTree`, no canonical strings),
//! keys subtrees by a structural enum, builds distributions as exact
//! fractions and evaluates every logarithm with 128-bit floats.

use std::collections::{BTreeMap, BTreeSet};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use dashu_ratio::RBig;

type Big = FBig<HalfEven, 2>;

const PRECISION: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Lexeme {
    Absent,
    Sentinel,
    Text(Vec<u8>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Shape {
    Frontier(String),
    Expanded { node_type: String, lexeme: Lexeme, children: Vec<Shape> },
}

pub type Counts = BTreeMap<Shape, u64>;

fn grammar(language: &str) -> tree_sitter::Language {
    match language {
        "python" => tree_sitter_python::LANGUAGE.into(),
        "sql" => tree_sitter_sequel::LANGUAGE.into(),
        other => panic!("oracle has no grammar for {other}"),
    }
}

fn shape(node: tree_sitter::Node, src: &[u8], remaining: u32, with_value: bool) -> Shape {
    if remaining == 0 {
        return Shape::Frontier(node.kind().to_string());
    }
    let mut cursor = node.walk();
    let kids: Vec<_> = node.children(&mut cursor).collect();
    let lexeme = if !with_value {
        Lexeme::Absent
    } else if kids.is_empty() {
        Lexeme::Text(src[node.byte_range()].to_vec())
    } else {
        Lexeme::Sentinel
    };
    Shape::Expanded {
        node_type: node.kind().to_string(),
        lexeme,
        children: kids.into_iter().map(|c| shape(c, src, remaining - 1, with_value)).collect(),
    }
}

/// Depth-`d` subtree shapes of every node, counted.
pub fn subtree_counts(language: &str, source: &str, depth: u32, with_value: bool) -> Counts {
    let mut parser = tree_sitter::Parser::new();
    parser.set_language(&grammar(language)).unwrap();
    let tree = parser.parse(source, None).unwrap();
    let mut counts = Counts::new();
    let mut stack = vec![tree.root_node()];
    while let Some(node) = stack.pop() {
        *counts.entry(shape(node, source.as_bytes(), depth, with_value)).or_insert(0) += 1;
        let mut cursor = node.walk();
        stack.extend(node.children(&mut cursor));
    }
    counts
}

/// Number of nodes in the tree-sitter tree.
pub fn tree_size(language: &str, source: &str) -> u64 {
    subtree_counts(language, source, 1, false).values().sum()
}

fn big(x: &RBig) -> Big {
    let num = Big::from(x.numerator().clone()).with_precision(PRECISION).value();
    let den = Big::from(IBig::from(x.denominator().clone())).with_precision(PRECISION).value();
    num / den
}

fn ln2() -> Big {
    thread_local! {
        static LN2: Big = Big::from(2u8).with_precision(PRECISION).value().ln();
    }
    LN2.with(Big::clone)
}

fn log2(x: &RBig) -> Big {
    big(x).ln() / ln2()
}

fn zero() -> Big {
    Big::ZERO.with_precision(PRECISION).value()
}

pub fn to_f64(x: &Big) -> f64 {
    x.to_f64().value()
}

/// `-sum x log2 x` over positive entries.
pub fn entropy(xs: &[RBig]) -> Big {
    let mut h = zero();
    for x in xs.iter().filter(|x| x > &&RBig::ZERO) {
        h -= big(x) * log2(x);
    }
    h
}

pub fn cross_entropy(p: &[RBig], q: &[RBig]) -> Big {
    let mut h = zero();
    for (a, b) in p.iter().zip(q) {
        if a > &RBig::ZERO {
            h -= big(a) * log2(b);
        }
    }
    h
}

pub fn js_two_kl(p: &[RBig], q: &[RBig]) -> Big {
    let half = RBig::from_parts(1.into(), 2u8.into());
    let mut d = zero();
    for (a, b) in p.iter().zip(q) {
        let m = (a + b) * &half;
        for x in [a, b] {
            if x > &RBig::ZERO {
                d += big(x) * log2(&(x / &m)) * big(&half);
            }
        }
    }
    d
}

pub fn js_entropy_form(p: &[RBig], q: &[RBig]) -> Big {
    let half = RBig::from_parts(1.into(), 2u8.into());
    let m: Vec<RBig> = p.iter().zip(q).map(|(a, b)| (a + b) * &half).collect();
    entropy(&m) - (entropy(p) + entropy(q)) * big(&half)
}

/// Exact rational for an `f64` probability or smoothing constant.
pub fn rational(x: f64) -> RBig {
    RBig::try_from(x).unwrap()
}

#[derive(Clone, Copy, Debug)]
pub struct PairOracle {
    pub sce: f64,
    pub sce_raw: f64,
    pub jsd_similarity: f64,
    pub js_divergence: f64,
}

/// SCE with the sample/reference convention: `p` sample, `q` reference.
/// Special cases mirror the documented behaviour: identical distributions
/// score 1; a point-mass reference that differs scores 0.
pub fn sce(p: &[RBig], q: &[RBig], epsilon: &RBig) -> f64 {
    if p == q {
        return 1.0;
    }
    if q.iter().filter(|x| x > &&RBig::ZERO).count() <= 1 {
        return 0.0;
    }
    let qs: Vec<RBig> = q.iter().map(|x| if x > epsilon { x.clone() } else { epsilon.clone() }).collect();
    to_f64(&(entropy(&qs) / cross_entropy(p, &qs)))
}

/// Exact relative frequencies of `a` and `b` over their joint support.
pub fn distributions(a: &Counts, b: &Counts) -> (Vec<RBig>, Vec<RBig>) {
    let support: BTreeSet<&Shape> = a.keys().chain(b.keys()).collect();
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    let freq = |c: &Counts, n: u64, s: &Shape| {
        RBig::from_parts(IBig::from(c.get(s).copied().unwrap_or(0)), n.into())
    };
    (support.iter().map(|s| freq(a, na, s)).collect(), support.iter().map(|s| freq(b, nb, s)).collect())
}

pub fn score_counts(a: &Counts, b: &Counts, epsilon: f64) -> PairOracle {
    let (p, q) = distributions(a, b);
    let eps = rational(epsilon);
    let sce_raw = sce(&p, &q, &eps);
    let js = to_f64(&js_two_kl(&p, &q));
    PairOracle { sce: sce_raw.clamp(0.0, 1.0), sce_raw, jsd_similarity: 1.0 - js, js_divergence: js }
}

pub fn score_sources(
    language: &str,
    a: &str,
    b: &str,
    depth: u32,
    with_value: bool,
    epsilon: f64,
) -> PairOracle {
    score_counts(
        &subtree_counts(language, a, depth, with_value),
        &subtree_counts(language, b, depth, with_value),
        epsilon,
    )
}

/// Correctly rounded `f64` of an exact fraction.
pub fn nearest_f64(x: &RBig) -> f64 {
    to_f64(&big(x))
}
