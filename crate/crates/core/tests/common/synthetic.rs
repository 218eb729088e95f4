//! Random trees with consistent spans, for scaling and property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use structural_entropy::{LanguageId, ParseTree, ParseTreeBuilder};

const TYPES: [&str; 8] = ["stmt", "expr", "call", "name", "lit", "op", "block", "arg"];

/// A random tree of exactly `n` nodes. Node `i > 0` hangs under one of the
/// eight preceding nodes; each leaf covers one token of the generated source.
pub fn random_tree(n: usize, seed: u64) -> ParseTree {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent = vec![usize::MAX; n];
    let mut children = vec![Vec::new(); n];
    for (i, slot) in parent.iter_mut().enumerate().skip(1) {
        let p = rng.gen_range(i.saturating_sub(8)..i);
        *slot = p;
        children[p].push(i);
    }
    let types: Vec<&str> = (0..n).map(|_| TYPES[rng.gen_range(0..TYPES.len())]).collect();

    // Leaves get tokens in pre-order; internal spans are the hull of their children.
    let mut source = String::new();
    let mut spans = vec![0..0; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        order.push(v);
        stack.extend(children[v].iter().rev());
    }
    for &v in &order {
        if children[v].is_empty() {
            let start = source.len();
            source.push_str(&format!("t{} ", rng.gen_range(0..50)));
            spans[v] = start..source.len() - 1;
        }
    }
    for &v in order.iter().rev() {
        if let (Some(&first), Some(&last)) = (children[v].first(), children[v].last()) {
            spans[v] = spans[first].start..spans[last].end;
        }
    }

    let mut builder = ParseTreeBuilder::new(source, types[0], spans[0].clone());
    let mut ids = vec![builder.root(); n];
    for i in 1..n {
        ids[i] = builder.add_child(ids[parent[i]], types[i], spans[i].clone()).unwrap();
    }
    builder.build(LanguageId::new("synthetic", "0")).unwrap()
}
