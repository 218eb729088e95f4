//! Structural stability scoring for sets of code samples.
//!
//! Each sample is parsed into a [`ParseTree`], every node contributes one
//! depth-bounded subtree symbol, and the resulting symbol multisets are turned
//! into empirical distributions over a joint support. Pairs of distributions
//! are scored with a cross-entropy ratio ([`metrics::sce_similarity`]) and a
//! Jensen-Shannon similarity ([`metrics::jsd_similarity`]). The
//! [`harness`] module averages those pairwise scores over repeated
//! generations of the same task.
//!
//! ```
//! use structural_entropy::prelude::*;
//!
//! let registry = GrammarRegistry::with_default_grammars().unwrap();
//! let a = registry.parse("python", "x = 1").unwrap();
//! let b = registry.parse("python", "y = 2").unwrap();
//! let depth = DepthBound::new(1).unwrap();
//!
//! let sa = extract_symbols(&a, depth, EncodingScheme::StructOnly);
//! let sb = extract_symbols(&b, depth, EncodingScheme::StructOnly);
//! let support = joint_support(&sa, &sb).unwrap();
//! let p = empirical(&sa, &support).unwrap();
//! let q = empirical(&sb, &support).unwrap();
//! assert_eq!(jsd_similarity(&p, &q).unwrap().value, 1.0);
//! ```

pub mod codec;
pub mod distribution;
pub mod frontend;
pub mod harness;
pub mod metrics;
mod numeric;

pub use codec::{encode_subtree, extract_symbols, CodecError, DepthBound, EncodingScheme, SubtreeSymbol};
pub use distribution::{
    empirical, joint_support, smooth, DistributionError, EmpiricalDistribution, JointSupport,
    SubtreeMultiset, DEFAULT_EPSILON,
};
pub use frontend::{
    node_count, FrontendError, GrammarBackend, GrammarRegistry, LanguageId, Node, NodeId, ParseTree,
    ParseTreeBuilder, TreeSitterBackend,
};
pub use metrics::{
    cross_entropy, js_divergence, jsd_similarity, kl_divergence, sce_similarity, shannon_entropy,
    MetricError, MetricKind, MetricScore,
};

pub mod prelude {
    pub use crate::codec::{extract_symbols, DepthBound, EncodingScheme};
    pub use crate::distribution::{empirical, joint_support, smooth, DEFAULT_EPSILON};
    pub use crate::frontend::GrammarRegistry;
    pub use crate::harness::{HarnessConfig, TaskRecord};
    pub use crate::metrics::{jsd_similarity, sce_similarity};
}
