use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::FrontendError;

/// A registered language: grammar name plus the grammar build it came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LanguageId {
    pub name: String,
    pub grammar_version: String,
}

impl LanguageId {
    pub fn new(name: impl Into<String>, grammar_version: impl Into<String>) -> Self {
        Self { name: name.into(), grammar_version: grammar_version.into() }
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name, self.grammar_version)
    }
}

/// Index of a node inside its [`ParseTree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    node_type: Box<str>,
    span: Range<usize>,
    children: Vec<NodeId>,
    error: bool,
}

impl Node {
    /// Grammar production name, e.g. `assignment` or `keyword_select`.
    pub fn node_type(&self) -> &str {
        &self.node_type
    }

    /// Byte range of the source text covered by this node.
    pub fn span(&self) -> Range<usize> {
        self.span.clone()
    }

    pub fn children(&self) -> &[NodeId] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// True for error-recovery and missing-token nodes.
    pub fn is_error(&self) -> bool {
        self.error
    }
}

/// Rooted ordered tree of typed nodes over a retained source text.
///
/// Nodes live in an arena; parents always precede their children, so the tree
/// is acyclic and every non-root node has exactly one parent by construction.
/// Trees are immutable once built and cheap to share between threads.
#[derive(Clone, Debug)]
pub struct ParseTree {
    language: LanguageId,
    nodes: Vec<Node>,
    source: Arc<str>,
    error_nodes: usize,
}

impl ParseTree {
    pub fn language(&self) -> &LanguageId {
        &self.language
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.index())
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = (NodeId, &Node)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i as u32), n))
    }

    /// Raw bytes covered by a node. Byte equality is lexeme equality.
    pub fn lexeme(&self, id: NodeId) -> Option<&[u8]> {
        let node = self.node(id)?;
        self.source.as_bytes().get(node.span.clone())
    }

    /// Number of error-recovery or missing nodes anywhere in the tree.
    pub fn error_node_count(&self) -> usize {
        self.error_nodes
    }

    pub fn has_errors(&self) -> bool {
        self.error_nodes > 0
    }

    /// Node ids in pre-order (parent before children, children left to right).
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root()];
        while let Some(id) = stack.pop() {
            order.push(id);
            stack.extend(self.nodes[id.index()].children.iter().rev().copied());
        }
        order
    }
}

/// Number of nodes reachable from the root.
pub fn node_count(tree: &ParseTree) -> usize {
    let mut count = 0;
    let mut stack = vec![tree.root()];
    while let Some(id) = stack.pop() {
        count += 1;
        stack.extend_from_slice(&tree.nodes[id.index()].children);
    }
    count
}

/// Incremental constructor for [`ParseTree`]. The root is created up front;
/// every later node names an existing parent and is appended to that
/// parent's child list.
#[derive(Debug)]
pub struct ParseTreeBuilder {
    source: Arc<str>,
    nodes: Vec<Node>,
}

impl ParseTreeBuilder {
    pub fn new(source: impl Into<Arc<str>>, root_type: &str, root_span: Range<usize>) -> Self {
        Self {
            source: source.into(),
            nodes: vec![Node {
                node_type: root_type.into(),
                span: root_span,
                children: Vec::new(),
                error: false,
            }],
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn add_child(
        &mut self,
        parent: NodeId,
        node_type: &str,
        span: Range<usize>,
    ) -> Result<NodeId, FrontendError> {
        if parent.index() >= self.nodes.len() {
            return Err(FrontendError::InvalidTree(format!("unknown parent {parent}")));
        }
        let id = u32::try_from(self.nodes.len())
            .map(NodeId)
            .map_err(|_| FrontendError::InvalidTree("too many nodes".into()))?;
        self.nodes.push(Node { node_type: node_type.into(), span, children: Vec::new(), error: false });
        self.nodes[parent.index()].children.push(id);
        Ok(id)
    }

    pub fn mark_error(&mut self, id: NodeId) {
        if let Some(node) = self.nodes.get_mut(id.index()) {
            node.error = true;
        }
    }

    /// Validate the tree invariants and freeze the tree.
    pub fn build(self, language: LanguageId) -> Result<ParseTree, FrontendError> {
        let len = self.source.len();
        for (i, node) in self.nodes.iter().enumerate() {
            if node.node_type.is_empty() {
                return Err(FrontendError::InvalidTree(format!("node #{i} has an empty type")));
            }
            if node.span.start > node.span.end || node.span.end > len {
                return Err(FrontendError::InvalidTree(format!(
                    "node #{i} span {:?} outside source of {len} bytes",
                    node.span
                )));
            }
            if !self.source.is_char_boundary(node.span.start) || !self.source.is_char_boundary(node.span.end)
            {
                return Err(FrontendError::InvalidTree(format!(
                    "node #{i} span {:?} splits a UTF-8 character",
                    node.span
                )));
            }
            for child in &node.children {
                let c = &self.nodes[child.index()].span;
                if c.start < node.span.start || c.end > node.span.end {
                    return Err(FrontendError::InvalidTree(format!(
                        "child {child} span {c:?} escapes parent #{i} span {:?}",
                        node.span
                    )));
                }
            }
        }
        let error_nodes = self.nodes.iter().filter(|n| n.error).count();
        Ok(ParseTree { language, nodes: self.nodes, source: self.source, error_nodes })
    }
}
