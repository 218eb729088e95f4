//! Source text to language-agnostic parse trees.
//!
//! Grammars are registered by name in a [`GrammarRegistry`] before any
//! parsing starts. Parsing is deterministic: the same `(language, source)`
//! always yields the same node types, spans and child order.

mod tree;
mod treesitter;

use std::collections::BTreeMap;

use thiserror::Error;

pub use tree::{node_count, LanguageId, Node, NodeId, ParseTree, ParseTreeBuilder};
pub use treesitter::TreeSitterBackend;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("language `{0}` is already registered")]
    DuplicateLanguage(String),
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("grammar for `{language}` failed its smoke parse: {diagnostic}")]
    BackendRejected { language: String, diagnostic: String },
    #[error("empty source for language `{language}`")]
    EmptyInput { language: String },
    #[error("failed to parse {language} source: {diagnostic}")]
    ParseFailure { language: String, diagnostic: String },
    #[error("invalid parse tree: {0}")]
    InvalidTree(String),
}

/// A parser for one language. Implementations must be usable from several
/// threads at once, either by being stateless per call or by synchronising
/// internally.
pub trait GrammarBackend: Send + Sync {
    fn language(&self) -> LanguageId;

    /// A small well-formed program used to validate the backend at
    /// registration time.
    fn smoke_source(&self) -> &str;

    /// Parse `source`, keeping error-recovery nodes flagged on the tree.
    fn parse(&self, source: &str) -> Result<ParseTree, FrontendError>;
}

#[derive(Default)]
pub struct GrammarRegistry {
    backends: BTreeMap<String, Box<dyn GrammarBackend>>,
}

impl std::fmt::Debug for GrammarRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GrammarRegistry")
            .field("languages", &self.backends.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl GrammarRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry with the bundled `python` and `sql` grammars.
    pub fn with_default_grammars() -> Result<Self, FrontendError> {
        let mut registry = Self::new();
        registry.register(Box::new(TreeSitterBackend::python()))?;
        registry.register(Box::new(TreeSitterBackend::sql()))?;
        Ok(registry)
    }

    pub fn register(&mut self, backend: Box<dyn GrammarBackend>) -> Result<LanguageId, FrontendError> {
        let id = backend.language();
        if id.name.is_empty() {
            return Err(FrontendError::BackendRejected {
                language: id.name,
                diagnostic: "empty language name".into(),
            });
        }
        if self.backends.contains_key(&id.name) {
            return Err(FrontendError::DuplicateLanguage(id.name));
        }
        match backend.parse(backend.smoke_source()) {
            Ok(tree) if !tree.has_errors() => {}
            Ok(_) => {
                return Err(FrontendError::BackendRejected {
                    language: id.name,
                    diagnostic: "smoke program parsed with errors".into(),
                })
            }
            Err(e) => {
                return Err(FrontendError::BackendRejected { language: id.name, diagnostic: e.to_string() })
            }
        }
        self.backends.insert(id.name.clone(), backend);
        Ok(id)
    }

    /// Registered languages, sorted by name.
    pub fn languages(&self) -> Vec<LanguageId> {
        self.backends.values().map(|b| b.language()).collect()
    }

    pub fn language(&self, name: &str) -> Result<LanguageId, FrontendError> {
        self.backend(name).map(|b| b.language())
    }

    fn backend(&self, name: &str) -> Result<&dyn GrammarBackend, FrontendError> {
        self.backends
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| FrontendError::UnknownLanguage(name.to_string()))
    }

    /// Lenient parse: trees with recoverable errors are returned with
    /// [`ParseTree::has_errors`] set.
    pub fn parse(&self, language: &str, source: &str) -> Result<ParseTree, FrontendError> {
        self.parse_with(language, source, false)
    }

    /// Parse, rejecting any tree containing error nodes when `strict` is set.
    ///
    /// Sources that are empty or whitespace-only fail with `EmptyInput`. A tree
    /// with nothing below the root, or whose top-level nodes are all error
    /// nodes, fails with `ParseFailure` in either mode.
    pub fn parse_with(&self, language: &str, source: &str, strict: bool) -> Result<ParseTree, FrontendError> {
        let backend = self.backend(language)?;
        if source.trim().is_empty() {
            return Err(FrontendError::EmptyInput { language: language.to_string() });
        }
        let tree = backend.parse(source)?;
        let failure =
            |diagnostic: String| FrontendError::ParseFailure { language: language.to_string(), diagnostic };

        let root = tree.node(tree.root()).expect("tree has a root");
        if root.is_error() {
            return Err(failure("root is an error node".into()));
        }
        if root.children().is_empty() {
            return Err(failure("no parseable nodes below the root".into()));
        }
        if root.children().iter().all(|&c| tree.node(c).is_some_and(Node::is_error)) {
            return Err(failure("source consists solely of error nodes".into()));
        }
        if strict && tree.has_errors() {
            let first = tree.nodes().find(|(_, n)| n.is_error()).map(|(_, n)| n.span()).unwrap_or_default();
            return Err(failure(format!(
                "{} error node(s), first at bytes {}..{}",
                tree.error_node_count(),
                first.start,
                first.end
            )));
        }
        Ok(tree)
    }
}
