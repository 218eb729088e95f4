use std::sync::Arc;

use tree_sitter::{Language, Parser};

use super::{FrontendError, GrammarBackend, LanguageId, ParseTree, ParseTreeBuilder};

/// Grammar backend driven by a compiled tree-sitter grammar.
///
/// All nodes are kept, named and anonymous alike, including comments.
/// `ERROR` and missing-token nodes are flagged on the resulting tree.
pub struct TreeSitterBackend {
    id: LanguageId,
    grammar: Language,
    smoke: &'static str,
}

impl TreeSitterBackend {
    pub fn new(id: LanguageId, grammar: Language, smoke: &'static str) -> Self {
        Self { id, grammar, smoke }
    }

    pub fn python() -> Self {
        let grammar: Language = tree_sitter_python::LANGUAGE.into();
        let version = format!("tree-sitter-python 0.25 (abi {})", grammar.abi_version());
        Self::new(LanguageId::new("python", version), grammar, "x = 1\n")
    }

    pub fn sql() -> Self {
        let grammar: Language = tree_sitter_sequel::LANGUAGE.into();
        let version = format!("tree-sitter-sequel 0.3 (abi {})", grammar.abi_version());
        Self::new(LanguageId::new("sql", version), grammar, "SELECT 1;\n")
    }
}

impl GrammarBackend for TreeSitterBackend {
    fn language(&self) -> LanguageId {
        self.id.clone()
    }

    fn smoke_source(&self) -> &str {
        self.smoke
    }

    fn parse(&self, source: &str) -> Result<ParseTree, FrontendError> {
        let failure =
            |diagnostic: String| FrontendError::ParseFailure { language: self.id.name.clone(), diagnostic };
        // tree-sitter parsers are not Sync; a fresh one per call keeps the
        // backend shareable across workers.
        let mut parser = Parser::new();
        parser.set_language(&self.grammar).map_err(|e| failure(format!("incompatible grammar: {e}")))?;
        let ts_tree = parser.parse(source, None).ok_or_else(|| failure("parser returned no tree".into()))?;

        let root = ts_tree.root_node();
        let source: Arc<str> = Arc::from(source);
        let mut builder = ParseTreeBuilder::new(source, root.kind(), root.byte_range());
        if root.is_error() || root.is_missing() {
            builder.mark_error(builder.root());
        }

        let mut pending = vec![(root, builder.root())];
        while let Some((ts_node, id)) = pending.pop() {
            let mut cursor = ts_node.walk();
            for child in ts_node.children(&mut cursor) {
                let child_id = builder.add_child(id, child.kind(), child.byte_range())?;
                if child.is_error() || child.is_missing() {
                    builder.mark_error(child_id);
                }
                pending.push((child, child_id));
            }
        }
        builder.build(self.id.clone())
    }
}
