//! Depth-bounded subtree symbols.
//!
//! Every node `v` of a tree yields one symbol describing the fragment rooted at
//! `v` with descendants down to `d` levels below it. Nodes above the depth
//! bound are *expanded*: they carry their type, their child list and, under
//! [`EncodingScheme::StructValue`], a lexeme slot. Nodes exactly at the bound
//! are *frontier* nodes and carry their type only. With `d = 1` this gives
//! `(type(v), (type(c1), .., type(ck)))` for structure-only symbols and
//! `(type(v), lexeme-or-sentinel, (type(c1), .., type(ck)))` for
//! structure+value symbols.
//!
//! # Canonical form
//!
//! ```text
//! node     := expanded | frontier
//! expanded := 'E' field [slot] '[' (node (' ' node)*)? ']'
//! frontier := 'F' field
//! slot     := '~' | 'V' field        ('~' is the internal-node sentinel)
//! field    := <decimal byte length> ':' <escaped bytes>
//! ```
//!
//! Field contents escape `\`, tab, newline and carriage return, and the length
//! prefix counts escaped bytes. Arbitrary type names and lexemes therefore can
//! never forge a field or child-list boundary, and a canonical form never
//! contains a tab or newline.

use std::fmt;
use std::num::NonZeroU32;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::SubtreeMultiset;
use crate::frontend::{NodeId, ParseTree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("depth bound must be at least 1")]
    InvalidDepth,
    #[error("node {0} is not part of the tree")]
    InvalidNode(NodeId),
    #[error("malformed canonical form at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: &'static str },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EncodingScheme {
    /// Node types only.
    #[serde(rename = "structural")]
    StructOnly,
    /// Node types plus leaf lexemes; internal nodes carry a sentinel.
    #[serde(rename = "value")]
    StructValue,
}

impl EncodingScheme {
    pub const ALL: [EncodingScheme; 2] = [EncodingScheme::StructOnly, EncodingScheme::StructValue];

    pub fn name(self) -> &'static str {
        match self {
            EncodingScheme::StructOnly => "structural",
            EncodingScheme::StructValue => "value",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct DepthBound(NonZeroU32);

impl DepthBound {
    pub fn new(d: u32) -> Result<Self, CodecError> {
        NonZeroU32::new(d).map(Self).ok_or(CodecError::InvalidDepth)
    }

    pub fn get(self) -> u32 {
        self.0.get()
    }
}

impl Default for DepthBound {
    fn default() -> Self {
        Self(NonZeroU32::MIN)
    }
}

impl TryFrom<u32> for DepthBound {
    type Error = CodecError;
    fn try_from(d: u32) -> Result<Self, CodecError> {
        Self::new(d)
    }
}

impl From<DepthBound> for u32 {
    fn from(d: DepthBound) -> u32 {
        d.get()
    }
}

impl fmt::Display for DepthBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Canonical, hashable encoding of one depth-bounded subtree.
///
/// Ordering is byte order of the canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubtreeSymbol(Arc<str>);

impl SubtreeSymbol {
    pub fn canonical_form(&self) -> &str {
        &self.0
    }

    /// Accept a string only if it is a complete, well-formed canonical form.
    pub fn parse(canonical: &str) -> Result<Self, CodecError> {
        let mut reader = Reader { bytes: canonical.as_bytes(), pos: 0 };
        reader.node()?;
        if reader.pos != canonical.len() {
            return Err(reader.malformed("trailing bytes"));
        }
        Ok(Self(Arc::from(canonical)))
    }

    pub fn decode(&self) -> DecodedSubtree {
        let mut reader = Reader { bytes: self.0.as_bytes(), pos: 0 };
        reader.node().expect("symbols are always well-formed")
    }
}

impl fmt::Debug for SubtreeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubtreeSymbol({})", self.0)
    }
}

impl fmt::Display for SubtreeSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LexemeSlot {
    /// Structure-only symbols have no slot.
    Absent,
    /// Internal node under structure+value encoding.
    Sentinel,
    Text(Vec<u8>),
}

/// Structured view of a [`SubtreeSymbol`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedSubtree {
    pub node_type: Vec<u8>,
    pub lexeme: LexemeSlot,
    /// `None` for frontier nodes, whose children lie beyond the depth bound.
    pub children: Option<Vec<DecodedSubtree>>,
}

pub fn encode_subtree(
    tree: &ParseTree,
    v: NodeId,
    d: DepthBound,
    scheme: EncodingScheme,
) -> Result<SubtreeSymbol, CodecError> {
    if tree.node(v).is_none() {
        return Err(CodecError::InvalidNode(v));
    }
    let mut out = Vec::new();
    write_node(tree, v, d.get(), scheme, &mut out);
    Ok(SubtreeSymbol(Arc::from(into_text(&out))))
}

/// One symbol per node of `tree`, counted with multiplicity.
pub fn extract_symbols(tree: &ParseTree, d: DepthBound, scheme: EncodingScheme) -> SubtreeMultiset {
    let mut multiset = SubtreeMultiset::new();
    let mut buf = Vec::new();
    for (id, _) in tree.nodes() {
        buf.clear();
        write_node(tree, id, d.get(), scheme, &mut buf);
        multiset.insert(SubtreeSymbol(Arc::from(into_text(&buf))));
    }
    multiset
}

// Spans are validated to fall on char boundaries, so every field is whole
// UTF-8 sequences plus ASCII escapes.
fn into_text(buf: &[u8]) -> &str {
    std::str::from_utf8(buf).expect("canonical forms are valid UTF-8")
}

fn write_node(tree: &ParseTree, id: NodeId, remaining: u32, scheme: EncodingScheme, out: &mut Vec<u8>) {
    let node = tree.node(id).expect("node ids come from the tree");
    if remaining == 0 {
        out.push(b'F');
        write_field(node.node_type().as_bytes(), out);
        return;
    }
    out.push(b'E');
    write_field(node.node_type().as_bytes(), out);
    if scheme == EncodingScheme::StructValue {
        if node.is_leaf() {
            out.push(b'V');
            write_field(tree.lexeme(id).unwrap_or_default(), out);
        } else {
            out.push(b'~');
        }
    }
    out.push(b'[');
    for (i, &child) in node.children().iter().enumerate() {
        if i > 0 {
            out.push(b' ');
        }
        write_node(tree, child, remaining - 1, scheme, out);
    }
    out.push(b']');
}

fn write_field(raw: &[u8], out: &mut Vec<u8>) {
    let escaped_len: usize =
        raw.iter().map(|b| if matches!(b, b'\\' | b'\t' | b'\n' | b'\r') { 2 } else { 1 }).sum();
    out.extend_from_slice(escaped_len.to_string().as_bytes());
    out.push(b':');
    for &b in raw {
        match b {
            b'\\' => out.extend_from_slice(b"\\\\"),
            b'\t' => out.extend_from_slice(b"\\t"),
            b'\n' => out.extend_from_slice(b"\\n"),
            b'\r' => out.extend_from_slice(b"\\r"),
            _ => out.push(b),
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn malformed(&self, reason: &'static str) -> CodecError {
        CodecError::Malformed { offset: self.pos, reason }
    }

    fn next(&mut self) -> Option<u8> {
        let b = self.bytes.get(self.pos).copied();
        self.pos += usize::from(b.is_some());
        b
    }

    fn expect(&mut self, want: u8, reason: &'static str) -> Result<(), CodecError> {
        match self.next() {
            Some(b) if b == want => Ok(()),
            _ => Err(self.malformed(reason)),
        }
    }

    fn node(&mut self) -> Result<DecodedSubtree, CodecError> {
        match self.next() {
            Some(b'F') => {
                Ok(DecodedSubtree { node_type: self.field()?, lexeme: LexemeSlot::Absent, children: None })
            }
            Some(b'E') => {
                let node_type = self.field()?;
                let lexeme = match self.bytes.get(self.pos) {
                    Some(b'~') => {
                        self.pos += 1;
                        LexemeSlot::Sentinel
                    }
                    Some(b'V') => {
                        self.pos += 1;
                        LexemeSlot::Text(self.field()?)
                    }
                    _ => LexemeSlot::Absent,
                };
                self.expect(b'[', "expected child list")?;
                let mut children = Vec::new();
                if self.bytes.get(self.pos) == Some(&b']') {
                    self.pos += 1;
                } else {
                    loop {
                        children.push(self.node()?);
                        match self.next() {
                            Some(b' ') => continue,
                            Some(b']') => break,
                            _ => return Err(self.malformed("expected ' ' or ']'")),
                        }
                    }
                }
                Ok(DecodedSubtree { node_type, lexeme, children: Some(children) })
            }
            _ => Err(self.malformed("expected 'E' or 'F'")),
        }
    }

    fn field(&mut self) -> Result<Vec<u8>, CodecError> {
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.malformed("expected field length"));
        }
        let len: usize = std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.malformed("field length overflow"))?;
        self.expect(b':', "expected ':' after field length")?;
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| self.malformed("field runs past end"))?;
        let mut raw = Vec::with_capacity(len);
        let mut i = self.pos;
        while i < end {
            let b = self.bytes[i];
            if b == b'\\' {
                let unescaped = match self.bytes.get(i + 1).filter(|_| i + 1 < end) {
                    Some(b'\\') => b'\\',
                    Some(b't') => b'\t',
                    Some(b'n') => b'\n',
                    Some(b'r') => b'\r',
                    _ => return Err(CodecError::Malformed { offset: i, reason: "bad escape" }),
                };
                raw.push(unescaped);
                i += 2;
            } else if matches!(b, b'\t' | b'\n' | b'\r') {
                return Err(CodecError::Malformed { offset: i, reason: "unescaped control byte" });
            } else {
                raw.push(b);
                i += 1;
            }
        }
        self.pos = end;
        Ok(raw)
    }
}
