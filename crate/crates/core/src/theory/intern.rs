//! Global hash-consing table for theory values.
//!
//! Every theory is a node in one process-wide table. Children of set-like
//! nodes are kept sorted by handle, so structurally equal values always land
//! on the same handle and equality is a single integer comparison.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;
use sha2::{Digest, Sha256};

use super::schema::SigId;

/// Handle of an interned theory.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Theory(u32);

impl fmt::Debug for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theory#{}", self.0)
    }
}

/// What a compound node stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Bounded,
    Sparse,
    Pair,
}

impl Kind {
    fn tag(self) -> &'static str {
        match self {
            Kind::Bounded => "b",
            Kind::Sparse => "u",
            Kind::Pair => "p",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    /// A depth-0 atom table, one bit per schema atom.
    Leaf { sig: SigId, radius: u32, arity: u32, bits: Box<[u64]> },
    /// A depth-(n+1) theory: the set of depth-n theories of all one-point
    /// extensions, plus the depth-0 table of the tuple itself.
    Set { sig: SigId, depth: u32, radius: u32, arity: u32, base: Theory, members: Box<[Theory]> },
    /// Bounded and sparse theories and their auxiliary pairs. `header` holds
    /// numeric parameters; each group is either an ordered list or a sorted set.
    Compound { kind: Kind, header: Box<[u32]>, groups: Box<[Box<[Theory]>]> },
}

#[derive(Default)]
struct Table {
    nodes: Vec<Arc<Node>>,
    index: HashMap<Arc<Node>, u32>,
    encodings: HashMap<u32, Arc<str>>,
}

static TABLE: Lazy<RwLock<Table>> = Lazy::new(Default::default);

/// Inserts `node` or returns the existing handle of an equal node.
pub fn intern(node: Node) -> Theory {
    if let Some(&id) = TABLE.read().index.get(&node) {
        return Theory(id);
    }
    let mut t = TABLE.write();
    if let Some(&id) = t.index.get(&node) {
        return Theory(id);
    }
    let id = u32::try_from(t.nodes.len()).expect("intern table overflow");
    let node = Arc::new(node);
    t.nodes.push(node.clone());
    t.index.insert(node, id);
    Theory(id)
}

/// Sorts and deduplicates handles in place, the canonical form for sets.
pub fn canonical_set(mut v: Vec<Theory>) -> Box<[Theory]> {
    v.sort_unstable();
    v.dedup();
    v.into_boxed_slice()
}

/// Number of interned nodes so far.
pub fn table_size() -> usize {
    TABLE.read().nodes.len()
}

impl Theory {
    pub fn node(self) -> Arc<Node> {
        TABLE.read().nodes[self.0 as usize].clone()
    }

    pub fn id(self) -> u32 {
        self.0
    }

    /// Quantifier depth.
    pub fn depth(self) -> u32 {
        match &*self.node() {
            Node::Leaf { .. } => 0,
            Node::Set { depth, .. } => *depth,
            Node::Compound { header, .. } => header[0],
        }
    }

    /// Deterministic text encoding `[depth,radius,arity,body]`, identical
    /// across runs. Set bodies list their members' encodings sorted.
    pub fn encode(self) -> Arc<str> {
        if let Some(e) = TABLE.read().encodings.get(&self.0) {
            return e.clone();
        }
        let text: Arc<str> = match &*self.node() {
            Node::Leaf { radius, arity, bits, .. } => {
                let width = super::schema::leaf_width(self);
                let body: String = (0..width).map(|i| if bits[i / 64] >> (i % 64) & 1 == 1 { '1' } else { '0' }).collect();
                format!("[0,{radius},{arity},\"{body}\"]").into()
            }
            Node::Set { depth, radius, arity, members, .. } => {
                format!("[{depth},{radius},{arity},{}]", sorted_list(members)).into()
            }
            Node::Compound { kind, header, groups } => {
                let head: Vec<String> = header.iter().map(|h| h.to_string()).collect();
                let body: Vec<String> = groups
                    .iter()
                    .map(|g| if *kind == Kind::Pair { ordered_list(g) } else { sorted_list(g) })
                    .collect();
                format!("[\"{}\",{},{}]", kind.tag(), head.join(","), body.join(",")).into()
            }
        };
        TABLE.write().encodings.insert(self.0, text.clone());
        text
    }

    /// Short stable identifier derived from the encoding.
    pub fn digest(self) -> String {
        let hash = Sha256::digest(self.encode().as_bytes());
        hash.iter().take(6).map(|b| format!("{b:02x}")).collect()
    }
}

fn sorted_list(items: &[Theory]) -> String {
    let mut enc: Vec<Arc<str>> = items.iter().map(|t| t.encode()).collect();
    enc.sort();
    format!("[{}]", enc.join(","))
}

fn ordered_list(items: &[Theory]) -> String {
    let enc: Vec<Arc<str>> = items.iter().map(|t| t.encode()).collect();
    format!("[{}]", enc.join(","))
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}
