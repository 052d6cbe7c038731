//! Signatures and depth-0 atom tables.
//!
//! A schema lists, in a fixed order, every basic atom over the positions
//! `0..arity`. A depth-0 theory is one bit per schema atom.

use std::collections::HashMap;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;

use super::intern::{intern, Node, Theory};
use crate::structure::Vocabulary;

/// What the atoms of a theory talk about.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Signature {
    /// Plain models: relational atoms (the order included) and equality.
    Model(Arc<Vocabulary>),
    /// Two-sorted systems: sort atoms, relational atoms of either side,
    /// equality, `h` and distance thresholds.
    System(Arc<Vocabulary>, Arc<Vocabulary>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigId(u32);

/// Which sort a relational atom belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Plain,
    M,
    I,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    InM(u8),
    Rel { side: Side, sym: u16, args: Box<[u8]> },
    /// `x_i = x_j` with `i < j`.
    Eq(u8, u8),
    /// `h(x_i) = x_j` with `i != j`.
    H(u8, u8),
    /// `dist(x_i, x_j) ≤ k` with `i < j`.
    Dist(u8, u8, u32),
}

/// The value of an arbitrary atom: either a schema bit, its negation, or a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Bit(usize),
    NotBit(usize),
    Const(bool),
}

#[derive(Debug)]
pub struct Schema {
    pub sig: SigId,
    pub arity: u32,
    pub radius: u32,
    pub atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl Schema {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn words(&self) -> usize {
        self.atoms.len().div_ceil(64).max(1)
    }

    /// Resolves any atom over positions `< arity` to a schema bit,
    /// normalizing symmetric and degenerate forms.
    pub fn lookup(&self, atom: &Atom) -> Lookup {
        let bit = |a: &Atom| Lookup::Bit(*self.index.get(a).unwrap_or_else(|| panic!("atom {a:?} not in schema")));
        match *atom {
            Atom::Eq(i, j) if i == j => Lookup::Const(true),
            Atom::Eq(i, j) if i > j => bit(&Atom::Eq(j, i)),
            Atom::Dist(i, j, _) if i == j => Lookup::Const(true),
            Atom::Dist(i, j, k) if i > j => bit(&Atom::Dist(j, i, k)),
            Atom::Dist(_, _, k) if k > self.radius => panic!("distance threshold {k} above radius {}", self.radius),
            // h(x) = x holds exactly for index elements
            Atom::H(i, j) if i == j => match self.index.get(&Atom::InM(i)) {
                Some(&b) => Lookup::NotBit(b),
                None => Lookup::Const(false),
            },
            _ => bit(atom),
        }
    }
}

#[inline]
pub fn get_bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
pub fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

#[inline]
pub fn read(bits: &[u64], l: Lookup) -> bool {
    match l {
        Lookup::Bit(i) => get_bit(bits, i),
        Lookup::NotBit(i) => !get_bit(bits, i),
        Lookup::Const(b) => b,
    }
}

#[derive(Default)]
struct Registry {
    sigs: Vec<Signature>,
    ids: HashMap<Signature, SigId>,
    schemas: HashMap<(SigId, u32, u32), Arc<Schema>>,
}

static REGISTRY: Lazy<RwLock<Registry>> = Lazy::new(Default::default);

impl Signature {
    pub fn id(&self) -> SigId {
        if let Some(&id) = REGISTRY.read().ids.get(self) {
            return id;
        }
        let mut r = REGISTRY.write();
        if let Some(&id) = r.ids.get(self) {
            return id;
        }
        let id = SigId(r.sigs.len() as u32);
        r.sigs.push(self.clone());
        r.ids.insert(self.clone(), id);
        id
    }

    pub fn model(vocab: &Vocabulary) -> SigId {
        Signature::Model(Arc::new(vocab.clone())).id()
    }

    pub fn system(m: &Vocabulary, i: &Vocabulary) -> SigId {
        Signature::System(Arc::new(m.clone()), Arc::new(i.clone())).id()
    }
}

impl SigId {
    pub fn signature(self) -> Signature {
        REGISTRY.read().sigs[self.0 as usize].clone()
    }

    pub fn is_system(self) -> bool {
        matches!(self.signature(), Signature::System(..))
    }

    /// Distance radius matters only for systems; plain models always use 0.
    pub fn schema(self, arity: u32, radius: u32) -> Arc<Schema> {
        let key = (self, arity, radius);
        if let Some(s) = REGISTRY.read().schemas.get(&key) {
            return s.clone();
        }
        let schema = Arc::new(build(self, arity, radius));
        REGISTRY.write().schemas.entry(key).or_insert(schema).clone()
    }
}

fn tuples(arity: usize, m: u32) -> Vec<Box<[u8]>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t: Vec<u8>| {
                (0..m as u8).map(move |p| {
                    let mut t = t.clone();
                    t.push(p);
                    t
                })
            })
            .collect();
    }
    out.into_iter().map(Vec::into_boxed_slice).collect()
}

fn build(sig: SigId, arity: u32, radius: u32) -> Schema {
    assert!(arity < 256, "tuple too long");
    let mut atoms = Vec::new();
    let rels = |side: Side, v: &Vocabulary, atoms: &mut Vec<Atom>| {
        for (sym, (_, a)) in v.symbols().iter().enumerate() {
            for args in tuples(*a, arity) {
                atoms.push(Atom::Rel { side, sym: sym as u16, args });
            }
        }
    };
    let pairs = || (0..arity as u8).flat_map(|i| (i + 1..arity as u8).map(move |j| (i, j)));
    match sig.signature() {
        Signature::Model(v) => {
            rels(Side::Plain, &v, &mut atoms);
            atoms.extend(pairs().map(|(i, j)| Atom::Eq(i, j)));
        }
        Signature::System(m, i) => {
            atoms.extend((0..arity as u8).map(Atom::InM));
            rels(Side::M, &m, &mut atoms);
            rels(Side::I, &i, &mut atoms);
            atoms.extend(pairs().map(|(i, j)| Atom::Eq(i, j)));
            for a in 0..arity as u8 {
                for b in 0..arity as u8 {
                    if a != b {
                        atoms.push(Atom::H(a, b));
                    }
                }
            }
            for k in 0..=radius {
                atoms.extend(pairs().map(|(i, j)| Atom::Dist(i, j, k)));
            }
        }
    }
    let index = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    Schema { sig, arity, radius, atoms, index }
}

/// Interns a leaf given its bits.
pub fn leaf(sig: SigId, radius: u32, arity: u32, bits: Vec<u64>) -> Theory {
    intern(Node::Leaf { sig, radius, arity, bits: bits.into_boxed_slice() })
}

pub(crate) fn leaf_width(t: Theory) -> usize {
    match &*t.node() {
        Node::Leaf { sig, radius, arity, .. } => sig.schema(*arity, *radius).len(),
        _ => 0,
    }
}

/// Renames the positions of a leaf: position `p` of the result reads position
/// `proj[p]` of `t`. The radius may shrink.
pub fn project_leaf(t: Theory, proj: &[u32], radius: u32) -> Theory {
    let node = t.node();
    let Node::Leaf { sig, radius: r0, arity, bits } = &*node else { panic!("project_leaf on a non-leaf") };
    assert!(radius <= *r0, "cannot raise the radius of a theory");
    assert!(proj.iter().all(|&p| p < *arity), "projection out of range");
    let src = sig.schema(*arity, *r0);
    let dst = sig.schema(proj.len() as u32, radius);
    let mut out = vec![0u64; dst.words()];
    let map = |p: u8| proj[p as usize] as u8;
    for (i, atom) in dst.atoms.iter().enumerate() {
        let moved = match atom {
            Atom::InM(a) => Atom::InM(map(*a)),
            Atom::Rel { side, sym, args } => Atom::Rel { side: *side, sym: *sym, args: args.iter().map(|&a| map(a)).collect() },
            Atom::Eq(a, b) => Atom::Eq(map(*a), map(*b)),
            Atom::H(a, b) => Atom::H(map(*a), map(*b)),
            Atom::Dist(a, b, k) => Atom::Dist(map(*a), map(*b), *k),
        };
        if read(bits, src.lookup(&moved)) {
            set_bit(&mut out, i);
        }
    }
    leaf(*sig, radius, proj.len() as u32, out)
}

pub fn leaf_bits(t: Theory) -> (SigId, u32, u32, Box<[u64]>) {
    match &*t.node() {
        Node::Leaf { sig, radius, arity, bits } => (*sig, *radius, *arity, bits.clone()),
        _ => panic!("not a leaf"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_schema_counts() {
        let sig = Signature::model(&Vocabulary::graph_order());
        // two binary symbols over 2 positions, plus one equality
        assert_eq!(sig.schema(2, 0).len(), 4 + 4 + 1);
        assert_eq!(sig.schema(0, 0).len(), 0);
    }

    #[test]
    fn system_schema_counts() {
        let v = Vocabulary::from_pairs(&[("R", 2)], None);
        let sig = Signature::system(&v, &v);
        // 2 sort + 4 + 4 rel + 1 eq + 2 h + 2 dist thresholds
        assert_eq!(sig.schema(2, 1).len(), 2 + 8 + 1 + 2 + 2);
    }

    #[test]
    fn lookup_normalizes() {
        let sig = Signature::model(&Vocabulary::order_only());
        let s = sig.schema(2, 0);
        assert_eq!(s.lookup(&Atom::Eq(1, 1)), Lookup::Const(true));
        assert_eq!(s.lookup(&Atom::Eq(1, 0)), s.lookup(&Atom::Eq(0, 1)));
    }
}
