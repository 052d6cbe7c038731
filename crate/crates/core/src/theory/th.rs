//! Computing depth-n theories of tuples in structures and systems.

use thiserror::Error;

use super::intern::{canonical_set, intern, Kind, Node, Theory};
use super::schema::{leaf, set_bit, Atom, SigId, Side, Signature};
use crate::structure::Structure;
use crate::system::{Sort, System};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TheoryError {
    #[error("element {0} is out of range")]
    OutOfRange(usize),
    #[error("formula has depth {need} but the theory only has depth {have}")]
    DepthTooSmall { need: u32, have: u32 },
    #[error("formula uses distance threshold {need} but the theory has radius {have}")]
    RadiusTooSmall { need: u32, have: u32 },
    #[error("free variable x{0} is not a position of the tuple")]
    FreeVariable(u32),
    #[error("numerals are not supported in theory evaluation")]
    Numeral,
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("atom `{0}` only makes sense in systems")]
    SystemAtom(&'static str),
    #[error("cannot raise {what} from {from} to {to}")]
    Increase { what: &'static str, from: u32, to: u32 },
    #[error("projection entry {0} is not a position of the tuple")]
    Projection(u32),
    #[error("theories are incompatible: {0}")]
    Mismatch(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
}

/// Anything whose basic atoms can be read off a tuple.
pub trait Realizer {
    fn signature_id(&self) -> SigId;
    fn universe_size(&self) -> usize;
    fn atom(&self, atom: &Atom, tuple: &[usize]) -> bool;
    /// Radius actually used in the atom table.
    fn effective_radius(&self, r: u32) -> u32 {
        r
    }
}

impl Realizer for Structure {
    fn signature_id(&self) -> SigId {
        Signature::model(self.vocab())
    }

    fn universe_size(&self) -> usize {
        self.size()
    }

    fn atom(&self, atom: &Atom, t: &[usize]) -> bool {
        match atom {
            Atom::Rel { sym, args, .. } => {
                let mut buf = [0usize; 8];
                if args.len() <= 8 {
                    for (k, &a) in args.iter().enumerate() {
                        buf[k] = t[a as usize];
                    }
                    self.holds(*sym as usize, &buf[..args.len()])
                } else {
                    let v: Vec<usize> = args.iter().map(|&a| t[a as usize]).collect();
                    self.holds(*sym as usize, &v)
                }
            }
            Atom::Eq(i, j) => t[*i as usize] == t[*j as usize],
            _ => unreachable!("system atom in a model schema"),
        }
    }

    /// Plain models carry no distance atoms, so the radius is always 0.
    fn effective_radius(&self, _r: u32) -> u32 {
        0
    }
}

impl Realizer for System {
    fn signature_id(&self) -> SigId {
        Signature::system(self.m_part().vocab(), self.i_part().vocab())
    }

    fn universe_size(&self) -> usize {
        self.universe()
    }

    fn atom(&self, atom: &Atom, t: &[usize]) -> bool {
        let at = |p: u8| t[p as usize];
        match atom {
            Atom::InM(i) => self.sort(at(*i)) == Sort::M,
            Atom::Rel { side, sym, args } => {
                let xs: Vec<usize> = args.iter().map(|&a| at(a)).collect();
                match side {
                    Side::M => xs.iter().all(|&x| self.sort(x) == Sort::M) && self.m_part().holds(*sym as usize, &xs),
                    Side::I => {
                        let nm = self.m_size();
                        xs.iter().all(|&x| self.sort(x) == Sort::I) && {
                            let local: Vec<usize> = xs.iter().map(|&x| x - nm).collect();
                            self.i_part().holds(*sym as usize, &local)
                        }
                    }
                    Side::Plain => unreachable!("plain atom in a system schema"),
                }
            }
            Atom::Eq(i, j) => at(*i) == at(*j),
            Atom::H(i, j) => self.sort(at(*j)) == Sort::I && self.h(at(*i)) == self.h(at(*j)),
            Atom::Dist(i, j, k) => self.dist(at(*i), at(*j)).within(*k),
        }
    }
}

/// The depth-0 table of `tuple`.
pub fn th0<R: Realizer + ?Sized>(m: &R, sig: SigId, tuple: &[usize], radius: u32) -> Theory {
    let schema = sig.schema(tuple.len() as u32, radius);
    let mut bits = vec![0u64; schema.words()];
    for (i, a) in schema.atoms.iter().enumerate() {
        if m.atom(a, tuple) {
            set_bit(&mut bits, i);
        }
    }
    leaf(sig, radius, tuple.len() as u32, bits)
}

fn go<R: Realizer + ?Sized>(m: &R, sig: SigId, tuple: &mut Vec<usize>, n: u32, radius: u32) -> Theory {
    let base = th0(m, sig, tuple, radius);
    if n == 0 {
        return base;
    }
    let mut members = Vec::with_capacity(m.universe_size());
    for c in 0..m.universe_size() {
        tuple.push(c);
        members.push(go(m, sig, tuple, n - 1, radius));
        tuple.pop();
    }
    intern(Node::Set { sig, depth: n, radius, arity: tuple.len() as u32, base, members: canonical_set(members) })
}

/// `th^n_r(tuple, m)`: quantification ranges over the whole universe
/// (both sorts, for systems).
pub fn th<R: Realizer + ?Sized>(m: &R, tuple: &[usize], n: u32, r: u32) -> Result<Theory, TheoryError> {
    if let Some(&bad) = tuple.iter().find(|&&x| x >= m.universe_size()) {
        return Err(TheoryError::OutOfRange(bad));
    }
    let sig = m.signature_id();
    Ok(go(m, sig, &mut tuple.to_vec(), n, m.effective_radius(r)))
}

/// Sentence theory `th^n(⟨⟩, m)` of a plain structure.
pub fn sentence_theory(m: &Structure, n: u32) -> Theory {
    th(m, &[], n, 0).expect("empty tuple is always in range")
}

impl Theory {
    /// Arity of the tuple the theory describes.
    pub fn arity(self) -> u32 {
        match &*self.node() {
            Node::Leaf { arity, .. } | Node::Set { arity, .. } => *arity,
            Node::Compound { kind: Kind::Bounded, header, .. } => header[2],
            Node::Compound { kind: Kind::Sparse, header, .. } => header[1],
            Node::Compound { kind: Kind::Pair, .. } => 0,
        }
    }

    /// Distance radius of a plain or leaf theory.
    pub fn radius(self) -> u32 {
        match &*self.node() {
            Node::Leaf { radius, .. } | Node::Set { radius, .. } => *radius,
            Node::Compound { kind: Kind::Bounded, header, .. } => header[1],
            _ => 0,
        }
    }

    pub fn sig(self) -> SigId {
        match &*self.node() {
            Node::Leaf { sig, .. } | Node::Set { sig, .. } => *sig,
            _ => panic!("compound theories have no single signature"),
        }
    }

    /// Depth-0 table of the tuple itself.
    pub fn base(self) -> Theory {
        match &*self.node() {
            Node::Leaf { .. } => self,
            Node::Set { base, .. } => *base,
            _ => panic!("compound theories have no base table"),
        }
    }

    /// Members of a depth-(n+1) theory; empty for leaves.
    pub fn members(self) -> Box<[Theory]> {
        match &*self.node() {
            Node::Set { members, .. } => members.clone(),
            _ => Box::new([]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::LiftMode;

    #[test]
    fn empty_tuple_depth_zero_is_empty_table() {
        let s = System::lift(&Structure::linear_order(3), LiftMode::Sim);
        let t = th(&s, &[], 0, 0).unwrap();
        assert_eq!(t.encode().as_ref(), "[0,0,0,\"\"]");
    }

    #[test]
    fn small_orders() {
        let one = sentence_theory(&Structure::linear_order(1), 1);
        let two = sentence_theory(&Structure::linear_order(2), 1);
        assert_eq!(one, two);
        let t2 = sentence_theory(&Structure::linear_order(2), 2);
        let t3 = sentence_theory(&Structure::linear_order(3), 2);
        assert_ne!(t2, t3);
        assert_eq!(sentence_theory(&Structure::linear_order(3), 2), sentence_theory(&Structure::linear_order(4), 2));
    }

    #[test]
    fn out_of_range_is_reported() {
        let m = Structure::linear_order(2);
        assert_eq!(th(&m, &[2], 1, 0), Err(TheoryError::OutOfRange(2)));
    }

    #[test]
    fn encoding_is_stable_text() {
        let t = sentence_theory(&Structure::linear_order(1), 1);
        assert_eq!(t.encode().as_ref(), "[1,0,0,[[0,0,1,\"0\"]]]");
    }
}
