//! Theories of ordered sums computed from the theories of the summands.
//!
//! For `M = M₁ + M₂` every element of `M₁` lies below every element of `M₂`
//! and no other relation crosses the seam. A depth-0 table of a tuple split
//! between the two sides is therefore fixed by the two local tables, and one
//! more quantifier is a choice of side for the new point.

pub mod star;

use std::collections::HashMap;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;

use crate::structure::{ordered_sum, Structure, Vocabulary};
use crate::theory::intern::{canonical_set, intern, Node};
use crate::theory::schema::{leaf, read, set_bit, Atom, Signature};
use crate::theory::{reduce_depth, sentence_theory, th, Theory, TheoryError};

/// Which summand a tuple position lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    Left,
    Right,
}

/// Global tuple positions mapped to `(summand, local position)`.
pub type Pattern = Vec<(Part, u32)>;

fn check_pattern(p: &[(Part, u32)], m1: u32, m2: u32) -> Result<(), TheoryError> {
    let mut seen = [vec![false; m1 as usize], vec![false; m2 as usize]];
    for &(side, pos) in p {
        let slot = seen[side as usize].get_mut(pos as usize).ok_or_else(|| TheoryError::Mismatch(format!("pattern position {pos} out of range")))?;
        if *slot {
            return Err(TheoryError::Mismatch(format!("pattern uses {side:?} {pos} twice")));
        }
        *slot = true;
    }
    if seen.iter().flatten().all(|&b| b) {
        Ok(())
    } else {
        Err(TheoryError::Mismatch("pattern does not cover every local position".into()))
    }
}

type Key = (Theory, Theory, Box<[(Part, u32)]>);

static CACHE: Lazy<RwLock<HashMap<Key, Theory>>> = Lazy::new(Default::default);

fn combine_leaves(l: Theory, r: Theory, pattern: &[(Part, u32)]) -> Theory {
    let (sig, _, la, lbits) = crate::theory::schema::leaf_bits(l);
    let (_, _, ra, rbits) = crate::theory::schema::leaf_bits(r);
    let Signature::Model(vocab) = sig.signature() else { unreachable!("checked by oplus") };
    let order = vocab.order_symbol();
    let (ls, rs) = (sig.schema(la, 0), sig.schema(ra, 0));
    let dst = sig.schema(pattern.len() as u32, 0);
    let mut bits = vec![0u64; dst.words()];
    let local = |p: u8| pattern[p as usize];
    let value = |side: Part, atom: &Atom| match side {
        Part::Left => read(&lbits, ls.lookup(atom)),
        Part::Right => read(&rbits, rs.lookup(atom)),
    };
    for (i, atom) in dst.atoms.iter().enumerate() {
        let v = match atom {
            Atom::Rel { side, sym, args } => {
                let first = local(args[0]).0;
                if args.iter().all(|&a| local(a).0 == first) {
                    let moved = Atom::Rel { side: *side, sym: *sym, args: args.iter().map(|&a| local(a).1 as u8).collect() };
                    value(first, &moved)
                } else {
                    Some(*sym as usize) == order && local(args[0]).0 == Part::Left && local(args[1]).0 == Part::Right
                }
            }
            Atom::Eq(a, b) => {
                let ((sa, pa), (sb, pb)) = (local(*a), local(*b));
                sa == sb && value(sa, &Atom::Eq(pa as u8, pb as u8))
            }
            _ => unreachable!("plain schemas have no system atoms"),
        };
        if v {
            set_bit(&mut bits, i);
        }
    }
    leaf(sig, 0, pattern.len() as u32, bits)
}

fn go(l: Theory, r: Theory, pattern: &[(Part, u32)]) -> Theory {
    let key = (l, r, pattern.into());
    if let Some(&hit) = CACHE.read().get(&key) {
        return hit;
    }
    let depth = l.depth();
    let base = combine_leaves(l.base(), r.base(), pattern);
    let out = if depth == 0 {
        base
    } else {
        let (lr, rr) = (reduce_depth(l, depth - 1), reduce_depth(r, depth - 1));
        let mut members = Vec::new();
        let mut ext = pattern.to_vec();
        ext.push((Part::Left, l.arity()));
        members.extend(l.members().iter().map(|&s| go(s, rr, &ext)));
        ext.pop();
        ext.push((Part::Right, r.arity()));
        members.extend(r.members().iter().map(|&s| go(lr, s, &ext)));
        intern(Node::Set { sig: l.sig(), depth, radius: 0, arity: pattern.len() as u32, base, members: canonical_set(members) })
    };
    CACHE.write().insert(key, out);
    out
}

/// The theory of an interleaved tuple in `M₁ + M₂`, given positioned theories
/// of its two parts. `pattern[g]` says where global position `g` lives.
pub fn oplus(t1: Theory, t2: Theory, pattern: &[(Part, u32)]) -> Result<Theory, TheoryError> {
    if t1.depth() != t2.depth() {
        return Err(TheoryError::Mismatch(format!("depths {} and {}", t1.depth(), t2.depth())));
    }
    if t1.sig() != t2.sig() {
        return Err(TheoryError::Mismatch("vocabularies differ".into()));
    }
    if t1.sig().is_system() || t1.radius() != 0 || t2.radius() != 0 {
        return Err(TheoryError::Mismatch("composition needs plain-model theories".into()));
    }
    check_pattern(pattern, t1.arity(), t2.arity())?;
    Ok(go(t1, t2, pattern))
}

/// Sentence version of [`oplus`].
pub fn oplus_sentences(t1: Theory, t2: Theory) -> Result<Theory, TheoryError> {
    oplus(t1, t2, &[])
}

/// Left fold of [`oplus`] over sentence theories.
pub fn sum_theory(parts: &[Theory]) -> Result<Theory, TheoryError> {
    let (&first, rest) = parts.split_first().ok_or_else(|| TheoryError::Mismatch("empty sum".into()))?;
    if first.arity() != 0 {
        return Err(TheoryError::Mismatch("sum_theory takes sentence theories".into()));
    }
    rest.iter().try_fold(first, |acc, &t| oplus_sentences(acc, t))
}

/// [`sum_theory`], returning the theory of the empty structure for an empty list.
pub fn sum_theory_or_empty(vocab: &Arc<Vocabulary>, parts: &[Theory], depth: u32) -> Result<Theory, TheoryError> {
    if parts.is_empty() {
        return Ok(empty_theory(vocab, depth));
    }
    sum_theory(parts)
}

/// Sentence theory of the empty structure.
pub fn empty_theory(vocab: &Arc<Vocabulary>, depth: u32) -> Theory {
    sentence_theory(&Structure::empty_relations(vocab.clone(), 0), depth)
}

/// `th^d((n,<))`. Orders of size at least `2^d` are indistinguishable at
/// depth `d`, so the computation runs on at most `2^d` points.
pub fn order_theory(n: usize, d: u32) -> Theory {
    let cap = 1usize.checked_shl(d).unwrap_or(usize::MAX);
    let t = sentence_theory(&Structure::linear_order(n.min(cap)), d);
    debug_assert!(n < cap || d > 4 || t == sentence_theory(&Structure::linear_order(n.min(cap + 1)), d));
    t
}

/// Theory of `⟨a_0, …⟩` in a sum computed directly, for cross-checking.
pub fn direct_sum_theory(parts: &[Structure], tuple: &[usize], depth: u32) -> Result<Theory, TheoryError> {
    let sum = ordered_sum(parts).map_err(|e| TheoryError::Mismatch(e.to_string()))?;
    th(&sum, tuple, depth, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_add() {
        for d in 0..=3 {
            let sum = oplus_sentences(sentence_theory(&Structure::linear_order(2), d), sentence_theory(&Structure::linear_order(3), d)).unwrap();
            assert_eq!(sum, sentence_theory(&Structure::linear_order(5), d));
        }
    }

    #[test]
    fn empty_is_neutral() {
        let v = Arc::new(Vocabulary::order_only());
        let t = sentence_theory(&Structure::linear_order(3), 2);
        let e = empty_theory(&v, 2);
        assert_eq!(oplus_sentences(t, e).unwrap(), t);
        assert_eq!(oplus_sentences(e, t).unwrap(), t);
        assert_eq!(sum_theory_or_empty(&v, &[], 2).unwrap(), e);
    }

    #[test]
    fn folds_of_points() {
        let one = sentence_theory(&Structure::linear_order(1), 2);
        for k in 1..6 {
            assert_eq!(sum_theory(&vec![one; k]).unwrap(), sentence_theory(&Structure::linear_order(k), 2));
        }
        assert!(sum_theory(&[]).is_err());
    }

    #[test]
    fn order_collapse() {
        assert_eq!(order_theory(10, 2), order_theory(4, 2));
        assert_eq!(order_theory(3, 2), order_theory(4, 2));
        assert_ne!(order_theory(2, 2), order_theory(3, 2));
        assert_eq!(order_theory(1, 0), order_theory(7, 0));
    }

    #[test]
    fn positioned_pair() {
        let a = Structure::linear_order(2);
        let b = Structure::linear_order(3);
        let ta = th(&a, &[1], 2, 0).unwrap();
        let tb = th(&b, &[0], 2, 0).unwrap();
        let got = oplus(ta, tb, &[(Part::Right, 0), (Part::Left, 0)]).unwrap();
        assert_eq!(got, direct_sum_theory(&[a, b], &[2, 1], 2).unwrap());
        assert!(oplus(ta, tb, &[(Part::Left, 0)]).is_err());
    }
}
