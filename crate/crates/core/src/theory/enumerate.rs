//! Enumeration of the formally possible depth-0 theories.

use super::intern::Theory;
use super::schema::{get_bit, leaf, project_leaf, Atom, SigId};
use super::th::TheoryError;

/// Largest atom count accepted by [`enumerate_th0`].
pub const ATOM_GUARD: usize = 22;

fn consistent(sig: SigId, arity: u32, radius: u32, bits: &[u64]) -> bool {
    let schema = sig.schema(arity, radius);
    let bit = |a: &Atom| match schema.lookup(a) {
        super::schema::Lookup::Bit(i) => get_bit(bits, i),
        super::schema::Lookup::NotBit(i) => !get_bit(bits, i),
        super::schema::Lookup::Const(b) => b,
    };
    let is_system = sig.is_system();
    let in_m = |p: u8| !is_system || bit(&Atom::InM(p));
    for (i, atom) in schema.atoms.iter().enumerate() {
        if !get_bit(bits, i) {
            continue;
        }
        let ok = match atom {
            Atom::Rel { side, args, .. } => match side {
                super::schema::Side::M => args.iter().all(|&a| in_m(a)),
                super::schema::Side::I => args.iter().all(|&a| !in_m(a)),
                super::schema::Side::Plain => true,
            },
            Atom::Eq(a, b) => in_m(*a) == in_m(*b),
            Atom::H(a, b) => {
                !in_m(*b) && (in_m(*a) || bit(&Atom::Eq(*a, *b))) && bit(&Atom::Dist(*a, *b, 0))
            }
            Atom::Dist(a, b, k) => *k == radius || bit(&Atom::Dist(*a, *b, k + 1)),
            Atom::InM(_) => true,
        };
        if !ok {
            return false;
        }
    }
    // equal positions must be interchangeable; this also yields transitivity
    let t = leaf(sig, radius, arity, bits.to_vec());
    for i in 0..arity as u8 {
        for j in i + 1..arity as u8 {
            if bit(&Atom::Eq(i, j)) {
                if is_system && !bit(&Atom::Dist(i, j, 0)) {
                    return false;
                }
                let proj: Vec<u32> = (0..arity).map(|p| if p == j as u32 { i as u32 } else { p }).collect();
                if project_leaf(t, &proj, radius) != t {
                    return false;
                }
            }
        }
    }
    // h(x) is a single index element
    if is_system {
        for a in 0..arity as u8 {
            for b in 0..arity as u8 {
                for c in b + 1..arity as u8 {
                    if a != b && a != c && bit(&Atom::H(a, b)) && bit(&Atom::H(a, c)) && !bit(&Atom::Eq(b, c)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Every depth-0 table over `sig` at the given arity and radius that is
/// syntactically coherent: equality is a congruence that respects sorts,
/// relational atoms respect sorts, `h` lands in the index sort, and distance
/// atoms are monotone in the threshold and true between equal points.
pub fn enumerate_th0(sig: SigId, arity: u32, radius: u32) -> Result<Vec<Theory>, TheoryError> {
    let schema = sig.schema(arity, radius);
    let n = schema.len();
    if n > ATOM_GUARD {
        return Err(TheoryError::Guard(format!("{n} atoms exceed the limit of {ATOM_GUARD}")));
    }
    let mut out = Vec::new();
    for mask in 0u64..1 << n {
        let bits = vec![mask];
        if consistent(sig, arity, radius, &bits) {
            out.push(leaf(sig, radius, arity, bits));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Vocabulary;
    use crate::theory::schema::Signature;

    #[test]
    fn counts() {
        let r = Signature::model(&Vocabulary::from_pairs(&[("R", 2)], None));
        assert_eq!(enumerate_th0(r, 0, 0).unwrap().len(), 1);
        assert_eq!(enumerate_th0(r, 1, 0).unwrap().len(), 2);
        // two positions: either distinct (16 tables) or equal (2 tables)
        assert_eq!(enumerate_th0(r, 2, 0).unwrap().len(), 18);
    }

    #[test]
    fn distance_tables_are_monotone() {
        let e = Vocabulary::empty();
        let sig = Signature::system(&e, &e);
        let all = enumerate_th0(sig, 2, 1).unwrap();
        let schema = sig.schema(2, 1);
        let d0 = schema.atoms.iter().position(|a| *a == Atom::Dist(0, 1, 0)).unwrap();
        let d1 = schema.atoms.iter().position(|a| *a == Atom::Dist(0, 1, 1)).unwrap();
        for t in &all {
            let (_, _, _, bits) = crate::theory::schema::leaf_bits(*t);
            assert!(!(get_bit(&bits, d0) && !get_bit(&bits, d1)));
        }
        assert!(!all.is_empty());
    }

    #[test]
    fn guard() {
        let r = Signature::model(&Vocabulary::from_pairs(&[("R", 3)], None));
        assert!(matches!(enumerate_th0(r, 3, 0), Err(TheoryError::Guard(_))));
    }
}
