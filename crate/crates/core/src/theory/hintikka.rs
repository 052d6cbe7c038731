//! Characteristic (Hintikka) formulas of theories.

use super::intern::Theory;
use super::schema::{get_bit, leaf_bits, Atom, Side, Signature};
use crate::logic::{Formula, Var};

fn atom_formula(sig: &Signature, atom: &Atom) -> Formula {
    let v = |p: u8| p as Var;
    let rel = |name: &str, is_order: bool, args: &[u8]| {
        if is_order {
            Formula::lt(v(args[0]), v(args[1]))
        } else {
            Formula::rel(name, &args.iter().map(|&a| v(a)).collect::<Vec<_>>())
        }
    };
    match (sig, atom) {
        (Signature::Model(voc), Atom::Rel { sym, args, .. }) => {
            let s = *sym as usize;
            rel(voc.name(s), voc.is_order(s), args)
        }
        (Signature::System(m, i), Atom::Rel { side, sym, args }) => {
            let (voc, other) = if *side == Side::M { (m, i) } else { (i, m) };
            let s = *sym as usize;
            let base = rel(voc.name(s), voc.is_order(s), args);
            // the same name may be interpreted on the other side too; pin the sort
            let shared = if voc.is_order(s) { other.order_symbol().is_some() } else { other.index_of(voc.name(s)).is_some() };
            if shared {
                let sort = Formula::InM(v(args[0]));
                base.and(if *side == Side::M { sort } else { sort.not() })
            } else {
                base
            }
        }
        (_, Atom::InM(a)) => Formula::InM(v(*a)),
        (_, Atom::Eq(a, b)) => Formula::eq(v(*a), v(*b)),
        (_, Atom::H(a, b)) => Formula::H(v(*a), v(*b)),
        (_, Atom::Dist(a, b, k)) => Formula::Dist { a: v(*a), b: v(*b), k: *k },
    }
}

/// A formula of the same depth as `t` that holds at a tuple exactly when
/// the tuple's theory (at `t`'s depth and radius) is `t`.
pub fn characteristic_formula(t: Theory) -> Formula {
    if t.depth() == 0 {
        let (sig, radius, arity, bits) = leaf_bits(t);
        let schema = sig.schema(arity, radius);
        let signature = sig.signature();
        return Formula::conj(schema.atoms.iter().enumerate().map(|(i, a)| {
            let f = atom_formula(&signature, a);
            if get_bit(&bits, i) {
                f
            } else {
                f.not()
            }
        }));
    }
    let x = t.arity() as Var;
    let parts: Vec<Formula> = t.members().iter().map(|&s| characteristic_formula(s)).collect();
    let each = parts.iter().cloned().map(|p| Formula::exists(x, p));
    let all = Formula::forall(x, Formula::disj(parts.iter().cloned()));
    Formula::conj(each.chain(std::iter::once(all)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{eval, eval_sentence};
    use crate::structure::{Structure, Vocabulary};
    use crate::theory::th::{sentence_theory, th};
    use std::collections::BTreeMap;
    use std::sync::Arc;

    #[test]
    fn isolated_vertex_table() {
        let v = Arc::new(Vocabulary::from_pairs(&[("R", 2)], None));
        let m = Structure::empty_relations(v, 1);
        let f = characteristic_formula(th(&m, &[0], 0, 0).unwrap());
        assert_eq!(f, Formula::rel("R", &[0, 0]).not());
        assert!(eval(&m, &f, &BTreeMap::from([(0, 0)])).unwrap());
    }

    #[test]
    fn self_satisfaction_and_separation() {
        let m3 = Structure::linear_order(3);
        let m2 = Structure::linear_order(2);
        let f = characteristic_formula(sentence_theory(&m3, 2));
        assert_eq!(f.depth(), 2);
        assert!(eval_sentence(&m3, &f).unwrap());
        assert!(!eval_sentence(&m2, &f).unwrap());
        assert!(eval_sentence(&Structure::linear_order(7), &f).unwrap());
    }
}
