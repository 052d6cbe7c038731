//! Reading truth values of formulas off a theory, without a model.

use super::intern::{Node, Theory};
use super::schema::{read, Atom, SigId, Side, Signature};
use super::th::TheoryError;
use crate::logic::{Formula, Term};

/// How a predicate name maps onto schema symbols.
#[derive(Clone, Copy)]
struct Resolved {
    plain: Option<u16>,
    m: Option<u16>,
    i: Option<u16>,
}

fn resolve(sig: &Signature, name: &str) -> Option<Resolved> {
    let r = match sig {
        Signature::Model(v) => Resolved { plain: v.index_of(name).map(|s| s as u16), m: None, i: None },
        Signature::System(m, i) => Resolved {
            plain: None,
            m: m.index_of(name).map(|s| s as u16),
            i: i.index_of(name).map(|s| s as u16),
        },
    };
    (r.plain.is_some() || r.m.is_some() || r.i.is_some()).then_some(r)
}

fn resolve_order(sig: &Signature) -> Resolved {
    match sig {
        Signature::Model(v) => Resolved { plain: v.order_symbol().map(|s| s as u16), m: None, i: None },
        Signature::System(m, i) => Resolved {
            plain: None,
            m: m.order_symbol().map(|s| s as u16),
            i: i.order_symbol().map(|s| s as u16),
        },
    }
}

struct Ctx {
    sig: SigId,
    signature: Signature,
    env: Vec<Option<u8>>,
}

impl Ctx {
    fn rel(&self, t: Theory, r: Resolved, args: Box<[u8]>) -> bool {
        let node = t.base().node();
        let Node::Leaf { radius, arity, bits, .. } = &*node else { unreachable!() };
        let schema = self.sig.schema(*arity, *radius);
        let hit = |side, sym: Option<u16>| {
            sym.is_some_and(|sym| read(bits, schema.lookup(&Atom::Rel { side, sym, args: args.clone() })))
        };
        hit(Side::Plain, r.plain) || hit(Side::M, r.m) || hit(Side::I, r.i)
    }

    fn atom(&self, t: Theory, a: Atom) -> bool {
        let node = t.base().node();
        let Node::Leaf { radius, arity, bits, .. } = &*node else { unreachable!() };
        read(bits, self.sig.schema(*arity, *radius).lookup(&a))
    }

    fn pos(&self, v: u32) -> u8 {
        self.env[v as usize].expect("variables are checked before evaluation")
    }

    fn term(&self, t: &Term) -> u8 {
        match t {
            Term::Var(v) => self.pos(*v),
            Term::Num(_) => unreachable!("numerals are rejected before evaluation"),
        }
    }

    fn eval(&mut self, t: Theory, f: &Formula) -> bool {
        match f {
            Formula::Const(b) => *b,
            Formula::Rel { name, args } => {
                let r = resolve(&self.signature, name).expect("predicates are checked before evaluation");
                let args = args.iter().map(|&v| self.pos(v)).collect();
                self.rel(t, r, args)
            }
            Formula::Lt(a, b) => {
                let args = Box::new([self.term(a), self.term(b)]);
                self.rel(t, resolve_order(&self.signature), args)
            }
            Formula::Eq(a, b) => self.atom(t, Atom::Eq(self.term(a), self.term(b))),
            Formula::InM(a) => self.atom(t, Atom::InM(self.pos(*a))),
            Formula::H(a, b) => self.atom(t, Atom::H(self.pos(*a), self.pos(*b))),
            Formula::Dist { a, b, k } => self.atom(t, Atom::Dist(self.pos(*a), self.pos(*b), *k)),
            Formula::Not(a) => !self.eval(t, a),
            Formula::And(a, b) => self.eval(t, a) && self.eval(t, b),
            Formula::Or(a, b) => self.eval(t, a) || self.eval(t, b),
            Formula::Implies(a, b) => !self.eval(t, a) || self.eval(t, b),
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let want = matches!(f, Formula::Exists(..));
                let saved = self.env[*v as usize];
                self.env[*v as usize] = Some(t.arity() as u8);
                let found = t.members().iter().any(|&s| self.eval(s, a) == want);
                self.env[*v as usize] = saved;
                if want {
                    found
                } else {
                    !found
                }
            }
        }
    }
}

/// The truth value of `f` at any tuple realizing `t`, with `x_i` read as
/// position `i`.
pub fn truth_from_theory(t: Theory, f: &Formula) -> Result<bool, TheoryError> {
    let (need, have) = (f.depth(), t.depth());
    if need > have {
        return Err(TheoryError::DepthTooSmall { need, have });
    }
    if let Some(k) = f.max_dist() {
        if k > t.radius() {
            return Err(TheoryError::RadiusTooSmall { need: k, have: t.radius() });
        }
    }
    if f.has_numerals() {
        return Err(TheoryError::Numeral);
    }
    if let Some(&v) = f.free_vars().iter().find(|&&v| v >= t.arity()) {
        return Err(TheoryError::FreeVariable(v));
    }
    let sig = t.sig();
    let signature = sig.signature();
    let mut bad = None;
    f.visit(&mut |g| match g {
        Formula::Rel { name, .. } if resolve(&signature, name).is_none() => {
            bad.get_or_insert(TheoryError::UnknownPredicate(name.clone()));
        }
        Formula::InM(_) | Formula::H(..) | Formula::Dist { .. } if matches!(signature, Signature::Model(_)) => {
            bad.get_or_insert(TheoryError::SystemAtom("inM/h/dist"));
        }
        _ => {}
    });
    if let Some(e) = bad {
        return Err(e);
    }
    let width = f.all_vars().into_iter().max().map_or(0, |v| v as usize + 1).max(t.arity() as usize);
    let mut env = vec![None; width];
    for (p, slot) in env.iter_mut().enumerate().take(t.arity() as usize) {
        *slot = Some(p as u8);
    }
    Ok(Ctx { sig, signature, env }.eval(t, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{catalog, parse};
    use crate::structure::{Structure, Vocabulary};
    use crate::theory::th::{sentence_theory, th};
    use std::sync::Arc;

    #[test]
    fn psi0_on_an_order() {
        let m = Structure::empty_relations(Arc::new(Vocabulary::graph_order()), 5);
        let t = sentence_theory(&m, 3);
        assert!(truth_from_theory(t, &catalog::lookup("psi0").unwrap()).unwrap());
    }

    #[test]
    fn preconditions() {
        let m = Structure::linear_order(3);
        let t = th(&m, &[1], 0, 0).unwrap();
        assert!(truth_from_theory(t, &parse("x0=x0", m.vocab()).unwrap()).unwrap());
        let deep = parse("E x1. x0<x1", m.vocab()).unwrap();
        assert_eq!(truth_from_theory(t, &deep), Err(TheoryError::DepthTooSmall { need: 1, have: 0 }));
        let t1 = th(&m, &[1], 1, 0).unwrap();
        assert!(truth_from_theory(t1, &deep).unwrap());
        assert_eq!(truth_from_theory(t1, &parse("x0<x1", m.vocab()).unwrap()), Err(TheoryError::FreeVariable(1)));
    }
}
