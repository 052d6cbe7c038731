//! Brute-force Tarski evaluation over structures and systems.

use std::collections::BTreeMap;

use thiserror::Error;

use super::formula::{Formula, Term, Var};
use crate::structure::Structure;
use crate::system::{Sort, System};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("free variable x{0} is unassigned")]
    Unassigned(Var),
    #[error("assigned element {0} is outside the universe")]
    OutOfRange(usize),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("atom `{0}` is not meaningful in a plain structure")]
    SystemAtom(&'static str),
}

/// Something formulas can be evaluated in.
pub trait Interpretation {
    /// Opaque resolved handle of a predicate name.
    type Pred: Copy;

    fn universe(&self) -> usize;
    fn resolve(&self, name: &str) -> Option<Self::Pred>;
    fn holds(&self, p: Self::Pred, args: &[usize]) -> bool;
    fn less(&self, a: usize, b: usize) -> bool;

    fn in_m(&self, _x: usize) -> Option<bool> {
        None
    }
    fn h_is(&self, _x: usize, _y: usize) -> Option<bool> {
        None
    }
    fn dist_le(&self, _x: usize, _y: usize, _k: u32) -> Option<bool> {
        None
    }
}

impl Interpretation for Structure {
    type Pred = usize;

    fn universe(&self) -> usize {
        self.size()
    }

    fn resolve(&self, name: &str) -> Option<usize> {
        self.vocab().index_of(name)
    }

    fn holds(&self, p: usize, args: &[usize]) -> bool {
        Structure::holds(self, p, args)
    }

    fn less(&self, a: usize, b: usize) -> bool {
        self.vocab().order_symbol().is_some() && a < b
    }
}

/// A predicate name may be interpreted on the M-side, the I-side, or both.
#[derive(Debug, Clone, Copy)]
pub struct SysPred {
    m: Option<usize>,
    i: Option<usize>,
}

impl Interpretation for System {
    type Pred = SysPred;

    fn universe(&self) -> usize {
        System::universe(self)
    }

    fn resolve(&self, name: &str) -> Option<SysPred> {
        let p = SysPred { m: self.m_part().vocab().index_of(name), i: self.i_part().vocab().index_of(name) };
        (p.m.is_some() || p.i.is_some()).then_some(p)
    }

    fn holds(&self, p: SysPred, args: &[usize]) -> bool {
        let nm = self.m_size();
        if args.iter().all(|&x| x < nm) {
            p.m.is_some_and(|s| self.m_part().holds(s, args))
        } else if args.iter().all(|&x| x >= nm) {
            let local: Vec<usize> = args.iter().map(|&x| x - nm).collect();
            p.i.is_some_and(|s| self.i_part().holds(s, &local))
        } else {
            false
        }
    }

    fn less(&self, a: usize, b: usize) -> bool {
        match (self.sort(a), self.sort(b)) {
            (Sort::M, Sort::M) => self.m_part().vocab().order_symbol().is_some() && a < b,
            (Sort::I, Sort::I) => self.i_part().vocab().order_symbol().is_some() && a < b,
            _ => false,
        }
    }

    fn in_m(&self, x: usize) -> Option<bool> {
        Some(self.sort(x) == Sort::M)
    }

    fn h_is(&self, x: usize, y: usize) -> Option<bool> {
        Some(self.sort(y) == Sort::I && self.h(x) == self.h(y))
    }

    fn dist_le(&self, x: usize, y: usize, k: u32) -> Option<bool> {
        Some(self.dist(x, y).within(k))
    }
}

/// A formula with predicate names resolved against one interpretation.
enum Compiled<P> {
    Const(bool),
    Rel(P, Vec<usize>),
    Lt(Term, Term),
    Eq(Term, Term),
    InM(usize),
    H(usize, usize),
    Dist(usize, usize, u32),
    Not(Box<Compiled<P>>),
    And(Box<Compiled<P>>, Box<Compiled<P>>),
    Or(Box<Compiled<P>>, Box<Compiled<P>>),
    Implies(Box<Compiled<P>>, Box<Compiled<P>>),
    Exists(usize, Box<Compiled<P>>),
    Forall(usize, Box<Compiled<P>>),
}

fn compile<I: Interpretation>(m: &I, f: &Formula) -> Result<Compiled<I::Pred>, EvalError> {
    let b = |g: &Formula| compile(m, g).map(Box::new);
    Ok(match f {
        Formula::Const(v) => Compiled::Const(*v),
        Formula::Rel { name, args } => {
            let p = m.resolve(name).ok_or_else(|| EvalError::UnknownPredicate(name.clone()))?;
            Compiled::Rel(p, args.iter().map(|&v| v as usize).collect())
        }
        Formula::Lt(a, c) => Compiled::Lt(*a, *c),
        Formula::Eq(a, c) => Compiled::Eq(*a, *c),
        Formula::InM(a) => Compiled::InM(*a as usize),
        Formula::H(a, c) => Compiled::H(*a as usize, *c as usize),
        Formula::Dist { a, b: c, k } => Compiled::Dist(*a as usize, *c as usize, *k),
        Formula::Not(a) => Compiled::Not(b(a)?),
        Formula::And(a, c) => Compiled::And(b(a)?, b(c)?),
        Formula::Or(a, c) => Compiled::Or(b(a)?, b(c)?),
        Formula::Implies(a, c) => Compiled::Implies(b(a)?, b(c)?),
        Formula::Exists(v, a) => Compiled::Exists(*v as usize, b(a)?),
        Formula::Forall(v, a) => Compiled::Forall(*v as usize, b(a)?),
    })
}

struct Run<'a, I: Interpretation> {
    m: &'a I,
    env: Vec<usize>,
    args: Vec<usize>,
}

impl<I: Interpretation> Run<'_, I> {
    #[inline]
    fn term(&self, t: Term) -> usize {
        match t {
            Term::Var(v) => self.env[v as usize],
            Term::Num(k) => k as usize,
        }
    }

    fn go(&mut self, f: &Compiled<I::Pred>) -> Result<bool, EvalError> {
        Ok(match f {
            Compiled::Const(v) => *v,
            Compiled::Rel(p, vars) => {
                self.args.clear();
                for &v in vars {
                    let x = self.env[v];
                    self.args.push(x);
                }
                self.m.holds(*p, &self.args)
            }
            Compiled::Lt(a, b) => match (a, b) {
                (Term::Var(_), Term::Var(_)) => self.m.less(self.term(*a), self.term(*b)),
                _ => self.term(*a) < self.term(*b),
            },
            Compiled::Eq(a, b) => self.term(*a) == self.term(*b),
            Compiled::InM(a) => self.m.in_m(self.env[*a]).ok_or(EvalError::SystemAtom("inM"))?,
            Compiled::H(a, b) => self.m.h_is(self.env[*a], self.env[*b]).ok_or(EvalError::SystemAtom("h"))?,
            Compiled::Dist(a, b, k) => {
                self.m.dist_le(self.env[*a], self.env[*b], *k).ok_or(EvalError::SystemAtom("dist"))?
            }
            Compiled::Not(a) => !self.go(a)?,
            Compiled::And(a, b) => self.go(a)? && self.go(b)?,
            Compiled::Or(a, b) => self.go(a)? || self.go(b)?,
            Compiled::Implies(a, b) => !self.go(a)? || self.go(b)?,
            Compiled::Exists(v, a) | Compiled::Forall(v, a) => {
                let want = matches!(f, Compiled::Exists(..));
                let saved = self.env[*v];
                let mut result = !want;
                for x in 0..self.m.universe() {
                    self.env[*v] = x;
                    if self.go(a)? == want {
                        result = want;
                        break;
                    }
                }
                self.env[*v] = saved;
                result
            }
        })
    }
}

/// A formula compiled once and evaluated many times in one interpretation.
pub struct Evaluator<'a, I: Interpretation> {
    m: &'a I,
    compiled: Compiled<I::Pred>,
    free: Vec<Var>,
    width: usize,
}

impl<'a, I: Interpretation> Evaluator<'a, I> {
    pub fn new(m: &'a I, f: &Formula) -> Result<Self, EvalError> {
        let width = f.all_vars().into_iter().max().map_or(0, |v| v as usize + 1);
        Ok(Evaluator { m, compiled: compile(m, f)?, free: f.free_vars().into_iter().collect(), width })
    }

    pub fn eval(&self, assignment: &BTreeMap<Var, usize>) -> Result<bool, EvalError> {
        let mut env = vec![0; self.width];
        for &v in &self.free {
            let x = *assignment.get(&v).ok_or(EvalError::Unassigned(v))?;
            if x >= self.m.universe() {
                return Err(EvalError::OutOfRange(x));
            }
            env[v as usize] = x;
        }
        Run { m: self.m, env, args: Vec::new() }.go(&self.compiled)
    }

    /// Evaluates with `x_i ↦ tuple[i]`.
    pub fn eval_tuple(&self, tuple: &[usize]) -> Result<bool, EvalError> {
        let a = tuple.iter().enumerate().map(|(i, &x)| (i as Var, x)).collect();
        self.eval(&a)
    }
}

/// Evaluates `f` in `m` under `assignment`.
pub fn eval<I: Interpretation>(m: &I, f: &Formula, assignment: &BTreeMap<Var, usize>) -> Result<bool, EvalError> {
    Evaluator::new(m, f)?.eval(assignment)
}

/// Evaluates a sentence.
pub fn eval_sentence<I: Interpretation>(m: &I, f: &Formula) -> Result<bool, EvalError> {
    eval(m, f, &BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse::parse;
    use crate::structure::Vocabulary;
    use crate::system::LiftMode;
    use std::sync::Arc;

    fn one_edge() -> Structure {
        let v = Arc::new(Vocabulary::graph_order());
        let r = v.index_of("R").unwrap();
        Structure::from_indexed(v, 2, vec![(r, vec![0, 1]), (r, vec![1, 0])]).unwrap()
    }

    #[test]
    fn atoms_and_assignments() {
        let m = one_edge();
        let f = parse("R(x0,x1)", m.vocab()).unwrap();
        let a: BTreeMap<_, _> = [(0, 0), (1, 1)].into();
        assert!(eval(&m, &f, &a).unwrap());
        assert_eq!(eval(&m, &f, &[(0, 0)].into()), Err(EvalError::Unassigned(1)));
        assert!(eval(&m, &parse("x0=x0", m.vocab()).unwrap(), &[(0, 1)].into()).unwrap());
    }

    #[test]
    fn literal_psi0_has_the_least_element_as_witness() {
        let m = Structure::empty_relations(Arc::new(Vocabulary::graph_order()), 3);
        let f = parse("E x0. A x1. A x2. ((x1<x0 & ~(x2<x0)) -> ~R(x1,x2))", m.vocab()).unwrap();
        assert!(eval_sentence(&m, &f).unwrap());
        assert!(eval_sentence(&one_edge(), &f).unwrap());
    }

    #[test]
    fn numerals_compare_as_positions() {
        let m = Structure::linear_order(4);
        let f = parse("E x0. (#1<x0 & x0<#3)", m.vocab()).unwrap();
        assert!(eval_sentence(&m, &f).unwrap());
        let g = parse("E x0. #3<x0", m.vocab()).unwrap();
        assert!(!eval_sentence(&m, &g).unwrap());
    }

    #[test]
    fn system_atoms_follow_sorts() {
        let s = System::lift(&one_edge(), LiftMode::Dis);
        let f = crate::logic::parse::parse_unchecked("E x1. (h(x0)=x1 & ~inM(x1) & R(x0,x0))").unwrap();
        assert!(!eval(&s, &f, &[(0, 0)].into()).unwrap());
        let g = crate::logic::parse::parse_unchecked("E x1. E x2. (inM(x1) & ~inM(x2) & R(x1,x2))").unwrap();
        assert!(!eval_sentence(&s, &g).unwrap());
        let d = crate::logic::parse::parse_unchecked("A x0. A x1. dist(x0,x1)<=1").unwrap();
        assert!(eval_sentence(&s, &d).unwrap());
        assert_eq!(eval_sentence(&one_edge(), &d), Err(EvalError::SystemAtom("dist")));
    }
}
