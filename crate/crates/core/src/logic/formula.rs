use std::collections::BTreeSet;
use std::fmt;

pub type Var = u32;

/// A term in an order or equality atom: a variable, or a numeral naming the
/// element with that index. Numerals only make sense in structures whose
/// universe is `0..n` with the natural order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Num(u32),
}

impl Term {
    pub fn var(self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Num(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "x{v}"),
            Term::Num(k) => write!(f, "#{k}"),
        }
    }
}

/// First-order formulas over a relational vocabulary, with the system atoms
/// `inM(x)`, `h(x)=y` and `dist(x,y)<=k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Const(bool),
    Rel { name: String, args: Vec<Var> },
    Lt(Term, Term),
    Eq(Term, Term),
    InM(Var),
    H(Var, Var),
    Dist { a: Var, b: Var, k: u32 },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
}

impl Formula {
    pub fn rel(name: &str, args: &[Var]) -> Formula {
        Formula::Rel { name: name.to_string(), args: args.to_vec() }
    }

    pub fn lt(a: Var, b: Var) -> Formula {
        Formula::Lt(Term::Var(a), Term::Var(b))
    }

    pub fn eq(a: Var, b: Var) -> Formula {
        Formula::Eq(Term::Var(a), Term::Var(b))
    }

    /// `a ≤ b`, encoded as `¬(b < a)`.
    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Lt(b, a).not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Forall(v, Box::new(body))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::Const(true))
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::or).unwrap_or(Formula::Const(false))
    }

    /// Quantifier depth.
    pub fn depth(&self) -> u32 {
        match self {
            Formula::Not(a) => a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.depth().max(b.depth()),
            Formula::Exists(_, a) | Formula::Forall(_, a) => a.depth() + 1,
            _ => 0,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut add = |v: Var, bound: &Vec<Var>| {
            if !bound.contains(&v) {
                out.insert(v);
            }
        };
        match self {
            Formula::Const(_) => {}
            Formula::Rel { args, .. } => args.iter().for_each(|&v| add(v, bound)),
            Formula::Lt(a, b) | Formula::Eq(a, b) => {
                a.var().into_iter().chain(b.var()).for_each(|v| add(v, bound))
            }
            Formula::InM(a) => add(*a, bound),
            Formula::H(a, b) | Formula::Dist { a, b, .. } => {
                add(*a, bound);
                add(*b, bound);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                bound.push(*v);
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable index that occurs, free or bound.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Rel { args, .. } => out.extend(args.iter().copied()),
            Formula::Lt(a, b) | Formula::Eq(a, b) => out.extend(a.var().into_iter().chain(b.var())),
            Formula::InM(a) => {
                out.insert(*a);
            }
            Formula::H(a, b) | Formula::Dist { a, b, .. } => out.extend([*a, *b]),
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(*v);
            }
            _ => {}
        });
        out
    }

    /// Largest threshold of any `dist` atom.
    pub fn max_dist(&self) -> Option<u32> {
        let mut best = None;
        self.visit(&mut |f| {
            if let Formula::Dist { k, .. } = f {
                best = best.max(Some(*k));
            }
        });
        best
    }

    pub fn has_numerals(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| {
            if let Formula::Lt(a, b) | Formula::Eq(a, b) = f {
                found |= matches!(a, Term::Num(_)) || matches!(b, Term::Num(_));
            }
        });
        found
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }
}

// Printing precedence: a node needs parentheses when its own level is below
// the level its position demands.
const QUANT: u8 = 0;
const IMPL: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NEG: u8 = 4;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => QUANT,
        Formula::Implies(..) => IMPL,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => NEG,
    }
}

fn write_at(f: &Formula, ctx: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < ctx {
        write!(out, "(")?;
        write_at(f, QUANT, out)?;
        return write!(out, ")");
    }
    match f {
        Formula::Const(b) => write!(out, "{b}"),
        Formula::Rel { name, args } => {
            write!(out, "{name}(")?;
            for (i, v) in args.iter().enumerate() {
                if i > 0 {
                    write!(out, ",")?;
                }
                write!(out, "x{v}")?;
            }
            write!(out, ")")
        }
        Formula::Lt(a, b) => write!(out, "{a}<{b}"),
        Formula::Eq(a, b) => write!(out, "{a}={b}"),
        Formula::InM(a) => write!(out, "inM(x{a})"),
        Formula::H(a, b) => write!(out, "h(x{a})=x{b}"),
        Formula::Dist { a, b, k } => write!(out, "dist(x{a},x{b})<={k}"),
        Formula::Not(a) => {
            write!(out, "~")?;
            write_at(a, NEG, out)
        }
        Formula::And(a, b) => {
            write_at(a, AND, out)?;
            write!(out, " & ")?;
            write_at(b, NEG, out)
        }
        Formula::Or(a, b) => {
            write_at(a, OR, out)?;
            write!(out, " | ")?;
            write_at(b, AND, out)
        }
        Formula::Implies(a, b) => {
            write_at(a, OR, out)?;
            write!(out, " -> ")?;
            write_at(b, IMPL, out)
        }
        Formula::Exists(v, a) => {
            write!(out, "E x{v}. ")?;
            write_at(a, QUANT, out)
        }
        Formula::Forall(v, a) => {
            write!(out, "A x{v}. ")?;
            write_at(a, QUANT, out)
        }
    }
}

/// Prints in the concrete grammar; the output parses back to an equal AST.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, QUANT, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_counts_nesting() {
        let f = Formula::exists(0, Formula::exists(1, Formula::rel("R", &[0, 1])));
        assert_eq!(f.depth(), 2);
        assert_eq!(Formula::rel("R", &[0, 1]).depth(), 0);
        let g = Formula::exists(0, Formula::Const(true)).and(Formula::forall(1, Formula::forall(2, Formula::eq(1, 2))));
        assert_eq!(g.depth(), 2);
    }

    #[test]
    fn free_vars_respect_binding() {
        let f = Formula::exists(0, Formula::rel("R", &[0, 1])).or(Formula::eq(0, 0));
        assert_eq!(f.free_vars().into_iter().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn printing_inserts_parentheses() {
        let f = Formula::lt(0, 1).and(Formula::lt(1, 2).and(Formula::lt(2, 3)));
        assert_eq!(f.to_string(), "x0<x1 & (x1<x2 & x2<x3)");
        let g = Formula::lt(0, 1).implies(Formula::exists(2, Formula::Const(true)));
        assert_eq!(g.to_string(), "x0<x1 -> (E x2. true)");
        assert_eq!(Formula::disj([]).to_string(), "false");
    }
}
