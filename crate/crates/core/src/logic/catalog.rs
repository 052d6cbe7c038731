//! Named sentences over graphs with order `{<, R}`.

use super::formula::{Formula, Term};
use super::parse::parse;
use crate::structure::Vocabulary;

/// Some element splits the order with no edge crossing the split.
/// Read literally it is witnessed by the least element, so it holds in
/// every nonempty structure.
pub const PSI0: &str = "E x0. A x1. A x2. ((x1<x0 & ~(x2<x0)) -> ~R(x1,x2))";

/// Like [`PSI0`], but the splitting element must have a predecessor, which
/// makes the sentence depend on the edges.
pub const PSI0_STRICT: &str = "E x0. ((E x3. x3<x0) & (A x1. A x2. ((x1<x0 & ~(x2<x0)) -> ~R(x1,x2))))";

const ENTRIES: &[(&str, &str)] = &[
    ("psi0", PSI0),
    ("psi0_strict", PSI0_STRICT),
    ("true", "true"),
    ("false", "false"),
    ("has_edge", "E x0. E x1. R(x0,x1)"),
    ("has_isolated", "E x0. A x1. ~R(x0,x1)"),
    ("has_triangle", "E x0. E x1. E x2. (R(x0,x1) & R(x1,x2) & R(x0,x2))"),
    ("edge_to_successor", "E x0. E x1. (x0<x1 & R(x0,x1) & ~(E x2. (x0<x2 & x2<x1)))"),
    ("max_is_isolated", "E x0. ((A x1. x1<=x0) & (A x1. ~R(x0,x1)))"),
];

/// The built-in catalog, in a fixed order.
pub fn builtin_sentences() -> Vec<(&'static str, Formula)> {
    let vocab = Vocabulary::graph_order();
    ENTRIES
        .iter()
        .map(|(name, text)| (*name, parse(text, &vocab).expect("catalog entries parse")))
        .collect()
}

pub fn lookup(name: &str) -> Option<Formula> {
    builtin_sentences().into_iter().find(|(n, _)| *n == name).map(|(_, f)| f)
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|(n, _)| *n).collect()
}

/// `⋁ᵢ ∃y ∃z (y ≤ mᵢ ∧ mᵢ₊₁ ≤ z ∧ R(y,z))`: some edge jumps over a whole gap.
/// With no gaps this is `false`.
pub fn phi_cutpoints(cuts: &[u32]) -> Formula {
    spanning(cuts.windows(2).map(|w| (w[0], w[1])))
}

/// The wider event whose probability the cutpoint choice bounds:
/// some edge joins `x ≤ mᵣ + 1` to `y ≥ mᵣ₊₁ − 1`.
pub fn phi_lazy(cuts: &[u32]) -> Formula {
    spanning(cuts.windows(2).map(|w| (w[0] + 1, w[1].saturating_sub(1))))
}

fn spanning(bounds: impl Iterator<Item = (u32, u32)>) -> Formula {
    Formula::disj(bounds.map(|(lo, hi)| {
        let body = Formula::le(Term::Var(0), Term::Num(lo))
            .and(Formula::le(Term::Num(hi), Term::Var(1)))
            .and(Formula::rel("R", &[0, 1]));
        Formula::exists(0, Formula::exists(1, body))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::eval::eval_sentence;
    use crate::structure::Structure;
    use std::sync::Arc;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
        let v = Arc::new(Vocabulary::graph_order());
        let r = v.index_of("R").unwrap();
        let ts = edges.iter().flat_map(|&(a, b)| [(r, vec![a, b]), (r, vec![b, a])]).collect();
        Structure::from_indexed(v, n, ts).unwrap()
    }

    #[test]
    fn catalog_depths() {
        assert_eq!(lookup("psi0").unwrap().depth(), 3);
        assert_eq!(lookup("psi0_strict").unwrap().depth(), 3);
        assert!(builtin_sentences().iter().all(|(_, f)| f.is_sentence()));
        assert!(lookup("nope").is_none());
    }

    #[test]
    fn strict_variant_sees_edges() {
        let f = lookup("psi0_strict").unwrap();
        assert!(eval_sentence(&graph(3, &[]), &f).unwrap());
        assert!(!eval_sentence(&graph(3, &[(0, 1), (1, 2)]), &f).unwrap());
        assert!(!eval_sentence(&graph(1, &[]), &f).unwrap());
    }

    #[test]
    fn cutpoint_sentences() {
        assert_eq!(phi_cutpoints(&[]), Formula::Const(false));
        assert_eq!(phi_cutpoints(&[0]), Formula::Const(false));
        let phi = phi_cutpoints(&[0, 3]);
        assert!(eval_sentence(&graph(5, &[(0, 4)]), &phi).unwrap());
        assert!(!eval_sentence(&graph(5, &[(1, 2)]), &phi).unwrap());
        let lazy = phi_lazy(&[0, 4]);
        assert!(eval_sentence(&graph(5, &[(1, 3)]), &lazy).unwrap());
        assert!(!eval_sentence(&graph(5, &[(1, 2)]), &lazy).unwrap());
    }
}
