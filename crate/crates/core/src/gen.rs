//! Random structures and formulas for tests and experiments.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::logic::{Formula, Var};
use crate::rng::{substream, Rng};
use crate::structure::{Structure, Vocabulary};
use crate::system::{Dist, DistMatrix};

/// `{<, R/2, P/1}`.
pub fn colored_graph_vocab() -> Vocabulary {
    Vocabulary::from_pairs(&[("<", 2), ("R", 2), ("P", 1)], Some("<"))
}

fn all_tuples(arity: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out.into_iter().flat_map(|t| (0..n).map(move |x| [t.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Every non-order tuple is present independently with probability `density`.
pub fn random_structure(rng: &mut Rng, vocab: &Arc<Vocabulary>, n: usize, density: f64) -> Structure {
    let mut ts = Vec::new();
    for (sym, (_, arity)) in vocab.symbols().iter().enumerate() {
        if vocab.is_order(sym) {
            continue;
        }
        for t in all_tuples(*arity, n) {
            if rng.gen_bool(density) {
                ts.push((sym, t));
            }
        }
    }
    Structure::from_indexed(vocab.clone(), n, ts).expect("generated tuples are in range")
}

/// A structure over `vocab` (which must contain a binary `R`) where `R` is
/// symmetric and irreflexive; other symbols are filled as in [`random_structure`].
pub fn random_graph(rng: &mut Rng, vocab: &Arc<Vocabulary>, n: usize, density: f64, other_density: f64) -> Structure {
    let r = vocab.index_of("R").expect("vocabulary has R");
    let mut ts = Vec::new();
    for (sym, (_, arity)) in vocab.symbols().iter().enumerate() {
        if vocab.is_order(sym) {
            continue;
        }
        if sym == r {
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(density) {
                        ts.push((r, vec![i, j]));
                        ts.push((r, vec![j, i]));
                    }
                }
            }
        } else {
            for t in all_tuples(*arity, n) {
                if rng.gen_bool(other_density) {
                    ts.push((sym, t));
                }
            }
        }
    }
    Structure::from_indexed(vocab.clone(), n, ts).expect("generated tuples are in range")
}

/// `count` random structures with sizes in `min_n..=max_n`, reproducible from `seed`.
pub fn structure_pool(seed: u64, vocab: &Arc<Vocabulary>, count: usize, min_n: usize, max_n: usize) -> Vec<Structure> {
    (0..count)
        .map(|i| {
            let mut rng = substream(seed, i as u64, "structure-pool");
            let n = rng.gen_range(min_n..=max_n);
            let density = [0.2, 0.4, 0.6][rng.gen_range(0..3)];
            random_structure(&mut rng, vocab, n, density)
        })
        .collect()
}

/// A random formula with quantifier depth at most `depth` whose free
/// variables are among `scope`.
pub fn random_formula(rng: &mut Rng, vocab: &Vocabulary, depth: u32, scope: &[Var]) -> Formula {
    let mut next = scope.iter().max().map_or(0, |v| v + 1);
    build(rng, vocab, depth, &mut scope.to_vec(), &mut next, 4)
}

/// A random sentence of depth at most `depth`.
pub fn random_sentence(rng: &mut Rng, vocab: &Vocabulary, depth: u32) -> Formula {
    random_formula(rng, vocab, depth, &[])
}

fn atom(rng: &mut Rng, vocab: &Vocabulary, scope: &[Var]) -> Formula {
    if scope.is_empty() {
        return Formula::Const(rng.gen_bool(0.5));
    }
    let pick = |rng: &mut Rng| *scope.choose(rng).unwrap();
    match rng.gen_range(0..6) {
        0 => Formula::eq(pick(rng), pick(rng)),
        1 if vocab.order_symbol().is_some() => Formula::lt(pick(rng), pick(rng)),
        _ => {
            let symbols: Vec<usize> = (0..vocab.len()).filter(|&s| !vocab.is_order(s)).collect();
            match symbols.choose(rng) {
                Some(&s) => {
                    let args: Vec<Var> = (0..vocab.arity(s)).map(|_| pick(rng)).collect();
                    Formula::rel(vocab.name(s), &args)
                }
                None => Formula::eq(pick(rng), pick(rng)),
            }
        }
    }
}

fn build(rng: &mut Rng, vocab: &Vocabulary, depth: u32, scope: &mut Vec<Var>, next: &mut Var, size: u32) -> Formula {
    let quantify = depth > 0 && (scope.is_empty() || rng.gen_bool(0.45));
    if quantify {
        // mostly fresh variables, sometimes shadowing one in scope
        let v = if !scope.is_empty() && rng.gen_bool(0.15) {
            *scope.choose(rng).unwrap()
        } else {
            *next += 1;
            *next - 1
        };
        scope.push(v);
        let body = build(rng, vocab, depth - 1, scope, next, size);
        scope.pop();
        return if rng.gen_bool(0.5) { Formula::exists(v, body) } else { Formula::forall(v, body) };
    }
    if size == 0 {
        return atom(rng, vocab, scope);
    }
    match rng.gen_range(0..6) {
        0 => build(rng, vocab, depth, scope, next, size - 1).not(),
        1 => build(rng, vocab, depth, scope, next, size - 1).and(build(rng, vocab, depth, scope, next, size - 1)),
        2 => build(rng, vocab, depth, scope, next, size - 1).or(build(rng, vocab, depth, scope, next, size - 1)),
        3 => build(rng, vocab, depth, scope, next, size - 1).implies(build(rng, vocab, depth, scope, next, size - 1)),
        _ => atom(rng, vocab, scope),
    }
}

/// Shortest-path metric of a random graph on `n` points with edge
/// probability `p` and integer weights in `1..=max_weight`. Points in
/// different components are at distance ∞.
pub fn random_metric(rng: &mut Rng, n: usize, p: f64, max_weight: u32) -> DistMatrix {
    let mut d = vec![Dist::Inf; n * n];
    for i in 0..n {
        d[i * n + i] = Dist::Fin(0);
        for j in i + 1..n {
            if rng.gen_bool(p) {
                let w = Dist::Fin(rng.gen_range(1..=max_weight));
                d[i * n + j] = w;
                d[j * n + i] = w;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k].saturating_add(d[k * n + j]);
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    DistMatrix::new(n, d).expect("shortest paths form a metric")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_sentences_are_closed_and_shallow() {
        let v = colored_graph_vocab();
        for i in 0..200 {
            let f = random_sentence(&mut substream(1, i, "t"), &v, 2);
            assert!(f.is_sentence(), "{f}");
            assert!(f.depth() <= 2);
        }
    }

    #[test]
    fn graphs_are_symmetric() {
        let v = Arc::new(colored_graph_vocab());
        let g = random_graph(&mut substream(3, 0, "g"), &v, 6, 0.5, 0.5);
        let r = v.index_of("R").unwrap();
        for t in g.tuples(r) {
            assert!(g.holds(r, &[t[1], t[0]]));
            assert_ne!(t[0], t[1]);
        }
    }
}
