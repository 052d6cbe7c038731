//! Index models expanded by relations naming realized bounded theories.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::bth::Ctx;
use super::DistortedError;
use crate::structure::{Structure, Vocabulary};
use crate::system::{FGrowth, System};
use crate::theory::Theory;

/// Size guard for [`expand_pool`].
#[derive(Debug, Clone, Copy)]
pub struct ExpandLimits {
    /// Largest number of (tuple, radius) pairs examined per system.
    pub max_tuples: usize,
}

impl Default for ExpandLimits {
    fn default() -> Self {
        ExpandLimits { max_tuples: 500_000 }
    }
}

fn index_tuples(ni: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..ni).map(move |x| [t.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Relation name for a bounded theory. The digest already separates
/// different arities and radii, since both are part of the encoding.
fn rel_name(t: Theory) -> String {
    format!("B{}", t.digest())
}

/// Expands the index models of several systems over one shared vocabulary,
/// so that the results are comparable. For each arity `m' ≤ m + n` and
/// radius `r' ≤ f_n³(r)` every index-sort tuple that is a component of radius
/// `r'` is put into the relation named after its `bth^n_{r'}` value.
pub fn expand_pool(
    systems: &[System],
    n: u32,
    r: u32,
    m: u32,
    f: &FGrowth,
    limits: ExpandLimits,
) -> Result<Vec<Structure>, DistortedError> {
    let top = f.iter(n, r, 3);
    let mut found: Vec<BTreeMap<Theory, Vec<Vec<usize>>>> = Vec::with_capacity(systems.len());
    for s in systems {
        let ni = s.i_size();
        let count: usize = (1..=m + n).map(|len| ni.pow(len)).sum::<usize>() * (top as usize + 1);
        if count > limits.max_tuples {
            return Err(DistortedError::Guard(format!("{count} tuple/radius pairs exceed {}", limits.max_tuples)));
        }
        let mut ctx = Ctx::new(s, f);
        let mut rels: BTreeMap<Theory, Vec<Vec<usize>>> = BTreeMap::new();
        for len in 1..=(m + n) as usize {
            for local in index_tuples(ni, len) {
                let flat: Vec<usize> = local.iter().map(|&i| s.i_elem(i)).collect();
                for rr in 0..=top {
                    if flat.iter().all(|&x| s.dist(flat[0], x).within(rr)) {
                        rels.entry(ctx.go(&flat, n, rr)).or_default().push(local.clone());
                    }
                }
            }
        }
        found.push(rels);
    }
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    for rels in &found {
        for t in rels.keys() {
            names.insert(rel_name(*t), t.arity() as usize);
        }
    }
    let extra: Vec<(String, usize)> = names.into_iter().collect();
    let mut vocabs: BTreeMap<Arc<Vocabulary>, Arc<Vocabulary>> = BTreeMap::new();
    let mut out = Vec::with_capacity(systems.len());
    for (s, rels) in systems.iter().zip(found) {
        let base = s.i_part();
        let vocab = match vocabs.get(base.vocab()) {
            Some(v) => v.clone(),
            None => {
                let v = Arc::new(base.vocab().extended(&extra).map_err(|e| DistortedError::Guard(e.to_string()))?);
                vocabs.insert(base.vocab().clone(), v.clone());
                v
            }
        };
        let mut ts: Vec<(usize, Vec<usize>)> = base.all_tuples().map(|(sym, t)| (sym, t.clone())).collect();
        for (t, tuples) in rels {
            let sym = vocab.index_of(&rel_name(t)).expect("name registered above");
            ts.extend(tuples.into_iter().map(|tu| (sym, tu)));
        }
        out.push(Structure::from_indexed(vocab, base.size(), ts).map_err(|e| DistortedError::Guard(e.to_string()))?);
    }
    Ok(out)
}

/// `I^n_{r,m}[s]` for a single system.
pub fn expand_index(s: &System, n: u32, r: u32, m: u32, f: &FGrowth) -> Result<Structure, DistortedError> {
    Ok(expand_pool(std::slice::from_ref(s), n, r, m, f, ExpandLimits::default())?.remove(0))
}

/// The expanded index model as a system of its own, with the original
/// distances, so that sparse theories can be taken over it.
pub fn expanded_system(s: &System, expanded: Structure) -> Result<System, DistortedError> {
    Ok(System::index_only(expanded, s.dist_matrix().clone())?)
}

/// Names of the added relations realized by at least one tuple.
pub fn realized(expanded: &Structure) -> BTreeSet<String> {
    expanded.all_tuples().map(|(sym, _)| expanded.vocab().name(sym).to_string()).filter(|n| n.starts_with('B')).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::LiftMode;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
        let v = Arc::new(Vocabulary::from_pairs(&[("R", 2)], None));
        let ts = edges.iter().flat_map(|&(a, b)| [(0, vec![a, b]), (0, vec![b, a])]).collect();
        Structure::from_indexed(v, n, ts).unwrap()
    }

    #[test]
    fn sim_lift_gives_a_coloring() {
        let m = graph(4, &[(0, 1)]);
        let s = System::lift(&m, LiftMode::Sim);
        let e = expand_index(&s, 0, 0, 1, &FGrowth::default()).unwrap();
        // only singletons are components, so every added relation is unary
        for (sym, _) in e.all_tuples() {
            if e.vocab().name(sym).starts_with('B') {
                assert_eq!(e.vocab().arity(sym), 1);
            }
        }
        let s1 = System::lift(&m, LiftMode::Sim);
        assert_eq!(expand_index(&s1, 1, 0, 1, &FGrowth::default()).unwrap().size(), 4);
    }

    #[test]
    fn isomorphic_systems_expand_isomorphically() {
        let a = System::lift(&graph(4, &[(0, 1), (1, 2)]), LiftMode::Dis);
        let b = System::lift(&graph(4, &[(3, 2), (2, 1)]), LiftMode::Dis);
        let out = expand_pool(&[a, b], 1, 0, 1, &FGrowth::default(), ExpandLimits::default()).unwrap();
        let map = [3, 2, 1, 0];
        for (sym, t) in out[0].all_tuples() {
            let image: Vec<usize> = t.iter().map(|&x| map[x]).collect();
            assert!(out[1].holds(sym, &image), "{} {:?}", out[0].vocab().name(sym), t);
        }
        assert_eq!(out[0].all_tuples().count(), out[1].all_tuples().count());
        assert_eq!(realized(&out[0]), realized(&out[1]));
    }

    #[test]
    fn guard() {
        let s = System::lift(&graph(6, &[]), LiftMode::Dis);
        let tight = ExpandLimits { max_tuples: 10 };
        assert!(matches!(expand_pool(&[s], 1, 1, 2, &FGrowth::default(), tight), Err(DistortedError::Guard(_))));
    }
}
