use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use fmtlab::distorted::{bth, decompose_components, project_bth, RadiusRule};
use fmtlab::gen::{colored_graph_vocab, random_formula, random_metric, random_structure};
use fmtlab::logic::{eval, parse, Formula};
use fmtlab::rng::substream;
use fmtlab::theory::reduce_theory;
use fmtlab::{th, FGrowth, LiftMode, System, Vocabulary};

fn vocab() -> Arc<Vocabulary> {
    Arc::new(colored_graph_vocab())
}

/// Quantifier nesting, counted without `Formula::depth`.
fn nesting(f: &Formula) -> u32 {
    match f {
        Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + nesting(a),
        Formula::Not(a) => nesting(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => nesting(a).max(nesting(b)),
        _ => 0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn printed_formulas_reparse(seed in any::<u64>(), depth in 0u32..4) {
        let v = vocab();
        let f = random_formula(&mut substream(seed, 0, "roundtrip"), &v, depth, &[0, 1]);
        prop_assert_eq!(parse(&f.to_string(), &v).unwrap(), f);
    }

    #[test]
    fn depth_matches_nesting(seed in any::<u64>(), depth in 0u32..5) {
        let f = random_formula(&mut substream(seed, 0, "depth"), &vocab(), depth, &[0]);
        prop_assert_eq!(f.depth(), nesting(&f));
        prop_assert!(f.depth() <= depth);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn de_morgan(seed in any::<u64>(), n in 1usize..6, x in 0usize..6, y in 0usize..6) {
        let v = vocab();
        let mut rng = substream(seed, 0, "de-morgan");
        let m = random_structure(&mut rng, &v, n, 0.4);
        let a = random_formula(&mut rng, &v, 2, &[0, 1]);
        let b = random_formula(&mut rng, &v, 2, &[0, 1]);
        let asg = BTreeMap::from([(0, x % n), (1, y % n)]);
        let lhs = a.clone().and(b.clone()).not();
        let rhs = a.not().or(b.not());
        prop_assert_eq!(eval(&m, &lhs, &asg).unwrap(), eval(&m, &rhs, &asg).unwrap());
    }

    #[test]
    fn reordering_a_tuple_matches_projection(seed in any::<u64>(), n in 1usize..5, depth in 0u32..3) {
        let v = vocab();
        let mut rng = substream(seed, 0, "permute");
        let m = random_structure(&mut rng, &v, n, 0.4);
        let tuple = [seed as usize % n, (seed >> 8) as usize % n];
        let t = th(&m, &tuple, depth, 0).unwrap();
        prop_assert_eq!(reduce_theory(t, depth, 0, &[1, 0]).unwrap(), th(&m, &[tuple[1], tuple[0]], depth, 0).unwrap());
        prop_assert_eq!(reduce_theory(t, depth, 0, &[1]).unwrap(), th(&m, &[tuple[1]], depth, 0).unwrap());
    }

    #[test]
    fn decomposition_postconditions(seed in any::<u64>(), size in 1usize..10, k in 1usize..6) {
        let mut rng = substream(seed, 0, "decompose");
        let d = random_metric(&mut rng, size, 0.3, 3);
        let points: Vec<usize> = (0..k).map(|i| (seed as usize).wrapping_add(7 * i) % size).collect();
        let radii: Vec<u32> = (0..k).map(|i| ((seed >> (2 * i)) % 3) as u32).collect();
        let f = FGrowth::default();
        let c = decompose_components(&d, &points, &radii, &f, RadiusRule::Sum).unwrap();
        prop_assert!(c.violations(&d, &points, &radii, &f, RadiusRule::Sum).is_empty());
        prop_assert!(c.g.iter().all(|i| c.w.contains(i)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn bounded_theory_permutation(seed in any::<u64>(), n in 2usize..6) {
        let v = vocab();
        let m = random_structure(&mut substream(seed, 0, "bth"), &v, n, 0.5);
        let s = System::lift(&m, LiftMode::Dis);
        let anchor = seed as usize % n;
        let near = s.neighborhood(anchor, 1).unwrap();
        let (a, b) = (near[(seed >> 4) as usize % near.len()], near[(seed >> 12) as usize % near.len()]);
        let f = FGrowth::default();
        let t = bth(&s, &[anchor, a, b], 1, 1, &f).unwrap();
        prop_assert_eq!(project_bth(t, &[0, 2, 1]), bth(&s, &[anchor, b, a], 1, 1, &f).unwrap());
        prop_assert_eq!(project_bth(t, &[0, 1]), bth(&s, &[anchor, a], 1, 1, &f).unwrap());
    }
}
