//! Small worked examples with known answers, checked end to end through the
//! public API.

use std::collections::BTreeMap;

use num_rational::BigRational;

use fmtlab::compose::{oplus_sentences, sum_theory};
use fmtlab::logic::{catalog, eval, eval_sentence, parse};
use fmtlab::rand_lab::{choose_cutpoints, exact_zeta, order_alphabet, xi_37, zeta_lower, PSeq};
use fmtlab::theory::{characteristic_formula, sentence_theory};
use fmtlab::{th, truth_from_theory, Structure};

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

const ONE_EDGE: &str = r#"{"vocab": [["<",2],["R",2]], "order": "<", "n": 2, "relations": {"R": [[0,1],[1,0]]}}"#;

#[test]
fn psi0_parses_from_text_and_has_depth_three() {
    let m = Structure::linear_order(3);
    let text = "E x0. A x1. A x2. ((x1<x0 & ~(x2<x0)) -> ~R(x1,x2))";
    let g = Structure::from_json(ONE_EDGE).unwrap();
    let psi = parse(text, g.vocab()).unwrap();
    assert_eq!(psi, catalog::lookup("psi0").unwrap());
    assert_eq!(psi.depth(), 3);
    assert!(eval_sentence(&g, &psi).unwrap());
    assert!(parse(text, m.vocab()).is_err(), "R is not in the order vocabulary");
}

#[test]
fn atom_under_assignment() {
    let g = Structure::from_json(ONE_EDGE).unwrap();
    let f = parse("R(x0,x1)", g.vocab()).unwrap();
    assert!(eval(&g, &f, &BTreeMap::from([(0, 0), (1, 1)])).unwrap());
    assert!(!eval(&g, &f, &BTreeMap::from([(0, 0), (1, 0)])).unwrap());
    assert!(eval(&g, &f, &BTreeMap::from([(0, 0)])).is_err());
}

#[test]
fn small_orders() {
    let t = |n, d| sentence_theory(&Structure::linear_order(n), d);
    assert_eq!(t(1, 1), t(2, 1));
    assert_ne!(t(2, 2), t(3, 2));
    assert_eq!(oplus_sentences(t(2, 2), t(3, 2)).unwrap(), t(5, 2));
    assert_eq!(sum_theory(&[t(1, 3), t(1, 3), t(1, 3)]).unwrap(), t(3, 3));
}

#[test]
fn truth_read_off_a_theory() {
    let g = Structure::from_json(ONE_EDGE).unwrap();
    let t = sentence_theory(&g, 3);
    for (name, f) in catalog::builtin_sentences() {
        if f.depth() <= 3 {
            assert_eq!(truth_from_theory(t, &f).unwrap(), eval_sentence(&g, &f).unwrap(), "{name}");
        }
    }
    let pair = th(&g, &[0, 1], 1, 0).unwrap();
    assert!(truth_from_theory(pair, &parse("R(x0,x1) & x0<x1", g.vocab()).unwrap()).unwrap());
}

#[test]
fn characteristic_formula_separates_orders() {
    let chi = characteristic_formula(sentence_theory(&Structure::linear_order(3), 2));
    for n in 1..=6 {
        assert_eq!(eval_sentence(&Structure::linear_order(n), &chi).unwrap(), n >= 3, "n = {n}");
    }
}

#[test]
fn rational_bounds() {
    assert_eq!(zeta_lower(1).unwrap(), q(1, 2));
    assert_eq!(zeta_lower(3).unwrap(), q(1, 24));
    // ξ_k = 1/2 over ξ_0 = 1, ξ_1 = 1/2: (1/2)·(1/2·1 + 1/2·1/2)
    assert_eq!(xi_37(&q(1, 2), 2, &[q(1, 1), q(1, 2)]).unwrap(), q(3, 8));
    let z = exact_zeta(2, &order_alphabet(1)).unwrap();
    assert_eq!((z.zeta, z.zeta_scaled), (q(1, 2), q(0, 1)));
}

#[test]
fn cutpoints_for_a_single_edge_length() {
    let p: PSeq = "finite:1/2".parse().unwrap();
    let c = choose_cutpoints(&p, 0.3, 3);
    assert_eq!(c.m, vec![0, 4, 8, 12]);
    assert_eq!(c.bound(&p), 0.0);
}
