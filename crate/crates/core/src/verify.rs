//! The acceptance suites, runnable from tests and from the command line.
//!
//! Each suite returns a [`Criterion`] with a pass flag and a one-line
//! summary. Suites never panic on a failed check; they report it.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use crate::compose::{oplus, oplus_sentences, sum_theory, Part};
use crate::distorted::{
    c216_check, decompose_components, lemma214_check, random_instance, standard_pool, C216Config, Lemma214Config,
    RadiusRule,
};
use crate::gen::{colored_graph_vocab, random_metric, random_sentence, random_structure, structure_pool};
use crate::logic::{catalog, eval_sentence, Evaluator};
use crate::rand_lab::{
    choose_cutpoints, closed_form_law, condition_on_growth, coupling_check, enumerate_law, exact_zeta, order_alphabet,
    sample_graph_with, swapped, vw_sweep, xi_37, zeta_lower, zeta_oracle, CouplingMode, DrunkardParams, PSeq, SprMode,
};
use crate::rng::substream;
use crate::structure::{ordered_sum, Structure};
use crate::system::FGrowth;
use crate::theory::{sentence_theory, th, truth_from_theory};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Criterion {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        Criterion { id, name, passed, detail }
    }

    fn error(id: u8, name: &'static str, e: impl fmt::Display) -> Self {
        Criterion { id, name, passed: false, detail: format!("error: {e}") }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

/// Truth read off a depth-2 theory against direct evaluation, for 240
/// random sentences on 100 random structures with at most 5 points.
pub fn oracle_equivalence(seed: u64) -> Criterion {
    const NAME: &str = "theory/evaluation oracle equivalence";
    let vocab = Arc::new(colored_graph_vocab());
    let pool = structure_pool(seed, &vocab, 100, 0, 5);
    let sentences: Vec<_> =
        (0..240).map(|i| random_sentence(&mut substream(seed, i, "verify-sentence"), &vocab, (i % 3) as u32)).collect();
    let checked: Result<Vec<usize>, String> = pool
        .par_iter()
        .map(|m| {
            let t = sentence_theory(m, 2);
            let mut bad = 0;
            for f in &sentences {
                let a = truth_from_theory(t, f).map_err(|e| e.to_string())?;
                let b = eval_sentence(m, f).map_err(|e| e.to_string())?;
                bad += usize::from(a != b);
            }
            Ok(bad)
        })
        .collect();
    match checked {
        Ok(bad) => {
            let mismatches: usize = bad.iter().sum();
            let detail = format!("{} sentences x {} structures, {mismatches} mismatches", sentences.len(), pool.len());
            Criterion::new(1, NAME, mismatches == 0, detail)
        }
        Err(e) => Criterion::error(1, NAME, e),
    }
}

fn random_tuple(rng: &mut crate::rng::Rng, n: usize, max: usize) -> Vec<usize> {
    let len = if n == 0 { 0 } else { rng.gen_range(0..=max) };
    (0..len).map(|_| rng.gen_range(0..n)).collect()
}

/// Composed theories against direct computation on 100 random pairs with
/// interleaved tuples and 30 random triples; associativity on the triples
/// and a witness that the sum does not commute.
pub fn composition_soundness(seed: u64) -> Criterion {
    const NAME: &str = "composition soundness";
    let vocab = Arc::new(colored_graph_vocab());
    let mut failures = Vec::new();
    let mut witness = None;
    let mut run = || -> Result<(), crate::theory::TheoryError> {
        for i in 0..100u64 {
            let mut rng = substream(seed, i, "verify-pair");
            let d = rng.gen_range(0..=2);
            let ms: Vec<Structure> = (0..2)
                .map(|_| {
                    let n = rng.gen_range(1..=5);
                    random_structure(&mut rng, &vocab, n, 0.4)
                })
                .collect();
            let t1 = random_tuple(&mut rng, ms[0].size(), 2);
            let t2 = random_tuple(&mut rng, ms[1].size(), 2);
            let mut pattern: Vec<(Part, u32)> = (0..t1.len() as u32)
                .map(|p| (Part::Left, p))
                .chain((0..t2.len() as u32).map(|p| (Part::Right, p)))
                .collect();
            pattern.shuffle(&mut rng);
            let global: Vec<usize> = pattern
                .iter()
                .map(|&(side, p)| match side {
                    Part::Left => t1[p as usize],
                    Part::Right => ms[0].size() + t2[p as usize],
                })
                .collect();
            let composed = oplus(th(&ms[0], &t1, d, 0)?, th(&ms[1], &t2, d, 0)?, &pattern)?;
            let sum = ordered_sum(&ms).expect("one vocabulary");
            if composed != th(&sum, &global, d, 0)? {
                failures.push(format!("pair {i}"));
            }
            let (a, b) = (sentence_theory(&ms[0], d), sentence_theory(&ms[1], d));
            if witness.is_none() && oplus_sentences(a, b)? != oplus_sentences(b, a)? {
                witness = Some(i);
            }
        }
        for i in 0..30u64 {
            let mut rng = substream(seed, i, "verify-triple");
            let d = rng.gen_range(0..=2);
            let ms: Vec<Structure> = (0..3)
                .map(|_| {
                    let n = rng.gen_range(1..=5);
                    random_structure(&mut rng, &vocab, n, 0.4)
                })
                .collect();
            let ts: Vec<_> = ms.iter().map(|m| sentence_theory(m, d)).collect();
            let direct = sentence_theory(&ordered_sum(&ms).expect("one vocabulary"), d);
            if sum_theory(&ts)? != direct {
                failures.push(format!("triple {i}"));
            }
            let left = oplus_sentences(oplus_sentences(ts[0], ts[1])?, ts[2])?;
            let right = oplus_sentences(ts[0], oplus_sentences(ts[1], ts[2])?)?;
            if left != right {
                failures.push(format!("associativity {i}"));
            }
        }
        Ok(())
    };
    if let Err(e) = run() {
        return Criterion::error(2, NAME, e);
    }
    let detail = format!(
        "100 pairs, 30 triples, {} failures {:?}, non-commuting pair: {}",
        failures.len(),
        failures.iter().take(3).collect::<Vec<_>>(),
        witness.map_or("none".into(), |i| format!("pair {i}"))
    );
    Criterion::new(2, NAME, failures.is_empty() && witness.is_some(), detail)
}

/// Orders of sizes in `[2^d, 2^d + 4]` share one depth-`d` theory, and
/// `2^d - 2` is separated from `2^d - 1`.
pub fn order_collapse() -> Criterion {
    const NAME: &str = "linear-order collapse";
    let t = |n: usize, d: u32| sentence_theory(&Structure::linear_order(n), d);
    let mut bad = Vec::new();
    for d in 1..=3u32 {
        let base = 1usize << d;
        let first = t(base, d);
        for n in base + 1..=base + 4 {
            if t(n, d) != first {
                bad.push(format!("d={d} n={n}"));
            }
        }
        if d >= 2 && t(base - 2, d) == t(base - 1, d) {
            bad.push(format!("d={d} boundary"));
        }
    }
    Criterion::new(3, NAME, bad.is_empty(), format!("d in 1..=3, boundary at d in 2..=3, failures {bad:?}"))
}

/// Decomposition postconditions on 1000 random metric configurations.
pub fn decomposition_contract(seed: u64) -> Criterion {
    const NAME: &str = "decomposition contract";
    let f = FGrowth::default();
    let results: Vec<Result<usize, String>> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i, "verify-metric");
            let size = rng.gen_range(1..=12);
            let p = rng.gen_range(0.1..0.6);
            let d = random_metric(&mut rng, size, p, 3);
            let m = rng.gen_range(1..=8);
            let points: Vec<usize> = (0..m).map(|_| rng.gen_range(0..size)).collect();
            let radii: Vec<u32> = (0..m).map(|_| rng.gen_range(0..=3)).collect();
            let dec = decompose_components(&d, &points, &radii, &f, RadiusRule::Sum).map_err(|e| format!("config {i}: {e}"))?;
            Ok(dec.violations(&d, &points, &radii, &f, RadiusRule::Sum).len())
        })
        .collect();
    let errors: Vec<&String> = results.iter().filter_map(|r| r.as_ref().err()).collect();
    let violations: usize = results.iter().filter_map(|r| r.as_ref().ok()).sum();
    let detail = format!("1000 configurations, {violations} violations, {} errors {:?}", errors.len(), errors.first());
    Criterion::new(4, NAME, violations == 0 && errors.is_empty(), detail)
}

/// Exhaustive determinism check of the main lemma on small dis-lifted
/// graphs at depths 0 and 1.
pub fn main_lemma(seed: u64) -> Criterion {
    const NAME: &str = "main lemma determinism";
    let pool = standard_pool(6);
    let mut parts = Vec::new();
    let mut ok = true;
    for depth in 0..=1 {
        match lemma214_check(&pool, &Lemma214Config { depth, seed, ..Default::default() }) {
            Ok(r) => {
                ok &= r.passed();
                parts.push(format!("n={depth}: {} instances, {} groups, {} violations", r.instances, r.groups, r.violations.len()));
            }
            Err(e) => return Criterion::error(5, NAME, e),
        }
    }
    Criterion::new(5, NAME, ok, format!("{} systems; {}", pool.len(), parts.join("; ")))
}

/// 300 random marked graphs with order, grouped by the theory of their
/// index models, must agree on the literal `psi0`.
pub fn window_determinism(seed: u64) -> Criterion {
    const NAME: &str = "window conclusion determinism";
    let vocab = Arc::new(colored_graph_vocab());
    let pool: Vec<Structure> = (0..300u64)
        .map(|i| {
            let mut rng = substream(seed, i, "verify-window");
            let n = rng.gen_range(1..=10);
            let density = rng.gen_range(0.1..0.6);
            random_instance(&mut rng, &vocab, n, 4, density)
        })
        .collect();
    let phi = catalog::lookup("psi0").expect("catalog entry");
    match c216_check(&pool, &phi, &C216Config::default()) {
        Ok(r) => {
            let detail = format!(
                "{} instances, {} window types, {} groups, {} mixed groups",
                r.instances,
                r.window_types,
                r.groups,
                r.violations.len()
            );
            Criterion::new(6, NAME, r.passed(), detail)
        }
        Err(e) => Criterion::error(6, NAME, e),
    }
}

/// The tiny exact coupling instance.
pub fn tiny_coupling() -> DrunkardParams {
    DrunkardParams {
        stride: Some(1),
        cutpoints: Some(vec![0, 3, 6, 9, 10]),
        ..DrunkardParams::new(PSeq::finite(&[(1, 2)]), 11, 1)
    }
}

/// The sampled coupling instance at `n = 12`.
pub fn chisq_coupling() -> DrunkardParams {
    DrunkardParams {
        stride: Some(1),
        cutpoints: Some(vec![0, 3, 6, 9, 10]),
        ..DrunkardParams::new(PSeq::Geometric { c: 0.5, q: 0.5 }, 12, 1)
    }
}

/// Perturbation laws against their closed forms, exact coupling on the tiny
/// instance, and sampled coupling at `n = 12` for three seeds.
pub fn distribution_laws(seed: u64, samples: usize) -> Criterion {
    const NAME: &str = "distribution laws";
    let mut spr_bad = 0;
    let mut cases = 0;
    for i_size in 1..=4usize {
        for jm in 1u64..1 << i_size {
            let j: Vec<usize> = (0..i_size).filter(|&b| jm >> b & 1 == 1).collect();
            for mode in [SprMode::Spr, SprMode::Npr] {
                cases += 1;
                let e = enumerate_law(i_size, &j, mode).expect("valid J");
                let ok = e == closed_form_law(i_size, &j, mode).expect("valid J")
                    && (mode == SprMode::Npr
                        || (swapped(&e) == e && condition_on_growth(&e) == enumerate_law(i_size, &j, SprMode::Npr).expect("valid J")));
                spr_bad += usize::from(!ok);
            }
        }
    }
    let exact = match coupling_check(&tiny_coupling(), CouplingMode::Exact, 0, seed) {
        Ok(r) => r,
        Err(e) => return Criterion::error(7, NAME, e),
    };
    let tvs: Vec<String> = exact.sides.iter().map(|s| s.tv_distance.as_ref().map_or("-".into(), |t| t.to_string())).collect();
    let mut pvalues = Vec::new();
    for s in 0..3 {
        match coupling_check(&chisq_coupling(), CouplingMode::Chisq, samples, seed + s) {
            Ok(r) => pvalues.push(r.sides.iter().filter_map(|x| x.chisq_pvalue).fold(1.0f64, f64::min)),
            Err(e) => return Criterion::error(7, NAME, e),
        }
    }
    let passed = spr_bad == 0 && exact.passed() && pvalues.iter().all(|&p| p > 0.001);
    let detail = format!(
        "spr/npr {cases} laws, {spr_bad} mismatches; exact tv {tvs:?}; chisq min p-values {:?} at {samples} samples",
        pvalues.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>()
    );
    Criterion::new(7, NAME, passed, detail)
}

/// Exact bound values and the exhaustive zeta search against its oracle.
pub fn bound_calculators() -> Criterion {
    const NAME: &str = "bound calculators";
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let run = || -> Result<(bool, String), crate::rand_lab::RandError> {
        let z = zeta_lower(1)?;
        let x = xi_37(&q(1, 2), 2, &[q(0, 1), q(1, 1)])?;
        let alphabet = order_alphabet(1);
        let z1 = exact_zeta(1, &alphabet)?;
        let z2 = exact_zeta(2, &alphabet)?;
        let oracle_ok = z1 == zeta_oracle(1, &alphabet)? && z2 == zeta_oracle(2, &alphabet)?;
        let one = BigRational::from_integer(1.into());
        let (xi1, xi2) = (&one - &z1.zeta, &one - &z2.zeta);
        let recursion_ok = xi2 <= xi_37(&xi1, 2, &[one.clone(), xi1.clone()])?;
        let passed = z == q(1, 2) && x == q(1, 4) && oracle_ok && z1.zeta <= z2.zeta && recursion_ok;
        let detail = format!(
            "zeta_lower(1) = {z}, xi_37 example = {x}, zeta_1 = {}, zeta_2 = {}, oracle agrees: {oracle_ok}, recursion bound holds: {recursion_ok}",
            z1.zeta, z2.zeta
        );
        Ok((passed, detail))
    };
    match run() {
        Ok((passed, detail)) => Criterion::new(8, NAME, passed, detail),
        Err(e) => Criterion::error(8, NAME, e),
    }
}

/// The sweep for the literal `psi0` over `n ∈ [16, 32]` at two seeds.
pub fn vw_pipeline(seed: u64, samples: usize) -> Criterion {
    const NAME: &str = "very-weak-law pipeline";
    let p = PSeq::Geometric { c: 0.5, q: 0.5 };
    let f = catalog::lookup("psi0").expect("catalog entry");
    let (a, b) = match (vw_sweep(&p, "psi0", &f, 16..=32, samples, seed), vw_sweep(&p, "psi0", &f, 16..=32, samples, seed + 1)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Criterion::error(9, NAME, e),
    };
    let in_range = a.rows.iter().chain(&b.rows).all(|r| (0.0..=1.0).contains(&r.estimate));
    let agree = a.rows.iter().zip(&b.rows).all(|(x, y)| {
        (x.estimate - y.estimate).abs() <= 3.0 * (x.sigma().powi(2) + y.sigma().powi(2)).sqrt()
    });
    let small_steps = a.diffs.iter().chain(&b.diffs).all(|d| d.diff.abs() < 0.25 + d.diff_ci);
    let detail = format!(
        "{} sizes x 2 seeds at {samples} samples; in [0,1]: {in_range}, seeds agree: {agree}, steps bounded: {small_steps}",
        a.rows.len()
    );
    Criterion::new(9, NAME, in_range && agree && small_steps && a.diffs.len() == 16, detail)
}

/// Frequency of an edge jumping a whole gap between chosen cutpoints.
pub fn cutpoint_bound(seed: u64, samples: usize) -> Criterion {
    const NAME: &str = "cutpoint bound";
    let epsilon = 0.3;
    let p = PSeq::Geometric { c: 0.5, q: 0.5 };
    let params = DrunkardParams::new(p.clone(), 0, 1);
    let cuts = choose_cutpoints(&p, epsilon, params.k());
    let n = cuts.m[cuts.k()] + 1;
    let gap = catalog::phi_cutpoints(&cuts.as_u32());
    let lazy = catalog::phi_lazy(&cuts.as_u32());
    let hits: Vec<Result<[bool; 2], String>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let m = sample_graph_with(&mut substream(seed, i, "verify-cutpoints"), &p, n);
            let r = m.vocab().index_of("R").expect("graph vocabulary");
            let spans = |lo: usize, hi: usize| m.tuples(r).any(|t| t[0] <= lo && t[1] >= hi);
            let native = [
                cuts.m.windows(2).any(|w| spans(w[0], w[1])),
                cuts.m.windows(2).any(|w| spans(w[0] + 1, w[1] - 1)),
            ];
            let by_formula = [gap.clone(), lazy.clone()].map(|f| {
                Evaluator::new(&m, &f).and_then(|e| e.eval_tuple(&[])).map_err(|e| e.to_string())
            });
            for (a, b) in native.iter().zip(by_formula) {
                if *a != b? {
                    return Err(format!("sample {i}: native and formula evaluation differ"));
                }
            }
            Ok(native)
        })
        .collect();
    if let Some(Err(e)) = hits.iter().find(|h| h.is_err()) {
        return Criterion::error(10, NAME, e);
    }
    let count = |k: usize| hits.iter().filter(|h| matches!(h, Ok(v) if v[k])).count() as f64 / samples as f64;
    let (gap_freq, lazy_freq) = (count(0), count(1));
    let target = epsilon / 3.0;
    let sigma = (target * (1.0 - target) / samples as f64).sqrt();
    let limit = target + 3.0 * sigma;
    let detail = format!(
        "cutpoints {:?}, n = {n}, gap event {gap_freq:.4}, wider event {lazy_freq:.4}, limit {limit:.4}, union bound {:.4}",
        cuts.m,
        cuts.bound(&p)
    );
    Criterion::new(10, NAME, gap_freq < limit && lazy_freq < limit, detail)
}

/// Sample sizes for the statistical suites.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub coupling_samples: usize,
    pub sweep_samples: usize,
    pub cutpoint_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 7, coupling_samples: 100_000, sweep_samples: 10_000, cutpoint_samples: 10_000 }
    }
}

/// Runs one suite by number.
pub fn run_one(id: u8, cfg: &VerifyConfig) -> Option<Criterion> {
    Some(match id {
        1 => oracle_equivalence(cfg.seed),
        2 => composition_soundness(cfg.seed),
        3 => order_collapse(),
        4 => decomposition_contract(cfg.seed),
        5 => main_lemma(cfg.seed),
        6 => window_determinism(cfg.seed),
        7 => distribution_laws(cfg.seed, cfg.coupling_samples),
        8 => bound_calculators(),
        9 => vw_pipeline(cfg.seed, cfg.sweep_samples),
        10 => cutpoint_bound(cfg.seed, cfg.cutpoint_samples),
        _ => return None,
    })
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<Criterion> {
    (1..=10).filter_map(|id| run_one(id, cfg)).collect()
}
