//! Sampling graphs with order and estimating sentence probabilities.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;

use super::{PSeq, RandError};
use crate::logic::{Evaluator, Formula};
use crate::rng::{substream, Rng};
use crate::structure::{Structure, Vocabulary};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// `(n, <, R)` with the given undirected edges stored in both directions.
pub fn graph_from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Structure {
    let vocab = Arc::new(Vocabulary::graph_order());
    let r = vocab.index_of("R").expect("graph vocabulary has R");
    let tuples = edges.into_iter().flat_map(|(i, j)| [(r, vec![i, j]), (r, vec![j, i])]).collect();
    Structure::from_indexed(vocab, n, tuples).expect("edges inside the universe")
}

/// One draw of the graph with order on `n` points from an explicit stream:
/// each pair `i < j` is an edge with probability `p_{j-i}`, pairs visited in
/// lexicographic order.
pub fn sample_graph_with(rng: &mut Rng, p: &PSeq, n: usize) -> Structure {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let q = p.p(j - i);
            if q > 0.0 && rng.gen::<f64>() < q {
                edges.push((i, j));
            }
        }
    }
    graph_from_edges(n, edges)
}

pub fn sample_graph_order(p: &PSeq, n: usize, seed: u64) -> Structure {
    sample_graph_with(&mut substream(seed, 0, "graph"), p, n)
}

/// Wilson score interval at 95%.
pub fn wilson(successes: usize, samples: usize) -> (f64, f64) {
    if samples == 0 {
        return (0.0, 1.0);
    }
    let n = samples as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub sentence: String,
    pub n: usize,
    pub samples: usize,
    pub successes: usize,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl EstimationResult {
    pub const CSV_HEADER: &'static str = "sentence,n,samples,successes,estimate,ci_low,ci_high,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.sentence, self.n, self.samples, self.successes, self.estimate, self.ci_low, self.ci_high, self.seed
        )
    }

    /// Standard error of the estimate.
    pub fn sigma(&self) -> f64 {
        (self.estimate * (1.0 - self.estimate) / self.samples as f64).sqrt()
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool
/// when `workers` is 0.
pub fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool").install(f)
}

/// Monte Carlo estimate of `Prob(M_n ⊨ f)`. Sample `i` is drawn from its own
/// substream, so the result does not depend on the thread count.
pub fn estimate_prob(
    p: &PSeq,
    n: usize,
    sentence: &str,
    f: &Formula,
    samples: usize,
    seed: u64,
) -> Result<EstimationResult, RandError> {
    if !f.is_sentence() {
        return Err(RandError::NotSentence);
    }
    if samples == 0 {
        return Err(RandError::Range("samples must be at least 1".into()));
    }
    Evaluator::new(&Structure::empty_relations(Arc::new(Vocabulary::graph_order()), 0), f)?;
    let label = format!("estimate-n{n}");
    let successes = (0..samples)
        .into_par_iter()
        .map(|i| {
            let m = sample_graph_with(&mut substream(seed, i as u64, &label), p, n);
            let ev = Evaluator::new(&m, f).expect("checked on the empty graph");
            usize::from(ev.eval_tuple(&[]).expect("a sentence needs no assignment"))
        })
        .sum::<usize>();
    let (ci_low, ci_high) = wilson(successes, samples);
    Ok(EstimationResult {
        sentence: sentence.to_string(),
        n,
        samples,
        successes,
        estimate: successes as f64 / samples as f64,
        ci_low,
        ci_high,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffRow {
    /// The later of the two sizes.
    pub n: usize,
    /// `a_n - a_{n-1}`.
    pub diff: f64,
    /// Half-width of the 95% interval for `diff`.
    pub diff_ci: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<EstimationResult>,
    pub diffs: Vec<DiffRow>,
}

impl Sweep {
    pub const CSV_HEADER: &'static str = "sentence,n,samples,successes,estimate,ci_low,ci_high,seed,diff,diff_ci";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            writeln!(out, "{},,", r.csv_row()).unwrap();
        }
        let (name, seed) = self.rows.first().map_or((String::new(), 0), |r| (r.sentence.clone(), r.seed));
        for d in &self.diffs {
            writeln!(out, "{name},{},,,,,,{seed},{},{}", d.n, d.diff, d.diff_ci).unwrap();
        }
        out
    }
}

/// Estimates for every `n` in the range and the successive differences with
/// independent-proportion normal intervals.
pub fn vw_sweep(
    p: &PSeq,
    sentence: &str,
    f: &Formula,
    ns: RangeInclusive<usize>,
    samples: usize,
    seed: u64,
) -> Result<Sweep, RandError> {
    let rows = ns.map(|n| estimate_prob(p, n, sentence, f, samples, seed)).collect::<Result<Vec<_>, _>>()?;
    let diffs = rows
        .windows(2)
        .map(|w| {
            let var = |r: &EstimationResult| r.sigma().powi(2);
            DiffRow { n: w[1].n, diff: w[1].estimate - w[0].estimate, diff_ci: Z95 * (var(&w[0]) + var(&w[1])).sqrt() }
        })
        .collect();
    Ok(Sweep { rows, diffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{catalog, eval_sentence, parse};

    fn edge(m: &Structure, i: usize, j: usize) -> bool {
        m.holds(m.vocab().index_of("R").unwrap(), &[i, j])
    }

    #[test]
    fn trivial_sequences() {
        let m = sample_graph_order(&PSeq::zero(), 6, 1);
        assert_eq!(m.all_tuples().count(), 0);
        let path = sample_graph_order(&PSeq::finite(&[(1, 1)]), 6, 1);
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(edge(&path, i, j), i.abs_diff(j) == 1);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = PSeq::Geometric { c: 0.9, q: 0.7 };
        assert_eq!(sample_graph_order(&p, 10, 3), sample_graph_order(&p, 10, 3));
        assert_ne!(sample_graph_order(&p, 10, 3), sample_graph_order(&p, 10, 4));
    }

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson(10, 10);
        assert!(hi > 0.999_999 && lo > 0.6);
        let (lo, hi) = wilson(0, 10);
        assert!(lo == 0.0 && hi < 0.4);
    }

    #[test]
    fn estimates_of_constants() {
        let v = Vocabulary::graph_order();
        let p = PSeq::Geometric { c: 0.5, q: 0.5 };
        let t = estimate_prob(&p, 4, "t", &parse("true", &v).unwrap(), 50, 0).unwrap();
        assert_eq!((t.estimate, t.ci_high), (1.0, 1.0));
        let f = estimate_prob(&p, 4, "f", &parse("false", &v).unwrap(), 50, 0).unwrap();
        assert_eq!(f.estimate, 0.0);
        assert_eq!(estimate_prob(&p, 4, "x", &parse("x0=x0", &v).unwrap(), 5, 0), Err(RandError::NotSentence));
    }

    #[test]
    fn worker_count_does_not_matter() {
        let p = PSeq::Geometric { c: 0.8, q: 0.6 };
        let f = catalog::lookup("has_triangle").unwrap();
        let a = in_pool(1, || estimate_prob(&p, 7, "tri", &f, 300, 9).unwrap());
        let b = in_pool(4, || estimate_prob(&p, 7, "tri", &f, 300, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn edge_frequency_matches_p1() {
        let p = PSeq::finite(&[(1, 2)]);
        let f = parse("E x0. E x1. R(x0,x1)", &Vocabulary::graph_order()).unwrap();
        let r = estimate_prob(&p, 2, "edge", &f, 100_000, 5).unwrap();
        let sigma = (0.25f64 / 1e5).sqrt();
        assert!((r.estimate - 0.5).abs() < 3.0 * sigma, "{}", r.estimate);
    }

    #[test]
    fn strict_psi0_against_enumeration() {
        // p_1 = 1/2 and nothing else: the three points carry edges on {0,1}
        // and {1,2} only, so enumerate those four graphs.
        let f = catalog::lookup("psi0_strict").unwrap();
        let mut exact = 0.0;
        for mask in 0..4u8 {
            let edges = [(0, 1), (1, 2)].into_iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, e)| e);
            if eval_sentence(&graph_from_edges(3, edges), &f).unwrap() {
                exact += 0.25;
            }
        }
        assert_eq!(exact, 0.75);
        let r = estimate_prob(&PSeq::finite(&[(1, 2)]), 3, "psi0_strict", &f, 20_000, 2).unwrap();
        assert!((r.estimate - exact).abs() < 3.0 * (exact * (1.0 - exact) / 2e4).sqrt());
        let lit = estimate_prob(&PSeq::finite(&[(1, 2)]), 3, "psi0", &catalog::lookup("psi0").unwrap(), 100, 2).unwrap();
        assert_eq!(lit.estimate, 1.0);
    }

    #[test]
    fn sweep_shape() {
        let p = PSeq::Geometric { c: 0.5, q: 0.5 };
        let f = catalog::lookup("true").unwrap();
        let s = vw_sweep(&p, "true", &f, 3..=6, 20, 1).unwrap();
        assert_eq!((s.rows.len(), s.diffs.len()), (4, 3));
        assert!(s.diffs.iter().all(|d| d.diff == 0.0));
        assert_eq!(s.to_csv().lines().count(), 1 + 4 + 3);
        assert!(vw_sweep(&p, "true", &f, 3..=3, 20, 1).unwrap().diffs.is_empty());
    }
}
