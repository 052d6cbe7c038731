//! Index models read off a marked set of points through bounded windows,
//! and a check that a sentence's truth depends only on the index model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng as _;

use super::DistortedError;
use crate::logic::{eval, eval_sentence, Formula};
use crate::rng::Rng;
use crate::structure::{Structure, Vocabulary};
use crate::theory::{sentence_theory, th, Theory};

fn marked(m: &Structure, p_name: &str) -> Result<Vec<usize>, DistortedError> {
    let p = m.vocab().index_of(p_name).ok_or_else(|| DistortedError::Hypothesis(format!("no symbol {p_name}")))?;
    if m.vocab().arity(p) != 1 {
        return Err(DistortedError::Hypothesis(format!("{p_name} is not unary")));
    }
    if m.vocab().order_symbol().is_none() {
        return Err(DistortedError::Hypothesis("vocabulary has no order".into()));
    }
    Ok((0..m.size()).filter(|&x| m.holds(p, &[x])).collect())
}

/// Checks that the span `[min t, max t]` of every non-order tuple contains
/// at most one marked point.
pub fn check_hypothesis(m: &Structure, p_name: &str) -> Result<(), DistortedError> {
    let ps = marked(m, p_name)?;
    for (sym, t) in m.all_tuples() {
        let (lo, hi) = (*t.iter().min().unwrap_or(&0), *t.iter().max().unwrap_or(&0));
        let inside = ps.iter().filter(|&&x| lo <= x && x <= hi).count();
        if inside > 1 {
            return Err(DistortedError::Hypothesis(format!(
                "{}{t:?} spans {inside} marked points",
                m.vocab().name(sym)
            )));
        }
    }
    Ok(())
}

/// Points `x` such that the closed interval between `x` and `a` holds at
/// most `3^d` marked points.
pub fn window(m: &Structure, marks: &[usize], a: usize, d: u32) -> BTreeSet<usize> {
    let cap = 3usize.pow(d);
    (0..m.size())
        .filter(|&x| {
            let (lo, hi) = (x.min(a), x.max(a));
            marks.iter().filter(|&&p| lo <= p && p <= hi).count() <= cap
        })
        .collect()
}

fn window_model(m: &Structure, marks: &[usize], a: usize, d: u32) -> (Structure, usize) {
    let w = window(m, marks, a, d);
    let at = w.iter().position(|&x| x == a).expect("a is in its own window");
    (m.restrict(&w).expect("window is in range"), at)
}

fn index_vocab(count: usize) -> Arc<Vocabulary> {
    let mut symbols = vec![("<".to_string(), 2)];
    symbols.extend((0..count).map(|l| (format!("P{l}"), 1)));
    Arc::new(Vocabulary::new(symbols, Some("<")).expect("fresh names"))
}

fn index_model(count: usize, colors: Vec<Vec<usize>>) -> Structure {
    let vocab = index_vocab(count);
    let ts = colors.iter().enumerate().flat_map(|(x, cs)| cs.iter().map(move |&l| (l + 1, vec![x]))).collect();
    Structure::from_indexed(vocab, colors.len(), ts).expect("colors in range")
}

/// `I[M]`: the marked points in their order, with `a ∈ P_l` when `phis[l]`
/// holds of `a` inside the window of `a` at depth `d`.
pub fn i_of_m(m: &Structure, p_name: &str, phis: &[Formula], d: u32) -> Result<Structure, DistortedError> {
    check_hypothesis(m, p_name)?;
    let marks = marked(m, p_name)?;
    let mut colors = Vec::with_capacity(marks.len());
    for &a in &marks {
        let (w, at) = window_model(m, &marks, a, d);
        let mut cs = Vec::new();
        for (l, phi) in phis.iter().enumerate() {
            let env = BTreeMap::from([(0, at)]);
            if eval(&w, phi, &env).map_err(|e| DistortedError::Hypothesis(e.to_string()))? {
                cs.push(l);
            }
        }
        colors.push(cs);
    }
    Ok(index_model(phis.len(), colors))
}

#[derive(Debug, Clone)]
pub struct C216Config {
    pub p_name: String,
}

impl Default for C216Config {
    fn default() -> Self {
        C216Config { p_name: "P".into() }
    }
}

#[derive(Debug, Clone)]
pub struct C216Report {
    pub depth: u32,
    pub instances: usize,
    /// Instances with no marked point. Their index model is empty, so they
    /// are left out of the grouping.
    pub unmarked: usize,
    pub window_types: usize,
    pub groups: usize,
    /// Pairs of pool indices in one group with different truth values.
    pub violations: Vec<(usize, usize)>,
    models: Vec<Structure>,
}

impl C216Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for C216Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "c216_check depth={} instances={} unmarked={}", self.depth, self.instances, self.unmarked)?;
        writeln!(f, "window_types={} groups={} violations={}", self.window_types, self.groups, self.violations.len())?;
        for &(a, b) in self.violations.iter().take(5) {
            writeln!(f, "  {} vs {}", self.models[a].to_json(), self.models[b].to_json())?;
        }
        Ok(())
    }
}

/// Colors each marked point by its window type at depth `d[φ]` (equivalently,
/// by which characteristic formula of a realized window type it satisfies),
/// groups the pool by the depth-`d[φ]` theory of the index model, and
/// reports groups whose members disagree on `φ`.
pub fn c216_check(pool: &[Structure], phi: &Formula, cfg: &C216Config) -> Result<C216Report, DistortedError> {
    let d = phi.depth();
    let mut per_model: Vec<Vec<Theory>> = Vec::with_capacity(pool.len());
    let mut types: BTreeMap<Arc<str>, Theory> = BTreeMap::new();
    for m in pool {
        check_hypothesis(m, &cfg.p_name)?;
        let marks = marked(m, &cfg.p_name)?;
        let mut ts = Vec::with_capacity(marks.len());
        for &a in &marks {
            let (w, at) = window_model(m, &marks, a, d);
            let t = th(&w, &[at], d, 0)?;
            types.insert(t.encode(), t);
            ts.push(t);
        }
        per_model.push(ts);
    }
    let order: BTreeMap<Theory, usize> = types.values().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut groups: BTreeMap<Theory, (bool, usize)> = BTreeMap::new();
    let mut violations = Vec::new();
    let mut unmarked = 0;
    for (i, (m, ts)) in pool.iter().zip(per_model).enumerate() {
        if ts.is_empty() {
            unmarked += 1;
            continue;
        }
        let im = index_model(order.len(), ts.iter().map(|t| vec![order[t]]).collect());
        let key = sentence_theory(&im, d);
        let truth = eval_sentence(m, phi).map_err(|e| DistortedError::Hypothesis(e.to_string()))?;
        let entry = groups.entry(key).or_insert((truth, i));
        if entry.0 != truth {
            violations.push((entry.1, i));
        }
    }
    Ok(C216Report {
        depth: d,
        instances: pool.len(),
        unmarked,
        window_types: order.len(),
        groups: groups.len(),
        violations,
        models: pool.to_vec(),
    })
}

/// A random structure over `{<, R, P}` with `1..=max_marks` marked points
/// where every `R`-edge spans at most one marked point.
pub fn random_instance(rng: &mut Rng, vocab: &Arc<Vocabulary>, n: usize, max_marks: usize, density: f64) -> Structure {
    let r = vocab.index_of("R").expect("vocabulary has R");
    let p = vocab.index_of("P").expect("vocabulary has P");
    let count = rng.gen_range(1..=max_marks.min(n).max(1));
    let mut marks: Vec<usize> = rand::seq::index::sample(rng, n, count).into_vec();
    marks.sort_unstable();
    let mut ts: Vec<(usize, Vec<usize>)> = marks.iter().map(|&x| (p, vec![x])).collect();
    for x in 0..n {
        for y in x + 1..n {
            let inside = marks.iter().filter(|&&q| x <= q && q <= y).count();
            if inside <= 1 && rng.gen_bool(density) {
                ts.push((r, vec![x, y]));
                ts.push((r, vec![y, x]));
            }
        }
    }
    Structure::from_indexed(vocab.clone(), n, ts).expect("tuples in range")
}
