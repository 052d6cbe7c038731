//! Randomized check of the matched-sums property: two ordered sums whose
//! marked summands carry equal positioned theories, whose unmarked stretches
//! use summands of equal theories, and whose stretch lengths agree or are
//! both long, give the marked tuples equal theories.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::rng::substream;
use crate::structure::{ordered_sum, Structure};
use crate::theory::{sentence_theory, th, Theory, TheoryError};

#[derive(Debug, Clone)]
pub struct StarConfig {
    pub depth: u32,
    pub trials: usize,
    pub seed: u64,
    /// Largest number of marked summands.
    pub max_marks: usize,
    /// Largest subtuple inside one marked summand.
    pub max_subtuple: usize,
    /// Largest total tuple length.
    pub max_tuple: usize,
}

impl Default for StarConfig {
    fn default() -> Self {
        StarConfig { depth: 2, trials: 500, seed: 0, max_marks: 2, max_subtuple: 2, max_tuple: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct StarCounterexample {
    pub trial: usize,
    pub left: Structure,
    pub left_tuple: Vec<usize>,
    pub right: Structure,
    pub right_tuple: Vec<usize>,
    pub left_theory: Theory,
    pub right_theory: Theory,
}

#[derive(Debug, Clone)]
pub struct StarReport {
    pub seed: u64,
    pub depth: u32,
    pub trials: usize,
    pub counterexamples: Vec<StarCounterexample>,
}

impl StarReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

impl fmt::Display for StarReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "star_d_check depth={} trials={} seed={}", self.depth, self.trials, self.seed)?;
        writeln!(f, "counterexamples={}", self.counterexamples.len())?;
        for c in &self.counterexamples {
            writeln!(f, "trial {}", c.trial)?;
            writeln!(f, "  left  {} tuple {:?}", c.left.to_json(), c.left_tuple)?;
            writeln!(f, "  right {} tuple {:?}", c.right.to_json(), c.right_tuple)?;
            writeln!(f, "  left theory  {}", c.left_theory)?;
            writeln!(f, "  right theory {}", c.right_theory)?;
        }
        Ok(())
    }
}

/// Pool entries `(index, tuple)` sharing one positioned theory.
type Class = Vec<(usize, Vec<usize>)>;

struct Classes {
    /// Pool indices grouped by sentence theory.
    sentence: Vec<Vec<usize>>,
    /// `(pool index, tuple)` grouped by positioned theory, keyed by tuple length.
    positioned: BTreeMap<usize, Vec<Class>>,
}

fn tuples_of(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..n).map(move |x| [t.clone(), vec![x]].concat())).collect();
    }
    out
}

fn classify(pool: &[Structure], cfg: &StarConfig) -> Classes {
    let mut sentence: BTreeMap<Theory, Vec<usize>> = BTreeMap::new();
    let mut positioned: BTreeMap<usize, BTreeMap<Theory, Class>> = BTreeMap::new();
    for (i, m) in pool.iter().enumerate() {
        sentence.entry(sentence_theory(m, cfg.depth)).or_default().push(i);
        for len in 1..=cfg.max_subtuple {
            for t in tuples_of(m.size(), len) {
                let key = th(m, &t, cfg.depth, 0).expect("tuple in range");
                positioned.entry(len).or_default().entry(key).or_default().push((i, t));
            }
        }
    }
    Classes {
        sentence: sentence.into_values().collect(),
        positioned: positioned.into_iter().map(|(k, v)| (k, v.into_values().collect())).collect(),
    }
}

/// Builds random matched pairs of sums from `pool` and compares the theories
/// of the marked tuples computed directly in each sum.
pub fn star_d_check(pool: &[Structure], cfg: &StarConfig) -> Result<StarReport, TheoryError> {
    let first = pool.first().ok_or_else(|| TheoryError::Mismatch("empty summand pool".into()))?;
    if pool.iter().any(|m| m.vocab() != first.vocab()) {
        return Err(TheoryError::Mismatch("summand pool mixes vocabularies".into()));
    }
    let vocab = first.vocab().clone();
    let classes = classify(pool, cfg);
    let long = (1usize << cfg.depth).saturating_sub(1);
    let mut counterexamples = Vec::new();
    for trial in 0..cfg.trials {
        let mut rng = substream(cfg.seed, trial as u64, "star-d");
        let marks = rng.gen_range(0..=cfg.max_marks);
        let mut sides: [(Vec<Structure>, Vec<usize>); 2] = Default::default();
        let mut offset = [0usize; 2];
        let mut room = cfg.max_tuple;
        for gap in 0..=marks {
            let class = classes.sentence.choose(&mut rng).unwrap();
            let lens = if rng.gen_bool(0.5) {
                let l = rng.gen_range(0..=long + 2);
                [l, l]
            } else {
                [rng.gen_range(long..=long + 3), rng.gen_range(long..=long + 3)]
            };
            for s in 0..2 {
                for _ in 0..lens[s] {
                    let m = &pool[*class.choose(&mut rng).unwrap()];
                    offset[s] += m.size();
                    sides[s].0.push(m.clone());
                }
            }
            if gap == marks {
                break;
            }
            let cap = cfg.max_subtuple.min(room);
            let len = if cap == 0 { 0 } else { rng.gen_range(1..=cap) };
            room -= len;
            let class: Class = match classes.positioned.get(&len) {
                Some(cs) if len > 0 => cs.choose(&mut rng).unwrap().clone(),
                _ => classes.sentence.choose(&mut rng).unwrap().iter().map(|&i| (i, Vec::new())).collect(),
            };
            for s in 0..2 {
                let (idx, t) = class.choose(&mut rng).unwrap();
                let m = &pool[*idx];
                sides[s].1.extend(t.iter().map(|&x| x + offset[s]));
                offset[s] += m.size();
                sides[s].0.push(m.clone());
            }
        }
        let build = |parts: &[Structure]| {
            if parts.is_empty() {
                Structure::empty_relations(vocab.clone(), 0)
            } else {
                ordered_sum(parts).expect("pool shares one vocabulary")
            }
        };
        let (l, r) = (build(&sides[0].0), build(&sides[1].0));
        let tl = th(&l, &sides[0].1, cfg.depth, 0)?;
        let tr = th(&r, &sides[1].1, cfg.depth, 0)?;
        if tl != tr {
            counterexamples.push(StarCounterexample {
                trial,
                left: l,
                left_tuple: sides[0].1.clone(),
                right: r,
                right_tuple: sides[1].1.clone(),
                left_theory: tl,
                right_theory: tr,
            });
        }
    }
    Ok(StarReport { seed: cfg.seed, depth: cfg.depth, trials: cfg.trials, counterexamples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_only() {
        let pool = vec![Structure::linear_order(1)];
        let report = star_d_check(&pool, &StarConfig { trials: 60, ..Default::default() }).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.to_string().contains("counterexamples=0"));
    }

    #[test]
    fn empty_pool_is_infeasible() {
        assert!(star_d_check(&[], &StarConfig::default()).is_err());
    }
}
