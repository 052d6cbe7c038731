//! Disagreement probabilities for sums whose summands flip between two
//! versions at one random position.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::spr::{draw, SprMode};
use super::RandError;
use crate::compose::{oplus_sentences, order_theory};
use crate::rng::substream;
use crate::structure::{ordered_sum, Structure};
use crate::theory::{sentence_theory, Theory};

fn join(a: Option<Theory>, b: Option<Theory>) -> Option<Theory> {
    match (a, b) {
        (Some(a), Some(b)) => Some(oplus_sentences(a, b).expect("checked sentence theories of one depth")),
        (a, None) => a,
        (None, b) => b,
    }
}

fn check_pairs(pairs: &[(Theory, Theory)]) -> Result<(), RandError> {
    let Some(&(first, _)) = pairs.first() else { return Ok(()) };
    for &(a, b) in pairs {
        for t in [a, b] {
            if t.depth() != first.depth() || t.sig() != first.sig() || t.arity() != 0 {
                return Err(RandError::Range("summand theories must be sentence theories of one depth and vocabulary".into()));
            }
        }
    }
    Ok(())
}

/// Frequency, over `trials` draws of `(Q^no, Q^yes)` from the symmetric
/// perturbation law on all `k = pairs.len()` positions, of
/// `th(Σ t_i^{Q^no}) ≠ th(Σ t_i^{Q^yes})`, where position `i` contributes
/// `pairs[i].1` when `i ∈ Q` and `pairs[i].0` otherwise.
///
/// The two sums agree off the flipped position `s`, so each trial composes
/// one prefix, one suffix and two middle theories.
pub fn claim33_estimate(pairs: &[(Theory, Theory)], trials: usize, seed: u64) -> Result<f64, RandError> {
    check_pairs(pairs)?;
    let k = pairs.len();
    if k == 0 || trials == 0 {
        return Ok(0.0);
    }
    if k > 62 {
        return Err(RandError::Guard(format!("{k} positions exceed 62")));
    }
    let all: Vec<usize> = (0..k).collect();
    let mut rng = substream(seed, 0, "claim33");
    let mut differ = 0usize;
    for _ in 0..trials {
        let (q_no, q_yes) = draw(&mut rng, k, &all, SprMode::Spr);
        let s = (q_no ^ q_yes).trailing_zeros() as usize;
        let pick = |i: usize| if q_no >> i & 1 == 1 { pairs[i].1 } else { pairs[i].0 };
        let prefix = (0..s).fold(None, |acc, i| join(acc, Some(pick(i))));
        let suffix = (s + 1..k).rev().fold(None, |acc, i| join(Some(pick(i)), acc));
        let other = if q_yes >> s & 1 == 1 { pairs[s].1 } else { pairs[s].0 };
        let no = join(join(prefix, Some(pick(s))), suffix);
        let yes = join(join(prefix, Some(other)), suffix);
        differ += usize::from(no != yes);
    }
    Ok(differ as f64 / trials as f64)
}

/// A sentence theory together with a structure realizing it.
#[derive(Debug, Clone)]
pub struct Letter {
    pub theory: Theory,
    pub rep: Structure,
}

impl Letter {
    pub fn of(rep: Structure, depth: u32) -> Self {
        Letter { theory: sentence_theory(&rep, depth), rep }
    }
}

/// The distinct depth-`d` theories of linear orders, the empty order
/// included. Orders of size `2^d` and above all share one theory.
pub fn order_alphabet(d: u32) -> Vec<Letter> {
    let cap = 1usize << d.min(8);
    let mut out: Vec<Letter> = Vec::new();
    for n in 0..=cap {
        let t = order_theory(n, d);
        if out.iter().all(|l| l.theory != t) {
            out.push(Letter { theory: t, rep: Structure::linear_order(n) });
        }
    }
    out
}

/// Result of the exhaustive search for the worst configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaValue {
    pub k: usize,
    /// `1 - max Prob(disagree | flip in J)`.
    pub zeta: BigRational,
    /// `1 - max min(1, (r/k)·Prob(disagree | flip in J))`.
    pub zeta_scaled: BigRational,
    /// The worst configuration for `zeta`: `r`, `J`, and letter indices of
    /// `(no, yes)` per position.
    pub witness: (usize, Vec<usize>, Vec<(usize, usize)>),
}

/// Largest number of (configuration, subset) evaluations [`exact_zeta`] runs.
pub const ZETA_GUARD: u64 = 2_000_000;

struct Config {
    r: usize,
    j: Vec<usize>,
    pairs: Vec<(usize, usize)>,
}

/// Every `r ∈ [k, 2k+1]`, `J ⊆ r` with `|J| = k`, and letters: a free pair on
/// each position of `J` and one shared letter elsewhere.
fn configs(k: usize, a: usize, mut visit: impl FnMut(&Config)) {
    for r in k..=2 * k + 1 {
        for jm in 0u64..1 << r {
            if jm.count_ones() as usize != k {
                continue;
            }
            let j: Vec<usize> = (0..r).filter(|&i| jm >> i & 1 == 1).collect();
            let radix: Vec<usize> = (0..r).map(|i| if jm >> i & 1 == 1 { a * a } else { a }).collect();
            let mut digits = vec![0usize; r];
            loop {
                let pairs = (0..r)
                    .map(|i| if jm >> i & 1 == 1 { (digits[i] / a, digits[i] % a) } else { (digits[i], digits[i]) })
                    .collect();
                visit(&Config { r, j: j.clone(), pairs });
                let mut p = 0;
                while p < r && digits[p] + 1 == radix[p] {
                    digits[p] = 0;
                    p += 1;
                }
                if p == r {
                    break;
                }
                digits[p] += 1;
            }
        }
    }
}

fn count_cost(k: usize, a: usize) -> u64 {
    let mut total = 0u64;
    for r in k..=2 * k + 1 {
        let binom = (0u64..1 << r).filter(|m| m.count_ones() as usize == k).count() as u64;
        let words = (a as u64).saturating_pow((r + k) as u32);
        total = total.saturating_add(binom.saturating_mul(words).saturating_mul(1 << r));
    }
    total
}

fn search(
    k: usize,
    alphabet: &[Letter],
    mut sum: impl FnMut(&[usize]) -> Theory,
) -> Result<ZetaValue, RandError> {
    if k == 0 || alphabet.is_empty() {
        return Err(RandError::Range("need k ≥ 1 and a nonempty alphabet".into()));
    }
    let cost = count_cost(k, alphabet.len());
    if cost > ZETA_GUARD {
        return Err(RandError::Guard(format!("{cost} evaluations exceed {ZETA_GUARD}")));
    }
    let mut best = (BigRational::zero(), None);
    let mut best_scaled = BigRational::zero();
    configs(k, alphabet.len(), |c| {
        let word = |q: u64| -> Vec<usize> {
            (0..c.r).map(|i| if q >> i & 1 == 1 { c.pairs[i].1 } else { c.pairs[i].0 }).collect()
        };
        let theories: Vec<Theory> = (0u64..1 << c.r).map(|q| sum(&word(q))).collect();
        let differ = (0u64..1 << c.r)
            .flat_map(|q| c.j.iter().map(move |&s| (q, q ^ 1 << s)))
            .filter(|&(a, b)| theories[a as usize] != theories[b as usize])
            .count();
        let p = BigRational::new(differ.into(), ((1usize << c.r) * k).into());
        let scaled = (p.clone() * BigRational::new(c.r.into(), k.into())).min(BigRational::one());
        if p > best.0 || best.1.is_none() {
            best = (p, Some((c.r, c.j.clone(), c.pairs.clone())));
        }
        if scaled > best_scaled {
            best_scaled = scaled;
        }
    });
    let (p, witness) = best;
    Ok(ZetaValue {
        k,
        zeta: BigRational::one() - p,
        zeta_scaled: BigRational::one() - best_scaled,
        witness: witness.expect("at least one configuration"),
    })
}

/// `ζ_k` relative to `alphabet`, by exhaustive search over sums of at most
/// `2k+1` summands, with sums composed from the letters' theories.
pub fn exact_zeta(k: usize, alphabet: &[Letter]) -> Result<ZetaValue, RandError> {
    let ts: Vec<(Theory, Theory)> = alphabet.iter().map(|l| (l.theory, l.theory)).collect();
    check_pairs(&ts)?;
    let mut memo: HashMap<Vec<usize>, Option<Theory>> = HashMap::new();
    search(k, alphabet, |w| {
        // prefixes are shared between words, so memoize them
        fn go(w: &[usize], alphabet: &[Letter], memo: &mut HashMap<Vec<usize>, Option<Theory>>) -> Option<Theory> {
            if let Some(t) = memo.get(w) {
                return *t;
            }
            let t = match w.split_last() {
                None => None,
                Some((&last, init)) => join(go(init, alphabet, memo), Some(alphabet[last].theory)),
            };
            memo.insert(w.to_vec(), t);
            t
        }
        go(w, alphabet, &mut memo).unwrap_or_else(|| {
            let m = &alphabet[0].rep;
            sentence_theory(&Structure::empty_relations(m.vocab().clone(), 0), alphabet[0].theory.depth())
        })
    })
}

/// The same search with every sum built as a structure from the letters'
/// representatives and its theory computed directly.
pub fn zeta_oracle(k: usize, alphabet: &[Letter]) -> Result<ZetaValue, RandError> {
    let d = alphabet.first().map_or(0, |l| l.theory.depth());
    search(k, alphabet, |w| {
        let parts: Vec<Structure> = w.iter().map(|&i| alphabet[i].rep.clone()).collect();
        let m = if parts.is_empty() {
            Structure::empty_relations(alphabet[0].rep.vocab().clone(), 0)
        } else {
            ordered_sum(&parts).expect("letters share a vocabulary")
        };
        sentence_theory(&m, d)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::structure::Vocabulary;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn alphabet_sizes() {
        assert_eq!(order_alphabet(0).len(), 1);
        assert_eq!(order_alphabet(1).len(), 2);
        assert_eq!(order_alphabet(2).len(), 4);
    }

    #[test]
    fn singleton_alphabet_never_disagrees() {
        let a = vec![Letter::of(Structure::linear_order(1), 1)];
        for k in 1..=2 {
            let z = exact_zeta(k, &a).unwrap();
            assert_eq!((z.zeta.clone(), z.zeta_scaled.clone()), (q(1, 1), q(1, 1)));
        }
    }

    #[test]
    fn depth_one_orders() {
        let a = order_alphabet(1);
        let z1 = exact_zeta(1, &a).unwrap();
        let z2 = exact_zeta(2, &a).unwrap();
        assert_eq!(z1.zeta, q(0, 1));
        assert_eq!(z2.zeta, q(1, 2));
        assert_eq!(z2.zeta_scaled, q(0, 1));
        assert!(z1.zeta <= z2.zeta);
        assert_eq!(z1, zeta_oracle(1, &a).unwrap());
        assert_eq!(z2, zeta_oracle(2, &a).unwrap());
    }

    #[test]
    fn guard() {
        assert!(matches!(exact_zeta(2, &order_alphabet(3)), Err(RandError::Guard(_))));
    }

    #[test]
    fn equal_pairs_never_disagree() {
        let t = order_theory(3, 2);
        for k in [1, 5, 20] {
            assert_eq!(claim33_estimate(&vec![(t, t); k], 100, 1).unwrap(), 0.0);
        }
        let mixed = [(t, order_theory(3, 1))];
        assert!(claim33_estimate(&mixed, 10, 0).is_err());
    }

    #[test]
    fn long_orders_absorb_a_flip() {
        let pairs = vec![(order_theory(1, 2), order_theory(5, 2)); 20];
        assert_eq!(claim33_estimate(&pairs, 500, 3).unwrap(), 0.0);
    }

    #[test]
    fn coloured_points() {
        let v = Arc::new(Vocabulary::from_pairs(&[("<", 2), ("P", 1)], Some("<")));
        let plain = sentence_theory(&Structure::empty_relations(v.clone(), 1), 2);
        let marked = sentence_theory(&Structure::from_indexed(v, 1, vec![(1, vec![0])]).unwrap(), 2);
        let f = |k: usize, seed| claim33_estimate(&vec![(plain, marked); k], 4000, seed).unwrap();
        let (a, b) = (f(20, 1), f(40, 1));
        assert!(a < 0.5 && b <= a + 0.02, "{a} {b}");
        assert!((f(20, 2) - a).abs() < 0.04);
    }
}
