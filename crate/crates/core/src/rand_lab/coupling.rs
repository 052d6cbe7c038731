//! Checks that each side of the drunkard coupling has the ordinary law.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::drunkard::{draw_record, Coin, Plan};
use super::sample::wilson;
use super::{DrunkardParams, PSeq, RandError};
use crate::rng::substream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// Full rational enumeration of every coin.
    Exact,
    /// Edge-count goodness of fit over sampled draws.
    Chisq,
}

impl FromStr for CouplingMode {
    type Err = RandError;

    fn from_str(s: &str) -> Result<Self, RandError> {
        match s {
            "exact" => Ok(CouplingMode::Exact),
            "chisq" => Ok(CouplingMode::Chisq),
            _ => Err(RandError::Parse(format!("unknown mode {s}"))),
        }
    }
}

/// Largest number of random coins one exact enumeration may flip.
pub const COIN_GUARD: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct SideReport {
    pub ell: usize,
    /// Size of `M^ℓ`, which is `n + 1 - ℓ`.
    pub size: usize,
    pub tv_distance: Option<BigRational>,
    pub chisq_pvalue: Option<f64>,
    /// `Prob(M^ℓ = M_{Q^ℓ}[𝔄])`, exact or estimated.
    pub agreement: f64,
    pub agreement_ci: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub mode: CouplingMode,
    pub seed: u64,
    pub samples: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub rejections: usize,
    pub sides: [SideReport; 2],
}

impl CouplingReport {
    pub const CSV_HEADER: &'static str =
        "mode,ell,size,samples,tv_distance,chisq_pvalue,agreement,agreement_ci_low,agreement_ci_high,rejections,seed";

    /// Exact mode: both total-variation distances vanish. Sampling mode:
    /// both p-values exceed `alpha`.
    pub fn passed(&self) -> bool {
        self.sides.iter().all(|s| match self.mode {
            CouplingMode::Exact => s.tv_distance.as_ref().is_some_and(Zero::is_zero),
            CouplingMode::Chisq => s.chisq_pvalue.is_some_and(|p| p > self.alpha),
        })
    }

    /// Whether `Prob(M^ℓ = M_{Q^ℓ}[𝔄]) ≥ 1 - ε/3` is consistent with the data.
    pub fn agreement_ok(&self) -> bool {
        self.sides.iter().all(|s| s.agreement_ci.1 >= 1.0 - self.epsilon / 3.0)
    }

    pub fn to_csv(&self) -> String {
        let mode = match self.mode {
            CouplingMode::Exact => "exact",
            CouplingMode::Chisq => "chisq",
        };
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for s in &self.sides {
            out += &format!(
                "{mode},{},{},{},{},{},{},{},{},{},{}\n",
                s.ell,
                s.size,
                self.samples,
                s.tv_distance.as_ref().map_or(String::new(), |t| t.to_string()),
                s.chisq_pvalue.map_or(String::new(), |p| p.to_string()),
                s.agreement,
                s.agreement_ci.0,
                s.agreement_ci.1,
                self.rejections,
                self.seed
            );
        }
        out
    }
}

impl fmt::Display for CouplingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_csv())?;
        write!(f, "passed={} agreement_ok={}", self.passed(), self.agreement_ok())
    }
}

type Law = BTreeMap<Vec<(usize, usize)>, BigRational>;

fn trivial(p: &BigRational) -> Option<bool> {
    if p.is_zero() {
        Some(false)
    } else if p.is_one() {
        Some(true)
    } else {
        None
    }
}

/// Enumerates the random bits named in `coins` (those with probability
/// strictly between 0 and 1), calling `visit` with each assignment's weight.
fn enumerate_coins<K: Ord + Copy>(
    coins: &[(K, BigRational)],
    mut visit: impl FnMut(&BTreeMap<K, bool>, BigRational),
) -> Result<(), RandError> {
    if coins.len() > COIN_GUARD {
        return Err(RandError::Guard(format!("{} random coins exceed {COIN_GUARD}", coins.len())));
    }
    for mask in 0u64..1 << coins.len() {
        let mut w = BigRational::one();
        let mut values = BTreeMap::new();
        for (b, (c, p)) in coins.iter().enumerate() {
            let yes = mask >> b & 1 == 1;
            w *= if yes { p.clone() } else { BigRational::one() - p };
            values.insert(*c, yes);
        }
        visit(&values, w);
    }
    Ok(())
}

/// Exact law of the ordinary graph with order on `size` points.
fn direct_law(p: &PSeq, size: usize) -> Result<Law, RandError> {
    let pairs: Vec<(usize, usize)> = (0..size).flat_map(|i| (i + 1..size).map(move |j| (i, j))).collect();
    let coins: Vec<((usize, usize), BigRational)> =
        pairs.iter().map(|&(i, j)| ((i, j), p.p_exact(j - i))).filter(|(_, q)| trivial(q).is_none()).collect();
    let mut law = Law::new();
    enumerate_coins(&coins, |values, w| {
        let edges = pairs
            .iter()
            .copied()
            .filter(|&(i, j)| trivial(&p.p_exact(j - i)).unwrap_or_else(|| values[&(i, j)]))
            .collect();
        *law.entry(edges).or_insert_with(BigRational::zero) += w;
    })?;
    Ok(law)
}

fn exact_side(plan: &Plan, ell: usize) -> Result<(Law, BigRational), RandError> {
    let mut law = Law::new();
    let mut agree = BigRational::zero();
    for (qs, wq) in plan.q_law()? {
        let q: &BTreeSet<usize> = &qs[ell];
        let mut coins = Vec::new();
        plan.build(q, Some(ell as u8), &mut |c, idx| {
            let pr = plan.p.p_exact(idx);
            if trivial(&pr).is_none() {
                coins.push((c, pr));
            }
            false
        });
        let mut failure = None;
        enumerate_coins(&coins, |values, w| {
            let mut lazy_edge = false;
            let (_, edges) = plan.build(q, Some(ell as u8), &mut |c: Coin, idx| {
                let yes = trivial(&plan.p.p_exact(idx)).unwrap_or_else(|| values[&c]);
                lazy_edge |= yes && matches!(c, Coin::Star(..));
                yes
            });
            let w = w * &wq;
            if !lazy_edge {
                agree += &w;
            }
            *law.entry(edges).or_insert_with(BigRational::zero) += w;
        })
        .unwrap_or_else(|e| failure = Some(e));
        if let Some(e) = failure {
            return Err(e);
        }
    }
    Ok((law, agree))
}

fn tv(a: &Law, b: &Law) -> BigRational {
    let keys: BTreeSet<&Vec<(usize, usize)>> = a.keys().chain(b.keys()).collect();
    let zero = BigRational::zero();
    let total = keys.into_iter().fold(BigRational::zero(), |acc, k| {
        acc + (a.get(k).unwrap_or(&zero) - b.get(k).unwrap_or(&zero)).abs()
    });
    total / BigRational::from_integer(2.into())
}

/// Law of the number of edges on `size` points, by dynamic programming over
/// the independent pairs.
pub fn edge_count_law(p: &PSeq, size: usize) -> Vec<f64> {
    let mut law = vec![1.0];
    for i in 0..size {
        for j in i + 1..size {
            let q = p.p(j - i);
            let mut next = vec![0.0; law.len() + 1];
            for (c, &w) in law.iter().enumerate() {
                next[c] += w * (1.0 - q);
                next[c + 1] += w * q;
            }
            law = next;
        }
    }
    law
}

/// Pearson's test of observed counts against `law`, with adjacent cells
/// merged until each expects at least 5 draws.
pub fn chisq_pvalue(observed: &[usize], law: &[f64]) -> f64 {
    let total: usize = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for c in 0..law.len().max(observed.len()) {
        o += *observed.get(c).unwrap_or(&0) as f64;
        e += law.get(c).unwrap_or(&0.0) * total as f64;
        if e >= 5.0 {
            cells.push((o, e));
            (o, e) = (0.0, 0.0);
        }
    }
    match cells.last_mut() {
        Some(last) => {
            last.0 += o;
            last.1 += e;
        }
        None => return 1.0,
    }
    if cells.len() < 2 {
        return 1.0;
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    ChiSquared::new((cells.len() - 1) as f64).expect("positive degrees of freedom").sf(stat)
}

/// Runs the coupled sampler and compares `M^0`, `M^1` with the ordinary laws
/// on `n + 1` and `n` points. `samples` is ignored in exact mode.
pub fn coupling_check(
    params: &DrunkardParams,
    mode: CouplingMode,
    samples: usize,
    seed: u64,
) -> Result<CouplingReport, RandError> {
    let plan = Plan::new(params)?;
    let sizes = [plan.n + 1, plan.n];
    let sides: Vec<SideReport>;
    let mut rejections = 0;
    match mode {
        CouplingMode::Exact => {
            sides = (0..2)
                .map(|ell| {
                    let (law, agree) = exact_side(&plan, ell)?;
                    let a = agree.to_f64().unwrap_or(0.0);
                    Ok(SideReport {
                        ell,
                        size: sizes[ell],
                        tv_distance: Some(tv(&law, &direct_law(&plan.p, sizes[ell])?)),
                        chisq_pvalue: None,
                        agreement: a,
                        agreement_ci: (a, a),
                    })
                })
                .collect::<Result<_, RandError>>()?;
        }
        CouplingMode::Chisq => {
            if samples == 0 {
                return Err(RandError::Range("samples must be at least 1".into()));
            }
            let draws: Vec<([usize; 2], [bool; 2], usize)> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let r = draw_record(&plan, &mut substream(seed, i as u64, "coupling"))?;
                    let edges = [0, 1].map(|l| r.m_ell[l].all_tuples().count() / 2);
                    Ok((edges, [r.agrees(0), r.agrees(1)], r.rejections))
                })
                .collect::<Result<_, RandError>>()?;
            rejections = draws.iter().map(|d| d.2).sum();
            sides = (0..2)
                .map(|ell| {
                    let law = edge_count_law(&plan.p, sizes[ell]);
                    let mut observed = vec![0usize; law.len()];
                    for d in &draws {
                        observed[d.0[ell]] += 1;
                    }
                    let agree = draws.iter().filter(|d| d.1[ell]).count();
                    SideReport {
                        ell,
                        size: sizes[ell],
                        tv_distance: None,
                        chisq_pvalue: Some(chisq_pvalue(&observed, &law)),
                        agreement: agree as f64 / samples as f64,
                        agreement_ci: wilson(agree, samples),
                    }
                })
                .collect();
        }
    }
    Ok(CouplingReport {
        mode,
        seed,
        samples: if mode == CouplingMode::Exact { 0 } else { samples },
        epsilon: params.epsilon,
        alpha: 0.001,
        rejections,
        sides: sides.try_into().expect("two sides"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rand_lab::Layout;

    fn tiny(k_star: usize, cuts: Vec<usize>, n: usize) -> DrunkardParams {
        DrunkardParams { stride: Some(1), cutpoints: Some(cuts), ..DrunkardParams::new(PSeq::finite(&[(1, 2)]), n, k_star) }
    }

    #[test]
    fn exact_tiny_instances() {
        for params in [tiny(1, vec![0, 3, 6, 9, 10], 11), tiny(2, vec![0, 3, 6, 9, 12, 13, 14], 15)] {
            let r = coupling_check(&params, CouplingMode::Exact, 0, 0).unwrap();
            assert!(r.passed(), "{r}");
            assert!(r.sides.iter().all(|s| s.agreement > 0.0 && s.agreement < 1.0));
        }
    }

    #[test]
    fn exact_mode_detects_a_wrong_law() {
        let plan = Plan::new(&tiny(1, vec![0, 3, 6, 9, 10], 11)).unwrap();
        let (law, _) = exact_side(&plan, 0).unwrap();
        let wrong = direct_law(&PSeq::finite(&[(1, 3)]), 12).unwrap();
        assert!(tv(&law, &wrong) > BigRational::zero());
        // the lazy coins matter: dropping them changes the law
        let (law1, _) = exact_side(&plan, 1).unwrap();
        assert_eq!(tv(&law1, &direct_law(&plan.p, 11).unwrap()), BigRational::zero());
    }

    #[test]
    fn zero_sequence() {
        let params = DrunkardParams { p: PSeq::zero(), ..tiny(1, vec![0, 3, 6, 9, 10], 11) };
        let r = coupling_check(&params, CouplingMode::Exact, 0, 0).unwrap();
        assert!(r.passed());
        assert_eq!(r.sides[0].agreement, 1.0);
    }

    #[test]
    fn exact_guard() {
        let params = DrunkardParams {
            p: PSeq::Geometric { c: 0.5, q: 0.5 },
            ..tiny(1, vec![0, 3, 6, 9, 10], 11)
        };
        assert!(matches!(coupling_check(&params, CouplingMode::Exact, 0, 0), Err(RandError::Guard(_))));
    }

    #[test]
    fn chisq_small_run() {
        let params = DrunkardParams { p: PSeq::Geometric { c: 0.5, q: 0.5 }, ..tiny(1, vec![0, 3, 6, 9, 10], 12) };
        let r = coupling_check(&params, CouplingMode::Chisq, 5000, 1).unwrap();
        assert!(r.passed(), "{r}");
        let lit = DrunkardParams { layout: Layout::Literal, max_rejections: 5, ..params };
        assert!(coupling_check(&lit, CouplingMode::Chisq, 10, 1).is_err());
    }

    #[test]
    fn pvalue_flags_a_shifted_sample() {
        let law = edge_count_law(&PSeq::finite(&[(1, 2)]), 6);
        let good: Vec<usize> = law.iter().map(|w| (w * 10_000.0).round() as usize).collect();
        assert!(chisq_pvalue(&good, &law) > 0.5);
        let mut bad = good.clone();
        bad.rotate_right(1);
        assert!(chisq_pvalue(&bad, &law) < 1e-6);
    }
}
