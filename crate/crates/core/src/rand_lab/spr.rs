//! Perturbed pairs of index subsets.
//!
//! `Q^no` is a uniform subset of `I` and `Q^yes` differs from it at one
//! uniform point `s ∈ J`. In the non-decreasing variant only draws with
//! `s ∉ Q^no` are kept, so `Q^no ⊆ Q^yes`. Subsets of `I = {0..|I|}` are bit
//! masks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng as _;

use super::RandError;
use crate::rng::{substream, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SprMode {
    Spr,
    Npr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SprPair {
    pub i_size: usize,
    pub j: Vec<usize>,
    pub q_no: u64,
    pub q_yes: u64,
}

impl SprPair {
    pub fn flipped(&self) -> usize {
        (self.q_no ^ self.q_yes).trailing_zeros() as usize
    }
}

/// Exact law of `(Q^no, Q^yes)`.
pub type SprLaw = BTreeMap<(u64, u64), BigRational>;

fn check(i_size: usize, j: &[usize]) -> Result<(), RandError> {
    if j.is_empty() || j.iter().any(|&x| x >= i_size) || i_size > 62 {
        return Err(RandError::BadJ);
    }
    Ok(())
}

pub(crate) fn draw(rng: &mut Rng, i_size: usize, j: &[usize], mode: SprMode) -> (u64, u64) {
    loop {
        let q_no = rng.gen::<u64>() & ((1u64 << i_size) - 1);
        let s = *j.choose(rng).expect("J is nonempty");
        if mode == SprMode::Npr && q_no >> s & 1 == 1 {
            continue;
        }
        return (q_no, q_no ^ 1 << s);
    }
}

pub fn sample_spr(i_size: usize, j: &[usize], mode: SprMode, seed: u64) -> Result<SprPair, RandError> {
    check(i_size, j)?;
    let (q_no, q_yes) = draw(&mut substream(seed, 0, "spr"), i_size, j, mode);
    Ok(SprPair { i_size, j: j.to_vec(), q_no, q_yes })
}

/// The law obtained by running through every draw of the sampler, with the
/// rejected draws of the non-decreasing variant removed and the rest
/// renormalized.
pub fn enumerate_law(i_size: usize, j: &[usize], mode: SprMode) -> Result<SprLaw, RandError> {
    check(i_size, j)?;
    let mut counts: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    let mut kept = 0u64;
    for q in 0..1u64 << i_size {
        for &s in j {
            if mode == SprMode::Npr && q >> s & 1 == 1 {
                continue;
            }
            *counts.entry((q, q ^ 1 << s)).or_default() += 1;
            kept += 1;
        }
    }
    let mut law = SprLaw::new();
    for (k, c) in counts {
        law.insert(k, BigRational::new(c.into(), kept.into()));
    }
    Ok(law)
}

/// The law written down directly: every admissible pair has mass
/// `1/(2^|I|·|J|)`, or twice that in the non-decreasing variant.
pub fn closed_form_law(i_size: usize, j: &[usize], mode: SprMode) -> Result<SprLaw, RandError> {
    check(i_size, j)?;
    let j_mask: u64 = j.iter().map(|&s| 1u64 << s).sum();
    let base = BigRational::new(BigInt::one(), BigInt::from(1u64 << i_size) * j.len());
    let mass = if mode == SprMode::Npr { base * BigInt::from(2) } else { base };
    let mut law = SprLaw::new();
    for a in 0..1u64 << i_size {
        for b in 0..1u64 << i_size {
            let x = a ^ b;
            let ok = x.count_ones() == 1 && x & j_mask == x && (mode == SprMode::Spr || b & x != 0);
            if ok {
                law.insert((a, b), mass.clone());
            }
        }
    }
    Ok(law)
}

/// `law` conditioned on `Q^no ⊆ Q^yes`.
pub fn condition_on_growth(law: &SprLaw) -> SprLaw {
    let kept: SprLaw = law.iter().filter(|((a, b), _)| a & !b == 0).map(|(k, v)| (*k, v.clone())).collect();
    let total = kept.values().fold(BigRational::zero(), |acc, v| acc + v);
    kept.into_iter().map(|(k, v)| (k, v / &total)).collect()
}

pub fn swapped(law: &SprLaw) -> SprLaw {
    law.iter().map(|((a, b), v)| ((*b, *a), v.clone())).collect()
}
