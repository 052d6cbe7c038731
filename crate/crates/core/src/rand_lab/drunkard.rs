//! The coupled drunkard sampler.
//!
//! A drunkard model on `n* = n + k* + 1` points draws coins for every pair
//! once. Deleting a set `Q` of cutpoints and renumbering turns it into a graph
//! with order on `n* - |Q|` points whose law is the ordinary one, provided the
//! pairs near consecutive cutpoints (the lazy pairs) get fresh coins. Two
//! deletion sets `Q^0 ⊂ Q^1` differing in one point give coupled graphs of
//! sizes `n + 1` and `n`.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng as _;

use super::cutpoints::choose_cutpoints;
use super::sample::graph_from_edges;
use super::spr::{draw, enumerate_law, SprMode};
use super::{PSeq, RandError};
use crate::rng::{substream, Rng};
use crate::structure::{Structure, Vocabulary};

/// Where the deletion candidates `J` sit among the cutpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Layout {
    /// `J` has `2k*` points split evenly into a lower half `J^d` and an upper
    /// half `J^u`, so the lower half can always absorb the demand.
    #[default]
    Padded,
    /// `J` has `2k* - 1` points with `|J^d| = k* - 1`. Draws whose demand
    /// exceeds `J^d` are rejected and redrawn.
    Literal,
}

impl FromStr for Layout {
    type Err = RandError;

    fn from_str(s: &str) -> Result<Self, RandError> {
        match s {
            "padded" => Ok(Layout::Padded),
            "literal" => Ok(Layout::Literal),
            _ => Err(RandError::Parse(format!("unknown layout {s}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrunkardParams {
    pub p: PSeq,
    pub n: usize,
    pub k_star: usize,
    pub d_theta: u32,
    /// Spacing of `J` inside the cutpoints; `3^{d_theta} + 1` when unset.
    pub stride: Option<usize>,
    pub epsilon: f64,
    /// Explicit `m_0, …, m_k`; chosen by [`choose_cutpoints`] when unset.
    pub cutpoints: Option<Vec<usize>>,
    pub layout: Layout,
    pub max_rejections: usize,
}

impl DrunkardParams {
    pub fn new(p: PSeq, n: usize, k_star: usize) -> Self {
        DrunkardParams {
            p,
            n,
            k_star,
            d_theta: 0,
            stride: None,
            epsilon: 0.3,
            cutpoints: None,
            layout: Layout::Padded,
            max_rejections: 10_000,
        }
    }

    pub fn stride(&self) -> usize {
        self.stride.unwrap_or_else(|| 3usize.pow(self.d_theta) + 1)
    }

    /// Number of gaps, `(2k* + 2)·stride`.
    pub fn k(&self) -> usize {
        (2 * self.k_star + 2) * self.stride()
    }

    pub fn cuts(&self) -> Vec<usize> {
        self.cutpoints.clone().unwrap_or_else(|| choose_cutpoints(&self.p, self.epsilon, self.k()).m)
    }
}

/// `Q^0` and `Q^1` as sets of cutpoint indices.
pub(crate) type QPair = [BTreeSet<usize>; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Case {
    Lazy,
    Normal,
    Drunk(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum Coin {
    E(usize, usize),
    E1(usize, usize),
    E2(usize, usize),
    Star(u8, usize, usize),
}

/// A resolved layout.
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    pub p: PSeq,
    pub k_star: usize,
    pub n: usize,
    pub n_star: usize,
    pub cuts: Vec<usize>,
    pub i_set: BTreeSet<usize>,
    pub j_d: Vec<usize>,
    pub j_u: Vec<usize>,
    pub max_rejections: usize,
}

impl Plan {
    pub fn new(params: &DrunkardParams) -> Result<Self, RandError> {
        if params.k_star == 0 {
            return Err(RandError::Range("k* must be positive".into()));
        }
        let stride = params.stride();
        if stride == 0 {
            return Err(RandError::Range("stride must be positive".into()));
        }
        let k = params.k();
        let cuts = params.cuts();
        if cuts.len() != k + 1 || cuts[0] != 0 || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RandError::Range(format!("need {} strictly increasing cutpoints from 0, got {cuts:?}", k + 1)));
        }
        if params.n <= cuts[k] {
            return Err(RandError::Range(format!("n = {} must exceed m_k = {}", params.n, cuts[k])));
        }
        let ks = params.k_star;
        let (top, j_d_len) = match params.layout {
            Layout::Padded => (2 * ks, ks),
            Layout::Literal => (2 * ks - 1, ks - 1),
        };
        let i_end = match params.layout {
            Layout::Padded => 2 * ks * stride + 1,
            Layout::Literal => 2 * ks * stride,
        };
        let i_set = cuts[..i_end].iter().copied().collect();
        let j: Vec<usize> = (1..=top).map(|i| cuts[stride * i]).collect();
        Ok(Plan {
            p: params.p.clone(),
            k_star: ks,
            n: params.n,
            n_star: params.n + ks + 1,
            j_d: j[..j_d_len].to_vec(),
            j_u: j[j_d_len..].to_vec(),
            cuts,
            i_set,
            max_rejections: params.max_rejections,
        })
    }

    pub fn case(&self, i: usize, j: usize) -> Case {
        if self.cuts.windows(2).any(|w| i <= w[0] + 1 && j + 1 >= w[1]) {
            return Case::Lazy;
        }
        match self.i_set.range(i..=j).next() {
            None => Case::Normal,
            Some(&m) => Case::Drunk(m),
        }
    }

    /// The distance index whose probability drives `coin`, given the
    /// deletion set used for lazy coins.
    pub fn coin_index(&self, coin: Coin, q: &BTreeSet<usize>) -> usize {
        match coin {
            Coin::E(i, j) | Coin::E2(i, j) => j - i,
            Coin::E1(i, j) => j - i - 1,
            Coin::Star(_, i, j) => j - i - q.range(i..j).count(),
        }
    }

    /// Edges of the renumbered graph on `0..n*` minus `q`. Lazy pairs get
    /// coin `Star(ell)` when `ell` is given and are non-edges otherwise.
    pub fn build(
        &self,
        q: &BTreeSet<usize>,
        ell: Option<u8>,
        coin: &mut impl FnMut(Coin, usize) -> bool,
    ) -> (usize, Vec<(usize, usize)>) {
        let kept: Vec<usize> = (0..self.n_star).filter(|x| !q.contains(x)).collect();
        let mut edges = Vec::new();
        for (a, &i) in kept.iter().enumerate() {
            for (b, &j) in kept.iter().enumerate().skip(a + 1) {
                let c = match self.case(i, j) {
                    Case::Lazy => match ell {
                        Some(l) => Coin::Star(l, i, j),
                        None => continue,
                    },
                    Case::Normal => Coin::E(i, j),
                    Case::Drunk(m) if q.contains(&m) => Coin::E1(i, j),
                    Case::Drunk(_) => Coin::E2(i, j),
                };
                if coin(c, self.coin_index(c, q)) {
                    edges.push((a, b));
                }
            }
        }
        (kept.len(), edges)
    }

    /// Every `(Q^0, Q^1)` with its probability, rejected draws removed.
    pub fn q_law(&self) -> Result<Vec<(QPair, BigRational)>, RandError> {
        let all: Vec<usize> = (0..self.j_u.len()).collect();
        let upper = enumerate_law(self.j_u.len(), &all, SprMode::Npr)?;
        let lift = |mask: u64, from: &[usize]| -> BTreeSet<usize> {
            (0..from.len()).filter(|&b| mask >> b & 1 == 1).map(|b| from[b]).collect()
        };
        let mut out = Vec::new();
        let mut total = BigRational::zero();
        for ((q0u, q1u), w) in upper {
            let need = self.k_star + 1 - q1u.count_ones() as usize;
            if need > self.j_d.len() {
                continue;
            }
            let subsets: Vec<u64> = (0u64..1 << self.j_d.len()).filter(|m| m.count_ones() as usize == need).collect();
            let each = w / BigRational::from_integer(subsets.len().into());
            for d in subsets {
                let qd = lift(d, &self.j_d);
                let q0: BTreeSet<usize> = qd.union(&lift(q0u, &self.j_u)).copied().collect();
                let q1: BTreeSet<usize> = qd.union(&lift(q1u, &self.j_u)).copied().collect();
                total += &each;
                out.push(([q0, q1], each.clone()));
            }
        }
        if total.is_zero() {
            return Err(RandError::Infeasible("no draw of Q^u leaves a feasible demand on J^d".into()));
        }
        Ok(out.into_iter().map(|(q, w)| (q, w / &total)).collect())
    }

    fn draw_q(&self, rng: &mut Rng) -> Result<([BTreeSet<usize>; 2], usize), RandError> {
        let all: Vec<usize> = (0..self.j_u.len()).collect();
        let mut rejections = 0;
        loop {
            let (q0u, q1u) = draw(rng, self.j_u.len(), &all, SprMode::Npr);
            let need = self.k_star + 1 - q1u.count_ones() as usize;
            if need <= self.j_d.len() {
                let qd: BTreeSet<usize> = self.j_d.choose_multiple(rng, need).copied().collect();
                let up = |mask: u64| (0..self.j_u.len()).filter(move |&b| mask >> b & 1 == 1).map(|b| self.j_u[b]);
                let q0 = qd.iter().copied().chain(up(q0u)).collect();
                let q1 = qd.iter().copied().chain(up(q1u)).collect();
                return Ok(([q0, q1], rejections));
            }
            rejections += 1;
            if rejections > self.max_rejections {
                return Err(RandError::Infeasible(format!("{rejections} rejected draws of Q^u")));
            }
        }
    }
}

/// One coupled draw.
#[derive(Debug, Clone)]
pub struct DrunkardRecord {
    pub n: usize,
    pub n_star: usize,
    pub cuts: Vec<usize>,
    pub j_d: Vec<usize>,
    pub j_u: Vec<usize>,
    /// `Q^0` and `Q^1`.
    pub q: [Vec<usize>; 2],
    pub rejections: usize,
    /// The drunkard model itself over `{<, R, R1, R2, P}`: `R`, `R1`, `R2`
    /// hold the yes-coins `e`, `e¹`, `e²` as pairs `i < j`, and `P` holds the
    /// cutpoints.
    pub model: Structure,
    /// `M_{Q^ℓ}[𝔄]`: lazy pairs are non-edges.
    pub m_q: [Structure; 2],
    /// `M^ℓ`: lazy pairs carry their own coins.
    pub m_ell: [Structure; 2],
}

impl DrunkardRecord {
    /// Whether `M^ℓ` and `M_{Q^ℓ}[𝔄]` coincide.
    pub fn agrees(&self, ell: usize) -> bool {
        self.m_q[ell] == self.m_ell[ell]
    }
}

fn drunkard_vocab() -> Arc<Vocabulary> {
    Arc::new(Vocabulary::from_pairs(&[("<", 2), ("R", 2), ("R1", 2), ("R2", 2), ("P", 1)], Some("<")))
}

pub(crate) fn draw_record(plan: &Plan, rng: &mut Rng) -> Result<DrunkardRecord, RandError> {
    let flip = |rng: &mut Rng, idx: usize| {
        let q = plan.p.p(idx);
        q > 0.0 && rng.gen::<f64>() < q
    };
    let mut coins: HashMap<Coin, bool> = HashMap::new();
    for i in 0..plan.n_star {
        for j in i + 1..plan.n_star {
            match plan.case(i, j) {
                Case::Lazy => {}
                Case::Normal => {
                    coins.insert(Coin::E(i, j), flip(rng, j - i));
                }
                Case::Drunk(_) => {
                    coins.insert(Coin::E1(i, j), flip(rng, j - i - 1));
                    coins.insert(Coin::E2(i, j), flip(rng, j - i));
                }
            }
        }
    }
    let (q, rejections) = plan.draw_q(rng)?;
    let vocab = drunkard_vocab();
    let mut tuples: Vec<(usize, Vec<usize>)> = Vec::new();
    for (c, &yes) in &coins {
        let (sym, i, j) = match *c {
            Coin::E(i, j) => (1, i, j),
            Coin::E1(i, j) => (2, i, j),
            Coin::E2(i, j) => (3, i, j),
            Coin::Star(..) => unreachable!(),
        };
        if yes {
            tuples.push((sym, vec![i, j]));
        }
    }
    tuples.extend(plan.cuts.iter().map(|&m| (4, vec![m])));
    let model = Structure::from_indexed(vocab, plan.n_star, tuples).expect("coins inside the universe");
    let mut m_q = Vec::new();
    let mut m_ell = Vec::new();
    for (ell, qs) in q.iter().enumerate() {
        let (size, edges) = plan.build(qs, None, &mut |c, _| coins[&c]);
        m_q.push(graph_from_edges(size, edges));
        let (size, edges) = plan.build(qs, Some(ell as u8), &mut |c, idx| match c {
            Coin::Star(..) => *coins.entry(c).or_insert_with(|| flip(rng, idx)),
            _ => coins[&c],
        });
        m_ell.push(graph_from_edges(size, edges));
    }
    let [q0, q1] = q;
    Ok(DrunkardRecord {
        n: plan.n,
        n_star: plan.n_star,
        cuts: plan.cuts.clone(),
        j_d: plan.j_d.clone(),
        j_u: plan.j_u.clone(),
        q: [q0.into_iter().collect(), q1.into_iter().collect()],
        rejections,
        model,
        m_q: m_q.try_into().expect("two sides"),
        m_ell: m_ell.try_into().expect("two sides"),
    })
}

/// One coupled draw from its own stream.
pub fn drunkard_sample(params: &DrunkardParams, seed: u64) -> Result<DrunkardRecord, RandError> {
    let plan = Plan::new(params)?;
    draw_record(&plan, &mut substream(seed, 0, "drunkard"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn tiny() -> DrunkardParams {
        DrunkardParams {
            stride: Some(1),
            cutpoints: Some(vec![0, 3, 6, 9, 10]),
            ..DrunkardParams::new(PSeq::finite(&[(1, 2)]), 11, 1)
        }
    }

    #[test]
    fn sizes() {
        let mut p = DrunkardParams::new(PSeq::Geometric { c: 0.5, q: 0.5 }, 0, 2);
        p.stride = Some(1);
        p.n = p.cuts().last().unwrap() + 1;
        for seed in 0..20 {
            let r = drunkard_sample(&p, seed).unwrap();
            assert_eq!(r.m_ell[1].size(), p.n);
            assert_eq!(r.m_ell[0].size(), p.n + 1);
            assert_eq!(r.m_q[1].size(), p.n);
            assert_eq!(r.q[0].len() + 1, r.q[1].len());
            assert!(r.q[0].iter().all(|x| r.q[1].contains(x)));
            assert_eq!(r.rejections, 0);
        }
    }

    #[test]
    fn zero_sequence_is_edgeless() {
        let p = DrunkardParams { p: PSeq::zero(), ..tiny() };
        let r = drunkard_sample(&p, 4).unwrap();
        for m in r.m_q.iter().chain(&r.m_ell) {
            assert_eq!(m.all_tuples().count(), 0);
        }
    }

    #[test]
    fn cases() {
        let plan = Plan::new(&tiny()).unwrap();
        assert_eq!(plan.case(1, 2), Case::Lazy);
        assert_eq!(plan.case(0, 1), Case::Drunk(0));
        assert_eq!(plan.case(2, 3), Case::Drunk(3));
        assert_eq!(plan.case(8, 9), Case::Lazy);
        assert_eq!(plan.case(11, 12), Case::Normal);
        assert_eq!(plan.j_d, vec![3]);
        assert_eq!(plan.j_u, vec![6]);
    }

    #[test]
    fn literal_layout_with_one_star_is_infeasible() {
        let p = DrunkardParams { layout: Layout::Literal, max_rejections: 50, ..tiny() };
        assert!(matches!(drunkard_sample(&p, 0), Err(RandError::Infeasible(_))));
        assert!(matches!(Plan::new(&p).unwrap().q_law(), Err(RandError::Infeasible(_))));
    }

    #[test]
    fn literal_layout_rejects_and_recovers() {
        let p = DrunkardParams {
            layout: Layout::Literal,
            stride: Some(1),
            cutpoints: Some((0..=6).map(|i| 2 * i).collect()),
            ..DrunkardParams::new(PSeq::finite(&[(1, 3)]), 13, 2)
        };
        let mut rejected = 0;
        for seed in 0..40 {
            let r = drunkard_sample(&p, seed).unwrap();
            assert_eq!((r.q[0].len(), r.q[1].len()), (2, 3));
            rejected += r.rejections;
        }
        assert!(rejected > 0);
    }

    #[test]
    fn needs_room_past_the_last_cutpoint() {
        let p = DrunkardParams { n: 10, ..tiny() };
        assert!(matches!(drunkard_sample(&p, 0), Err(RandError::Range(_))));
    }

    #[test]
    fn q_law_sums_to_one() {
        let plan = Plan::new(&tiny()).unwrap();
        let total = plan.q_law().unwrap().into_iter().fold(BigRational::zero(), |a, (_, w)| a + w);
        assert_eq!(total, BigRational::one());
    }
}
