//! Behavioral check that the theory of a tuple made of components around
//! far apart anchors is a function of the components' bounded theories and
//! the anchors' sparse theory in the expanded index model.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;

use super::bth::Ctx;
use super::expand::{expand_pool, expanded_system, ExpandLimits};
use super::sparse::{sparse_check, uth};
use super::DistortedError;
use crate::rng::substream;
use crate::structure::{Structure, Vocabulary};
use crate::system::{FGrowth, LiftMode, System};
use crate::theory::{th, Theory};

#[derive(Debug, Clone)]
pub struct Lemma214Config {
    pub depth: u32,
    /// Largest number of components.
    pub max_k: usize,
    /// Radii tried for each component.
    pub radii: Vec<u32>,
    /// Component lengths tried.
    pub lens: Vec<u32>,
    pub f: FGrowth,
    /// Cap on instances per system and parameter choice; `None` is exhaustive.
    pub trials: Option<usize>,
    pub seed: u64,
}

impl Default for Lemma214Config {
    fn default() -> Self {
        Lemma214Config {
            depth: 1,
            max_k: 2,
            radii: vec![0, 1],
            lens: vec![1, 2],
            f: FGrowth::default(),
            trials: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Lemma214Violation {
    pub radii: Vec<u32>,
    pub lens: Vec<u32>,
    pub first: (usize, Vec<usize>),
    pub second: (usize, Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct Lemma214Report {
    pub seed: u64,
    pub depth: u32,
    pub instances: usize,
    pub groups: usize,
    pub largest_group: usize,
    pub violations: Vec<Lemma214Violation>,
    /// M-parts of the pool, for printing counterexamples.
    models: Vec<Structure>,
}

impl Lemma214Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for Lemma214Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "lemma214_check depth={} seed={} instances={}", self.depth, self.seed, self.instances)?;
        writeln!(f, "groups={} largest_group={} violations={}", self.groups, self.largest_group, self.violations.len())?;
        for v in self.violations.iter().take(5) {
            writeln!(f, "radii {:?} lens {:?}", v.radii, v.lens)?;
            for (s, t) in [&v.first, &v.second] {
                writeln!(f, "  system {s} tuple {t:?} model {}", self.models[*s].to_json())?;
            }
        }
        Ok(())
    }
}

/// Dis-lifted paths, cycles and edgeless graphs on `1..=max_size` vertices
/// over a single symmetric binary relation `R`.
pub fn standard_pool(max_size: usize) -> Vec<System> {
    let v = Arc::new(Vocabulary::from_pairs(&[("R", 2)], None));
    let build = |n: usize, edges: Vec<(usize, usize)>| {
        let ts = edges.into_iter().flat_map(|(a, b)| [(0, vec![a, b]), (0, vec![b, a])]).collect();
        System::lift(&Structure::from_indexed(v.clone(), n, ts).expect("edges in range"), LiftMode::Dis)
    };
    let mut pool = Vec::new();
    for n in 1..=max_size {
        pool.push(build(n, (1..n).map(|i| (i - 1, i)).collect()));
        if n >= 3 {
            pool.push(build(n, (0..n).map(|i| (i, (i + 1) % n)).collect()));
        }
        pool.push(build(n, Vec::new()));
    }
    pool
}

fn vectors(values: &[u32], k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v| values.iter().map(move |&x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

/// All tuples `ā⁰⌢…⌢ā^{k-1}` where `ā^ℓ` has length `lens[ℓ]` and lies in
/// the ball of radius `radii[ℓ]` around its first element, and the first
/// elements are sparse.
fn instances(s: &System, depth: u32, radii: &[u32], lens: &[u32], f: &FGrowth) -> Vec<Vec<usize>> {
    let mut anchors = vec![Vec::new()];
    for _ in 0..radii.len() {
        anchors = anchors.into_iter().flat_map(|a: Vec<usize>| (0..s.universe()).map(move |x| [a.clone(), vec![x]].concat())).collect();
    }
    let mut out = Vec::new();
    for a in anchors {
        let images: Vec<usize> = a.iter().map(|&x| s.i_elem(s.h(x))).collect();
        if !sparse_check(s, &images, depth, radii, f).expect("index elements") {
            continue;
        }
        let mut partial = vec![Vec::new()];
        for (l, &a0) in a.iter().enumerate() {
            let ball: Vec<usize> = (0..s.universe()).filter(|&y| s.dist(a0, y).within(radii[l])).collect();
            let mut comps = vec![vec![a0]];
            for _ in 1..lens[l] {
                comps = comps.into_iter().flat_map(|c| ball.iter().map(move |&y| [c.clone(), vec![y]].concat())).collect();
            }
            partial = partial.into_iter().flat_map(|p| comps.iter().map(move |c| [p.clone(), c.clone()].concat())).collect();
        }
        out.extend(partial);
    }
    out
}

type Key = (Vec<u32>, Vec<u32>, Theory, Vec<Theory>);

/// Groups every admissible instance of every pool system by the pair
/// (sparse theory of the anchors in the expanded index model, bounded
/// theories of the components) and reports groups whose members have
/// different `th^n_0`.
///
/// The index model is expanded with the largest radius and length in use,
/// over a vocabulary shared by the whole pool.
pub fn lemma214_check(pool: &[System], cfg: &Lemma214Config) -> Result<Lemma214Report, DistortedError> {
    let n = cfg.depth;
    let mut expansions: HashMap<(u32, u32), Vec<System>> = HashMap::new();
    let mut groups: HashMap<Key, (Theory, usize, Vec<usize>, usize)> = HashMap::new();
    let mut violations = Vec::new();
    let mut total = 0;
    for k in 0..=cfg.max_k {
        for radii in vectors(&cfg.radii, k) {
            for lens in vectors(&cfg.lens, k) {
                let key = (radii.iter().copied().max().unwrap_or(0), lens.iter().copied().max().unwrap_or(0));
                if let std::collections::hash_map::Entry::Vacant(slot) = expansions.entry(key) {
                    let ex = expand_pool(pool, n, key.0, key.1, &cfg.f, ExpandLimits::default())?;
                    slot.insert(pool.iter().zip(ex).map(|(s, e)| expanded_system(s, e)).collect::<Result<_, _>>()?);
                }
                let ex = &expansions[&key];
                for (si, s) in pool.iter().enumerate() {
                    let mut list = instances(s, n, &radii, &lens, &cfg.f);
                    if let Some(cap) = cfg.trials {
                        if list.len() > cap {
                            let mut rng = substream(cfg.seed, si as u64, "lemma214");
                            list.shuffle(&mut rng);
                            list.truncate(cap);
                        }
                    }
                    let mut ctx = Ctx::new(s, &cfg.f);
                    let mut uths: BTreeMap<Vec<usize>, Theory> = BTreeMap::new();
                    for tuple in list {
                        total += 1;
                        let mut starts = Vec::with_capacity(k);
                        let mut bths = Vec::with_capacity(k);
                        let mut at = 0;
                        for l in 0..k {
                            let part = &tuple[at..at + lens[l] as usize];
                            starts.push(ex[si].i_elem(s.h(part[0])));
                            bths.push(ctx.go(part, n, radii[l]));
                            at += lens[l] as usize;
                        }
                        let u = match uths.get(&starts) {
                            Some(&u) => u,
                            None => {
                                let u = uth(&ex[si], &starts, n, &radii, &cfg.f)?;
                                uths.insert(starts, u);
                                u
                            }
                        };
                        let value = th(s, &tuple, n, 0)?;
                        let entry = groups.entry((radii.clone(), lens.clone(), u, bths)).or_insert((value, si, tuple.clone(), 0));
                        entry.3 += 1;
                        if entry.0 != value {
                            violations.push(Lemma214Violation {
                                radii: radii.clone(),
                                lens: lens.clone(),
                                first: (entry.1, entry.2.clone()),
                                second: (si, tuple),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(Lemma214Report {
        seed: cfg.seed,
        depth: n,
        instances: total,
        groups: groups.len(),
        largest_group: groups.values().map(|g| g.3).max().unwrap_or(0),
        violations,
        models: pool.iter().map(|s| s.m_part().clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_shape() {
        assert_eq!(standard_pool(6).len(), 6 + 4 + 6);
    }

    #[test]
    fn sim_lifted_singletons() {
        let v = Arc::new(Vocabulary::from_pairs(&[("R", 2)], None));
        let pool: Vec<System> = [vec![], vec![(0, vec![0, 1])], vec![(0, vec![1, 1])]]
            .into_iter()
            .map(|ts| System::lift(&Structure::from_indexed(v.clone(), 2, ts).unwrap(), LiftMode::Sim))
            .collect();
        let cfg = Lemma214Config { max_k: 1, radii: vec![0], lens: vec![1], ..Default::default() };
        let report = lemma214_check(&pool, &cfg).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.instances > 0);
    }

    #[test]
    fn small_exhaustive_depth_zero() {
        let cfg = Lemma214Config { depth: 0, ..Default::default() };
        let report = lemma214_check(&standard_pool(4), &cfg).unwrap();
        assert!(report.passed(), "{report}");
    }
}
