//! Two-sorted systems `(M, I, h, d)`: a model, an index model, a surjection
//! from the first onto the second, and a metric on the index model.
//!
//! Elements of a system live in one flat index space: `0..|M|` are the
//! M-sort elements and `|M|..|M|+|I|` are the I-sort elements. `h` is extended
//! to I-sort elements as the identity.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::structure::Structure;

/// A distance in `ℕ ∪ {∞}`. `Inf` orders above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dist {
    Fin(u32),
    Inf,
}

impl Dist {
    pub fn saturating_add(self, other: Dist) -> Dist {
        match (self, other) {
            (Dist::Fin(a), Dist::Fin(b)) => a.checked_add(b).map_or(Dist::Inf, Dist::Fin),
            _ => Dist::Inf,
        }
    }

    #[inline]
    pub fn within(self, r: u32) -> bool {
        matches!(self, Dist::Fin(d) if d <= r)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Fin(d) => write!(f, "{d}"),
            Dist::Inf => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("h must map every M-element into I (got {0} for an index model of size {1})")]
    HOutOfRange(usize, usize),
    #[error("h is not onto I: index element {0} has no preimage")]
    NotOnto(usize),
    #[error("h has length {0} but M has {1} elements")]
    HLength(usize, usize),
    #[error("distance matrix has size {0} but I has {1} elements")]
    DistSize(usize, usize),
    #[error("distance is not a metric: {0}")]
    NotMetric(String),
    #[error("element {0} is out of range")]
    OutOfRange(usize),
}

/// A symmetric `n × n` matrix of distances satisfying the metric axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistMatrix {
    n: usize,
    cells: Vec<Dist>,
}

impl DistMatrix {
    pub fn new(n: usize, cells: Vec<Dist>) -> Result<Self, SystemError> {
        assert_eq!(cells.len(), n * n, "distance matrix must be n*n");
        let m = DistMatrix { n, cells };
        m.validate()?;
        Ok(m)
    }

    /// `0` on the diagonal, `∞` elsewhere.
    pub fn discrete(n: usize) -> Self {
        let mut cells = vec![Dist::Inf; n * n];
        for i in 0..n {
            cells[i * n + i] = Dist::Fin(0);
        }
        DistMatrix { n, cells }
    }

    /// Shortest-path distances in an undirected graph given by adjacency lists.
    pub fn from_graph(n: usize, adj: &[Vec<usize>]) -> Self {
        let mut cells = vec![Dist::Inf; n * n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            cells[s * n + s] = Dist::Fin(0);
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let Dist::Fin(du) = cells[s * n + u] else { unreachable!() };
                for &v in &adj[u] {
                    if cells[s * n + v] == Dist::Inf {
                        cells[s * n + v] = Dist::Fin(du + 1);
                        queue.push_back(v);
                    }
                }
            }
        }
        DistMatrix { n, cells }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Dist {
        self.cells[x * self.n + y]
    }

    fn validate(&self) -> Result<(), SystemError> {
        let n = self.n;
        for x in 0..n {
            if self.get(x, x) != Dist::Fin(0) {
                return Err(SystemError::NotMetric(format!("d({x},{x}) != 0")));
            }
            for y in 0..n {
                if self.get(x, y) != self.get(y, x) {
                    return Err(SystemError::NotMetric(format!("d({x},{y}) != d({y},{x})")));
                }
                for z in 0..n {
                    if self.get(x, z) > self.get(x, y).saturating_add(self.get(y, z)) {
                        return Err(SystemError::NotMetric(format!("triangle fails at {x},{y},{z}")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Which sort a system element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    M,
    I,
}

/// How a plain model is turned into a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftMode {
    /// Distance 0 on the diagonal and ∞ elsewhere.
    Sim,
    /// Gaifman-graph distance.
    Dis,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    m_part: Structure,
    i_part: Structure,
    h: Vec<usize>,
    dist: DistMatrix,
}

impl System {
    pub fn new(m_part: Structure, i_part: Structure, h: Vec<usize>, dist: DistMatrix) -> Result<Self, SystemError> {
        let (nm, ni) = (m_part.size(), i_part.size());
        if h.len() != nm {
            return Err(SystemError::HLength(h.len(), nm));
        }
        if dist.size() != ni {
            return Err(SystemError::DistSize(dist.size(), ni));
        }
        let mut hit = vec![false; ni];
        for &y in &h {
            if y >= ni {
                return Err(SystemError::HOutOfRange(y, ni));
            }
            hit[y] = true;
        }
        if let Some(missing) = hit.iter().position(|&b| !b) {
            return Err(SystemError::NotOnto(missing));
        }
        Ok(System { m_part, i_part, h, dist })
    }

    /// Lifts a model: `I` is a disjoint copy of `M`, `h` is the identity.
    pub fn lift(m: &Structure, mode: LiftMode) -> System {
        let n = m.size();
        let dist = match mode {
            LiftMode::Sim => DistMatrix::discrete(n),
            LiftMode::Dis => DistMatrix::from_graph(n, &gaifman_adjacency(m)),
        };
        System { m_part: m.clone(), i_part: m.clone(), h: (0..n).collect(), dist }
    }

    /// A system whose M-part is an unlabelled copy of the index model.
    /// Only the index side is meaningful; used for expanded index models.
    pub fn index_only(i_part: Structure, dist: DistMatrix) -> Result<System, SystemError> {
        let n = i_part.size();
        let vocab = std::sync::Arc::new(crate::structure::Vocabulary::empty());
        System::new(Structure::empty_relations(vocab, n), i_part, (0..n).collect(), dist)
    }

    pub fn m_part(&self) -> &Structure {
        &self.m_part
    }

    pub fn i_part(&self) -> &Structure {
        &self.i_part
    }

    pub fn dist_matrix(&self) -> &DistMatrix {
        &self.dist
    }

    pub fn m_size(&self) -> usize {
        self.m_part.size()
    }

    pub fn i_size(&self) -> usize {
        self.i_part.size()
    }

    /// Number of elements of both sorts.
    pub fn universe(&self) -> usize {
        self.m_size() + self.i_size()
    }

    #[inline]
    pub fn sort(&self, x: usize) -> Sort {
        if x < self.m_size() {
            Sort::M
        } else {
            Sort::I
        }
    }

    /// Flat index of I-sort element `i`.
    #[inline]
    pub fn i_elem(&self, i: usize) -> usize {
        self.m_size() + i
    }

    /// The I-sort element (as an index into I) that `x` maps to.
    #[inline]
    pub fn h(&self, x: usize) -> usize {
        if x < self.m_size() {
            self.h[x]
        } else {
            x - self.m_size()
        }
    }

    /// `d(h(x), h(y))` for elements of either sort.
    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> Dist {
        self.dist.get(self.h(x), self.h(y))
    }

    /// `N⁺_r(x) = { y : d(h(y), h(x)) ≤ r }`, sorted.
    pub fn neighborhood(&self, x: usize, r: u32) -> Result<Vec<usize>, SystemError> {
        if x >= self.universe() {
            return Err(SystemError::OutOfRange(x));
        }
        Ok((0..self.universe()).filter(|&y| self.dist(x, y).within(r)).collect())
    }
}

/// Adjacency lists of the Gaifman graph: elements joined when they occur
/// together in some tuple of some relation (including the order, if any).
pub fn gaifman_adjacency(m: &Structure) -> Vec<Vec<usize>> {
    let n = m.size();
    let mut adj = vec![std::collections::BTreeSet::new(); n];
    let mut join = |t: &[usize]| {
        for &a in t {
            for &b in t {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    };
    if m.vocab().order_symbol().is_some() {
        for a in 0..n {
            for b in a + 1..n {
                join(&[a, b]);
            }
        }
    }
    for (_, t) in m.all_tuples() {
        join(t);
    }
    adj.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// The growth function `f_n(r)` driving the radii of bounded and sparse theories.
#[derive(Clone, Copy)]
pub struct FGrowth {
    rule: fn(u32, u32) -> u32,
    nice: bool,
}

impl fmt::Debug for FGrowth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FGrowth").field("nice", &self.nice).finish_non_exhaustive()
    }
}

fn default_rule(n: u32, r: u32) -> u32 {
    r.saturating_add(3u32.saturating_pow(n))
}

impl Default for FGrowth {
    /// `f_n(r) = r + 3ⁿ`. Four iterations overshoot `f_{n+1}`, so it is not nice.
    fn default() -> Self {
        FGrowth { rule: default_rule, nice: false }
    }
}

impl FGrowth {
    pub fn new(rule: fn(u32, u32) -> u32, nice: bool) -> Self {
        FGrowth { rule, nice }
    }

    pub fn is_nice(&self) -> bool {
        self.nice
    }

    #[inline]
    pub fn f(&self, n: u32, r: u32) -> u32 {
        (self.rule)(n, r)
    }

    /// `f_n^{(k)}(r)`: `k`-fold iteration.
    pub fn iter(&self, n: u32, r: u32, k: u32) -> u32 {
        (0..k).fold(r, |acc, _| self.f(n, acc))
    }

    /// Lists every violated growth inequality for `n, r ≤ max`.
    pub fn convention_violations(&self, max: u32) -> Vec<String> {
        let mut out = Vec::new();
        for n in 0..=max {
            for r in 0..=max {
                let f = self.f(n, r);
                if f <= r {
                    out.push(format!("f_{n}({r}) = {f} is not > {r}"));
                }
                if n < max && self.f(n + 1, r) < f {
                    out.push(format!("f not monotone in n at n={n}, r={r}"));
                }
                if r < max && self.f(n, r + 1) < f {
                    out.push(format!("f not monotone in r at n={n}, r={r}"));
                }
                if self.iter(n, r, 3) > self.f(n + 1, r) {
                    out.push(format!("f_{n}^(3)({r}) > f_{}({r})", n + 1));
                }
                if self.iter(n, r, 2) < f.saturating_add(self.f(n, 0)) {
                    out.push(format!("f_{n}^(2)({r}) < f_{n}({r}) + f_{n}(0)"));
                }
                if self.nice && self.iter(n, r, 4) > self.f(n + 1, r) {
                    out.push(format!("nice: f_{n}^(4)({r}) > f_{}({r})", n + 1));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Vocabulary;
    use std::sync::Arc;

    fn path(n: usize) -> Structure {
        let vocab = Arc::new(Vocabulary::from_pairs(&[("R", 2)], None));
        let mut ts = Vec::new();
        for i in 0..n.saturating_sub(1) {
            ts.push((0, vec![i, i + 1]));
            ts.push((0, vec![i + 1, i]));
        }
        Structure::from_indexed(vocab, n, ts).unwrap()
    }

    #[test]
    fn sim_lift_distances() {
        let s = System::lift(&path(3), LiftMode::Sim);
        assert_eq!(s.dist(0, 1), Dist::Inf);
        assert_eq!(s.dist(0, s.i_elem(0)), Dist::Fin(0));
        assert_eq!(s.neighborhood(1, 0).unwrap(), vec![1, s.i_elem(1)]);
        assert_eq!(s.neighborhood(1, 50).unwrap(), vec![1, s.i_elem(1)]);
    }

    #[test]
    fn dis_lift_distances() {
        let s = System::lift(&path(3), LiftMode::Dis);
        assert_eq!(s.dist(0, 2), Dist::Fin(2));
        assert_eq!(s.neighborhood(1, 1).unwrap().len(), 6);
        let edgeless = Structure::empty_relations(Arc::new(Vocabulary::from_pairs(&[("R", 2)], None)), 2);
        assert_eq!(System::lift(&edgeless, LiftMode::Dis).dist(0, 1), Dist::Inf);
    }

    #[test]
    fn system_validation() {
        let m = path(2);
        let bad = System::new(m.clone(), m.clone(), vec![0, 0], DistMatrix::discrete(2));
        assert_eq!(bad.unwrap_err(), SystemError::NotOnto(1));
        let cells = vec![Dist::Fin(0), Dist::Fin(1), Dist::Fin(2), Dist::Fin(0)];
        assert!(DistMatrix::new(2, cells).is_err());
    }

    #[test]
    fn infinity_saturates() {
        assert!(Dist::Fin(u32::MAX) < Dist::Inf);
        assert_eq!(Dist::Fin(3).saturating_add(Dist::Inf), Dist::Inf);
        assert_eq!(Dist::Fin(u32::MAX).saturating_add(Dist::Fin(1)), Dist::Inf);
    }

    #[test]
    fn default_growth_satisfies_convention() {
        let f = FGrowth::default();
        assert_eq!(f.f(0, 0), 1);
        assert_eq!(f.iter(0, 0, 2), 2);
        assert_eq!(f.f(2, 5), 14);
        assert!(f.convention_violations(12).is_empty());
        assert!(!f.is_nice());
        assert!(!FGrowth::new(default_rule, true).convention_violations(2).is_empty());
    }

    #[test]
    fn bad_growth_is_reported() {
        let f = FGrowth::new(|_, r| r + 1, false);
        assert!(!f.convention_violations(3).is_empty());
    }
}
