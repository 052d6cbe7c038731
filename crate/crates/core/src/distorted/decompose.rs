//! Greedy merging of overlapping balls around tuple points.

use std::collections::BTreeMap;

use super::DistortedError;
use crate::system::{DistMatrix, FGrowth};

/// How the radii of merged points combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusRule {
    #[default]
    Sum,
    Max,
}

impl RadiusRule {
    fn combine(self, a: u32, b: u32) -> u32 {
        match self {
            RadiusRule::Sum => a + b,
            RadiusRule::Max => a.max(b),
        }
    }
}

/// Surviving positions `w`, their depths `n_i`, and the map `g` sending
/// every position to the survivor that absorbed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub w: Vec<usize>,
    pub n: BTreeMap<usize, u32>,
    pub g: Vec<usize>,
}

impl Decomposition {
    fn identity(m: usize) -> Self {
        Decomposition { w: (0..m).collect(), n: (0..m).map(|i| (i, 0)).collect(), g: (0..m).collect() }
    }

    /// Ball radius `f_{n_i}(combined radii of g⁻¹(i))` around survivor `i`.
    pub fn radius(&self, i: usize, radii: &[u32], f: &FGrowth, rule: RadiusRule) -> u32 {
        let r = (0..self.g.len()).filter(|&j| self.g[j] == i).map(|j| radii[j]).fold(0, |a, b| rule.combine(a, b));
        f.f(self.n[&i], r)
    }

    /// Every violated postcondition: budget, pairwise disjointness of the
    /// balls (as subsets of the whole space), and cover of all points.
    pub fn violations(&self, d: &DistMatrix, points: &[usize], radii: &[u32], f: &FGrowth, rule: RadiusRule) -> Vec<String> {
        let mut out = Vec::new();
        let total: u32 = self.n.values().sum();
        if total as usize + self.w.len() > points.len() {
            out.push(format!("budget: sum n = {total} exceeds m - |w| = {}", points.len() - self.w.len()));
        }
        if self.w.iter().any(|&i| self.g[i] != i) || self.g.iter().any(|j| !self.w.contains(j)) {
            out.push("g is not a retraction onto w".into());
        }
        let rad: Vec<u32> = self.w.iter().map(|&i| self.radius(i, radii, f, rule)).collect();
        for (x, &i) in self.w.iter().enumerate() {
            for (y, &j) in self.w.iter().enumerate().skip(x + 1) {
                if meets(d, points[i], rad[x], points[j], rad[y]) {
                    out.push(format!("balls around positions {i} and {j} meet"));
                }
            }
        }
        for (j, &p) in points.iter().enumerate() {
            if !self.w.iter().zip(&rad).any(|(&i, &r)| d.get(points[i], p).within(r)) {
                out.push(format!("point {j} is not covered"));
            }
        }
        out
    }
}

fn meets(d: &DistMatrix, a: usize, ra: u32, b: usize, rb: u32) -> bool {
    (0..d.size()).any(|x| d.get(a, x).within(ra) && d.get(b, x).within(rb))
}

/// Checks `2 f_{n1}(r1) + f_{n2}(r2) ≤ f_{n1+n2+1}(combined r1, r2)` and
/// monotonicity for all `n1 + n2 < max_n` and `r1, r2 ≤ max_r`.
pub fn star_holds(f: &FGrowth, max_n: u32, max_r: u32, rule: RadiusRule) -> Result<(), String> {
    for n1 in 0..max_n {
        for n2 in 0..max_n - n1 {
            for r1 in 0..=max_r {
                for r2 in 0..=max_r {
                    let lhs = 2 * f.f(n1, r1) + f.f(n2, r2);
                    let rhs = f.f(n1 + n2 + 1, rule.combine(r1, r2));
                    if lhs > rhs {
                        return Err(format!("2 f_{n1}({r1}) + f_{n2}({r2}) = {lhs} > {rhs}"));
                    }
                }
                if f.f(n1 + 1, r1) < f.f(n1, r1) || f.f(n1, r1 + 1) < f.f(n1, r1) {
                    return Err(format!("f is not monotone at n={n1}, r={r1}"));
                }
            }
        }
    }
    Ok(())
}

fn merge(c: &Decomposition, keep: usize, gone: usize) -> Decomposition {
    let mut next = c.clone();
    next.w.retain(|&i| i != gone);
    let n_gone = next.n.remove(&gone).expect("gone is a survivor");
    *next.n.get_mut(&keep).expect("keep is a survivor") += n_gone + 1;
    for g in next.g.iter_mut() {
        if *g == gone {
            *g = keep;
        }
    }
    next
}

fn covers(c: &Decomposition, d: &DistMatrix, points: &[usize], radii: &[u32], f: &FGrowth, rule: RadiusRule) -> bool {
    let rad: Vec<u32> = c.w.iter().map(|&i| c.radius(i, radii, f, rule)).collect();
    points.iter().all(|&p| c.w.iter().zip(&rad).any(|(&i, &r)| d.get(points[i], p).within(r)))
}

/// Starts from every position surviving with depth 0 and repeatedly merges
/// two survivors whose balls meet, the absorbed one's depth plus one added
/// to the absorber's.
///
/// When `f` satisfies the merge inequality any meeting pair may be merged in
/// either direction. Otherwise the first pair and direction (in position
/// order) that keeps every point covered is taken, and the call fails if no
/// merge does.
pub fn decompose_components(
    d: &DistMatrix,
    points: &[usize],
    radii: &[u32],
    f: &FGrowth,
    rule: RadiusRule,
) -> Result<Decomposition, DistortedError> {
    if points.len() != radii.len() {
        return Err(DistortedError::LengthMismatch(points.len(), radii.len()));
    }
    if let Some(&p) = points.iter().find(|&&p| p >= d.size()) {
        return Err(DistortedError::OutOfRange(p));
    }
    let mut c = Decomposition::identity(points.len());
    loop {
        let rad: Vec<u32> = c.w.iter().map(|&i| c.radius(i, radii, f, rule)).collect();
        let mut meeting = Vec::new();
        for x in 0..c.w.len() {
            for y in x + 1..c.w.len() {
                if meets(d, points[c.w[x]], rad[x], points[c.w[y]], rad[y]) {
                    meeting.push((c.w[x], c.w[y]));
                    meeting.push((c.w[y], c.w[x]));
                }
            }
        }
        if meeting.is_empty() {
            return Ok(c);
        }
        c = meeting
            .into_iter()
            .map(|(keep, gone)| merge(&c, keep, gone))
            .find(|next| covers(next, d, points, radii, f, rule))
            .ok_or_else(|| DistortedError::Growth("no merge of meeting balls keeps every point covered".into()))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::Dist;

    fn line(n: usize) -> DistMatrix {
        let cells = (0..n * n).map(|k| Dist::Fin((k / n).abs_diff(k % n) as u32)).collect();
        DistMatrix::new(n, cells).unwrap()
    }

    #[test]
    fn far_points_stay_apart() {
        let d = DistMatrix::discrete(4);
        let c = decompose_components(&d, &[0, 1, 2, 3], &[3, 3, 3, 3], &FGrowth::default(), RadiusRule::Sum).unwrap();
        assert_eq!(c, Decomposition::identity(4));
    }

    #[test]
    fn equal_points_merge_once() {
        let d = DistMatrix::discrete(2);
        let f = FGrowth::default();
        let c = decompose_components(&d, &[1, 1], &[0, 0], &f, RadiusRule::Sum).unwrap();
        assert_eq!(c.w.len(), 1);
        assert_eq!(c.n.values().sum::<u32>(), 1);
        assert!(c.violations(&d, &[1, 1], &[0, 0], &f, RadiusRule::Sum).is_empty());
    }

    #[test]
    fn tight_cluster() {
        let d = line(20);
        let f = FGrowth::default();
        let pts = [5, 6, 7, 8, 9];
        let c = decompose_components(&d, &pts, &[0; 5], &f, RadiusRule::Sum).unwrap();
        assert_eq!(c.w.len(), 1);
        assert!(c.n.values().sum::<u32>() <= 4);
        assert!(c.violations(&d, &pts, &[0; 5], &f, RadiusRule::Sum).is_empty());
    }

    #[test]
    fn default_rule_and_the_merge_inequality() {
        let f = FGrowth::default();
        assert!(star_holds(&f, 3, 0, RadiusRule::Sum).is_ok());
        assert!(star_holds(&f, 3, 1, RadiusRule::Sum).is_err());
        let steep = FGrowth::new(|n, r| 4u32.pow(n) * (r + 1), false);
        assert!(star_holds(&steep, 4, 6, RadiusRule::Sum).is_ok());
    }
}
