//! Bounded theories of components.

use std::collections::HashMap;

use super::DistortedError;
use crate::system::{FGrowth, System};
use crate::theory::intern::{canonical_set, intern, Kind, Node};
use crate::theory::schema::project_leaf;
use crate::theory::th::{th0, Realizer};
use crate::theory::Theory;

fn check_range(s: &System, tuple: &[usize]) -> Result<(), DistortedError> {
    match tuple.iter().find(|&&x| x >= s.universe()) {
        Some(&x) => Err(DistortedError::OutOfRange(x)),
        None => Ok(()),
    }
}

/// Whether every element of `tuple` lies in `N⁺_r(tuple[0])`.
pub fn component_check(s: &System, tuple: &[usize], r: u32) -> Result<bool, DistortedError> {
    let &a0 = tuple.first().ok_or(DistortedError::EmptyTuple)?;
    check_range(s, tuple)?;
    Ok(tuple.iter().all(|&x| s.dist(a0, x).within(r)))
}

/// Shares intermediate results across many bounded-theory computations on
/// one system.
pub(super) struct Ctx<'a> {
    s: &'a System,
    f: &'a FGrowth,
    memo: HashMap<(Vec<usize>, u32, u32), Theory>,
}

impl<'a> Ctx<'a> {
    pub(super) fn new(s: &'a System, f: &'a FGrowth) -> Self {
        Ctx { s, f, memo: HashMap::new() }
    }

    /// Assumes `tuple` is a component of radius `r`.
    pub(super) fn go(&mut self, tuple: &[usize], n: u32, r: u32) -> Theory {
        let key = (tuple.to_vec(), n, r);
        if let Some(&t) = self.memo.get(&key) {
            return t;
        }
        let out = if n == 0 {
            th0(self.s, self.s.signature_id(), tuple, r)
        } else {
            let k = n - 1;
            let inner = self.f.f(k, r);
            let outer = self.f.iter(k, r, 2);
            let a0 = tuple[0];
            let t0 = self.go(tuple, k, r);
            let mut t1 = Vec::new();
            let mut t2 = Vec::new();
            let mut ext = tuple.to_vec();
            for c in 0..self.s.universe() {
                let d = self.s.dist(a0, c);
                if d.within(inner) {
                    ext.push(c);
                    t2.push(self.go(&ext, k, outer));
                    ext.pop();
                } else if d.within(outer) {
                    t1.push(self.go(&[c], k, r));
                }
            }
            intern(Node::Compound {
                kind: Kind::Bounded,
                header: Box::new([n, r, tuple.len() as u32]),
                groups: Box::new([Box::new([t0]), canonical_set(t1), canonical_set(t2)]),
            })
        };
        self.memo.insert(key, out);
        out
    }
}

/// `bth^n_r(tuple)`: at depth 0 the atom table at radius `r`; at depth
/// `n+1` the triple of the depth-`n` value, the set of depth-`n` values of
/// single points in the annulus `N⁺_{f_n²(r)} \ N⁺_{f_n(r)}` around the
/// anchor, and the set of depth-`n` values (at radius `f_n²(r)`) of the
/// tuple extended by a point of the inner ball `N⁺_{f_n(r)}`.
pub fn bth(s: &System, tuple: &[usize], n: u32, r: u32, f: &FGrowth) -> Result<Theory, DistortedError> {
    if !component_check(s, tuple, r)? {
        return Err(DistortedError::NotComponent(r));
    }
    Ok(Ctx::new(s, f).go(tuple, n, r))
}

/// Renames the positions of a bounded theory: position `p` of the result
/// reads position `proj[p]`. The anchor must stay in place (`proj[0] == 0`),
/// so reorderings of the other positions and prefixes are both covered.
pub fn project_bth(t: Theory, proj: &[u32]) -> Theory {
    assert_eq!(proj.first(), Some(&0), "the anchor must stay at position 0");
    match &*t.node() {
        Node::Leaf { radius, .. } => project_leaf(t, proj, *radius),
        Node::Compound { kind: Kind::Bounded, header, groups } => {
            let t0 = project_bth(groups[0][0], proj);
            let mut ext = proj.to_vec();
            ext.push(header[2]);
            let t2 = groups[2].iter().map(|&u| project_bth(u, &ext)).collect();
            intern(Node::Compound {
                kind: Kind::Bounded,
                header: Box::new([header[0], header[1], proj.len() as u32]),
                groups: Box::new([Box::new([t0]), groups[1].clone(), canonical_set(t2)]),
            })
        }
        _ => panic!("not a bounded theory"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{Structure, Vocabulary};
    use crate::system::LiftMode;
    use crate::theory::th;
    use std::sync::Arc;

    fn path(n: usize) -> System {
        let v = Arc::new(Vocabulary::from_pairs(&[("R", 2)], None));
        let ts = (1..n).flat_map(|i| [(0, vec![i - 1, i]), (0, vec![i, i - 1])]).collect();
        System::lift(&Structure::from_indexed(v, n, ts).unwrap(), LiftMode::Dis)
    }

    #[test]
    fn components() {
        let s = path(3);
        let (a, c) = (s.i_elem(0), s.i_elem(2));
        assert!(component_check(&s, &[a, c], 2).unwrap());
        assert!(!component_check(&s, &[a, c], 1).unwrap());
        assert!(component_check(&s, &[c], 0).unwrap());
        assert_eq!(component_check(&s, &[], 0), Err(DistortedError::EmptyTuple));
        let sim = System::lift(&Structure::linear_order(3), LiftMode::Sim);
        assert!(!component_check(&sim, &[0, 1], 3).unwrap());
    }

    #[test]
    fn depth_zero_is_the_atom_table() {
        let s = path(4);
        let t = bth(&s, &[1, 2], 0, 2, &FGrowth::default()).unwrap();
        assert_eq!(t, th(&s, &[1, 2], 0, 2).unwrap());
    }

    #[test]
    fn annulus_on_a_path() {
        // f_0(0) = 1 and f_0(f_0(0)) = 2: the annulus is distance exactly 2
        let s = path(5);
        let a = s.i_elem(2);
        let t = bth(&s, &[a], 1, 0, &FGrowth::default()).unwrap();
        let node = t.node();
        let Node::Compound { groups, .. } = &*node else { panic!() };
        let expect: Vec<Theory> = [0, 4, s.i_elem(0), s.i_elem(4)].iter().map(|&c| th(&s, &[c], 0, 0).unwrap()).collect();
        assert_eq!(groups[1], canonical_set(expect));
        assert_eq!(t.depth(), 1);
        assert_eq!(t.arity(), 1);
    }

    #[test]
    fn not_a_component() {
        let s = path(5);
        assert_eq!(bth(&s, &[0, 4], 1, 1, &FGrowth::default()), Err(DistortedError::NotComponent(1)));
    }

    #[test]
    fn projections_match_recomputation() {
        let s = path(5);
        let f = FGrowth::default();
        let t = bth(&s, &[1, 2, 0], 1, 1, &f).unwrap();
        assert_eq!(project_bth(t, &[0, 2, 1]), bth(&s, &[1, 0, 2], 1, 1, &f).unwrap());
        assert_eq!(project_bth(t, &[0, 1]), bth(&s, &[1, 2], 1, 1, &f).unwrap());
    }
}
