//! Sparse tuples of index points and their theories.

use std::collections::HashMap;

use super::DistortedError;
use crate::logic::Formula;
use crate::system::{FGrowth, Sort, System};
use crate::theory::intern::{canonical_set, intern, Kind, Node};
use crate::theory::th::{th0, Realizer};
use crate::theory::Theory;

fn check_index(s: &System, tuple: &[usize]) -> Result<(), DistortedError> {
    for &x in tuple {
        if x >= s.universe() {
            return Err(DistortedError::OutOfRange(x));
        }
        if s.sort(x) != Sort::I {
            return Err(DistortedError::NotIndex(x));
        }
    }
    Ok(())
}

fn sparse(s: &System, tuple: &[usize], n: u32, radii: &[u32], f: &FGrowth) -> bool {
    (0..tuple.len()).all(|l| {
        (l + 1..tuple.len()).all(|k| {
            let need = f.f(n, radii[l]) + f.f(n, radii[k]);
            !s.dist(tuple[l], tuple[k]).within(need)
        })
    })
}

/// Whether `d(a_l, a_k) ≥ f_n(r_l) + f_n(r_k) + 1` for all `l < k`.
/// The tuple holds flat element indices, all of the index sort.
pub fn sparse_check(s: &System, tuple: &[usize], n: u32, radii: &[u32], f: &FGrowth) -> Result<bool, DistortedError> {
    if tuple.len() != radii.len() {
        return Err(DistortedError::LengthMismatch(tuple.len(), radii.len()));
    }
    check_index(s, tuple)?;
    Ok(sparse(s, tuple, n, radii, f))
}

/// The same condition as a quantifier-free formula in `x_0, …, x_{m-1}`.
pub fn sparse_formula(n: u32, radii: &[u32], f: &FGrowth) -> Formula {
    let mut parts = Vec::new();
    for l in 0..radii.len() {
        for k in l + 1..radii.len() {
            let bound = f.f(n, radii[l]) + f.f(n, radii[k]);
            parts.push(Formula::not(Formula::Dist { a: l as u32, b: k as u32, k: bound }));
        }
    }
    Formula::conj(parts)
}

/// All vectors bounded componentwise by `top`.
fn boxes(top: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &t in top {
        out = out.into_iter().flat_map(|v| (0..=t).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn pair(radii: &[u32], t: Theory) -> Theory {
    let mut header = vec![radii.len() as u32];
    header.extend_from_slice(radii);
    intern(Node::Compound { kind: Kind::Pair, header: header.into(), groups: Box::new([Box::new([t])]) })
}

struct Ctx<'a> {
    s: &'a System,
    f: &'a FGrowth,
    memo: HashMap<(Vec<usize>, u32, Vec<u32>), Theory>,
}

impl Ctx<'_> {
    fn go(&mut self, tuple: &[usize], n: u32, radii: &[u32]) -> Theory {
        let key = (tuple.to_vec(), n, radii.to_vec());
        if let Some(&t) = self.memo.get(&key) {
            return t;
        }
        let out = if n == 0 {
            th0(self.s, self.s.signature_id(), tuple, 0)
        } else {
            let k = n - 1;
            let wide: Vec<u32> = radii.iter().map(|&r| self.f.iter(k, r, 2)).collect();
            let mut t0 = Vec::new();
            for sv in boxes(&wide) {
                if sparse(self.s, tuple, k, &sv, self.f) {
                    let u = self.go(tuple, k, &sv);
                    t0.push(pair(&sv, u));
                }
            }
            let mut t1 = Vec::new();
            let mut ext = tuple.to_vec();
            for sv in boxes(radii) {
                let mut ext_r = sv.clone();
                ext_r.push(0);
                for i in 0..self.s.i_size() {
                    ext.push(self.s.i_elem(i));
                    if sparse(self.s, &ext, k, &ext_r, self.f) {
                        let u = self.go(&ext, k, &ext_r);
                        t1.push(pair(&sv, u));
                    }
                    ext.pop();
                }
            }
            let mut header = vec![n, tuple.len() as u32];
            header.extend_from_slice(radii);
            intern(Node::Compound {
                kind: Kind::Sparse,
                header: header.into(),
                groups: Box::new([canonical_set(t0), canonical_set(t1)]),
            })
        };
        self.memo.insert(key, out);
        out
    }
}

/// `uth^n_r̄(tuple)`. Depth 0 is the atom table at radius 0. At depth `n+1`
/// it is the pair of the set of `(s̄, uth^n_s̄)` for sparse `s̄ ≤ f_n²(r̄)`
/// and the set of `(s̄, uth^n_{s̄⌢0}(tuple⌢c))` over `s̄ ≤ r̄` and index
/// points `c` keeping the extension sparse.
pub fn uth(s: &System, tuple: &[usize], n: u32, radii: &[u32], f: &FGrowth) -> Result<Theory, DistortedError> {
    if !sparse_check(s, tuple, n, radii, f)? {
        return Err(DistortedError::NotSparse);
    }
    Ok(Ctx { s, f, memo: HashMap::new() }.go(tuple, n, radii))
}
