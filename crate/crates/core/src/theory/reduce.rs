//! Lowering depth and radius, and renaming tuple positions.

use std::collections::HashMap;

use once_cell::sync::Lazy;
use parking_lot::RwLock;

use super::intern::{canonical_set, intern, Node, Theory};
use super::schema::project_leaf;
use super::th::TheoryError;

type Key = (Theory, u32, u32, Box<[u32]>);

static CACHE: Lazy<RwLock<HashMap<Key, Theory>>> = Lazy::new(Default::default);

fn go(t: Theory, depth: u32, radius: u32, proj: &[u32]) -> Theory {
    let key = (t, depth, radius, proj.into());
    if let Some(&hit) = CACHE.read().get(&key) {
        return hit;
    }
    let base = project_leaf(t.base(), proj, radius);
    let out = if depth == 0 {
        base
    } else {
        let mut ext = proj.to_vec();
        ext.push(t.arity());
        let members = t.members().iter().map(|&s| go(s, depth - 1, radius, &ext)).collect();
        intern(Node::Set { sig: t.sig(), depth, radius, arity: proj.len() as u32, base, members: canonical_set(members) })
    };
    CACHE.write().insert(key, out);
    out
}

/// The theory at lower depth and radius of the tuple `⟨a_{proj[0]}, a_{proj[1]}, …⟩`,
/// where `t` describes `ā`. Positions may be reordered, repeated or dropped.
pub fn reduce_theory(t: Theory, depth: u32, radius: u32, proj: &[u32]) -> Result<Theory, TheoryError> {
    if depth > t.depth() {
        return Err(TheoryError::Increase { what: "depth", from: t.depth(), to: depth });
    }
    if radius > t.radius() {
        return Err(TheoryError::Increase { what: "radius", from: t.radius(), to: radius });
    }
    if let Some(&p) = proj.iter().find(|&&p| p >= t.arity()) {
        return Err(TheoryError::Projection(p));
    }
    Ok(go(t, depth, radius, proj))
}

/// Reduction keeping the tuple as is.
pub fn reduce_depth(t: Theory, depth: u32) -> Theory {
    let id: Vec<u32> = (0..t.arity()).collect();
    reduce_theory(t, depth, t.radius(), &id).expect("depth must not increase")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{Structure, Vocabulary};
    use crate::system::{LiftMode, System};
    use crate::theory::th::th;
    use std::sync::Arc;

    fn path_system() -> System {
        let v = Arc::new(Vocabulary::from_pairs(&[("R", 2)], None));
        let ts = vec![(0, vec![0, 1]), (0, vec![1, 0]), (0, vec![1, 2]), (0, vec![2, 1])];
        System::lift(&Structure::from_indexed(v, 3, ts).unwrap(), LiftMode::Dis)
    }

    #[test]
    fn identity_reduction() {
        let s = path_system();
        let t = th(&s, &[0, 2], 1, 1).unwrap();
        assert_eq!(reduce_theory(t, 1, 1, &[0, 1]).unwrap(), t);
    }

    #[test]
    fn swap_and_lower() {
        let s = path_system();
        let t = th(&s, &[0, 2], 2, 1).unwrap();
        assert_eq!(reduce_theory(t, 2, 1, &[1, 0]).unwrap(), th(&s, &[2, 0], 2, 1).unwrap());
        assert_eq!(reduce_theory(t, 1, 0, &[0, 1]).unwrap(), th(&s, &[0, 2], 1, 0).unwrap());
        assert_eq!(reduce_theory(t, 1, 1, &[1]).unwrap(), th(&s, &[2], 1, 1).unwrap());
        assert!(reduce_theory(t, 3, 1, &[0]).is_err());
        assert!(reduce_theory(t, 1, 2, &[0]).is_err());
    }
}
