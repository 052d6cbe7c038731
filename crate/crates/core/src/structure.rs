//! Vocabularies and finite relational structures.
//!
//! Elements of a structure are the dense integers `0..n`. When the vocabulary
//! designates an order symbol, the order relation is the natural strict order
//! on `0..n`; it is never stored and never listed in files.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Names that the formula grammar reserves for its own atoms.
pub const RESERVED_NAMES: &[&str] = &["E", "A", "dist", "inM", "h", "true", "false"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` has arity 0; only positive arities are supported")]
    ZeroArity(String),
    #[error("symbol name `{0}` is reserved")]
    ReservedName(String),
    #[error("order symbol `{0}` is not a binary symbol of the vocabulary")]
    BadOrderSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("tuple {tuple:?} for `{symbol}` has the wrong length (expected {arity})")]
    ArityMismatch { symbol: String, arity: usize, tuple: Vec<usize> },
    #[error("element {element} out of range for a structure of size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("order relation `{0}` is implied and must not be listed")]
    OrderListed(String),
    #[error("vocabulary mismatch")]
    VocabularyMismatch,
    #[error("ordered sum of an empty list")]
    EmptySum,
    #[error("malformed structure file: {0}")]
    Format(String),
}

/// A finite relational vocabulary, optionally designating a binary order symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vocabulary {
    symbols: Vec<(String, usize)>,
    order: Option<usize>,
}

impl Vocabulary {
    pub fn new(symbols: Vec<(String, usize)>, order: Option<&str>) -> Result<Self, StructureError> {
        let mut seen = BTreeSet::new();
        for (name, arity) in &symbols {
            if !seen.insert(name.as_str()) {
                return Err(StructureError::DuplicateSymbol(name.clone()));
            }
            if *arity == 0 {
                return Err(StructureError::ZeroArity(name.clone()));
            }
            if RESERVED_NAMES.contains(&name.as_str()) {
                return Err(StructureError::ReservedName(name.clone()));
            }
        }
        let order = match order {
            None => None,
            Some(o) => {
                let idx = symbols
                    .iter()
                    .position(|(n, a)| n == o && *a == 2)
                    .ok_or_else(|| StructureError::BadOrderSymbol(o.to_string()))?;
                Some(idx)
            }
        };
        Ok(Vocabulary { symbols, order })
    }

    /// Convenience constructor from `&str` pairs; panics on an invalid vocabulary.
    pub fn from_pairs(symbols: &[(&str, usize)], order: Option<&str>) -> Self {
        Self::new(symbols.iter().map(|(n, a)| (n.to_string(), *a)).collect(), order)
            .expect("valid vocabulary")
    }

    /// The empty vocabulary.
    pub fn empty() -> Self {
        Vocabulary { symbols: Vec::new(), order: None }
    }

    /// `{<}`.
    pub fn order_only() -> Self {
        Self::from_pairs(&[("<", 2)], Some("<"))
    }

    /// `{<, R}` with `R` binary: the vocabulary of graphs with order.
    pub fn graph_order() -> Self {
        Self::from_pairs(&[("<", 2), ("R", 2)], Some("<"))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn name(&self, sym: usize) -> &str {
        &self.symbols[sym].0
    }

    pub fn arity(&self, sym: usize) -> usize {
        self.symbols[sym].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn order_symbol(&self) -> Option<usize> {
        self.order
    }

    pub fn order_name(&self) -> Option<&str> {
        self.order.map(|i| self.name(i))
    }

    pub fn is_order(&self, sym: usize) -> bool {
        self.order == Some(sym)
    }

    /// A copy of this vocabulary extended with extra symbols.
    pub fn extended(&self, extra: &[(String, usize)]) -> Result<Self, StructureError> {
        let mut symbols = self.symbols.clone();
        symbols.extend(extra.iter().cloned());
        Vocabulary::new(symbols, self.order_name())
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, a)) in self.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}/{a}")?;
        }
        write!(f, "}}")
    }
}

/// The interpretation of one symbol: a set of tuples plus a dense bitmap for
/// arities one and two, used on the hot evaluation paths.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Relation {
    tuples: BTreeSet<Vec<usize>>,
    dense: Option<Vec<u64>>,
}

impl Relation {
    fn build(tuples: BTreeSet<Vec<usize>>, arity: usize, n: usize) -> Self {
        let dense = if arity <= 2 && n.pow(arity as u32) <= 1 << 20 {
            let cells = n.pow(arity as u32);
            let mut bits = vec![0u64; cells.div_ceil(64).max(1)];
            for t in &tuples {
                let idx = t.iter().fold(0usize, |acc, &x| acc * n + x);
                bits[idx / 64] |= 1 << (idx % 64);
            }
            Some(bits)
        } else {
            None
        };
        Relation { tuples, dense }
    }

    #[inline]
    fn contains(&self, tuple: &[usize], n: usize) -> bool {
        match &self.dense {
            Some(bits) => {
                let idx = tuple.iter().fold(0usize, |acc, &x| acc * n + x);
                bits[idx / 64] >> (idx % 64) & 1 == 1
            }
            None => self.tuples.contains(tuple),
        }
    }
}

/// A finite structure with universe `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    vocab: Arc<Vocabulary>,
    n: usize,
    // indexed by symbol; the order symbol's entry is always empty
    relations: Vec<Relation>,
}

impl Structure {
    /// Builds a structure from explicit tuples, keyed by symbol name.
    /// The order relation (if any) is implied and must not be supplied.
    pub fn new(
        vocab: Arc<Vocabulary>,
        n: usize,
        tuples: BTreeMap<String, Vec<Vec<usize>>>,
    ) -> Result<Self, StructureError> {
        let mut sets = vec![BTreeSet::new(); vocab.len()];
        for (name, ts) in tuples {
            let sym = vocab.index_of(&name).ok_or_else(|| StructureError::UnknownSymbol(name.clone()))?;
            if vocab.is_order(sym) {
                if ts.is_empty() {
                    continue;
                }
                return Err(StructureError::OrderListed(name));
            }
            for t in ts {
                check_tuple(&vocab, sym, &t, n)?;
                sets[sym].insert(t);
            }
        }
        Ok(Self::from_sets(vocab, n, sets))
    }

    fn from_sets(vocab: Arc<Vocabulary>, n: usize, sets: Vec<BTreeSet<Vec<usize>>>) -> Self {
        let relations = sets
            .into_iter()
            .enumerate()
            .map(|(sym, s)| Relation::build(s, vocab.arity(sym), n))
            .collect();
        Structure { vocab, n, relations }
    }

    /// A structure with no tuples in any non-order relation.
    pub fn empty_relations(vocab: Arc<Vocabulary>, n: usize) -> Self {
        let sets = vec![BTreeSet::new(); vocab.len()];
        Self::from_sets(vocab, n, sets)
    }

    /// The linear order `(n, <)`.
    pub fn linear_order(n: usize) -> Self {
        Self::empty_relations(Arc::new(Vocabulary::order_only()), n)
    }

    /// A structure built by a per-symbol tuple list given by symbol index.
    pub fn from_indexed(
        vocab: Arc<Vocabulary>,
        n: usize,
        tuples: Vec<(usize, Vec<usize>)>,
    ) -> Result<Self, StructureError> {
        let mut sets = vec![BTreeSet::new(); vocab.len()];
        for (sym, t) in tuples {
            if sym >= vocab.len() {
                return Err(StructureError::UnknownSymbol(format!("#{sym}")));
            }
            if vocab.is_order(sym) {
                return Err(StructureError::OrderListed(vocab.name(sym).to_string()));
            }
            check_tuple(&vocab, sym, &t, n)?;
            sets[sym].insert(t);
        }
        Ok(Self::from_sets(vocab, n, sets))
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Whether `tuple` belongs to the interpretation of `sym`.
    #[inline]
    pub fn holds(&self, sym: usize, tuple: &[usize]) -> bool {
        if self.vocab.is_order(sym) {
            return tuple[0] < tuple[1];
        }
        self.relations[sym].contains(tuple, self.n)
    }

    /// The stored tuples of a non-order symbol, in lexicographic order.
    pub fn tuples(&self, sym: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.relations[sym].tuples.iter()
    }

    /// All tuples of every non-order symbol, as `(symbol, tuple)` pairs.
    pub fn all_tuples(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(sym, r)| r.tuples.iter().map(move |t| (sym, t)))
    }

    /// Induced substructure on `subset`, renumbered order-preservingly.
    pub fn restrict(&self, subset: &BTreeSet<usize>) -> Result<Structure, StructureError> {
        if let Some(&bad) = subset.iter().find(|&&x| x >= self.n) {
            return Err(StructureError::OutOfRange { element: bad, size: self.n });
        }
        let mut renumber = vec![usize::MAX; self.n];
        for (new, &old) in subset.iter().enumerate() {
            renumber[old] = new;
        }
        let sets = self
            .relations
            .iter()
            .map(|r| {
                r.tuples
                    .iter()
                    .filter(|t| t.iter().all(|&x| renumber[x] != usize::MAX))
                    .map(|t| t.iter().map(|&x| renumber[x]).collect())
                    .collect()
            })
            .collect();
        Ok(Self::from_sets(self.vocab.clone(), subset.len(), sets))
    }

    /// Parses the JSON structure file format.
    pub fn from_json(text: &str) -> Result<Structure, StructureError> {
        let file: StructureFile =
            serde_json::from_str(text).map_err(|e| StructureError::Format(e.to_string()))?;
        file.into_structure()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StructureFile::from_structure(self)).expect("serializable")
    }
}

fn check_tuple(vocab: &Vocabulary, sym: usize, t: &[usize], n: usize) -> Result<(), StructureError> {
    if t.len() != vocab.arity(sym) {
        return Err(StructureError::ArityMismatch {
            symbol: vocab.name(sym).to_string(),
            arity: vocab.arity(sym),
            tuple: t.to_vec(),
        });
    }
    if let Some(&bad) = t.iter().find(|&&x| x >= n) {
        return Err(StructureError::OutOfRange { element: bad, size: n });
    }
    Ok(())
}

/// Ordered sum of a nonempty list of structures over a common vocabulary.
///
/// Universes are concatenated; non-order relations are unions of the shifted
/// summand relations, and the order (if present) places earlier summands below
/// later ones.
pub fn ordered_sum(models: &[Structure]) -> Result<Structure, StructureError> {
    let first = models.first().ok_or(StructureError::EmptySum)?;
    let vocab = first.vocab.clone();
    if models.iter().any(|m| *m.vocab != *vocab) {
        return Err(StructureError::VocabularyMismatch);
    }
    let mut sets = vec![BTreeSet::new(); vocab.len()];
    let mut offset = 0;
    for m in models {
        for (sym, t) in m.all_tuples() {
            sets[sym].insert(t.iter().map(|&x| x + offset).collect::<Vec<_>>());
        }
        offset += m.n;
    }
    Ok(Structure::from_sets(vocab, offset, sets))
}

/// The on-disk structure format:
/// `{"vocab": [["<",2],["R",2]], "order": "<", "n": 5, "relations": {"R": [[0,3],[3,0]]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureFile {
    pub vocab: Vec<(String, usize)>,
    #[serde(default)]
    pub order: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
}

impl StructureFile {
    pub fn into_structure(self) -> Result<Structure, StructureError> {
        let vocab = Arc::new(Vocabulary::new(self.vocab, self.order.as_deref())?);
        if let Some(o) = vocab.order_name() {
            if self.relations.contains_key(o) {
                return Err(StructureError::OrderListed(o.to_string()));
            }
        }
        Structure::new(vocab, self.n, self.relations)
    }

    pub fn from_structure(m: &Structure) -> Self {
        let mut relations = BTreeMap::new();
        for sym in 0..m.vocab.len() {
            if m.vocab.is_order(sym) {
                continue;
            }
            relations.insert(m.vocab.name(sym).to_string(), m.tuples(sym).cloned().collect());
        }
        StructureFile {
            vocab: m.vocab.symbols().to_vec(),
            order: m.vocab.order_name().map(str::to_string),
            n: m.n,
            relations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
        let vocab = Arc::new(Vocabulary::graph_order());
        let mut ts = Vec::new();
        for &(a, b) in edges {
            ts.push((1, vec![a, b]));
            ts.push((1, vec![b, a]));
        }
        Structure::from_indexed(vocab, n, ts).unwrap()
    }

    #[test]
    fn orders_concatenate() {
        let s = ordered_sum(&[Structure::linear_order(2), Structure::linear_order(3)]).unwrap();
        assert_eq!(s, Structure::linear_order(5));
        assert!(s.holds(0, &[1, 4]));
        assert!(!s.holds(0, &[4, 1]));
    }

    #[test]
    fn singleton_sum_is_identity() {
        let g = graph(3, &[(0, 2)]);
        assert_eq!(ordered_sum(std::slice::from_ref(&g)).unwrap(), g);
    }

    #[test]
    fn sum_of_one_edge_graphs() {
        let g = graph(2, &[(0, 1)]);
        let s = ordered_sum(&[g.clone(), g]).unwrap();
        assert_eq!(s, graph(4, &[(0, 1), (2, 3)]));
        assert!(!s.holds(1, &[1, 2]));
        assert!(s.holds(0, &[1, 2]));
    }

    #[test]
    fn sum_rejects_mixed_vocabularies() {
        let err = ordered_sum(&[Structure::linear_order(1), graph(1, &[])]).unwrap_err();
        assert_eq!(err, StructureError::VocabularyMismatch);
    }

    #[test]
    fn restrict_examples() {
        let five = Structure::linear_order(5);
        let sub: BTreeSet<_> = [1, 3, 4].into_iter().collect();
        assert_eq!(five.restrict(&sub).unwrap(), Structure::linear_order(3));
        let all: BTreeSet<_> = (0..5).collect();
        assert_eq!(five.restrict(&all).unwrap(), five);

        let g = graph(3, &[(0, 2)]);
        let sub: BTreeSet<_> = [0, 2].into_iter().collect();
        assert_eq!(g.restrict(&sub).unwrap(), graph(2, &[(0, 1)]));

        let bad: BTreeSet<_> = [7].into_iter().collect();
        assert!(matches!(five.restrict(&bad), Err(StructureError::OutOfRange { .. })));
    }

    #[test]
    fn sum_is_associative() {
        let a = graph(2, &[(0, 1)]);
        let b = graph(1, &[]);
        let c = graph(3, &[(0, 2)]);
        let left = ordered_sum(&[ordered_sum(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = ordered_sum(&[a, ordered_sum(&[b, c]).unwrap()]).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn json_format() {
        let text = r#"{"vocab": [["<",2],["R",2],["P",1]], "order": "<", "n": 5,
                       "relations": {"R": [[0,3],[3,0]], "P": [[2]]}}"#;
        let m = Structure::from_json(text).unwrap();
        assert_eq!(m.size(), 5);
        assert!(m.holds(1, &[3, 0]));
        assert!(m.holds(2, &[2]));
        assert!(m.holds(0, &[0, 4]));
        assert_eq!(Structure::from_json(&m.to_json()).unwrap(), m);

        let listed = r#"{"vocab": [["<",2]], "order": "<", "n": 2, "relations": {"<": [[0,1]]}}"#;
        assert!(matches!(Structure::from_json(listed), Err(StructureError::OrderListed(_))));
        let oob = r#"{"vocab": [["P",1]], "n": 2, "relations": {"P": [[2]]}}"#;
        assert!(matches!(Structure::from_json(oob), Err(StructureError::OutOfRange { .. })));
    }

    #[test]
    fn vocabulary_validation() {
        assert!(Vocabulary::new(vec![("R".into(), 2), ("R".into(), 1)], None).is_err());
        assert!(Vocabulary::new(vec![("P".into(), 1)], Some("P")).is_err());
        assert!(Vocabulary::new(vec![("h".into(), 2)], None).is_err());
    }
}
