//! Finite truncation posets.
//!
//! A truncation poset is a finite poset `(S, |)` with a norm `|-| : S -> N`
//! such that
//!
//! 1. `s | t` implies `|s|` divides `|t|`;
//! 2. `s | t | u` implies `|u|/|s| = (|u|/|t|)(|t|/|s|)`;
//! 3. for every divisor `d` of `|s|` there is exactly one `t | s` with `|t| = |s|/d`;
//! 4. for every `d` there is at most one `t` with `s | t` and `|t| = d|s|`.
//!
//! Elements are addressed by their position in a deterministic order,
//! sorted by `(norm, label, id)`. Ids and labels are only used for I/O.

mod build;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use build::{
    coproduct, coproduct_parts, disjoint_union, divisor_poset, from_set, gcd_poset, parse_word,
    scale_quotient, word_label, word_poset, Coproduct, DisjointUnion, Word,
};

use crate::limits;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PosetError {
    #[error("poset has {size} elements, above the cap of {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("duplicate element id {0}")]
    DuplicateId(u64),
    #[error("unknown element id {0}")]
    UnknownElement(u64),
    #[error("element {id} has invalid norm {norm}")]
    InvalidNorm { id: u64, norm: u64 },
    #[error("not a partial order: {0} and {1} divide each other")]
    NotPartialOrder(u64, u64),
    #[error("axiom {axiom} violated at {witness:?}: {detail}")]
    AxiomViolation {
        axiom: u8,
        witness: Vec<u64>,
        detail: String,
    },
    #[error("not closed under division: {missing} divides {of} but is missing")]
    NotDivisionClosed { missing: String, of: String },
    #[error("poset is not an ordinary truncation set")]
    NotOrdinary,
    #[error("weight violation: {0}")]
    WeightViolation(String),
    #[error("word {word} has length not divisible by block size {block}")]
    LengthNotDivisible { word: String, block: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementInfo {
    pub id: u64,
    pub norm: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl ElementInfo {
    pub fn new(id: u64, norm: u64, label: Option<String>) -> Self {
        ElementInfo { id, norm, label }
    }

    fn sort_key(&self) -> (u64, &Option<String>, u64) {
        (self.norm, &self.label, self.id)
    }
}

/// Unvalidated poset data: elements plus divisibility pairs `(s, t)`
/// meaning `s | t`. Reflexive and transitive pairs may be omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPoset {
    pub elements: Vec<ElementInfo>,
    #[serde(default)]
    pub divides: Vec<(u64, u64)>,
}

#[derive(Clone)]
struct BitMatrix {
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            words,
            bits: vec![0; words * n],
        }
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }
}

/// A validated finite truncation poset. Immutable.
#[derive(Clone)]
pub struct TruncationPoset {
    elems: Vec<ElementInfo>,
    index: HashMap<u64, usize>,
    relation: BitMatrix,
    below: Vec<Vec<usize>>,
    above: Vec<Vec<usize>>,
    covers: Vec<Vec<usize>>,
    root: Vec<usize>,
}

impl PartialEq for TruncationPoset {
    fn eq(&self, other: &Self) -> bool {
        self.elems == other.elems && self.covers == other.covers
    }
}

impl Eq for TruncationPoset {}

impl fmt::Debug for TruncationPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TruncationPoset{")?;
        for (i, e) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", self.display(i), e.norm)?;
        }
        f.write_str("}")
    }
}

/// The splitting of a poset into connected components, each the set of
/// multiples of a norm-1 root. Components are ordered by root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    pub components: Vec<Vec<usize>>,
}

impl ComponentPartition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

fn violation(axiom: u8, witness: Vec<u64>, detail: String) -> PosetError {
    PosetError::AxiomViolation {
        axiom,
        witness,
        detail,
    }
}

impl TruncationPoset {
    pub fn empty() -> Self {
        TruncationPoset::validate(RawPoset::default()).expect("empty poset is valid")
    }

    /// Validates raw data against the four axioms.
    pub fn validate(raw: RawPoset) -> Result<Self, PosetError> {
        let n = raw.elements.len();
        let cap = limits::max_elements();
        if n > cap {
            return Err(PosetError::TooLarge { size: n, cap });
        }
        let mut elems = raw.elements;
        for e in &elems {
            if e.norm == 0 {
                return Err(PosetError::InvalidNorm {
                    id: e.id,
                    norm: e.norm,
                });
            }
        }
        elems.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut index = HashMap::with_capacity(n);
        for (i, e) in elems.iter().enumerate() {
            if index.insert(e.id, i).is_some() {
                return Err(PosetError::DuplicateId(e.id));
            }
        }

        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &raw.divides {
            let ia = *index.get(&a).ok_or(PosetError::UnknownElement(a))?;
            let ib = *index.get(&b).ok_or(PosetError::UnknownElement(b))?;
            if ia != ib {
                adj[ia].push(ib);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }

        // reflexive-transitive closure, one DFS per element
        let mut relation = BitMatrix::new(n);
        let mut stack = Vec::new();
        for start in 0..n {
            relation.set(start, start);
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !relation.get(start, v) {
                        relation.set(start, v);
                        stack.push(v);
                    }
                }
            }
        }

        let mut below = vec![Vec::new(); n];
        let mut above = vec![Vec::new(); n];
        let pairs = (0..n).flat_map(|i| (0..n).map(move |j| (i, j)));
        for (i, j) in pairs.filter(|&(i, j)| relation.get(i, j)) {
            above[i].push(j);
            below[j].push(i);
        }

        for i in 0..n {
            for &j in &above[i] {
                if j != i && relation.get(j, i) {
                    return Err(PosetError::NotPartialOrder(elems[i].id, elems[j].id));
                }
            }
        }

        // axiom 1
        for i in 0..n {
            for &j in &above[i] {
                if !elems[j].norm.is_multiple_of(elems[i].norm) {
                    return Err(violation(
                        1,
                        vec![elems[i].id, elems[j].id],
                        format!(
                            "{} | {} but norm {} does not divide norm {}",
                            elems[i].id, elems[j].id, elems[i].norm, elems[j].norm
                        ),
                    ));
                }
            }
        }

        // axiom 2: all three ratios integral and multiplicative
        for i in 0..n {
            for &j in &above[i] {
                for &k in &above[j] {
                    let (ni, nj, nk) = (elems[i].norm, elems[j].norm, elems[k].norm);
                    let ok = nk % ni == 0
                        && nk % nj == 0
                        && nj % ni == 0
                        && nk / ni == (nk / nj) * (nj / ni);
                    if !ok {
                        return Err(violation(
                            2,
                            vec![elems[i].id, elems[j].id, elems[k].id],
                            "norm ratios along a chain are not multiplicative".into(),
                        ));
                    }
                }
            }
        }

        // axiom 3
        for s in 0..n {
            let ns = elems[s].norm;
            for d in crate::arith::divisors(ns) {
                let count = below[s]
                    .iter()
                    .filter(|&&t| elems[t].norm == ns / d)
                    .count();
                if count != 1 {
                    return Err(violation(
                        3,
                        vec![elems[s].id, d],
                        format!(
                            "{count} divisors of {} with norm {} (expected exactly one)",
                            elems[s].id,
                            ns / d
                        ),
                    ));
                }
            }
        }

        // axiom 4
        for s in 0..n {
            let mut seen: HashMap<u64, usize> = HashMap::new();
            for &t in &above[s] {
                if let Some(&prev) = seen.get(&elems[t].norm) {
                    return Err(violation(
                        4,
                        vec![elems[s].id, elems[prev].id, elems[t].id],
                        format!(
                            "{} has two multiples of norm {}",
                            elems[s].id, elems[t].norm
                        ),
                    ));
                }
                seen.insert(elems[t].norm, t);
            }
        }

        let covers = (0..n)
            .map(|i| {
                above[i]
                    .iter()
                    .copied()
                    .filter(|&j| {
                        j != i
                            && !above[i]
                                .iter()
                                .any(|&k| k != i && k != j && relation.get(k, j))
                    })
                    .collect()
            })
            .collect();
        let root = (0..n)
            .map(|i| {
                *below[i]
                    .iter()
                    .find(|&&t| elems[t].norm == 1)
                    .expect("axiom 3 guarantees a norm-1 divisor")
            })
            .collect();

        Ok(TruncationPoset {
            elems,
            index,
            relation,
            below,
            above,
            covers,
            root,
        })
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[ElementInfo] {
        &self.elems
    }

    pub fn id(&self, i: usize) -> u64 {
        self.elems[i].id
    }

    pub fn norm(&self, i: usize) -> u64 {
        self.elems[i].norm
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.elems[i].label.as_deref()
    }

    /// The label if present, otherwise the id.
    pub fn display(&self, i: usize) -> String {
        match &self.elems[i].label {
            Some(l) => l.clone(),
            None => self.elems[i].id.to_string(),
        }
    }

    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn divides(&self, i: usize, j: usize) -> bool {
        self.relation.get(i, j)
    }

    /// All `t` with `t | s`, including `s`, in index order.
    pub fn divisors_of(&self, s: usize) -> &[usize] {
        &self.below[s]
    }

    /// All `t` with `s | t`, including `s`, in index order.
    pub fn multiples_of(&self, s: usize) -> &[usize] {
        &self.above[s]
    }

    /// Immediate successors in the Hasse diagram.
    pub fn covers(&self, s: usize) -> &[usize] {
        &self.covers[s]
    }

    /// The norm-1 element below `s`.
    pub fn root(&self, s: usize) -> usize {
        self.root[s]
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.root[a] == self.root[b]
    }

    /// The unique `t | s` with `|t| = norm`, if `norm` divides `|s|`.
    pub fn divisor_with_norm(&self, s: usize, norm: u64) -> Option<usize> {
        if norm == 0 || !self.norm(s).is_multiple_of(norm) {
            return None;
        }
        self.below[s]
            .iter()
            .copied()
            .find(|&t| self.norm(t) == norm)
    }

    /// `s/d`: the unique divisor of `s` with norm `|s|/d`.
    pub fn quotient(&self, s: usize, d: u64) -> Option<usize> {
        if d == 0 || !self.norm(s).is_multiple_of(d) {
            return None;
        }
        self.divisor_with_norm(s, self.norm(s) / d)
    }

    /// The unique multiple of `s` with the given norm, if any.
    pub fn multiple_with_norm(&self, s: usize, norm: u64) -> Option<usize> {
        self.above[s]
            .iter()
            .copied()
            .find(|&t| self.norm(t) == norm)
    }

    /// Roots (norm-1 elements) in index order.
    pub fn roots(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.norm(i) == 1).collect()
    }

    pub fn components(&self) -> ComponentPartition {
        ComponentPartition {
            components: self
                .roots()
                .into_iter()
                .map(|r| self.above[r].clone())
                .collect(),
        }
    }

    /// Norms of the component of `root`, which form an ordinary truncation set.
    pub fn component_norms(&self, root: usize) -> BTreeSet<u64> {
        self.above[root].iter().map(|&s| self.norm(s)).collect()
    }

    /// Whether any two elements with a common divisor have a common multiple.
    pub fn has_joins(&self) -> bool {
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                if !self.same_component(a, b) {
                    continue;
                }
                let common = self
                    .relation
                    .row(a)
                    .iter()
                    .zip(self.relation.row(b))
                    .any(|(x, y)| x & y != 0);
                if !common {
                    return false;
                }
            }
        }
        true
    }

    /// If this is an ordinary truncation set (ids are the integers themselves,
    /// norm is the identity and the order is divisibility), returns that set.
    pub fn as_ordinary_set(&self) -> Option<BTreeSet<u64>> {
        let set: BTreeSet<u64> = self.elems.iter().map(|e| e.id).collect();
        for (i, e) in self.elems.iter().enumerate() {
            if e.id != e.norm {
                return None;
            }
            for (j, f) in self.elems.iter().enumerate() {
                if (f.id % e.id == 0) != self.divides(i, j) {
                    return None;
                }
            }
        }
        Some(set)
    }

    /// Data with only the Hasse cover pairs listed.
    pub fn to_raw(&self) -> RawPoset {
        let mut divides = Vec::new();
        for i in 0..self.len() {
            for &j in &self.covers[i] {
                divides.push((self.id(i), self.id(j)));
            }
        }
        RawPoset {
            elements: self.elems.clone(),
            divides,
        }
    }

    /// A canonical text serialization, usable as a cache key.
    pub fn canonical_key(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.elems.iter().enumerate() {
            out.push_str(&format!("{}:{}:{:?}<", e.id, e.norm, e.label));
            for &j in &self.covers[i] {
                out.push_str(&format!("{j},"));
            }
            out.push(';');
        }
        out
    }

    /// Text rendering of the Hasse diagram.
    pub fn hasse_text(&self) -> String {
        let mut out = String::new();
        let parts = self.components();
        for (c, comp) in parts.components.iter().enumerate() {
            out.push_str(&format!("component {c}:\n"));
            for &s in comp {
                let ups: Vec<String> = self.covers[s].iter().map(|&t| self.display(t)).collect();
                out.push_str(&format!(
                    "  {} (id {}, |{}|={}) -> [{}]\n",
                    self.display(s),
                    self.id(s),
                    self.display(s),
                    self.norm(s),
                    ups.join(", ")
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(id: u64, norm: u64) -> ElementInfo {
        ElementInfo::new(id, norm, None)
    }

    #[test]
    fn divisibility_chain_is_valid() {
        let p = TruncationPoset::validate(RawPoset {
            elements: vec![el(1, 1), el(2, 2), el(4, 4)],
            divides: vec![(1, 2), (2, 4)],
        })
        .unwrap();
        assert_eq!(p.len(), 3);
        let (a, c) = (p.index_of(1).unwrap(), p.index_of(4).unwrap());
        assert!(p.divides(a, c));
        assert_eq!(p.covers(a), &[p.index_of(2).unwrap()]);
        assert_eq!(p.quotient(c, 2), p.index_of(2));
        assert_eq!(p.multiple_with_norm(a, 4), Some(c));
        assert_eq!(p.multiple_with_norm(a, 8), None);
    }

    #[test]
    fn missing_norm_one_divisor_violates_axiom_three() {
        let err = TruncationPoset::validate(RawPoset {
            elements: vec![el(1, 1), el(2, 2), el(3, 3)],
            divides: vec![(1, 2)],
        })
        .unwrap_err();
        match err {
            PosetError::AxiomViolation { axiom, witness, .. } => {
                assert_eq!(axiom, 3);
                assert_eq!(witness, vec![3, 3]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn norm_not_dividing_violates_axiom_one() {
        let err = TruncationPoset::validate(RawPoset {
            elements: vec![el(1, 1), el(2, 3), el(3, 2)],
            divides: vec![(1, 2), (2, 3)],
        })
        .unwrap_err();
        assert!(matches!(err, PosetError::AxiomViolation { axiom: 1, .. }));
    }

    #[test]
    fn two_multiples_of_same_norm_violate_axiom_four() {
        let err = TruncationPoset::validate(RawPoset {
            elements: vec![el(1, 1), el(2, 2), el(3, 2)],
            divides: vec![(1, 2), (1, 3)],
        })
        .unwrap_err();
        assert!(matches!(err, PosetError::AxiomViolation { axiom: 4, .. }));
    }

    #[test]
    fn cycles_are_rejected() {
        let err = TruncationPoset::validate(RawPoset {
            elements: vec![el(1, 1), el(2, 1)],
            divides: vec![(1, 2), (2, 1)],
        })
        .unwrap_err();
        assert!(matches!(err, PosetError::NotPartialOrder(_, _)));
    }

    #[test]
    fn bad_input_data() {
        let dup = RawPoset {
            elements: vec![el(1, 1), el(1, 1)],
            divides: vec![],
        };
        assert_eq!(
            TruncationPoset::validate(dup).unwrap_err(),
            PosetError::DuplicateId(1)
        );
        let unknown = RawPoset {
            elements: vec![el(1, 1)],
            divides: vec![(1, 9)],
        };
        assert_eq!(
            TruncationPoset::validate(unknown).unwrap_err(),
            PosetError::UnknownElement(9)
        );
        let zero = RawPoset {
            elements: vec![el(1, 0)],
            divides: vec![],
        };
        assert!(matches!(
            TruncationPoset::validate(zero).unwrap_err(),
            PosetError::InvalidNorm { .. }
        ));
    }

    #[test]
    fn element_order_is_norm_label_id() {
        let p = TruncationPoset::validate(RawPoset {
            elements: vec![
                ElementInfo::new(9, 1, Some("b".into())),
                ElementInfo::new(3, 1, Some("a".into())),
                ElementInfo::new(5, 1, None),
            ],
            divides: vec![],
        })
        .unwrap();
        let ids: Vec<u64> = p.elements().iter().map(|e| e.id).collect();
        assert_eq!(ids, vec![5, 3, 9]);
    }

    #[test]
    fn size_cap_is_enforced() {
        let raw = RawPoset {
            elements: (1..=(limits::max_elements() as u64 + 1))
                .map(|i| el(i, 1))
                .collect(),
            divides: vec![],
        };
        assert!(matches!(
            TruncationPoset::validate(raw),
            Err(PosetError::TooLarge { .. })
        ));
    }
}
