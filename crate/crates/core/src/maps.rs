//! Maps of truncation posets and their R/T/N classification.
//!
//! Every map here is an R-map: monotone, with `|f(s2)|/|f(s1)| = |s2|/|s1|`
//! whenever `s1 | s2`. A T-map additionally lifts divisibility out of
//! `f(s)` to divisibility out of `s`; an N-map covers each target component
//! by the downsets of the image of each source component mapping into it.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::poset::{self, PosetError, TruncationPoset};

pub type PosetRef = Arc<TruncationPoset>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("not monotone: {0} | {1} but their images do not divide")]
    NotMonotone(u64, u64),
    #[error("norm ratio mismatch along {0} | {1}")]
    NormRatioMismatch(u64, u64),
    #[error("target of the first map is not the source of the second")]
    SourceTargetMismatch,
    #[error("not a T-map: no lift of {target} above source element {source_elem}")]
    NotTMap { source_elem: u64, target: u64 },
    #[error("not an N-map: {target} is not covered from the component of {source_elem}")]
    NotNMap { source_elem: u64, target: u64 },
    #[error("unknown element id {0}")]
    UnknownElement(u64),
    #[error("invalid map: {0}")]
    Invalid(String),
    #[error("internal law violated: {0}")]
    LemmaViolation(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MapClass {
    pub r: bool,
    pub t: bool,
    pub n: bool,
}

impl fmt::Display for MapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.r {
            parts.push("R");
        }
        if self.t {
            parts.push("T");
        }
        if self.n {
            parts.push("N");
        }
        f.write_str(&parts.join(","))
    }
}

/// A validated R-map with its class flags computed.
#[derive(Clone)]
pub struct PosetMap {
    source: PosetRef,
    target: PosetRef,
    assign: Vec<usize>,
    class: MapClass,
}

impl PartialEq for PosetMap {
    fn eq(&self, other: &Self) -> bool {
        self.assign == other.assign && self.source == other.source && self.target == other.target
    }
}

impl fmt::Debug for PosetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PosetMap[{}]{{", self.class)?;
        for (s, &t) in self.assign.iter().enumerate() {
            if s > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}->{}", self.source.display(s), self.target.display(t))?;
        }
        f.write_str("}")
    }
}

/// Per-component description of a map: the component with root
/// `source_root` maps into the component with root `target_root`, and the
/// root goes to the element of norm `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMap {
    pub source_root: usize,
    pub target_root: usize,
    pub n: u64,
}

impl PosetMap {
    /// Validates `assign` (indexed by source element) as an R-map and
    /// classifies it.
    pub fn new(source: PosetRef, target: PosetRef, assign: Vec<usize>) -> Result<Self, MapError> {
        if assign.len() != source.len() {
            return Err(MapError::Invalid(format!(
                "assignment has {} entries for {} source elements",
                assign.len(),
                source.len()
            )));
        }
        if let Some(&t) = assign.iter().find(|&&t| t >= target.len()) {
            return Err(MapError::Invalid(format!("target index {t} out of range")));
        }
        for s1 in 0..source.len() {
            for &s2 in source.multiples_of(s1) {
                let (t1, t2) = (assign[s1], assign[s2]);
                if !target.divides(t1, t2) {
                    return Err(MapError::NotMonotone(source.id(s1), source.id(s2)));
                }
                if target.norm(t2) * source.norm(s1) != source.norm(s2) * target.norm(t1) {
                    return Err(MapError::NormRatioMismatch(source.id(s1), source.id(s2)));
                }
            }
        }
        let mut map = PosetMap {
            source,
            target,
            assign,
            class: MapClass {
                r: true,
                t: false,
                n: false,
            },
        };
        map.class.t = map.fibration_witness().is_none();
        map.class.n = map.strong_fibration_witness().is_none();
        if map.class.n && !map.class.t {
            return Err(MapError::LemmaViolation(
                "an N-map failed the T-map condition".into(),
            ));
        }
        Ok(map)
    }

    /// Builds a map from `(source id, target id)` pairs.
    pub fn from_pairs(
        source: PosetRef,
        target: PosetRef,
        pairs: &[(u64, u64)],
    ) -> Result<Self, MapError> {
        let mut assign = vec![None; source.len()];
        for &(a, b) in pairs {
            let i = source.index_of(a).ok_or(MapError::UnknownElement(a))?;
            let j = target.index_of(b).ok_or(MapError::UnknownElement(b))?;
            if assign[i].replace(j).is_some_and(|prev| prev != j) {
                return Err(MapError::Invalid(format!("element {a} assigned twice")));
            }
        }
        let assign = assign
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                t.ok_or_else(|| MapError::Invalid(format!("no image for {}", source.id(i))))
            })
            .collect::<Result<_, _>>()?;
        PosetMap::new(source, target, assign)
    }

    pub fn identity(p: PosetRef) -> Self {
        let assign = (0..p.len()).collect();
        PosetMap::new(p.clone(), p, assign).expect("identity is a map")
    }

    pub fn source(&self) -> &PosetRef {
        &self.source
    }

    pub fn target(&self) -> &PosetRef {
        &self.target
    }

    pub fn assign(&self) -> &[usize] {
        &self.assign
    }

    pub fn apply(&self, s: usize) -> usize {
        self.assign[s]
    }

    pub fn class(&self) -> MapClass {
        self.class
    }

    pub fn is_t(&self) -> bool {
        self.class.t
    }

    pub fn is_n(&self) -> bool {
        self.class.n
    }

    /// `(source id, target id)` pairs in source order.
    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.assign
            .iter()
            .enumerate()
            .map(|(s, &t)| (self.source.id(s), self.target.id(t)))
            .collect()
    }

    fn fibration_witness(&self) -> Option<(usize, usize)> {
        let (src, tgt) = (&self.source, &self.target);
        for s in 0..src.len() {
            let fs = self.assign[s];
            for &t2 in tgt.multiples_of(fs) {
                let norm = src.norm(s) * (tgt.norm(t2) / tgt.norm(fs));
                let lifted = src
                    .multiple_with_norm(s, norm)
                    .is_some_and(|s2| self.assign[s2] == t2);
                if !lifted {
                    return Some((s, t2));
                }
            }
        }
        None
    }

    fn strong_fibration_witness(&self) -> Option<(usize, usize)> {
        let (src, tgt) = (&self.source, &self.target);
        for root in src.roots() {
            let comp = src.multiples_of(root);
            let target_root = tgt.root(self.assign[root]);
            let mut covered = vec![false; tgt.len()];
            for &s in comp {
                for &t in tgt.divisors_of(self.assign[s]) {
                    covered[t] = true;
                }
            }
            if let Some(&t) = tgt.multiples_of(target_root).iter().find(|&&t| !covered[t]) {
                return Some((root, t));
            }
        }
        None
    }

    pub fn require_t(&self) -> Result<(), MapError> {
        match self.fibration_witness() {
            None => Ok(()),
            Some((s, t)) => Err(MapError::NotTMap {
                source_elem: self.source.id(s),
                target: self.target.id(t),
            }),
        }
    }

    pub fn require_n(&self) -> Result<(), MapError> {
        match self.strong_fibration_witness() {
            None => Ok(()),
            Some((s, t)) => Err(MapError::NotNMap {
                source_elem: self.source.id(s),
                target: self.target.id(t),
            }),
        }
    }

    /// `f^{-1}(t)` in source order.
    pub fn fiber(&self, t: usize) -> Vec<usize> {
        (0..self.source.len())
            .filter(|&s| self.assign[s] == t)
            .collect()
    }

    /// Minimal elements of `{s : t | f(s)}` in source order. Well defined
    /// for any map; only meaningful as a norm index set for N-maps.
    pub fn minimal_fiber(&self, t: usize) -> Vec<usize> {
        let hits: Vec<usize> = (0..self.source.len())
            .filter(|&s| self.target.divides(t, self.assign[s]))
            .collect();
        hits.iter()
            .copied()
            .filter(|&s| !hits.iter().any(|&s2| s2 != s && self.source.divides(s2, s)))
            .collect()
    }

    /// `g ∘ self`. When both maps are N-maps, also checks that the minimal
    /// fibers compose.
    pub fn then(&self, g: &PosetMap) -> Result<PosetMap, MapError> {
        if !(Arc::ptr_eq(&self.target, &g.source) || *self.target == *g.source) {
            return Err(MapError::SourceTargetMismatch);
        }
        let assign = self.assign.iter().map(|&t| g.assign[t]).collect();
        let composite = PosetMap::new(self.source.clone(), g.target.clone(), assign)?;
        if self.class.n && g.class.n {
            for u in 0..g.target.len() {
                let mut via: BTreeSet<usize> = BTreeSet::new();
                for t in g.minimal_fiber(u) {
                    via.extend(self.minimal_fiber(t));
                }
                let direct: BTreeSet<usize> = composite.minimal_fiber(u).into_iter().collect();
                if via != direct {
                    return Err(MapError::LemmaViolation(format!(
                        "minimal fibers do not compose over {}",
                        g.target.id(u)
                    )));
                }
            }
        }
        Ok(composite)
    }

    /// Checks that for an N-map, minimal fibers over `t | t'` correspond
    /// bijectively via divisibility.
    pub fn check_minimal_divisibility(&self) -> Result<(), MapError> {
        let tgt = &self.target;
        let fibers: Vec<Vec<usize>> = (0..tgt.len()).map(|t| self.minimal_fiber(t)).collect();
        for t in 0..tgt.len() {
            for &t2 in tgt.multiples_of(t) {
                for &s in &fibers[t] {
                    let up = fibers[t2]
                        .iter()
                        .filter(|&&s2| self.source.divides(s, s2))
                        .count();
                    if up != 1 {
                        return Err(MapError::LemmaViolation(format!(
                            "{} has {up} multiples over {}",
                            self.source.id(s),
                            tgt.id(t2)
                        )));
                    }
                }
                for &s2 in &fibers[t2] {
                    let down = fibers[t]
                        .iter()
                        .filter(|&&s| self.source.divides(s, s2))
                        .count();
                    if down != 1 {
                        return Err(MapError::LemmaViolation(format!(
                            "{} has {down} divisors over {}",
                            self.source.id(s2),
                            tgt.id(t)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Splits the map by source component.
    pub fn decompose(&self) -> Vec<ComponentMap> {
        self.source
            .roots()
            .into_iter()
            .map(|r| {
                let image = self.assign[r];
                ComponentMap {
                    source_root: r,
                    target_root: self.target.root(image),
                    n: self.target.norm(image),
                }
            })
            .collect()
    }

    /// Per-component form of a T-map: component `i` is `V/n -> V`, where
    /// `V` is the target component; checks the source norms are `V/n`.
    pub fn decompose_t(&self) -> Result<Vec<ComponentMap>, MapError> {
        self.require_t()?;
        let parts = self.decompose();
        for c in &parts {
            let v = self.target.component_norms(c.target_root);
            let expected: BTreeSet<u64> = v
                .iter()
                .filter(|&&x| x % c.n == 0)
                .map(|x| x / c.n)
                .collect();
            if self.source.component_norms(c.source_root) != expected {
                return Err(MapError::LemmaViolation(
                    "T-map component is not V/n -> V".into(),
                ));
            }
        }
        Ok(parts)
    }

    /// Per-component form of an N-map: component `i` is `U -> <n>U`.
    pub fn decompose_n(&self) -> Result<Vec<ComponentMap>, MapError> {
        self.require_n()?;
        let parts = self.decompose();
        for c in &parts {
            let u = self.source.component_norms(c.source_root);
            let expected: BTreeSet<u64> = crate::arith::divisors(c.n)
                .into_iter()
                .flat_map(|e| u.iter().map(move |x| e * x))
                .collect();
            if self.target.component_norms(c.target_root) != expected {
                return Err(MapError::LemmaViolation(
                    "N-map component is not U -> <n>U".into(),
                ));
            }
        }
        Ok(parts)
    }

    /// Rebuilds a map from its component description: each `s` goes to the
    /// multiple of the root image with norm `n |s|`.
    pub fn reassemble(
        source: PosetRef,
        target: PosetRef,
        parts: &[ComponentMap],
    ) -> Result<PosetMap, MapError> {
        let mut assign = vec![usize::MAX; source.len()];
        for c in parts {
            let image = target
                .multiple_with_norm(c.target_root, c.n)
                .ok_or_else(|| {
                    MapError::Invalid(format!("no element of norm {} above root", c.n))
                })?;
            for &s in source.multiples_of(c.source_root) {
                assign[s] = target
                    .multiple_with_norm(image, c.n * source.norm(s))
                    .ok_or_else(|| MapError::Invalid(format!("no image for {}", source.id(s))))?;
            }
        }
        if assign.contains(&usize::MAX) {
            return Err(MapError::Invalid(
                "components do not cover the source".into(),
            ));
        }
        PosetMap::new(source, target, assign)
    }

    /// `f ⊔ g : S ⊔ S' -> T` for maps with a common target.
    pub fn copair(f: &PosetMap, g: &PosetMap) -> Result<PosetMap, MapError> {
        if *f.target != *g.target {
            return Err(MapError::SourceTargetMismatch);
        }
        let parts = poset::coproduct_parts(&f.source, &g.source);
        let mut assign = vec![0; parts.poset.len()];
        for (i, &j) in parts.left.iter().enumerate() {
            assign[j] = f.assign[i];
        }
        for (i, &j) in parts.right.iter().enumerate() {
            assign[j] = g.assign[i];
        }
        PosetMap::new(Arc::new(parts.poset), f.target.clone(), assign)
    }

    /// `f ⊔ g : S ⊔ S' -> T ⊔ T'`.
    pub fn sum(f: &PosetMap, g: &PosetMap) -> Result<PosetMap, MapError> {
        let src = poset::coproduct_parts(&f.source, &g.source);
        let tgt = poset::coproduct_parts(&f.target, &g.target);
        let mut assign = vec![0; src.poset.len()];
        for (i, &j) in src.left.iter().enumerate() {
            assign[j] = tgt.left[f.assign[i]];
        }
        for (i, &j) in src.right.iter().enumerate() {
            assign[j] = tgt.right[g.assign[i]];
        }
        PosetMap::new(Arc::new(src.poset), Arc::new(tgt.poset), assign)
    }
}

/// The fold map `S ⊔ S -> S`.
pub fn fold(s: &PosetRef) -> PosetMap {
    let id = PosetMap::identity(s.clone());
    PosetMap::copair(&id, &id).expect("fold is a map")
}

/// Inclusion of `sub` into `sup`, matching elements by id.
pub fn inclusion(sub: PosetRef, sup: PosetRef) -> Result<PosetMap, MapError> {
    let pairs: Vec<(u64, u64)> = sub.elements().iter().map(|e| (e.id, e.id)).collect();
    PosetMap::from_pairs(sub, sup, &pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultVariant {
    /// `S -> <n>S`, `s -> ns`.
    Into,
    /// `S/n -> S`, `t -> nt`.
    FromQuotient,
}

/// Multiplication by `n` on an ordinary truncation set `S`.
pub fn mult(s: &PosetRef, n: u64, variant: MultVariant) -> Result<PosetMap, MapError> {
    let (quotient, scaled) = poset::scale_quotient(s, n)?;
    let (src, tgt) = match variant {
        MultVariant::Into => (s.clone(), Arc::new(scaled)),
        MultVariant::FromQuotient => (Arc::new(quotient), s.clone()),
    };
    let pairs: Vec<(u64, u64)> = src.elements().iter().map(|e| (e.id, e.id * n)).collect();
    PosetMap::from_pairs(src, tgt, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{coproduct, divisor_poset, from_set};

    fn set(xs: &[u64]) -> PosetRef {
        Arc::new(from_set(xs.iter().copied()).unwrap())
    }

    fn ids(p: &TruncationPoset, xs: &[usize]) -> Vec<u64> {
        xs.iter().map(|&i| p.id(i)).collect()
    }

    fn mult2_13() -> PosetMap {
        mult(&set(&[1, 3]), 2, MultVariant::Into).unwrap()
    }

    #[test]
    fn classification_of_standard_maps() {
        let inc = inclusion(set(&[1, 3]), set(&[1, 2, 3, 6])).unwrap();
        assert_eq!(
            inc.class(),
            MapClass {
                r: true,
                t: false,
                n: false
            }
        );
        assert_eq!(
            inc.require_t().unwrap_err(),
            MapError::NotTMap {
                source_elem: 1,
                target: 2
            }
        );
        let m = mult2_13();
        assert_eq!(
            m.class(),
            MapClass {
                r: true,
                t: true,
                n: true
            }
        );
        let f = fold(&set(&[1, 2]));
        assert!(f.is_t() && f.is_n());
        let inc2 = inclusion(set(&[1, 2]), set(&[1, 2, 4])).unwrap();
        assert!(!inc2.is_t() && !inc2.is_n());
        let q = mult(&set(&[1, 2, 3, 6]), 2, MultVariant::FromQuotient).unwrap();
        assert!(q.is_t());
    }

    #[test]
    fn invalid_maps() {
        let s = set(&[1, 2]);
        let t = set(&[1, 2, 4]);
        assert_eq!(
            PosetMap::from_pairs(s.clone(), t.clone(), &[(1, 2), (2, 2)]).unwrap_err(),
            MapError::NormRatioMismatch(1, 2)
        );
        let two = Arc::new(coproduct(&from_set([1]).unwrap(), &from_set([1]).unwrap()));
        let bad = PosetMap::new(s, two, vec![0, 1]).unwrap_err();
        assert!(matches!(bad, MapError::NotMonotone(1, 2)));
    }

    #[test]
    fn fibers() {
        let f = fold(&set(&[1]));
        assert_eq!(f.fiber(0).len(), 2);
        let m = mult2_13();
        let t = m.target().clone();
        assert!(m.fiber(t.index_of(3).unwrap()).is_empty());
        assert_eq!(ids(m.source(), &m.fiber(t.index_of(6).unwrap())), vec![3]);
        assert_eq!(
            ids(m.source(), &m.minimal_fiber(t.index_of(2).unwrap())),
            vec![1]
        );
        assert_eq!(
            ids(m.source(), &m.minimal_fiber(t.index_of(3).unwrap())),
            vec![3]
        );
        let id = PosetMap::identity(set(&[1, 2, 3, 6]));
        for t in 0..4 {
            assert_eq!(id.minimal_fiber(t), vec![t]);
        }
    }

    #[test]
    fn composition() {
        let one = set(&[1]);
        let f = mult(&one, 2, MultVariant::Into).unwrap();
        let g = mult(f.target(), 3, MultVariant::Into).unwrap();
        let h = f.then(&g).unwrap();
        assert_eq!(h.pairs(), vec![(1, 6)]);
        assert_eq!(h, mult(&one, 6, MultVariant::Into).unwrap());
        let id = PosetMap::identity(f.target().clone());
        assert_eq!(f.then(&id).unwrap(), f);
        let six = g.target().index_of(6).unwrap();
        let via: Vec<usize> = g
            .minimal_fiber(six)
            .into_iter()
            .flat_map(|t| f.minimal_fiber(t))
            .collect();
        assert_eq!(via, h.minimal_fiber(six));
        assert_eq!(g.then(&f).unwrap_err(), MapError::SourceTargetMismatch);
    }

    #[test]
    fn decomposition() {
        let m = mult2_13();
        let parts = m.decompose_n().unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].n, 2);
        let f = fold(&set(&[1, 2]));
        let parts = f.decompose_t().unwrap();
        assert_eq!(parts.iter().map(|c| c.n).collect::<Vec<_>>(), vec![1, 1]);
        let back = PosetMap::reassemble(f.source().clone(), f.target().clone(), &parts).unwrap();
        assert_eq!(back, f);

        let a = mult(&set(&[1]), 2, MultVariant::Into).unwrap();
        let a = inclusion(a.target().clone(), set(&[1, 2, 3, 6]))
            .and_then(|i| a.then(&i))
            .unwrap();
        let v = PosetMap::copair(&a, &m).unwrap();
        let ns: Vec<u64> = v.decompose().iter().map(|c| c.n).collect();
        assert_eq!(ns, vec![2, 2]);
    }

    #[test]
    fn minimal_divisibility_for_n_maps() {
        mult2_13().check_minimal_divisibility().unwrap();
        fold(&Arc::new(divisor_poset(12).unwrap()))
            .check_minimal_divisibility()
            .unwrap();
    }
}
