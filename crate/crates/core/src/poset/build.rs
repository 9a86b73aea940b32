//! Constructors for the standard families of truncation posets.

use std::collections::{BTreeMap, BTreeSet};

use super::{ElementInfo, PosetError, RawPoset, TruncationPoset};
use crate::arith::{divisors, gcd, prime_factors};

/// Builds an ordinary truncation set without re-checking closure.
fn ordinary(set: &BTreeSet<u64>) -> Result<TruncationPoset, PosetError> {
    let elements = set.iter().map(|&s| ElementInfo::new(s, s, None)).collect();
    let mut divides = Vec::new();
    for &s in set {
        for p in prime_factors(s) {
            divides.push((s / p, s));
        }
    }
    TruncationPoset::validate(RawPoset { elements, divides })
}

/// `<n>`: the divisors of `n` with norm the identity.
pub fn divisor_poset(n: u64) -> Result<TruncationPoset, PosetError> {
    if n == 0 {
        return Err(PosetError::Invalid("divisor poset of 0".into()));
    }
    ordinary(&divisors(n).into_iter().collect())
}

/// An ordinary truncation set: a set of positive integers closed under division.
pub fn from_set<I: IntoIterator<Item = u64>>(naturals: I) -> Result<TruncationPoset, PosetError> {
    let set: BTreeSet<u64> = naturals.into_iter().collect();
    if set.contains(&0) {
        return Err(PosetError::Invalid("0 is not a positive integer".into()));
    }
    for &s in &set {
        if let Some(&d) = divisors(s).iter().find(|d| !set.contains(d)) {
            return Err(PosetError::NotDivisionClosed {
                missing: d.to_string(),
                of: s.to_string(),
            });
        }
    }
    ordinary(&set)
}

/// For an ordinary truncation set `S` returns `(S/n, <n>S)`, where
/// `S/n = {t : nt in S}` and `<n>S = {es : e | n, s in S}`.
pub fn scale_quotient(
    p: &TruncationPoset,
    n: u64,
) -> Result<(TruncationPoset, TruncationPoset), PosetError> {
    let s = p.as_ordinary_set().ok_or(PosetError::NotOrdinary)?;
    if n == 0 {
        return Err(PosetError::Invalid("scale factor 0".into()));
    }
    let quotient: BTreeSet<u64> = s.iter().filter(|&&x| x % n == 0).map(|&x| x / n).collect();
    let scaled: BTreeSet<u64> = divisors(n)
        .into_iter()
        .flat_map(|e| s.iter().map(move |&x| e * x))
        .collect();
    let back: BTreeSet<u64> = scaled
        .iter()
        .filter(|&&x| x % n == 0)
        .map(|&x| x / n)
        .collect();
    assert_eq!(back, s, "(<n>S)/n must equal S");
    Ok((from_set(quotient)?, from_set(scaled)?))
}

/// A coproduct together with the index of each summand element in it.
#[derive(Debug, Clone)]
pub struct Coproduct {
    pub poset: TruncationPoset,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Disjoint union. Left ids are kept; right ids are shifted past the left
/// ones when they would collide. Labels are tagged `0.` and `1.`.
pub fn coproduct(p: &TruncationPoset, q: &TruncationPoset) -> TruncationPoset {
    coproduct_parts(p, q).poset
}

pub fn coproduct_parts(p: &TruncationPoset, q: &TruncationPoset) -> Coproduct {
    let max_left = p.elements().iter().map(|e| e.id).max();
    let min_right = q.elements().iter().map(|e| e.id).min();
    let shift = match (max_left, min_right) {
        (Some(m), Some(r)) if r <= m => m + 1 - r,
        _ => 0,
    };
    let tag = |side: u8, t: &TruncationPoset, i: usize| format!("{side}.{}", t.display(i));
    let mut elements = Vec::with_capacity(p.len() + q.len());
    let mut divides = Vec::new();
    for i in 0..p.len() {
        elements.push(ElementInfo::new(p.id(i), p.norm(i), Some(tag(0, p, i))));
        for &j in p.covers(i) {
            divides.push((p.id(i), p.id(j)));
        }
    }
    for i in 0..q.len() {
        elements.push(ElementInfo::new(
            q.id(i) + shift,
            q.norm(i),
            Some(tag(1, q, i)),
        ));
        for &j in q.covers(i) {
            divides.push((q.id(i) + shift, q.id(j) + shift));
        }
    }
    let poset = TruncationPoset::validate(RawPoset { elements, divides })
        .expect("coproduct of truncation posets is a truncation poset");
    let left = (0..p.len())
        .map(|i| poset.index_of(p.id(i)).unwrap())
        .collect();
    let right = (0..q.len())
        .map(|i| poset.index_of(q.id(i) + shift).unwrap())
        .collect();
    Coproduct { poset, left, right }
}

/// A disjoint union of several posets with the index of each summand
/// element in the union.
#[derive(Debug, Clone)]
pub struct DisjointUnion {
    pub poset: TruncationPoset,
    pub injections: Vec<Vec<usize>>,
}

/// Disjoint union with fresh ids `1..` and labels `<summand>.<label>`.
pub fn disjoint_union(parts: &[&TruncationPoset]) -> DisjointUnion {
    let mut elements = Vec::new();
    let mut divides = Vec::new();
    let mut offsets = Vec::with_capacity(parts.len());
    let mut next = 1u64;
    for (k, p) in parts.iter().enumerate() {
        offsets.push(next);
        for i in 0..p.len() {
            elements.push(ElementInfo::new(
                next + i as u64,
                p.norm(i),
                Some(format!("{k}.{}", p.display(i))),
            ));
            for &j in p.covers(i) {
                divides.push((next + i as u64, next + j as u64));
            }
        }
        next += p.len() as u64;
    }
    let poset = TruncationPoset::validate(RawPoset { elements, divides })
        .expect("disjoint union of truncation posets is a truncation poset");
    let injections = parts
        .iter()
        .zip(&offsets)
        .map(|(p, &o)| {
            (0..p.len())
                .map(|i| poset.index_of(o + i as u64).unwrap())
                .collect()
        })
        .collect();
    DisjointUnion { poset, injections }
}

fn tuple_label(t: &[u64]) -> String {
    let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Tuples of positive integers with `s | t` iff `t = d s` for an integer `d`
/// and norm the gcd of the coordinates. With weights `a_i`, coordinates are
/// divided by `a_i` first (each `a_i` must divide the `i`th coordinate).
pub fn gcd_poset(
    tuples: &[Vec<u64>],
    weights: Option<&[u64]>,
) -> Result<TruncationPoset, PosetError> {
    let k = match tuples.first() {
        Some(t) => t.len(),
        None => return TruncationPoset::validate(RawPoset::default()),
    };
    if k == 0 {
        return Err(PosetError::Invalid("tuples must be nonempty".into()));
    }
    if let Some(w) = weights {
        if w.len() != k || w.contains(&0) {
            return Err(PosetError::WeightViolation(format!(
                "expected {k} positive weights, got {w:?}"
            )));
        }
    }
    let mut reduced: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::new();
    for t in tuples {
        if t.len() != k {
            return Err(PosetError::Invalid(format!(
                "tuple {} has length {}, expected {k}",
                tuple_label(t),
                t.len()
            )));
        }
        if t.contains(&0) {
            return Err(PosetError::Invalid(format!(
                "tuple {} has a zero coordinate",
                tuple_label(t)
            )));
        }
        let r: Vec<u64> = match weights {
            Some(w) => {
                if let Some(i) = (0..k).find(|&i| t[i] % w[i] != 0) {
                    return Err(PosetError::WeightViolation(format!(
                        "weight {} does not divide coordinate {} of {}",
                        w[i],
                        i,
                        tuple_label(t)
                    )));
                }
                t.iter().zip(w).map(|(x, a)| x / a).collect()
            }
            None => t.clone(),
        };
        reduced.insert(r, t.clone());
    }
    let norm = |r: &[u64]| r.iter().fold(0, |g, &x| gcd(g, x));
    for (r, orig) in &reduced {
        for d in divisors(norm(r)) {
            let q: Vec<u64> = r.iter().map(|x| x / d).collect();
            if !reduced.contains_key(&q) {
                let missing: Vec<u64> = match weights {
                    Some(w) => q.iter().zip(w).map(|(x, a)| x * a).collect(),
                    None => q,
                };
                return Err(PosetError::NotDivisionClosed {
                    missing: tuple_label(&missing),
                    of: tuple_label(orig),
                });
            }
        }
    }
    let mut order: Vec<(&Vec<u64>, &Vec<u64>)> = reduced.iter().collect();
    order.sort_by_key(|(r, _)| (norm(r), (*r).clone()));
    let ids: BTreeMap<&Vec<u64>, u64> = order
        .iter()
        .enumerate()
        .map(|(i, (r, _))| (*r, i as u64 + 1))
        .collect();
    let elements = order
        .iter()
        .map(|(r, orig)| ElementInfo::new(ids[r], norm(r), Some(tuple_label(orig))))
        .collect();
    let mut divides = Vec::new();
    for (r, _) in &order {
        for p in prime_factors(norm(r)) {
            let q: Vec<u64> = r.iter().map(|x| x / p).collect();
            divides.push((ids[&q], ids[r]));
        }
    }
    TruncationPoset::validate(RawPoset { elements, divides })
}

/// A word as a sequence of letter numbers `1..=n`.
pub type Word = Vec<u32>;

/// Parses `x1x2x1x2` (or `x_1x_2...`) into letter numbers.
pub fn parse_word(text: &str) -> Result<Word, PosetError> {
    let bad = || PosetError::Invalid(format!("cannot parse word {text:?}"));
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.strip_prefix('x').ok_or_else(bad)?;
        rest = rest.strip_prefix('_').unwrap_or(rest);
        let end = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        if end == 0 {
            return Err(bad());
        }
        out.push(rest[..end].parse().map_err(|_| bad())?);
        rest = &rest[end..];
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn word_label(w: &[u32]) -> String {
    w.iter().map(|l| format!("x{l}")).collect()
}

fn least_rotation(w: &[u32], block: usize) -> Word {
    (0..w.len() / block)
        .map(|k| {
            let mut r = w[k * block..].to_vec();
            r.extend_from_slice(&w[..k * block]);
            r
        })
        .min()
        .expect("nonempty word")
}

/// Largest `d` with `w = u^d` and `|u|` a multiple of `block`.
fn word_norm(w: &[u32], block: usize) -> u64 {
    let len = w.len();
    divisors((len / block) as u64)
        .into_iter()
        .rev()
        .find(|&d| {
            let p = len / d as usize;
            (p..len).all(|i| w[i] == w[i - p])
        })
        .unwrap_or(1)
}

/// Words in `letters` letters, taken up to cyclic permutation of blocks of
/// `block` letters. `w | w'` when `w'` is a power of `w`; the norm of `w` is
/// the largest `d` with `w = u^d`, `|u|` divisible by `block`.
pub fn word_poset(
    words: &[Word],
    letters: u32,
    block: usize,
) -> Result<TruncationPoset, PosetError> {
    if block == 0 {
        return Err(PosetError::Invalid("block size 0".into()));
    }
    let mut classes: BTreeSet<Word> = BTreeSet::new();
    for w in words {
        if w.is_empty() {
            return Err(PosetError::Invalid("empty word".into()));
        }
        if let Some(l) = w.iter().find(|&&l| l == 0 || l > letters) {
            return Err(PosetError::Invalid(format!(
                "letter x{l} outside x1..x{letters}"
            )));
        }
        if w.len() % block != 0 {
            return Err(PosetError::LengthNotDivisible {
                word: word_label(w),
                block,
            });
        }
        classes.insert(least_rotation(w, block));
    }
    for w in &classes {
        let d = word_norm(w, block);
        for e in divisors(d) {
            let prefix = least_rotation(&w[..w.len() / e as usize], block);
            if !classes.contains(&prefix) {
                return Err(PosetError::NotDivisionClosed {
                    missing: word_label(&prefix),
                    of: word_label(w),
                });
            }
        }
    }
    let mut order: Vec<(u64, String, &Word)> = classes
        .iter()
        .map(|w| (word_norm(w, block), word_label(w), w))
        .collect();
    order.sort();
    let ids: BTreeMap<&Word, u64> = order
        .iter()
        .enumerate()
        .map(|(i, (_, _, w))| (*w, i as u64 + 1))
        .collect();
    let mut elements = Vec::new();
    let mut divides = Vec::new();
    for (norm, label, w) in &order {
        elements.push(ElementInfo::new(ids[w], *norm, Some(label.clone())));
        for p in prime_factors(*norm) {
            let prefix = least_rotation(&w[..w.len() / p as usize], block);
            divides.push((ids[&prefix], ids[w]));
        }
    }
    TruncationPoset::validate(RawPoset { elements, divides })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norms(p: &TruncationPoset) -> Vec<u64> {
        (0..p.len()).map(|i| p.norm(i)).collect()
    }

    #[test]
    fn divisor_posets() {
        assert_eq!(norms(&divisor_poset(1).unwrap()), vec![1]);
        assert_eq!(norms(&divisor_poset(6).unwrap()), vec![1, 2, 3, 6]);
        assert_eq!(norms(&divisor_poset(4).unwrap()), vec![1, 2, 4]);
        let p = divisor_poset(12).unwrap();
        assert_eq!(p.as_ordinary_set().unwrap().len(), 6);
        assert!(p.has_joins());
    }

    #[test]
    fn ordinary_sets() {
        let p = from_set([1, 2, 3]).unwrap();
        assert_eq!(p.len(), 3);
        assert!(!p.has_joins());
        assert_eq!(
            from_set([2, 4]).unwrap_err(),
            PosetError::NotDivisionClosed {
                missing: "1".into(),
                of: "2".into()
            }
        );
        assert!(from_set([1]).unwrap().has_joins());
    }

    #[test]
    fn scaling_and_quotients() {
        let s = from_set([1, 2, 3, 6]).unwrap();
        let (q, _) = scale_quotient(&s, 2).unwrap();
        assert_eq!(q.as_ordinary_set().unwrap(), BTreeSet::from([1, 3]));
        let (_, up) = scale_quotient(&from_set([1, 3]).unwrap(), 2).unwrap();
        assert_eq!(up.as_ordinary_set().unwrap(), BTreeSet::from([1, 2, 3, 6]));
        let (q1, u1) = scale_quotient(&from_set([1]).unwrap(), 1).unwrap();
        assert_eq!(q1.len(), 1);
        assert_eq!(u1.len(), 1);
        let one = from_set([1]).unwrap();
        let two = coproduct(&one, &one);
        assert_eq!(
            scale_quotient(&two, 2).unwrap_err(),
            PosetError::NotOrdinary
        );
    }

    #[test]
    fn coproducts() {
        let one = from_set([1]).unwrap();
        let two = coproduct(&one, &one);
        assert_eq!(norms(&two), vec![1, 1]);
        let p = coproduct(&from_set([1, 2]).unwrap(), &from_set([1, 3]).unwrap());
        assert_eq!(p.len(), 4);
        assert_eq!(p.components().len(), 2);
        let e = coproduct(&p, &TruncationPoset::empty());
        assert_eq!(norms(&e), norms(&p));
        let parts = coproduct_parts(&one, &one);
        assert_ne!(parts.left[0], parts.right[0]);
        let u = disjoint_union(&[&one, &p, &one]);
        assert_eq!(u.poset.len(), 6);
        assert_eq!(u.poset.components().len(), 4);
        assert_eq!(u.injections[1].len(), 4);
        assert!(disjoint_union(&[]).poset.is_empty());
    }

    #[test]
    fn gcd_posets() {
        let chain = gcd_poset(&[vec![1, 1], vec![2, 2]], None).unwrap();
        assert_eq!(norms(&chain), vec![1, 2]);
        assert!(chain.divides(0, 1));
        let p = gcd_poset(&[vec![2, 4], vec![1, 2]], None).unwrap();
        assert_eq!(p.label(1), Some("(2,4)"));
        assert_eq!(p.norm(1), 2);
        let w = gcd_poset(&[vec![2], vec![4]], Some(&[2])).unwrap();
        assert_eq!(norms(&w), vec![1, 2]);
        assert!(matches!(
            gcd_poset(&[vec![3]], Some(&[2])),
            Err(PosetError::WeightViolation(_))
        ));
        assert!(matches!(
            gcd_poset(&[vec![2, 4]], None),
            Err(PosetError::NotDivisionClosed { .. })
        ));
    }

    #[test]
    fn word_posets() {
        let chain = word_poset(&[vec![1], vec![1, 1]], 1, 1).unwrap();
        assert_eq!(norms(&chain), vec![1, 2]);
        let w = parse_word("x1x2x1x2").unwrap();
        for a in [1, 2] {
            let p = word_poset(&[vec![1, 2], w.clone()], 2, a).unwrap();
            let i = (0..p.len())
                .find(|&i| p.label(i) == Some("x1x2x1x2"))
                .unwrap();
            assert_eq!(p.norm(i), 2);
        }
        let p = word_poset(std::slice::from_ref(&w), 2, 4).unwrap();
        assert_eq!(norms(&p), vec![1]);
        assert!(matches!(
            word_poset(&[vec![1, 2, 1]], 2, 2),
            Err(PosetError::LengthNotDivisible { .. })
        ));
        assert!(matches!(
            word_poset(&[w], 2, 1),
            Err(PosetError::NotDivisionClosed { .. })
        ));
    }

    #[test]
    fn rotations_are_identified() {
        let p = word_poset(&[vec![1, 2], vec![2, 1]], 2, 1).unwrap();
        assert_eq!(p.len(), 1);
        let q = word_poset(&[vec![1, 2], vec![2, 1]], 2, 2).unwrap();
        assert_eq!(q.len(), 2);
    }
}
