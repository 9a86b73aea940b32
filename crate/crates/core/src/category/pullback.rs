//! Pullbacks of a restriction along a transfer or a norm.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;

use super::{
    build_poset, built_map, construction_error, internal, require_class, same, CategoryError,
};
use crate::maps::{PosetMap, PosetRef};

/// An element `(s, t, ξ)` with `ξ` in `C_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PullbackElement {
    /// Index in the source of the first map.
    pub s: usize,
    /// Index in the source of the second map.
    pub t: usize,
    pub xi: u64,
    pub m: u64,
}

/// The pullback poset with its two projections: `g_prime` to the source of
/// the first map and `f_prime` to the source of the second.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub poset: PosetRef,
    /// Indexed like `poset`.
    pub elements: Vec<PullbackElement>,
    pub g_prime: PosetMap,
    pub f_prime: PosetMap,
}

fn check_cospan(f: &PosetMap, g: &PosetMap) -> Result<(), CategoryError> {
    if same(f.target(), g.target()) {
        Ok(())
    } else {
        Err(CategoryError::NotComposable(
            "the two maps have different targets".into(),
        ))
    }
}

fn ratio(num: u64, den: u64) -> u64 {
    num / den
}

fn assemble(
    f: &PosetMap,
    g: &PosetMap,
    pairs: Vec<(usize, usize)>,
    context: &str,
) -> Result<Pullback, CategoryError> {
    let (s_pos, t_pos, a_pos) = (f.source(), g.source(), f.target());
    let mut elems = Vec::new();
    for &(s, t) in &pairs {
        let m = ratio(a_pos.norm(f.apply(s)), s_pos.norm(s))
            .gcd(&ratio(a_pos.norm(g.apply(t)), t_pos.norm(t)));
        for xi in 0..m {
            elems.push(PullbackElement { s, t, xi, m });
        }
    }
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, e) in elems.iter().enumerate() {
        by_pair.entry((e.s, e.t)).or_default().push(i);
    }
    let mut divides = Vec::new();
    for (i, e) in elems.iter().enumerate() {
        for &s2 in s_pos.multiples_of(e.s) {
            for &t2 in t_pos.multiples_of(e.t) {
                for &j in by_pair.get(&(s2, t2)).into_iter().flatten() {
                    if j != i && elems[j].xi == e.xi {
                        divides.push((i, j));
                    }
                }
            }
        }
    }
    let labelled = elems
        .iter()
        .map(|e| {
            (
                s_pos.norm(e.s).gcd(&t_pos.norm(e.t)),
                format!("({},{},{})", s_pos.display(e.s), t_pos.display(e.t), e.xi),
            )
        })
        .collect();
    let built = build_poset(labelled, &divides).map_err(|e| construction_error(context, e))?;
    let to_s: Vec<usize> = elems.iter().map(|e| e.s).collect();
    let to_t: Vec<usize> = elems.iter().map(|e| e.t).collect();
    let g_prime = built_map(&built, s_pos.clone(), &to_s)
        .map_err(|e| internal(context)(format!("projection to S: {e}")))?;
    let f_prime = built_map(&built, t_pos.clone(), &to_t)
        .map_err(|e| internal(context)(format!("projection to T: {e}")))?;
    let mut ordered = elems.clone();
    for (i, &p) in built.index.iter().enumerate() {
        ordered[p] = elems[i];
    }
    Ok(Pullback {
        poset: built.poset,
        elements: ordered,
        g_prime,
        f_prime,
    })
}

/// For a T-map `f : S -> A` and an R-map `g : T -> A`, the poset of
/// `(s, t, ξ)` with `f(s) = g(t)`, so that `g^* f_⊕ = f'_⊕ g'^*`.
pub fn additive_pullback(f: &PosetMap, g: &PosetMap) -> Result<Pullback, CategoryError> {
    require_class(f, "f", 'T')?;
    check_cospan(f, g)?;
    let mut pairs = Vec::new();
    for s in 0..f.source().len() {
        for t in 0..g.source().len() {
            if f.apply(s) == g.apply(t) {
                pairs.push((s, t));
            }
        }
    }
    let p = assemble(f, g, pairs, "additive pullback")?;
    if !p.f_prime.is_t() {
        return Err(CategoryError::Internal(
            "projection of an additive pullback is not a T-map".into(),
        ));
    }
    Ok(p)
}

/// For an N-map `f : S -> A` and an R-map `g : T -> A`, the poset of
/// `(s, t, ξ)` with `g(t) | f(s)`, `s` minimal and `t` maximal, so that
/// `g^* f_⊗ = f'_⊗ g'^*`. Fails with `DoesNotExist` when two such pairs in
/// the same components have `|s1||t2| != |s2||t1|`.
pub fn mult_pullback(f: &PosetMap, g: &PosetMap) -> Result<Pullback, CategoryError> {
    require_class(f, "f", 'N')?;
    check_cospan(f, g)?;
    let (s_pos, t_pos, a_pos) = (f.source(), g.source(), f.target());
    let mut pairs = Vec::new();
    for t in 0..t_pos.len() {
        for s in f.minimal_fiber(g.apply(t)) {
            let fs = f.apply(s);
            let maximal = t_pos
                .multiples_of(t)
                .iter()
                .all(|&t2| t2 == t || !a_pos.divides(g.apply(t2), fs));
            if maximal {
                pairs.push((s, t));
            }
        }
    }
    let mut groups: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for &(s, t) in &pairs {
        groups
            .entry((s_pos.root(s), t_pos.root(t)))
            .or_default()
            .push((s, t));
    }
    for group in groups.values() {
        let (s1, t1) = group[0];
        for &(s2, t2) in &group[1..] {
            if s_pos.norm(s1) * t_pos.norm(t2) != s_pos.norm(s2) * t_pos.norm(t1) {
                return Err(CategoryError::DoesNotExist {
                    witness: [(s_pos.id(s1), t_pos.id(t1)), (s_pos.id(s2), t_pos.id(t2))],
                });
            }
        }
    }
    let p = assemble(f, g, pairs, "multiplicative pullback")?;
    if !p.f_prime.is_n() {
        return Err(CategoryError::Internal(
            "projection of a multiplicative pullback is not an N-map".into(),
        ));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::maps::{inclusion, mult, MultVariant};
    use crate::poset::from_set;
    use crate::witt::{ghost_apply, symbolic_ghost, OpKind};

    fn set(xs: &[u64]) -> PosetRef {
        Arc::new(from_set(xs.iter().copied()).unwrap())
    }

    #[test]
    fn doubling_pulled_back_along_doubling() {
        let m = mult(&set(&[1]), 2, MultVariant::Into).unwrap();
        let p = additive_pullback(&m, &m).unwrap();
        assert_eq!(p.poset.len(), 2);
        assert!(p.elements.iter().all(|e| e.m == 2));
        let x = symbolic_ghost(m.source(), "x");
        let left = ghost_apply(
            OpKind::Pull,
            &m,
            &ghost_apply(OpKind::Transfer, &m, &x).unwrap(),
        )
        .unwrap();
        assert_eq!(left.coord(0).to_string(), "2*x_1");
        let right = ghost_apply(
            OpKind::Transfer,
            &p.f_prime,
            &ghost_apply(OpKind::Pull, &p.g_prime, &x).unwrap(),
        )
        .unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn disjoint_images_give_an_empty_pullback() {
        let m = mult(&set(&[1]), 2, MultVariant::Into).unwrap();
        let inc = inclusion(set(&[1]), m.target().clone()).unwrap();
        assert!(additive_pullback(&m, &inc).unwrap().poset.is_empty());
    }

    #[test]
    fn pulling_back_along_the_identity() {
        let m = mult(&set(&[1, 2]), 3, MultVariant::Into).unwrap();
        let id = PosetMap::identity(m.target().clone());
        let p = additive_pullback(&m, &id).unwrap();
        assert_eq!(p.poset.len(), 2);
        assert_eq!(p.g_prime.assign().len(), 2);
        let q = mult_pullback(&m, &id).unwrap();
        assert_eq!(q.poset.len(), 2);
    }

    #[test]
    fn norm_past_restriction_can_fail() {
        let f = mult(&set(&[1, 3]), 2, MultVariant::Into).unwrap();
        let g = inclusion(set(&[1, 2, 3]), f.target().clone()).unwrap();
        match mult_pullback(&f, &g) {
            Err(CategoryError::DoesNotExist { witness }) => {
                assert_eq!(witness, [(1, 2), (3, 3)]);
            }
            other => panic!("expected DoesNotExist, got {other:?}"),
        }
    }

    #[test]
    fn joins_make_the_pullback_exist() {
        let f = mult(&set(&[1, 2, 3, 6]), 2, MultVariant::Into).unwrap();
        let g = inclusion(set(&[1, 2, 4]), f.target().clone()).unwrap();
        let p = mult_pullback(&f, &g).unwrap();
        let x = symbolic_ghost(f.source(), "x");
        let left = ghost_apply(
            OpKind::Pull,
            &g,
            &ghost_apply(OpKind::Norm, &f, &x).unwrap(),
        )
        .unwrap();
        let right = ghost_apply(
            OpKind::Norm,
            &p.f_prime,
            &ghost_apply(OpKind::Pull, &p.g_prime, &x).unwrap(),
        )
        .unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn class_mismatch_is_reported() {
        let inc = inclusion(set(&[1]), set(&[1, 2])).unwrap();
        assert!(matches!(
            mult_pullback(&inc, &inc),
            Err(CategoryError::ClassMismatch { required: 'N', .. })
        ));
    }
}
