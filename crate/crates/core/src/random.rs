//! Seeded generators of posets, maps, bispans and vectors for property
//! checks.
//!
//! Every component of a truncation poset is isomorphic to an ordinary
//! truncation set (its norms), so posets are generated as disjoint unions
//! of division-closed sets and maps component by component: the root of a
//! source component with norms `U` goes to the element of norm `c` in a
//! target component with norms `V`, and `u` to the element of norm `cu`.
//! Such a map is a T-map iff `U = V/c`, and an N-map iff every element of
//! `V` divides some `cu`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::divisors;
use crate::category::Bispan;
use crate::maps::{PosetMap, PosetRef};
use crate::poset::{disjoint_union, from_set, TruncationPoset};
use crate::rings::Ring;
use crate::witt::{GhostVector, WittVector};

/// Division closure of `gens`, always containing 1.
pub fn closure(gens: impl IntoIterator<Item = u64>) -> BTreeSet<u64> {
    let mut out = BTreeSet::from([1]);
    for g in gens {
        out.extend(divisors(g));
    }
    out
}

/// A random truncation set with elements at most `max_norm` and at most
/// `max_size` elements.
pub fn truncation_set<R: Rng + ?Sized>(
    rng: &mut R,
    max_norm: u64,
    max_size: usize,
) -> BTreeSet<u64> {
    let mut set = BTreeSet::from([1]);
    for _ in 0..rng.gen_range(0..=3) {
        let cand: BTreeSet<u64> = set
            .iter()
            .copied()
            .chain(divisors(rng.gen_range(1..=max_norm.max(1))))
            .collect();
        if cand.len() <= max_size.max(1) {
            set = cand;
        }
    }
    set
}

fn union_of(sets: &[BTreeSet<u64>]) -> TruncationPoset {
    let parts: Vec<TruncationPoset> = sets
        .iter()
        .map(|s| from_set(s.iter().copied()).expect("division closed"))
        .collect();
    let refs: Vec<&TruncationPoset> = parts.iter().collect();
    disjoint_union(&refs).poset
}

/// A random truncation poset with 1 to 3 components and at most
/// `max_elems` elements. Single-component results are sometimes ordinary
/// truncation sets.
pub fn poset<R: Rng + ?Sized>(rng: &mut R, max_elems: usize, max_norm: u64) -> TruncationPoset {
    let max_elems = max_elems.max(1);
    let mut sets = Vec::new();
    let mut room = max_elems;
    for _ in 0..rng.gen_range(1..=3) {
        if room == 0 {
            break;
        }
        let s = truncation_set(rng, max_norm, room);
        room -= s.len();
        sets.push(s);
    }
    if sets.len() == 1 && rng.gen_bool(0.5) {
        return from_set(sets[0].iter().copied()).expect("division closed");
    }
    union_of(&sets)
}

/// A disjoint union of sets `<k>` (divisors of `k`), which has joins.
pub fn join_poset<R: Rng + ?Sized>(
    rng: &mut R,
    max_elems: usize,
    max_norm: u64,
) -> TruncationPoset {
    let mut sets = Vec::new();
    let mut room = max_elems.max(1);
    for _ in 0..rng.gen_range(1..=2) {
        let ks: Vec<u64> = (1..=max_norm.max(1))
            .filter(|&k| divisors(k).len() <= room)
            .collect();
        let Some(&k) = ks.choose(rng) else { break };
        room -= divisors(k).len();
        sets.push(closure([k]));
    }
    union_of(&sets)
}

/// Norms of the component of `root`.
fn norms(p: &TruncationPoset, root: usize) -> BTreeSet<u64> {
    p.component_norms(root)
}

fn quotient_set(v: &BTreeSet<u64>, c: u64) -> BTreeSet<u64> {
    v.iter().filter(|&&x| x % c == 0).map(|&x| x / c).collect()
}

/// One source component: its norms, the target root and the norm of the
/// root's image.
struct Piece {
    norms: BTreeSet<u64>,
    root: usize,
    c: u64,
}

fn assemble(target: &PosetRef, pieces: &[Piece]) -> PosetMap {
    let sets: Vec<BTreeSet<u64>> = pieces.iter().map(|p| p.norms.clone()).collect();
    let parts: Vec<TruncationPoset> = sets
        .iter()
        .map(|s| from_set(s.iter().copied()).expect("division closed"))
        .collect();
    let refs: Vec<&TruncationPoset> = parts.iter().collect();
    let u = disjoint_union(&refs);
    let mut assign = vec![0; u.poset.len()];
    for (k, piece) in pieces.iter().enumerate() {
        for (i, &j) in u.injections[k].iter().enumerate() {
            let n = parts[k].norm(i);
            assign[j] = target
                .multiple_with_norm(piece.root, piece.c * n)
                .expect("image norm lies in the target component");
        }
    }
    PosetMap::new(Arc::new(u.poset), target.clone(), assign).expect("generated map is valid")
}

fn pick_pieces<R: Rng + ?Sized>(
    rng: &mut R,
    target: &PosetRef,
    max_elems: usize,
    min_pieces: usize,
    mut piece: impl FnMut(&mut R, usize, &BTreeSet<u64>) -> Option<(BTreeSet<u64>, u64)>,
) -> Vec<Piece> {
    let roots = target.roots();
    let mut pieces: Vec<Piece> = Vec::new();
    let mut room = max_elems;
    if roots.is_empty() {
        return pieces;
    }
    let count = rng.gen_range(min_pieces..=3);
    for _ in 0..count * 3 {
        if pieces.len() >= count {
            break;
        }
        let root = *roots.choose(rng).expect("nonempty");
        if let Some((u, c)) = piece(rng, root, &norms(target, root)) {
            if u.len() <= room {
                room -= u.len();
                pieces.push(Piece { norms: u, root, c });
            }
        }
    }
    pieces
}

/// A random T-map into `target` with at most `max_elems` source elements.
pub fn t_map_into<R: Rng + ?Sized>(rng: &mut R, target: &PosetRef, max_elems: usize) -> PosetMap {
    let pieces = pick_pieces(rng, target, max_elems, 1, |rng, _, v| {
        let vs: Vec<u64> = v.iter().copied().collect();
        let c = *vs.choose(rng)?;
        Some((quotient_set(v, c), c))
    });
    assemble(target, &pieces)
}

/// A random R-map into `target`; with `joins`, source components are sets
/// `<k>`.
pub fn r_map_into<R: Rng + ?Sized>(
    rng: &mut R,
    target: &PosetRef,
    max_elems: usize,
    joins: bool,
) -> PosetMap {
    let pieces = pick_pieces(rng, target, max_elems, 1, |rng, _, v| {
        let vs: Vec<u64> = v.iter().copied().collect();
        let c = *vs.choose(rng)?;
        let w: Vec<u64> = quotient_set(v, c).into_iter().collect();
        let u = if joins {
            closure([*w.choose(rng)?])
        } else {
            closure(w.iter().copied().filter(|_| rng.gen_bool(0.5)))
        };
        Some((u, c))
    });
    assemble(target, &pieces)
}

/// A random N-map into `target`.
pub fn n_map_into<R: Rng + ?Sized>(rng: &mut R, target: &PosetRef, max_elems: usize) -> PosetMap {
    let pieces = pick_pieces(rng, target, max_elems, 1, |rng, _, v| {
        let vs: Vec<u64> = v.iter().copied().collect();
        let c = if rng.gen_bool(0.3) {
            1
        } else {
            *vs.choose(rng)?
        };
        let w: Vec<u64> = quotient_set(v, c).into_iter().collect();
        let maximal: Vec<u64> = vs
            .iter()
            .copied()
            .filter(|&x| !vs.iter().any(|&y| y != x && y % x == 0))
            .collect();
        let mut picks = Vec::new();
        for m in maximal {
            let hits: Vec<u64> = w.iter().copied().filter(|&u| (c * u) % m == 0).collect();
            picks.push(*hits.choose(rng)?);
        }
        picks.extend(w.iter().copied().filter(|_| rng.gen_bool(0.3)));
        Some((closure(picks), c))
    });
    assemble(target, &pieces)
}

/// `(f, g)` with `f : S -> A` a T-map and `g : T -> A` an R-map.
pub fn rt_pair<R: Rng + ?Sized>(rng: &mut R, max_elems: usize) -> (PosetMap, PosetMap) {
    let a = Arc::new(poset(rng, max_elems, 8));
    (
        t_map_into(rng, &a, max_elems),
        r_map_into(rng, &a, max_elems, false),
    )
}

/// `(f, g)` with `f : S -> A` an N-map and `g : T -> A` an R-map whose
/// source has joins.
pub fn nr_pair<R: Rng + ?Sized>(rng: &mut R, max_elems: usize) -> (PosetMap, PosetMap) {
    let a = Arc::new(poset(rng, max_elems, 8));
    (
        n_map_into(rng, &a, max_elems),
        r_map_into(rng, &a, max_elems, true),
    )
}

/// `(f, g)` with `f : S -> A` a T-map and `g : A -> T` an N-map.
pub fn tn_pair<R: Rng + ?Sized>(
    rng: &mut R,
    max_elems: usize,
    max_norm: u64,
) -> (PosetMap, PosetMap) {
    let t = Arc::new(poset(rng, max_elems, max_norm));
    let g = n_map_into(rng, &t, max_elems);
    let f = t_map_into(rng, g.source(), max_elems);
    (f, g)
}

/// Finds or adds a component `<k>` with the given constraint on `k`.
fn join_target<R: Rng + ?Sized>(
    rng: &mut R,
    comps: &mut Vec<u64>,
    existing: impl Fn(u64) -> bool,
    fresh: u64,
) -> (usize, u64) {
    let fits: Vec<usize> = (0..comps.len()).filter(|&i| existing(comps[i])).collect();
    if !fits.is_empty() && rng.gen_bool(0.5) {
        let i = *fits.choose(rng).expect("nonempty");
        return (i, comps[i]);
    }
    comps.push(fresh);
    (comps.len() - 1, fresh)
}

fn component_roots(p: &TruncationPoset) -> Vec<(usize, u64)> {
    p.roots()
        .into_iter()
        .map(|r| (r, *p.component_norms(r).iter().max().expect("nonempty")))
        .collect()
}

/// Assembles a map from `<m_i>` pieces into a union of `<k_j>`.
fn join_map(source_ks: &[u64], target_ks: &[u64], pieces: &[(usize, u64)]) -> (PosetRef, PosetMap) {
    let target = Arc::new(union_of(
        &target_ks.iter().map(|&k| closure([k])).collect::<Vec<_>>(),
    ));
    let roots = component_roots(&target);
    let pieces: Vec<Piece> = source_ks
        .iter()
        .zip(pieces)
        .map(|(&m, &(j, c))| Piece {
            norms: closure([m]),
            root: roots[j].0,
            c,
        })
        .collect();
    (target.clone(), assemble(&target, &pieces))
}

/// A random bispan out of a poset with joins whose components are `<k>`,
/// staying inside posets with joins and norms at most `max_norm`.
pub fn bispan_from<R: Rng + ?Sized>(rng: &mut R, source: &PosetRef, max_norm: u64) -> Bispan {
    let s_comps = component_roots(source);
    // A: pieces <m> mapping into <k> with root -> c, c m | k.
    let mut a_pieces = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let Some(&(root, k)) = s_comps.choose(rng) else {
            break;
        };
        let c = *divisors(k).choose(rng).expect("nonempty");
        let m = *divisors(k / c).choose(rng).expect("nonempty");
        a_pieces.push(Piece {
            norms: closure([m]),
            root,
            c,
        });
    }
    let r = assemble(source, &a_pieces);
    let a_ks: Vec<u64> = a_pieces
        .iter()
        .map(|p| *p.norms.iter().max().expect("nonempty"))
        .collect();
    // B: <m> goes to <c m> with root -> c.
    let mut b_ks: Vec<u64> = Vec::new();
    let mut n_pieces = Vec::new();
    for &m in &a_ks {
        let fresh_c = *(1..=(max_norm / m).max(1))
            .collect::<Vec<_>>()
            .choose(rng)
            .expect("nonempty");
        let (j, k) = join_target(rng, &mut b_ks, |k| k % m == 0, fresh_c * m);
        n_pieces.push((j, k / m));
    }
    let (b, n) = join_map(&a_ks, &b_ks, &n_pieces);
    let n = PosetMap::new(r.source().clone(), b.clone(), n.assign().to_vec())
        .expect("same source layout");
    // T: <k> goes to <c k> with root -> c.
    let mut t_ks: Vec<u64> = Vec::new();
    let mut t_pieces = Vec::new();
    let b_comps: Vec<u64> = component_roots(&b).into_iter().map(|(_, k)| k).collect();
    for &k in &b_comps {
        let fresh_c = *(1..=(max_norm / k).max(1))
            .collect::<Vec<_>>()
            .choose(rng)
            .expect("nonempty");
        let (j, l) = join_target(rng, &mut t_ks, |l| l % k == 0, fresh_c * k);
        t_pieces.push((j, l / k));
    }
    let (_, t) = join_map(&b_comps, &t_ks, &t_pieces);
    let t = PosetMap::new(b.clone(), t.target().clone(), t.assign().to_vec())
        .expect("same source layout");
    Bispan::new(r, n, t).expect("generated bispan is valid")
}

/// Integer Witt coordinates in `[-range, range]`.
pub fn witt_vector<R: Rng + ?Sized>(rng: &mut R, p: &PosetRef, range: i64) -> WittVector {
    let coords = (0..p.len())
        .map(|_| Ring::Integers.from_i64(rng.gen_range(-range..=range)))
        .collect();
    WittVector::new(p.clone(), Ring::Integers, coords).expect("right length")
}

/// Integer ghost coordinates in `[-range, range]`.
pub fn ghost_vector<R: Rng + ?Sized>(rng: &mut R, p: &PosetRef, range: i64) -> GhostVector {
    let coords = (0..p.len())
        .map(|_| Ring::Integers.from_i64(rng.gen_range(-range..=range)))
        .collect();
    GhostVector::new(p.clone(), Ring::Integers, coords).expect("right length")
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn generated_maps_have_their_classes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (f, g) = rt_pair(&mut rng, 5);
            assert!(f.is_t());
            assert!(f.source().len() <= 5 && g.source().len() <= 5);
            let (f, g) = nr_pair(&mut rng, 5);
            assert!(f.is_n(), "{f:?}");
            assert!(g.source().has_joins());
            let (f, g) = tn_pair(&mut rng, 5, 6);
            assert!(f.is_t() && g.is_n());
        }
    }

    #[test]
    fn bispans_stay_in_the_join_subcategory() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let s = Arc::new(join_poset(&mut rng, 6, 6));
            let b = bispan_from(&mut rng, &s, 6);
            assert!(b.posets().iter().all(|p| p.has_joins()));
            let c = bispan_from(&mut rng, b.target(), 6);
            assert!(c.posets().iter().all(|p| p.has_joins()));
        }
    }

    #[test]
    fn posets_respect_the_size_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = poset(&mut rng, 5, 12);
            assert!(!p.is_empty() && p.len() <= 5);
        }
    }
}
