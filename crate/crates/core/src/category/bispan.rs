//! Bispans `S <-f- A -g-> B -h-> T` standing for `h_⊕ g_⊗ f^*`, and words
//! of tagged arrows.

use super::{
    additive_pullback, exponential_diagram, mult_pullback, require_class, same, CategoryError,
};
use crate::maps::{PosetMap, PosetRef};
use crate::witt::{apply, ghost_apply, GhostVector, OpKind, WittVector};

/// One arrow of a word: an operation along a map. `Pull` reads from the
/// map's target, the others from its source.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub kind: OpKind,
    pub map: PosetMap,
}

impl Leg {
    pub fn new(kind: OpKind, map: PosetMap) -> Result<Self, CategoryError> {
        match kind {
            OpKind::Pull => {}
            OpKind::Transfer => require_class(&map, "transfer leg", 'T')?,
            OpKind::Norm => require_class(&map, "norm leg", 'N')?,
        }
        Ok(Leg { kind, map })
    }

    pub fn input(&self) -> &PosetRef {
        self.kind.input(&self.map)
    }

    pub fn output(&self) -> &PosetRef {
        self.kind.output(&self.map)
    }
}

/// Applies the legs of `word` to `v` from first to last.
pub fn evaluate_morphism(word: &[Leg], v: &WittVector) -> Result<WittVector, CategoryError> {
    let mut cur = v.clone();
    for (index, leg) in word.iter().enumerate() {
        cur = apply(leg.kind, &leg.map, &cur).map_err(|error| CategoryError::AtLeg {
            index,
            error: Box::new(error.into()),
        })?;
    }
    Ok(cur)
}

/// Checks that consecutive legs share their poset.
pub fn check_word(word: &[Leg]) -> Result<(), CategoryError> {
    for (index, pair) in word.windows(2).enumerate() {
        if !same(pair[0].output(), pair[1].input()) {
            return Err(CategoryError::AtLeg {
                index: index + 1,
                error: Box::new(CategoryError::NotComposable(
                    "input differs from the previous output".into(),
                )),
            });
        }
    }
    Ok(())
}

/// `S <-r- A -n-> B -t-> T` with `r` an R-map, `n` an N-map and `t` a
/// T-map.
#[derive(Debug, Clone, PartialEq)]
pub struct Bispan {
    r: PosetMap,
    n: PosetMap,
    t: PosetMap,
}

impl Bispan {
    pub fn new(r: PosetMap, n: PosetMap, t: PosetMap) -> Result<Self, CategoryError> {
        require_class(&n, "middle leg", 'N')?;
        require_class(&t, "last leg", 'T')?;
        if !same(r.source(), n.source()) {
            return Err(CategoryError::NotComposable(
                "first and middle legs have different sources".into(),
            ));
        }
        if !same(n.target(), t.source()) {
            return Err(CategoryError::NotComposable(
                "middle leg does not end where the last leg starts".into(),
            ));
        }
        Ok(Bispan { r, n, t })
    }

    pub fn identity(s: PosetRef) -> Self {
        let id = PosetMap::identity(s);
        Bispan {
            r: id.clone(),
            n: id.clone(),
            t: id,
        }
    }

    /// A single arrow as a bispan with identities in the other legs.
    pub fn from_leg(leg: &Leg) -> Result<Self, CategoryError> {
        let f = leg.map.clone();
        let id_src = PosetMap::identity(f.source().clone());
        let id_tgt = PosetMap::identity(f.target().clone());
        match leg.kind {
            OpKind::Pull => Bispan::new(f, id_src.clone(), id_src),
            OpKind::Norm => Bispan::new(id_src, f, id_tgt),
            OpKind::Transfer => Bispan::new(id_src.clone(), id_src, f),
        }
    }

    pub fn r(&self) -> &PosetMap {
        &self.r
    }

    pub fn n(&self) -> &PosetMap {
        &self.n
    }

    pub fn t(&self) -> &PosetMap {
        &self.t
    }

    pub fn source(&self) -> &PosetRef {
        self.r.target()
    }

    pub fn target(&self) -> &PosetRef {
        self.t.target()
    }

    /// `S, A, B, T`.
    pub fn posets(&self) -> [&PosetRef; 4] {
        [
            self.r.target(),
            self.r.source(),
            self.n.target(),
            self.t.target(),
        ]
    }

    pub fn legs(&self) -> Vec<Leg> {
        vec![
            Leg {
                kind: OpKind::Pull,
                map: self.r.clone(),
            },
            Leg {
                kind: OpKind::Norm,
                map: self.n.clone(),
            },
            Leg {
                kind: OpKind::Transfer,
                map: self.t.clone(),
            },
        ]
    }

    pub fn evaluate(&self, v: &WittVector) -> Result<WittVector, CategoryError> {
        evaluate_morphism(&self.legs(), v)
    }

    pub fn evaluate_ghost(&self, x: &GhostVector) -> Result<GhostVector, CategoryError> {
        let mut cur = x.clone();
        for leg in self.legs() {
            cur = ghost_apply(leg.kind, &leg.map, &cur)?;
        }
        Ok(cur)
    }
}

fn check_joins(b: &Bispan, which: &str) -> Result<(), CategoryError> {
    for (name, p) in ["S", "A", "B", "T"].iter().zip(b.posets()) {
        if !p.has_joins() {
            return Err(CategoryError::JoinsRequired {
                poset: format!("{name} of the {which} bispan"),
            });
        }
    }
    Ok(())
}

fn no_failure(e: CategoryError) -> CategoryError {
    match e {
        CategoryError::DoesNotExist { .. } => {
            CategoryError::Internal(format!("pullback failed inside the join subcategory: {e}"))
        }
        other => other,
    }
}

/// The normal form of `b2 ∘ b1` for bispans all of whose posets have
/// joins: the restriction of `b2` is moved past the transfer of `b1`, the
/// resulting restriction past the norm of `b1`, the norm of `b2` past the
/// new transfer, and the last restriction past the new norm.
pub fn compose_bispans(b1: &Bispan, b2: &Bispan) -> Result<Bispan, CategoryError> {
    if !same(b1.target(), b2.source()) {
        return Err(CategoryError::NotComposable(
            "target of the first bispan is not the source of the second".into(),
        ));
    }
    check_joins(b1, "first")?;
    check_joins(b2, "second")?;
    let p = additive_pullback(&b1.t, &b2.r)?;
    let q = mult_pullback(&b1.n, &p.g_prime).map_err(no_failure)?;
    let x = exponential_diagram(&p.f_prime, &b2.n)?;
    let w = mult_pullback(&q.f_prime, &x.r).map_err(no_failure)?;
    let r = w.g_prime.then(&q.g_prime)?.then(&b1.r)?;
    let n = w.f_prime.then(&x.n)?;
    let t = x.t.then(&b2.t)?;
    Bispan::new(r, n, t).map_err(|e| CategoryError::Internal(format!("composite: {e}")))
}

type ComponentSig = (Vec<u64>, u64, u64);

/// For each component of `B`: its norms, the id of the image of its root
/// in `T`, and the sorted signatures of the components of `A` over it
/// (norms, id of the root's image in `S`, norm of the root's image in `B`).
fn invariant(x: &Bispan) -> Vec<(Vec<u64>, u64, Vec<ComponentSig>)> {
    let (a, b) = (x.r.source(), x.n.target());
    let mut attached: std::collections::BTreeMap<usize, Vec<ComponentSig>> = b
        .roots()
        .into_iter()
        .map(|root| (root, Vec::new()))
        .collect();
    for root in a.roots() {
        let image = x.n.apply(root);
        attached
            .get_mut(&b.root(image))
            .expect("roots are listed")
            .push((
                a.component_norms(root).into_iter().collect(),
                x.r.target().id(x.r.apply(root)),
                b.norm(image),
            ));
    }
    let mut out: Vec<_> = attached
        .into_iter()
        .map(|(root, mut sigs)| {
            sigs.sort();
            (
                b.component_norms(root).into_iter().collect(),
                x.t.target().id(x.t.apply(root)),
                sigs,
            )
        })
        .collect();
    out.sort();
    out
}

/// Whether there are poset isomorphisms `A -> A'` and `B -> B'` commuting
/// with all legs.
///
/// Each component of a truncation poset is determined by its norms, so a
/// leg is determined on a component by the image of its root. An
/// isomorphism therefore exists iff the components of `B`, each with the
/// components of `A` over it, match up with equal root images.
pub fn isomorphic(x: &Bispan, y: &Bispan) -> bool {
    same(x.source(), y.source()) && same(x.target(), y.target()) && invariant(x) == invariant(y)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::maps::{fold, mult, MultVariant};
    use crate::poset::from_set;
    use crate::rings::Ring;
    use crate::witt::{add, frobenius, scalar, verschiebung};

    fn set(xs: &[u64]) -> PosetRef {
        Arc::new(from_set(xs.iter().copied()).unwrap())
    }

    fn ints(p: &PosetRef, xs: &[i64]) -> WittVector {
        let c = xs.iter().map(|&x| Ring::Integers.from_i64(x)).collect();
        WittVector::new(p.clone(), Ring::Integers, c).unwrap()
    }

    #[test]
    fn words_evaluate_left_to_right() {
        let one = set(&[1]);
        let m = mult(&one, 2, MultVariant::Into).unwrap();
        let v = ints(&one, &[7]);
        assert_eq!(evaluate_morphism(&[], &v).unwrap(), v);
        let word = [
            Leg::new(OpKind::Transfer, m.clone()).unwrap(),
            Leg::new(OpKind::Pull, m).unwrap(),
        ];
        assert_eq!(evaluate_morphism(&word, &v).unwrap(), ints(&one, &[14]));
        let p = set(&[1, 2]);
        let sum = [Leg::new(OpKind::Transfer, fold(&p)).unwrap()];
        let v = ints(&p, &[1, 1]);
        let both = crate::witt::concat(&v, &v).unwrap();
        assert_eq!(
            evaluate_morphism(&sum, &both).unwrap(),
            add(&v, &v).unwrap()
        );
    }

    #[test]
    fn bad_leg_is_reported_with_its_index() {
        let one = set(&[1]);
        let m = mult(&one, 2, MultVariant::Into).unwrap();
        let word = [
            Leg::new(OpKind::Transfer, m.clone()).unwrap(),
            Leg::new(OpKind::Transfer, m).unwrap(),
        ];
        assert!(matches!(
            check_word(&word),
            Err(CategoryError::AtLeg { index: 1, .. })
        ));
        assert!(matches!(
            evaluate_morphism(&word, &ints(&one, &[1])),
            Err(CategoryError::AtLeg { index: 1, .. })
        ));
    }

    #[test]
    fn identity_is_a_unit() {
        let s = set(&[1, 2, 4]);
        let m = mult(&s, 2, MultVariant::Into).unwrap();
        let b = Bispan::from_leg(&Leg::new(OpKind::Norm, m.clone()).unwrap()).unwrap();
        let left = compose_bispans(&Bispan::identity(s), &b).unwrap();
        let right = compose_bispans(&b, &Bispan::identity(m.target().clone())).unwrap();
        assert!(isomorphic(&left, &b));
        assert!(isomorphic(&right, &b));
    }

    #[test]
    fn frobenius_after_verschiebung() {
        let s = set(&[1, 2, 3, 6]);
        let v = ints(&s, &[2, -1, 3, 5]);
        for n in [2u64, 3] {
            let m = mult(&s, n, MultVariant::Into).unwrap();
            let vb = Bispan::from_leg(&Leg::new(OpKind::Transfer, m.clone()).unwrap()).unwrap();
            let back = mult(m.target(), n, MultVariant::FromQuotient).unwrap();
            assert_eq!(**back.source(), *s);
            let back = PosetMap::new(
                m.source().clone(),
                m.target().clone(),
                back.assign().to_vec(),
            )
            .unwrap();
            let fb = Bispan::from_leg(&Leg::new(OpKind::Pull, back).unwrap()).unwrap();
            let c = compose_bispans(&vb, &fb).unwrap();
            let expected = scalar(n, &v).unwrap();
            assert_eq!(c.evaluate(&v).unwrap(), expected);
            assert_eq!(
                frobenius(&verschiebung(&v, n).unwrap(), n).unwrap(),
                expected
            );
        }
    }

    #[test]
    fn joins_are_required() {
        let b = Bispan::identity(set(&[1, 2, 3]));
        let c = Bispan::identity(set(&[1, 2, 3]));
        let ok = Bispan::identity(set(&[1, 2, 3, 6]));
        assert!(compose_bispans(&ok, &ok).is_ok());
        assert!(matches!(
            compose_bispans(&b, &c),
            Err(CategoryError::JoinsRequired { .. })
        ));
    }

    #[test]
    fn non_isomorphic_bispans() {
        let s = set(&[1, 2]);
        let m = mult(&s, 2, MultVariant::Into).unwrap();
        let a = Bispan::from_leg(&Leg::new(OpKind::Norm, m.clone()).unwrap()).unwrap();
        let b = Bispan::from_leg(&Leg::new(OpKind::Transfer, m).unwrap()).unwrap();
        assert!(!isomorphic(&a, &b));
        assert!(isomorphic(&a, &a.clone()));
    }
}
