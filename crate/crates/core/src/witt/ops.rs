//! Restriction, transfer and norm on ghost and Witt coordinates.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{ghost, same_poset, unghost, universal, GhostVector, WittError, WittVector};
use crate::maps::{PosetMap, PosetRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    /// `f^*`, along an R-map, from target to source.
    Pull,
    /// `f_⊕`, along a T-map.
    Transfer,
    /// `f_⊗`, along an N-map.
    Norm,
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OpKind::Pull => "pull",
            OpKind::Transfer => "transfer",
            OpKind::Norm => "norm",
        })
    }
}

impl FromStr for OpKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "pull" | "r" | "restriction" => Ok(OpKind::Pull),
            "transfer" | "t" => Ok(OpKind::Transfer),
            "norm" | "n" => Ok(OpKind::Norm),
            other => Err(format!("unknown operation kind {other:?}")),
        }
    }
}

impl OpKind {
    pub const ALL: [OpKind; 3] = [OpKind::Pull, OpKind::Transfer, OpKind::Norm];

    /// Poset the operation reads from.
    pub fn input<'a>(&self, f: &'a PosetMap) -> &'a PosetRef {
        match self {
            OpKind::Pull => f.target(),
            _ => f.source(),
        }
    }

    /// Poset the operation writes to.
    pub fn output<'a>(&self, f: &'a PosetMap) -> &'a PosetRef {
        match self {
            OpKind::Pull => f.source(),
            _ => f.target(),
        }
    }

    /// Fails unless `f` has the class this operation needs.
    pub fn check(&self, f: &PosetMap) -> Result<(), WittError> {
        let (ok, required) = match self {
            OpKind::Pull => (true, 'R'),
            OpKind::Transfer => (f.is_t(), 'T'),
            OpKind::Norm => (f.is_n(), 'N'),
        };
        if ok {
            Ok(())
        } else {
            Err(WittError::ClassMismatch {
                required,
                kind: *self,
            })
        }
    }
}

fn check_input(kind: OpKind, f: &PosetMap, p: &PosetRef) -> Result<(), WittError> {
    kind.check(f)?;
    if same_poset(kind.input(f), p) {
        Ok(())
    } else {
        Err(WittError::PosetMismatch(format!(
            "the {} input of {kind}",
            if kind == OpKind::Pull {
                "target"
            } else {
                "source"
            }
        )))
    }
}

/// `(f^* x)_s = x_{f(s)}`.
pub fn ghost_pull(f: &PosetMap, g: &GhostVector) -> Result<GhostVector, WittError> {
    check_input(OpKind::Pull, f, g.poset())?;
    let coords = f.assign().iter().map(|&t| g.coord(t).clone()).collect();
    GhostVector::new(f.source().clone(), g.ring(), coords)
}

/// `(f_⊕ x)_t = sum_{s in f^{-1}(t)} (|t|/|s|) x_s`; empty sums are 0.
pub fn ghost_transfer(f: &PosetMap, g: &GhostVector) -> Result<GhostVector, WittError> {
    check_input(OpKind::Transfer, f, g.poset())?;
    let (src, tgt) = (f.source(), f.target());
    let mut out = vec![g.ring().zero(); tgt.len()];
    for s in 0..src.len() {
        let t = f.apply(s);
        let (nt, ns) = (tgt.norm(t), src.norm(s));
        if nt % ns != 0 {
            return Err(WittError::Internal(format!(
                "transfer coefficient {nt}/{ns} is not an integer"
            )));
        }
        let term = g.coord(s).scale(&BigInt::from(nt / ns));
        out[t] = out[t].add(&term)?;
    }
    GhostVector::new(tgt.clone(), g.ring(), out)
}

/// `(f_⊗ x)_t = prod_{s in f^-1hat(t)} x_s^(|t|/|s|)`; empty products are 1.
pub fn ghost_norm(f: &PosetMap, g: &GhostVector) -> Result<GhostVector, WittError> {
    check_input(OpKind::Norm, f, g.poset())?;
    let (src, tgt) = (f.source(), f.target());
    let mut out = Vec::with_capacity(tgt.len());
    for t in 0..tgt.len() {
        let mut acc = g.ring().one();
        for s in f.minimal_fiber(t) {
            let (nt, ns) = (tgt.norm(t), src.norm(s));
            if nt % ns != 0 {
                return Err(WittError::Internal(format!(
                    "norm exponent {nt}/{ns} is not an integer"
                )));
            }
            acc = acc.mul(&g.coord(s).pow(nt / ns))?;
        }
        out.push(acc);
    }
    GhostVector::new(tgt.clone(), g.ring(), out)
}

pub fn ghost_apply(kind: OpKind, f: &PosetMap, g: &GhostVector) -> Result<GhostVector, WittError> {
    match kind {
        OpKind::Pull => ghost_pull(f, g),
        OpKind::Transfer => ghost_transfer(f, g),
        OpKind::Norm => ghost_norm(f, g),
    }
}

/// The operation on Witt coordinates, computed as unghost ∘ op ∘ ghost.
/// Only for torsion-free rings.
pub fn apply_via_ghost(
    kind: OpKind,
    f: &PosetMap,
    v: &WittVector,
) -> Result<WittVector, WittError> {
    let image = ghost_apply(kind, f, &ghost(v))?;
    unghost(&image).map_err(|e| match e {
        WittError::NotInImage { element, reason } => WittError::Internal(format!(
            "{kind} left the image of the ghost map at {element}: {reason}"
        )),
        other => other,
    })
}

/// The operation on Witt coordinates in any ring, by evaluating the
/// universal polynomials. When those exceed the size caps and the ring is
/// torsion-free, falls back to the ghost route.
pub fn apply(kind: OpKind, f: &PosetMap, v: &WittVector) -> Result<WittVector, WittError> {
    check_input(kind, f, v.poset())?;
    match universal(f, kind) {
        Ok(u) => u.evaluate(v),
        Err(WittError::CapExceeded(_)) if v.ring().torsion_free() => apply_via_ghost(kind, f, v),
        Err(e) => Err(e),
    }
}

pub fn pull(f: &PosetMap, v: &WittVector) -> Result<WittVector, WittError> {
    apply(OpKind::Pull, f, v)
}

pub fn transfer(f: &PosetMap, v: &WittVector) -> Result<WittVector, WittError> {
    apply(OpKind::Transfer, f, v)
}

pub fn norm(f: &PosetMap, v: &WittVector) -> Result<WittVector, WittError> {
    apply(OpKind::Norm, f, v)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::maps::{fold, inclusion, mult, MultVariant};
    use crate::poset::from_set;
    use crate::rings::{Poly, Ring, RingElement};
    use crate::witt::symbolic_ghost;

    fn set(xs: &[u64]) -> PosetRef {
        Arc::new(from_set(xs.iter().copied()).unwrap())
    }

    fn texts<T: AsRef<[RingElement]>>(c: T) -> Vec<String> {
        c.as_ref().iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn ghost_pull_examples() {
        let big = set(&[1, 2, 3, 6]);
        let x = symbolic_ghost(&big, "x");
        let inc = inclusion(set(&[1, 3]), big.clone()).unwrap();
        assert_eq!(
            texts(ghost_pull(&inc, &x).unwrap().coords()),
            ["x_1", "x_3"]
        );
        let m = mult(&big, 2, MultVariant::FromQuotient).unwrap();
        assert_eq!(texts(ghost_pull(&m, &x).unwrap().coords()), ["x_2", "x_6"]);
        let f = fold(&big);
        let d = ghost_pull(&f, &x).unwrap();
        assert_eq!(d.coords().len(), 8);
        let parts = crate::poset::coproduct_parts(&big, &big);
        for i in 0..4 {
            assert_eq!(d.coord(parts.left[i]), x.coord(i));
            assert_eq!(d.coord(parts.right[i]), x.coord(i));
        }
    }

    #[test]
    fn ghost_transfer_examples() {
        let p = set(&[1, 2]);
        let f = fold(&p);
        let g = symbolic_ghost(f.source(), "x");
        assert_eq!(
            texts(ghost_transfer(&f, &g).unwrap().coords()),
            ["x_1 + x_3", "x_2 + x_4"]
        );
        let m = mult(&set(&[1]), 2, MultVariant::Into).unwrap();
        let g = symbolic_ghost(m.source(), "x");
        assert_eq!(
            texts(ghost_transfer(&m, &g).unwrap().coords()),
            ["0", "2*x_1"]
        );
        let empty = Arc::new(crate::poset::TruncationPoset::empty());
        let e = PosetMap::new(empty.clone(), p.clone(), vec![]).unwrap();
        let g = GhostVector::new(empty, Ring::Integers, vec![]).unwrap();
        assert!(ghost_transfer(&e, &g)
            .unwrap()
            .coords()
            .iter()
            .all(|c| c.is_zero()));
    }

    #[test]
    fn ghost_norm_examples() {
        let f = fold(&set(&[1, 2]));
        let g = symbolic_ghost(f.source(), "x");
        assert_eq!(
            texts(ghost_norm(&f, &g).unwrap().coords()),
            ["x_1*x_3", "x_2*x_4"]
        );
        let m = mult(&set(&[1, 3]), 2, MultVariant::Into).unwrap();
        let g = symbolic_ghost(m.source(), "x");
        assert_eq!(
            texts(ghost_norm(&m, &g).unwrap().coords()),
            ["x_1", "x_1^2", "x_3", "x_3^2"]
        );
        assert!(matches!(
            ghost_norm(
                &inclusion(set(&[1]), set(&[1, 2])).unwrap(),
                &symbolic_ghost(&set(&[1]), "x")
            ),
            Err(WittError::ClassMismatch { required: 'N', .. })
        ));
    }

    #[test]
    fn witt_level_examples() {
        let p = set(&[1, 2]);
        let f = fold(&p);
        let ones = WittVector::new(
            f.source().clone(),
            Ring::Integers,
            vec![Ring::Integers.one(); 4],
        )
        .unwrap();
        assert_eq!(texts(transfer(&f, &ones).unwrap().coords()), ["2", "1"]);
        assert_eq!(
            apply_via_ghost(OpKind::Transfer, &f, &ones).unwrap(),
            transfer(&f, &ones).unwrap()
        );

        let one = set(&[1]);
        let m = mult(&one, 2, MultVariant::Into).unwrap();
        let a = crate::witt::universal_vector(m.target());
        assert_eq!(texts(pull(&m, &a).unwrap().coords()), ["a_1^2 + 2*a_2"]);
        let b = WittVector::new(one, Ring::Poly, vec![RingElement::Poly(Poly::var("b"))]).unwrap();
        let fv = pull(&m, &transfer(&m, &b).unwrap()).unwrap();
        assert_eq!(texts(fv.coords()), ["2*b"]);
    }
}
