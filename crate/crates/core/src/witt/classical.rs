//! The classical operations as special cases of pull, transfer and norm.

use std::sync::Arc;

use super::{apply, same_poset, OpKind, WittError, WittVector};
use crate::maps::{fold, inclusion, mult, MultVariant, PosetRef};
use crate::poset::coproduct_parts;
use crate::rings::Ring;

/// The pair `(v, w)` as a single vector on `S ⊔ S`, laid out as the source
/// of the fold map.
pub fn concat(v: &WittVector, w: &WittVector) -> Result<WittVector, WittError> {
    if !same_poset(v.poset(), w.poset()) {
        return Err(WittError::PosetMismatch("the second summand".into()));
    }
    if v.ring() != w.ring() {
        return Err(WittError::RingMismatch {
            expected: v.ring(),
            got: w.ring(),
        });
    }
    let parts = coproduct_parts(v.poset(), w.poset());
    let mut coords = vec![v.ring().zero(); parts.poset.len()];
    for (i, &j) in parts.left.iter().enumerate() {
        coords[j] = v.coord(i).clone();
    }
    for (i, &j) in parts.right.iter().enumerate() {
        coords[j] = w.coord(i).clone();
    }
    WittVector::new(Arc::new(parts.poset), v.ring(), coords)
}

/// Witt vector addition: transfer along the fold map.
pub fn add(v: &WittVector, w: &WittVector) -> Result<WittVector, WittError> {
    apply(OpKind::Transfer, &fold(v.poset()), &concat(v, w)?)
}

/// Witt vector multiplication: norm along the fold map.
pub fn mul(v: &WittVector, w: &WittVector) -> Result<WittVector, WittError> {
    apply(OpKind::Norm, &fold(v.poset()), &concat(v, w)?)
}

pub fn zero(p: &PosetRef, ring: Ring) -> WittVector {
    WittVector::new(p.clone(), ring, vec![ring.zero(); p.len()]).expect("right length")
}

/// The unit: 1 at every norm-1 element, 0 elsewhere.
pub fn one(p: &PosetRef, ring: Ring) -> WittVector {
    let coords = (0..p.len())
        .map(|i| {
            if p.norm(i) == 1 {
                ring.one()
            } else {
                ring.zero()
            }
        })
        .collect();
    WittVector::new(p.clone(), ring, coords).expect("right length")
}

/// `k * v` as a repeated Witt sum (`k >= 0`).
pub fn scalar(k: u64, v: &WittVector) -> Result<WittVector, WittError> {
    let mut acc = zero(v.poset(), v.ring());
    for _ in 0..k {
        acc = add(&acc, v)?;
    }
    Ok(acc)
}

/// Restriction to a sub truncation set `sub`, matched by element id.
pub fn restrict(v: &WittVector, sub: &PosetRef) -> Result<WittVector, WittError> {
    apply(OpKind::Pull, &inclusion(sub.clone(), v.poset().clone())?, v)
}

/// `F_n : W_S -> W_{S/n}` for an ordinary truncation set `S`.
pub fn frobenius(v: &WittVector, n: u64) -> Result<WittVector, WittError> {
    apply(
        OpKind::Pull,
        &mult(v.poset(), n, MultVariant::FromQuotient)?,
        v,
    )
}

/// `V_n : W_S -> W_{<n>S}`.
pub fn verschiebung(v: &WittVector, n: u64) -> Result<WittVector, WittError> {
    apply(OpKind::Transfer, &mult(v.poset(), n, MultVariant::Into)?, v)
}

/// `N_n : W_S -> W_{<n>S}`.
pub fn norm_n(v: &WittVector, n: u64) -> Result<WittVector, WittError> {
    apply(OpKind::Norm, &mult(v.poset(), n, MultVariant::Into)?, v)
}

/// Applies the canonical ring map into `target` coordinate-wise.
pub fn map_coefficients(v: &WittVector, target: Ring) -> Result<WittVector, WittError> {
    let coords = v
        .coords()
        .iter()
        .map(|c| target.map_from(c))
        .collect::<Result<Vec<_>, _>>()?;
    WittVector::new(v.poset().clone(), target, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::from_set;
    use crate::rings::{Poly, RingElement};
    use crate::witt::ghost;

    fn set(xs: &[u64]) -> PosetRef {
        Arc::new(from_set(xs.iter().copied()).unwrap())
    }

    fn ints(p: &PosetRef, xs: &[i64]) -> WittVector {
        let c = xs.iter().map(|&x| Ring::Integers.from_i64(x)).collect();
        WittVector::new(p.clone(), Ring::Integers, c).unwrap()
    }

    fn vars(p: &PosetRef, names: &[&str]) -> WittVector {
        let c = names
            .iter()
            .map(|n| RingElement::Poly(Poly::var(n)))
            .collect();
        WittVector::new(p.clone(), Ring::Poly, c).unwrap()
    }

    fn texts(v: &WittVector) -> Vec<String> {
        v.coords().iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn sums_and_products() {
        let p = set(&[1, 2]);
        let s = add(&ints(&p, &[1, 1]), &ints(&p, &[1, 1])).unwrap();
        assert_eq!(texts(&s), ["2", "1"]);
        let prod = mul(&ints(&p, &[2, 1]), &ints(&p, &[3, 0])).unwrap();
        let g = ghost(&prod);
        assert_eq!(g.coords()[1].to_string(), ((4 + 2) * 9).to_string());
        assert_eq!(
            mul(&one(&p, Ring::Integers), &ints(&p, &[5, -3])).unwrap(),
            ints(&p, &[5, -3])
        );
    }

    #[test]
    fn restriction_drops_coordinates() {
        let v = vars(&set(&[1, 2, 4]), &["a_1", "a_2", "a_4"]);
        assert_eq!(texts(&restrict(&v, &set(&[1, 2])).unwrap()), ["a_1", "a_2"]);
    }

    #[test]
    fn verschiebung_pads_with_zeros() {
        let v = vars(&set(&[1, 2]), &["b_1", "b_2"]);
        let w = verschiebung(&v, 2).unwrap();
        assert_eq!(texts(&w), ["0", "b_1", "b_2"]);
    }

    #[test]
    fn norm_of_a_point() {
        let v = vars(&set(&[1]), &["a"]);
        assert_eq!(texts(&norm_n(&v, 2).unwrap()), ["a", "0"]);
    }

    #[test]
    fn frobenius_after_verschiebung_is_multiplication() {
        for n in 1..=6 {
            let v = ints(&set(&[1, 2]), &[3, -2]);
            let fv = frobenius(&verschiebung(&v, n).unwrap(), n).unwrap();
            assert_eq!(fv, scalar(n, &v).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn modular_arithmetic_through_universal_polynomials() {
        let p = set(&[1, 2]);
        let z = add(&ints(&p, &[3, 5]), &ints(&p, &[4, 7])).unwrap();
        let m = Ring::Modular(6);
        let zm = add(
            &map_coefficients(&ints(&p, &[3, 5]), m).unwrap(),
            &map_coefficients(&ints(&p, &[4, 7]), m).unwrap(),
        )
        .unwrap();
        assert_eq!(map_coefficients(&z, m).unwrap(), zm);
    }
}
