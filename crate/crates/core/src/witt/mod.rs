//! Witt and ghost vectors over a truncation poset.
//!
//! A Witt vector `(a_s)` has ghost coordinates
//! `x_s = sum over t | s of |t| a_t^(|s|/|t|)`. Maps of truncation posets
//! act on ghost coordinates by explicit formulas; the induced maps on Witt
//! coordinates are computed once over the integer polynomial ring and then
//! evaluated in any coefficient ring.

mod classical;
mod ops;
mod universal;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::arith::{prime_factors, valuation};
use crate::maps::{MapError, PosetRef};
use crate::poset::{PosetError, TruncationPoset};
use crate::rings::{Poly, Ring, RingElement, RingError};

pub use classical::{
    add, concat, frobenius, map_coefficients, mul, norm_n, one, restrict, scalar, verschiebung,
    zero,
};
pub use ops::{
    apply, apply_via_ghost, ghost_apply, ghost_norm, ghost_pull, ghost_transfer, norm, pull,
    transfer, OpKind,
};
pub use universal::{universal, universal_vector, var_for, UniversalFormula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WittError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("expected {expected} coordinates, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vector lives on a different poset than {0}")]
    PosetMismatch(String),
    #[error("coordinate in {got} but vector ring is {expected}")]
    RingMismatch { expected: Ring, got: Ring },
    #[error("not in the image of the ghost map at element {element}: {reason}")]
    NotInImage { element: u64, reason: String },
    #[error("{kind} needs an {required}-map")]
    ClassMismatch { required: char, kind: OpKind },
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub(crate) fn same_poset(a: &PosetRef, b: &PosetRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check_coords(
    poset: &TruncationPoset,
    ring: Ring,
    coords: &[RingElement],
) -> Result<(), WittError> {
    if coords.len() != poset.len() {
        return Err(WittError::LengthMismatch {
            expected: poset.len(),
            got: coords.len(),
        });
    }
    if let Some(c) = coords.iter().find(|c| c.ring() != ring) {
        return Err(WittError::RingMismatch {
            expected: ring,
            got: c.ring(),
        });
    }
    Ok(())
}

macro_rules! vector_type {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, PartialEq, Eq)]
        pub struct $name {
            poset: PosetRef,
            ring: Ring,
            coords: Vec<RingElement>,
        }

        impl $name {
            pub fn new(
                poset: PosetRef,
                ring: Ring,
                coords: Vec<RingElement>,
            ) -> Result<Self, WittError> {
                check_coords(&poset, ring, &coords)?;
                Ok($name {
                    poset,
                    ring,
                    coords,
                })
            }

            /// Coordinates given by element id; missing ids are an error.
            pub fn from_ids(
                poset: PosetRef,
                ring: Ring,
                coords: &BTreeMap<u64, RingElement>,
            ) -> Result<Self, WittError> {
                if let Some(id) = coords.keys().find(|id| poset.index_of(**id).is_none()) {
                    return Err(PosetError::UnknownElement(*id).into());
                }
                let v = (0..poset.len())
                    .map(|i| {
                        coords
                            .get(&poset.id(i))
                            .cloned()
                            .ok_or(WittError::LengthMismatch {
                                expected: poset.len(),
                                got: coords.len(),
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                $name::new(poset, ring, v)
            }

            pub fn poset(&self) -> &PosetRef {
                &self.poset
            }

            pub fn ring(&self) -> Ring {
                self.ring
            }

            pub fn coords(&self) -> &[RingElement] {
                &self.coords
            }

            pub fn coord(&self, i: usize) -> &RingElement {
                &self.coords[i]
            }

            pub fn into_coords(self) -> Vec<RingElement> {
                self.coords
            }

            /// `(id, value)` pairs in element order.
            pub fn by_id(&self) -> Vec<(u64, &RingElement)> {
                self.coords
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (self.poset.id(i), c))
                    .collect()
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}<", stringify!($name))?;
                for (i, c) in self.coords.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}: {}", self.poset.display(i), c)?;
                }
                write!(f, "> over {}", self.ring)
            }
        }
    };
}

vector_type!(WittVector, "A vector in Witt coordinates `(a_s)`.");
vector_type!(GhostVector, "A vector in ghost coordinates `<x_s>`.");

/// The ghost map `x_s = sum_{t | s} |t| a_t^(|s|/|t|)`.
pub fn ghost(v: &WittVector) -> GhostVector {
    let p = &v.poset;
    let coords = (0..p.len())
        .map(|s| {
            let mut acc = v.ring.zero();
            for &t in p.divisors_of(s) {
                let term = v.coords[t]
                    .pow(p.norm(s) / p.norm(t))
                    .scale(&BigInt::from(p.norm(t)));
                acc = acc.add(&term).expect("same ring");
            }
            acc
        })
        .collect();
    GhostVector {
        poset: v.poset.clone(),
        ring: v.ring,
        coords,
    }
}

/// Inverts the ghost map over a torsion-free ring, by increasing norm.
pub fn unghost(g: &GhostVector) -> Result<WittVector, WittError> {
    unghost_capped(g, usize::MAX)
}

pub(crate) fn unghost_capped(g: &GhostVector, max_terms: usize) -> Result<WittVector, WittError> {
    if !g.ring.torsion_free() {
        return Err(RingError::NotTorsionFree(g.ring).into());
    }
    let p = &g.poset;
    let mut a: Vec<Option<RingElement>> = vec![None; p.len()];
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by_key(|&s| p.norm(s));
    for s in order {
        let mut rest = g.coords[s].clone();
        for &t in p.divisors_of(s) {
            if t == s {
                continue;
            }
            let at = a[t].as_ref().expect("divisors have smaller norm");
            let term = at
                .pow(p.norm(s) / p.norm(t))
                .scale(&BigInt::from(p.norm(t)));
            rest = rest.sub(&term)?;
        }
        let value =
            rest.div_exact(&BigInt::from(p.norm(s)))
                .map_err(|e| WittError::NotInImage {
                    element: p.id(s),
                    reason: e.to_string(),
                })?;
        if let RingElement::Poly(q) = &value {
            if q.num_terms() > max_terms {
                return Err(WittError::CapExceeded(format!(
                    "coordinate {} has {} terms (cap {max_terms})",
                    p.id(s),
                    q.num_terms()
                )));
            }
        }
        a[s] = Some(value);
    }
    Ok(WittVector {
        poset: g.poset.clone(),
        ring: g.ring,
        coords: a.into_iter().map(|x| x.expect("all filled")).collect(),
    })
}

/// Outcome of the congruence test for the image of the ghost map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DworkReport {
    /// First failing `(p, element id)`, if any.
    pub failure: Option<(u64, u64)>,
}

impl DworkReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks `x_s = phi_p(x_{s/p}) mod p^{v_p(|s|)}` for every `s` and prime
/// `p` dividing `|s|`, in element order and increasing `p`.
pub fn dwork_check(g: &GhostVector) -> Result<DworkReport, WittError> {
    if !g.ring.has_frobenius_lifts() {
        return Err(RingError::NoFrobeniusLift(g.ring).into());
    }
    let p = &g.poset;
    for s in 0..p.len() {
        let n = p.norm(s);
        for q in prime_factors(n) {
            let below = p.quotient(s, q).expect("axiom 3 gives s/p");
            let lifted = g.coords[below].frobenius_lift(q)?;
            let diff = g.coords[s].sub(&lifted)?;
            let modulus = BigInt::from(q).pow(valuation(q, n));
            if !diff.divisible_by(&modulus)? {
                return Ok(DworkReport {
                    failure: Some((q, p.id(s))),
                });
            }
        }
    }
    Ok(DworkReport { failure: None })
}

/// Ghost vector with every coordinate a polynomial variable `x_<id>`.
pub fn symbolic_ghost(poset: &PosetRef, prefix: &str) -> GhostVector {
    let coords = (0..poset.len())
        .map(|i| RingElement::Poly(Poly::var(&format!("{prefix}_{}", poset.id(i)))))
        .collect();
    GhostVector {
        poset: poset.clone(),
        ring: Ring::Poly,
        coords,
    }
}
