//! Universal polynomials for the induced operations.
//!
//! Over `Z[a_s]` the ghost map is injective and the ghost image of the
//! operation applied to the universal vector `(a_s)` lies in the image of
//! the ghost map, so unghosting yields integer polynomials that compute the
//! operation in every ring.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use super::{ghost, ghost_apply, same_poset, unghost_capped, OpKind, WittError, WittVector};
use crate::limits;
use crate::maps::{PosetMap, PosetRef};
use crate::rings::{evaluate_poly, Poly, Ring, RingElement, Var};

/// Witt-coordinate formulas for one operation along one map.
#[derive(Debug, Clone)]
pub struct UniversalFormula {
    pub kind: OpKind,
    pub map: PosetMap,
    /// One polynomial per output element, in the variables `a_<id>` of the
    /// input elements.
    pub polys: Vec<Poly>,
}

/// The variable standing for input element `i`.
pub fn var_for(p: &PosetRef, i: usize) -> Var {
    Var::new(&format!("a_{}", p.id(i)))
}

/// `(a_s)` over the polynomial ring, one variable per element.
pub fn universal_vector(p: &PosetRef) -> WittVector {
    let coords = (0..p.len())
        .map(|i| RingElement::Poly(Poly::var(var_for(p, i).name())))
        .collect();
    WittVector::new(p.clone(), Ring::Poly, coords).expect("one coordinate per element")
}

type Memo = RwLock<HashMap<String, Arc<UniversalFormula>>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

fn memo_key(f: &PosetMap, kind: OpKind) -> String {
    format!(
        "{kind}|{}|{}|{:?}",
        f.source().canonical_key(),
        f.target().canonical_key(),
        f.assign()
    )
}

/// The universal formula for `kind` along `f`, memoized by a canonical
/// serialization of the map. Concurrent first calls may build the same
/// formula twice; the results are identical.
pub fn universal(f: &PosetMap, kind: OpKind) -> Result<Arc<UniversalFormula>, WittError> {
    kind.check(f)?;
    let key = memo_key(f, kind);
    if let Some(u) = memo().read().expect("memo lock").get(&key) {
        return Ok(u.clone());
    }
    let built = Arc::new(build(f, kind)?);
    memo()
        .write()
        .expect("memo lock")
        .insert(key, built.clone());
    Ok(built)
}

fn build(f: &PosetMap, kind: OpKind) -> Result<UniversalFormula, WittError> {
    let output = kind.output(f);
    let max_norm = output.elements().iter().map(|e| e.norm).max().unwrap_or(0);
    if max_norm as usize > limits::max_degree() {
        return Err(WittError::CapExceeded(format!(
            "output norm {max_norm} above the degree cap {}",
            limits::max_degree()
        )));
    }
    let a = universal_vector(kind.input(f));
    let image = ghost_apply(kind, f, &ghost(&a))?;
    let w = unghost_capped(&image, limits::max_terms()).map_err(|e| match e {
        WittError::NotInImage { element, reason } => WittError::Internal(format!(
            "universal {kind} is not integral at {element}: {reason}"
        )),
        other => other,
    })?;
    if ghost(&w) != image {
        return Err(WittError::Internal(format!(
            "universal {kind} does not reproduce its ghost formula"
        )));
    }
    let polys = w
        .into_coords()
        .into_iter()
        .map(|c| match c {
            RingElement::Poly(p) => p,
            _ => unreachable!("universal vectors are polynomial"),
        })
        .collect();
    Ok(UniversalFormula {
        kind,
        map: f.clone(),
        polys,
    })
}

impl UniversalFormula {
    pub fn input(&self) -> &PosetRef {
        self.kind.input(&self.map)
    }

    pub fn output(&self) -> &PosetRef {
        self.kind.output(&self.map)
    }

    /// Evaluates the formula at `v`, in `v`'s ring.
    pub fn evaluate(&self, v: &WittVector) -> Result<WittVector, WittError> {
        if !same_poset(self.input(), v.poset()) {
            return Err(WittError::PosetMismatch(format!(
                "the input of {}",
                self.kind
            )));
        }
        let bindings: HashMap<Var, RingElement> = (0..v.poset().len())
            .map(|i| (var_for(v.poset(), i), v.coord(i).clone()))
            .collect();
        let coords = self
            .polys
            .iter()
            .map(|p| evaluate_poly(p, &bindings, v.ring()))
            .collect::<Result<Vec<_>, _>>()?;
        WittVector::new(self.output().clone(), v.ring(), coords)
    }
}
