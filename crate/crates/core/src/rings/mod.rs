//! Exact coefficient rings: the integers, integers modulo `m`, and
//! multivariate integer polynomials.

mod poly;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use poly::{parse_poly, Monomial, ParseError, Poly, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("ring mismatch: {left} vs {right}")]
    HandleMismatch { left: Ring, right: Ring },
    #[error("{value} is not divisible by {divisor} (witness coefficient {witness})")]
    NotDivisible {
        value: String,
        divisor: BigInt,
        witness: BigInt,
    },
    #[error("{0} is not torsion-free")]
    NotTorsionFree(Ring),
    #[error("{0} has no Frobenius lifts")]
    NoFrobeniusLift(Ring),
    #[error("variable {0} is not bound")]
    UnboundVariable(String),
    #[error("expected a polynomial, got an element of {0}")]
    NotAPolynomial(Ring),
    #[error("cannot map {from} into {to}")]
    NoRingMap { from: Ring, to: Ring },
    #[error("modulus must be at least 1")]
    BadModulus,
    #[error("invalid {ring} element {text:?}: {reason}")]
    BadLiteral {
        ring: Ring,
        text: String,
        reason: String,
    },
}

/// A coefficient ring handle.
///
/// `Poly` is the integer polynomial ring in countably many variables; the
/// variables actually in use are carried by the elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Integers,
    Modular(u64),
    Poly,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => f.write_str("Z"),
            Ring::Modular(m) => write!(f, "Z/{m}"),
            Ring::Poly => f.write_str("Z[vars]"),
        }
    }
}

impl Ring {
    pub fn modular(m: u64) -> Result<Ring, RingError> {
        if m == 0 {
            Err(RingError::BadModulus)
        } else {
            Ok(Ring::Modular(m))
        }
    }

    pub fn torsion_free(&self) -> bool {
        !matches!(self, Ring::Modular(_))
    }

    pub fn has_frobenius_lifts(&self) -> bool {
        !matches!(self, Ring::Modular(_))
    }

    pub fn zero(&self) -> RingElement {
        self.from_int(&BigInt::zero())
    }

    pub fn one(&self) -> RingElement {
        self.from_int(&BigInt::one())
    }

    /// The image of an integer under the unique ring map from Z.
    pub fn from_int(&self, n: &BigInt) -> RingElement {
        match *self {
            Ring::Integers => RingElement::Int(n.clone()),
            Ring::Modular(m) => RingElement::Mod {
                value: reduce(n, m),
                modulus: m,
            },
            Ring::Poly => RingElement::Poly(Poly::constant(n.clone())),
        }
    }

    pub fn from_i64(&self, n: i64) -> RingElement {
        self.from_int(&BigInt::from(n))
    }

    pub fn var(&self, name: &str) -> Result<RingElement, RingError> {
        match self {
            Ring::Poly => Ok(RingElement::Poly(Poly::var(name))),
            other => Err(RingError::NotAPolynomial(*other)),
        }
    }

    /// Parses element text: an integer for `Z` and `Z/m`, a polynomial
    /// expression for `Poly`.
    pub fn parse(&self, text: &str) -> Result<RingElement, RingError> {
        let bad = |reason: String| RingError::BadLiteral {
            ring: *self,
            text: text.to_string(),
            reason,
        };
        let p = parse_poly(text).map_err(|e| bad(e.to_string()))?;
        match self {
            Ring::Poly => Ok(RingElement::Poly(p)),
            _ => match p.as_constant() {
                Some(c) => Ok(self.from_int(&c)),
                None => Err(bad("expected an integer".into())),
            },
        }
    }

    /// Coefficient-wise image of `x` under the canonical map into this ring.
    /// Supported: identity, `Z -> Z/m`, `Z -> Poly`, `Z/m -> Z/d` for `d | m`.
    pub fn map_from(&self, x: &RingElement) -> Result<RingElement, RingError> {
        match (x, *self) {
            (RingElement::Int(n), _) => Ok(self.from_int(n)),
            (RingElement::Mod { value, modulus }, Ring::Modular(d)) if modulus % d == 0 => {
                Ok(RingElement::Mod {
                    value: value % d,
                    modulus: d,
                })
            }
            (RingElement::Poly(p), Ring::Poly) => Ok(RingElement::Poly(p.clone())),
            _ => Err(RingError::NoRingMap {
                from: x.ring(),
                to: *self,
            }),
        }
    }
}

fn reduce(n: &BigInt, m: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(m));
    r.to_u64().expect("residue fits in u64")
}

/// An element of one of the supported rings, in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingElement {
    Int(BigInt),
    /// `value` is always in `[0, modulus)`.
    Mod {
        value: u64,
        modulus: u64,
    },
    Poly(Poly),
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElement::Int(n) => write!(f, "{n}"),
            RingElement::Mod { value, .. } => write!(f, "{value}"),
            RingElement::Poly(p) => write!(f, "{p}"),
        }
    }
}

impl RingElement {
    pub fn ring(&self) -> Ring {
        match self {
            RingElement::Int(_) => Ring::Integers,
            RingElement::Mod { modulus, .. } => Ring::Modular(*modulus),
            RingElement::Poly(_) => Ring::Poly,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            RingElement::Int(n) => n.is_zero(),
            RingElement::Mod { value, .. } => *value == 0,
            RingElement::Poly(p) => p.is_zero(),
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            RingElement::Poly(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            RingElement::Int(n) => Some(n),
            _ => None,
        }
    }

    fn check(&self, other: &RingElement) -> Result<(), RingError> {
        if self.ring() == other.ring() {
            Ok(())
        } else {
            Err(RingError::HandleMismatch {
                left: self.ring(),
                right: other.ring(),
            })
        }
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check(other)?;
        Ok(match (self, other) {
            (RingElement::Int(a), RingElement::Int(b)) => RingElement::Int(a + b),
            (RingElement::Mod { value: a, modulus }, RingElement::Mod { value: b, .. }) => {
                RingElement::Mod {
                    value: ((*a as u128 + *b as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            (RingElement::Poly(a), RingElement::Poly(b)) => RingElement::Poly(a.add(b)),
            _ => unreachable!(),
        })
    }

    pub fn neg(&self) -> RingElement {
        match self {
            RingElement::Int(a) => RingElement::Int(-a),
            RingElement::Mod { value, modulus } => RingElement::Mod {
                value: (modulus - value) % modulus,
                modulus: *modulus,
            },
            RingElement::Poly(a) => RingElement::Poly(a.neg()),
        }
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check(other)?;
        Ok(match (self, other) {
            (RingElement::Int(a), RingElement::Int(b)) => RingElement::Int(a * b),
            (RingElement::Mod { value: a, modulus }, RingElement::Mod { value: b, .. }) => {
                RingElement::Mod {
                    value: ((*a as u128 * *b as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            (RingElement::Poly(a), RingElement::Poly(b)) => RingElement::Poly(a.mul(b)),
            _ => unreachable!(),
        })
    }

    /// Multiplication by an integer (the image of `k` under Z -> ring).
    pub fn scale(&self, k: &BigInt) -> RingElement {
        match self {
            RingElement::Int(a) => RingElement::Int(a * k),
            RingElement::Mod { value, modulus } => {
                let k = reduce(k, *modulus);
                RingElement::Mod {
                    value: ((*value as u128 * k as u128) % *modulus as u128) as u64,
                    modulus: *modulus,
                }
            }
            RingElement::Poly(a) => RingElement::Poly(a.scale(k)),
        }
    }

    pub fn pow(&self, e: u64) -> RingElement {
        match self {
            RingElement::Int(a) => RingElement::Int(num_traits::pow(a.clone(), e as usize)),
            RingElement::Mod { value, modulus } => {
                let m = *modulus as u128;
                let (mut base, mut e, mut acc) = (*value as u128 % m, e, 1u128 % m);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % m;
                    }
                    base = base * base % m;
                    e >>= 1;
                }
                RingElement::Mod {
                    value: acc as u64,
                    modulus: *modulus,
                }
            }
            RingElement::Poly(a) => RingElement::Poly(a.pow(e)),
        }
    }

    /// The unique `y` with `n * y = self`, for torsion-free rings.
    pub fn div_exact(&self, n: &BigInt) -> Result<RingElement, RingError> {
        match self {
            RingElement::Int(a) => {
                let (q, r) = a.div_rem(n);
                if r.is_zero() {
                    Ok(RingElement::Int(q))
                } else {
                    Err(RingError::NotDivisible {
                        value: a.to_string(),
                        divisor: n.clone(),
                        witness: a.clone(),
                    })
                }
            }
            RingElement::Poly(p) => {
                p.div_exact(n)
                    .map(RingElement::Poly)
                    .map_err(|witness| RingError::NotDivisible {
                        value: p.to_string(),
                        divisor: n.clone(),
                        witness,
                    })
            }
            RingElement::Mod { modulus, .. } => {
                Err(RingError::NotTorsionFree(Ring::Modular(*modulus)))
            }
        }
    }

    /// True when `self` lies in `n * R` (torsion-free rings only).
    pub fn divisible_by(&self, n: &BigInt) -> Result<bool, RingError> {
        match self {
            RingElement::Int(a) => Ok(a.is_multiple_of(n)),
            RingElement::Poly(p) => Ok(p.divisible_by(n)),
            RingElement::Mod { modulus, .. } => {
                Err(RingError::NotTorsionFree(Ring::Modular(*modulus)))
            }
        }
    }

    /// The chosen lift of Frobenius: identity on Z, `v -> v^p` on polynomials.
    pub fn frobenius_lift(&self, p: u64) -> Result<RingElement, RingError> {
        match self {
            RingElement::Int(_) => Ok(self.clone()),
            RingElement::Poly(q) => Ok(RingElement::Poly(
                q.frobenius(u32::try_from(p).expect("prime fits in u32")),
            )),
            RingElement::Mod { modulus, .. } => {
                Err(RingError::NoFrobeniusLift(Ring::Modular(*modulus)))
            }
        }
    }

    /// Evaluates a polynomial at `bindings`, landing in `target`.
    pub fn evaluate(
        &self,
        bindings: &HashMap<Var, RingElement>,
        target: Ring,
    ) -> Result<RingElement, RingError> {
        let p = self
            .as_poly()
            .ok_or(RingError::NotAPolynomial(self.ring()))?;
        evaluate_poly(p, bindings, target)
    }
}

/// Evaluates `p` with every variable replaced by its binding in `target`.
pub fn evaluate_poly(
    p: &Poly,
    bindings: &HashMap<Var, RingElement>,
    target: Ring,
) -> Result<RingElement, RingError> {
    let mut powers: HashMap<(Var, u32), RingElement> = HashMap::new();
    let mut acc = target.zero();
    for (mono, coeff) in p.terms() {
        let mut term = target.from_int(coeff);
        for (v, e) in mono.factors() {
            let key = (v.clone(), *e);
            if !powers.contains_key(&key) {
                let base = bindings
                    .get(v)
                    .ok_or_else(|| RingError::UnboundVariable(v.name().to_string()))?;
                if base.ring() != target {
                    return Err(RingError::HandleMismatch {
                        left: base.ring(),
                        right: target,
                    });
                }
                powers.insert(key.clone(), base.pow(*e as u64));
            }
            term = term.mul(&powers[&key])?;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> RingElement {
        Ring::Integers.from_i64(n)
    }

    #[test]
    fn basic_arithmetic_per_ring() {
        assert_eq!(int(2).add(&int(3)).unwrap(), int(5));
        let z4 = Ring::Modular(4);
        assert_eq!(z4.from_i64(3).mul(&z4.from_i64(3)).unwrap(), z4.from_i64(1));
        assert_eq!(z4.from_i64(-1), z4.from_i64(3));
        let ab = Ring::Poly.parse("a + b").unwrap();
        assert_eq!(ab.pow(2), Ring::Poly.parse("a^2 + 2*a*b + b^2").unwrap());
    }

    #[test]
    fn mismatched_handles_are_rejected() {
        let err = int(1).add(&Ring::Modular(3).one()).unwrap_err();
        assert!(matches!(err, RingError::HandleMismatch { .. }));
        let err = Ring::Modular(3)
            .one()
            .mul(&Ring::Modular(5).one())
            .unwrap_err();
        assert!(matches!(err, RingError::HandleMismatch { .. }));
    }

    #[test]
    fn exact_division() {
        assert_eq!(int(6).div_exact(&BigInt::from(3)).unwrap(), int(2));
        let p = Ring::Poly.parse("2*a + 4*b").unwrap();
        assert_eq!(
            p.div_exact(&BigInt::from(2)).unwrap(),
            Ring::Poly.parse("a + 2*b").unwrap()
        );
        assert!(matches!(
            int(5).div_exact(&BigInt::from(2)),
            Err(RingError::NotDivisible { .. })
        ));
        assert!(matches!(
            Ring::Modular(6).one().div_exact(&BigInt::from(1)),
            Err(RingError::NotTorsionFree(_))
        ));
    }

    #[test]
    fn frobenius_lifts() {
        assert_eq!(int(7).frobenius_lift(3).unwrap(), int(7));
        let p = Ring::Poly.parse("a + b").unwrap();
        assert_eq!(
            p.frobenius_lift(2).unwrap(),
            Ring::Poly.parse("a^2 + b^2").unwrap()
        );
        let c = Ring::Poly.parse("3").unwrap();
        assert_eq!(c.frobenius_lift(2).unwrap(), c);
        assert!(matches!(
            Ring::Modular(5).one().frobenius_lift(5),
            Err(RingError::NoFrobeniusLift(_))
        ));
    }

    #[test]
    fn evaluation() {
        let p = Ring::Poly.parse("a + 2*b").unwrap();
        let mut b = HashMap::new();
        b.insert(Var::new("a"), int(1));
        b.insert(Var::new("b"), int(3));
        assert_eq!(p.evaluate(&b, Ring::Integers).unwrap(), int(7));

        let sq = Ring::Poly.parse("a^2").unwrap();
        let z7 = Ring::Modular(7);
        let mut b = HashMap::new();
        b.insert(Var::new("a"), z7.from_i64(3));
        assert_eq!(sq.evaluate(&b, z7).unwrap(), z7.from_i64(2));

        let five = Ring::Poly.parse("5").unwrap();
        assert_eq!(
            five.evaluate(&HashMap::new(), Ring::Integers).unwrap(),
            int(5)
        );

        let err = p.evaluate(&HashMap::new(), Ring::Integers).unwrap_err();
        assert_eq!(err, RingError::UnboundVariable("a".into()));
    }

    #[test]
    fn parse_per_ring() {
        assert_eq!(Ring::Integers.parse("-12").unwrap(), int(-12));
        assert_eq!(
            Ring::Modular(5).parse("-1").unwrap(),
            Ring::Modular(5).from_i64(4)
        );
        assert!(Ring::Integers.parse("a").is_err());
        assert!(Ring::modular(0).is_err());
    }

    #[test]
    fn ring_maps() {
        let z6 = Ring::Modular(6);
        assert_eq!(z6.map_from(&int(-1)).unwrap(), z6.from_i64(5));
        let z3 = Ring::Modular(3);
        assert_eq!(z3.map_from(&z6.from_i64(5)).unwrap(), z3.from_i64(2));
        assert!(Ring::Modular(4).map_from(&z6.one()).is_err());
    }
}
