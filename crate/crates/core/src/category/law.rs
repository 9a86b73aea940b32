//! Executable checks of the rewriting laws on ghost and Witt coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    additive_pullback, evaluate_morphism, exponential_diagram, mult_pullback, CategoryError, Leg,
};
use crate::maps::{PosetMap, PosetRef};
use crate::rings::Ring;
use crate::witt::{
    ghost, ghost_apply, symbolic_ghost, universal_vector, GhostVector, OpKind, WittVector,
};

/// A configuration whose two composites should agree.
#[derive(Debug, Clone)]
pub enum LawDiagram {
    /// T-map `f : S -> A`, R-map `g : T -> A`: `g^* f_⊕ = f'_⊕ g'^*`.
    RT { f: PosetMap, g: PosetMap },
    /// N-map `f : S -> A`, R-map `g : T -> A`: `g^* f_⊗ = f'_⊗ g'^*`.
    NR { f: PosetMap, g: PosetMap },
    /// T-map `f : S -> A`, N-map `g : A -> T`: `g_⊗ f_⊕ = t_⊕ n_⊗ r^*`.
    TN { f: PosetMap, g: PosetMap },
}

impl LawDiagram {
    pub fn name(&self) -> &'static str {
        match self {
            LawDiagram::RT { .. } => "rt",
            LawDiagram::NR { .. } => "nr",
            LawDiagram::TN { .. } => "tn",
        }
    }

    fn input(&self) -> &PosetRef {
        match self {
            LawDiagram::RT { f, .. } | LawDiagram::NR { f, .. } | LawDiagram::TN { f, .. } => {
                f.source()
            }
        }
    }

    /// The two words to compare.
    pub fn sides(&self) -> Result<(Vec<Leg>, Vec<Leg>), CategoryError> {
        let leg = |kind, map: &PosetMap| Leg {
            kind,
            map: map.clone(),
        };
        Ok(match self {
            LawDiagram::RT { f, g } => {
                let p = additive_pullback(f, g)?;
                (
                    vec![leg(OpKind::Transfer, f), leg(OpKind::Pull, g)],
                    vec![
                        leg(OpKind::Pull, &p.g_prime),
                        leg(OpKind::Transfer, &p.f_prime),
                    ],
                )
            }
            LawDiagram::NR { f, g } => {
                let p = mult_pullback(f, g)?;
                (
                    vec![leg(OpKind::Norm, f), leg(OpKind::Pull, g)],
                    vec![leg(OpKind::Pull, &p.g_prime), leg(OpKind::Norm, &p.f_prime)],
                )
            }
            LawDiagram::TN { f, g } => {
                let x = exponential_diagram(f, g)?;
                (
                    vec![leg(OpKind::Transfer, f), leg(OpKind::Norm, g)],
                    vec![
                        leg(OpKind::Pull, &x.r),
                        leg(OpKind::Norm, &x.n),
                        leg(OpKind::Transfer, &x.t),
                    ],
                )
            }
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LawOptions {
    /// Random integer vectors to try.
    pub random_vectors: usize,
    /// Random Witt coordinates are drawn from `[-range, range]`.
    pub range: i64,
    pub seed: u64,
    /// Also compare Witt coordinates on the universal vector over `Poly`.
    pub witt_symbolic: bool,
}

impl Default for LawOptions {
    fn default() -> Self {
        LawOptions {
            random_vectors: 5,
            range: 5,
            seed: 0,
            witt_symbolic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoordDiff {
    pub element: u64,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub name: String,
    pub holds: bool,
    pub diffs: Vec<CoordDiff>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub law: String,
    pub holds: bool,
    /// Set when the diagram could not be built or evaluated.
    pub error: Option<String>,
    pub checks: Vec<LawCheck>,
}

impl LawReport {
    pub fn first_failure(&self) -> Option<&LawCheck> {
        self.checks.iter().find(|c| !c.holds)
    }
}

fn compare(
    name: String,
    poset: &PosetRef,
    left: &[impl ToString],
    right: &[impl ToString],
) -> LawCheck {
    let diffs: Vec<CoordDiff> = left
        .iter()
        .zip(right)
        .enumerate()
        .map(|(i, (l, r))| (i, l.to_string(), r.to_string()))
        .filter(|(_, l, r)| l != r)
        .map(|(i, left, right)| CoordDiff {
            element: poset.id(i),
            left,
            right,
        })
        .collect();
    LawCheck {
        name,
        holds: diffs.is_empty(),
        diffs,
    }
}

fn ghost_word(word: &[Leg], x: &GhostVector) -> Result<GhostVector, CategoryError> {
    let mut cur = x.clone();
    for leg in word {
        cur = ghost_apply(leg.kind, &leg.map, &cur)?;
    }
    Ok(cur)
}

fn run(diagram: &LawDiagram, opts: &LawOptions) -> Result<Vec<LawCheck>, CategoryError> {
    let (left, right) = diagram.sides()?;
    let input = diagram.input();
    let mut checks = Vec::new();
    let ghost_check = |name: String, x: &GhostVector| -> Result<LawCheck, CategoryError> {
        let (l, r) = (ghost_word(&left, x)?, ghost_word(&right, x)?);
        Ok(compare(name, l.poset(), l.coords(), r.coords()))
    };
    let witt_check = |name: String, v: &WittVector| -> Result<LawCheck, CategoryError> {
        let (l, r) = (evaluate_morphism(&left, v)?, evaluate_morphism(&right, v)?);
        Ok(compare(name, l.poset(), l.coords(), r.coords()))
    };
    checks.push(ghost_check(
        "ghost symbolic".into(),
        &symbolic_ghost(input, "x"),
    )?);
    if opts.witt_symbolic {
        checks.push(witt_check(
            "witt symbolic".into(),
            &universal_vector(input),
        )?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for k in 0..opts.random_vectors {
        let coords = (0..input.len())
            .map(|_| Ring::Integers.from_i64(rng.gen_range(-opts.range..=opts.range)))
            .collect();
        let v = WittVector::new(input.clone(), Ring::Integers, coords)?;
        checks.push(witt_check(format!("witt random {k}"), &v)?);
        checks.push(ghost_check(format!("ghost random {k}"), &ghost(&v))?);
    }
    Ok(checks)
}

/// Evaluates both sides of the law on the symbolic ghost vector, optionally
/// the universal Witt vector, and random integer vectors. Failures are
/// reported, never raised.
pub fn verify_law(diagram: &LawDiagram, opts: &LawOptions) -> LawReport {
    match run(diagram, opts) {
        Ok(checks) => LawReport {
            law: diagram.name().into(),
            holds: checks.iter().all(|c| c.holds),
            error: None,
            checks,
        },
        Err(e) => LawReport {
            law: diagram.name().into(),
            holds: false,
            error: Some(e.to_string()),
            checks: Vec::new(),
        },
    }
}
