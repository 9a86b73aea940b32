//! Spans and bispans of truncation posets: pullbacks that move restrictions
//! past transfers and norms, exponential diagrams that move norms past
//! transfers, and composition of bispans in normal form.

mod bispan;
mod exponential;
mod law;
mod pullback;

use std::sync::Arc;

use crate::maps::{MapError, PosetMap, PosetRef};
use crate::poset::{ElementInfo, PosetError, RawPoset, TruncationPoset};
use crate::witt::WittError;

pub use bispan::{check_word, compose_bispans, evaluate_morphism, isomorphic, Bispan, Leg};
pub use exponential::{exponential_diagram, Choice, ExpDTuple, ExponentialDiagram};
pub use law::{verify_law, CoordDiff, LawCheck, LawDiagram, LawOptions, LawReport};
pub use pullback::{additive_pullback, mult_pullback, Pullback, PullbackElement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CategoryError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error("{leg} must be an {required}-map")]
    ClassMismatch { leg: String, required: char },
    #[error("leg {index}: {error}")]
    AtLeg {
        index: usize,
        error: Box<CategoryError>,
    },
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error(
        "multiplicative pullback does not exist: ({}, {}) and ({}, {}) violate |s1||t2| = |s2||t1|",
        witness[0].0, witness[0].1, witness[1].0, witness[1].1
    )]
    DoesNotExist { witness: [(u64, u64); 2] },
    #[error("poset {poset} does not have joins")]
    JoinsRequired { poset: String },
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub(crate) fn require_class(f: &PosetMap, leg: &str, required: char) -> Result<(), CategoryError> {
    let ok = match required {
        'T' => f.is_t(),
        'N' => f.is_n(),
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(CategoryError::ClassMismatch {
            leg: leg.into(),
            required,
        })
    }
}

pub(crate) fn same(a: &PosetRef, b: &PosetRef) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A poset assembled from constructed elements, with the position of each
/// constructed element in the validated poset.
pub(crate) struct Built {
    pub poset: PosetRef,
    pub index: Vec<usize>,
}

/// Validates elements `(norm, label)` with ids `1..` and the given
/// divisibility pairs between construction indices.
pub(crate) fn build_poset(
    elems: Vec<(u64, String)>,
    pairs: &[(usize, usize)],
) -> Result<Built, PosetError> {
    let elements = elems
        .into_iter()
        .enumerate()
        .map(|(i, (norm, label))| ElementInfo::new(i as u64 + 1, norm, Some(label)))
        .collect::<Vec<_>>();
    let n = elements.len();
    let divides = pairs
        .iter()
        .map(|&(i, j)| (i as u64 + 1, j as u64 + 1))
        .collect();
    let poset = TruncationPoset::validate(RawPoset { elements, divides })?;
    let index = (0..n)
        .map(|i| poset.index_of(i as u64 + 1).expect("id was inserted"))
        .collect();
    Ok(Built {
        poset: Arc::new(poset),
        index,
    })
}

/// The map sending construction index `i` of `src` to target index
/// `images[i]`.
pub(crate) fn built_map(
    src: &Built,
    target: PosetRef,
    images: &[usize],
) -> Result<PosetMap, MapError> {
    let mut assign = vec![0; images.len()];
    for (i, &img) in images.iter().enumerate() {
        assign[src.index[i]] = img;
    }
    PosetMap::new(src.poset.clone(), target, assign)
}

/// Size-cap failures while building a poset are reported as such; any
/// other validation failure of a constructed poset is a bug.
pub(crate) fn construction_error(context: &str, e: PosetError) -> CategoryError {
    match e {
        PosetError::TooLarge { .. } => CategoryError::CapExceeded(format!("{context}: {e}")),
        other => CategoryError::Internal(format!("{context}: {other}")),
    }
}

pub(crate) fn internal(context: &str) -> impl Fn(String) -> CategoryError + '_ {
    move |e| CategoryError::Internal(format!("{context}: {e}"))
}
