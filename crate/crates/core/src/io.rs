//! JSON documents for posets, maps, vectors, words and whole workspaces.
//!
//! A reference to an object is either the name of an entry in the
//! workspace or the object itself, inline.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::category::{CategoryError, Leg};
use crate::maps::{fold, inclusion, mult, MapError, MultVariant, PosetMap, PosetRef};
use crate::poset::{
    divisor_poset, from_set, gcd_poset, parse_word, word_poset, ElementInfo, PosetError, RawPoset,
    TruncationPoset, Word,
};
use crate::rings::{Ring, RingElement, RingError};
use crate::witt::{GhostVector, OpKind, WittError, WittVector};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed document: {0}")]
    Schema(String),
    #[error("unknown {kind} {name:?}")]
    UnknownName { kind: &'static str, name: String },
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

impl IoError {
    /// Whether the error signals a broken internal invariant rather than bad
    /// input.
    pub fn is_internal(&self) -> bool {
        fn category(e: &CategoryError) -> bool {
            match e {
                CategoryError::Internal(_) => true,
                CategoryError::Map(m) => map(m),
                CategoryError::Witt(w) => witt(w),
                CategoryError::AtLeg { error, .. } => category(error),
                _ => false,
            }
        }
        fn witt(e: &WittError) -> bool {
            match e {
                WittError::Internal(_) => true,
                WittError::Map(m) => map(m),
                _ => false,
            }
        }
        fn map(e: &MapError) -> bool {
            matches!(e, MapError::LemmaViolation(_))
        }
        match self {
            IoError::Map(m) => map(m),
            IoError::Witt(w) => witt(w),
            IoError::Category(c) => category(c),
            _ => false,
        }
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

fn schema(msg: impl Into<String>) -> IoError {
    IoError::Schema(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, IoError> {
    obj.get(key)
        .ok_or_else(|| schema(format!("missing field {key:?}")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64, IoError> {
    v.as_u64()
        .ok_or_else(|| schema(format!("{what} must be a non-negative integer")))
}

fn as_u64_list(v: &Value, what: &str) -> Result<Vec<u64>, IoError> {
    v.as_array()
        .ok_or_else(|| schema(format!("{what} must be an array")))?
        .iter()
        .map(|x| as_u64(x, what))
        .collect()
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, IoError> {
    v.as_object()
        .ok_or_else(|| schema(format!("{what} must be an object")))
}

/// Parses JSON text, reporting line and column on failure.
pub fn parse_json(text: &str) -> Result<Value, IoError> {
    Ok(serde_json::from_str(text)?)
}

/// What a standalone document describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocumentKind {
    Workspace,
    Poset,
    Map,
    Vector,
    Word,
}

pub fn document_kind(v: &Value) -> Result<DocumentKind, IoError> {
    let obj = as_object(v, "document")?;
    let has = |k: &str| obj.contains_key(k);
    Ok(
        if ["posets", "maps", "vectors", "bispans"]
            .iter()
            .any(|k| has(k))
        {
            DocumentKind::Workspace
        } else if has("legs") {
            DocumentKind::Word
        } else if has("coords") || has("ghost") {
            DocumentKind::Vector
        } else if ["assign", "fold", "inclusion", "mult"]
            .iter()
            .any(|k| has(k))
        {
            DocumentKind::Map
        } else if [
            "elements",
            "divisors_of",
            "gcd_tuples",
            "words",
            "set",
            "source_of",
            "target_of",
        ]
        .iter()
        .any(|k| has(k))
        {
            DocumentKind::Poset
        } else {
            return Err(schema("cannot tell what this document describes"));
        },
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyVector {
    Witt(WittVector),
    Ghost(GhostVector),
}

/// Named posets, maps, vectors and words.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    pub posets: BTreeMap<String, PosetRef>,
    pub maps: BTreeMap<String, PosetMap>,
    pub vectors: BTreeMap<String, AnyVector>,
    pub bispans: BTreeMap<String, Vec<Leg>>,
}

impl Workspace {
    /// Loads a bundle `{"posets": {..}, "maps": {..}, "vectors": {..},
    /// "bispans": {..}}`. Later sections may refer to earlier ones by name.
    pub fn from_value(v: &Value) -> Result<Self, IoError> {
        let obj = as_object(v, "workspace")?;
        let mut ws = Workspace::default();
        let section = |key: &str| -> Result<Vec<(String, Value)>, IoError> {
            match obj.get(key) {
                None => Ok(Vec::new()),
                Some(s) => Ok(as_object(s, key)?
                    .iter()
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect()),
            }
        };
        for (name, p) in section("posets")? {
            let p = ws.poset(&p)?;
            ws.posets.insert(name, p);
        }
        for (name, m) in section("maps")? {
            let m = ws.map(&m)?;
            ws.maps.insert(name, m);
        }
        for (name, x) in section("vectors")? {
            let x = ws.any_vector(&x)?;
            ws.vectors.insert(name, x);
        }
        for (name, w) in section("bispans")? {
            let w = ws.word(&w)?;
            ws.bispans.insert(name, w);
        }
        Ok(ws)
    }

    pub fn from_text(text: &str) -> Result<Self, IoError> {
        Workspace::from_value(&parse_json(text)?)
    }

    fn named<T: Clone>(
        table: &BTreeMap<String, T>,
        kind: &'static str,
        name: &str,
    ) -> Result<T, IoError> {
        table
            .get(name)
            .cloned()
            .ok_or_else(|| IoError::UnknownName {
                kind,
                name: name.into(),
            })
    }

    /// A poset reference: a name, a poset document, or `{"source_of": map}`
    /// / `{"target_of": map}`.
    pub fn poset(&self, v: &Value) -> Result<PosetRef, IoError> {
        if let Some(name) = v.as_str() {
            return Workspace::named(&self.posets, "poset", name);
        }
        if let Some(obj) = v.as_object() {
            if let Some(f) = obj.get("source_of") {
                return Ok(self.map(f)?.source().clone());
            }
            if let Some(f) = obj.get("target_of") {
                return Ok(self.map(f)?.target().clone());
            }
        }
        Ok(Arc::new(parse_poset(v)?))
    }

    /// A map reference: a name, or a map document.
    pub fn map(&self, v: &Value) -> Result<PosetMap, IoError> {
        if let Some(name) = v.as_str() {
            return Workspace::named(&self.maps, "map", name);
        }
        let obj = as_object(v, "map")?;
        if let Some(p) = obj.get("fold") {
            return Ok(fold(&self.poset(p)?));
        }
        if let Some(pair) = obj.get("inclusion") {
            let pair = pair
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| schema("inclusion takes [sub, super]"))?;
            return Ok(inclusion(self.poset(&pair[0])?, self.poset(&pair[1])?)?);
        }
        if let Some(m) = obj.get("mult") {
            let m = as_object(m, "mult")?;
            let p = self.poset(field(m, "poset")?)?;
            let n = as_u64(field(m, "n")?, "n")?;
            let variant = match m.get("variant").and_then(Value::as_str).unwrap_or("into") {
                "into" => MultVariant::Into,
                "from_quotient" => MultVariant::FromQuotient,
                other => return Err(schema(format!("unknown mult variant {other:?}"))),
            };
            return Ok(mult(&p, n, variant)?);
        }
        let source = self.poset(field(obj, "source")?)?;
        let target = self.poset(field(obj, "target")?)?;
        let pairs = field(obj, "assign")?
            .as_array()
            .ok_or_else(|| schema("assign must be an array of [source id, target id]"))?
            .iter()
            .map(|p| {
                let p = as_u64_list(p, "assign entry")?;
                match p[..] {
                    [a, b] => Ok((a, b)),
                    _ => Err(schema("assign entries are [source id, target id]")),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PosetMap::from_pairs(source, target, &pairs)?)
    }

    /// A vector reference: a name, or a vector document.
    pub fn vector(&self, v: &Value) -> Result<WittVector, IoError> {
        if let Some(name) = v.as_str() {
            return match Workspace::named(&self.vectors, "vector", name)? {
                AnyVector::Witt(w) => Ok(w),
                AnyVector::Ghost(_) => Err(schema(format!(
                    "vector {name:?} is given in ghost coordinates"
                ))),
            };
        }
        let obj = as_object(v, "vector")?;
        let poset = self.poset(field(obj, "poset")?)?;
        let (ring, vars) = parse_ring(field(obj, "ring")?)?;
        let coords = as_object(field(obj, "coords")?, "coords")?;
        let mut by_id = BTreeMap::new();
        for (k, text) in coords {
            let id: u64 = k
                .parse()
                .map_err(|_| schema(format!("coordinate key {k:?} is not an element id")))?;
            let text = match text {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(schema("coordinates are strings or integers")),
            };
            let x = ring.parse(&text)?;
            if let (Some(vars), RingElement::Poly(p)) = (&vars, &x) {
                if let Some(bad) = p
                    .variables()
                    .iter()
                    .find(|v| !vars.contains(&v.name().to_string()))
                {
                    return Err(schema(format!("variable {} is not declared", bad.name())));
                }
            }
            by_id.insert(id, x);
        }
        Ok(WittVector::from_ids(poset, ring, &by_id)?)
    }

    /// A vector in either coordinate system: documents with `"ghost"` in
    /// place of `"coords"` give ghost coordinates.
    pub fn any_vector(&self, v: &Value) -> Result<AnyVector, IoError> {
        if let Some(name) = v.as_str() {
            return Workspace::named(&self.vectors, "vector", name);
        }
        match v.as_object() {
            Some(obj) if obj.contains_key("ghost") => {
                let mut obj = obj.clone();
                let coords = obj.remove("ghost").expect("checked");
                obj.insert("coords".into(), coords);
                let w = self.vector(&Value::Object(obj))?;
                let (p, r) = (w.poset().clone(), w.ring());
                Ok(AnyVector::Ghost(GhostVector::new(p, r, w.into_coords())?))
            }
            _ => Ok(AnyVector::Witt(self.vector(v)?)),
        }
    }

    /// A word reference: a name, or `{"legs": [{"kind", "map"}]}`.
    pub fn word(&self, v: &Value) -> Result<Vec<Leg>, IoError> {
        if let Some(name) = v.as_str() {
            return Workspace::named(&self.bispans, "bispan", name);
        }
        let obj = as_object(v, "word")?;
        let legs = field(obj, "legs")?
            .as_array()
            .ok_or_else(|| schema("legs must be an array"))?;
        legs.iter()
            .map(|leg| {
                let leg = as_object(leg, "leg")?;
                let kind: OpKind = field(leg, "kind")?
                    .as_str()
                    .ok_or_else(|| schema("leg kind must be a string"))?
                    .parse()
                    .map_err(IoError::Schema)?;
                Ok(Leg::new(kind, self.map(field(leg, "map")?)?)?)
            })
            .collect()
    }
}

fn parse_word_value(v: &Value) -> Result<Word, IoError> {
    match v {
        Value::String(s) => Ok(parse_word(s)?),
        Value::Array(_) => Ok(as_u64_list(v, "word")?
            .into_iter()
            .map(|l| l as u32)
            .collect()),
        _ => Err(schema("words are strings like \"x1x2\" or letter arrays")),
    }
}

/// A poset document: explicit elements, or one of the shorthands
/// `divisors_of`, `set`, `gcd_tuples` (with optional `weights`), `words`
/// (with `letters` and `block`).
pub fn parse_poset(v: &Value) -> Result<TruncationPoset, IoError> {
    let obj = as_object(v, "poset")?;
    if let Some(n) = obj.get("divisors_of") {
        return Ok(divisor_poset(as_u64(n, "divisors_of")?)?);
    }
    if let Some(s) = obj.get("set") {
        return Ok(from_set(as_u64_list(s, "set")?)?);
    }
    if let Some(t) = obj.get("gcd_tuples") {
        let tuples = t
            .as_array()
            .ok_or_else(|| schema("gcd_tuples must be an array of tuples"))?
            .iter()
            .map(|x| as_u64_list(x, "tuple"))
            .collect::<Result<Vec<_>, _>>()?;
        let weights = obj
            .get("weights")
            .map(|w| as_u64_list(w, "weights"))
            .transpose()?;
        return Ok(gcd_poset(&tuples, weights.as_deref())?);
    }
    if let Some(w) = obj.get("words") {
        let words = w
            .as_array()
            .ok_or_else(|| schema("words must be an array"))?
            .iter()
            .map(parse_word_value)
            .collect::<Result<Vec<_>, _>>()?;
        let letters = match obj.get("letters") {
            Some(l) => as_u64(l, "letters")? as u32,
            None => words.iter().flatten().copied().max().unwrap_or(1),
        };
        let block = match obj.get("block") {
            Some(b) => as_u64(b, "block")? as usize,
            None => 1,
        };
        return Ok(word_poset(&words, letters, block)?);
    }
    let elements = field(obj, "elements")?
        .as_array()
        .ok_or_else(|| schema("elements must be an array"))?
        .iter()
        .map(|e| {
            let e = as_object(e, "element")?;
            Ok(ElementInfo::new(
                as_u64(field(e, "id")?, "id")?,
                as_u64(field(e, "norm")?, "norm")?,
                e.get("label").and_then(Value::as_str).map(str::to_string),
            ))
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let divides = match obj.get("divides") {
        None => Vec::new(),
        Some(d) => d
            .as_array()
            .ok_or_else(|| schema("divides must be an array of [id, id]"))?
            .iter()
            .map(|p| match as_u64_list(p, "divides entry")?[..] {
                [a, b] => Ok((a, b)),
                _ => Err(schema("divides entries are [id, id]")),
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok(TruncationPoset::validate(RawPoset { elements, divides })?)
}

/// `{"kind": "Z" | "Zmod" | "Poly", "m"?, "vars"?}`; also the strings
/// `"Z"`, `"Poly"` and `"Z/m"`.
pub fn parse_ring(v: &Value) -> Result<(Ring, Option<Vec<String>>), IoError> {
    if let Some(s) = v.as_str() {
        return Ok((ring_from_name(s)?, None));
    }
    let obj = as_object(v, "ring")?;
    let kind = field(obj, "kind")?
        .as_str()
        .ok_or_else(|| schema("ring kind must be a string"))?;
    let ring = match kind {
        "Z" => Ring::Integers,
        "Zmod" => Ring::modular(as_u64(field(obj, "m")?, "m")?)?,
        "Poly" => Ring::Poly,
        other => return Err(schema(format!("unknown ring kind {other:?}"))),
    };
    let vars = obj
        .get("vars")
        .map(|vs| {
            vs.as_array()
                .ok_or_else(|| schema("vars must be an array of names"))?
                .iter()
                .map(|x| {
                    x.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| schema("variable names are strings"))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    Ok((ring, vars))
}

/// `Z`, `Poly` or `Z/m`.
pub fn ring_from_name(s: &str) -> Result<Ring, IoError> {
    match s {
        "Z" => Ok(Ring::Integers),
        "Poly" => Ok(Ring::Poly),
        _ => match s.strip_prefix("Z/").map(str::parse::<u64>) {
            Some(Ok(m)) => Ok(Ring::modular(m)?),
            _ => Err(schema(format!("unknown ring {s:?}"))),
        },
    }
}

pub fn ring_to_json(r: Ring) -> Value {
    match r {
        Ring::Integers => json!({"kind": "Z"}),
        Ring::Modular(m) => json!({"kind": "Zmod", "m": m}),
        Ring::Poly => json!({"kind": "Poly"}),
    }
}

/// Explicit form with Hasse cover pairs.
pub fn poset_to_json(p: &TruncationPoset) -> Value {
    let raw = p.to_raw();
    let elements: Vec<Value> = raw
        .elements
        .iter()
        .map(|e| match &e.label {
            Some(l) => json!({"id": e.id, "norm": e.norm, "label": l}),
            None => json!({"id": e.id, "norm": e.norm}),
        })
        .collect();
    let divides: Vec<Value> = raw.divides.iter().map(|(a, b)| json!([a, b])).collect();
    json!({"elements": elements, "divides": divides})
}

pub fn map_to_json(f: &PosetMap) -> Value {
    json!({
        "source": poset_to_json(f.source()),
        "target": poset_to_json(f.target()),
        "assign": f.pairs().iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "class": f.class().to_string(),
    })
}

fn coords_json(p: &TruncationPoset, coords: &[RingElement]) -> Value {
    let mut m = Map::new();
    for (i, c) in coords.iter().enumerate() {
        m.insert(p.id(i).to_string(), Value::String(c.to_string()));
    }
    Value::Object(m)
}

pub fn vector_to_json(v: &WittVector) -> Value {
    json!({
        "poset": poset_to_json(v.poset()),
        "ring": ring_to_json(v.ring()),
        "coords": coords_json(v.poset(), v.coords()),
    })
}

pub fn ghost_to_json(g: &GhostVector) -> Value {
    json!({
        "poset": poset_to_json(g.poset()),
        "ring": ring_to_json(g.ring()),
        "ghost": coords_json(g.poset(), g.coords()),
    })
}

/// Coordinates as `id: value` lines.
pub fn coords_text(p: &TruncationPoset, coords: &[RingElement]) -> String {
    let mut out = String::new();
    for (i, c) in coords.iter().enumerate() {
        out.push_str(&format!("{}: {}\n", p.display(i), c));
    }
    out
}
