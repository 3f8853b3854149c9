//! Input documents and their canonical JSON form.
//!
//! Rationals are strings such as `"1/2"`; JSON numbers are refused so no
//! binary float ever enters a computation. Weight maps are sparse: missing
//! outcomes have value zero, and zeros are never written.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_traits::Zero;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::classicalize::Block;
use crate::exactlp::Rational;
use crate::morphisms::{Morphism, PerspectivityCheck};
use crate::outcome::Outcome;
use crate::testspace::{Event, TestSpace};
use crate::weights::{check_weight, ProbModel, Weight};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Syntax { path: String, message: String },
    #[error("{path}: {field}: {message}")]
    Invalid { path: String, field: String, message: String },
}

/// An exact rational read from a JSON string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalText(pub Rational);

impl<'de> Deserialize<'de> for RationalText {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RationalText;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string such as \"1/2\"")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<RationalText, E> {
                parse_rational(s).map(RationalText).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<RationalText, E> {
                Err(E::custom(format!("number {v} given; write rationals as strings such as \"1/2\"")))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<RationalText, E> {
                Err(E::custom(format!("number {v} given; write rationals as strings such as \"{v}\"")))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<RationalText, E> {
                Err(E::custom(format!("number {v} given; write rationals as strings such as \"{v}\"")))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let ok = !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-');
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    if !ok || num.is_empty() || den.is_empty() || den.starts_with('-') || den.contains('/') {
        return Err(format!("{s:?} is not a rational of the form p or p/q"));
    }
    let (num, den) = (
        num.parse().map_err(|_| format!("bad numerator in {s:?}"))?,
        den.parse().map_err(|_| format!("bad denominator in {s:?}"))?,
    );
    if den == num_bigint::BigInt::zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::new(num, den))
}

type RawWeight = BTreeMap<String, RationalText>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    outcomes: Vec<String>,
    tests: Vec<Vec<String>>,
    states: Vec<RawWeight>,
}

/// Where a document came from, for diagnostics and relative references.
#[derive(Clone, Debug)]
pub struct Source {
    pub name: String,
    pub dir: PathBuf,
}

impl Source {
    pub fn file(path: &Path) -> Self {
        Source {
            name: path.display().to_string(),
            dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        }
    }

    pub fn stdin() -> Self {
        Source { name: "<stdin>".into(), dir: PathBuf::new() }
    }

    fn invalid(&self, field: &str, message: impl fmt::Display) -> InputError {
        InputError::Invalid { path: self.name.clone(), field: field.into(), message: message.to_string() }
    }
}

pub fn read_text(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|e| InputError::Io { path: path.display().to_string(), source: e })
}

pub fn parse_json(text: &str, src: &Source) -> Result<Value, InputError> {
    serde_json::from_str(text)
        .map_err(|e| InputError::Syntax { path: src.name.clone(), message: e.to_string() })
}

fn from_value<T: for<'de> Deserialize<'de>>(v: &Value, src: &Source, field: &str) -> Result<T, InputError> {
    T::deserialize(v).map_err(|e| src.invalid(field, e))
}

fn outcome(s: &str, src: &Source, field: &str) -> Result<Outcome, InputError> {
    s.parse().map_err(|e| src.invalid(field, e))
}

/// Reads a weight map over the outcomes of `space`.
fn weight_from_raw(
    space: &TestSpace,
    raw: &RawWeight,
    src: &Source,
    field: &str,
) -> Result<Weight, InputError> {
    let mut map: BTreeMap<Outcome, Rational> =
        space.outcomes().iter().map(|o| (o.clone(), Rational::zero())).collect();
    for (k, v) in raw {
        let o = outcome(k, src, field)?;
        match map.get_mut(&o) {
            Some(slot) => *slot = v.0.clone(),
            None => return Err(src.invalid(field, format!("unknown outcome {o}"))),
        }
    }
    check_weight(space, &map).map_err(|e| src.invalid(field, e))
}

pub fn weight_from_value(
    space: &TestSpace,
    v: &Value,
    src: &Source,
    field: &str,
) -> Result<Weight, InputError> {
    let raw: RawWeight = from_value(v, src, field)?;
    weight_from_raw(space, &raw, src, field)
}

pub fn model_from_value(v: &Value, src: &Source, field: &str) -> Result<ProbModel, InputError> {
    let raw: RawModel = from_value(v, src, field)?;
    let tests = raw
        .tests
        .iter()
        .map(|t| t.iter().map(|s| outcome(s, src, &format!("{field}.tests"))).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let space = TestSpace::new(tests).map_err(|e| src.invalid(&format!("{field}.tests"), e))?;
    let mut listed = raw
        .outcomes
        .iter()
        .map(|s| outcome(s, src, &format!("{field}.outcomes")))
        .collect::<Result<Vec<_>, _>>()?;
    listed.sort();
    listed.dedup();
    if listed != space.outcomes() {
        return Err(src.invalid(&format!("{field}.outcomes"), "must list exactly the outcomes of the tests"));
    }
    let states = raw
        .states
        .iter()
        .enumerate()
        .map(|(i, w)| weight_from_raw(&space, w, src, &format!("{field}.states[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    ProbModel::new(space, states).map_err(|e| src.invalid(field, e))
}

/// A nested document given inline or as a path relative to the file that
/// mentions it.
pub fn resolve<'a>(
    v: &'a Value,
    src: &Source,
    field: &str,
) -> Result<(std::borrow::Cow<'a, Value>, Source), InputError> {
    match v {
        Value::String(p) => {
            let path = src.dir.join(p);
            let text = read_text(&path)?;
            let inner = Source::file(&path);
            Ok((std::borrow::Cow::Owned(parse_json(&text, &inner)?), inner))
        }
        Value::Object(_) => Ok((std::borrow::Cow::Borrowed(v), src.clone())),
        _ => Err(src.invalid(field, "expected a path or an inline document")),
    }
}

pub fn field<'a>(v: &'a Value, src: &Source, name: &str) -> Result<&'a Value, InputError> {
    v.get(name).ok_or_else(|| src.invalid(name, "missing"))
}

pub fn model_ref(v: &Value, src: &Source, name: &str) -> Result<ProbModel, InputError> {
    let (doc, inner) = resolve(field(v, src, name)?, src, name)?;
    model_from_value(&doc, &inner, name)
}

pub fn event_map(v: &Value, src: &Source, name: &str) -> Result<BTreeMap<Outcome, Vec<Outcome>>, InputError> {
    let raw: BTreeMap<String, Vec<String>> = from_value(v, src, name)?;
    raw.iter()
        .map(|(k, vs)| {
            let key = outcome(k, src, name)?;
            let image = vs.iter().map(|s| outcome(s, src, name)).collect::<Result<Vec<_>, _>>()?;
            Ok((key, image))
        })
        .collect()
}

/// `{source, target, map}`.
pub fn morphism_from_value(
    v: &Value,
    src: &Source,
    mode: PerspectivityCheck,
) -> Result<Morphism, InputError> {
    let source = model_ref(v, src, "source")?;
    let target = model_ref(v, src, "target")?;
    let map = event_map(field(v, src, "map")?, src, "map")?;
    Morphism::from_labels(&source, &target, &map, mode).map_err(|e| src.invalid("map", e))
}

pub fn morphism_ref(
    v: &Value,
    src: &Source,
    name: &str,
    mode: PerspectivityCheck,
) -> Result<Morphism, InputError> {
    let (doc, inner) = resolve(field(v, src, name)?, src, name)?;
    morphism_from_value(&doc, &inner, mode)
}

/// `π` from a map keyed by product outcomes; `None` means the identity on
/// labels.
pub fn pi_from_value(
    product: &TestSpace,
    total: &TestSpace,
    v: Option<&Value>,
    src: &Source,
) -> Result<Vec<Event>, InputError> {
    let lookup =
        |o: &Outcome| total.index_of(o).ok_or_else(|| src.invalid("pi", format!("unknown outcome {o}")));
    match v {
        None => product.outcomes().iter().map(|o| lookup(o).map(|i| Event::from([i]))).collect(),
        Some(v) => {
            let map = event_map(v, src, "pi")?;
            product
                .outcomes()
                .iter()
                .map(|o| {
                    let image = map.get(o).ok_or_else(|| src.invalid("pi", format!("no image for {o}")))?;
                    image.iter().map(lookup).collect()
                })
                .collect()
        }
    }
}

/// `{points, map}` with one block of point indices per cover outcome.
pub fn embedding_from_value(
    cover: &TestSpace,
    v: &Value,
    src: &Source,
) -> Result<(usize, Vec<Block>), InputError> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawEmbedding {
        points: usize,
        map: BTreeMap<String, Vec<usize>>,
    }
    let raw: RawEmbedding = from_value(v, src, "embedding")?;
    let mut blocks = vec![None; cover.outcome_count()];
    for (k, b) in &raw.map {
        let o = outcome(k, src, "map")?;
        let i =
            cover.index_of(&o).ok_or_else(|| src.invalid("map", format!("{o} is not a cover outcome")))?;
        blocks[i] = Some(b.iter().copied().collect::<Block>());
    }
    let blocks = blocks
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| src.invalid("map", format!("no block for {}", cover.outcome(i)))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((raw.points, blocks))
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn vector_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

pub fn labels_json(space: &TestSpace, ev: &Event) -> Value {
    json!(space.labels(ev).iter().map(ToString::to_string).collect::<Vec<_>>())
}

pub fn weight_json(space: &TestSpace, w: &Weight) -> Value {
    let map: Map<String, Value> = w
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (space.outcome(i).to_string(), rational_json(v)))
        .collect();
    Value::Object(map)
}

pub fn space_json(space: &TestSpace) -> Value {
    json!({
        "outcomes": space.outcomes().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "tests": (0..space.test_count()).map(|t| labels_json(space, &space.test_event(t))).collect::<Vec<_>>(),
    })
}

pub fn model_json(m: &ProbModel) -> Value {
    let mut v = space_json(m.space());
    v["states"] = Value::Array(m.states().iter().map(|w| weight_json(m.space(), w)).collect());
    v
}

pub fn morphism_json(phi: &Morphism) -> Value {
    let map: Map<String, Value> = phi
        .to_labels()
        .into_iter()
        .map(|(k, v)| (k.to_string(), json!(v.iter().map(ToString::to_string).collect::<Vec<_>>())))
        .collect();
    json!({ "source": model_json(phi.source()), "target": model_json(phi.target()), "map": map })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
