//! Test-space and model morphisms.
//!
//! A morphism sends each source outcome to an event of the target. Events
//! map to events by union, orthogonal outcomes go to orthogonal events and
//! perspective events go to perspective events. A morphism of models must
//! also pull every state of the target back to a possibly sub-normalized
//! state of the source.

mod enumerate;
mod pullback;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use thiserror::Error;

use crate::exactlp::{hull_membership, Rational};
use crate::outcome::Outcome;
use crate::testspace::{Event, TestSpace};
use crate::weights::{ProbModel, Weight};

pub use enumerate::enumerate_morphisms;
pub use pullback::{
    compose_explanations, explanation_isomorphism, pullback_subquotient, Explanation, ExplanationError,
};

/// How condition (iii) is verified.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PerspectivityCheck {
    /// `φ(E) ∼ φ(F)` for every pair of tests.
    #[default]
    Tests,
    /// `φ(a) ∼ φ(b)` for every perspective pair of source events.
    AllEvents,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphismError {
    #[error("map has {found} entries for {expected} source outcomes")]
    MapLength { expected: usize, found: usize },
    #[error("image of {outcome} mentions target outcome #{index}, which does not exist")]
    ImageOutOfRange { outcome: Outcome, index: usize },
    #[error("no image given for source outcome {0}")]
    MissingOutcome(Outcome),
    #[error("map mentions {0}, which is not a source outcome")]
    UnknownSourceOutcome(Outcome),
    #[error("map mentions {0}, which is not a target outcome")]
    UnknownTargetOutcome(Outcome),
    #[error("condition (i): image {} of event {} is not an event", fmt_set(.image), fmt_set(.event))]
    NotAnEvent { event: Vec<Outcome>, image: Vec<Outcome> },
    #[error("condition (ii): {x} ⊥ {y} but images {} and {} overlap", fmt_set(.image_x), fmt_set(.image_y))]
    Orthogonality { x: Outcome, y: Outcome, image_x: Vec<Outcome>, image_y: Vec<Outcome> },
    #[error(
        "condition (iii): {} ∼ {} but images {} and {} are not perspective",
        fmt_set(.a), fmt_set(.b), fmt_set(.image_a), fmt_set(.image_b)
    )]
    Perspectivity { a: Vec<Outcome>, b: Vec<Outcome>, image_a: Vec<Outcome>, image_b: Vec<Outcome> },
    #[error("state generator #{generator} of the target pulls back outside the source state space")]
    StateNotPreserved { generator: usize, pulled_back: Vec<Rational> },
    #[error("cannot compose: target of the first map differs from source of the second")]
    DomainMismatch,
}

pub(crate) fn fmt_set(items: &[Outcome]) -> String {
    let parts: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

fn image_of(map: &[Event], ev: impl IntoIterator<Item = usize>) -> Event {
    ev.into_iter().flat_map(|i| map[i].iter().copied()).collect()
}

/// Conditions (i)-(iii) for an event-valued map between test spaces.
pub fn check_test_space_morphism(
    source: &TestSpace,
    target: &TestSpace,
    map: &[Event],
    mode: PerspectivityCheck,
) -> Result<(), MorphismError> {
    if map.len() != source.outcome_count() {
        return Err(MorphismError::MapLength { expected: source.outcome_count(), found: map.len() });
    }
    for (i, img) in map.iter().enumerate() {
        if let Some(&j) = img.iter().find(|&&j| j >= target.outcome_count()) {
            return Err(MorphismError::ImageOutOfRange { outcome: source.outcome(i).clone(), index: j });
        }
    }
    // Every event sits inside a test, so (i) on tests covers all events.
    for t in source.tests() {
        let image = image_of(map, t.iter().copied());
        if !target.is_event(&image) {
            return Err(MorphismError::NotAnEvent {
                event: source.labels(&t.iter().copied().collect()),
                image: target.labels(&image),
            });
        }
    }
    for t in source.tests() {
        for (k, &x) in t.iter().enumerate() {
            for &y in &t[k + 1..] {
                if !map[x].is_disjoint(&map[y]) {
                    return Err(MorphismError::Orthogonality {
                        x: source.outcome(x).clone(),
                        y: source.outcome(y).clone(),
                        image_x: target.labels(&map[x]),
                        image_y: target.labels(&map[y]),
                    });
                }
            }
        }
    }
    let pairs: Vec<(Event, Event)> = match mode {
        PerspectivityCheck::Tests => {
            let tests: Vec<Event> = (0..source.test_count()).map(|t| source.test_event(t)).collect();
            tests.iter().flat_map(|e| tests.iter().map(move |f| (e.clone(), f.clone()))).collect()
        }
        PerspectivityCheck::AllEvents => source.perspective_pairs(),
    };
    for (a, b) in pairs {
        let (ia, ib) = (image_of(map, a.iter().copied()), image_of(map, b.iter().copied()));
        if target.common_complement(&ia, &ib).is_none() {
            return Err(MorphismError::Perspectivity {
                a: source.labels(&a),
                b: source.labels(&b),
                image_a: target.labels(&ia),
                image_b: target.labels(&ib),
            });
        }
    }
    Ok(())
}

/// A validated morphism of probabilistic models.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Morphism {
    source: ProbModel,
    target: ProbModel,
    map: Vec<Event>,
}

/// Validates `map` as a morphism of models: conditions (i)-(iii) and the
/// state pullback condition on the target's generators.
pub fn check_morphism(
    source: &ProbModel,
    target: &ProbModel,
    map: Vec<Event>,
    mode: PerspectivityCheck,
) -> Result<Morphism, MorphismError> {
    check_test_space_morphism(source.space(), target.space(), &map, mode)?;
    let m = Morphism { source: source.clone(), target: target.clone(), map };
    for (k, beta) in target.states().iter().enumerate() {
        let pulled_back = pullback_weight(&m, beta);
        if !source.contains_subnormalized(&pulled_back) {
            return Err(MorphismError::StateNotPreserved { generator: k, pulled_back });
        }
    }
    Ok(m)
}

impl Morphism {
    /// Builds the map from outcome labels and validates it.
    pub fn from_labels(
        source: &ProbModel,
        target: &ProbModel,
        map: &BTreeMap<Outcome, Vec<Outcome>>,
        mode: PerspectivityCheck,
    ) -> Result<Self, MorphismError> {
        if let Some(o) = map.keys().find(|o| source.space().index_of(o).is_none()) {
            return Err(MorphismError::UnknownSourceOutcome(o.clone()));
        }
        let mut dense = Vec::with_capacity(source.space().outcome_count());
        for o in source.space().outcomes() {
            let image = map.get(o).ok_or_else(|| MorphismError::MissingOutcome(o.clone()))?;
            let ev = image
                .iter()
                .map(|y| {
                    target.space().index_of(y).ok_or_else(|| MorphismError::UnknownTargetOutcome(y.clone()))
                })
                .collect::<Result<Event, _>>()?;
            dense.push(ev);
        }
        check_morphism(source, target, dense, mode)
    }

    pub fn identity(model: &ProbModel) -> Self {
        let map = (0..model.space().outcome_count()).map(|i| Event::from([i])).collect();
        Morphism { source: model.clone(), target: model.clone(), map }
    }

    pub fn source(&self) -> &ProbModel {
        &self.source
    }

    pub fn target(&self) -> &ProbModel {
        &self.target
    }

    pub fn map(&self) -> &[Event] {
        &self.map
    }

    pub fn image(&self, i: usize) -> &Event {
        &self.map[i]
    }

    /// `φ(a) = ⋃_{x∈a} φ(x)`.
    pub fn image_of(&self, ev: &Event) -> Event {
        image_of(&self.map, ev.iter().copied())
    }

    pub fn to_labels(&self) -> BTreeMap<Outcome, Vec<Outcome>> {
        self.source
            .space()
            .outcomes()
            .iter()
            .zip(&self.map)
            .map(|(o, img)| (o.clone(), self.target.space().labels(img)))
            .collect()
    }

    /// For outcome-preserving maps, the target index of each source outcome.
    pub fn point_map(&self) -> Option<Vec<usize>> {
        self.map.iter().map(|img| if img.len() == 1 { img.iter().next().copied() } else { None }).collect()
    }

    pub fn classify(&self) -> MorphismClass {
        classify(self)
    }
}

/// `ψ ∘ φ`, with `(ψ∘φ)(x) = ⋃_{y∈φ(x)} ψ(y)`.
pub fn compose(psi: &Morphism, phi: &Morphism) -> Result<Morphism, MorphismError> {
    if phi.target != psi.source {
        return Err(MorphismError::DomainMismatch);
    }
    let map = phi.map.iter().map(|img| psi.image_of(img)).collect();
    Ok(Morphism { source: phi.source.clone(), target: psi.target.clone(), map })
}

/// `φ∗(β) = β ∘ φ` as a vector over the source outcomes; may be
/// sub-normalized.
pub fn pullback_weight(phi: &Morphism, beta: &Weight) -> Vec<Rational> {
    pullback_values(&phi.map, beta.values())
}

pub(crate) fn pullback_values(map: &[Event], beta: &[Rational]) -> Vec<Rational> {
    map.iter().map(|img| img.iter().map(|&j| &beta[j]).sum()).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct MorphismClass {
    pub test_preserving: bool,
    pub positive: bool,
    pub outcome_preserving: bool,
    pub injective: bool,
    pub interpretation: bool,
    pub embedding: bool,
    pub quotient: bool,
}

pub(crate) fn maps_tests_to_tests(source: &TestSpace, target: &TestSpace, map: &[Event]) -> bool {
    source.tests().iter().all(|t| target.is_test(&image_of(map, t.iter().copied())))
}

pub(crate) fn maps_onto_tests(source: &TestSpace, target: &TestSpace, map: &[Event]) -> bool {
    let images: BTreeSet<Event> = source.tests().iter().map(|t| image_of(map, t.iter().copied())).collect();
    (0..target.test_count()).all(|t| images.contains(&target.test_event(t)))
}

pub(crate) fn is_injective(map: &[Event]) -> bool {
    map.iter().collect::<BTreeSet<_>>().len() == map.len()
}

/// Every generator of `inner` lies in the hull of `outer`.
pub(crate) fn hull_contains(outer: &[Vec<Rational>], inner: &[Vec<Rational>]) -> bool {
    inner.iter().all(|g| hull_membership(g, outer).is_ok_and(|m| m.is_member()))
}

pub fn classify(phi: &Morphism) -> MorphismClass {
    let (src, tgt) = (phi.source.space(), phi.target.space());
    let test_preserving = maps_tests_to_tests(src, tgt, &phi.map);
    let positive = phi.map.iter().all(|img| !img.is_empty());
    let outcome_preserving = phi.map.iter().all(|img| img.len() == 1);
    let injective = is_injective(&phi.map);
    let embedding = injective && outcome_preserving && test_preserving && {
        let pulled: Vec<Vec<Rational>> =
            phi.target.states().iter().map(|b| pullback_weight(phi, b)).collect();
        let own = phi.source.state_vectors();
        hull_contains(&own, &pulled) && hull_contains(&pulled, &own)
    };
    let quotient = outcome_preserving && test_preserving && maps_onto_tests(src, tgt, &phi.map);
    MorphismClass {
        test_preserving,
        positive,
        outcome_preserving,
        injective,
        interpretation: positive && test_preserving,
        embedding,
        quotient,
    }
}

/// Sum of a sub-normalized weight over one test; equal across tests for
/// pullbacks along morphisms.
pub fn normalization(space: &TestSpace, values: &[Rational]) -> Rational {
    space.tests().first().map_or_else(Rational::one, |t| t.iter().map(|&i| &values[i]).sum())
}
