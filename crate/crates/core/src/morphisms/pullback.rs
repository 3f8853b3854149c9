//! Explanations as spans, pullbacks of sub-quotients and span composition.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::testspace::{Event, TestSpace};
use crate::weights::{ProbModel, Weight};

use super::{check_morphism, compose, maps_onto_tests, Morphism, MorphismError, PerspectivityCheck};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplanationError {
    #[error("quotient leg is not a quotient morphism")]
    NotQuotient,
    #[error("embedding leg is not an embedding")]
    NotEmbedding,
    #[error("the two legs have different sources")]
    ApexMismatch,
    #[error("embedding and quotient have different targets")]
    CodomainMismatch,
    #[error("the first explanation's explaining model is not the second's explained model")]
    MiddleMismatch,
    #[error("constructed leg is not a morphism: {0}")]
    Leg(#[from] MorphismError),
}

/// A span `A ←q− C −e→ B`: `q` a quotient, `e` an embedding. `B` explains `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Explanation {
    quotient: Morphism,
    embedding: Morphism,
}

impl Explanation {
    pub fn new(quotient: Morphism, embedding: Morphism) -> Result<Self, ExplanationError> {
        if quotient.source() != embedding.source() {
            return Err(ExplanationError::ApexMismatch);
        }
        if !quotient.classify().quotient {
            return Err(ExplanationError::NotQuotient);
        }
        if !embedding.classify().embedding {
            return Err(ExplanationError::NotEmbedding);
        }
        Ok(Explanation { quotient, embedding })
    }

    /// `(A, id, id)`.
    pub fn identity(model: &ProbModel) -> Self {
        let id = Morphism::identity(model);
        Explanation { quotient: id.clone(), embedding: id }
    }

    pub fn apex(&self) -> &ProbModel {
        self.quotient.source()
    }

    pub fn quotient(&self) -> &Morphism {
        &self.quotient
    }

    pub fn embedding(&self) -> &Morphism {
        &self.embedding
    }

    /// The model being explained.
    pub fn explained(&self) -> &ProbModel {
        self.quotient.target()
    }

    /// The model doing the explaining.
    pub fn explaining(&self) -> &ProbModel {
        self.embedding.target()
    }
}

/// Pullback of `A −e→ C ←q− B`.
///
/// The apex has the tests `F` of `B` with `q(F) ∈ e(M(A))`, its outcomes
/// are their union, and its states are the restrictions of `B`'s state
/// generators. The legs are `e⁻¹∘q` onto `A` and the inclusion into `B`.
pub fn pullback_subquotient(e: &Morphism, q: &Morphism) -> Result<Explanation, ExplanationError> {
    if e.target() != q.target() {
        return Err(ExplanationError::CodomainMismatch);
    }
    if !e.classify().embedding {
        return Err(ExplanationError::NotEmbedding);
    }
    if !q.classify().quotient {
        return Err(ExplanationError::NotQuotient);
    }
    let e_points = e.point_map().expect("embeddings are outcome-preserving");
    let q_points = q.point_map().expect("quotients are outcome-preserving");
    let e_inverse: BTreeMap<usize, usize> = e_points.iter().enumerate().map(|(x, &z)| (z, x)).collect();
    let a_space = e.source().space();
    let b = q.source();
    let e_tests: BTreeSet<Event> =
        a_space.tests().iter().map(|t| t.iter().map(|&x| e_points[x]).collect()).collect();

    let apex_tests: Vec<&Vec<usize>> = b
        .space()
        .tests()
        .iter()
        .filter(|f| e_tests.contains(&f.iter().map(|&y| q_points[y]).collect::<Event>()))
        .collect();
    let y_prime: Vec<usize> =
        apex_tests.iter().flat_map(|f| f.iter().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    let space = TestSpace::new(
        apex_tests.iter().map(|f| f.iter().map(|&y| b.space().outcome(y).clone()).collect::<Vec<_>>()),
    )
    .expect("tests of B are non-empty");
    // Apex outcomes are a subset of B's sorted outcomes, so the order agrees.
    debug_assert!(y_prime.iter().enumerate().all(|(k, &y)| space.outcome(k) == b.space().outcome(y)));

    let mut seen = BTreeSet::new();
    let states: Vec<Weight> = b
        .states()
        .iter()
        .map(|s| Weight::from_values_unchecked(y_prime.iter().map(|&y| s.value(y).clone()).collect()))
        .filter(|w| seen.insert(w.clone()))
        .collect();
    let apex = ProbModel::new(space, states).expect("restrictions of weights to sub-test spaces are weights");

    let q_map: Vec<Event> = y_prime.iter().map(|&y| Event::from([e_inverse[&q_points[y]]])).collect();
    let e_map: Vec<Event> = y_prime.iter().map(|&y| Event::from([y])).collect();
    let q_prime = check_morphism(&apex, e.source(), q_map, PerspectivityCheck::Tests)?;
    let e_prime = check_morphism(&apex, b, e_map, PerspectivityCheck::Tests)?;
    Explanation::new(q_prime, e_prime)
}

/// Composes an explanation of `A` by `B` with one of `B` by `D`, via the
/// canonical pullback of the inner co-span.
pub fn compose_explanations(
    first: &Explanation,
    second: &Explanation,
) -> Result<Explanation, ExplanationError> {
    if first.explaining() != second.explained() {
        return Err(ExplanationError::MiddleMismatch);
    }
    let inner = pullback_subquotient(&first.embedding, &second.quotient)?;
    let quotient = compose(&first.quotient, &inner.quotient)?;
    let embedding = compose(&second.embedding, &inner.embedding)?;
    Explanation::new(quotient, embedding)
}

/// An isomorphism `ι` of apexes with `q₂∘ι = q₁` and `e₂∘ι = e₁`, if any.
/// Since embeddings are injective, `ι` is forced by the embedding legs.
pub fn explanation_isomorphism(x: &Explanation, y: &Explanation) -> Option<Morphism> {
    if x.explained() != y.explained() || x.explaining() != y.explaining() {
        return None;
    }
    let ex = x.embedding.point_map()?;
    let ey = y.embedding.point_map()?;
    if ex.iter().collect::<BTreeSet<_>>() != ey.iter().collect::<BTreeSet<_>>() {
        return None;
    }
    let ey_inverse: BTreeMap<usize, usize> = ey.iter().enumerate().map(|(k, &d)| (d, k)).collect();
    let ex_inverse: BTreeMap<usize, usize> = ex.iter().enumerate().map(|(k, &d)| (d, k)).collect();
    let forward: Vec<Event> = ex.iter().map(|d| Event::from([ey_inverse[d]])).collect();
    let backward: Vec<Event> = ey.iter().map(|d| Event::from([ex_inverse[d]])).collect();
    let iota = check_morphism(x.apex(), y.apex(), forward, PerspectivityCheck::Tests).ok()?;
    let back = check_morphism(y.apex(), x.apex(), backward, PerspectivityCheck::Tests).ok()?;
    let onto = maps_onto_tests(x.apex().space(), y.apex().space(), iota.map())
        && maps_onto_tests(y.apex().space(), x.apex().space(), back.map());
    let commutes =
        compose(&y.quotient, &iota).ok()? == x.quotient && compose(&y.embedding, &iota).ok()? == x.embedding;
    (onto && commutes).then_some(iota)
}
