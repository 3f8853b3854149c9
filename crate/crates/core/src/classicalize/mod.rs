//! Semiclassical covers and the canonical classical explanation.
//!
//! The classical model over the finite set `S` of dispersion-free states of
//! a cover has every partition of `S` as a test. Those tests are never
//! listed: outcomes are blocks (non-empty subsets of `S`, as index sets)
//! and states are probability vectors over `S`.

mod functor;

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactlp::{
    enumerate_vertices, hull_inequalities, hull_membership, linalg::dot, LinearSystem, Rational,
};
use crate::morphisms::{
    check_morphism, fmt_set, Explanation, ExplanationError, Morphism, PerspectivityCheck,
};
use crate::outcome::Outcome;
use crate::testspace::{Event, TestSpace};
use crate::weights::{enumerate_dispersion_free, ProbModel, Weight};

pub use functor::{bor_on_morphism, lift_to_cover, BorelMap};

/// A set of point indices of a [`FiniteBorelModel`].
pub type Block = BTreeSet<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BorelError {
    #[error(
        "the model has {} single-outcome tests ({}); at most one is allowed",
        .tests.len(),
        .tests.iter().map(|t| fmt_set(t)).collect::<Vec<_>>().join(", ")
    )]
    TooManySingleOutcomeTests { tests: Vec<Vec<Outcome>> },
    #[error("cover outcomes {0} and {1} are not separated by any dispersion-free state")]
    NotInjective(Outcome, Outcome),
    #[error("weight has {found} values for {expected} cover outcomes")]
    WrongLength { expected: usize, found: usize },
    #[error("weight is not a barycenter of dispersion-free cover states")]
    NoMeasure,
    #[error("{points} points is too many to list every partition (limit {limit})")]
    TooManyPoints { points: usize, limit: usize },
    #[error("morphism is not test-preserving; its classical image is not constructed")]
    NotTestPreserving,
    #[error("morphism does not match the given classical models")]
    ModelMismatch,
    #[error(transparent)]
    Explanation(#[from] ExplanationError),
}

/// A model together with the quotient from its semiclassical cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub model: ProbModel,
    pub quotient: Morphism,
}

/// Outcomes `(x, E)` labelled `x@t`, where `t` is the index of `E`; states
/// are lifted by `α̃(x, E) = α(x)`.
pub fn semiclassical_cover(a: &ProbModel) -> Cover {
    let base = a.space();
    let space = TestSpace::new(base.tests().iter().enumerate().map(|(t, test)| {
        test.iter().map(move |&x| Outcome::in_test(base.outcome(x).clone(), t)).collect::<Vec<_>>()
    }))
    .expect("tests of the base are non-empty");
    let base_index: Vec<usize> = space
        .outcomes()
        .iter()
        .map(|o| match o {
            Outcome::InTest(x, _) => base.index_of(x).expect("cover outcome has a base outcome"),
            _ => unreachable!("cover outcomes are tagged with their test"),
        })
        .collect();
    let states = a
        .states()
        .iter()
        .map(|s| Weight::from_values_unchecked(base_index.iter().map(|&x| s.value(x).clone()).collect()))
        .collect();
    let model = ProbModel::new(space, states).expect("lifts of weights are weights");
    let map = base_index.iter().map(|&x| Event::from([x])).collect();
    let quotient = check_morphism(&model, a, map, PerspectivityCheck::Tests)
        .expect("the cover projection is a morphism");
    Cover { model, quotient }
}

/// Dispersion-free weights on the cover of `a`.
pub fn dispersion_free_cover_states(a: &ProbModel) -> Vec<Weight> {
    enumerate_dispersion_free(semiclassical_cover(a).model.space())
}

/// The classical model over the dispersion-free states `S` of a
/// semiclassical model: a measure `μ` on `S` is a state iff its barycenter
/// `Σ μ(s)·s` is a state of the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBorelModel {
    base: ProbModel,
    points: Vec<Weight>,
}

impl FiniteBorelModel {
    pub fn new(base: ProbModel) -> Self {
        let points = enumerate_dispersion_free(base.space());
        FiniteBorelModel { base, points }
    }

    pub fn base(&self) -> &ProbModel {
        &self.base
    }

    pub fn points(&self) -> &[Weight] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn point_index(&self, s: &Weight) -> Option<usize> {
        self.points.binary_search(s).ok()
    }

    /// `{s : s(x) = 1}` for a base outcome `x`.
    pub fn block_of(&self, x: usize) -> Block {
        (0..self.points.len()).filter(|&s| self.points[s].value(x).is_one()).collect()
    }

    pub fn measure_of(mu: &[Rational], block: &Block) -> Rational {
        block.iter().map(|&s| &mu[s]).sum()
    }

    pub fn barycenter(&self, mu: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.base.space().outcome_count()];
        for (m, s) in mu.iter().zip(&self.points) {
            if m.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(s.values()) {
                *o += m * v;
            }
        }
        out
    }

    pub fn is_probability_vector(&self, mu: &[Rational]) -> bool {
        mu.len() == self.points.len()
            && mu.iter().all(|m| !m.is_negative())
            && mu.iter().sum::<Rational>().is_one()
    }

    /// Membership in the state space.
    pub fn contains_measure(&self, mu: &[Rational]) -> bool {
        self.is_probability_vector(mu)
            && hull_membership(&self.barycenter(mu), &self.base.state_vectors()).is_ok_and(|m| m.is_member())
    }

    /// A probability vector over `S` with barycenter `alpha`.
    pub fn barycenter_measure(&self, alpha: &[Rational]) -> Result<Vec<Rational>, BorelError> {
        let n = self.base.space().outcome_count();
        if alpha.len() != n {
            return Err(BorelError::WrongLength { expected: n, found: alpha.len() });
        }
        let points: Vec<Vec<Rational>> = self.points.iter().map(|s| s.values().to_vec()).collect();
        match hull_membership(alpha, &points) {
            Ok(m) => m.certificate().map(|c| c.dense(points.len())).ok_or(BorelError::NoMeasure),
            Err(_) => Err(BorelError::NoMeasure),
        }
    }

    /// True iff the blocks are non-empty, pairwise disjoint and cover `S`.
    pub fn is_partition(&self, blocks: &[Block]) -> bool {
        let mut seen = Block::new();
        for b in blocks {
            if b.is_empty() || b.iter().any(|&s| s >= self.points.len() || !seen.insert(s)) {
                return false;
            }
        }
        seen.len() == self.points.len()
    }

    /// Vertices of the state space, as measures over `S`.
    pub fn measure_vertices(&self) -> Vec<Vec<Rational>> {
        let k = self.points.len();
        let hull = hull_inequalities(self.base.space().outcome_count(), &self.base.state_vectors())
            .expect("states share the outcome order");
        // Pull each constraint on the barycenter back to μ.
        let pull = |row: &[Rational]| -> Vec<Rational> {
            self.points.iter().map(|s| dot(row, s.values())).collect()
        };
        let mut sys = LinearSystem::new(k);
        for c in &hull.equalities {
            sys.add_equality(pull(&c.coefficients), c.rhs.clone());
        }
        for c in &hull.inequalities {
            sys.add_inequality(pull(&c.coefficients), c.rhs.clone());
        }
        sys.add_equality(vec![Rational::one(); k], Rational::one());
        for s in 0..k {
            sys.add_lower_bound(s, Rational::zero());
        }
        enumerate_vertices(&sys).expect("measures on a finite set form a bounded polytope")
    }

    /// Outcome label of a block, e.g. `{0|2}`.
    pub fn block_label(block: &Block) -> Outcome {
        let inner: Vec<String> = block.iter().map(ToString::to_string).collect();
        Outcome::label(format!("{{{}}}", inner.join("|")))
    }

    /// The model with every partition of `S` as a test, written out.
    /// Only for small `S`; the number of partitions grows fast.
    pub fn explicit_model(&self, limit: usize) -> Result<ProbModel, BorelError> {
        let k = self.points.len();
        if k > limit {
            return Err(BorelError::TooManyPoints { points: k, limit });
        }
        let tests: Vec<Vec<Outcome>> =
            set_partitions(k).into_iter().map(|p| p.iter().map(Self::block_label).collect()).collect();
        let space = TestSpace::new(tests).expect("blocks are non-empty");
        let blocks: Vec<Block> = space.outcomes().iter().map(parse_block_label).collect();
        let states = self
            .measure_vertices()
            .into_iter()
            .map(|mu| {
                Weight::from_values_unchecked(blocks.iter().map(|b| Self::measure_of(&mu, b)).collect())
            })
            .collect();
        Ok(ProbModel::new(space, states).expect("measures give weights on partitions"))
    }
}

fn parse_block_label(o: &Outcome) -> Block {
    let Outcome::Label(s) = o else { unreachable!("block outcomes are plain labels") };
    s.trim_matches(|c| c == '{' || c == '}')
        .split('|')
        .map(|p| p.parse().expect("block labels list indices"))
        .collect()
}

/// All partitions of `{0, …, k-1}` into non-empty blocks.
pub fn set_partitions(k: usize) -> Vec<Vec<Block>> {
    let mut out = Vec::new();
    let mut current: Vec<Block> = Vec::new();
    fn extend(i: usize, k: usize, current: &mut Vec<Block>, out: &mut Vec<Vec<Block>>) {
        if i == k {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            current[b].insert(i);
            extend(i + 1, k, current, out);
            current[b].remove(&i);
        }
        current.push(Block::from([i]));
        extend(i + 1, k, current, out);
        current.pop();
    }
    extend(0, k, &mut current, &mut out);
    out
}

/// The map `x ↦ {s ∈ S : s(x) = 1}` from a semiclassical model into its
/// classical model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorelEmbedding {
    target: FiniteBorelModel,
    map: Vec<Block>,
}

/// Flags decided for a [`BorelEmbedding`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BorelEmbeddingClass {
    pub morphism: bool,
    pub positive: bool,
    pub injective: bool,
    pub test_preserving: bool,
    pub states_onto: bool,
    pub embedding: bool,
}

impl BorelEmbedding {
    pub fn canonical(target: FiniteBorelModel) -> Self {
        let map = (0..target.base.space().outcome_count()).map(|x| target.block_of(x)).collect();
        BorelEmbedding { target, map }
    }

    pub fn source(&self) -> &ProbModel {
        &self.target.base
    }

    pub fn target(&self) -> &FiniteBorelModel {
        &self.target
    }

    pub fn map(&self) -> &[Block] {
        &self.map
    }

    /// Blocks of the outcomes of `ev`, with empty blocks dropped.
    pub fn image_of(&self, ev: &Event) -> Vec<Block> {
        ev.iter().map(|&x| self.map[x].clone()).filter(|b| !b.is_empty()).collect()
    }

    /// `φ∗(μ)(x) = μ(φ(x))`.
    pub fn pullback(&self, mu: &[Rational]) -> Vec<Rational> {
        self.map.iter().map(|b| FiniteBorelModel::measure_of(mu, b)).collect()
    }

    /// Decides the morphism conditions against the classical model, where
    /// events are families of disjoint blocks and perspectivity is
    /// equality of unions, then the embedding conditions.
    pub fn classify(&self, mode: PerspectivityCheck) -> BorelEmbeddingClass {
        let space = self.source().space();
        let disjoint = |blocks: &[Block]| {
            let mut seen = Block::new();
            blocks.iter().all(|b| b.iter().all(|&s| seen.insert(s)))
        };
        let union = |ev: &Event| -> Block { ev.iter().flat_map(|&x| self.map[x].iter().copied()).collect() };
        let events_ok = space.tests().iter().all(|t| disjoint(&self.image_of(&t.iter().copied().collect())));
        let pairs: Vec<(Event, Event)> = match mode {
            PerspectivityCheck::Tests => {
                let tests: Vec<Event> = (0..space.test_count()).map(|t| space.test_event(t)).collect();
                tests.iter().flat_map(|e| tests.iter().map(move |f| (e.clone(), f.clone()))).collect()
            }
            PerspectivityCheck::AllEvents => space.perspective_pairs(),
        };
        let perspective_ok = pairs.iter().all(|(a, b)| union(a) == union(b));
        let morphism = events_ok && perspective_ok;
        let positive = self.map.iter().all(|b| !b.is_empty());
        let injective = self.map.iter().collect::<BTreeSet<_>>().len() == self.map.len();
        let test_preserving = positive
            && space
                .tests()
                .iter()
                .all(|t| self.target.is_partition(&self.image_of(&t.iter().copied().collect())));
        // φ∗(μ) is the barycenter of μ, so φ∗(Ω′) ⊆ Ω by definition; onto
        // iff every generator of Ω is a barycenter.
        let states_onto =
            self.source().states().iter().all(|g| self.target.barycenter_measure(g.values()).is_ok());
        BorelEmbeddingClass {
            morphism,
            positive,
            injective,
            test_preserving,
            states_onto,
            embedding: morphism && positive && injective && test_preserving && states_onto,
        }
    }

    /// The same map into the written-out classical model.
    pub fn to_morphism(&self, explicit: &ProbModel) -> Result<Morphism, BorelError> {
        let map = self
            .map
            .iter()
            .map(|b| {
                explicit
                    .space()
                    .index_of(&FiniteBorelModel::block_label(b))
                    .map(|i| Event::from([i]))
                    .ok_or(BorelError::ModelMismatch)
            })
            .collect::<Result<Vec<_>, _>>()?;
        check_morphism(self.source(), explicit, map, PerspectivityCheck::Tests)
            .map_err(|e| BorelError::Explanation(e.into()))
    }
}

/// The canonical classical explanation `A ←q− Ã −φ→ Bor(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Borelification {
    pub cover: Cover,
    pub embedding: BorelEmbedding,
}

/// Builds the cover, the classical model over its dispersion-free states
/// and the canonical embedding. Rejects models with two or more
/// single-outcome tests, whose cover outcomes no state can separate.
pub fn borelify(a: &ProbModel) -> Result<Borelification, BorelError> {
    let singles = a.space().single_outcome_tests();
    if singles.len() >= 2 {
        let tests = singles.iter().map(|&t| a.space().labels(&a.space().test_event(t))).collect();
        return Err(BorelError::TooManySingleOutcomeTests { tests });
    }
    let cover = semiclassical_cover(a);
    let embedding = BorelEmbedding::canonical(FiniteBorelModel::new(cover.model.clone()));
    let map = embedding.map();
    for x in 0..map.len() {
        for y in x + 1..map.len() {
            if map[x] == map[y] {
                let space = cover.model.space();
                return Err(BorelError::NotInjective(space.outcome(x).clone(), space.outcome(y).clone()));
            }
        }
    }
    Ok(Borelification { cover, embedding })
}

impl Borelification {
    pub fn classical(&self) -> &FiniteBorelModel {
        self.embedding.target()
    }

    /// For every state generator `α` of the explained model, a measure `μ`
    /// on `S` with `α(x) = μ(φ(x, E))` for every cover outcome.
    pub fn measures(&self) -> Result<Vec<Vec<Rational>>, BorelError> {
        self.cover.model.states().iter().map(|g| self.classical().barycenter_measure(g.values())).collect()
    }

    /// The same span with the classical model written out; see
    /// [`FiniteBorelModel::explicit_model`].
    pub fn to_explanation(&self, limit: usize) -> Result<Explanation, BorelError> {
        let explicit = self.classical().explicit_model(limit)?;
        let embedding = self.embedding.to_morphism(&explicit)?;
        Ok(Explanation::new(self.cover.quotient.clone(), embedding)?)
    }
}
