//! The action of the classical-model construction on test-preserving
//! morphisms.
//!
//! A test-preserving `φ : A → B` lifts to the covers by
//! `φ̃(x, E) = {(y, φ(E)) : y ∈ φ(x)}`. Pulling dispersion-free states of
//! `B̃` back along `φ̃` gives a point map `f : S_B → S_A`, and the classical
//! morphism sends a block `b ⊆ S_A` to `f⁻¹(b)`.

use num_traits::Zero;

use crate::exactlp::Rational;
use crate::morphisms::{check_morphism, pullback_weight, Morphism, PerspectivityCheck};
use crate::outcome::Outcome;
use crate::testspace::Event;
use crate::weights::Weight;

use super::{semiclassical_cover, Block, BorelError, FiniteBorelModel};

/// The cover lift `φ̃ : Ã → B̃` of a test-preserving morphism.
pub fn lift_to_cover(phi: &Morphism) -> Result<Morphism, BorelError> {
    if !phi.classify().test_preserving {
        return Err(BorelError::NotTestPreserving);
    }
    let (a, b) = (phi.source().space(), phi.target().space());
    let (cover_a, cover_b) = (semiclassical_cover(phi.source()), semiclassical_cover(phi.target()));
    let map = cover_a
        .model
        .space()
        .outcomes()
        .iter()
        .map(|o| {
            let Outcome::InTest(x, t) = o else { unreachable!("cover outcomes are tagged") };
            let x = a.index_of(x).expect("cover outcome has a base outcome");
            let image_test = b
                .test_index(&phi.image_of(&a.test_event(*t)))
                .expect("test-preserving maps send tests to tests");
            phi.image(x)
                .iter()
                .map(|&y| {
                    let lifted = Outcome::in_test(b.outcome(y).clone(), image_test);
                    cover_b.model.space().index_of(&lifted).expect("lifted outcome lies in the cover")
                })
                .collect::<Event>()
        })
        .collect();
    check_morphism(&cover_a.model, &cover_b.model, map, PerspectivityCheck::Tests)
        .map_err(|e| BorelError::Explanation(e.into()))
}

/// A morphism of classical models induced by a point map between their
/// point sets, running the other way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BorelMap {
    source: FiniteBorelModel,
    target: FiniteBorelModel,
    point_map: Vec<usize>,
}

/// The classical image of a test-preserving morphism `φ : A → B`, as a map
/// from the classical model of `Ã` to that of `B̃`.
pub fn bor_on_morphism(
    phi: &Morphism,
    source: &FiniteBorelModel,
    target: &FiniteBorelModel,
) -> Result<BorelMap, BorelError> {
    let lifted = lift_to_cover(phi)?;
    if lifted.source() != source.base() || lifted.target() != target.base() {
        return Err(BorelError::ModelMismatch);
    }
    let point_map = target
        .points()
        .iter()
        .map(|s| {
            let pulled = Weight::from_values_unchecked(pullback_weight(&lifted, s));
            source.point_index(&pulled).expect("pullbacks of dispersion-free weights are dispersion-free")
        })
        .collect();
    Ok(BorelMap { source: source.clone(), target: target.clone(), point_map })
}

impl BorelMap {
    pub fn identity(model: &FiniteBorelModel) -> Self {
        BorelMap {
            source: model.clone(),
            target: model.clone(),
            point_map: (0..model.point_count()).collect(),
        }
    }

    pub fn source(&self) -> &FiniteBorelModel {
        &self.source
    }

    pub fn target(&self) -> &FiniteBorelModel {
        &self.target
    }

    /// `f : S_target → S_source`.
    pub fn point_map(&self) -> &[usize] {
        &self.point_map
    }

    /// `b ↦ f⁻¹(b)`; the empty block stands for the empty event.
    pub fn apply(&self, block: &Block) -> Block {
        (0..self.point_map.len()).filter(|s| block.contains(&self.point_map[*s])).collect()
    }

    /// `g ∘ self`, defined when `self.target() == g.source()`.
    pub fn then(&self, g: &BorelMap) -> Result<BorelMap, BorelError> {
        if self.target != g.source {
            return Err(BorelError::ModelMismatch);
        }
        Ok(BorelMap {
            source: self.source.clone(),
            target: g.target.clone(),
            point_map: g.point_map.iter().map(|&s| self.point_map[s]).collect(),
        })
    }

    /// Positive iff every block has a non-empty preimage.
    pub fn is_positive(&self) -> bool {
        let mut hit = vec![false; self.source.point_count()];
        for &s in &self.point_map {
            hit[s] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// `ν ↦ f∗ν`, which is how states pull back along `b ↦ f⁻¹(b)`.
    pub fn pushforward(&self, nu: &[Rational]) -> Vec<Rational> {
        let mut mu = vec![Rational::zero(); self.source.point_count()];
        for (s, m) in self.point_map.iter().zip(nu) {
            mu[*s] += m;
        }
        mu
    }

    /// Every vertex of the target's state space pulls back to a state of
    /// the source.
    pub fn preserves_states(&self) -> bool {
        self.target.measure_vertices().iter().all(|nu| self.source.contains_measure(&self.pushforward(nu)))
    }
}
