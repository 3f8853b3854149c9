//! Probability weights, dispersion-free weights and probabilistic models.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactlp::{enumerate_vertices, hull_membership, HullMembership, LinearSystem, Rational};
use crate::outcome::Outcome;
use crate::testspace::{Event, TestSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("expected {expected} values, found {found}")]
    Length { expected: usize, found: usize },
    #[error("no value for outcome {0}")]
    MissingOutcome(Outcome),
    #[error("value given for unknown outcome {0}")]
    UnknownOutcome(Outcome),
    #[error("value {value} of outcome {outcome} is outside [0,1]")]
    OutOfRange { outcome: Outcome, value: Rational },
    #[error("test {{{}}} sums to {sum}", .test.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(","))]
    TestSum { test: Vec<Outcome>, sum: Rational },
}

/// A probability weight, stored in the outcome order of its test space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight {
    values: Vec<Rational>,
}

impl Weight {
    /// Wraps raw values without validation; see [`check_weight_values`].
    pub fn from_values_unchecked(values: Vec<Rational>) -> Self {
        Weight { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn value(&self, i: usize) -> &Rational {
        &self.values[i]
    }

    pub fn event_value(&self, ev: &Event) -> Rational {
        ev.iter().map(|&i| &self.values[i]).sum()
    }

    pub fn is_dispersion_free(&self) -> bool {
        self.values.iter().all(|v| v.is_zero() || v.is_one())
    }

    pub fn to_map(&self, space: &TestSpace) -> BTreeMap<Outcome, Rational> {
        space.outcomes().iter().cloned().zip(self.values.iter().cloned()).collect()
    }

    /// `Σ tᵢ·wᵢ`; the caller supplies convex coefficients.
    pub fn mix<'a>(parts: impl IntoIterator<Item = (Rational, &'a Weight)>) -> Option<Weight> {
        let mut acc: Option<Vec<Rational>> = None;
        for (t, w) in parts {
            let acc = acc.get_or_insert_with(|| vec![Rational::zero(); w.values.len()]);
            for (a, v) in acc.iter_mut().zip(&w.values) {
                *a += &t * v;
            }
        }
        acc.map(Weight::from_values_unchecked)
    }
}

pub fn test_sums(space: &TestSpace, values: &[Rational]) -> Vec<Rational> {
    space.tests().iter().map(|t| t.iter().map(|&i| &values[i]).sum()).collect()
}

/// Validates a value vector aligned with `space.outcomes()`.
pub fn check_weight_values(space: &TestSpace, values: Vec<Rational>) -> Result<Weight, WeightError> {
    if values.len() != space.outcome_count() {
        return Err(WeightError::Length { expected: space.outcome_count(), found: values.len() });
    }
    for (o, v) in space.outcomes().iter().zip(&values) {
        if v.is_negative() || *v > Rational::one() {
            return Err(WeightError::OutOfRange { outcome: o.clone(), value: v.clone() });
        }
    }
    for (t, sum) in space.tests().iter().zip(test_sums(space, &values)) {
        if !sum.is_one() {
            let test = t.iter().map(|&i| space.outcome(i).clone()).collect();
            return Err(WeightError::TestSum { test, sum });
        }
    }
    Ok(Weight { values })
}

/// Validates a weight given as a map over the outcomes of `space`.
pub fn check_weight(space: &TestSpace, values: &BTreeMap<Outcome, Rational>) -> Result<Weight, WeightError> {
    if let Some(o) = values.keys().find(|o| space.index_of(o).is_none()) {
        return Err(WeightError::UnknownOutcome(o.clone()));
    }
    let dense = space
        .outcomes()
        .iter()
        .map(|o| values.get(o).cloned().ok_or_else(|| WeightError::MissingOutcome(o.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    check_weight_values(space, dense)
}

/// All {0,1}-valued probability weights, sorted.
pub fn enumerate_dispersion_free(space: &TestSpace) -> Vec<Weight> {
    fn extend(space: &TestSpace, test: usize, assign: &mut Vec<Option<bool>>, out: &mut Vec<Weight>) {
        let Some(t) = space.tests().get(test) else {
            let values = assign
                .iter()
                .map(|a| if a.unwrap_or(false) { Rational::one() } else { Rational::zero() })
                .collect();
            out.push(Weight { values });
            return;
        };
        let ones = t.iter().filter(|&&i| assign[i] == Some(true)).count();
        let open: Vec<usize> = t.iter().copied().filter(|&i| assign[i].is_none()).collect();
        match ones {
            0 => {
                for &chosen in &open {
                    let saved = assign.clone();
                    for &i in &open {
                        assign[i] = Some(i == chosen);
                    }
                    extend(space, test + 1, assign, out);
                    *assign = saved;
                }
            }
            1 => {
                for &i in &open {
                    assign[i] = Some(false);
                }
                extend(space, test + 1, assign, out);
                for &i in &open {
                    assign[i] = None;
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    extend(space, 0, &mut vec![None; space.outcome_count()], &mut out);
    out.sort();
    out
}

/// `Pr(M)` as a linear system: non-negative values summing to one per test.
pub fn weight_polytope(space: &TestSpace) -> LinearSystem {
    let n = space.outcome_count();
    let mut sys = LinearSystem::new(n);
    for t in space.tests() {
        let mut row = vec![Rational::zero(); n];
        for &i in t {
            row[i] = Rational::one();
        }
        sys.add_equality(row, Rational::one());
    }
    for i in 0..n {
        sys.add_lower_bound(i, Rational::zero());
    }
    sys
}

/// Extreme points of `Pr(M)`.
pub fn full_weight_polytope_vertices(space: &TestSpace) -> Vec<Weight> {
    // Every outcome lies in a test, so the polytope sits inside [0,1]^X.
    enumerate_vertices(&weight_polytope(space))
        .expect("weight polytopes are bounded")
        .into_iter()
        .map(|values| Weight { values })
        .collect()
}

/// A test space with a state space given as the convex hull of finitely
/// many weights.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProbModel {
    space: TestSpace,
    states: Vec<Weight>,
}

impl ProbModel {
    pub fn new(space: TestSpace, states: Vec<Weight>) -> Result<Self, WeightError> {
        for s in &states {
            check_weight_values(&space, s.values.clone())?;
        }
        Ok(ProbModel { space, states })
    }

    pub fn space(&self) -> &TestSpace {
        &self.space
    }

    /// Generators of the state space.
    pub fn states(&self) -> &[Weight] {
        &self.states
    }

    pub fn state_vectors(&self) -> Vec<Vec<Rational>> {
        self.states.iter().map(|s| s.values.clone()).collect()
    }

    /// Exact membership of `w` in the convex hull of the generators.
    pub fn state_membership(&self, w: &Weight) -> HullMembership {
        hull_membership(w.values(), &self.state_vectors()).expect("weights share the outcome order")
    }

    /// True iff `values = t·α` for a state `α` and `0 ≤ t ≤ 1`.
    pub fn contains_subnormalized(&self, values: &[Rational]) -> bool {
        if values.len() != self.space.outcome_count() || values.iter().any(Signed::is_negative) {
            return false;
        }
        if values.iter().all(Zero::is_zero) {
            return true;
        }
        let sums = test_sums(&self.space, values);
        let Some(t) = sums.first() else {
            return false;
        };
        if sums.iter().any(|s| s != t) || t.is_zero() || *t > Rational::one() {
            return false;
        }
        let normalized: Vec<Rational> = values.iter().map(|v| v / t).collect();
        hull_membership(&normalized, &self.state_vectors())
            .expect("weights share the outcome order")
            .is_member()
    }
}

/// The model with `Ω = Pr(M)`, generated by the vertices of `Pr(M)`.
pub fn make_full_model(space: TestSpace) -> ProbModel {
    let states = full_weight_polytope_vertices(&space);
    ProbModel { space, states }
}
