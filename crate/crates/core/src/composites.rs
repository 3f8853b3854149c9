//! Product test spaces, non-signalling joint weights and composites.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactlp::{
    enumerate_vertices, hull_inequalities, hull_membership, linalg::rank, HullMembership, LinearSystem,
    Rational,
};
use crate::morphisms::{check_test_space_morphism, pullback_values, MorphismError, PerspectivityCheck};
use crate::outcome::Outcome;
use crate::testspace::{Event, TestSpace};
use crate::weights::{full_weight_polytope_vertices, ProbModel, Weight};

/// A probability weight on a product test space.
pub type JointWeight = Weight;

/// Tests `E × F` over outcomes `(x, y)`. Outcome `(i, j)` has index
/// `i·|Y| + j`, because pairs sort by their left component first.
pub fn product_space(a: &TestSpace, b: &TestSpace) -> TestSpace {
    let tests = a.tests().iter().flat_map(|e| {
        b.tests().iter().map(move |f| {
            e.iter()
                .flat_map(|&x| {
                    f.iter().map(move |&y| Outcome::pair(a.outcome(x).clone(), b.outcome(y).clone()))
                })
                .collect::<Vec<_>>()
        })
    });
    TestSpace::new(tests).expect("products of non-empty tests are non-empty")
}

fn idx(nb: usize, x: usize, y: usize) -> usize {
    x * nb + y
}

/// `(α ⊗ β)(x, y) = α(x)·β(y)`.
pub fn product_weight(alpha: &Weight, beta: &Weight) -> JointWeight {
    product_values(alpha.values(), beta.values())
}

fn product_values(alpha: &[Rational], beta: &[Rational]) -> JointWeight {
    Weight::from_values_unchecked(alpha.iter().flat_map(|a| beta.iter().map(move |b| a * b)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A marginal that depends on the partner's test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignallingWitness {
    /// The side whose marginal changes.
    pub side: Side,
    pub outcome: Outcome,
    /// Two tests of the other side.
    pub contexts: (Vec<Outcome>, Vec<Outcome>),
    pub values: (Rational, Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marginals {
    pub left: Weight,
    pub right: Weight,
    /// `ω_{1|y}` for every `y` with `ω₂(y) > 0`.
    pub left_conditionals: Vec<(Outcome, Weight)>,
    /// `ω_{2|x}` for every `x` with `ω₁(x) > 0`.
    pub right_conditionals: Vec<(Outcome, Weight)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NsAnalysis {
    NonSignalling(Marginals),
    Signalling(SignallingWitness),
}

impl NsAnalysis {
    pub fn is_non_signalling(&self) -> bool {
        matches!(self, NsAnalysis::NonSignalling(_))
    }
}

/// Marginal of one side computed against every test of the other side.
#[allow(clippy::result_large_err)]
fn side_marginal(
    own: &TestSpace,
    other: &TestSpace,
    value: impl Fn(usize, usize) -> Rational,
    side: Side,
) -> Result<Vec<Rational>, SignallingWitness> {
    let mut out = Vec::with_capacity(own.outcome_count());
    for x in 0..own.outcome_count() {
        let sums: Vec<Rational> =
            other.tests().iter().map(|f| f.iter().map(|&y| value(x, y)).sum()).collect();
        if let Some(k) = sums.iter().position(|s| *s != sums[0]) {
            return Err(SignallingWitness {
                side,
                outcome: own.outcome(x).clone(),
                contexts: (other.labels(&other.test_event(0)), other.labels(&other.test_event(k))),
                values: (sums[0].clone(), sums[k].clone()),
            });
        }
        out.push(sums.into_iter().next().unwrap_or_else(Rational::zero));
    }
    Ok(out)
}

/// Marginals and conditionals of a joint weight, or a signalling witness.
pub fn marginals_and_conditionals(a: &TestSpace, b: &TestSpace, omega: &JointWeight) -> NsAnalysis {
    let nb = b.outcome_count();
    let w = omega.values();
    let left = match side_marginal(a, b, |x, y| w[idx(nb, x, y)].clone(), Side::Left) {
        Ok(m) => m,
        Err(witness) => return NsAnalysis::Signalling(witness),
    };
    let right = match side_marginal(b, a, |y, x| w[idx(nb, x, y)].clone(), Side::Right) {
        Ok(m) => m,
        Err(witness) => return NsAnalysis::Signalling(witness),
    };
    let left_conditionals = (0..nb)
        .filter(|&y| right[y].is_positive())
        .map(|y| {
            let c = (0..a.outcome_count()).map(|x| &w[idx(nb, x, y)] / &right[y]).collect();
            (b.outcome(y).clone(), Weight::from_values_unchecked(c))
        })
        .collect();
    let right_conditionals = (0..a.outcome_count())
        .filter(|&x| left[x].is_positive())
        .map(|x| {
            let c = (0..nb).map(|y| &w[idx(nb, x, y)] / &left[x]).collect();
            (a.outcome(x).clone(), Weight::from_values_unchecked(c))
        })
        .collect();
    NsAnalysis::NonSignalling(Marginals {
        left: Weight::from_values_unchecked(left),
        right: Weight::from_values_unchecked(right),
        left_conditionals,
        right_conditionals,
    })
}

/// The non-signalling joint weights whose conditionals are states of the
/// parts, as a system of linear constraints. Conditional constraints are
/// multiplied through by the conditioning marginal, which makes them
/// linear and vacuous when that marginal is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsPolytope {
    left: ProbModel,
    right: ProbModel,
    product: TestSpace,
    system: LinearSystem,
}

impl NsPolytope {
    pub fn new(left: &ProbModel, right: &ProbModel) -> Self {
        let (a, b) = (left.space(), right.space());
        let (na, nb) = (a.outcome_count(), b.outcome_count());
        let product = product_space(a, b);
        let n = na * nb;
        let mut sys = LinearSystem::new(n);
        let unit = |i: usize| {
            let mut row = vec![Rational::zero(); n];
            row[i] = Rational::from_integer(1.into());
            row
        };
        for t in product.tests() {
            let mut row = vec![Rational::zero(); n];
            for &i in t {
                row[i] = Rational::from_integer(1.into());
            }
            sys.add_equality(row, Rational::from_integer(1.into()));
        }
        // Marginals agree across the partner's tests.
        for x in 0..na {
            for f in &b.tests()[1.min(b.test_count())..] {
                let mut row = vec![Rational::zero(); n];
                for &y in f {
                    row[idx(nb, x, y)] += Rational::from_integer(1.into());
                }
                for &y in &b.tests()[0] {
                    row[idx(nb, x, y)] -= Rational::from_integer(1.into());
                }
                sys.add_equality(row, Rational::zero());
            }
        }
        for y in 0..nb {
            for e in &a.tests()[1.min(a.test_count())..] {
                let mut row = vec![Rational::zero(); n];
                for &x in e {
                    row[idx(nb, x, y)] += Rational::from_integer(1.into());
                }
                for &x in &a.tests()[0] {
                    row[idx(nb, x, y)] -= Rational::from_integer(1.into());
                }
                sys.add_equality(row, Rational::zero());
            }
        }
        for i in 0..n {
            sys.add_inequality(unit(i).into_iter().map(|v| -v).collect(), Rational::zero());
        }
        // Conditionals: h·ω(·, y) ≤ c·ω₂(y), and symmetrically.
        let ha = hull_inequalities(na, &left.state_vectors()).expect("states share the outcome order");
        let hb = hull_inequalities(nb, &right.state_vectors()).expect("states share the outcome order");
        let homogenize = |h: &[Rational], c: &Rational, fixed: usize, left_side: bool| -> Vec<Rational> {
            let mut row = vec![Rational::zero(); n];
            if left_side {
                for (x, hx) in h.iter().enumerate() {
                    row[idx(nb, x, fixed)] += hx;
                }
                for &x in &a.tests()[0] {
                    row[idx(nb, x, fixed)] -= c;
                }
            } else {
                for (y, hy) in h.iter().enumerate() {
                    row[idx(nb, fixed, y)] += hy;
                }
                for &y in &b.tests()[0] {
                    row[idx(nb, fixed, y)] -= c;
                }
            }
            row
        };
        if a.test_count() > 0 {
            for y in 0..nb {
                for c in &ha.equalities {
                    sys.add_equality(homogenize(&c.coefficients, &c.rhs, y, true), Rational::zero());
                }
                for c in &ha.inequalities {
                    sys.add_inequality(homogenize(&c.coefficients, &c.rhs, y, true), Rational::zero());
                }
            }
        }
        if b.test_count() > 0 {
            for x in 0..na {
                for c in &hb.equalities {
                    sys.add_equality(homogenize(&c.coefficients, &c.rhs, x, false), Rational::zero());
                }
                for c in &hb.inequalities {
                    sys.add_inequality(homogenize(&c.coefficients, &c.rhs, x, false), Rational::zero());
                }
            }
        }
        NsPolytope { left: left.clone(), right: right.clone(), product, system: sys }
    }

    pub fn product(&self) -> &TestSpace {
        &self.product
    }

    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    pub fn contains(&self, omega: &[Rational]) -> bool {
        omega.len() == self.system.dimension && self.system.is_satisfied_by(omega)
    }

    pub fn vertices(&self) -> Vec<JointWeight> {
        enumerate_vertices(&self.system)
            .expect("joint weights lie in the unit cube")
            .into_iter()
            .map(Weight::from_values_unchecked)
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompositeError {
    #[error("pi is not a test-space morphism: {0}")]
    NotMorphism(#[from] MorphismError),
    #[error("pi sends {0} to the empty event")]
    NotPositive(Outcome),
    #[error("pi sends {0} and {1} to the same event")]
    NotInjective(Outcome, Outcome),
    #[error("pi does not send every product test to a test")]
    NotTestPreserving,
    #[error("state generator #{0} of the composite restricts outside the non-signalling states")]
    StateOutsideNs(usize),
    #[error("the weight is not a state of the composite")]
    NotAState,
}

/// A model `AB` with a positive, injective, test-preserving morphism
/// `π : A ×_NS B → AB`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composite {
    ns: NsPolytope,
    total: ProbModel,
    pi: Vec<Event>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CompositeFlags {
    pub locally_tomographic: bool,
    pub strong: bool,
}

/// `A ×_NS B` with `Ω` given by the vertices of the non-signalling
/// polytope and `π` the identity.
pub fn minimal_ns_composite(left: &ProbModel, right: &ProbModel) -> Composite {
    let ns = NsPolytope::new(left, right);
    let total = ProbModel::new(ns.product.clone(), ns.vertices()).expect("vertices are joint weights");
    let pi = (0..ns.product.outcome_count()).map(|i| Event::from([i])).collect();
    Composite { ns, total, pi }
}

/// Validates `(AB, π)` as a non-signalling composite of `left` and `right`.
pub fn check_composite(
    left: &ProbModel,
    right: &ProbModel,
    total: &ProbModel,
    pi: Vec<Event>,
) -> Result<Composite, CompositeError> {
    let ns = NsPolytope::new(left, right);
    let product = ns.product();
    check_test_space_morphism(product, total.space(), &pi, PerspectivityCheck::Tests)?;
    if let Some(i) = pi.iter().position(Event::is_empty) {
        return Err(CompositeError::NotPositive(product.outcome(i).clone()));
    }
    for i in 0..pi.len() {
        if let Some(j) = (i + 1..pi.len()).find(|&j| pi[j] == pi[i]) {
            return Err(CompositeError::NotInjective(product.outcome(i).clone(), product.outcome(j).clone()));
        }
    }
    let test_preserving = product
        .tests()
        .iter()
        .all(|t| total.space().is_test(&t.iter().flat_map(|&i| pi[i].iter().copied()).collect()));
    if !test_preserving {
        return Err(CompositeError::NotTestPreserving);
    }
    for (k, g) in total.states().iter().enumerate() {
        if !ns.contains(&pullback_values(&pi, g.values())) {
            return Err(CompositeError::StateOutsideNs(k));
        }
    }
    Ok(Composite { ns, total: total.clone(), pi })
}

impl Composite {
    pub fn left(&self) -> &ProbModel {
        &self.ns.left
    }

    pub fn right(&self) -> &ProbModel {
        &self.ns.right
    }

    pub fn product(&self) -> &TestSpace {
        &self.ns.product
    }

    pub fn ns(&self) -> &NsPolytope {
        &self.ns
    }

    pub fn total(&self) -> &ProbModel {
        &self.total
    }

    pub fn pi(&self) -> &[Event] {
        &self.pi
    }

    /// `π∗(ω)`, a joint weight on the product space.
    pub fn restrict(&self, omega: &Weight) -> JointWeight {
        Weight::from_values_unchecked(pullback_values(&self.pi, omega.values()))
    }

    fn restricted_generators(&self) -> Vec<Vec<Rational>> {
        self.total.states().iter().map(|g| self.restrict(g).into_values()).collect()
    }

    /// Locally tomographic: `π∗` is injective on the affine hull of the
    /// states. Strong: every product of part states is a restriction.
    pub fn flags(&self) -> CompositeFlags {
        let gens = self.total.state_vectors();
        let restricted = self.restricted_generators();
        let diffs = |vs: &[Vec<Rational>]| -> Vec<Vec<Rational>> {
            vs.iter().skip(1).map(|v| v.iter().zip(&vs[0]).map(|(a, b)| a - b).collect()).collect()
        };
        let locally_tomographic = gens.is_empty()
            || rank(&diffs(&gens), gens[0].len()) == rank(&diffs(&restricted), restricted[0].len());
        // Products are bilinear, so generator products suffice.
        let strong = self.left().states().iter().all(|a| {
            self.right().states().iter().all(|b| {
                hull_membership(product_weight(a, b).values(), &restricted).is_ok_and(|m| m.is_member())
            })
        });
        CompositeFlags { locally_tomographic, strong }
    }

    /// Products of generator states of the parts that are restrictions of
    /// states of the composite.
    pub fn preparable_products(&self) -> Vec<JointWeight> {
        let restricted = self.restricted_generators();
        let mut out: Vec<JointWeight> = self
            .left()
            .states()
            .iter()
            .flat_map(|a| self.right().states().iter().map(move |b| product_weight(a, b)))
            .filter(|p| hull_membership(p.values(), &restricted).is_ok_and(|m| m.is_member()))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Membership of `ω` in the hull of `v ⊗ w` over vertices of `Pr(A)` and
/// `Pr(B)`.
pub fn is_separable_weight(a: &TestSpace, b: &TestSpace, omega: &JointWeight) -> HullMembership {
    let va = full_weight_polytope_vertices(a);
    let vb = full_weight_polytope_vertices(b);
    let products: Vec<Vec<Rational>> =
        va.iter().flat_map(|v| vb.iter().map(move |w| product_weight(v, w).into_values())).collect();
    hull_membership(omega.values(), &products).expect("joint weights share the product order")
}

/// Whether `π∗(ω)` is a mixture of preparable products of generator
/// states. A `Member` answer is exact; a `NotMember` answer only rules out
/// mixtures of those particular products.
pub fn is_separable_state(c: &Composite, omega: &Weight) -> Result<HullMembership, CompositeError> {
    if omega.values().len() != c.total.space().outcome_count() || !c.total.state_membership(omega).is_member()
    {
        return Err(CompositeError::NotAState);
    }
    let products: Vec<Vec<Rational>> = c.preparable_products().into_iter().map(Weight::into_values).collect();
    Ok(hull_membership(c.restrict(omega).values(), &products).expect("joint weights share the product order"))
}
