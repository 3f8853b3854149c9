//! Bell locality of classical embeddings of a composite.
//!
//! An embedding of the cover of `AB` into a classical model over `S` is
//! Bell-local when every point mass `δ_s` pulls back to a weight `γ̃_s`
//! that descends to a weight `γ_s` on `AB` whose restriction `π∗(γ_s)`
//! is a product `α_s ⊗ β_s`.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::classicalize::{borelify, Block, BorelError};
use crate::composites::{
    is_separable_weight, marginals_and_conditionals, minimal_ns_composite, product_space, product_weight,
    Composite, NsAnalysis, SignallingWitness,
};
use crate::exactlp::{hull_membership, rat, HullMembership, Rational};
use crate::outcome::Outcome;
use crate::testspace::TestSpace;
use crate::weights::{check_weight_values, make_full_model, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BellError {
    #[error("embedding has {found} blocks for {expected} cover outcomes")]
    WrongLength { expected: usize, found: usize },
    #[error("block of cover outcome {0} mentions a point outside 0..{1}")]
    PointOutOfRange(Outcome, usize),
    #[error("cover outcome {0} has an empty block")]
    NotPositive(Outcome),
    #[error("cover outcomes {0} and {1} share a block")]
    NotInjective(Outcome, Outcome),
    #[error("the blocks of cover test #{0} do not partition the points")]
    NotTestPreserving(usize),
    #[error("the embedding is not Bell-local")]
    NotLocal,
    #[error("state generator #{0} is not a barycenter of the points")]
    NoMeasure(usize),
    #[error(transparent)]
    Borel(#[from] BorelError),
}

/// An embedding of the cover of a composite's total model into the
/// classical model over `0..point_count`, given by one block per cover
/// outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalEmbedding {
    cover: TestSpace,
    point_count: usize,
    map: Vec<Block>,
}

impl ClassicalEmbedding {
    /// The canonical Borelification embedding of the total model.
    pub fn canonical(c: &Composite) -> Result<Self, BellError> {
        let b = borelify(c.total())?;
        Ok(ClassicalEmbedding {
            cover: b.cover.model.space().clone(),
            point_count: b.classical().point_count(),
            map: b.embedding.map().to_vec(),
        })
    }

    /// Checks that the map is positive, injective and sends every cover
    /// test to a partition of the points.
    pub fn new(c: &Composite, point_count: usize, map: Vec<Block>) -> Result<Self, BellError> {
        let cover = crate::classicalize::semiclassical_cover(c.total()).model.space().clone();
        if map.len() != cover.outcome_count() {
            return Err(BellError::WrongLength { expected: cover.outcome_count(), found: map.len() });
        }
        for (x, b) in map.iter().enumerate() {
            if b.iter().any(|&s| s >= point_count) {
                return Err(BellError::PointOutOfRange(cover.outcome(x).clone(), point_count));
            }
            if b.is_empty() {
                return Err(BellError::NotPositive(cover.outcome(x).clone()));
            }
            if let Some(y) = (x + 1..map.len()).find(|&y| map[y] == *b) {
                return Err(BellError::NotInjective(cover.outcome(x).clone(), cover.outcome(y).clone()));
            }
        }
        for (t, test) in cover.tests().iter().enumerate() {
            let mut hits = vec![0usize; point_count];
            for &x in test {
                for &s in &map[x] {
                    hits[s] += 1;
                }
            }
            if hits.iter().any(|&h| h != 1) {
                return Err(BellError::NotTestPreserving(t));
            }
        }
        Ok(ClassicalEmbedding { cover, point_count, map })
    }

    pub fn cover(&self) -> &TestSpace {
        &self.cover
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn map(&self) -> &[Block] {
        &self.map
    }

    /// `γ̃_s = φ∗(δ_s)`, a dispersion-free weight on the cover.
    pub fn point_weight(&self, s: usize) -> Vec<Rational> {
        self.map.iter().map(|b| if b.contains(&s) { Rational::one() } else { Rational::zero() }).collect()
    }
}

/// A non-vanishing 2×2 minor of a joint table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Minor {
    pub rows: (Outcome, Outcome),
    pub columns: (Outcome, Outcome),
    pub determinant: Rational,
}

/// Why a point is not local.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum BellWitness {
    /// `γ̃_s` takes different values on two copies of one outcome of `AB`,
    /// so no `γ_s` exists.
    Contextual { point: usize, outcome: Outcome, tests: (usize, usize) },
    /// `π∗(γ_s)` is not a product.
    Entangled { point: usize, joint: Weight, minor: Minor, signalling: Option<SignallingWitness> },
}

impl BellWitness {
    pub fn point(&self) -> usize {
        match self {
            BellWitness::Contextual { point, .. } | BellWitness::Entangled { point, .. } => *point,
        }
    }

    pub fn is_signalling(&self) -> bool {
        matches!(self, BellWitness::Entangled { signalling: Some(_), .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub point: usize,
    pub left: Weight,
    pub right: Weight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellVerdict {
    pub local: bool,
    pub point_count: usize,
    pub witnesses: Vec<BellWitness>,
    pub factorization: Vec<Factorization>,
}

/// A non-vanishing minor of `table`, or `None` when it has rank at most one.
fn rank_one_violation(table: &[Vec<Rational>]) -> Option<(usize, usize, usize, usize, Rational)> {
    let (r0, c0) = table
        .iter()
        .enumerate()
        .find_map(|(i, row)| row.iter().position(|v| !v.is_zero()).map(|j| (i, j)))?;
    for (i, row) in table.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let det = &table[r0][c0] * v - &table[i][c0] * &table[r0][j];
            if !det.is_zero() {
                return Some((r0, i, c0, j, det));
            }
        }
    }
    None
}

/// Descends a cover weight to `AB`, or reports a contextual outcome.
fn descend(
    c: &Composite,
    cover: &TestSpace,
    gamma: &[Rational],
) -> Result<Vec<Rational>, (Outcome, usize, usize)> {
    let space = c.total().space();
    let mut out = Vec::with_capacity(space.outcome_count());
    for z in 0..space.outcome_count() {
        let copies: Vec<(usize, &Rational)> = space
            .tests_containing(z)
            .map(|t| {
                let i = cover.index_of(&Outcome::in_test(space.outcome(z).clone(), t)).expect("cover copy");
                (t, &gamma[i])
            })
            .collect();
        if let Some(&(t1, _)) = copies.iter().find(|(_, v)| *v != copies[0].1) {
            return Err((space.outcome(z).clone(), copies[0].0, t1));
        }
        out.push(copies[0].1.clone());
    }
    Ok(out)
}

pub fn check_bell_local(c: &Composite, emb: &ClassicalEmbedding) -> BellVerdict {
    let (a, b) = (c.left().space(), c.right().space());
    let nb = b.outcome_count();
    let mut witnesses = Vec::new();
    let mut factorization = Vec::new();
    for s in 0..emb.point_count {
        let gamma = match descend(c, &emb.cover, &emb.point_weight(s)) {
            Ok(g) => g,
            Err((outcome, t0, t1)) => {
                witnesses.push(BellWitness::Contextual { point: s, outcome, tests: (t0, t1) });
                continue;
            }
        };
        let joint = c.restrict(&Weight::from_values_unchecked(gamma));
        let table: Vec<Vec<Rational>> = joint.values().chunks(nb.max(1)).map(<[Rational]>::to_vec).collect();
        match rank_one_violation(&table) {
            Some((r0, r1, c0, c1, determinant)) => {
                let signalling = match marginals_and_conditionals(a, b, &joint) {
                    NsAnalysis::Signalling(w) => Some(w),
                    NsAnalysis::NonSignalling(_) => None,
                };
                let minor = Minor {
                    rows: (a.outcome(r0).clone(), a.outcome(r1).clone()),
                    columns: (b.outcome(c0).clone(), b.outcome(c1).clone()),
                    determinant,
                };
                witnesses.push(BellWitness::Entangled { point: s, joint, minor, signalling });
            }
            None => {
                let NsAnalysis::NonSignalling(m) = marginals_and_conditionals(a, b, &joint) else {
                    unreachable!("normalized rank-one tables are products")
                };
                debug_assert_eq!(product_weight(&m.left, &m.right), joint);
                factorization.push(Factorization { point: s, left: m.left, right: m.right });
            }
        }
    }
    BellVerdict { local: witnesses.is_empty(), point_count: emb.point_count, witnesses, factorization }
}

/// The decomposition of one state generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateDecomposition {
    pub generator: usize,
    /// `μ(s)` for points with positive mass.
    pub measure: Vec<(usize, Rational)>,
    /// Whether `π∗(ω) = Σ μ(s)·α_s ⊗ β_s` holds exactly.
    pub mixture_verified: bool,
    pub separable: HullMembership,
}

/// For a Bell-local embedding, writes every restricted state generator
/// as a mixture of the product weights `α_s ⊗ β_s`.
pub fn local_implies_separable_check(
    c: &Composite,
    emb: &ClassicalEmbedding,
) -> Result<Vec<StateDecomposition>, BellError> {
    let verdict = check_bell_local(c, emb);
    if !verdict.local {
        return Err(BellError::NotLocal);
    }
    let cover = crate::classicalize::semiclassical_cover(c.total());
    let points: Vec<Vec<Rational>> = (0..emb.point_count).map(|s| emb.point_weight(s)).collect();
    let (a, b) = (c.left().space(), c.right().space());
    c.total()
        .states()
        .iter()
        .enumerate()
        .map(|(k, omega)| {
            let lifted = &cover.model.states()[k];
            let membership = hull_membership(lifted.values(), &points).expect("cover weights share an order");
            let Some(cert) = membership.certificate() else { return Err(BellError::NoMeasure(k)) };
            let measure = cert.coefficients.clone();
            // Local verdicts factor every point, in order.
            let products: Vec<(Rational, Weight)> = measure
                .iter()
                .map(|(s, m)| {
                    let f = &verdict.factorization[*s];
                    (m.clone(), product_weight(&f.left, &f.right))
                })
                .collect();
            let mixture = Weight::mix(products.iter().map(|(m, w)| (m.clone(), w)));
            let restricted = c.restrict(omega);
            Ok(StateDecomposition {
                generator: k,
                measure,
                mixture_verified: mixture.as_ref() == Some(&restricted),
                separable: is_separable_weight(a, b, &restricted),
            })
        })
        .collect()
}

/// The minimal composite of two full squares, the PR box and its two
/// dispersion-free components `ω` and `ω′`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrBox {
    pub composite: Composite,
    pub pr_box: Weight,
    pub omega: Weight,
    pub omega_prime: Weight,
}

pub fn pr_box_parts() -> TestSpace {
    TestSpace::from_labels(&[&["x", "y"], &["u", "v"]]).expect("two tests")
}

fn deterministic(space: &TestSpace, ones: &[(&str, &str)]) -> Weight {
    let mut v = vec![Rational::zero(); space.outcome_count()];
    for (x, y) in ones {
        let i = space.index_of(&Outcome::pair((*x).into(), (*y).into())).expect("pair outcome");
        v[i] = Rational::one();
    }
    check_weight_values(space, v).expect("one outcome per product test")
}

pub fn build_pr_box() -> PrBox {
    let part = make_full_model(pr_box_parts());
    let composite = minimal_ns_composite(&part, &part);
    let p = product_space(part.space(), part.space());
    let omega = deterministic(&p, &[("x", "x"), ("x", "u"), ("u", "x"), ("u", "v")]);
    let omega_prime = deterministic(&p, &[("y", "y"), ("y", "v"), ("v", "y"), ("v", "u")]);
    let pr_box = Weight::mix([(rat(1, 2), &omega), (rat(1, 2), &omega_prime)]).expect("convex weights");
    PrBox { composite, pr_box, omega, omega_prime }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composites::{check_composite, Side};
    use crate::exactlp::int;
    use crate::testspace::Event;
    use crate::weights::ProbModel;

    fn single() -> ProbModel {
        make_full_model(TestSpace::from_labels(&[&["x", "y"]]).unwrap())
    }

    fn value(w: &Weight, space: &TestSpace, x: &str, y: &str) -> Rational {
        w.value(space.index_of(&Outcome::pair(x.into(), y.into())).unwrap()).clone()
    }

    #[test]
    fn single_tests_are_local() {
        let m = single();
        let c = minimal_ns_composite(&m, &m);
        let emb = ClassicalEmbedding::canonical(&c).unwrap();
        let v = check_bell_local(&c, &emb);
        assert!(v.local);
        assert_eq!((v.point_count, v.factorization.len()), (4, 4));
        assert!(v.factorization.iter().all(|f| f.left.is_dispersion_free() && f.right.is_dispersion_free()));
        let reports = local_implies_separable_check(&c, &emb).unwrap();
        assert_eq!(reports.len(), c.total().states().len());
        assert!(reports.iter().all(|r| r.mixture_verified && r.separable.is_member()));
    }

    #[test]
    fn product_state_only() {
        let m = single();
        let p = product_space(m.space(), m.space());
        let half = check_weight_values(m.space(), vec![rat(1, 2), rat(1, 2)]).unwrap();
        let total = ProbModel::new(p, vec![product_weight(&half, &half)]).unwrap();
        let c = check_composite(&m, &m, &total, (0..4).map(|i| Event::from([i])).collect()).unwrap();
        let emb = ClassicalEmbedding::canonical(&c).unwrap();
        let reports = local_implies_separable_check(&c, &emb).unwrap();
        assert_eq!(reports[0].measure, vec![(0, rat(1, 4)), (1, rat(1, 4)), (2, rat(1, 4)), (3, rat(1, 4))]);
        assert!(reports[0].mixture_verified);
    }

    #[test]
    fn squares_are_not_local() {
        let pr = build_pr_box();
        let emb = ClassicalEmbedding::canonical(&pr.composite).unwrap();
        let v = check_bell_local(&pr.composite, &emb);
        assert!(!v.local);
        assert_eq!(v.point_count, 256);
        assert!(v.witnesses.iter().any(BellWitness::is_signalling));
        for w in &v.witnesses {
            if let BellWitness::Entangled { minor, .. } = w {
                assert!(!minor.determinant.is_zero());
            }
        }
        assert_eq!(local_implies_separable_check(&pr.composite, &emb), Err(BellError::NotLocal));

        // Only the test spaces matter.
        let part = make_full_model(pr_box_parts());
        let uniform = check_weight_values(part.space(), vec![rat(1, 2); 4]).unwrap();
        let one =
            ProbModel::new(pr.composite.product().clone(), vec![product_weight(&uniform, &uniform)]).unwrap();
        let c = check_composite(&part, &part, &one, pr.composite.pi().to_vec()).unwrap();
        let w = check_bell_local(&c, &ClassicalEmbedding::canonical(&c).unwrap());
        assert_eq!(w, v);
    }

    #[test]
    fn pr_box_values() {
        let pr = build_pr_box();
        let p = pr.composite.product();
        assert_eq!(value(&pr.pr_box, p, "x", "x"), rat(1, 2));
        assert_eq!(value(&pr.pr_box, p, "y", "x"), int(0));
        let a = pr_box_parts();
        for w in [&pr.omega, &pr.omega_prime] {
            let NsAnalysis::Signalling(wit) = marginals_and_conditionals(&a, &a, w) else { panic!() };
            assert_eq!(wit.side, Side::Right);
        }
        let NsAnalysis::NonSignalling(m) = marginals_and_conditionals(&a, &a, &pr.pr_box) else { panic!() };
        assert!(m.left.values().iter().chain(m.right.values()).all(|v| *v == rat(1, 2)));
        assert!(pr.composite.ns().contains(pr.pr_box.values()));
        assert!(pr.composite.total().state_membership(&pr.pr_box).is_member());
        assert!(!is_separable_weight(&a, &a, &pr.pr_box).is_member());
    }

    #[test]
    fn explicit_embeddings_are_validated() {
        let m = single();
        let c = minimal_ns_composite(&m, &m);
        let canon = ClassicalEmbedding::canonical(&c).unwrap();
        let same = ClassicalEmbedding::new(&c, 4, canon.map().to_vec()).unwrap();
        assert_eq!(same, canon);
        let mut bad = canon.map().to_vec();
        bad[0] = Block::from([0, 1]);
        assert!(matches!(ClassicalEmbedding::new(&c, 4, bad), Err(BellError::NotTestPreserving(0))));
        assert!(matches!(
            ClassicalEmbedding::new(&c, 3, canon.map().to_vec()),
            Err(BellError::PointOutOfRange(..))
        ));
    }

    #[test]
    fn rank_one_minors() {
        let t = vec![vec![rat(1, 2), int(0)], vec![int(0), rat(1, 2)]];
        let (_, _, _, _, det) = rank_one_violation(&t).unwrap();
        assert_eq!(det, rat(1, 4));
        let t = vec![vec![rat(1, 6), rat(1, 3)], vec![rat(1, 6), rat(1, 3)]];
        assert!(rank_one_violation(&t).is_none());
    }
}
