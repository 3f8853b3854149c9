//! Exact rational feasibility, convex-hull membership and vertex enumeration.
//!
//! Everything here works over arbitrary-precision rationals. Answers are
//! yes/no with checkable certificates: a feasible point or a Farkas vector,
//! barycentric coefficients or a separating hyperplane.

mod dd;
pub mod linalg;
mod simplex;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use simplex::{phase_one, StandardSolution};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("row {row} has {found} coefficients, expected {expected}")]
    RowLength { row: usize, found: usize, expected: usize },
    #[error("vectors of different dimensions: {first} and {other}")]
    DimensionMismatch { first: usize, other: usize },
    #[error("polyhedron is unbounded")]
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
}

impl Constraint {
    fn value(&self, x: &[Rational]) -> Rational {
        linalg::dot(&self.coefficients, x)
    }
}

/// Equalities `row · x = rhs` and inequalities `row · x ≤ rhs` over
/// unrestricted rational variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearSystem {
    pub dimension: usize,
    pub equalities: Vec<Constraint>,
    pub inequalities: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(dimension: usize) -> Self {
        LinearSystem { dimension, ..Default::default() }
    }

    pub fn equality(mut self, coefficients: Vec<Rational>, rhs: Rational) -> Self {
        self.add_equality(coefficients, rhs);
        self
    }

    pub fn inequality(mut self, coefficients: Vec<Rational>, rhs: Rational) -> Self {
        self.add_inequality(coefficients, rhs);
        self
    }

    pub fn add_equality(&mut self, coefficients: Vec<Rational>, rhs: Rational) {
        self.equalities.push(Constraint { coefficients, rhs });
    }

    pub fn add_inequality(&mut self, coefficients: Vec<Rational>, rhs: Rational) {
        self.inequalities.push(Constraint { coefficients, rhs });
    }

    /// `x[i] ≥ bound`
    pub fn add_lower_bound(&mut self, i: usize, bound: Rational) {
        let mut row = vec![Rational::zero(); self.dimension];
        row[i] = -Rational::one();
        self.add_inequality(row, -bound);
    }

    /// `x[i] ≤ bound`
    pub fn add_upper_bound(&mut self, i: usize, bound: Rational) {
        let mut row = vec![Rational::zero(); self.dimension];
        row[i] = Rational::one();
        self.add_inequality(row, bound);
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (row, c) in self.equalities.iter().chain(&self.inequalities).enumerate() {
            if c.coefficients.len() != self.dimension {
                return Err(LpError::RowLength {
                    row,
                    found: c.coefficients.len(),
                    expected: self.dimension,
                });
            }
        }
        Ok(())
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        x.len() == self.dimension
            && self.equalities.iter().all(|c| c.value(x) == c.rhs)
            && self.inequalities.iter().all(|c| c.value(x) <= c.rhs)
    }
}

/// Multipliers proving that a [`LinearSystem`] has no solution: `u` on the
/// equalities and `v ≥ 0` on the inequalities with `uᵀA + vᵀC = 0` and
/// `uᵀb + vᵀd < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub equality_multipliers: Vec<Rational>,
    pub inequality_multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        if self.equality_multipliers.len() != sys.equalities.len()
            || self.inequality_multipliers.len() != sys.inequalities.len()
            || self.inequality_multipliers.iter().any(|v| v.is_negative())
        {
            return false;
        }
        let mut combo = vec![Rational::zero(); sys.dimension];
        let mut rhs = Rational::zero();
        let pairs = self
            .equality_multipliers
            .iter()
            .zip(&sys.equalities)
            .chain(self.inequality_multipliers.iter().zip(&sys.inequalities));
        for (m, c) in pairs {
            if m.is_zero() {
                continue;
            }
            for (acc, a) in combo.iter_mut().zip(&c.coefficients) {
                *acc += m * a;
            }
            rhs += m * &c.rhs;
        }
        combo.iter().all(Zero::is_zero) && rhs.is_negative()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides whether `sys` has a rational solution.
pub fn solve_feasibility(sys: &LinearSystem) -> Result<Feasibility, LpError> {
    sys.validate()?;
    let n = sys.dimension;
    let n_ineq = sys.inequalities.len();
    let width = 2 * n + n_ineq;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for c in &sys.equalities {
        let mut row = vec![Rational::zero(); width];
        for (j, v) in c.coefficients.iter().enumerate() {
            row[j] = v.clone();
            row[n + j] = -v.clone();
        }
        a.push(row);
        b.push(c.rhs.clone());
    }
    for (k, c) in sys.inequalities.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for (j, v) in c.coefficients.iter().enumerate() {
            row[j] = v.clone();
            row[n + j] = -v.clone();
        }
        row[2 * n + k] = Rational::one();
        a.push(row);
        b.push(c.rhs.clone());
    }
    Ok(match phase_one(&a, &b, width) {
        StandardSolution::Feasible(z) => {
            let x: Vec<Rational> = (0..n).map(|j| &z[j] - &z[n + j]).collect();
            debug_assert!(sys.is_satisfied_by(&x));
            Feasibility::Feasible(x)
        }
        StandardSolution::Infeasible(y) => {
            let (eq, ineq) = y.split_at(sys.equalities.len());
            let cert = FarkasCertificate {
                equality_multipliers: eq.iter().map(|v| -v.clone()).collect(),
                inequality_multipliers: ineq.iter().map(|v| -v.clone()).collect(),
            };
            debug_assert!(cert.verify(sys));
            Feasibility::Infeasible(cert)
        }
    })
}

/// Barycentric coefficients `(generator index, λ)` with every `λ > 0`,
/// `Σλ = 1` and `Σλ·g = point`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullCertificate {
    pub coefficients: Vec<(usize, Rational)>,
}

impl HullCertificate {
    pub fn verify(&self, point: &[Rational], generators: &[Vec<Rational>]) -> bool {
        let mut sum = vec![Rational::zero(); point.len()];
        let mut total = Rational::zero();
        for (i, l) in &self.coefficients {
            let Some(g) = generators.get(*i) else {
                return false;
            };
            if !l.is_positive() || g.len() != point.len() {
                return false;
            }
            total += l;
            for (s, v) in sum.iter_mut().zip(g) {
                *s += l * v;
            }
        }
        total.is_one() && sum == point
    }

    /// Coefficients as a dense vector of length `n`.
    pub fn dense(&self, n: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        for (i, l) in &self.coefficients {
            v[*i] = l.clone();
        }
        v
    }
}

/// `normal · g ≤ offset` for every generator while `normal · point > offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingHyperplane {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl SeparatingHyperplane {
    pub fn verify(&self, point: &[Rational], generators: &[Vec<Rational>]) -> bool {
        self.normal.len() == point.len()
            && linalg::dot(&self.normal, point) > self.offset
            && generators
                .iter()
                .all(|g| g.len() == point.len() && linalg::dot(&self.normal, g) <= self.offset)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HullMembership {
    Member(HullCertificate),
    NotMember(SeparatingHyperplane),
}

impl HullMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, HullMembership::Member(_))
    }

    pub fn certificate(&self) -> Option<&HullCertificate> {
        match self {
            HullMembership::Member(c) => Some(c),
            HullMembership::NotMember(_) => None,
        }
    }
}

/// Decides whether `point` is a convex combination of `generators`.
pub fn hull_membership(point: &[Rational], generators: &[Vec<Rational>]) -> Result<HullMembership, LpError> {
    let d = point.len();
    if let Some(g) = generators.iter().find(|g| g.len() != d) {
        return Err(LpError::DimensionMismatch { first: d, other: g.len() });
    }
    let k = generators.len();
    let mut a: Vec<Vec<Rational>> =
        (0..d).map(|i| generators.iter().map(|g| g[i].clone()).collect()).collect();
    a.push(vec![Rational::one(); k]);
    let mut b = point.to_vec();
    b.push(Rational::one());
    Ok(match phase_one(&a, &b, k) {
        StandardSolution::Feasible(lambda) => {
            let coefficients = lambda.into_iter().enumerate().filter(|(_, l)| l.is_positive()).collect();
            let cert = HullCertificate { coefficients };
            debug_assert!(cert.verify(point, generators));
            HullMembership::Member(cert)
        }
        StandardSolution::Infeasible(y) => {
            let sep = SeparatingHyperplane { normal: y[..d].to_vec(), offset: -y[d].clone() };
            debug_assert!(sep.verify(point, generators));
            HullMembership::NotMember(sep)
        }
    })
}

/// Affine hull of the equality constraints as `x = base + Σ t_i · directions[i]`.
fn affine_parametrization(sys: &LinearSystem) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let a: Vec<Vec<Rational>> = sys.equalities.iter().map(|c| c.coefficients.clone()).collect();
    let b: Vec<Rational> = sys.equalities.iter().map(|c| c.rhs.clone()).collect();
    let base = linalg::solve(&a, &b, sys.dimension)?;
    Some((base, linalg::nullspace(&a, sys.dimension)))
}

/// Vertices of the bounded polyhedron described by `sys`, lexicographically
/// sorted and without duplicates. An empty system yields no vertices.
pub fn enumerate_vertices(sys: &LinearSystem) -> Result<Vec<Vec<Rational>>, LpError> {
    sys.validate()?;
    let Some((base, directions)) = affine_parametrization(sys) else {
        return Ok(Vec::new());
    };
    let k = directions.len();
    let to_x = |t: &[Rational]| -> Vec<Rational> {
        let mut x = base.clone();
        for (ti, dir) in t.iter().zip(&directions) {
            if ti.is_zero() {
                continue;
            }
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi += ti * di;
            }
        }
        x
    };
    if k == 0 {
        return Ok(if sys.is_satisfied_by(&base) { vec![base] } else { Vec::new() });
    }

    // Homogenized cone in (t, s): s·(d - C·base) - (C·N)·t ≥ 0, s ≥ 0.
    let mut rows: Vec<Vec<Rational>> = sys
        .inequalities
        .iter()
        .map(|c| {
            let mut row: Vec<Rational> =
                directions.iter().map(|dir| -linalg::dot(&c.coefficients, dir)).collect();
            row.push(&c.rhs - c.value(&base));
            row
        })
        .collect();
    let mut s_row = vec![Rational::zero(); k + 1];
    s_row[k] = Rational::one();
    rows.push(s_row);

    let Some(rays) = dd::extreme_rays(&rows, k + 1) else {
        return match solve_feasibility(sys)? {
            Feasibility::Feasible(_) => Err(LpError::Unbounded),
            Feasibility::Infeasible(_) => Ok(Vec::new()),
        };
    };
    let mut vertices = Vec::new();
    let mut recession = false;
    for ray in rays {
        let s = &ray[k];
        if s.is_zero() {
            recession = true;
            continue;
        }
        let t: Vec<Rational> = ray[..k].iter().map(|v| v / s).collect();
        vertices.push(to_x(&t));
    }
    if vertices.is_empty() {
        return Ok(Vec::new());
    }
    if recession {
        return Err(LpError::Unbounded);
    }
    vertices.sort();
    vertices.dedup();
    Ok(vertices)
}

/// An H-representation of the convex hull of `generators`: equalities for
/// its affine hull and one inequality per facet.
pub fn hull_inequalities(dimension: usize, generators: &[Vec<Rational>]) -> Result<LinearSystem, LpError> {
    if let Some(g) = generators.iter().find(|g| g.len() != dimension) {
        return Err(LpError::DimensionMismatch { first: dimension, other: g.len() });
    }
    let mut sys = LinearSystem::new(dimension);
    let Some(origin) = generators.first() else {
        sys.add_inequality(vec![Rational::zero(); dimension], -Rational::one());
        return Ok(sys);
    };
    let diffs: Vec<Vec<Rational>> =
        generators[1..].iter().map(|g| g.iter().zip(origin).map(|(a, b)| a - b).collect()).collect();
    for normal in linalg::nullspace(&diffs, dimension) {
        let rhs = linalg::dot(&normal, origin);
        sys.add_equality(normal, rhs);
    }
    let (_, pivots) = linalg::rref(diffs.clone(), dimension);
    let k = pivots.len();
    if k == 0 {
        return Ok(sys);
    }
    // Coordinates on the pivot columns identify points of the affine hull.
    let coords: Vec<Vec<Rational>> = diffs
        .iter()
        .map(|d| pivots.iter().map(|&p| d[p].clone()).collect())
        .chain(std::iter::once(vec![Rational::zero(); k]))
        .collect();
    let count = Rational::from_integer(BigInt::from(coords.len()));
    let centroid: Vec<Rational> =
        (0..k).map(|i| coords.iter().map(|c| &c[i]).sum::<Rational>() / &count).collect();
    // Polar body {a : a·(c - centroid) ≤ 1}; its vertices are the facets.
    let mut polar = LinearSystem::new(k);
    for c in &coords {
        let row: Vec<Rational> = c.iter().zip(&centroid).map(|(a, b)| a - b).collect();
        polar.add_inequality(row, Rational::one());
    }
    for a in enumerate_vertices(&polar)? {
        // a·(x[pivots] - origin[pivots] - centroid) ≤ 1
        let mut row = vec![Rational::zero(); dimension];
        let mut rhs = Rational::one();
        for (ai, &p) in a.iter().zip(&pivots) {
            row[p] = ai.clone();
            rhs += ai * (&origin[p]);
        }
        rhs += linalg::dot(&a, &centroid);
        sys.add_inequality(row, rhs);
    }
    Ok(sys)
}
