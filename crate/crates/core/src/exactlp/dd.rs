//! Double description method for pointed polyhedral cones `{y : R y ≥ 0}`.
//!
//! Rows are inserted one at a time; adjacency of ray pairs is decided by the
//! combinatorial test on zero sets, which is exact for pointed cones.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::linalg::{dot, inverse, rank};
use super::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn intersection(&self, other: &Self) -> Self {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn is_superset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    coords: Vec<Rational>,
    zeros: BitSet,
}

/// Scales a ray to the primitive integer vector on the same half-line.
fn normalize(mut v: Vec<Rational>) -> Vec<Rational> {
    let lcm = v.iter().filter(|x| !x.is_zero()).fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    for x in v.iter_mut() {
        *x *= Rational::from_integer(lcm.clone());
    }
    let gcd = v.iter().filter(|x| !x.is_zero()).fold(BigInt::zero(), |acc, x| acc.gcd(x.numer()));
    if !gcd.is_zero() && !gcd.is_one() {
        let g = Rational::from_integer(gcd);
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}

/// Extreme rays of `{y ∈ R^d : row · y ≥ 0 for every row}`.
///
/// Returns `None` when the rows do not have full column rank, i.e. the cone
/// contains a line.
pub(crate) fn extreme_rays(rows: &[Vec<Rational>], d: usize) -> Option<Vec<Vec<Rational>>> {
    if d == 0 {
        return Some(Vec::new());
    }
    if rank(rows, d) < d {
        return None;
    }
    // Greedy choice of d independent rows for the initial simplicial cone.
    let mut basis_rows: Vec<usize> = Vec::new();
    let mut chosen: Vec<Vec<Rational>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        chosen.push(r.clone());
        if rank(&chosen, d) == chosen.len() {
            basis_rows.push(i);
            if chosen.len() == d {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    let inv = inverse(&chosen).expect("independent rows");
    let nrows = rows.len();
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let coords = normalize((0..d).map(|i| inv[i][j].clone()).collect());
            let mut zeros = BitSet::new(nrows);
            for (k, &r) in basis_rows.iter().enumerate() {
                if k != j {
                    zeros.insert(r);
                }
            }
            Ray { coords, zeros }
        })
        .collect();

    for (idx, row) in rows.iter().enumerate() {
        if basis_rows.contains(&idx) {
            continue;
        }
        let values: Vec<Rational> = rays.iter().map(|r| dot(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();

        let mut next: Vec<Ray> = Vec::new();
        for (i, ray) in rays.iter().enumerate() {
            if values[i].is_negative() {
                continue;
            }
            let mut zeros = ray.zeros.clone();
            if values[i].is_zero() {
                zeros.insert(idx);
            }
            next.push(Ray { coords: ray.coords.clone(), zeros });
        }
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.intersection(&rays[n].zeros);
                if common.len() + 2 < d {
                    continue;
                }
                let adjacent =
                    rays.iter().enumerate().all(|(k, r)| k == p || k == n || !r.zeros.is_superset(&common));
                if !adjacent {
                    continue;
                }
                let coords: Vec<Rational> = rays[n]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(nc, pc)| &values[p] * nc - &values[n] * pc)
                    .collect();
                let mut zeros = common;
                zeros.insert(idx);
                next.push(Ray { coords: normalize(coords), zeros });
            }
        }
        rays = next;
    }
    Some(rays.into_iter().map(|r| r.coords).collect())
}
