//! Phase-one simplex on standard-form systems `A z = b, z ≥ 0`.
//!
//! Pivoting follows Bland's rule (smallest entering index, ties in the ratio
//! test broken by smallest basic index), so runs are deterministic and
//! terminate on degenerate systems.

use num_traits::{Signed, Zero};

use super::Rational;

pub(crate) enum StandardSolution {
    /// A basic feasible solution.
    Feasible(Vec<Rational>),
    /// A Farkas vector `y` with `yᵀA ≤ 0` componentwise and `yᵀb > 0`.
    Infeasible(Vec<Rational>),
}

pub(crate) fn phase_one(a: &[Vec<Rational>], b: &[Rational], n: usize) -> StandardSolution {
    let m = a.len();
    debug_assert_eq!(m, b.len());
    let width = n + m + 1;
    let rhs = n + m;

    let mut signs = Vec::with_capacity(m);
    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let negate = bi.is_negative();
        signs.push(negate);
        let mut t = vec![Rational::zero(); width];
        for (j, v) in row.iter().enumerate() {
            t[j] = if negate { -v.clone() } else { v.clone() };
        }
        t[n + i] = Rational::from_integer(1.into());
        t[rhs] = bi.abs();
        tableau.push(t);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs of the artificial objective; the last entry holds minus
    // the current objective value.
    let mut cost = vec![Rational::zero(); width];
    for t in &tableau {
        for j in 0..n {
            if !t[j].is_zero() {
                cost[j] -= &t[j];
            }
        }
        cost[rhs] -= &t[rhs];
    }

    while let Some(enter) = (0..n).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, t) in tableau.iter().enumerate() {
            if !t[enter].is_positive() {
                continue;
            }
            let ratio = &t[rhs] / &t[enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // Phase one is bounded below by zero, so some row always qualifies.
        let (row, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut tableau, &mut cost, row, enter);
        basis[row] = enter;
    }

    if cost[rhs].is_zero() {
        let mut z = vec![Rational::zero(); n];
        for (t, &bv) in tableau.iter().zip(&basis) {
            if bv < n {
                z[bv] = t[rhs].clone();
            }
        }
        return StandardSolution::Feasible(z);
    }

    let mut y = vec![Rational::zero(); m];
    for (t, &bv) in tableau.iter().zip(&basis) {
        if bv >= n {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += &t[n + i];
            }
        }
    }
    for (yi, &neg) in y.iter_mut().zip(&signs) {
        if neg {
            *yi = -yi.clone();
        }
    }
    StandardSolution::Infeasible(y)
}

fn pivot(tableau: &mut [Vec<Rational>], cost: &mut [Rational], row: usize, col: usize) {
    let inv = tableau[row][col].recip();
    for v in tableau[row].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    let pivot_row = tableau[row].clone();
    let eliminate = |target: &mut [Rational]| {
        let f = target[col].clone();
        if f.is_zero() {
            return;
        }
        for (v, p) in target.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
    };
    for (i, t) in tableau.iter_mut().enumerate() {
        if i != row {
            eliminate(t);
        }
    }
    eliminate(cost);
}
