//! Exact phase-one simplex over the rationals.
//!
//! Only feasibility of `A λ = b, λ ≥ 0` is needed, for convex-hull membership.
//! Bland's rule guarantees termination.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Decides whether `A λ = b` has a solution with `λ ≥ 0`.
///
/// `rows` holds the rows of `A` together with the right-hand side as the last
/// entry; all rows must have equal length.
pub fn feasible(rows: Vec<Vec<BigRational>>) -> bool {
    let m = rows.len();
    if m == 0 {
        return true;
    }
    let n = rows[0].len() - 1;
    let width = n + m + 1;
    let rhs = width - 1;

    // [A | I | b] with b made nonnegative; artificials start basic.
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (r, mut row) in rows.into_iter().enumerate() {
        debug_assert_eq!(row.len(), n + 1);
        if row[n].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        let b = row.pop().unwrap();
        row.extend((0..m).map(|k| {
            if k == r {
                BigRational::from_integer(1.into())
            } else {
                BigRational::zero()
            }
        }));
        row.push(b);
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // reduced costs of minimizing the artificial sum; cost[rhs] = -objective
    let mut cost = vec![BigRational::zero(); width];
    for j in (0..n).chain(std::iter::once(rhs)) {
        for row in &tab {
            cost[j] -= &row[j];
        }
    }

    loop {
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        // ratio test, ties broken by the smallest basic index
        let mut leave: Option<(usize, BigRational)> = None;
        for (r, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[rhs] / &row[enter];
            let better = match &leave {
                None => true,
                Some((best, best_ratio)) => {
                    ratio < *best_ratio || (ratio == *best_ratio && basis[r] < basis[*best])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // phase one is bounded below by zero
        let (r, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut tab, &mut cost, r, enter);
        basis[r] = enter;
    }
    cost[rhs].is_zero()
}

fn pivot(tab: &mut [Vec<BigRational>], cost: &mut [BigRational], r: usize, c: usize) {
    let p = tab[r][c].clone();
    for x in tab[r].iter_mut() {
        *x /= &p;
    }
    let pivot_row = tab[r].clone();
    for (k, row) in tab.iter_mut().enumerate() {
        if k != r {
            eliminate(row, &pivot_row, c);
        }
    }
    eliminate(cost, &pivot_row, c);
}

fn eliminate(row: &mut [BigRational], pivot_row: &[BigRational], c: usize) {
    let f = row[c].clone();
    if f.is_zero() {
        return;
    }
    for (x, y) in row.iter_mut().zip(pivot_row) {
        if !y.is_zero() {
            *x -= &f * y;
        }
    }
}
