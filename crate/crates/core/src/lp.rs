//! Dense exact simplex for `max c·x` subject to `A x <= b`, `x >= 0`, `b >= 0`.
//! Bland's rule prevents cycling on degenerate pivots.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub primal: Vec<Rational>,
    /// One multiplier per constraint row.
    pub dual: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint row {row} has {got} coefficients, expected {expected}")]
    Shape { row: usize, got: usize, expected: usize },
    #[error("right-hand side of row {0} is negative")]
    NegativeRhs(usize),
    #[error("objective is unbounded")]
    Unbounded,
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let n = lp.objective.len();
    let m = lp.rows.len();
    for (row, r) in lp.rows.iter().enumerate() {
        if r.len() != n {
            return Err(LpError::Shape { row, got: r.len(), expected: n });
        }
    }
    if let Some(i) = lp.rhs.iter().position(|b| b.is_negative()) {
        return Err(LpError::NegativeRhs(i));
    }
    let width = n + m;
    let mut tab: Vec<Vec<Rational>> = lp
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..m).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }));
            row
        })
        .collect();
    let mut rhs = lp.rhs.clone();
    let mut reduced: Vec<Rational> = lp.objective.clone();
    reduced.extend((0..m).map(|_| Rational::zero()));
    let mut value = Rational::zero();
    let mut basis: Vec<usize> = (n..width).collect();

    while let Some(q) = (0..width).find(|&j| reduced[j].is_positive()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if tab[i][q].is_positive() {
                let ratio = &rhs[i] / &tab[i][q];
                let better = match &leave {
                    None => true,
                    Some((p, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*p]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (p, _) = leave.ok_or(LpError::Unbounded)?;
        let pivot = tab[p][q].clone();
        for v in tab[p].iter_mut() {
            *v /= &pivot;
        }
        rhs[p] /= &pivot;
        let pivot_row = tab[p].clone();
        let pivot_rhs = rhs[p].clone();
        for i in 0..m {
            if i == p || tab[i][q].is_zero() {
                continue;
            }
            let factor = tab[i][q].clone();
            for (v, pv) in tab[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            rhs[i] -= &factor * &pivot_rhs;
        }
        let factor = reduced[q].clone();
        for (v, pv) in reduced.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &factor * pv;
            }
        }
        value += &factor * &pivot_rhs;
        basis[p] = q;
    }

    let mut primal = vec![Rational::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            primal[b] = rhs[i].clone();
        }
    }
    let dual = (0..m).map(|i| -reduced[n + i].clone()).collect();
    Ok(LpSolution { value, primal, dual })
}
