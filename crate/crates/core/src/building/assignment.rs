//! Minimum-cost assignment over `Q ∪ {+inf}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{ExtRational, Rational};

/// A permutation `sigma` (column `j` is matched with row `sigma[j]`, 0-based)
/// minimizing `sum_j V[sigma(j)][j]`, and that minimum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub value: Rational,
}

/// Hungarian method with potentials on a square cost matrix where `None`
/// is a forbidden pair. Returns the optimal value, or `None` when no
/// perfect matching avoids the forbidden pairs.
fn min_cost(cost: &[Vec<Option<&Rational>>]) -> Option<Rational> {
    let n = cost.len();
    if n == 0 {
        return Some(Rational::zero());
    }
    let mut u = vec![Rational::zero(); n + 1];
    let mut v = vec![Rational::zero(); n + 1];
    // p[j]: worker (1-based) holding job j; way[j]: previous job on the
    // alternating path.
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv: Vec<Option<Rational>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta: Option<Rational> = None;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                if let Some(c) = cost[i0 - 1][j - 1] {
                    let cur = &(c - &u[i0]) - &v[j];
                    if minv[j].as_ref().is_none_or(|m| cur < *m) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if let Some(m) = &minv[j] {
                    if delta.as_ref().is_none_or(|d| m < d) {
                        delta = Some(m.clone());
                        j1 = j;
                    }
                }
            }
            let delta = delta?;
            for j in 0..=n {
                if used[j] {
                    u[p[j]] = &u[p[j]] + &delta;
                    v[j] = &v[j] - &delta;
                } else if let Some(m) = &mut minv[j] {
                    *m = &*m - &delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut total = Rational::zero();
    for j in 1..=n {
        total = &total + cost[p[j] - 1][j - 1].expect("matched pairs are allowed");
    }
    Some(total)
}

/// Optimal value on the rows and columns not yet fixed.
fn residual(v: &[Vec<ExtRational>], rows: &[usize], cols: &[usize]) -> Option<Rational> {
    // Workers are columns, jobs are rows.
    let cost: Vec<Vec<Option<&Rational>>> = cols
        .iter()
        .map(|&j| rows.iter().map(|&i| v[i][j].finite()).collect())
        .collect();
    min_cost(&cost)
}

fn check_square(v: &[Vec<ExtRational>]) -> Result<usize> {
    let d = v.len();
    if v.iter().any(|row| row.len() != d) {
        return Err(Error::NotSquare {
            rows: d,
            cols: v.first().map_or(0, Vec::len),
        });
    }
    Ok(d)
}

/// Tropical determinant `min_sigma sum_j V[sigma(j)][j]` with the
/// lexicographically smallest minimizing `sigma`.
///
/// The optimum comes from the Hungarian method; the tie-break fixes
/// `sigma(0), sigma(1), ...` greedily, keeping the smallest row whose
/// residual problem still reaches the optimum.
pub fn tropical_assignment(v: &[Vec<ExtRational>]) -> Result<Assignment> {
    let d = check_square(v)?;
    let all: Vec<usize> = (0..d).collect();
    let value = residual(v, &all, &all).ok_or(Error::InfeasibleAssignment)?;
    let mut perm = Vec::with_capacity(d);
    let mut free_rows = all.clone();
    let mut spent = Rational::zero();
    for j in 0..d {
        let rest_cols: Vec<usize> = (j + 1..d).collect();
        let choice = free_rows.iter().copied().find(|&i| {
            let Some(c) = v[i][j].finite() else {
                return false;
            };
            let rows: Vec<usize> = free_rows.iter().copied().filter(|&r| r != i).collect();
            residual(v, &rows, &rest_cols).is_some_and(|r| &(&spent + c) + &r == value)
        });
        let i = choice.expect("an optimal completion exists");
        spent = &spent + v[i][j].finite().expect("finite");
        free_rows.retain(|&r| r != i);
        perm.push(i);
    }
    Ok(Assignment { perm, value })
}

/// Enumerates all `d!` permutations in lexicographic order and keeps the
/// first minimizer.
pub fn brute_force_assignment(v: &[Vec<ExtRational>]) -> Result<Assignment> {
    let d = check_square(v)?;
    let mut best: Option<Assignment> = None;
    let mut perm: Vec<usize> = (0..d).collect();
    loop {
        let total = perm
            .iter()
            .enumerate()
            .fold(ExtRational::Finite(Rational::zero()), |acc, (j, &i)| acc.add(&v[i][j]));
        if let ExtRational::Finite(t) = total {
            if best.as_ref().is_none_or(|b| t < b.value) {
                best = Some(Assignment {
                    perm: perm.clone(),
                    value: t,
                });
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.ok_or(Error::InfeasibleAssignment)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
