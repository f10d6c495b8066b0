//! Closed-form cones and translations attached to positive configurations.

use std::collections::BTreeMap;

use serde::Serialize;

use super::cone::DifferenceCone;
use super::{flag_apartment, intersect_apartments, WeylElement};
use crate::error::{Error, Result};
use crate::flags::{double_ratios, FlagTuple, TripleIndex, TripleRatios};
use crate::rational::{ExtRational, Rational};
use crate::valfield::ValuedScalar;

/// Valuations of a full set of triple ratios.
pub fn ratio_valuations(ratios: &TripleRatios) -> Result<BTreeMap<TripleIndex, Rational>> {
    ratios
        .iter()
        .map(|(idx, x)| {
            x.val()
                .map(|v| (*idx, v))
                .ok_or_else(|| Error::ZeroCoordinate(format!("({idx})")))
        })
        .collect()
}

fn lookup(vals: &BTreeMap<TripleIndex, Rational>, a: usize, b: usize, c: usize) -> Result<Rational> {
    vals.get(&TripleIndex::new(a, b, c))
        .cloned()
        .ok_or_else(|| Error::InvalidIndex(format!("missing valuation ({a},{b},{c})")))
}

/// Running sums `P_1, ..., P_n` of `terms`.
fn partial_sums(terms: impl IntoIterator<Item = Rational>) -> Vec<Rational> {
    let mut acc = Rational::zero();
    terms
        .into_iter()
        .map(|t| {
            acc = &acc + &t;
            acc.clone()
        })
        .collect()
}

/// The cone of `A_EG ∩ A_EF` in the bottom snake marking of `(E, F, G)`:
/// `x_r - x_{r+1} >= max(0, P_1, ..., P_{r-1})` where `P_m` is the sum of
/// the first `m` valuations in `v(X_{d-r, 1, r-1}), v(X_{d-r, 2, r-2}),
/// ..., v(X_{d-r, r-1, 1})`.
///
/// The running sums start next to `G`: a tail move followed by a diamond
/// move adds the next ratio along the row, and the row is walked from
/// `X_{d-r, 1, r-1}` outwards.
pub fn cone_c1(d: usize, vals: &BTreeMap<TripleIndex, Rational>, marking: &str) -> Result<DifferenceCone> {
    let mut constraints = Vec::with_capacity(d);
    for r in 1..d {
        let terms = (1..r)
            .map(|b| lookup(vals, d - r, b, r - b))
            .collect::<Result<Vec<_>>>()?;
        let lower = partial_sums(terms)
            .iter()
            .fold(Rational::zero(), |m, p| Rational::max(&m, p));
        // x_{r+1} - x_r <= -lower
        constraints.push((r, r - 1, ExtRational::Finite(-lower)));
    }
    Ok(DifferenceCone::from_constraints(d, marking, constraints))
}

/// The cone of `A_EG ∩ A_FG` in the bottom snake marking of `(E, F, G)`:
/// `x_r - x_{r+1} <= min(0, Q_1, ..., Q_{d-r-1})` where `Q_m` is the sum of
/// the first `m` valuations in `v(X_{d-r-1, 1, r}), v(X_{d-r-2, 2, r}),
/// ..., v(X_{1, d-r-1, r})`. This is the first cone for `(G, F, E)`
/// rewritten with `X_{a,b,c}(G, F, E) = X_{c,b,a}(E, F, G)^{-1}` and the
/// order-reversing relabeling of the bottom snake basis.
pub fn cone_c2(d: usize, vals: &BTreeMap<TripleIndex, Rational>, marking: &str) -> Result<DifferenceCone> {
    let mut constraints = Vec::with_capacity(d);
    for r in 1..d {
        let terms = (1..d - r)
            .map(|b| lookup(vals, d - r - b, b, r))
            .collect::<Result<Vec<_>>>()?;
        let upper = partial_sums(terms)
            .iter()
            .fold(Rational::zero(), |m, q| Rational::min(&m, q));
        constraints.push((r - 1, r, ExtRational::Finite(upper)));
    }
    Ok(DifferenceCone::from_constraints(d, marking, constraints))
}

/// The translation `z` with `z_i - z_{i+1} = -v(Z_{d-i})` and `sum(z) = 0`,
/// from the double ratios `Z_1, ..., Z_{d-1}`.
pub fn shearing_formula(z: &[ValuedScalar]) -> Result<WeylElement> {
    let d = z.len() + 1;
    let mut coords = vec![Rational::zero()];
    for i in 1..d {
        let v = z[d - i - 1]
            .val()
            .ok_or_else(|| Error::ZeroCoordinate(format!("Z_{}", d - i)))?;
        let next = &coords[i - 1] + &v;
        coords.push(next);
    }
    Ok(WeylElement::translation_by(&coords))
}

/// The translation relating the two bottom snake markings of `A_EG` seen
/// from `F` and from `H`.
pub fn shearing_translation(
    e: &crate::flags::Flag,
    f: &crate::flags::Flag,
    g: &crate::flags::Flag,
    h: &crate::flags::Flag,
) -> Result<WeylElement> {
    shearing_formula(&double_ratios(e, f, g, h)?)
}

fn sorted(p: (usize, usize)) -> (usize, usize) {
    (p.0.min(p.1), p.0.max(p.1))
}

/// Whether some cyclic relabeling of `1..=t` puts the pairs, each read as
/// an unordered pair `i < j`, in the nested position
/// `i1 <= i2 <= i3 < j3 <= j2 <= j1`.
pub fn is_combinatorially_separating(
    t: usize,
    p1: (usize, usize),
    p2: (usize, usize),
    p3: (usize, usize),
) -> bool {
    let valid = |p: (usize, usize)| p.0 != p.1 && (1..=t).contains(&p.0) && (1..=t).contains(&p.1);
    if !(valid(p1) && valid(p2) && valid(p3)) {
        return false;
    }
    (0..t).any(|rot| {
        let relabel = |p: (usize, usize)| sorted(((p.0 - 1 + rot) % t + 1, (p.1 - 1 + rot) % t + 1));
        let ((i1, j1), (i2, j2), (i3, j3)) = (relabel(p1), relabel(p2), relabel(p3));
        i1 <= i2 && i2 <= i3 && i3 < j3 && j3 <= j2 && j2 <= j1
    })
}

/// Outcome of [`check_monotonicity`]. `cone12`, `cone13` and their
/// intersection are in the marking of `A_1`; `cone23` is in that of `A_2`.
#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub cone12: DifferenceCone,
    pub cone13: DifferenceCone,
    pub cone23: DifferenceCone,
    pub triple: DifferenceCone,
    pub holds: bool,
}

/// Checks `A_1 ∩ A_3 = A_1 ∩ A_2 ∩ A_3` for the apartments of the flag
/// pairs `p1, p2, p3` (1-based vertices) of a positive tuple.
pub fn check_monotonicity(
    tuple: &FlagTuple,
    p1: (usize, usize),
    p2: (usize, usize),
    p3: (usize, usize),
) -> Result<MonotonicityReport> {
    if !is_combinatorially_separating(tuple.t(), p1, p2, p3) {
        return Err(Error::NotSeparating);
    }
    let apartment = |(i, j): (usize, usize)| {
        flag_apartment(tuple.flag(i), tuple.flag(j)).map(|m| m.named(format!("A({i},{j})")))
    };
    let (a1, a2, a3) = (apartment(p1)?, apartment(p2)?, apartment(p3)?);
    let cone12 = intersect_apartments(&a1, &a2)?;
    let cone13 = intersect_apartments(&a1, &a3)?;
    let cone23 = intersect_apartments(&a2, &a3)?;
    let triple = cone12.intersect(&cone13);
    let holds = triple == cone13;
    Ok(MonotonicityReport {
        cone12,
        cone13,
        cone23,
        triple,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn fin(x: Rational) -> ExtRational {
        ExtRational::Finite(x)
    }

    #[test]
    fn d2_cones_are_opposite_chambers() {
        let vals = BTreeMap::new();
        let c1 = cone_c1(2, &vals, "f").unwrap();
        let c2 = cone_c2(2, &vals, "f").unwrap();
        assert_eq!(c1.bound(1, 0), &fin(r(0, 1)));
        assert!(c1.bound(0, 1).is_infinite());
        assert_eq!(c2.bound(0, 1), &fin(r(0, 1)));
        assert!(c1.intersect(&c2).is_single_point());
    }

    #[test]
    fn d3_first_cone() {
        for v in [r(2, 3), r(-1, 2)] {
            let mut vals = BTreeMap::new();
            vals.insert(TripleIndex::new(1, 1, 1), v.clone());
            let c1 = cone_c1(3, &vals, "f").unwrap();
            let expect = DifferenceCone::from_constraints(
                3,
                "f",
                [
                    (1, 0, fin(r(0, 1))),
                    (2, 1, fin(-Rational::max(&Rational::zero(), &v))),
                ],
            );
            assert_eq!(c1, expect);
        }
    }

    #[test]
    fn zero_valuations_meet_in_a_point() {
        let vals: BTreeMap<_, _> = TripleIndex::interior(5)
            .into_iter()
            .map(|i| (i, Rational::zero()))
            .collect();
        let c1 = cone_c1(5, &vals, "f").unwrap();
        let c2 = cone_c2(5, &vals, "f").unwrap();
        let both = c1.intersect(&c2);
        assert!(both.is_single_point());
        assert_eq!(both.interior_point().unwrap(), vec![r(1, 5); 5]);
    }

    #[test]
    fn shearing_examples() {
        let zs = [ValuedScalar::t()];
        let w = shearing_formula(&zs).unwrap();
        assert_eq!(w.translation(), &[r(1, 2), r(-1, 2)]);
        let ones = vec![ValuedScalar::from_int(3); 4];
        assert!(shearing_formula(&ones).unwrap().is_identity());
    }

    #[test]
    fn separation_examples() {
        assert!(is_combinatorially_separating(4, (1, 4), (2, 4), (3, 4)));
        assert!(is_combinatorially_separating(5, (2, 3), (2, 3), (2, 3)));
        // Rotations of (1,2),(3,4),(1,3): the middle pair never nests
        // between the outer ones.
        assert!(!is_combinatorially_separating(4, (1, 2), (3, 4), (1, 3)));
        assert!(is_combinatorially_separating(4, (1, 2), (1, 3), (3, 4)) == exhaustive(4, (1, 2), (1, 3), (3, 4)));
    }

    /// Independent check: the pairs separate when some cyclic interval
    /// ordering puts the endpoints in nested position.
    fn exhaustive(t: usize, p1: (usize, usize), p2: (usize, usize), p3: (usize, usize)) -> bool {
        (1..=t).any(|start| {
            let pos = |v: usize| (v + t - start) % t;
            let key = |p: (usize, usize)| {
                let (a, b) = (pos(p.0), pos(p.1));
                (a.min(b), a.max(b))
            };
            let (a, b, c) = (key(p1), key(p2), key(p3));
            a.0 <= b.0 && b.0 <= c.0 && c.0 < c.1 && c.1 <= b.1 && b.1 <= a.1
        })
    }

    #[test]
    fn separation_matches_exhaustive_search() {
        for t in 3..=6 {
            let pairs: Vec<(usize, usize)> = (1..=t)
                .flat_map(|i| (1..=t).filter(move |&j| j != i).map(move |j| (i, j)))
                .collect();
            for &a in &pairs {
                for &b in &pairs {
                    for &c in &pairs {
                        assert_eq!(is_combinatorially_separating(t, a, b, c), exhaustive(t, a, b, c));
                    }
                }
            }
        }
    }
}
