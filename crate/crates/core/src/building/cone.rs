use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::WeylElement;
use crate::rational::{ExtRational, Rational};

/// The polyhedron `{x : x_i - x_j <= c_ij}` in the coordinates of a named
/// marking, kept in min-plus closed form.
///
/// Equality compares the closed bounds (the sets of points), not the
/// marking label.
#[derive(Clone, Debug)]
pub struct DifferenceCone {
    bounds: Vec<Vec<ExtRational>>,
    marking: String,
    empty: bool,
}

fn zero() -> ExtRational {
    ExtRational::Finite(Rational::zero())
}

impl DifferenceCone {
    /// The whole space.
    pub fn full(d: usize, marking: impl Into<String>) -> Self {
        let bounds = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { zero() } else { ExtRational::Infinity })
                    .collect()
            })
            .collect();
        DifferenceCone {
            bounds,
            marking: marking.into(),
            empty: false,
        }
    }

    pub fn empty(d: usize, marking: impl Into<String>) -> Self {
        DifferenceCone {
            bounds: vec![vec![zero(); d]; d],
            marking: marking.into(),
            empty: true,
        }
    }

    /// Closed cone cut out by the constraints `x_i - x_j <= c` given as
    /// `(i, j, c)` with 0-based indices.
    pub fn from_constraints(
        d: usize,
        marking: impl Into<String>,
        constraints: impl IntoIterator<Item = (usize, usize, ExtRational)>,
    ) -> Self {
        let mut cone = DifferenceCone::full(d, marking);
        for (i, j, c) in constraints {
            assert!(i < d && j < d, "constraint index out of range");
            if c < cone.bounds[i][j] {
                cone.bounds[i][j] = c;
            }
        }
        cone.close();
        cone
    }

    /// Closed cone from a full bound matrix.
    pub fn from_bounds(bounds: Vec<Vec<ExtRational>>, marking: impl Into<String>) -> Self {
        let d = bounds.len();
        assert!(bounds.iter().all(|row| row.len() == d), "bounds must be square");
        let mut cone = DifferenceCone {
            bounds,
            marking: marking.into(),
            empty: false,
        };
        cone.close();
        cone
    }

    /// Floyd-Warshall. A negative diagonal entry is a negative cycle and
    /// makes the cone empty.
    fn close(&mut self) {
        let d = self.d();
        if self.empty {
            return;
        }
        for i in 0..d {
            if self.bounds[i][i] > zero() {
                self.bounds[i][i] = zero();
            }
        }
        for k in 0..d {
            for i in 0..d {
                if self.bounds[i][k].is_infinite() {
                    continue;
                }
                for j in 0..d {
                    let via = self.bounds[i][k].add(&self.bounds[k][j]);
                    if via < self.bounds[i][j] {
                        self.bounds[i][j] = via;
                    }
                }
            }
        }
        if (0..d).any(|i| self.bounds[i][i] < zero()) {
            *self = DifferenceCone::empty(d, std::mem::take(&mut self.marking));
        }
    }

    pub fn d(&self) -> usize {
        self.bounds.len()
    }

    pub fn marking(&self) -> &str {
        &self.marking
    }

    pub fn with_marking(mut self, marking: impl Into<String>) -> Self {
        self.marking = marking.into();
        self
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Closed upper bound on `x_i - x_j`.
    pub fn bound(&self, i: usize, j: usize) -> &ExtRational {
        &self.bounds[i][j]
    }

    pub fn bounds(&self) -> &[Vec<ExtRational>] {
        &self.bounds
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        if self.empty || x.len() != self.d() {
            return false;
        }
        (0..self.d()).all(|i| {
            (0..self.d()).all(|j| match &self.bounds[i][j] {
                ExtRational::Finite(c) => &x[i] - &x[j] <= *c,
                ExtRational::Infinity => true,
            })
        })
    }

    pub fn intersect(&self, other: &DifferenceCone) -> DifferenceCone {
        assert_eq!(self.d(), other.d(), "cones of different dimensions");
        if self.empty || other.empty {
            return DifferenceCone::empty(self.d(), self.marking.clone());
        }
        let bounds = self
            .bounds
            .iter()
            .zip(&other.bounds)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.min(y).clone()).collect())
            .collect();
        DifferenceCone::from_bounds(bounds, self.marking.clone())
    }

    pub fn is_subset(&self, other: &DifferenceCone) -> bool {
        self.empty
            || (!other.empty
                && self
                    .bounds
                    .iter()
                    .zip(&other.bounds)
                    .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x <= y)))
    }

    /// The image under `w`, in the coordinates named `marking`.
    pub fn transport(&self, w: &WeylElement, marking: impl Into<String>) -> DifferenceCone {
        let d = self.d();
        assert_eq!(w.d(), d, "Weyl element of a different dimension");
        if self.empty {
            return DifferenceCone::empty(d, marking);
        }
        let (p, tau) = (w.perm(), w.translation());
        let bounds = (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| {
                        self.bounds[p[a]][p[b]].add(&ExtRational::Finite(&tau[a] - &tau[b]))
                    })
                    .collect()
            })
            .collect();
        DifferenceCone::from_bounds(bounds, marking)
    }

    /// Whether all differences `x_i - x_j` are pinned down.
    pub fn is_single_point(&self) -> bool {
        !self.empty
            && (0..self.d()).all(|i| match (self.bounds[i][0].finite(), self.bounds[0][i].finite()) {
                (Some(a), Some(b)) => *a == -b,
                _ => false,
            })
    }

    /// A point of the cone on the slice `sum(x) = 1`. With a single source
    /// at distance 0 from every vertex, `p_i = min(0, min_j c_ij)` satisfies
    /// every closed constraint.
    pub fn interior_point(&self) -> Option<Vec<Rational>> {
        if self.empty {
            return None;
        }
        let d = self.d();
        let p: Vec<Rational> = (0..d)
            .map(|i| {
                self.bounds[i]
                    .iter()
                    .filter_map(|c| c.finite())
                    .fold(Rational::zero(), |m, c| Rational::min(&m, c))
            })
            .collect();
        let shift = &(&Rational::one() - &super::sum(&p)) / &Rational::from_int(d as i64);
        Some(p.iter().map(|v| v + &shift).collect())
    }

    /// The nontrivial constraints `x_i - x_j <= c`, 0-based.
    pub fn constraints(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for (i, row) in self.bounds.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if let (true, Some(c)) = (i != j, c.finite()) {
                    out.push((i, j, c.clone()));
                }
            }
        }
        out
    }
}

impl PartialEq for DifferenceCone {
    fn eq(&self, other: &Self) -> bool {
        self.d() == other.d()
            && self.empty == other.empty
            && (self.empty || self.bounds == other.bounds)
    }
}

impl fmt::Display for DifferenceCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "empty [{}]", self.marking);
        }
        let parts: Vec<String> = self
            .constraints()
            .iter()
            .map(|(i, j, c)| format!("x{} - x{} <= {c}", i + 1, j + 1))
            .collect();
        write!(f, "{{{}}} [{}]", parts.join(", "), self.marking)
    }
}

#[derive(Serialize, Deserialize)]
struct ConeRepr {
    bounds: Vec<Vec<ExtRational>>,
    marking: String,
    #[serde(default)]
    empty: bool,
}

impl Serialize for DifferenceCone {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConeRepr {
            bounds: self.bounds.clone(),
            marking: self.marking.clone(),
            empty: self.empty,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DifferenceCone {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ConeRepr::deserialize(d)?;
        let n = repr.bounds.len();
        if repr.bounds.iter().any(|row| row.len() != n) {
            return Err(serde::de::Error::custom("bounds must be square"));
        }
        if repr.empty {
            return Ok(DifferenceCone::empty(n, repr.marking));
        }
        Ok(DifferenceCone::from_bounds(repr.bounds, repr.marking))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fin(n: i64) -> ExtRational {
        ExtRational::Finite(Rational::from_int(n))
    }

    #[test]
    fn closure_tightens_and_detects_cycles() {
        let c = DifferenceCone::from_constraints(3, "m", [(0, 1, fin(1)), (1, 2, fin(2))]);
        assert_eq!(c.bound(0, 2), &fin(3));
        assert!(c.bound(2, 0).is_infinite());
        let e = DifferenceCone::from_constraints(2, "m", [(0, 1, fin(1)), (1, 0, fin(-2))]);
        assert!(e.is_empty());
        assert_eq!(e, DifferenceCone::empty(2, "other"));
    }

    #[test]
    fn single_point_and_slice() {
        let c = DifferenceCone::from_constraints(3, "m", [(0, 1, fin(0)), (1, 0, fin(0)), (1, 2, fin(1)), (2, 1, fin(-1))]);
        assert!(c.is_single_point());
        let p = c.interior_point().unwrap();
        assert_eq!(super::super::sum(&p), Rational::one());
        assert!(c.contains(&p));
    }

    #[test]
    fn transport_by_swap() {
        let c = DifferenceCone::from_constraints(2, "m", [(0, 1, fin(-1))]);
        let w = WeylElement::new(vec![1, 0], vec![Rational::zero(); 2]).unwrap();
        let t = c.transport(&w, "n");
        assert_eq!(t.bound(1, 0), &fin(-1));
        assert_eq!(t.marking(), "n");
    }

    #[test]
    fn json_round_trip() {
        let c = DifferenceCone::from_constraints(2, "f_EG", [(0, 1, fin(2))]);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"bounds":[["0/1","2/1"],["inf","0/1"]],"marking":"f_EG","empty":false}"#);
        assert_eq!(serde_json::from_str::<DifferenceCone>(&s).unwrap(), c);
    }

    /// Tries every simple cycle.
    fn has_negative_cycle(b: &[Vec<ExtRational>]) -> bool {
        fn walk(b: &[Vec<ExtRational>], path: &mut Vec<usize>, weight: ExtRational) -> bool {
            let (first, last) = (path[0], *path.last().unwrap());
            if weight.add(&b[last][first]) < zero() {
                return true;
            }
            for next in 0..b.len() {
                if !path.contains(&next) {
                    path.push(next);
                    let found = walk(b, path, weight.add(&b[last][next]));
                    path.pop();
                    if found {
                        return true;
                    }
                }
            }
            false
        }
        (0..b.len()).any(|s| walk(b, &mut vec![s], zero()))
    }

    fn arb_bounds(d: usize) -> impl Strategy<Value = Vec<Vec<ExtRational>>> {
        let entry = prop_oneof![
            1 => Just(ExtRational::Infinity),
            3 => (-6i64..8, 1i64..4).prop_map(|(n, q)| ExtRational::Finite(Rational::new(n, q))),
        ];
        proptest::collection::vec(proptest::collection::vec(entry, d), d)
    }

    proptest! {
        #[test]
        fn closure_is_idempotent(b in arb_bounds(4)) {
            let c = DifferenceCone::from_bounds(b, "m");
            if !c.is_empty() {
                let again = DifferenceCone::from_bounds(c.bounds().to_vec(), "m");
                prop_assert_eq!(&again, &c);
                for i in 0..4 {
                    prop_assert_eq!(c.bound(i, i), &zero());
                    for j in 0..4 {
                        for k in 0..4 {
                            prop_assert!(*c.bound(i, k) <= c.bound(i, j).add(c.bound(j, k)));
                        }
                    }
                }
            }
        }

        #[test]
        fn closure_is_order_preserving(a in arb_bounds(3), b in arb_bounds(3)) {
            let lo: Vec<Vec<ExtRational>> = a.iter().zip(&b)
                .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.min(v).clone()).collect())
                .collect();
            let small = DifferenceCone::from_bounds(lo, "m");
            let big = DifferenceCone::from_bounds(a, "m");
            prop_assert!(small.is_subset(&big));
        }

        #[test]
        fn empty_iff_negative_cycle(b in arb_bounds(4)) {
            let c = DifferenceCone::from_bounds(b.clone(), "m");
            prop_assert_eq!(c.is_empty(), has_negative_cycle(&b));
        }

        #[test]
        fn nonempty_cones_contain_their_point(b in arb_bounds(4)) {
            let c = DifferenceCone::from_bounds(b, "m");
            match c.interior_point() {
                Some(p) => prop_assert!(c.contains(&p)),
                None => prop_assert!(c.is_empty()),
            }
        }
    }
}
