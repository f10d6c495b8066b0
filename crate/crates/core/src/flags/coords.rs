use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{double_ratios, triple_ratios, FlagTuple, TripleIndex, TripleRatios};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::valfield::ValuedScalar;

/// 1-based vertex labels `(i, j, k)` of a triangle, `i < j < k`.
pub type VertexTriple = (usize, usize, usize);

/// A triangulation of the polygon with vertices `1..=t` in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triangulation {
    /// Every diagonal leaves vertex 1.
    Fan,
    /// Explicit diagonals `(i, k)`.
    Edges(Vec<(usize, usize)>),
}

/// An internal edge `(i, k)` with the opposite vertices `j` (between `i`
/// and `k`) and `l` (outside).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Diagonal {
    i: usize,
    k: usize,
    j: usize,
    l: usize,
}

impl Triangulation {
    fn diagonals(&self, t: usize) -> Result<Vec<(usize, usize)>> {
        let edges: Vec<(usize, usize)> = match self {
            Triangulation::Fan => (3..t).map(|k| (1, k)).collect(),
            Triangulation::Edges(e) => e.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect(),
        };
        let bad = |msg: String| Err(Error::InvalidTriangulation(msg));
        if edges.len() + 3 != t {
            return bad(format!("{} diagonals for a {t}-gon", edges.len()));
        }
        for (n, &(i, k)) in edges.iter().enumerate() {
            if i < 1 || k > t || k - i < 2 || (i == 1 && k == t) {
                return bad(format!("({i},{k}) is not a diagonal"));
            }
            for &(i2, k2) in &edges[..n] {
                if (i2, k2) == (i, k) {
                    return bad(format!("repeated diagonal ({i},{k})"));
                }
                if (i < i2 && i2 < k && k < k2) || (i2 < i && i < k2 && k2 < k) {
                    return bad(format!("({i},{k}) crosses ({i2},{k2})"));
                }
            }
        }
        Ok(edges)
    }

    /// Triangles and internal edges with their quadrilaterals.
    fn cells(&self, t: usize) -> Result<(Vec<VertexTriple>, Vec<Diagonal>)> {
        if t < 3 {
            return Err(Error::InvalidTriangulation(format!("polygon with {t} vertices")));
        }
        let diagonals = self.diagonals(t)?;
        let is_edge = |a: usize, b: usize| {
            let (a, b) = (a.min(b), a.max(b));
            b - a == 1 || (a == 1 && b == t) || diagonals.contains(&(a, b))
        };
        let mut triangles = Vec::new();
        for i in 1..=t {
            for j in i + 1..=t {
                for k in j + 1..=t {
                    if is_edge(i, j) && is_edge(j, k) && is_edge(i, k) {
                        triangles.push((i, j, k));
                    }
                }
            }
        }
        if triangles.len() + 2 != t {
            return Err(Error::InvalidTriangulation("edges do not triangulate".into()));
        }
        let edges = diagonals
            .iter()
            .map(|&(i, k)| {
                let mut j = None;
                let mut l = None;
                for &(a, b, c) in &triangles {
                    let vs = [a, b, c];
                    if vs.contains(&i) && vs.contains(&k) {
                        let other = a + b + c - i - k;
                        if i < other && other < k {
                            j = Some(other);
                        } else {
                            l = Some(other);
                        }
                    }
                }
                match (j, l) {
                    (Some(j), Some(l)) => Ok(Diagonal { i, k, j, l }),
                    _ => Err(Error::InvalidTriangulation(format!(
                        "({i},{k}) does not border two triangles"
                    ))),
                }
            })
            .collect::<Result<_>>()?;
        Ok((triangles, edges))
    }
}

/// Triple ratios per triangle and double ratios per internal edge.
///
/// For a triangle `(i, j, k)` the ratios are those of `(F_i, F_j, F_k)`.
/// For a diagonal `(i, k)` with opposite vertices `j` (between) and `l`
/// (outside), the values are `Z_1..Z_{d-1}` of `(F_i, F_l, F_k, F_j)`: the
/// diagonal's flags take the `(E, G)` roles.
#[derive(Clone, Debug, PartialEq)]
pub struct FGCoordinates {
    pub d: usize,
    pub t: usize,
    pub triangles: BTreeMap<VertexTriple, TripleRatios>,
    pub edges: BTreeMap<(usize, usize), Vec<ValuedScalar>>,
}

impl FGCoordinates {
    /// `(d-2)(d-1)/2 (t-2) + (d-1)(t-3)`.
    pub fn expected_count(d: usize, t: usize) -> usize {
        (d - 2) * (d - 1) / 2 * (t - 2) + (d - 1) * (t - 3)
    }

    pub fn count(&self) -> usize {
        self.values().count()
    }

    pub fn values(&self) -> impl Iterator<Item = &ValuedScalar> {
        self.triangles
            .values()
            .flat_map(|m| m.values())
            .chain(self.edges.values().flatten())
    }

    pub fn all_positive(&self) -> bool {
        self.values().all(|x| x.is_positive())
    }

    /// Checks that the keys match the fan triangulation and every value is
    /// nonzero.
    pub fn validate_fan(&self) -> Result<()> {
        let (d, t) = (self.d, self.t);
        if d < 2 || t < 3 {
            return Err(Error::InvalidIndex(format!("d = {d}, t = {t}")));
        }
        let interior = TripleIndex::interior(d);
        for k in 2..t {
            let tri = self
                .triangles
                .get(&(1, k, k + 1))
                .ok_or_else(|| Error::InvalidTriangulation(format!("missing triangle 1,{k},{}", k + 1)))?;
            for idx in &interior {
                match tri.get(idx) {
                    None => {
                        return Err(Error::InvalidIndex(format!(
                            "missing ratio ({idx}) on triangle 1,{k},{}",
                            k + 1
                        )))
                    }
                    Some(x) if x.is_zero() => {
                        return Err(Error::ZeroCoordinate(format!(
                            "triangle 1,{k},{} index ({idx})",
                            k + 1
                        )))
                    }
                    _ => {}
                }
            }
        }
        for k in 3..t {
            let z = self
                .edges
                .get(&(1, k))
                .ok_or_else(|| Error::InvalidTriangulation(format!("missing edge 1,{k}")))?;
            if z.len() != d - 1 {
                return Err(Error::InvalidIndex(format!("edge 1,{k} has {} values", z.len())));
            }
            if let Some(i) = z.iter().position(|x| x.is_zero()) {
                return Err(Error::ZeroCoordinate(format!("edge 1,{k} index {}", i + 1)));
            }
        }
        if self.count() != Self::expected_count(d, t) {
            return Err(Error::InvalidTriangulation("unexpected coordinates".into()));
        }
        Ok(())
    }
}

/// Coordinates of `tuple` for `triangulation`.
pub fn tuple_coordinates(tuple: &FlagTuple, triangulation: &Triangulation) -> Result<FGCoordinates> {
    let (d, t) = (tuple.d(), tuple.t());
    let (triangles, diagonals) = triangulation.cells(t)?;
    if let Some(indices) = tuple.max_span_violation() {
        return Err(Error::MaxSpan { indices });
    }
    let f = |v: usize| tuple.flag(v);
    let triangles = triangles
        .into_iter()
        .map(|(i, j, k)| Ok(((i, j, k), triple_ratios(f(i), f(j), f(k))?)))
        .collect::<Result<_>>()?;
    let edges = diagonals
        .into_iter()
        .map(|Diagonal { i, k, j, l }| Ok(((i, k), double_ratios(f(i), f(l), f(k), f(j))?)))
        .collect::<Result<_>>()?;
    Ok(FGCoordinates {
        d,
        t,
        triangles,
        edges,
    })
}

/// Maximum span plus positivity of every fan coordinate.
pub fn is_positive_tuple(tuple: &FlagTuple) -> bool {
    tuple.t() >= 3
        && tuple_coordinates(tuple, &Triangulation::Fan).is_ok_and(|c| c.all_positive())
}

#[derive(Serialize, Deserialize)]
struct CoordsRepr {
    d: usize,
    t: usize,
    triangles: BTreeMap<String, BTreeMap<String, ValuedScalar>>,
    edges: BTreeMap<String, Vec<ValuedScalar>>,
}

fn parse_labels<const N: usize>(s: &str) -> std::result::Result<[usize; N], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| format!("invalid key {s:?}"))?;
    parts.try_into().map_err(|_| format!("invalid key {s:?}"))
}

impl Serialize for FGCoordinates {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let triangles = self
            .triangles
            .iter()
            .map(|(&(i, j, k), ratios)| {
                let inner = ratios
                    .iter()
                    .map(|(idx, x)| (idx.to_string(), x.clone()))
                    .collect();
                (format!("{i},{j},{k}"), inner)
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|(&(i, k), z)| (format!("{i},{k}"), z.clone()))
            .collect();
        CoordsRepr {
            d: self.d,
            t: self.t,
            triangles,
            edges,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FGCoordinates {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = CoordsRepr::deserialize(deserializer)?;
        let mut triangles = BTreeMap::new();
        for (key, inner) in repr.triangles {
            let [i, j, k] = parse_labels::<3>(&key).map_err(D::Error::custom)?;
            let mut ratios = BTreeMap::new();
            for (idx, x) in inner {
                let idx: TripleIndex = idx.parse().map_err(D::Error::custom)?;
                ratios.insert(idx, x);
            }
            triangles.insert((i, j, k), ratios);
        }
        let mut edges = BTreeMap::new();
        for (key, z) in repr.edges {
            let [i, k] = parse_labels::<2>(&key).map_err(D::Error::custom)?;
            edges.insert((i, k), z);
        }
        Ok(FGCoordinates {
            d: repr.d,
            t: repr.t,
            triangles,
            edges,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_cells() {
        let (tri, edges) = Triangulation::Fan.cells(5).unwrap();
        assert_eq!(tri, vec![(1, 2, 3), (1, 3, 4), (1, 4, 5)]);
        assert_eq!(
            edges,
            vec![
                Diagonal { i: 1, k: 3, j: 2, l: 4 },
                Diagonal { i: 1, k: 4, j: 3, l: 5 }
            ]
        );
    }

    #[test]
    fn explicit_edges_validated() {
        let zigzag = Triangulation::Edges(vec![(2, 5), (2, 4)]);
        let (tri, _) = zigzag.cells(5).unwrap();
        assert_eq!(tri, vec![(1, 2, 5), (2, 3, 4), (2, 4, 5)]);
        assert!(Triangulation::Edges(vec![(1, 3), (2, 4)]).cells(5).is_err());
        assert!(Triangulation::Edges(vec![(1, 2), (1, 3)]).cells(5).is_err());
        assert!(Triangulation::Edges(vec![(1, 3)]).cells(5).is_err());
    }

    #[test]
    fn coordinate_counts() {
        assert_eq!(FGCoordinates::expected_count(3, 3), 1);
        assert_eq!(FGCoordinates::expected_count(2, 3), 0);
        for d in 2..6 {
            assert_eq!(FGCoordinates::expected_count(d, 4), (d - 2) * (d - 1) + (d - 1));
        }
    }
}
