//! Complete flags, tuples of flags and their projective invariants.

mod coords;
mod generate;
mod reconstruct;

pub use coords::{
    is_positive_tuple, tuple_coordinates, FGCoordinates, Triangulation, VertexTriple,
};
pub use generate::{
    generate_positive_tuple, sample_coordinates, sample_positive, GenOptions, GeneratedTuple,
};
pub use reconstruct::{reconstruct_triple, reconstruct_tuple};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::valfield::ValuedScalar;

pub type ScalarMatrix = Matrix<ValuedScalar>;

/// A complete flag: level `i` is spanned by the first `i` basis columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Flag {
    basis: ScalarMatrix,
}

impl Flag {
    pub fn new(basis: ScalarMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::NotSquare {
                rows: basis.rows(),
                cols: basis.cols(),
            });
        }
        if basis.determinant()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Flag { basis })
    }

    /// Skips the determinant check for bases known to be invertible.
    pub(crate) fn from_invertible(basis: ScalarMatrix) -> Self {
        debug_assert!(basis.is_square());
        Flag { basis }
    }

    /// The same flag with every basis column rescaled to polynomial entries.
    /// Ratios are unchanged and their determinants stay fraction-free.
    pub(crate) fn cleared(&self) -> Flag {
        Flag {
            basis: self.basis.clear_column_denominators().0,
        }
    }

    /// `e_1, ..., e_d`.
    pub fn standard(d: usize) -> Self {
        Flag {
            basis: Matrix::identity(d),
        }
    }

    /// `e_d, ..., e_1`.
    pub fn reversed_standard(d: usize) -> Self {
        Flag {
            basis: Matrix::from_fn(d, d, |i, j| {
                if i + j == d - 1 {
                    ValuedScalar::one()
                } else {
                    ValuedScalar::zero()
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &ScalarMatrix {
        &self.basis
    }

    /// Basis columns of the `i`-dimensional subspace.
    pub fn subspace(&self, i: usize) -> ScalarMatrix {
        self.basis.leading_columns(i)
    }

    /// Applies a linear map to every subspace.
    pub fn transform(&self, g: &ScalarMatrix) -> Result<Flag> {
        Flag::new(g.mul(&self.basis))
    }

    /// Dual flag in `(F^d)^*`, written in coordinates of the dual basis:
    /// level `i` is the annihilator of level `d - i`.
    ///
    /// If `r_1, ..., r_d` are the rows of the inverse basis, the annihilator
    /// of the first `d - i` columns is spanned by `r_{d-i+1}, ..., r_d`, so
    /// the dual basis lists the rows in reverse order.
    pub fn dual(&self) -> Flag {
        let inv = self
            .basis
            .inverse()
            .expect("flag basis is invertible");
        let d = self.dim();
        Flag {
            basis: Matrix::from_fn(d, d, |i, j| inv.get(d - 1 - j, i).clone()),
        }
    }

    /// Equality of flags, independent of the chosen bases.
    pub fn same_flag(&self, other: &Flag) -> bool {
        self.dim() == other.dim()
            && (1..self.dim()).all(|i| {
                Matrix::hstack(&[&self.subspace(i), &other.subspace(i)]).rank() == i
            })
    }
}

impl Serialize for Flag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.basis.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Flag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let basis = ScalarMatrix::deserialize(deserializer)?;
        Flag::new(basis).map_err(serde::de::Error::custom)
    }
}

/// An interior point `(a, b, c)` of the discrete triangle, `a + b + c = d`
/// with all entries positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripleIndex {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl TripleIndex {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        TripleIndex { a, b, c }
    }

    pub fn d(&self) -> usize {
        self.a + self.b + self.c
    }

    pub fn is_interior(&self) -> bool {
        self.a > 0 && self.b > 0 && self.c > 0
    }

    /// All interior points for dimension `d`, in lexicographic order.
    pub fn interior(d: usize) -> Vec<TripleIndex> {
        let mut out = Vec::new();
        for a in 1..d {
            for b in 1..d - a {
                let c = d - a - b;
                if c > 0 {
                    out.push(TripleIndex { a, b, c });
                }
            }
        }
        out
    }
}

impl fmt::Display for TripleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

impl std::str::FromStr for TripleIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse(format!("invalid triple index {s:?}")))?;
        match parts[..] {
            [a, b, c] => Ok(TripleIndex { a, b, c }),
            _ => Err(Error::Parse(format!("invalid triple index {s:?}"))),
        }
    }
}

impl Serialize for TripleIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b, self.c].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TripleIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[usize; 3]>::deserialize(deserializer)?;
        Ok(TripleIndex { a, b, c })
    }
}

/// Triple ratios of one triangle keyed by interior index.
pub type TripleRatios = BTreeMap<TripleIndex, ValuedScalar>;

/// An ordered tuple of flags in a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagTuple {
    flags: Vec<Flag>,
}

impl FlagTuple {
    pub fn new(flags: Vec<Flag>) -> Result<Self> {
        let Some(first) = flags.first() else {
            return Err(Error::DimensionMismatch("empty flag tuple".into()));
        };
        if flags.len() < 2 {
            return Err(Error::DimensionMismatch("a tuple needs at least two flags".into()));
        }
        let d = first.dim();
        if flags.iter().any(|f| f.dim() != d) {
            return Err(Error::DimensionMismatch("flags of different dimensions".into()));
        }
        Ok(FlagTuple { flags })
    }

    pub fn d(&self) -> usize {
        self.flags[0].dim()
    }

    pub fn t(&self) -> usize {
        self.flags.len()
    }

    pub fn flags(&self) -> &[Flag] {
        &self.flags
    }

    /// Flag at a 1-based vertex label.
    pub fn flag(&self, vertex: usize) -> &Flag {
        &self.flags[vertex - 1]
    }

    /// Applies the same linear map to every flag.
    pub fn transform(&self, g: &ScalarMatrix) -> Result<FlagTuple> {
        FlagTuple::new(
            self.flags
                .iter()
                .map(|f| f.transform(g))
                .collect::<Result<_>>()?,
        )
    }

    /// First composition `(a_1, ..., a_t)` of `d` whose subspaces fail to
    /// span, if any.
    ///
    /// Only compositions summing to exactly `d` are checked: a tuple summing
    /// to more contains one summing to `d`, and a tuple summing to less
    /// extends to one summing to `d`, so the exact-sum case decides both.
    pub fn max_span_violation(&self) -> Option<Vec<usize>> {
        let d = self.d();
        compositions(d, self.t()).into_iter().find(|parts| {
            let blocks: Vec<ScalarMatrix> = parts
                .iter()
                .zip(&self.flags)
                .map(|(&k, f)| f.subspace(k))
                .collect();
            let refs: Vec<&ScalarMatrix> = blocks.iter().collect();
            Matrix::hstack(&refs)
                .determinant()
                .expect("blocks have d columns")
                .is_zero()
        })
    }

    pub fn max_span_check(&self) -> bool {
        self.max_span_violation().is_none()
    }
}

/// All ways to write `n` as an ordered sum of `parts` nonnegative integers.
pub fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=n {
            cur.push(k);
            rec(n - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(n, parts, &mut Vec::new(), &mut out);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct FlagTupleRepr {
    d: usize,
    t: usize,
    flags: Vec<Flag>,
}

impl Serialize for FlagTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FlagTupleRepr {
            d: self.d(),
            t: self.t(),
            flags: self.flags.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FlagTuple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FlagTupleRepr::deserialize(deserializer)?;
        if repr.flags.len() != repr.t {
            return Err(serde::de::Error::custom("t does not match the number of flags"));
        }
        let tuple = FlagTuple::new(repr.flags).map_err(serde::de::Error::custom)?;
        if tuple.d() != repr.d {
            return Err(serde::de::Error::custom("d does not match the flag dimension"));
        }
        Ok(tuple)
    }
}

/// `det[E^(k) | F^(l) | G^(m)]`, reporting the index tuple when it vanishes.
fn wedge3(e: &Flag, f: &Flag, g: &Flag, k: usize, l: usize, m: usize) -> Result<ValuedScalar> {
    let det = Matrix::hstack(&[&e.subspace(k), &f.subspace(l), &g.subspace(m)]).determinant()?;
    if det.is_zero() {
        return Err(Error::MaxSpan {
            indices: vec![k, l, m],
        });
    }
    Ok(det)
}

fn check_triple_dims(flags: &[&Flag]) -> Result<usize> {
    let d = flags[0].dim();
    if flags.iter().any(|f| f.dim() != d) {
        return Err(Error::DimensionMismatch("flags of different dimensions".into()));
    }
    Ok(d)
}

/// Memoized `det[E^(k) | F^(l) | G^(m)]`; neighbouring ratios share most
/// of their determinants.
struct Wedges {
    flags: [Flag; 3],
    memo: BTreeMap<(usize, usize, usize), ValuedScalar>,
}

impl Wedges {
    fn new(e: &Flag, f: &Flag, g: &Flag) -> Self {
        Wedges {
            flags: [e.cleared(), f.cleared(), g.cleared()],
            memo: BTreeMap::new(),
        }
    }

    fn get(&mut self, k: usize, l: usize, m: usize) -> Result<ValuedScalar> {
        if let Some(x) = self.memo.get(&(k, l, m)) {
            return Ok(x.clone());
        }
        let [e, f, g] = &self.flags;
        let x = wedge3(e, f, g, k, l, m)?;
        self.memo.insert((k, l, m), x.clone());
        Ok(x)
    }

    fn ratio(&mut self, idx: TripleIndex) -> Result<ValuedScalar> {
        let TripleIndex { a, b, c } = idx;
        let num = self
            .get(a - 1, b, c + 1)?
            .times(&self.get(a, b + 1, c - 1)?)
            .times(&self.get(a + 1, b - 1, c)?);
        let den = self
            .get(a + 1, b, c - 1)?
            .times(&self.get(a, b - 1, c + 1)?)
            .times(&self.get(a - 1, b + 1, c)?);
        num.div(&den)
    }
}

/// The `(a, b, c)` triple ratio of `(E, F, G)`.
pub fn triple_ratio(e: &Flag, f: &Flag, g: &Flag, idx: TripleIndex) -> Result<ValuedScalar> {
    let d = check_triple_dims(&[e, f, g])?;
    if !idx.is_interior() || idx.d() != d {
        return Err(Error::InvalidIndex(format!("({idx}) is not interior for d = {d}")));
    }
    Wedges::new(e, f, g).ratio(idx)
}

/// All interior triple ratios of `(E, F, G)`.
pub fn triple_ratios(e: &Flag, f: &Flag, g: &Flag) -> Result<TripleRatios> {
    check_triple_dims(&[e, f, g])?;
    let mut wedges = Wedges::new(e, f, g);
    TripleIndex::interior(e.dim())
        .into_iter()
        .map(|idx| Ok((idx, wedges.ratio(idx)?)))
        .collect()
}

/// The `i`-th double ratio of `(E, F, G, H)`, `0 < i < d`.
pub fn double_ratio(e: &Flag, f: &Flag, g: &Flag, h: &Flag, i: usize) -> Result<ValuedScalar> {
    let d = check_triple_dims(&[e, f, g, h])?;
    if i == 0 || i >= d {
        return Err(Error::InvalidIndex(format!("double ratio index {i} for d = {d}")));
    }
    let (e, f, g, h) = (&e.cleared(), &f.cleared(), &g.cleared(), &h.cleared());
    let n1 = wedge3(e, g, f, i, d - i - 1, 1)?;
    let d1 = wedge3(e, g, h, i, d - i - 1, 1)?;
    let n2 = wedge3(e, g, h, i - 1, d - i, 1)?;
    let d2 = wedge3(e, g, f, i - 1, d - i, 1)?;
    Ok(n1.times(&n2).div(&d1.times(&d2))?.negate())
}

/// `Z_1, ..., Z_{d-1}` of `(E, F, G, H)`.
pub fn double_ratios(e: &Flag, f: &Flag, g: &Flag, h: &Flag) -> Result<Vec<ValuedScalar>> {
    (1..e.dim()).map(|i| double_ratio(e, f, g, h, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn vs(n: i64) -> ValuedScalar {
        ValuedScalar::from_int(n)
    }

    fn flag(rows: &[&[i64]]) -> Flag {
        Flag::new(
            Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| vs(x)).collect()).collect())
                .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn standard_pair_spans() {
        let pair = FlagTuple::new(vec![Flag::standard(3), Flag::reversed_standard(3)]).unwrap();
        assert!(pair.max_span_check());
        let dup = FlagTuple::new(vec![Flag::standard(3), Flag::standard(3)]).unwrap();
        assert_eq!(dup.max_span_violation(), Some(vec![1, 2]));
    }

    #[test]
    fn dual_of_standard_is_reversed() {
        let d = 4;
        assert_eq!(Flag::standard(d).dual(), Flag::reversed_standard(d));
        let f = flag(&[&[1, 2, 0], &[0, 1, 3], &[1, 0, 1]]);
        assert!(f.dual().dual().same_flag(&f));
    }

    #[test]
    fn dual_levels_annihilate() {
        let f = flag(&[&[2, 1, 1], &[1, 3, 0], &[0, 1, 1]]);
        let dual = f.dual();
        for i in 1..3 {
            let ann = dual.subspace(i).transpose().mul(&f.subspace(3 - i));
            assert!(ann.entries().iter().all(|x| x.is_zero()));
            assert_eq!(dual.subspace(i).rank(), i);
        }
    }

    #[test]
    fn shearing_frame_double_ratios() {
        // E standard, G reversed, F^(1) = (1,1,1), H^(1) = (h_1, h_2, h_3).
        let h = [2, -3, 5];
        let e = Flag::standard(3);
        let g = Flag::reversed_standard(3);
        let f = flag(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1]]);
        let hf = flag(&[&[h[0], 0, 1], &[h[1], 1, 0], &[h[2], 0, 0]]);
        for i in 1..3 {
            let z = double_ratio(&e, &f, &g, &hf, i).unwrap();
            let expect = ValuedScalar::constant(Rational::new(-h[i - 1], h[i]));
            assert_eq!(z, expect);
        }
    }

    #[test]
    fn d2_double_ratio_direct() {
        let e = flag(&[&[1, 0], &[2, 1]]);
        let f = flag(&[&[3, 1], &[1, 0]]);
        let g = flag(&[&[-1, 1], &[4, 0]]);
        let h = flag(&[&[5, 0], &[-2, 1]]);
        let det2 = |x: &Flag, y: &Flag| {
            let (a, b) = (x.basis().col(0), y.basis().col(0));
            a[0].times(&b[1]).minus(&a[1].times(&b[0]))
        };
        let direct = det2(&e, &f)
            .times(&det2(&g, &h))
            .div(&det2(&e, &h).times(&det2(&g, &f)))
            .unwrap()
            .negate();
        assert_eq!(double_ratio(&e, &f, &g, &h, 1).unwrap(), direct);
    }

    #[test]
    fn degenerate_triple_names_indices() {
        let e = Flag::standard(3);
        let err = triple_ratio(&e, &e, &Flag::reversed_standard(3), TripleIndex::new(1, 1, 1));
        assert!(matches!(err, Err(Error::MaxSpan { .. })));
    }

    #[test]
    fn composition_count() {
        assert_eq!(compositions(4, 3).len(), 15);
        assert!(compositions(3, 2).iter().all(|c| c.iter().sum::<usize>() == 3));
    }
}
