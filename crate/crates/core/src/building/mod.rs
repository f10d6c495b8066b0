//! Markings, apartments and their intersections in the norm model of the
//! building.
//!
//! A marking is a basis `e_1, ..., e_d` of the dual space `V = (F^d)^*`,
//! stored as the columns of a matrix. The point `x` of the affine slice
//! `sum(x) = 1` is sent to the norm adapted to the basis with
//! `eta(e_j) = exp(-x_j)`. Everything here works on the logarithmic scale,
//! so points, bounds and norm values are exact rationals.

mod assignment;
mod cone;
mod intersection;
mod theorems;

pub use assignment::{brute_force_assignment, tropical_assignment, Assignment};
pub use cone::DifferenceCone;
pub use intersection::{
    change_of_basis, tropical_change_of_basis, TropicalChange, consecutive_cone, full_cone, intersect_apartments, intersection_transport,
    is_point_in_apartment, reduced_cone, NormSplitTest,
};
pub use theorems::{
    check_monotonicity, cone_c1, cone_c2, is_combinatorially_separating, ratio_valuations,
    shearing_formula, shearing_translation, MonotonicityReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::flags::{Flag, ScalarMatrix};
use crate::linalg::Matrix;
use crate::rational::{ExtRational, Rational};
use crate::snakes::{snake_basis, Snake, SnakeBasis};
use crate::valfield::ValuedScalar;

/// A basis of `V` given by the columns of `basis`, defined up to one global
/// nonzero scalar. `name` labels the coordinates of cones expressed in it.
#[derive(Clone, Debug, Serialize)]
pub struct Marking {
    pub name: String,
    basis: ScalarMatrix,
}

impl Marking {
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
        Ok(Marking {
            name: "m".into(),
            basis,
        })
    }

    /// The marking whose basis vectors are the rows of `rows`.
    pub fn from_rows(rows: &ScalarMatrix) -> Result<Self> {
        Marking::new(rows.transpose())
    }

    /// The marking given by a snake basis of a triple.
    pub fn from_snake_basis(basis: &SnakeBasis) -> Result<Self> {
        Marking::from_rows(&basis.vectors)
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn basis(&self) -> &ScalarMatrix {
        &self.basis
    }

    pub fn d(&self) -> usize {
        self.basis.rows()
    }

    /// The same apartment with the basis vectors reordered: column `j` of
    /// the result is column `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Marking {
        Marking {
            name: self.name.clone(),
            basis: self.basis.select_columns(perm),
        }
    }

    /// Multiplies basis vector `j` by `y[j]`.
    pub fn rescaled(&self, y: &[ValuedScalar]) -> Result<Marking> {
        if y.iter().any(|s| s.is_zero()) {
            return Err(Error::DivisionByZero);
        }
        let mut cols = self.basis.columns();
        for (col, s) in cols.iter_mut().zip(y) {
            for x in col.iter_mut() {
                *x = x.times(s);
            }
        }
        Ok(Marking {
            name: self.name.clone(),
            basis: Matrix::from_columns(self.d(), &cols),
        })
    }

    pub fn apartment(&self) -> Apartment {
        Apartment {
            lines: self.basis.columns().iter().map(|c| normalize_line(c)).collect(),
        }
    }
}

impl<'de> Deserialize<'de> for Marking {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            name: String,
            basis: ScalarMatrix,
        }
        let repr = Repr::deserialize(d)?;
        Marking::new(repr.basis)
            .map(|m| m.named(repr.name))
            .map_err(serde::de::Error::custom)
    }
}

impl PartialEq for Marking {
    fn eq(&self, other: &Self) -> bool {
        if self.basis.rows() != other.basis.rows() || self.basis.cols() != other.basis.cols() {
            return false;
        }
        let a = self.basis.entries();
        let b = other.basis.entries();
        let Some(k) = a.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let Some(s) = b[k].divide(&a[k]) else {
            return false;
        };
        !s.is_zero() && a.iter().zip(b).all(|(x, y)| x.times(&s) == *y)
    }
}

/// Scales a nonzero vector so its first nonzero entry is 1.
fn normalize_line(v: &[ValuedScalar]) -> Vec<ValuedScalar> {
    let lead = v
        .iter()
        .find(|x| !x.is_zero())
        .and_then(|x| x.inverse())
        .expect("basis vectors are nonzero");
    v.iter().map(|x| x.times(&lead)).collect()
}

/// The line decomposition of a marking; equal apartments have the same
/// lines in any order.
#[derive(Clone, Debug)]
pub struct Apartment {
    lines: Vec<Vec<ValuedScalar>>,
}

impl Apartment {
    pub fn lines(&self) -> &[Vec<ValuedScalar>] {
        &self.lines
    }
}

impl PartialEq for Apartment {
    fn eq(&self, other: &Self) -> bool {
        self.lines.len() == other.lines.len()
            && self.lines.iter().all(|l| other.lines.contains(l))
            && other.lines.iter().all(|l| self.lines.contains(l))
    }
}

/// An element of the affine Weyl group acting on points by
/// `w(x)_j = x_{perm[j]} + translation[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylElement {
    perm: Vec<usize>,
    translation: Vec<Rational>,
}

impl WeylElement {
    pub fn new(perm: Vec<usize>, translation: Vec<Rational>) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidIndex(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if translation.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "translation of length {} for d = {d}",
                translation.len()
            )));
        }
        if !sum(&translation).is_zero() {
            return Err(Error::Precondition("translation does not sum to 0".into()));
        }
        Ok(WeylElement { perm, translation })
    }

    pub fn identity(d: usize) -> Self {
        WeylElement {
            perm: (0..d).collect(),
            translation: vec![Rational::zero(); d],
        }
    }

    /// The pure translation by `z`, shifted to sum 0.
    pub fn translation_by(z: &[Rational]) -> Self {
        WeylElement {
            perm: (0..z.len()).collect(),
            translation: centered(z),
        }
    }

    /// The order-reversing permutation.
    pub fn longest(d: usize) -> Self {
        WeylElement {
            perm: (0..d).rev().collect(),
            translation: vec![Rational::zero(); d],
        }
    }

    pub fn d(&self) -> usize {
        self.perm.len()
    }

    /// 0-based permutation.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }

    pub fn is_identity(&self) -> bool {
        *self == WeylElement::identity(self.d())
    }

    pub fn is_translation(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.perm
            .iter()
            .zip(&self.translation)
            .map(|(&p, t)| &x[p] + t)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct WeylRepr {
    perm: Vec<usize>,
    translation: Vec<Rational>,
}

impl Serialize for WeylElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeylRepr {
            perm: self.perm.iter().map(|p| p + 1).collect(),
            translation: self.translation.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = WeylRepr::deserialize(d)?;
        let perm = repr
            .perm
            .iter()
            .map(|&p| p.checked_sub(1).ok_or_else(|| serde::de::Error::custom("perm is 1-based")))
            .collect::<std::result::Result<_, _>>()?;
        WeylElement::new(perm, repr.translation).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn sum(x: &[Rational]) -> Rational {
    x.iter().fold(Rational::zero(), |acc, v| &acc + v)
}

/// `z` minus its mean.
pub(crate) fn centered(z: &[Rational]) -> Vec<Rational> {
    let mean = &sum(z) / &Rational::from_int(z.len() as i64);
    z.iter().map(|v| v - &mean).collect()
}

fn check_slice(x: &[Rational]) -> Result<()> {
    if sum(x) != Rational::one() {
        return Err(Error::OffSlice);
    }
    Ok(())
}

/// The norm `f_m(x)`, returned as the exponents `-x_j` with
/// `eta(e_j) = exp(-x_j)`.
pub fn marking_point(m: &Marking, x: &[Rational]) -> Result<Vec<Rational>> {
    if x.len() != m.d() {
        return Err(Error::DimensionMismatch(format!("point of length {} for d = {}", x.len(), m.d())));
    }
    check_slice(x)?;
    Ok(x.iter().map(|v| -v).collect())
}

/// `-log eta(v)` for the norm `eta = f_m(x)`: `min_j (v(c_j) + x_j)` where
/// `v = sum_j c_j e_j`.
pub fn norm_exponent(m: &Marking, x: &[Rational], v: &[ValuedScalar]) -> Result<ExtRational> {
    let c = m.basis.solve(v)?;
    Ok(c.iter()
        .zip(x)
        .map(|(c, x)| c.valuation().add(&ExtRational::Finite(x.clone())))
        .min()
        .unwrap_or(ExtRational::Infinity))
}

/// The Weyl element `w` with `f_{m1}(x) = f_{m2}(w(x))`.
///
/// With `m2`'s vectors written as `e'_j = y_j e_{p(j)}`, the norm `f_{m1}(x)`
/// gives `e'_j` the exponent `x_{p(j)} + v(y_j)`.
pub fn compare_markings(m1: &Marking, m2: &Marking) -> Result<WeylElement> {
    let g = tropical_change_of_basis(m1, m2)?;
    let d = m1.d();
    let mut perm = Vec::with_capacity(d);
    let mut shift = Vec::with_capacity(d);
    for j in 0..d {
        let mut nonzero = (0..d).filter_map(|i| g.entries[i][j].finite().map(|v| (i, v)));
        let (Some((i, v)), None) = (nonzero.next(), nonzero.next()) else {
            return Err(Error::DifferentApartments);
        };
        perm.push(i);
        shift.push(v.clone());
    }
    WeylElement::new(perm, centered(&shift)).map_err(|_| Error::DifferentApartments)
}

/// The marking `f_EG` given by the bottom snake basis of `(E, F, G)`.
pub fn snake_marking(e: &Flag, f: &Flag, g: &Flag) -> Result<Marking> {
    let basis = snake_basis(e, f, g, &Snake::bottom(e.dim()), &ValuedScalar::one())?;
    Marking::from_snake_basis(&basis)
}

/// The marking of `A_{EG}` with basis vectors spanning the lines
/// `(E^(d-k) + G^(k-1))^perp`, `k = 1..d`.
///
/// Each vector is the complementary covector of polynomial bases of the two
/// subspaces, so its entries are polynomials whenever the flags are.
pub fn flag_apartment(e: &Flag, g: &Flag) -> Result<Marking> {
    let d = e.dim();
    if g.dim() != d {
        return Err(Error::DimensionMismatch("flags of different dimensions".into()));
    }
    let (eb, _) = e.basis().clear_column_denominators();
    let (gb, _) = g.basis().clear_column_denominators();
    let mut cols = Vec::with_capacity(d);
    for k in 1..=d {
        let span = Matrix::hstack(&[&eb.leading_columns(d - k), &gb.leading_columns(k - 1)]);
        let u = span.complementary_covector()?;
        if u.iter().all(|x| x.is_zero()) {
            return Err(Error::MaxSpan {
                indices: vec![d - k, k - 1],
            });
        }
        cols.push(u);
    }
    Marking::new(Matrix::from_columns(d, &cols)).map_err(|_| Error::MaxSpan { indices: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::generate_positive_tuple;
    use crate::flags::GenOptions;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn sample_marking() -> Marking {
        let t = ValuedScalar::t();
        let rows = vec![
            vec![ValuedScalar::one(), t.clone(), ValuedScalar::from_int(2)],
            vec![ValuedScalar::zero(), ValuedScalar::one(), t.clone()],
            vec![t.times(&t), ValuedScalar::from_int(-1), ValuedScalar::one()],
        ];
        Marking::new(Matrix::from_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn barycenter_has_equal_weights() {
        let m = sample_marking();
        let x = vec![r(1, 3); 3];
        assert_eq!(marking_point(&m, &x).unwrap(), vec![r(-1, 3); 3]);
        assert_eq!(marking_point(&m, &[r(1, 1), r(1, 1), r(0, 1)]), Err(Error::OffSlice));
    }

    #[test]
    fn markings_equal_up_to_scalar() {
        let m = sample_marking();
        let scaled = m.rescaled(&vec![ValuedScalar::t(); 3]).unwrap();
        assert_eq!(m, scaled);
        assert_ne!(m, m.permuted(&[1, 0, 2]));
        assert_eq!(m.apartment(), m.permuted(&[2, 0, 1]).apartment());
    }

    #[test]
    fn compare_identity_swap_and_scale() {
        let m = sample_marking();
        assert!(compare_markings(&m, &m).unwrap().is_identity());
        let w = compare_markings(&m, &m.permuted(&[1, 0, 2])).unwrap();
        assert_eq!(w.perm(), &[1, 0, 2]);
        assert!(w.translation().iter().all(Rational::is_zero));
        // Scaling e_2 by t adds v(t) = -1 to the second exponent, centered.
        let mut y = vec![ValuedScalar::one(); 3];
        y[1] = ValuedScalar::t();
        let w = compare_markings(&m, &m.rescaled(&y).unwrap()).unwrap();
        assert!(w.is_translation());
        assert_eq!(w.translation(), &[r(1, 3), r(-2, 3), r(1, 3)]);
    }

    #[test]
    fn compare_markings_matches_norms() {
        let m = sample_marking();
        let y = vec![
            ValuedScalar::monomial(r(1, 2), r(3, 1)),
            ValuedScalar::from_int(-2),
            ValuedScalar::monomial(r(-2, 1), r(1, 1)),
        ];
        let m2 = m.permuted(&[2, 0, 1]).rescaled(&y).unwrap();
        let w = compare_markings(&m, &m2).unwrap();
        let x = vec![r(1, 2), r(-1, 4), r(3, 4)];
        let x2 = w.apply(&x);
        assert_eq!(sum(&x2), Rational::one());
        // f_m(x) evaluated on the basis of m2 equals f_{m2}(x2) there, up to
        // one common shift.
        let shifts: Vec<Rational> = (0..3)
            .map(|j| {
                let e = norm_exponent(&m, &x, &m2.basis().col(j)).unwrap();
                e.finite().unwrap() - &x2[j]
            })
            .collect();
        assert!(shifts.iter().all(|s| *s == shifts[0]));
    }

    #[test]
    fn different_apartments_rejected() {
        let m = sample_marking();
        let other = Marking::new(Matrix::identity(3)).unwrap();
        assert_eq!(compare_markings(&m, &other), Err(Error::DifferentApartments));
    }

    #[test]
    fn standard_pair_gives_dual_standard_lines() {
        let m = flag_apartment(&Flag::standard(3), &Flag::reversed_standard(3)).unwrap();
        let expect: Matrix<ValuedScalar> = Matrix::from_fn(3, 3, |i, j| {
            if i + j == 2 {
                ValuedScalar::one()
            } else {
                ValuedScalar::zero()
            }
        });
        assert_eq!(m.apartment(), Marking::new(expect).unwrap().apartment());
        // Line k is spanned by the dual vector of e_{d-k+1}.
        for k in 0..3 {
            assert!(!m.basis().get(2 - k, k).is_zero());
        }
    }

    #[test]
    fn swapped_pair_differs_by_longest_element() {
        let g = generate_positive_tuple(4, 3, 5, &GenOptions::default()).unwrap();
        let f = g.tuple.flags();
        let a = flag_apartment(&f[0], &f[2]).unwrap();
        let b = flag_apartment(&f[2], &f[0]).unwrap();
        assert_eq!(a.apartment(), b.apartment());
        let w = compare_markings(&a, &b).unwrap();
        assert_eq!(w.perm(), WeylElement::longest(4).perm());
    }

    #[test]
    fn flag_apartment_lines_annihilate() {
        let g = generate_positive_tuple(3, 3, 2, &GenOptions::default()).unwrap();
        let f = g.tuple.flags();
        let m = flag_apartment(&f[1], &f[2]).unwrap();
        for k in 1..=3 {
            let line = Matrix::from_columns(3, &[m.basis().col(k - 1)]).transpose();
            let span = Matrix::hstack(&[&f[1].subspace(3 - k), &f[2].subspace(k - 1)]);
            assert!(line.mul(&span).entries().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn weyl_json() {
        let w = WeylElement::new(vec![1, 0], vec![r(1, 2), r(-1, 2)]).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"perm":[2,1],"translation":["1/2","-1/2"]}"#);
        assert_eq!(serde_json::from_str::<WeylElement>(&s).unwrap(), w);
        assert!(WeylElement::new(vec![0, 1], vec![r(1, 1), r(0, 1)]).is_err());
    }
}
