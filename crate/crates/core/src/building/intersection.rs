//! Intersections of two apartments.
//!
//! Write `g` for the change of basis from `m1` to `m2`, so that
//! `e'_j = sum_i g_ij e_i`. A norm adapted to both bases satisfies
//! `v(det g) = min_sigma sum_j v(g_{sigma(j) j})`, and for a minimizing
//! `sigma` it gives `e'_j` the exponent of `g_{sigma(j) j} e_{sigma(j)}`.
//! The ultrametric inequality then bounds `x_{sigma(j)} - x_{sigma(i)}` by
//! `v(g_{sigma(i) j}) - v(g_{sigma(j) j})`.

use super::cone::DifferenceCone;
use super::{centered, check_slice, tropical_assignment, Marking, WeylElement};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::flags::ScalarMatrix;
use crate::rational::{ExtRational, Rational};
use crate::valfield::ValuedScalar;

/// `g` with `m1.basis() * g = m2.basis()`.
pub fn change_of_basis(m1: &Marking, m2: &Marking) -> Result<ScalarMatrix> {
    if m1.d() != m2.d() {
        return Err(Error::DimensionMismatch(format!("markings of size {} and {}", m1.d(), m2.d())));
    }
    Ok(m1.basis().inverse()?.mul(m2.basis()))
}

/// Valuations of the entries and the determinant of `B1^{-1} B2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TropicalChange {
    pub entries: Vec<Vec<ExtRational>>,
    pub det: ExtRational,
}

/// [`TropicalChange`] computed without fractions: both bases get their
/// column denominators cleared, `B1` is inverted fraction-free, and the
/// scalings are undone on the valuations.
///
/// With `b = B D` and `(c, c b1^{-1})` from the inversion,
/// `v(g_ij) = v(D1_i) + v((c b1^{-1} b2)_ij) - v(c) - v(D2_j)`.
pub fn tropical_change_of_basis(m1: &Marking, m2: &Marking) -> Result<TropicalChange> {
    if m1.d() != m2.d() {
        return Err(Error::DimensionMismatch(format!("markings of size {} and {}", m1.d(), m2.d())));
    }
    let val = |x: &ValuedScalar| x.val().ok_or(Error::Singular);
    let (b1, d1) = m1.basis().clear_column_denominators();
    let (b2, d2) = m2.basis().clear_column_denominators();
    let s1 = d1.iter().map(val).collect::<Result<Vec<_>>>()?;
    let s2 = d2.iter().map(val).collect::<Result<Vec<_>>>()?;
    let (c, scaled_inv) = b1.scaled_inverse()?;
    let vc = val(&c)?;
    let h = scaled_inv.mul(&b2);
    let d = m1.d();
    let entries = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| h.get(i, j).valuation().add(&ExtRational::Finite(&(&s1[i] - &vc) - &s2[j])))
                .collect()
        })
        .collect();
    let vdet2 = val(&b2.determinant()?)?;
    let det = &(&(&vdet2 - &super::sum(&s2)) - &vc) + &super::sum(&s1);
    Ok(TropicalChange {
        entries,
        det: ExtRational::Finite(det),
    })
}

fn valuations(g: &ScalarMatrix) -> Vec<Vec<ExtRational>> {
    (0..g.rows())
        .map(|i| (0..g.cols()).map(|j| g.get(i, j).valuation()).collect())
        .collect()
}

/// The constraints `x_{s(j)} - x_{s(i)} <= v(g_{s(i) j}) - v(g_{s(j) j})`
/// for all `i != j`.
fn pairwise_cone(v: &[Vec<ExtRational>], sigma: &[usize], marking: &str) -> Result<DifferenceCone> {
    let d = v.len();
    let mut constraints = Vec::with_capacity(d * d);
    for j in 0..d {
        let diag = v[sigma[j]][j]
            .finite()
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("zero pivot in column {}", j + 1)))?;
        for i in 0..d {
            if i != j {
                let c = v[sigma[i]][j].add(&ExtRational::Finite(-diag.clone()));
                constraints.push((sigma[j], sigma[i], c));
            }
        }
    }
    Ok(DifferenceCone::from_constraints(d, marking, constraints))
}

/// The set of `x` with `f_{m1}(x)` in the apartment of `m2`, in the
/// coordinates of `m1`. Empty when the tropical assignment of `v(g)`
/// misses `v(det g)`.
pub fn intersect_apartments(m1: &Marking, m2: &Marking) -> Result<DifferenceCone> {
    let g = tropical_change_of_basis(m1, m2)?;
    match aligned_assignment(&g)? {
        Some(sigma) => pairwise_cone(&g.entries, &sigma, &m1.name),
        None => Ok(DifferenceCone::empty(m1.d(), m1.name.clone())),
    }
}

/// The optimal assignment of `v(g)`, or `None` when its value misses
/// `v(det g)`.
fn aligned_assignment(g: &TropicalChange) -> Result<Option<Vec<usize>>> {
    let assignment = tropical_assignment(&g.entries)?;
    Ok((g.det == ExtRational::Finite(assignment.value)).then_some(assignment.perm))
}

/// The Weyl element carrying `m1`-coordinates of points in the intersection
/// to `m2`-coordinates, or `None` when the assignment test already rules
/// the intersection out.
///
/// On the intersection, `e'_j` has the norm of `g_{s(j) j} e_{s(j)}`, so
/// the element is the one relating `m1` to its permuted and rescaled copy.
pub fn intersection_transport(m1: &Marking, m2: &Marking) -> Result<Option<WeylElement>> {
    let g = tropical_change_of_basis(m1, m2)?;
    let Some(sigma) = aligned_assignment(&g)? else {
        return Ok(None);
    };
    let shift: Vec<Rational> = (0..m1.d())
        .map(|j| g.entries[sigma[j]][j].finite().cloned().expect("assigned entries are finite"))
        .collect();
    WeylElement::new(sigma, centered(&shift)).map(Some)
}

/// Pointwise test: whether `f_{m1}(x)` is adapted to `m2`.
///
/// With `w_j = min_i (v(g_ij) + x_i)` the exponent of `e'_j`, the norm is
/// split by `m2` exactly when `sum_j w_j = v(det g) + sum_i x_i`.
pub fn is_point_in_apartment(m1: &Marking, x: &[Rational], m2: &Marking) -> Result<bool> {
    NormSplitTest::new(m1, m2)?.contains(x)
}

/// [`is_point_in_apartment`] for many points of one pair of markings.
#[derive(Clone, Debug)]
pub struct NormSplitTest {
    g: TropicalChange,
}

impl NormSplitTest {
    pub fn new(m1: &Marking, m2: &Marking) -> Result<Self> {
        Ok(NormSplitTest {
            g: tropical_change_of_basis(m1, m2)?,
        })
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        let d = self.g.entries.len();
        if x.len() != d {
            return Err(Error::DimensionMismatch(format!("point of length {} for d = {d}", x.len())));
        }
        check_slice(x)?;
        let mut total = ExtRational::Finite(Rational::zero());
        for j in 0..d {
            let w = (0..d)
                .map(|i| self.g.entries[i][j].add(&ExtRational::Finite(x[i].clone())))
                .min()
                .expect("nonempty column");
            total = total.add(&w);
        }
        Ok(total == self.g.det.add(&ExtRational::Finite(super::sum(x))))
    }
}

fn check_square(m: &ScalarMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(())
}

/// All pairwise constraints
/// `-v(m_ij / m_jj) <= x_i - x_j <= v(m_ji / m_ii)` for a matrix with
/// nonzero diagonal.
pub fn full_cone(m: &ScalarMatrix, marking: &str) -> Result<DifferenceCone> {
    check_square(m)?;
    let id: Vec<usize> = (0..m.rows()).collect();
    pairwise_cone(&valuations(m), &id, marking)
}

/// Only the constraints between consecutive indices, without checking any
/// precondition.
pub fn consecutive_cone(m: &ScalarMatrix, marking: &str) -> Result<DifferenceCone> {
    check_square(m)?;
    let d = m.rows();
    let v = valuations(m);
    let mut constraints = Vec::with_capacity(2 * d);
    for i in 0..d.saturating_sub(1) {
        let (a, b) = (&v[i][i], &v[i + 1][i + 1]);
        let (Some(a), Some(b)) = (a.finite(), b.finite()) else {
            return Err(Error::Precondition("zero on the diagonal".into()));
        };
        constraints.push((i + 1, i, v[i][i + 1].add(&ExtRational::Finite(-b.clone()))));
        constraints.push((i, i + 1, v[i + 1][i].add(&ExtRational::Finite(-a.clone()))));
    }
    Ok(DifferenceCone::from_constraints(d, marking, constraints))
}

/// The consecutive constraints, which cut out the same set as
/// [`full_cone`] for totally nonnegative matrices that are upper triangular
/// or have unit diagonal and a unit determinant.
pub fn reduced_cone(m: &ScalarMatrix, marking: &str) -> Result<DifferenceCone> {
    check_square(m)?;
    if !m.is_totally_nonnegative()? {
        return Err(Error::Precondition("matrix is not totally nonnegative".into()));
    }
    let d = m.rows();
    let unit_diagonal = (0..d).all(|i| m.get(i, i).is_one());
    let unimodular = unit_diagonal && m.determinant()?.valuation() == ExtRational::Finite(Rational::zero());
    let triangular = m.is_upper_triangular() && (0..d).all(|i| !m.get(i, i).is_zero());
    if !(unimodular || triangular) {
        return Err(Error::Precondition(
            "need unit diagonal with v(det) = 0, or an invertible upper triangular matrix".into(),
        ));
    }
    consecutive_cone(m, marking)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::valfield::ValuedScalar;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn fin(n: i64) -> ExtRational {
        ExtRational::Finite(Rational::from_int(n))
    }

    /// `[[1, 1, t], [0, 1, 1], [0, 0, 1]]` with `v(t) = -1`.
    fn non_tnn() -> ScalarMatrix {
        let one = ValuedScalar::one;
        let zero = ValuedScalar::zero;
        let s = ValuedScalar::t();
        Matrix::from_rows(vec![
            vec![one(), one(), s],
            vec![zero(), one(), one()],
            vec![zero(), zero(), one()],
        ])
        .unwrap()
    }

    #[test]
    fn same_marking_gives_everything() {
        let m = Marking::new(non_tnn()).unwrap();
        assert_eq!(intersect_apartments(&m, &m).unwrap(), DifferenceCone::full(3, "m"));
        let x = vec![r(2, 1), r(-3, 1), r(2, 1)];
        assert!(is_point_in_apartment(&m, &x, &m).unwrap());
    }

    #[test]
    fn non_tnn_example() {
        let id = Marking::new(Matrix::identity(3)).unwrap();
        let m2 = Marking::new(non_tnn()).unwrap();
        let cone = intersect_apartments(&id, &m2).unwrap();
        let expect = DifferenceCone::from_constraints(
            3,
            "m",
            [(1, 0, fin(0)), (2, 1, fin(0)), (2, 0, fin(-1))],
        );
        assert_eq!(cone, expect);
        // x_1 - x_3 = 1/2 with x_1 >= x_2 >= x_3.
        let x = vec![r(7, 12), r(1, 3), r(1, 12)];
        assert!(!cone.contains(&x));
        assert!(!is_point_in_apartment(&id, &x, &m2).unwrap());
        let y = vec![r(1, 1), r(1, 2), r(-1, 2)];
        assert!(cone.contains(&y));
        assert!(is_point_in_apartment(&id, &y, &m2).unwrap());

        assert!(matches!(reduced_cone(&non_tnn(), "m"), Err(Error::Precondition(_))));
        let plus = consecutive_cone(&non_tnn(), "m").unwrap();
        assert!(cone.is_subset(&plus));
        assert_ne!(cone, plus);
        assert_eq!(full_cone(&non_tnn(), "m").unwrap(), cone);
    }

    #[test]
    fn identity_reduced_cone_is_everything() {
        let c = reduced_cone(&Matrix::identity(4), "m").unwrap();
        assert_eq!(c, DifferenceCone::full(4, "m"));
    }

    #[test]
    fn disjoint_apartments_are_empty() {
        // A 2x2 change of basis with v(det) above the tropical minimum.
        let s = ValuedScalar::monomial(r(-1, 1), r(1, 1));
        let g = Matrix::from_rows(vec![
            vec![ValuedScalar::one(), ValuedScalar::one()],
            vec![ValuedScalar::one(), ValuedScalar::one() + s],
        ])
        .unwrap();
        let id = Marking::new(Matrix::identity(2)).unwrap();
        let m2 = Marking::new(g).unwrap();
        assert!(intersect_apartments(&id, &m2).unwrap().is_empty());
        assert!(intersection_transport(&id, &m2).unwrap().is_none());
        for x in [vec![r(1, 2), r(1, 2)], vec![r(3, 1), r(-2, 1)]] {
            assert!(!is_point_in_apartment(&id, &x, &m2).unwrap());
        }
    }

    #[test]
    fn off_slice_rejected() {
        let m = Marking::new(Matrix::identity(2)).unwrap();
        assert_eq!(
            is_point_in_apartment(&m, &[r(1, 1), r(1, 1)], &m),
            Err(Error::OffSlice)
        );
    }

    #[test]
    fn fraction_free_valuations_match_direct_ones() {
        let t = ValuedScalar::t;
        let q = |n: i64| ValuedScalar::from_int(n);
        let inv = |x: ValuedScalar| x.inverse().unwrap();
        let m1 = Marking::new(
            Matrix::from_rows(vec![
                vec![q(1), inv(t() + q(1)), q(2)],
                vec![t(), q(-1), inv(t().times(&t()) - q(3))],
                vec![q(0), t().times(&t()), q(5)],
            ])
            .unwrap(),
        )
        .unwrap();
        let m2 = Marking::new(
            Matrix::from_rows(vec![
                vec![inv(t()), q(1), q(0)],
                vec![q(3), t() + q(2), q(1)],
                vec![q(1), q(0), inv(q(1) + t())],
            ])
            .unwrap(),
        )
        .unwrap();
        let g = change_of_basis(&m1, &m2).unwrap();
        let fast = tropical_change_of_basis(&m1, &m2).unwrap();
        assert_eq!(fast.entries, valuations(&g));
        assert_eq!(fast.det, g.determinant().unwrap().valuation());
    }
}
