//! Flag tuples from their fan coordinates.
//!
//! The first triangle is placed in the frame `E` standard, `G` reversed
//! standard, `F^(1) = span(1, ..., 1)`. There the bottom snake basis of
//! `(E, F, G)` is `u_i = (-1)^{i-1} e_{d-i+1}^t`, the bottom-to-top path
//! matrix `M` is determined by the triple ratios, and the top snake basis is
//! `M^t R` where `R` has rows `u_i`.
//!
//! A snake basis with rows on the lines `(E^(d-k) + X^(k-1))^perp` has
//! inverse whose columns form a basis adapted to `X`. Hence the middle flag
//! is the inverse of the top basis and the last flag the inverse of the
//! bottom basis.
//!
//! Across a diagonal `(1, k)` the flags `F_1, F_k, F_{k-1}` are known. The
//! top basis of `(F_1, F_k, F_{k-1})` differs from the bottom basis of
//! `(F_1, F_{k+1}, F_k)` by the shearing matrix, and that basis differs from
//! the top basis of `(F_1, F_k, F_{k+1})` by the signs `(-1)^{i-1}`. The
//! signs cancel and the next adapted basis is `B_k S_k M_k^t`, where `B_k`
//! is the adapted basis of `F_k` obtained in the previous step.

use super::{Flag, FlagTuple, ScalarMatrix, TripleIndex, TripleRatios};
use super::coords::FGCoordinates;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::snakes::{canonical_path, path_matrix_from_ratios, shearing_from_ratios, Move, Snake};
use crate::valfield::ValuedScalar;

/// Rows `u_i = (-1)^{i-1} e_{d-i+1}^t`.
fn signed_bottom_basis(d: usize) -> ScalarMatrix {
    Matrix::from_fn(d, d, |i, j| {
        if i + j == d - 1 {
            ValuedScalar::from_int(if i % 2 == 0 { 1 } else { -1 })
        } else {
            ValuedScalar::zero()
        }
    })
}

fn bottom_to_top(d: usize, ratios: &TripleRatios) -> Result<ScalarMatrix> {
    let path = canonical_path(&Snake::bottom(d), &Snake::top(d))?;
    path_matrix_from_ratios(d, &path, ratios)
}

/// A nonzero multiple of the inverse bottom-to-top matrix, without
/// fractions.
///
/// A diamond move is `(I + E_{a-2,a-1}) diag(1, .., 1, X, .., X)`, so
/// `X` times its inverse is `diag(X, .., X, 1, .., 1) (I - E_{a-2,a-1})`.
fn scaled_inverse_path(d: usize, ratios: &TripleRatios) -> Result<ScalarMatrix> {
    let path = canonical_path(&Snake::bottom(d), &Snake::top(d))?;
    let mut inv = Matrix::identity(d);
    for mv in &path {
        let (row, scaled) = match *mv {
            Move::Tail => (d - 2, None),
            Move::Diamond { at, ratio_index } => {
                let x = ratios
                    .get(&ratio_index)
                    .ok_or_else(|| Error::InvalidIndex(format!("missing ratio ({ratio_index})")))?;
                (at - 2, Some((at, x)))
            }
        };
        let mut step: ScalarMatrix = Matrix::identity(d);
        step.set(row, row + 1, ValuedScalar::from_int(-1));
        if let Some((at, x)) = scaled {
            let diag: Vec<ValuedScalar> = (0..d)
                .map(|i| if i < at { x.clone() } else { ValuedScalar::one() })
                .collect();
            step = Matrix::diagonal(&diag).mul(&step);
        }
        inv = step.mul(&inv);
    }
    Ok(inv)
}

fn check_ratios(d: usize, ratios: &TripleRatios) -> Result<()> {
    for idx in TripleIndex::interior(d) {
        match ratios.get(&idx) {
            None => return Err(Error::InvalidIndex(format!("missing ratio ({idx})"))),
            Some(x) if x.is_zero() => return Err(Error::ZeroCoordinate(format!("({idx})"))),
            _ => {}
        }
    }
    Ok(())
}

/// Rescales each column so no entry has a nontrivial denominator.
fn clear_denominators(m: &ScalarMatrix) -> ScalarMatrix {
    let mut cols = m.columns();
    for col in cols.iter_mut() {
        let mut dens: Vec<ValuedScalar> = Vec::new();
        for x in col.iter() {
            if !x.is_polynomial() {
                let den = ValuedScalar::from_poly(x.den().clone());
                if !dens.contains(&den) {
                    dens.push(den);
                }
            }
        }
        for den in dens {
            for x in col.iter_mut() {
                *x = x.times(&den);
            }
        }
    }
    Matrix::from_columns(m.rows(), &cols)
}

/// The triple `(E, F, G)` with the given triple ratios, `E` standard and `G`
/// reversed standard.
pub fn reconstruct_triple(d: usize, ratios: &TripleRatios) -> Result<FlagTuple> {
    if d < 2 {
        return Err(Error::InvalidIndex(format!("dimension {d}")));
    }
    check_ratios(d, ratios)?;
    // F = (M^t R)^{-1} = (M^{-1} R)^t since R is a signed permutation.
    let f = scaled_inverse_path(d, ratios)?.mul(&signed_bottom_basis(d)).transpose();
    let f = clear_denominators(&f);
    FlagTuple::new(vec![
        Flag::standard(d),
        Flag::from_invertible(f),
        Flag::reversed_standard(d),
    ])
}

/// The tuple `(F_1, ..., F_t)` with the given fan coordinates.
pub fn reconstruct_tuple(coords: &FGCoordinates) -> Result<FlagTuple> {
    coords.validate_fan()?;
    let (d, t) = (coords.d, coords.t);
    let first = reconstruct_triple(d, &coords.triangles[&(1, 2, 3)])?;
    let mut flags: Vec<Flag> = first.flags().to_vec();
    // Adapted basis of the newest flag, with the exact scaling of the
    // bottom snake basis it inverts.
    let mut adapted = signed_bottom_basis(d).transpose();
    for k in 3..t {
        let m = bottom_to_top(d, &coords.triangles[&(1, k, k + 1)])?;
        let shear = shearing_from_ratios(&coords.edges[&(1, k)]);
        adapted = adapted.mul(&shear).mul(&m.transpose());
        flags.push(Flag::from_invertible(adapted.clone()));
    }
    FlagTuple::new(flags)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flags::{triple_ratios, tuple_coordinates, Triangulation};
    use crate::rational::Rational;
    use std::collections::BTreeMap;

    #[test]
    fn d2_triple_is_three_lines() {
        let tuple = reconstruct_triple(2, &BTreeMap::new()).unwrap();
        assert!(tuple.max_span_check());
    }

    #[test]
    fn d3_triple_round_trip() {
        let mut ratios = BTreeMap::new();
        ratios.insert(TripleIndex::new(1, 1, 1), ValuedScalar::t());
        let tuple = reconstruct_triple(3, &ratios).unwrap();
        let f = tuple.flags();
        assert_eq!(triple_ratios(&f[0], &f[1], &f[2]).unwrap(), ratios);
    }

    #[test]
    fn all_ones_lands_on_diagonal_line() {
        let ratios: TripleRatios = TripleIndex::interior(4)
            .into_iter()
            .map(|i| (i, ValuedScalar::one()))
            .collect();
        let tuple = reconstruct_triple(4, &ratios).unwrap();
        let line = tuple.flags()[1].subspace(1);
        let ones = Matrix::from_fn(4, 1, |_, _| ValuedScalar::one());
        assert_eq!(Matrix::hstack(&[&line, &ones]).rank(), 1);
    }

    #[test]
    fn d2_quadruple_round_trip() {
        let mut coords = FGCoordinates {
            d: 2,
            t: 4,
            triangles: BTreeMap::new(),
            edges: BTreeMap::new(),
        };
        coords.triangles.insert((1, 2, 3), BTreeMap::new());
        coords.triangles.insert((1, 3, 4), BTreeMap::new());
        coords.edges.insert((1, 3), vec![ValuedScalar::t()]);
        let tuple = reconstruct_tuple(&coords).unwrap();
        assert_eq!(tuple_coordinates(&tuple, &Triangulation::Fan).unwrap(), coords);
    }

    #[test]
    fn zero_ratio_rejected() {
        let mut ratios = BTreeMap::new();
        ratios.insert(TripleIndex::new(1, 1, 1), ValuedScalar::constant(Rational::zero()));
        assert!(matches!(
            reconstruct_triple(3, &ratios),
            Err(Error::ZeroCoordinate(_))
        ));
    }
}
