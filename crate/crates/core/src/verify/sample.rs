//! Random inputs for the verification trials.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::field::Field;
use crate::flags::{reconstruct_tuple, sample_positive, FlagTuple, GenOptions, ScalarMatrix};
use crate::linalg::Matrix;
use crate::rational::{ExtRational, Rational};
use crate::valfield::ValuedScalar;

/// Deliberate corruption of generated data, used to check that the suites
/// notice broken inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the first double ratio on diagonal `(1, 3)`.
    NegateDoubleRatio,
}

/// A tuple from random positive fan coordinates, with the fault applied.
pub fn tuple<R: Rng>(
    d: usize,
    t: usize,
    rng: &mut R,
    opts: &GenOptions,
    fault: Option<Fault>,
) -> crate::Result<FlagTuple> {
    let mut coords = crate::flags::sample_coordinates(d, t, rng, opts);
    if fault == Some(Fault::NegateDoubleRatio) {
        if let Some(z) = coords.edges.get_mut(&(1, 3)) {
            z[0] = z[0].negate();
        }
    }
    reconstruct_tuple(&coords)
}

/// Any element: zero, or a signed quotient of two sampled elements.
pub fn scalar<R: Rng>(rng: &mut R, opts: &GenOptions) -> ValuedScalar {
    if rng.gen_ratio(1, 12) {
        return ValuedScalar::zero();
    }
    let num = sample_positive(rng, opts);
    let num = if rng.gen_bool(0.5) { num } else { num.negate() };
    if rng.gen_bool(0.5) {
        num
    } else {
        num.divide(&sample_positive(rng, opts)).expect("positive denominator")
    }
}

/// A nonnegative element, zero about one time in ten.
pub fn nonnegative<R: Rng>(rng: &mut R, opts: &GenOptions) -> ValuedScalar {
    if rng.gen_ratio(1, 10) {
        ValuedScalar::zero()
    } else {
        sample_positive(rng, opts)
    }
}

/// `x` multiplied by a power of `t` so that `v >= floor`.
fn lift(x: ValuedScalar, floor: &Rational) -> ValuedScalar {
    let v = x.val().expect("nonzero");
    if v >= *floor {
        x
    } else {
        x.times(&ValuedScalar::monomial(&v - floor, Rational::one()))
    }
}

/// `I + a E_{i,j}`.
fn elementary(d: usize, i: usize, j: usize, a: ValuedScalar) -> ScalarMatrix {
    let mut m = Matrix::identity(d);
    m.set(i, j, a);
    m
}

/// A random totally nonnegative matrix built from elementary factors.
///
/// Half the samples are upper triangular with a positive diagonal. The
/// rest are `D L U` with unit diagonal: lower factors get parameters of
/// valuation at least `s` and upper ones at least `-s`, so every product
/// `l_ik u_ki` on the diagonal has nonnegative valuation and `v(det) = 0`.
pub fn tnn_matrix<R: Rng>(d: usize, rng: &mut R, opts: &GenOptions) -> ScalarMatrix {
    let q = opts.exponent_denominator.max(1) as i64;
    let factors = rng.gen_range(d..=2 * d);
    if d < 2 {
        return Matrix::identity(d);
    }
    if rng.gen_bool(0.5) {
        let mut m = Matrix::diagonal(&(0..d).map(|_| sample_positive(rng, opts)).collect::<Vec<_>>());
        for _ in 0..factors {
            let i = rng.gen_range(0..d - 1);
            m = m.mul(&elementary(d, i, i + 1, sample_positive(rng, opts)));
        }
        return m;
    }
    let s = Rational::new(rng.gen_range(-q..=q), q);
    let mut lower = Matrix::identity(d);
    let mut upper = Matrix::identity(d);
    for _ in 0..factors {
        let i = rng.gen_range(0..d - 1);
        let a = lift(sample_positive(rng, opts), &s);
        lower = lower.mul(&elementary(d, i + 1, i, a));
        let i = rng.gen_range(0..d - 1);
        let b = lift(sample_positive(rng, opts), &-s.clone());
        upper = upper.mul(&elementary(d, i, i + 1, b));
    }
    let m = lower.mul(&upper);
    let scale: Vec<ValuedScalar> = (0..d)
        .map(|i| m.get(i, i).inverse().expect("positive diagonal"))
        .collect();
    Matrix::diagonal(&scale).mul(&m)
}

/// Random `d x d` valuation matrix with some infinite entries.
pub fn valuation_matrix<R: Rng>(d: usize, rng: &mut R) -> Vec<Vec<ExtRational>> {
    (0..d)
        .map(|_| {
            (0..d)
                .map(|_| {
                    if rng.gen_ratio(1, 5) {
                        ExtRational::Infinity
                    } else {
                        ExtRational::Finite(Rational::new(rng.gen_range(-6..=6), rng.gen_range(1..=3)))
                    }
                })
                .collect()
        })
        .collect()
}

/// Points near `center` and further out, all on the slice `sum(x) = 1`.
pub fn points_near<R: Rng>(center: &[Rational], count: usize, rng: &mut R) -> Vec<Vec<Rational>> {
    let d = center.len();
    (0..count)
        .map(|k| {
            let spread = if k % 2 == 0 { 2 } else { 8 };
            let mut delta: Vec<Rational> = (0..d)
                .map(|_| Rational::new(rng.gen_range(-spread..=spread), rng.gen_range(1..=6)))
                .collect();
            delta.shuffle(rng);
            let mean = &delta.iter().fold(Rational::zero(), |a, b| &a + b) / &Rational::from_int(d as i64);
            center
                .iter()
                .zip(&delta)
                .map(|(c, e)| &(c + e) - &mean)
                .collect()
        })
        .collect()
}

/// Three pairs in nested position `i1 <= i2 <= i3 < j3 <= j2 <= j1` after
/// a random rotation, with each pair in random order.
pub fn separating_pairs<R: Rng>(t: usize, rng: &mut R) -> [(usize, usize); 3] {
    loop {
        let mut a: Vec<usize> = (0..6).map(|_| rng.gen_range(1..=t)).collect();
        a.sort_unstable();
        if a[2] == a[3] || a[0] == a[5] || a[1] == a[4] {
            continue;
        }
        let rot = rng.gen_range(0..t);
        let relabel = |v: usize| (v - 1 + rot) % t + 1;
        let mut pair = |i: usize, j: usize| {
            let (x, y) = (relabel(a[i]), relabel(a[j]));
            if rng.gen_bool(0.5) {
                (x, y)
            } else {
                (y, x)
            }
        };
        return [pair(0, 5), pair(1, 4), pair(2, 3)];
    }
}
