use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::coords::FGCoordinates;
use super::reconstruct::reconstruct_tuple;
use super::{FlagTuple, TripleIndex};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valfield::{GenPoly, ValuedScalar};

/// Sampling parameters for positive coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenOptions {
    /// Leading exponents are drawn from `(1/q) Z`; 0 samples constants only.
    pub exponent_denominator: u32,
    /// Bound on the absolute value of each sampled valuation.
    pub max_valuation: u32,
    /// Number of lower-order terms appended to each coordinate.
    pub extra_terms: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            exponent_denominator: 6,
            max_valuation: 2,
            extra_terms: 1,
        }
    }
}

impl GenOptions {
    /// Positive constants: every coordinate has valuation 0.
    pub fn constants() -> Self {
        GenOptions {
            exponent_denominator: 0,
            max_valuation: 0,
            extra_terms: 0,
        }
    }
}

/// Small positive rational `p / q`.
fn positive_coeff<R: Rng>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(1..=9), rng.gen_range(1..=4))
}

/// A positive element: a positive leading term `c t^e` with `|e|` bounded by
/// `max_valuation`, plus lower-order terms of either sign.
pub fn sample_positive<R: Rng>(rng: &mut R, opts: &GenOptions) -> ValuedScalar {
    let q = opts.exponent_denominator as i64;
    if q == 0 {
        return ValuedScalar::constant(positive_coeff(rng));
    }
    let bound = opts.max_valuation as i64 * q;
    let lead = Rational::new(rng.gen_range(-bound..=bound), q);
    let mut terms = vec![(lead.clone(), positive_coeff(rng))];
    for _ in 0..opts.extra_terms {
        let drop = Rational::new(rng.gen_range(1..=2 * q), q);
        let c = positive_coeff(rng);
        let c = if rng.gen_bool(0.5) { c } else { -c };
        terms.push((&lead - &drop, c));
    }
    ValuedScalar::from_poly(GenPoly::from_terms(terms))
}

/// Positive fan coordinates for `t` flags in dimension `d`.
pub fn sample_coordinates<R: Rng>(d: usize, t: usize, rng: &mut R, opts: &GenOptions) -> FGCoordinates {
    let mut triangles = BTreeMap::new();
    for k in 2..t {
        let ratios = TripleIndex::interior(d)
            .into_iter()
            .map(|idx| (idx, sample_positive(rng, opts)))
            .collect();
        triangles.insert((1, k, k + 1), ratios);
    }
    let mut edges = BTreeMap::new();
    for k in 3..t {
        edges.insert((1, k), (1..d).map(|_| sample_positive(rng, opts)).collect());
    }
    FGCoordinates {
        d,
        t,
        triangles,
        edges,
    }
}

/// A generated tuple together with the coordinates it was built from.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratedTuple {
    #[serde(flatten)]
    pub tuple: FlagTuple,
    pub coordinates: FGCoordinates,
}

/// A positive tuple built from random positive fan coordinates.
/// Deterministic for a fixed seed.
pub fn generate_positive_tuple(
    d: usize,
    t: usize,
    seed: u64,
    opts: &GenOptions,
) -> Result<GeneratedTuple> {
    if d < 2 || t < 3 {
        return Err(Error::InvalidIndex(format!("need d >= 2 and t >= 3, got d = {d}, t = {t}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coordinates = sample_coordinates(d, t, &mut rng, opts);
    let tuple = reconstruct_tuple(&coordinates)?;
    Ok(GeneratedTuple { tuple, coordinates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::flags::{is_positive_tuple, tuple_coordinates, Triangulation};
    use crate::rational::ExtRational;

    #[test]
    fn generated_tuples_are_positive() {
        for seed in 0..4 {
            let g = generate_positive_tuple(3, 5, seed, &GenOptions::default()).unwrap();
            assert!(is_positive_tuple(&g.tuple));
            assert_eq!(
                tuple_coordinates(&g.tuple, &Triangulation::Fan).unwrap(),
                g.coordinates
            );
        }
    }

    #[test]
    fn constants_have_valuation_zero() {
        let g = generate_positive_tuple(3, 4, 11, &GenOptions::constants()).unwrap();
        assert!(g
            .coordinates
            .values()
            .all(|x| x.valuation() == ExtRational::Finite(Rational::zero()) && x.is_positive()));
    }

    #[test]
    fn deterministic() {
        let a = generate_positive_tuple(3, 4, 7, &GenOptions::default()).unwrap();
        let b = generate_positive_tuple(3, 4, 7, &GenOptions::default()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
