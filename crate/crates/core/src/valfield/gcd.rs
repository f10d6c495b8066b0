//! Greatest common divisors of generalized polynomials.
//!
//! Both inputs are rewritten as dense integer polynomials in `s = t^step`,
//! where `step` is the gcd of all exponents after stripping monomial
//! factors, and reduced with a primitive pseudo-remainder sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::genpoly::GenPoly;

/// Dense polynomials above this degree are not reduced.
const MAX_DENSE_DEGREE: usize = 1024;

/// A nontrivial common factor of `a` and `b`, monic with minimal exponent 0,
/// or `None` if the gcd is a monomial or the inputs are too large to reduce.
pub fn common_factor(a: &GenPoly, b: &GenPoly) -> Option<GenPoly> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let ((qa, ta), (qb, tb)) = (a.integer_parts(), b.integer_parts());
    let q = qa.lcm(&qb);
    // Exponent numerators over `q`, shifted to start at 0.
    let rescale = |qp: i64, t: &[(i64, BigInt)]| -> Option<Vec<(i64, BigInt)>> {
        let f = q / qp;
        let low = t.last()?.0;
        t.iter()
            .map(|(e, c)| Some(((e - low).checked_mul(f)?, c.clone())))
            .collect()
    };
    let (sa, sb) = (rescale(qa, ta)?, rescale(qb, tb)?);
    let step = sa.iter().chain(&sb).fold(0i64, |g, (e, _)| g.gcd(e));
    if step == 0 {
        return None;
    }
    let (da, db) = (to_dense(&sa, step)?, to_dense(&sb, step)?);
    if coprime_mod_p(&da, &db) {
        return None;
    }
    let g = dense_gcd(da, db);
    if g.len() < 2 {
        return None;
    }
    let terms = g
        .into_iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k as i64 * step, c))
        .collect();
    Some(GenPoly::monic_from_integer_parts(q, terms))
}

fn to_dense(terms: &[(i64, BigInt)], step: i64) -> Option<Vec<BigInt>> {
    let deg = usize::try_from(terms.first()?.0 / step).ok()?;
    if deg > MAX_DENSE_DEGREE {
        return None;
    }
    let mut dense = vec![BigInt::zero(); deg + 1];
    for (e, c) in terms {
        dense[(e / step) as usize] = c.clone();
    }
    Some(dense)
}

/// The Mersenne prime `2^61 - 1`.
const P: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn reduce_mod_p(p: &[BigInt]) -> Vec<u64> {
    let m = BigInt::from(P);
    let mut out: Vec<u64> = p
        .iter()
        .map(|c| c.mod_floor(&m).try_into().expect("reduced below P"))
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// True when the gcd modulo `P` is constant and `P` divides neither leading
/// coefficient. Reduction modulo such a prime can only raise the degree of
/// the gcd, so the inputs are then coprime over the rationals.
fn coprime_mod_p(a: &[BigInt], b: &[BigInt]) -> bool {
    let (len_a, len_b) = (a.len(), b.len());
    let (mut a, mut b) = (reduce_mod_p(a), reduce_mod_p(b));
    if a.len() != len_a || b.len() != len_b {
        return false;
    }
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while b.len() > 1 {
        let inv = pow_mod(*b.last().unwrap(), P - 2);
        while a.len() >= b.len() {
            let f = mul_mod(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (k, bk) in b.iter().enumerate() {
                a[k + shift] = (a[k + shift] + P - mul_mod(f, *bk)) % P;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    b.len() == 1
}

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn primitive(mut p: Vec<BigInt>) -> Vec<BigInt> {
    trim(&mut p);
    let content = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if content.is_zero() || content.is_one() {
        return p;
    }
    p.into_iter().map(|c| c / &content).collect()
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b`.
fn pseudo_rem(mut a: Vec<BigInt>, b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    trim(&mut a);
    let mut missing = a.len() - db;
    while a.len() > db {
        let da = a.len() - 1;
        let la = a[da].clone();
        let shift = da - db;
        for c in a.iter_mut() {
            *c *= lb;
        }
        for (k, bk) in b.iter().enumerate() {
            a[k + shift] -= &la * bk;
        }
        missing -= 1;
        trim(&mut a);
    }
    if missing > 0 && !a.is_empty() {
        let f = num_traits::pow(lb.clone(), missing);
        for c in a.iter_mut() {
            *c *= &f;
        }
    }
    a
}

/// Subresultant remainder sequence; contents are removed only at the end.
fn dense_gcd(a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    let (mut a, mut b) = (primitive(a), primitive(b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let (mut g, mut h) = (BigInt::one(), BigInt::one());
    while !b.is_empty() {
        if b.len() == 1 {
            return vec![BigInt::one()];
        }
        let delta = a.len() - b.len();
        let r = pseudo_rem(a, &b);
        let divisor = &g * num_traits::pow(h.clone(), delta);
        a = b;
        b = r.into_iter().map(|c| c / &divisor).collect();
        g = a.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(g.clone(), delta) / num_traits::pow(h, delta - 1)
        };
    }
    let mut a = primitive(a);
    if a.last().is_some_and(|c| c.is_negative()) {
        a = a.into_iter().map(|c| -c).collect();
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::rational::Rational;

    fn poly(terms: &[(i64, i64, i64)]) -> GenPoly {
        GenPoly::from_terms(
            terms
                .iter()
                .map(|&(en, ed, c)| (Rational::new(en, ed), Rational::from_int(c)))
                .collect(),
        )
    }

    #[test]
    fn finds_shared_factor() {
        // (t^{1/2} + 1)(t - 2) and (t^{1/2} + 1)(t^{1/2} + 3)
        let f = poly(&[(1, 2, 1), (0, 1, 1)]);
        let a = f.mul(&poly(&[(1, 1, 1), (0, 1, -2)]));
        let b = f.mul(&poly(&[(1, 2, 1), (0, 1, 3)]));
        assert_eq!(common_factor(&a, &b), Some(f));
    }

    #[test]
    fn coprime_inputs() {
        let a = poly(&[(1, 1, 1), (0, 1, 1)]);
        let b = poly(&[(1, 1, 1), (0, 1, -1)]);
        assert_eq!(common_factor(&a, &b), None);
    }

    #[test]
    fn ignores_monomial_content() {
        let f = poly(&[(1, 1, 1), (0, 1, 5)]);
        let a = f.mul(&poly(&[(3, 1, 2)]));
        let b = f.mul(&poly(&[(1, 1, 1), (0, 1, 1)]));
        let g = common_factor(&a, &b).unwrap();
        assert_eq!(g, poly(&[(1, 1, 1), (0, 1, 5)]));
    }
}
