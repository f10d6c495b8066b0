//! Sparse generalized polynomials `sum c_a t^a` with rational exponents.
//!
//! A polynomial is stored as `content * sum k_i t^{e_i / q}` where the `k_i`
//! are coprime integers with positive leading term and `q` is the smallest
//! common exponent denominator. By Gauss's lemma products of primitive parts
//! stay primitive, so multiplication never reduces coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::Rational;

/// Representation is unique, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GenPoly {
    content: Rational,
    q: i64,
    /// Strictly decreasing exponent numerators with nonzero coefficients.
    terms: Vec<(i64, BigInt)>,
}

impl Default for GenPoly {
    fn default() -> Self {
        Self::zero()
    }
}

fn checked(x: Option<i64>) -> i64 {
    x.expect("exponent overflow")
}

fn lcm_i64(a: i64, b: i64) -> i64 {
    checked((a / a.gcd(&b)).checked_mul(b))
}

/// Coefficient accumulator over a range of exponent numerators.
struct Accumulator {
    dense: Option<(i64, Vec<BigInt>)>,
    sparse: BTreeMap<i64, BigInt>,
}

impl Accumulator {
    /// Accumulator for exponents in `lo..=hi`, dense when `expected` terms
    /// would fill a reasonable share of the range.
    fn new(lo: i64, hi: i64, expected: usize) -> Self {
        let span = (hi - lo) as u64 + 1;
        if span <= 4 * expected as u64 + 64 {
            Accumulator {
                dense: Some((lo, vec![BigInt::zero(); span as usize])),
                sparse: BTreeMap::new(),
            }
        } else {
            Accumulator {
                dense: None,
                sparse: BTreeMap::new(),
            }
        }
    }

    fn slot(&mut self, e: i64) -> &mut BigInt {
        match &mut self.dense {
            Some((lo, v)) => &mut v[(e - *lo) as usize],
            None => self.sparse.entry(e).or_default(),
        }
    }

    fn add(&mut self, e: i64, c: BigInt) {
        *self.slot(e) += c;
    }

    /// Highest exponent with a nonzero coefficient at or below `below`.
    fn top(&mut self, below: i64) -> Option<(i64, BigInt)> {
        match &mut self.dense {
            Some((lo, v)) => {
                let mut k = (below - *lo).min(v.len() as i64 - 1);
                while k >= 0 {
                    if !v[k as usize].is_zero() {
                        return Some((*lo + k, v[k as usize].clone()));
                    }
                    k -= 1;
                }
                None
            }
            None => {
                self.sparse.retain(|_, c| !c.is_zero());
                self.sparse
                    .range(..=below)
                    .next_back()
                    .map(|(e, c)| (*e, c.clone()))
            }
        }
    }

    fn into_terms(self) -> Vec<(i64, BigInt)> {
        match self.dense {
            Some((lo, v)) => v
                .into_iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (lo + k as i64, c))
                .collect(),
            None => self
                .sparse
                .into_iter()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }
}

impl GenPoly {
    pub fn zero() -> Self {
        GenPoly {
            content: Rational::zero(),
            q: 1,
            terms: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(Rational::zero(), c)
    }

    pub fn monomial(exp: Rational, coeff: Rational) -> Self {
        Self::from_terms(vec![(exp, coeff)])
    }

    /// Builds a polynomial from arbitrary terms, merging equal exponents.
    ///
    /// Panics if an exponent does not fit the internal 64-bit lattice; use
    /// [`GenPoly::try_from_terms`] for untrusted input.
    pub fn from_terms(terms: Vec<(Rational, Rational)>) -> Self {
        Self::try_from_terms(terms).expect("exponent out of range")
    }

    pub fn try_from_terms(terms: Vec<(Rational, Rational)>) -> Option<Self> {
        let terms: Vec<_> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return Some(Self::zero());
        }
        let mut q = 1i64;
        for (e, _) in &terms {
            q = lcm_i64(q, e.denom().to_i64()?);
        }
        let scale = terms
            .iter()
            .fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
        let mut ints = Vec::with_capacity(terms.len());
        for (e, c) in &terms {
            let k = e.numer().to_i64()?.checked_mul(q / e.denom().to_i64()?)?;
            ints.push((k, c.numer() * (&scale / c.denom())));
        }
        ints.sort_by_key(|t| std::cmp::Reverse(t.0));
        let mut merged: Vec<(i64, BigInt)> = Vec::with_capacity(ints.len());
        for (e, c) in ints {
            match merged.last_mut() {
                Some(last) if last.0 == e => last.1 += c,
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Some(Self::build(
            Rational::from_big(BigInt::one(), scale),
            q,
            merged,
        ))
    }

    /// Normalizes `content * sum c_i t^{e_i/q}` from descending integer terms.
    fn build(content: Rational, q: i64, mut terms: Vec<(i64, BigInt)>) -> Self {
        if content.is_zero() || terms.is_empty() {
            return Self::zero();
        }
        let mut g = terms.iter().fold(BigInt::zero(), |g, (_, c)| g.gcd(c));
        if terms[0].1.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, c) in terms.iter_mut() {
                *c /= &g;
            }
        }
        let content = &content * &Rational::from_big(g, BigInt::one());
        Self::primitive(content, q, terms)
    }

    /// Like `build` for terms already primitive with positive leading
    /// coefficient; only the exponent denominator is reduced.
    fn primitive(content: Rational, q: i64, mut terms: Vec<(i64, BigInt)>) -> Self {
        let g = terms.iter().fold(q, |g, (e, _)| g.gcd(e));
        let q = if g > 1 {
            for (e, _) in terms.iter_mut() {
                *e /= g;
            }
            q / g
        } else {
            q
        };
        GenPoly { content, q, terms }
    }

    /// Terms `(exponent, coefficient)` in decreasing exponent order.
    pub fn terms(&self) -> Vec<(Rational, Rational)> {
        self.terms
            .iter()
            .map(|(e, c)| (self.exponent(*e), self.coefficient(c)))
            .collect()
    }

    fn exponent(&self, e: i64) -> Rational {
        Rational::new(e, self.q)
    }

    fn coefficient(&self, c: &BigInt) -> Rational {
        &self.content * &Rational::from_big(c.clone(), BigInt::one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.content == Rational::one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Exponent and coefficient of the dominant term.
    pub fn leading(&self) -> Option<(Rational, Rational)> {
        self.terms
            .first()
            .map(|(e, c)| (self.exponent(*e), self.coefficient(c)))
    }

    pub fn max_exp(&self) -> Option<Rational> {
        self.terms.first().map(|(e, _)| self.exponent(*e))
    }

    pub fn min_exp(&self) -> Option<Rational> {
        self.terms.last().map(|(e, _)| self.exponent(*e))
    }

    pub fn sign(&self) -> Ordering {
        // The primitive part has a positive leading coefficient.
        self.content.signum()
    }

    pub fn neg(&self) -> Self {
        GenPoly {
            content: -&self.content,
            q: self.q,
            terms: self.terms.clone(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() || self.is_zero() {
            return Self::zero();
        }
        GenPoly {
            content: &self.content * k,
            q: self.q,
            terms: self.terms.clone(),
        }
    }

    /// Multiplies by `t^s`.
    pub fn shift(&self, s: &Rational) -> Self {
        if s.is_zero() || self.is_zero() {
            return self.clone();
        }
        let (a, b) = (
            s.numer().to_i64().expect("exponent out of range"),
            s.denom().to_i64().expect("exponent out of range"),
        );
        let q = lcm_i64(self.q, b);
        let (fs, off) = (q / self.q, checked(a.checked_mul(q / b)));
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (checked(checked(e.checked_mul(fs)).checked_add(off)), c.clone()))
            .collect();
        Self::primitive(self.content.clone(), q, terms)
    }

    /// Exponent numerators of `self` and `other` over a common denominator.
    fn lattice(&self, other: &Self) -> (i64, Vec<i64>, Vec<i64>) {
        let q = lcm_i64(self.q, other.q);
        let rescale = |p: &Self| {
            let f = q / p.q;
            p.terms
                .iter()
                .map(|(e, _)| checked(e.checked_mul(f)))
                .collect::<Vec<_>>()
        };
        (q, rescale(self), rescale(other))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let (q, ea, eb) = self.lattice(other);
        // content_a * A + content_b * B = (g / l) * (xa A + xb B)
        let (ca, cb) = (&self.content, &other.content);
        let l = ca.denom().lcm(cb.denom());
        let xa = ca.numer() * (&l / ca.denom());
        let mut xb = cb.numer() * (&l / cb.denom());
        if negate {
            xb = -xb;
        }
        let g = xa.gcd(&xb);
        let (xa, xb) = (&xa / &g, &xb / &g);
        let times = |x: &BigInt, c: &BigInt| if x.is_one() { c.clone() } else { x * c };
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match ea[i].cmp(&eb[j]) {
                Ordering::Greater => {
                    out.push((ea[i], times(&xa, &a[i].1)));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((eb[j], times(&xb, &b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = times(&xa, &a[i].1) + times(&xb, &b[j].1);
                    if !c.is_zero() {
                        out.push((ea[i], c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend((i..a.len()).map(|k| (ea[k], times(&xa, &a[k].1))));
        out.extend((j..b.len()).map(|k| (eb[k], times(&xb, &b[k].1))));
        Self::build(Rational::from_big(g, l), q, out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let content = &self.content * &other.content;
        // A primitive monomial has coefficient 1.
        if other.is_monomial() {
            return self.shift(&other.exponent(other.terms[0].0)).with_content(content);
        }
        if self.is_monomial() {
            return other.shift(&self.exponent(self.terms[0].0)).with_content(content);
        }
        let (q, ea, eb) = self.lattice(other);
        let hi = checked(ea[0].checked_add(eb[0]));
        let lo = checked(ea[ea.len() - 1].checked_add(eb[eb.len() - 1]));
        let mut acc = Accumulator::new(lo, hi, self.len() * other.len());
        for (i, (_, ca)) in self.terms.iter().enumerate() {
            for (j, (_, cb)) in other.terms.iter().enumerate() {
                acc.add(ea[i] + eb[j], ca * cb);
            }
        }
        Self::primitive(content, q, acc.into_terms())
    }

    fn with_content(mut self, content: Rational) -> Self {
        self.content = content;
        self
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let content = &self.content / &divisor.content;
        if divisor.is_monomial() {
            let e = divisor.exponent(divisor.terms[0].0);
            return Some(self.shift(&-&e).with_content(content));
        }
        let (q, ea, eb) = self.lattice(divisor);
        let (hi, lo) = (ea[0], ea[ea.len() - 1]);
        // Quotient exponents are at least `floor`; this bounds the loop.
        let floor = lo - eb[eb.len() - 1];
        let lead = &divisor.terms[0].1;
        let mut rem = Accumulator::new(lo, hi, self.len() + divisor.len());
        for (k, (_, c)) in self.terms.iter().enumerate() {
            rem.add(ea[k], c.clone());
        }
        let mut quot = Vec::new();
        let mut cursor = hi;
        while let Some((re, rc)) = rem.top(cursor) {
            let qe = re - eb[0];
            if qe < floor {
                return None;
            }
            let (qc, r) = rc.div_rem(lead);
            if !r.is_zero() {
                // Over the integers a primitive divisor leaves an integral
                // quotient whenever it divides at all.
                return None;
            }
            for (k, (_, c)) in divisor.terms.iter().enumerate() {
                rem.add(eb[k] + qe, -(&qc * c));
            }
            quot.push((qe, qc));
            cursor = re - 1;
        }
        Some(Self::primitive(content, q, quot))
    }

    /// Exponent denominator and primitive integer terms, for gcd reduction.
    pub(super) fn integer_parts(&self) -> (i64, &[(i64, BigInt)]) {
        (self.q, &self.terms)
    }

    /// The polynomial `sum c_i t^{e_i / q}` scaled to leading coefficient 1.
    pub(super) fn monic_from_integer_parts(q: i64, terms: Vec<(i64, BigInt)>) -> Self {
        let p = Self::build(Rational::one(), q, terms);
        match p.terms.first() {
            Some((_, c)) => {
                let lc = Rational::from_big(c.clone(), BigInt::one());
                p.with_content(lc.recip().expect("nonzero"))
            }
            None => p,
        }
    }
}

impl fmt::Debug for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms().iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if e.is_zero() {
                write!(f, "{c:?}")?;
            } else {
                write!(f, "{c:?}*t^({e:?})")?;
            }
        }
        Ok(())
    }
}

impl Serialize for GenPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.terms().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GenPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<(Rational, Rational)>::deserialize(deserializer)?;
        GenPoly::try_from_terms(terms)
            .ok_or_else(|| serde::de::Error::custom("exponent out of range"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn poly(terms: &[(i64, i64, i64)]) -> GenPoly {
        GenPoly::from_terms(
            terms
                .iter()
                .map(|&(en, ed, c)| (r(en, ed), Rational::from_int(c)))
                .collect(),
        )
    }

    #[test]
    fn from_terms_merges_and_drops_zeros() {
        let p = poly(&[(1, 1, 2), (0, 1, 1), (1, 1, -2), (1, 2, 3)]);
        assert_eq!(p.terms(), vec![(r(1, 2), r(3, 1)), (r(0, 1), r(1, 1))]);
    }

    #[test]
    fn representation_is_unique() {
        let a = poly(&[(1, 2, 1), (0, 1, 1)]).mul(&poly(&[(1, 2, 1), (0, 1, -1)]));
        assert_eq!(a, poly(&[(1, 1, 1), (0, 1, -1)]));
        let b = poly(&[(1, 1, 4), (0, 1, 6)]).scale(&r(1, 2));
        assert_eq!(b, poly(&[(1, 1, 2), (0, 1, 3)]));
        assert_eq!(poly(&[(1, 1, 1)]).sub(&poly(&[(1, 1, 1)])), GenPoly::zero());
    }

    #[test]
    fn product_and_exact_division() {
        let a = poly(&[(1, 1, 1), (0, 1, 1)]);
        let b = poly(&[(1, 2, 1), (0, 1, -3), (-1, 3, 2)]);
        let ab = a.mul(&b);
        assert_eq!(ab.exact_div(&a), Some(b.clone()));
        assert_eq!(ab.exact_div(&b), Some(a.clone()));
        let c = poly(&[(1, 1, 1), (0, 1, 2)]);
        assert_eq!(ab.exact_div(&c), None);
    }

    #[test]
    fn rational_coefficients() {
        let a = GenPoly::from_terms(vec![(r(1, 1), r(2, 3)), (r(0, 1), r(-1, 2))]);
        let b = GenPoly::from_terms(vec![(r(1, 3), r(5, 7)), (r(-2, 1), r(1, 1))]);
        let ab = a.mul(&b);
        assert_eq!(ab.leading(), Some((r(4, 3), r(10, 21))));
        assert_eq!(ab.exact_div(&b), Some(a.clone()));
        assert_eq!(ab.sub(&a.mul(&b)), GenPoly::zero());
        assert_eq!(a.add(&b).sub(&b), a);
    }

    #[test]
    fn sparse_exponents() {
        let a = poly(&[(5000, 1, 1), (0, 1, 1)]);
        let b = poly(&[(7, 3, 2), (-4000, 1, -1)]);
        assert_eq!(a.mul(&b).exact_div(&a), Some(b));
    }

    #[test]
    fn json_is_descending_pairs() {
        let p = poly(&[(0, 1, 1), (3, 2, -1)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[["3/2","-1/1"],["0/1","1/1"]]"#);
        let back: GenPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
