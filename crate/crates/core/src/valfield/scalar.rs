use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::gcd::common_factor;
use super::genpoly::GenPoly;
use crate::error::{Error, Result};
use crate::rational::{ExtRational, Rational};

/// A quotient of generalized polynomials in `t`, where `t` is a positive
/// infinitely large element with valuation -1.
///
/// Canonical form: the denominator has leading coefficient 1 and minimal
/// exponent 0. Common polynomial factors are removed when the gcd is cheap
/// to compute, so equality falls back to cross-multiplication.
#[derive(Clone)]
pub struct ValuedScalar {
    num: GenPoly,
    den: GenPoly,
}

impl ValuedScalar {
    pub fn new(num: GenPoly, den: GenPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn zero() -> Self {
        ValuedScalar {
            num: GenPoly::zero(),
            den: GenPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(GenPoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Rational::from_int(n))
    }

    pub fn from_poly(num: GenPoly) -> Self {
        ValuedScalar {
            num,
            den: GenPoly::one(),
        }
    }

    /// The element `t`.
    pub fn t() -> Self {
        Self::monomial(Rational::one(), Rational::one())
    }

    /// `coeff * t^exp`.
    pub fn monomial(exp: Rational, coeff: Rational) -> Self {
        Self::from_poly(GenPoly::monomial(exp, coeff))
    }

    pub fn num(&self) -> &GenPoly {
        &self.num
    }

    pub fn den(&self) -> &GenPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    fn normalized(num: GenPoly, den: GenPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = strip(num, den);
        if den.is_one() {
            return ValuedScalar { num, den };
        }
        if let Some(q) = num.exact_div(&den) {
            return Self::from_poly(q);
        }
        if let Some(g) = common_factor(&num, &den) {
            if let (Some(n), Some(d)) = (num.exact_div(&g), den.exact_div(&g)) {
                let (num, den) = strip(n, d);
                return ValuedScalar { num, den };
            }
        }
        ValuedScalar { num, den }
    }

    /// `v(x) = -deg(num) + deg(den)`, `+inf` for zero.
    pub fn valuation(&self) -> ExtRational {
        match (self.num.max_exp(), self.den.max_exp()) {
            (Some(n), Some(d)) => ExtRational::Finite(d - n),
            _ => ExtRational::Infinity,
        }
    }

    /// Finite valuation of a nonzero element.
    pub fn val(&self) -> Option<Rational> {
        self.valuation().finite().cloned()
    }

    /// Coefficient of the dominant term, i.e. the limit of `x * t^{v(x)}`.
    pub fn leading_coeff(&self) -> Rational {
        self.num
            .leading()
            .map_or_else(Rational::zero, |(_, c)| c.clone())
    }

    pub fn sign(&self) -> Ordering {
        // The denominator is monic, so the numerator carries the sign.
        self.num.sign()
    }

    pub fn compare(&self, other: &Self) -> Ordering {
        (self - other).sign()
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }
}

/// Shifts both parts so the denominator has minimal exponent 0 and makes it
/// monic.
fn strip(num: GenPoly, den: GenPoly) -> (GenPoly, GenPoly) {
    let (shift, lc) = match (den.min_exp(), den.leading()) {
        (Some(m), Some((_, c))) => (-m, c.clone()),
        _ => return (num, den),
    };
    if shift.is_zero() && lc == Rational::one() {
        return (num, den);
    }
    let k = lc.recip().expect("leading coefficient is nonzero");
    (num.shift(&shift).scale(&k), den.shift(&shift).scale(&k))
}

impl PartialEq for ValuedScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for ValuedScalar {}

impl Add<&ValuedScalar> for &ValuedScalar {
    type Output = ValuedScalar;
    fn add(self, rhs: &ValuedScalar) -> ValuedScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return ValuedScalar::normalized(self.num.add(&rhs.num), self.den.clone());
        }
        if rhs.den.is_one() {
            let num = self.num.add(&rhs.num.mul(&self.den));
            return ValuedScalar::normalized(num, self.den.clone());
        }
        if self.den.is_one() {
            let num = self.num.mul(&rhs.den).add(&rhs.num);
            return ValuedScalar::normalized(num, rhs.den.clone());
        }
        let num = self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den));
        ValuedScalar::normalized(num, self.den.mul(&rhs.den))
    }
}

impl Sub<&ValuedScalar> for &ValuedScalar {
    type Output = ValuedScalar;
    fn sub(self, rhs: &ValuedScalar) -> ValuedScalar {
        self + &(-rhs)
    }
}

impl Mul<&ValuedScalar> for &ValuedScalar {
    type Output = ValuedScalar;
    fn mul(self, rhs: &ValuedScalar) -> ValuedScalar {
        if self.is_zero() || rhs.is_zero() {
            return ValuedScalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ValuedScalar::from_poly(self.num.mul(&rhs.num));
        }
        ValuedScalar::normalized(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Neg for &ValuedScalar {
    type Output = ValuedScalar;
    fn neg(self) -> ValuedScalar {
        ValuedScalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Add for ValuedScalar {
    type Output = ValuedScalar;
    fn add(self, rhs: ValuedScalar) -> ValuedScalar {
        &self + &rhs
    }
}

impl Sub for ValuedScalar {
    type Output = ValuedScalar;
    fn sub(self, rhs: ValuedScalar) -> ValuedScalar {
        &self - &rhs
    }
}

impl Mul for ValuedScalar {
    type Output = ValuedScalar;
    fn mul(self, rhs: ValuedScalar) -> ValuedScalar {
        &self * &rhs
    }
}

impl Neg for ValuedScalar {
    type Output = ValuedScalar;
    fn neg(self) -> ValuedScalar {
        -&self
    }
}

impl From<Rational> for ValuedScalar {
    fn from(r: Rational) -> Self {
        ValuedScalar::constant(r)
    }
}

impl fmt::Debug for ValuedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ValuedScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    num: GenPoly,
    den: GenPoly,
}

impl Serialize for ValuedScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ValuedScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ScalarRepr::deserialize(deserializer)?;
        ValuedScalar::new(repr.num, repr.den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn t() -> ValuedScalar {
        ValuedScalar::t()
    }

    fn c(n: i64) -> ValuedScalar {
        ValuedScalar::from_int(n)
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(t().valuation(), ExtRational::Finite(r(-1, 1)));
        assert_eq!(ValuedScalar::zero().valuation(), ExtRational::Infinity);
        assert_eq!(c(5).valuation(), ExtRational::Finite(r(0, 1)));
        let x = (&t() + &c(1)).div(&t().pow(2)).unwrap();
        assert_eq!(x.valuation(), ExtRational::Finite(r(1, 1)));
    }

    #[test]
    fn comparison_examples() {
        assert_eq!((&t() - &c(1)).compare(&c(0)), Ordering::Greater);
        let x = &t() + &c(3);
        assert_eq!(x.compare(&x), Ordering::Equal);
        assert_eq!(t().inv().unwrap().compare(&c(1)), Ordering::Less);
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&(&t() + &c(1)) + &(-&t()), c(1));
        let half = ValuedScalar::monomial(r(1, 2), r(1, 1));
        assert_eq!(&t() * &half, ValuedScalar::monomial(r(3, 2), r(1, 1)));
        assert_eq!(c(1).div(&ValuedScalar::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn canonical_denominator() {
        // (t^2 + t) / (2 t^3 + 2 t) = (t + 1) / (2 t^2 + 2)
        let num = GenPoly::from_terms(vec![(r(2, 1), r(1, 1)), (r(1, 1), r(1, 1))]);
        let den = GenPoly::from_terms(vec![(r(3, 1), r(2, 1)), (r(1, 1), r(2, 1))]);
        let x = ValuedScalar::new(num, den).unwrap();
        assert_eq!(x.den().min_exp(), Some(r(0, 1)));
        assert_eq!(x.den().leading().unwrap().1, r(1, 1));
        assert_eq!(x.valuation(), ExtRational::Finite(r(1, 1)));
    }

    #[test]
    fn common_factors_cancel() {
        let a = &t() + &c(1);
        let b = &t() - &c(2);
        let q = (&a * &b).div(&(&a * &(&t() + &c(7)))).unwrap();
        assert_eq!(q.num().len(), 2);
        assert_eq!(q.den().len(), 2);
        assert_eq!(q, b.div(&(&t() + &c(7))).unwrap());
    }

    #[test]
    fn json_shape() {
        let x = t().inv().unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"num":[["-1/1","1/1"]],"den":[["0/1","1/1"]]}"#);
        let back: ValuedScalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<ValuedScalar>(r#"{"num":[],"den":[]}"#).is_err());
    }
}
