//! The ordered-field interface shared by [`Rational`] and [`ValuedScalar`].
//!
//! Method names are distinct from the `std::ops` traits so generic code and
//! operator code can coexist without ambiguity.

use std::cmp::Ordering;
use std::fmt::Debug;

use crate::rational::Rational;
use crate::valfield::ValuedScalar;

pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inverse(&self) -> Option<Self>;
    fn sign(&self) -> Ordering;

    /// Rough size of the representation, used to prefer cheap pivots.
    fn weight(&self) -> usize {
        1
    }

    /// A positive `q` making `q * self` cheaper to work with. Scaling by it
    /// never changes a sign.
    fn positive_denominator(&self) -> Self {
        Self::one()
    }

    fn divide(&self, other: &Self) -> Option<Self> {
        other.inverse().map(|inv| self.times(&inv))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn is_nonnegative(&self) -> bool {
        self.sign() != Ordering::Less
    }

    fn compare(&self, other: &Self) -> Ordering {
        self.minus(other).sign()
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn from_int(n: i64) -> Self {
        Rational::from_int(n)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        self.recip()
    }
    fn sign(&self) -> Ordering {
        self.signum()
    }
    fn weight(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
    fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Field for ValuedScalar {
    fn zero() -> Self {
        ValuedScalar::zero()
    }
    fn one() -> Self {
        ValuedScalar::one()
    }
    fn from_int(n: i64) -> Self {
        ValuedScalar::constant(Rational::from_int(n))
    }
    fn from_rational(r: &Rational) -> Self {
        ValuedScalar::constant(r.clone())
    }
    fn is_zero(&self) -> bool {
        ValuedScalar::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn sign(&self) -> Ordering {
        ValuedScalar::sign(self)
    }
    fn weight(&self) -> usize {
        self.num().len() + self.den().len()
    }
    fn positive_denominator(&self) -> Self {
        let den = ValuedScalar::from_poly(self.den().clone());
        if den.is_positive() {
            den
        } else {
            den.negate()
        }
    }
    fn compare(&self, other: &Self) -> Ordering {
        ValuedScalar::compare(self, other)
    }
}
