//! An ordered valued field of quotients of generalized polynomials in a
//! single infinitely large element `t`.

mod gcd;
mod genpoly;
mod scalar;

pub use genpoly::GenPoly;
pub use scalar::ValuedScalar;
