pub mod building;
pub mod error;
pub mod field;
pub mod flags;
pub mod linalg;
pub mod rational;
pub mod snakes;
pub mod valfield;
pub mod verify;

pub use error::{Error, Result};
pub use field::Field;
pub use linalg::Matrix;
pub use rational::{ExtRational, Rational};
pub use valfield::{GenPoly, ValuedScalar};
