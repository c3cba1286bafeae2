use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{QuadNum, Rational, Sign};

/// Exact ordered-field scalar the generic linear algebra and the simulator
/// run over. Implemented for [`Rational`] and [`QuadNum`].
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + Send
    + Sync
{
    fn from_rational(r: &Rational) -> Self;

    fn sign(&self) -> Sign;

    /// Multiplication by a rational, which never mixes radicands.
    fn scale(&self, k: &Rational) -> Self;
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn sign(&self) -> Sign {
        Sign::of_rational(self)
    }

    fn scale(&self, k: &Rational) -> Self {
        self * k
    }
}

impl Scalar for QuadNum {
    fn from_rational(r: &Rational) -> Self {
        QuadNum::from_rational(r.clone())
    }

    fn sign(&self) -> Sign {
        QuadNum::sign(self)
    }

    fn scale(&self, k: &Rational) -> Self {
        QuadNum::scale(self, k)
    }
}
