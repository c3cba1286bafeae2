//! Exact scalars: arbitrary-precision rationals and real quadratic numbers
//! `a + b*sqrt(d)`.
//!
//! Nothing in here touches floating point. Every sign test reduces to
//! comparisons of big integers.

mod quad;
mod scalar;
mod sqrt;
mod text;

use num_traits::{Signed, Zero};
use thiserror::Error;

pub use quad::QuadNum;
pub use scalar::Scalar;
pub use sqrt::{sqrt_normalize, sqrt_normalize_with_bound, DEFAULT_FACTOR_BOUND};
pub use text::{parse_quad, parse_rational, render_quad, render_rational};

/// Arbitrary-precision fraction in canonical form (positive denominator,
/// coprime parts).
pub type Rational = num_rational::BigRational;
pub use num_bigint::BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeInput,
    #[error("cannot certify a squarefree radicand for {0} with trial division up to {1}")]
    RadicandTooLarge(BigInt, u64),
    #[error("incompatible radicands sqrt({0}) and sqrt({1})")]
    IncompatibleRadicands(BigInt, BigInt),
    #[error("malformed scalar {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// Sign of an exact real value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_rational(x: &Rational) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Negative
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Sign::Negative => "-1",
            Sign::Zero => "0",
            Sign::Positive => "+1",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Field arithmetic on rationals; the result is always canonical.
pub fn rat_arith(op: ArithOp, x: &Rational, y: &Rational) -> Result<Rational, ExactError> {
    Ok(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => {
            if y.is_zero() {
                return Err(ExactError::DivisionByZero);
            }
            x / y
        }
    })
}

/// Arithmetic in `Q(sqrt(d))`. Operands must share a radicand unless one of
/// them is rational.
pub fn quad_arith(op: ArithOp, x: &QuadNum, y: &QuadNum) -> Result<QuadNum, ExactError> {
    match op {
        ArithOp::Add => x.checked_add(y),
        ArithOp::Sub => x.checked_sub(y),
        ArithOp::Mul => x.checked_mul(y),
        ArithOp::Div => x.checked_div(y),
    }
}

pub fn quad_sign(x: &QuadNum) -> Sign {
    x.sign()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}
