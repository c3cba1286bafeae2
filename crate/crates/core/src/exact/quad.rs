use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{sqrt_normalize, ExactError, Rational, Sign};

/// A real number `rat + quad * sqrt(radicand)` with a squarefree radicand.
///
/// Rational values are always stored with `quad = 0` and `radicand = 1`, so
/// structural equality is value equality. Two numbers can be combined when
/// they share a radicand or when either one is rational; the operator impls
/// panic otherwise, the `checked_*` methods report
/// [`ExactError::IncompatibleRadicands`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadNum {
    rat: Rational,
    quad: Rational,
    radicand: BigInt,
}

impl QuadNum {
    /// Builds `a + b*sqrt(d)`, pulling square factors out of `d`.
    pub fn new(a: Rational, b: Rational, d: BigInt) -> Result<QuadNum, ExactError> {
        if d.is_negative() {
            return Err(ExactError::NegativeInput);
        }
        let (coef, radicand) = sqrt_normalize(&Rational::from_integer(d))?;
        Ok(QuadNum::from_parts(a, b * coef, radicand))
    }

    /// `coef * sqrt(x)` for rational `x >= 0`.
    pub fn sqrt_of(x: &Rational) -> Result<QuadNum, ExactError> {
        let (coef, radicand) = sqrt_normalize(x)?;
        Ok(QuadNum::from_parts(Rational::zero(), coef, radicand))
    }

    /// `radicand` must already be squarefree.
    pub(crate) fn from_parts(rat: Rational, quad: Rational, radicand: BigInt) -> QuadNum {
        if quad.is_zero() || radicand.is_zero() {
            return QuadNum::from_rational(rat);
        }
        if radicand.is_one() {
            return QuadNum::from_rational(rat + quad);
        }
        QuadNum {
            rat,
            quad,
            radicand,
        }
    }

    pub fn from_rational(r: Rational) -> QuadNum {
        QuadNum {
            rat: r,
            quad: Rational::zero(),
            radicand: BigInt::one(),
        }
    }

    pub fn from_int(n: i64) -> QuadNum {
        QuadNum::from_rational(Rational::from_integer(n.into()))
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn quad_part(&self) -> &Rational {
        &self.quad
    }

    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.quad.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.rat)
    }

    pub fn conjugate(&self) -> QuadNum {
        QuadNum {
            rat: self.rat.clone(),
            quad: -&self.quad,
            radicand: self.radicand.clone(),
        }
    }

    /// `(a + b sqrt d)(a - b sqrt d) = a^2 - b^2 d`
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat
            - &self.quad * &self.quad * Rational::from_integer(self.radicand.clone())
    }

    /// Exact sign, decided by comparing `a^2` with `b^2 d` when the parts
    /// disagree in sign.
    pub fn sign(&self) -> Sign {
        let sa = Sign::of_rational(&self.rat);
        let sb = Sign::of_rational(&self.quad);
        match (sa, sb) {
            (_, Sign::Zero) => sa,
            (Sign::Zero, _) => sb,
            _ if sa == sb => sa,
            _ => match Sign::of_rational(&self.norm()) {
                Sign::Positive => sa,
                Sign::Negative => sb,
                Sign::Zero => Sign::Zero,
            },
        }
    }

    pub fn abs(&self) -> QuadNum {
        if self.sign().is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn is_compatible(&self, other: &QuadNum) -> bool {
        self.is_rational() || other.is_rational() || self.radicand == other.radicand
    }

    /// The radicand two operands would combine under.
    fn joint_radicand(&self, other: &QuadNum) -> Result<BigInt, ExactError> {
        if self.is_rational() {
            Ok(other.radicand.clone())
        } else if other.is_rational() || self.radicand == other.radicand {
            Ok(self.radicand.clone())
        } else {
            Err(ExactError::IncompatibleRadicands(
                self.radicand.clone(),
                other.radicand.clone(),
            ))
        }
    }

    pub fn checked_add(&self, other: &QuadNum) -> Result<QuadNum, ExactError> {
        let d = self.joint_radicand(other)?;
        Ok(QuadNum::from_parts(
            &self.rat + &other.rat,
            &self.quad + &other.quad,
            d,
        ))
    }

    pub fn checked_sub(&self, other: &QuadNum) -> Result<QuadNum, ExactError> {
        let d = self.joint_radicand(other)?;
        Ok(QuadNum::from_parts(
            &self.rat - &other.rat,
            &self.quad - &other.quad,
            d,
        ))
    }

    pub fn checked_mul(&self, other: &QuadNum) -> Result<QuadNum, ExactError> {
        let d = self.joint_radicand(other)?;
        let dq = Rational::from_integer(d.clone());
        let rat = &self.rat * &other.rat + &self.quad * &other.quad * dq;
        let quad = &self.rat * &other.quad + &self.quad * &other.rat;
        Ok(QuadNum::from_parts(rat, quad, d))
    }

    pub fn checked_inv(&self) -> Result<QuadNum, ExactError> {
        let n = self.norm();
        if n.is_zero() {
            // squarefree radicand > 1 makes the norm vanish only at zero
            return Err(ExactError::DivisionByZero);
        }
        Ok(QuadNum::from_parts(
            &self.rat / &n,
            -(&self.quad / &n),
            self.radicand.clone(),
        ))
    }

    pub fn checked_div(&self, other: &QuadNum) -> Result<QuadNum, ExactError> {
        self.joint_radicand(other)?;
        self.checked_mul(&other.checked_inv()?)
    }

    pub fn scale(&self, k: &Rational) -> QuadNum {
        QuadNum::from_parts(&self.rat * k, &self.quad * k, self.radicand.clone())
    }

    /// Floating-point approximation, for drawing only.
    pub fn approx_f64(&self) -> f64 {
        let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
        let d = self.radicand.to_f64().unwrap_or(f64::NAN);
        f(&self.rat) + f(&self.quad) * d.sqrt()
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render_quad(self))
    }
}

impl fmt::Debug for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadNum({self})")
    }
}

impl From<Rational> for QuadNum {
    fn from(r: Rational) -> QuadNum {
        QuadNum::from_rational(r)
    }
}

impl From<i64> for QuadNum {
    fn from(n: i64) -> QuadNum {
        QuadNum::from_int(n)
    }
}

impl PartialOrd for QuadNum {
    /// `None` when the radicands are incompatible.
    fn partial_cmp(&self, other: &QuadNum) -> Option<Ordering> {
        let diff = self.checked_sub(other).ok()?;
        Some(match diff.sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        })
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -&self
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum {
            rat: -&self.rat,
            quad: -&self.quad,
            radicand: self.radicand.clone(),
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&QuadNum> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{}: {e}", stringify!($method)),
                }
            }
        }
        impl $trait<QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: QuadNum) -> QuadNum {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&QuadNum> for QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: &QuadNum) -> QuadNum {
                (&self).$method(rhs)
            }
        }
        impl $trait<QuadNum> for &QuadNum {
            type Output = QuadNum;
            fn $method(self, rhs: QuadNum) -> QuadNum {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Zero for QuadNum {
    fn zero() -> QuadNum {
        QuadNum::from_rational(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.quad.is_zero()
    }
}

impl One for QuadNum {
    fn one() -> QuadNum {
        QuadNum::from_rational(Rational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, quad_arith, rat, ArithOp};

    fn q(a: i64, b: i64, d: i64) -> QuadNum {
        QuadNum::new(int(a), int(b), d.into()).unwrap()
    }

    #[test]
    fn conjugate_product() {
        assert_eq!(q(1, 1, 17) * q(1, -1, 17), QuadNum::from_int(-16));
    }

    #[test]
    fn sqrt2_squared_is_rational() {
        let s = q(0, 1, 2) * q(0, 1, 2);
        assert_eq!(s, QuadNum::from_int(2));
        assert!(s.is_rational());
        assert_eq!(s.radicand(), &BigInt::one());
    }

    #[test]
    fn eigenvalue_trace() {
        let t = quad_arith(ArithOp::Add, &q(-1, 1, 17), &q(-1, -1, 17)).unwrap();
        assert_eq!(t, QuadNum::from_int(-2));
    }

    #[test]
    fn signs() {
        assert_eq!(q(-1, 1, 17).sign(), Sign::Positive);
        assert_eq!(q(3, -1, 10).sign(), Sign::Negative);
        assert_eq!(q(0, 0, 17).sign(), Sign::Zero);
        assert_eq!(q(-5, 1, 17).sign(), Sign::Negative);
        assert_eq!(q(5, -1, 17).sign(), Sign::Positive);
    }

    #[test]
    fn division_by_conjugate() {
        let x = q(1, 1, 17);
        let inv = x.checked_inv().unwrap();
        assert_eq!(&x * &inv, QuadNum::one());
        // 1/(1+sqrt17) = (1 - sqrt17)/(-16)
        assert_eq!(
            inv,
            QuadNum::new(rat(-1, 16), rat(1, 16), 17.into()).unwrap()
        );
        assert_eq!(
            QuadNum::zero().checked_inv(),
            Err(ExactError::DivisionByZero)
        );
    }

    #[test]
    fn incompatible_radicands() {
        assert!(matches!(
            q(0, 1, 2).checked_add(&q(0, 1, 3)),
            Err(ExactError::IncompatibleRadicands(_, _))
        ));
        // a rational operand combines with anything
        assert_eq!(q(0, 1, 2) + QuadNum::from_int(3), q(3, 1, 2));
        assert!(q(0, 1, 2).partial_cmp(&q(0, 1, 3)).is_none());
    }

    #[test]
    fn new_extracts_squares() {
        assert_eq!(q(0, 1, 8), q(0, 2, 2));
        assert_eq!(q(1, 1, 9), QuadNum::from_int(4));
        assert_eq!(q(1, 5, 0), QuadNum::from_int(1));
    }

    #[test]
    fn ordering() {
        assert!(q(-1, 1, 17) > q(-1, -1, 17));
        assert!(q(3, 0, 1) > q(0, 1, 8));
    }
}
