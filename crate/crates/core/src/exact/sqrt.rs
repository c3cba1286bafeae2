use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExactError, Rational};

/// Trial-division bound used when none is given.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

/// Writes `sqrt(x)` as `coef * sqrt(radicand)` with `coef >= 0` and a
/// squarefree `radicand`. Zero maps to `(0, 1)`.
pub fn sqrt_normalize(x: &Rational) -> Result<(Rational, BigInt), ExactError> {
    sqrt_normalize_with_bound(x, DEFAULT_FACTOR_BOUND)
}

pub fn sqrt_normalize_with_bound(
    x: &Rational,
    bound: u64,
) -> Result<(Rational, BigInt), ExactError> {
    if x.is_negative() {
        return Err(ExactError::NegativeInput);
    }
    if x.is_zero() {
        return Ok((Rational::zero(), BigInt::one()));
    }
    // sqrt(p/q) = sqrt(p*q) / q
    let q = x.denom().clone();
    let n = x.numer() * &q;
    let (square_root, radicand) = split_square(&n, bound)?;
    Ok((Rational::new(square_root, q), radicand))
}

/// Splits a positive integer into `s^2 * r` with `r` squarefree.
fn split_square(n: &BigInt, bound: u64) -> Result<(BigInt, BigInt), ExactError> {
    if let Some(small) = n.to_u128() {
        return split_square_u128(small, bound)
            .map(|(s, r)| (BigInt::from(s), BigInt::from(r)))
            .ok_or_else(|| ExactError::RadicandTooLarge(n.clone(), bound));
    }
    let mut rem = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p: u64 = 2;
    let mut exhausted_rem = true;
    while p <= bound {
        let pb = BigInt::from(p);
        if &pb * &pb > rem {
            exhausted_rem = false;
            break;
        }
        let mut e = 0u32;
        while (&rem % &pb).is_zero() {
            rem /= &pb;
            e += 1;
        }
        if e > 0 {
            square *= pb.pow(e / 2);
            if e % 2 == 1 {
                free *= &pb;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rem.is_one() {
        return Ok((square, free));
    }
    if !exhausted_rem {
        // no factor up to sqrt(rem): prime
        return Ok((square, free * rem));
    }
    let root = rem.sqrt();
    if &root * &root == rem {
        return Ok((square * root, free));
    }
    // every prime factor of rem exceeds the bound, so a repeated factor
    // p^2 * q needs rem > bound^3
    let b = BigInt::from(bound);
    if rem < &b * &b * &b {
        return Ok((square, free * rem));
    }
    Err(ExactError::RadicandTooLarge(n.clone(), bound))
}

fn split_square_u128(n: u128, bound: u64) -> Option<(u128, u128)> {
    let mut rem = n;
    let mut square: u128 = 1;
    let mut free: u128 = 1;
    let mut p: u128 = 2;
    let bound = bound as u128;
    let mut exhausted_rem = true;
    while p <= bound {
        if p * p > rem {
            exhausted_rem = false;
            break;
        }
        let mut e = 0u32;
        while rem.is_multiple_of(p) {
            rem /= p;
            e += 1;
        }
        if e > 0 {
            square *= p.pow(e / 2);
            if e % 2 == 1 {
                free *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rem == 1 {
        return Some((square, free));
    }
    if !exhausted_rem {
        return Some((square, free * rem));
    }
    let root = rem.sqrt();
    if root * root == rem {
        return Some((square * root, free));
    }
    let cube = bound
        .checked_mul(bound)
        .and_then(|b2| b2.checked_mul(bound));
    match cube {
        Some(c) if rem >= c => None,
        _ => Some((square, free * rem)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn check(x: Rational, coef: Rational, radicand: i64) {
        let (c, r) = sqrt_normalize(&x).unwrap();
        assert_eq!(c, coef);
        assert_eq!(r, BigInt::from(radicand));
        assert_eq!(&c * &c * Rational::from_integer(r), x);
    }

    #[test]
    fn examples() {
        check(int(17), int(1), 17);
        check(int(8), int(2), 2);
        check(rat(9, 4), rat(3, 2), 1);
        check(int(0), int(0), 1);
    }

    #[test]
    fn rational_radicands() {
        // sqrt(1/2) = 1/2 * sqrt(2)
        check(rat(1, 2), rat(1, 2), 2);
        // sqrt(68) = 2 sqrt(17)
        check(int(68), int(2), 17);
        check(rat(50, 27), rat(5, 9), 6);
    }

    #[test]
    fn negative_rejected() {
        assert_eq!(sqrt_normalize(&int(-1)), Err(ExactError::NegativeInput));
    }

    #[test]
    fn large_prime_square_beyond_bound() {
        // 1009 and 1013 are primes above the bound of 1000
        let p = BigInt::from(1009);
        let n = Rational::from_integer(&p * &p * BigInt::from(2 * 1013));
        assert!(matches!(
            sqrt_normalize_with_bound(&n, 1000),
            Err(ExactError::RadicandTooLarge(_, 1000))
        ));
        // an exact square of a large prime is still recognised
        let sq = Rational::from_integer(&p * &p * BigInt::from(4));
        assert_eq!(
            sqrt_normalize_with_bound(&sq, 1000).unwrap(),
            (Rational::from_integer(&p * BigInt::from(2)), BigInt::one())
        );
        // a product of two distinct large primes is certified squarefree
        let pq = Rational::from_integer(BigInt::from(1009 * 1013));
        assert_eq!(
            sqrt_normalize_with_bound(&pq, 1000).unwrap(),
            (Rational::one(), BigInt::from(1009 * 1013))
        );
        let (c, r) = sqrt_normalize(&n).unwrap();
        assert_eq!(c, Rational::from_integer(p));
        assert_eq!(r, BigInt::from(2 * 1013));
    }

    #[test]
    fn beyond_u128() {
        let big = BigInt::from(2).pow(201) * BigInt::from(3 * 49);
        let (c, r) = sqrt_normalize(&Rational::from_integer(big)).unwrap();
        assert_eq!(c, Rational::from_integer(BigInt::from(2).pow(100) * 7));
        assert_eq!(r, BigInt::from(6));
    }
}
