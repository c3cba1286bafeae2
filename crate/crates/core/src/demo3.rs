//! The three-variable loop
//!
//! ```text
//! while (x1 + 2*x2 + x3 >= 0) { x1 := 2*x1; x2 := 3*x2; x3 := 5*x3; }
//! ```
//!
//! whose non-termination set is not semi-algebraic. Nothing here decides
//! that; the module checks the two computable facts behind it. The points
//! `p_n = (2^-n, -3^-n, 5^-n)` all keep the guard non-negative forever (and
//! sit on the boundary of the set), and no nonzero polynomial vanishes on a
//! tail of them, with an explicit tail start. A semi-algebraic boundary
//! would need some such polynomial to vanish on infinitely many `p_n`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact::{render_rational, Rational};
use crate::frontend::LoopSpec;
use crate::linalg::Matrix;
use crate::oracle::{simulate, OracleError, SimResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Demo3Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("polynomial syntax error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("check needs at least one step")]
    EmptyRange,
}

pub fn p3_spec() -> LoopSpec {
    let int = |n: i64| Rational::from_integer(n.into());
    LoopSpec::with_default_names(
        Matrix::diagonal(vec![int(2), int(3), int(5)]),
        Matrix::from_rows(vec![vec![int(1), int(2), int(1)]]).expect("1x3"),
        vec![false],
    )
    .expect("well-formed")
}

pub fn boundary_point(n: u32) -> [Rational; 3] {
    let inv = |b: u32| Rational::new(BigInt::one(), BigInt::from(b).pow(n));
    [inv(2), -inv(3), inv(5)]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryReport {
    /// `B p_0`, which is zero.
    pub guard_at_p0: Rational,
    /// `2^k - 2*3^k + 5^k` for `k = 1..=K`.
    pub values: Vec<BigInt>,
    /// First `k` whose value is not positive.
    pub first_failure: Option<u32>,
}

impl BoundaryReport {
    pub fn holds(&self) -> bool {
        self.guard_at_p0.is_zero() && self.first_failure.is_none()
    }
}

/// `B A^k p_0` for `k = 1..=K`, exactly.
pub fn check_boundary_guard(k_max: u32) -> Result<BoundaryReport, Demo3Error> {
    if k_max == 0 {
        return Err(Demo3Error::EmptyRange);
    }
    let p0 = boundary_point(0);
    let guard_at_p0 = &p0[0] + &p0[1] * Rational::from_integer(2.into()) + &p0[2];
    let (mut t2, mut t3, mut t5) = (BigInt::one(), BigInt::one(), BigInt::one());
    let mut values = Vec::with_capacity(k_max as usize);
    let mut first_failure = None;
    for k in 1..=k_max {
        t2 *= 2;
        t3 *= 3;
        t5 *= 5;
        let v: BigInt = &t2 - &t3 * 2u32 + &t5;
        if first_failure.is_none() && !v.is_positive() {
            first_failure = Some(k);
        }
        values.push(v);
    }
    Ok(BoundaryReport {
        guard_at_p0,
        values,
        first_failure,
    })
}

/// `9(x1^2 + x2^2) - x3^2 < 0` and `x3 > 0`: a closed-form cone inside the
/// non-termination set.
pub fn tau_member(x: &[Rational; 3]) -> bool {
    let nine = Rational::from_integer(9.into());
    let lhs = nine * (&x[0] * &x[0] + &x[1] * &x[1]) - &x[2] * &x[2];
    lhs.is_negative() && x[2].is_positive()
}

/// A random rational point of `tau`, by rejection from a box.
pub fn sample_tau<R: Rng + ?Sized>(rng: &mut R) -> [Rational; 3] {
    loop {
        let mut r = |lo: i64, hi: i64| {
            Rational::new(rng.gen_range(lo..=hi).into(), rng.gen_range(1..=9).into())
        };
        let x = [r(-9, 9), r(-9, 9), r(1, 90)];
        if tau_member(&x) {
            return x;
        }
    }
}

pub fn p3_apply(x: &[Rational; 3]) -> [Rational; 3] {
    let k = |n: i64| Rational::from_integer(n.into());
    [&x[0] * k(2), &x[1] * k(3), &x[2] * k(5)]
}

/// Strict guard at `x`, which together with `A x` in `tau` is what makes
/// `tau` forward invariant.
pub fn p3_guard_value(x: &[Rational; 3]) -> Rational {
    &x[0] + &x[1] * Rational::from_integer(2.into()) + &x[2]
}

/// Outcome of simulating the loop from `p_0..=p_n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundarySimulation {
    pub steps: u64,
    /// `(n, result)` for every point that did not survive.
    pub failures: Vec<(u32, SimResult)>,
    pub checked: u32,
}

pub fn simulate_boundary_points(n_max: u32, steps: u64) -> Result<BoundarySimulation, OracleError> {
    let spec = p3_spec();
    let mut failures = vec![];
    for n in 0..=n_max {
        let r = simulate(&spec, &boundary_point(n), steps)?;
        if r.terminated() {
            failures.push((n, r));
        }
    }
    Ok(BoundarySimulation {
        steps,
        failures,
        checked: n_max + 1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauAudit {
    pub samples: u64,
    /// Sampled points where the guard failed or `A x` left `tau`.
    pub not_invariant: Vec<[Rational; 3]>,
    /// Sampled points whose simulation terminated.
    pub terminated: Vec<[Rational; 3]>,
}

/// Samples `tau` and checks one-step invariance and survival for `steps`.
pub fn audit_tau(samples: u64, steps: u64, seed: u64) -> Result<TauAudit, OracleError> {
    let spec = p3_spec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audit = TauAudit {
        samples,
        not_invariant: vec![],
        terminated: vec![],
    };
    for _ in 0..samples {
        let x = sample_tau(&mut rng);
        if !p3_guard_value(&x).is_positive() || !tau_member(&p3_apply(&x)) {
            audit.not_invariant.push(x.clone());
        }
        if simulate(&spec, &x, steps)?.terminated() {
            audit.terminated.push(x);
        }
    }
    Ok(audit)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub coeff: Rational,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
}

/// Polynomial in `x1, x2, x3` with nonzero coefficients on distinct
/// exponent triples. The empty polynomial is zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly3 {
    monomials: Vec<Monomial>,
}

impl Poly3 {
    /// Merges like terms and drops the ones that cancel.
    pub fn new(terms: impl IntoIterator<Item = Monomial>) -> Poly3 {
        let mut acc: BTreeMap<(u32, u32, u32), Rational> = BTreeMap::new();
        for m in terms {
            *acc.entry((m.alpha, m.beta, m.gamma))
                .or_insert_with(Rational::zero) += m.coeff;
        }
        Poly3 {
            monomials: acc
                .into_iter()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|((alpha, beta, gamma), coeff)| Monomial {
                    coeff,
                    alpha,
                    beta,
                    gamma,
                })
                .collect(),
        }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn eval(&self, x: &[Rational; 3]) -> Rational {
        self.monomials
            .iter()
            .map(|m| {
                &m.coeff
                    * Pow::pow(&x[0], m.alpha)
                    * Pow::pow(&x[1], m.beta)
                    * Pow::pow(&x[2], m.gamma)
            })
            .sum()
    }

    /// Parses sums of terms like `c*x1^a*x2^b*x3^g`, e.g. `2*x1^2 - 1/3*x2`.
    pub fn parse(text: &str) -> Result<Poly3, Demo3Error> {
        PolyParser {
            chars: text.chars().collect(),
            pos: 0,
        }
        .poly()
    }
}

impl fmt::Display for Poly3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            let neg = m.coeff.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let c = m.coeff.abs();
            let mut parts = vec![];
            if !c.is_one() || (m.alpha, m.beta, m.gamma) == (0, 0, 0) {
                parts.push(render_rational(&c));
            }
            for (name, e) in [("x1", m.alpha), ("x2", m.beta), ("x3", m.gamma)] {
                match e {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

struct PolyParser {
    chars: Vec<char>,
    pos: usize,
}

impl PolyParser {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, Demo3Error> {
        Err(Demo3Error::Parse {
            col: self.pos + 1,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<BigInt, Demo3Error> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("ascii digits"))
    }

    fn poly(mut self) -> Result<Poly3, Demo3Error> {
        let mut terms = vec![];
        let mut first = true;
        loop {
            let neg = if self.eat('-') {
                true
            } else {
                if !self.eat('+') && !first {
                    break;
                }
                false
            };
            first = false;
            let mut m = self.term()?;
            if neg {
                m.coeff = -m.coeff;
            }
            terms.push(m);
        }
        if self.peek().is_some() {
            return self.err("unexpected character");
        }
        Ok(Poly3::new(terms))
    }

    fn term(&mut self) -> Result<Monomial, Demo3Error> {
        let mut m = Monomial {
            coeff: Rational::one(),
            alpha: 0,
            beta: 0,
            gamma: 0,
        };
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let n = self.digits()?;
                    let d = if self.eat('/') {
                        self.digits()?
                    } else {
                        BigInt::one()
                    };
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    m.coeff *= Rational::new(n, d);
                }
                Some('x') => {
                    self.pos += 1;
                    let idx = self.digits()?;
                    let e = if self.eat('^') {
                        match u32::try_from(self.digits()?) {
                            Ok(e) => e,
                            Err(_) => return self.err("exponent too large"),
                        }
                    } else {
                        1
                    };
                    match idx.to_string().as_str() {
                        "1" => m.alpha += e,
                        "2" => m.beta += e,
                        "3" => m.gamma += e,
                        _ => return self.err("only x1, x2, x3 are allowed"),
                    }
                }
                _ => return self.err("expected a coefficient or a variable"),
            }
            if !self.eat('*') {
                return Ok(m);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundInfo {
    /// From this `n` on, `f(p_n) != 0`.
    pub n: u32,
    /// `c_i = b_i (-1)^beta_i` sorted by decreasing `t_i`.
    pub effective: Vec<(Rational, Rational)>,
}

/// `f(p_n) = sum c_i t_i^n` with `c_i = b_i (-1)^beta_i` and
/// `t_i = 2^-alpha 3^-beta 5^-gamma`. Returns the least `N` with
/// `|c_1| (t_1/t_2)^N > sum_{j>=2} |c_j|`, where `t_1 > t_2` are the two
/// largest; from there on the leading term dominates the rest.
pub fn nonvanishing_bound(f: &Poly3) -> Result<u32, Demo3Error> {
    nonvanishing_bound_info(f).map(|b| b.n)
}

pub fn nonvanishing_bound_info(f: &Poly3) -> Result<BoundInfo, Demo3Error> {
    if f.is_zero() {
        return Err(Demo3Error::ZeroPolynomial);
    }
    let mut eff: Vec<(Rational, Rational)> = f
        .monomials()
        .iter()
        .map(|m| {
            let c = if m.beta % 2 == 1 {
                -m.coeff.clone()
            } else {
                m.coeff.clone()
            };
            let t = Rational::new(
                BigInt::one(),
                BigInt::from(2).pow(m.alpha)
                    * BigInt::from(3).pow(m.beta)
                    * BigInt::from(5).pow(m.gamma),
            );
            (c, t)
        })
        .collect();
    eff.sort_by(|a, b| b.1.cmp(&a.1));
    assert!(
        eff.windows(2).all(|w| w[0].1 != w[1].1),
        "monomial values must be pairwise distinct"
    );
    if eff.len() == 1 {
        return Ok(BoundInfo {
            n: 0,
            effective: eff,
        });
    }
    let lead = eff[0].0.abs();
    let ratio = &eff[0].1 / &eff[1].1;
    let rest: Rational = eff[1..].iter().map(|(c, _)| c.abs()).sum();
    let mut n = 0u32;
    let mut lhs = lead;
    while lhs <= rest {
        lhs *= &ratio;
        n += 1;
    }
    Ok(BoundInfo { n, effective: eff })
}

/// `f(p_n)` for `n` in `from..=to`, exactly; returns the `n` where it is zero.
pub fn audit_nonvanishing(f: &Poly3, from: u32, to: u32) -> Vec<u32> {
    (from..=to)
        .filter(|&n| f.eval(&boundary_point(n)).is_zero())
        .collect()
}

/// Random nonzero polynomial: up to `max_terms` monomials, exponents up to
/// `max_exp`, integer coefficients in `[-max_coeff, max_coeff] \ {0}`.
pub fn random_poly3<R: Rng + ?Sized>(
    rng: &mut R,
    max_terms: usize,
    max_exp: u32,
    max_coeff: i64,
) -> Poly3 {
    loop {
        let k = rng.gen_range(1..=max_terms);
        let terms: Vec<Monomial> = (0..k)
            .map(|_| {
                let mut c = 0;
                while c == 0 {
                    c = rng.gen_range(-max_coeff..=max_coeff);
                }
                Monomial {
                    coeff: Rational::from_integer(c.into()),
                    alpha: rng.gen_range(0..=max_exp),
                    beta: rng.gen_range(0..=max_exp),
                    gamma: rng.gen_range(0..=max_exp),
                }
            })
            .collect();
        let p = Poly3::new(terms);
        if !p.is_zero() {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::oracle::Outcome;

    #[test]
    fn spec_shape() {
        let s = p3_spec();
        assert_eq!(s.guard().row(0), &[rat(1, 1), rat(2, 1), rat(1, 1)]);
        assert_eq!(s.guard_strict(), &[false]);
        assert_eq!(
            s.update(),
            &Matrix::diagonal(vec![rat(2, 1), rat(3, 1), rat(5, 1)])
        );
    }

    #[test]
    fn boundary_points() {
        assert_eq!(boundary_point(0), [rat(1, 1), rat(-1, 1), rat(1, 1)]);
        assert_eq!(boundary_point(1), [rat(1, 2), rat(-1, 3), rat(1, 5)]);
        assert_eq!(boundary_point(2), [rat(1, 4), rat(-1, 9), rat(1, 25)]);
    }

    #[test]
    fn boundary_guard_values() {
        let r = check_boundary_guard(50).unwrap();
        assert!(r.holds());
        assert_eq!(r.values[0], BigInt::from(1));
        assert_eq!(r.values[1], BigInt::from(11));
        assert_eq!(check_boundary_guard(0), Err(Demo3Error::EmptyRange));
    }

    #[test]
    fn boundary_points_survive() {
        let spec = p3_spec();
        for n in 0..=5 {
            let r = simulate(&spec, &boundary_point(n), 50).unwrap();
            assert_eq!((r.outcome, r.steps), (Outcome::Survived, 50));
        }
    }

    #[test]
    fn tau_audit_is_clean() {
        let a = audit_tau(200, 30, 1).unwrap();
        assert!(a.not_invariant.is_empty() && a.terminated.is_empty());
        assert_eq!(simulate_boundary_points(20, 50).unwrap().failures, vec![]);
    }

    #[test]
    fn tau_examples() {
        assert!(tau_member(&[rat(0, 1), rat(0, 1), rat(1, 1)]));
        assert!(!tau_member(&[rat(1, 1), rat(0, 1), rat(1, 1)]));
        assert!(!tau_member(&[rat(0, 1), rat(0, 1), rat(-1, 1)]));
    }

    #[test]
    fn tau_is_forward_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let x = sample_tau(&mut rng);
            assert!(p3_guard_value(&x).is_positive());
            assert!(tau_member(&p3_apply(&x)));
        }
    }

    #[test]
    fn poly_parse_and_render() {
        let p = Poly3::parse("2*x1^2 - 1/3*x2").unwrap();
        assert_eq!(p.to_string(), "2*x1^2 - 1/3*x2");
        let p = Poly3::parse("x1*x2 + x3").unwrap();
        assert_eq!(p.monomials().len(), 2);
        assert!(Poly3::parse("0").unwrap().is_zero());
        assert!(Poly3::parse("x1 - x1").unwrap().is_zero());
        assert!(Poly3::parse("x4").is_err());
        assert!(Poly3::parse("x1 +").is_err());
        assert!(Poly3::parse("1/0").is_err());
        let p = Poly3::parse("-x2^3 + 7").unwrap();
        assert_eq!(Poly3::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(nonvanishing_bound(&Poly3::parse("x1").unwrap()), Ok(0));
        let f = Poly3::parse("x1 - x2").unwrap();
        let n = nonvanishing_bound(&f).unwrap();
        assert_eq!(n, 1);
        assert!(audit_nonvanishing(&f, 0, 200).is_empty());
        assert_eq!(
            nonvanishing_bound(&Poly3::parse("0").unwrap()),
            Err(Demo3Error::ZeroPolynomial)
        );
    }

    #[test]
    fn bound_beats_actual_zero() {
        // 2*x1 + 3*x2 vanishes at n = 1
        let f = Poly3::parse("2*x1 + 3*x2").unwrap();
        assert_eq!(audit_nonvanishing(&f, 0, 5), vec![1]);
        let n = nonvanishing_bound(&f).unwrap();
        assert!(n > 1);
        assert!(audit_nonvanishing(&f, n, n + 200).is_empty());
    }
}
