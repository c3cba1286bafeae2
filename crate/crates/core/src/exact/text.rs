//! Text form of exact scalars.
//!
//! Rationals render as `p/q` (or `p`), quadratic numbers as
//! `p/q+r/s*sqrt(d)` with zero terms dropped and a unit coefficient written
//! as a bare `sqrt(d)`. The parser takes the same grammar, any number of
//! signed terms, and ignores whitespace.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{ExactError, QuadNum, Rational};

pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn render_quad(x: &QuadNum) -> String {
    let a = x.rat_part();
    let b = x.quad_part();
    if b.is_zero() {
        return render_rational(a);
    }
    let root = format!("sqrt({})", x.radicand());
    let mag = b.abs();
    let quad_term = if mag.is_one() {
        root
    } else {
        format!("{}*{}", render_rational(&mag), root)
    };
    match (a.is_zero(), b.is_negative()) {
        (true, false) => quad_term,
        (true, true) => format!("-{quad_term}"),
        (false, false) => format!("{}+{quad_term}", render_rational(a)),
        (false, true) => format!("{}-{quad_term}", render_rational(a)),
    }
}

fn parse_err(text: &str, reason: impl Into<String>) -> ExactError {
    ExactError::Parse {
        text: text.to_string(),
        reason: reason.into(),
    }
}

pub fn parse_rational(text: &str) -> Result<Rational, ExactError> {
    let q = parse_quad(text)?;
    q.as_rational()
        .cloned()
        .ok_or_else(|| parse_err(text, "expected a rational number"))
}

pub fn parse_quad(text: &str) -> Result<QuadNum, ExactError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(parse_err(text, "empty"));
    }
    let mut cur = Cursor {
        s: compact.as_bytes(),
        pos: 0,
    };
    let mut total = QuadNum::zero();
    let mut first = true;
    while !cur.done() {
        let negative = match cur.peek() {
            Some(b'+') if !first => {
                cur.pos += 1;
                false
            }
            Some(b'-') => {
                cur.pos += 1;
                true
            }
            _ if first => false,
            _ => return Err(parse_err(text, "expected '+' or '-' between terms")),
        };
        first = false;
        let term = parse_term(&mut cur).map_err(|r| parse_err(text, r))?;
        let term = if negative { -term } else { term };
        total = total.checked_add(&term)?;
    }
    Ok(total)
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn done(&self) -> bool {
        self.pos >= self.s.len()
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

fn parse_term(cur: &mut Cursor<'_>) -> Result<QuadNum, String> {
    if cur.eat("sqrt(") {
        return parse_root(cur);
    }
    let numer = cur.digits().ok_or("expected a number or sqrt(..)")?;
    if cur.peek() == Some(b'.') {
        return Err("decimal literals are not exact; write a fraction".into());
    }
    let denom = if cur.eat("/") {
        let d = cur.digits().ok_or("expected a denominator")?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        d
    } else {
        BigInt::one()
    };
    let coef = Rational::new(numer, denom);
    if cur.eat("*") {
        if !cur.eat("sqrt(") {
            return Err("expected sqrt(..) after '*'".into());
        }
        let root = parse_root(cur)?;
        return Ok(root.scale(&coef));
    }
    Ok(QuadNum::from_rational(coef))
}

fn parse_root(cur: &mut Cursor<'_>) -> Result<QuadNum, String> {
    let d = cur
        .digits()
        .ok_or("expected a nonnegative integer radicand")?;
    if !cur.eat(")") {
        return Err("expected ')'".into());
    }
    QuadNum::sqrt_of(&Rational::from_integer(d)).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn render_forms() {
        assert_eq!(render_rational(&rat(-3, 6)), "-1/2");
        assert_eq!(render_rational(&int(7)), "7");
        let q = QuadNum::new(rat(1, 4), rat(1, 4), 17.into()).unwrap();
        assert_eq!(render_quad(&q), "1/4+1/4*sqrt(17)");
        let q = QuadNum::new(int(-1), int(-1), 17.into()).unwrap();
        assert_eq!(render_quad(&q), "-1-sqrt(17)");
        let q = QuadNum::new(int(0), rat(-2, 3), 5.into()).unwrap();
        assert_eq!(render_quad(&q), "-2/3*sqrt(5)");
        assert_eq!(render_quad(&QuadNum::zero()), "0");
    }

    #[test]
    fn parse_forms() {
        let q = QuadNum::new(rat(1, 4), rat(1, 4), 17.into()).unwrap();
        assert_eq!(parse_quad("1/4+1/4*sqrt(17)").unwrap(), q);
        assert_eq!(parse_quad(" 1/4 + 1/4 * sqrt(17) ").unwrap(), q);
        assert_eq!(
            parse_quad("-sqrt(8)").unwrap(),
            QuadNum::new(int(0), int(-2), 2.into()).unwrap()
        );
        assert_eq!(parse_quad("sqrt(9)").unwrap(), QuadNum::from_int(3));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
    }

    #[test]
    fn parse_errors() {
        assert!(parse_quad("").is_err());
        assert!(parse_quad("1.5").is_err());
        assert!(parse_quad("1/0").is_err());
        assert!(parse_quad("2*3").is_err());
        assert!(parse_quad("sqrt(2)+sqrt(3)").is_err());
        assert!(parse_rational("sqrt(2)").is_err());
        assert!(parse_quad("x1").is_err());
    }
}
