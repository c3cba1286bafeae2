//! Loop DSL parsing into the [`LoopSpec`] IR.
//!
//! ```text
//! while (4*x1 + x2 > 0) { x1 := -2*x1 + 4*x2; x2 := 4*x1; }
//! ```
//!
//! Assignments in the body are **simultaneous**: every right-hand side reads
//! the values from before the iteration, exactly like `x := Ax`. The body
//! above therefore means `A = [[-2, 4], [4, 0]]`; `x2 := 4*x1` uses the old
//! `x1`. Variables that are never assigned keep their value. Guards are
//! conjunctions of `expr > expr` or `expr >= expr`, normalized to
//! `lhs - rhs > 0`; every expression must be linear and homogeneous.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{render_rational, Rational};
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("non-linear term at {line}:{col}")]
    NonLinearTerm { line: usize, col: usize },
    #[error("constant term in expression at {line}:{col}; only homogeneous loops are supported")]
    NonHomogeneous { line: usize, col: usize },
    #[error("variable `{name}` at {line}:{col} is neither assigned nor used in the guard")]
    UnknownVariable {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("variable `{name}` assigned twice (at {line}:{col})")]
    DuplicateAssignment {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("analysis needs exactly 2 variables, loop has {0}")]
    UnsupportedDimension(usize),
    #[error("guard row {0} is non-strict (>=); analysis needs strict guards")]
    UnsupportedGuard(usize),
    #[error("malformed loop: {0}")]
    Malformed(String),
}

/// Homogeneous linear loop `while (Bx > 0) { x := Ax }`, one strictness
/// flag per guard row (`true` for `>`, `false` for `>=`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopSpec {
    var_names: Vec<String>,
    update: Matrix<Rational>,
    guard: Matrix<Rational>,
    guard_strict: Vec<bool>,
}

impl LoopSpec {
    pub fn new(
        var_names: Vec<String>,
        update: Matrix<Rational>,
        guard: Matrix<Rational>,
        guard_strict: Vec<bool>,
    ) -> Result<LoopSpec, FrontendError> {
        let n = var_names.len();
        if n == 0 {
            return Err(FrontendError::Malformed("no variables".into()));
        }
        if update.rows() != n || update.cols() != n {
            return Err(FrontendError::Malformed(format!(
                "update matrix is {}x{}, expected {n}x{n}",
                update.rows(),
                update.cols()
            )));
        }
        if guard.rows() == 0 || guard.cols() != n {
            return Err(FrontendError::Malformed(format!(
                "guard matrix is {}x{}, expected mx{n} with m >= 1",
                guard.rows(),
                guard.cols()
            )));
        }
        if guard_strict.len() != guard.rows() {
            return Err(FrontendError::Malformed(
                "one strictness flag per guard row".into(),
            ));
        }
        Ok(LoopSpec {
            var_names,
            update,
            guard,
            guard_strict,
        })
    }

    /// Loop with default names `x1..xn`.
    pub fn with_default_names(
        update: Matrix<Rational>,
        guard: Matrix<Rational>,
        guard_strict: Vec<bool>,
    ) -> Result<LoopSpec, FrontendError> {
        let names = (1..=update.rows()).map(|i| format!("x{i}")).collect();
        LoopSpec::new(names, update, guard, guard_strict)
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn dim(&self) -> usize {
        self.var_names.len()
    }

    /// The update matrix `A`.
    pub fn update(&self) -> &Matrix<Rational> {
        &self.update
    }

    /// The guard matrix `B`, one row per conjunct.
    pub fn guard(&self) -> &Matrix<Rational> {
        &self.guard
    }

    pub fn guard_strict(&self) -> &[bool] {
        &self.guard_strict
    }
}

impl fmt::Display for LoopSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// Accepts exactly the loops the two-variable analysis handles: `n = 2`
/// and strict guards only. The simulator has no such restriction.
pub fn validate_for_analysis(spec: &LoopSpec) -> Result<(), FrontendError> {
    if spec.dim() != 2 {
        return Err(FrontendError::UnsupportedDimension(spec.dim()));
    }
    if let Some(i) = spec.guard_strict.iter().position(|s| !s) {
        return Err(FrontendError::UnsupportedGuard(i));
    }
    Ok(())
}

/// Renders a loop back to DSL text that [`parse`] maps to the same spec.
pub fn render(spec: &LoopSpec) -> String {
    let names = &spec.var_names;
    let guard = spec
        .guard
        .row_iter()
        .zip(&spec.guard_strict)
        .map(|(row, strict)| {
            format!(
                "{} {} 0",
                render_linear(row, names),
                if *strict { ">" } else { ">=" }
            )
        })
        .collect::<Vec<_>>()
        .join(" && ");
    let body = spec
        .update
        .row_iter()
        .zip(names)
        .map(|(row, name)| format!("{name} := {};", render_linear(row, names)))
        .collect::<Vec<_>>()
        .join(" ");
    format!("while ({guard}) {{ {body} }}")
}

fn render_linear(row: &[Rational], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in row.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let term = if mag.is_one() {
            name.clone()
        } else {
            format!("{}*{name}", render_rational(&mag))
        };
        match (out.is_empty(), c.is_negative()) {
            (true, false) => out.push_str(&term),
            (true, true) => {
                out.push('-');
                out.push_str(&term);
            }
            (false, false) => {
                out.push_str(" + ");
                out.push_str(&term);
            }
            (false, true) => {
                out.push_str(" - ");
                out.push_str(&term);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Dot,
    Gt,
    Ge,
    Assign,
    Semi,
    AndAnd,
    LParen,
    RParen,
    LBrace,
    RBrace,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> FrontendError {
    FrontendError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, FrontendError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i, &mut col);
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Spanned {
                tok: Tok::Int(s.parse().expect("digits")),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(1, &mut i, &mut col);
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, len) = match two.as_str() {
            ">=" => (Tok::Ge, 2),
            ":=" => (Tok::Assign, 2),
            "&&" => (Tok::AndAnd, 2),
            _ => match c {
                '+' => (Tok::Plus, 1),
                '-' => (Tok::Minus, 1),
                '*' => (Tok::Star, 1),
                '/' => (Tok::Slash, 1),
                '^' => (Tok::Caret, 1),
                '.' => (Tok::Dot, 1),
                '>' => (Tok::Gt, 1),
                ';' => (Tok::Semi, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                _ => return Err(syntax(l0, c0, format!("unexpected character {c:?}"))),
            },
        };
        advance(len, &mut i, &mut col);
        out.push(Spanned {
            tok,
            line: l0,
            col: c0,
        });
    }
    Ok(out)
}

/// A linear form with a separate constant, as written in the source.
#[derive(Debug, Default)]
struct LinExpr {
    coeffs: Vec<(String, Rational, usize, usize)>,
    constant: Rational,
}

impl LinExpr {
    fn add_scaled(&mut self, other: LinExpr, k: &Rational) {
        for (v, c, l, col) in other.coeffs {
            self.coeffs.push((v, c * k, l, col));
        }
        self.constant += other.constant * k;
    }
}

/// Variable name with its line and column.
type VarAt = (String, usize, usize);
/// Guard expression, strictness, and position.
type GuardRow = (LinExpr, bool, (usize, usize));

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |s| (s.line, s.col))
    }

    fn err(&self, msg: impl Into<String>) -> FrontendError {
        let (l, c) = self.here();
        syntax(l, c, msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FrontendError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), FrontendError> {
        let (l, c) = self.here();
        match self.peek() {
            Some(Tok::Ident(s)) if s != "while" => {
                let s = s.clone();
                self.pos += 1;
                Ok((s, l, c))
            }
            _ => Err(self.err("expected a variable name")),
        }
    }

    fn linexpr(&mut self) -> Result<LinExpr, FrontendError> {
        let mut expr = LinExpr::default();
        let mut sign = Rational::one();
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                sign = -sign;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        loop {
            let term = self.term()?;
            expr.add_scaled(term, &sign);
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    sign = Rational::one();
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    sign = -Rational::one();
                }
                _ => return Ok(expr),
            }
        }
    }

    fn term(&mut self) -> Result<LinExpr, FrontendError> {
        let mut coef = Rational::one();
        let mut var: Option<(String, usize, usize)> = None;
        loop {
            let (k, v) = self.factor()?;
            coef *= k;
            if let Some((name, l, c)) = v {
                if var.is_some() {
                    return Err(FrontendError::NonLinearTerm { line: l, col: c });
                }
                var = Some((name, l, c));
            }
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let mut e = LinExpr::default();
        match var {
            Some((name, l, c)) => e.coeffs.push((name, coef, l, c)),
            None => e.constant = coef,
        }
        Ok(e)
    }

    /// A numeric factor, a variable (coefficient 1), or a negation of either.
    fn factor(&mut self) -> Result<(Rational, Option<VarAt>), FrontendError> {
        let (l, c) = self.here();
        match self.peek().cloned() {
            Some(Tok::Minus) => {
                self.pos += 1;
                let (k, v) = self.factor()?;
                Ok((-k, v))
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Dot) {
                    return Err(syntax(
                        l,
                        c,
                        "decimal literals are not supported; write a fraction like 3/2",
                    ));
                }
                let mut value = Rational::from_integer(n);
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            self.pos += 1;
                            value /= Rational::from_integer(d);
                        }
                        _ => return Err(self.err("expected a positive integer denominator")),
                    }
                }
                Ok((value, None))
            }
            Some(Tok::Ident(_)) => {
                let (name, l, c) = self.ident()?;
                match self.peek() {
                    Some(Tok::Caret) => Err(FrontendError::NonLinearTerm { line: l, col: c }),
                    Some(Tok::Slash) => Err(self
                        .err("division must be written as a fraction coefficient, as in 1/2*x1")),
                    _ => Ok((Rational::one(), Some((name, l, c)))),
                }
            }
            _ => Err(syntax(l, c, "expected a number or a variable")),
        }
    }

    fn guard(&mut self) -> Result<Vec<GuardRow>, FrontendError> {
        let mut rows = Vec::new();
        loop {
            let at = self.here();
            let mut lhs = self.linexpr()?;
            let strict = match self.peek() {
                Some(Tok::Gt) => true,
                Some(Tok::Ge) => false,
                _ => return Err(self.err("expected '>' or '>='")),
            };
            self.pos += 1;
            let rhs = self.linexpr()?;
            lhs.add_scaled(rhs, &-Rational::one());
            rows.push((lhs, strict, at));
            if self.peek() == Some(&Tok::AndAnd) {
                self.pos += 1;
            } else {
                return Ok(rows);
            }
        }
    }
}

type Assignment = ((String, usize, usize), LinExpr, (usize, usize));

/// Parses loop DSL text into a [`LoopSpec`].
pub fn parse(text: &str) -> Result<LoopSpec, FrontendError> {
    let toks = lex(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.col + 1));
    let mut p = Parser { toks, pos: 0, end };

    match p.peek() {
        Some(Tok::Ident(w)) if w == "while" => p.pos += 1,
        _ => return Err(p.err("expected 'while'")),
    }
    p.expect(Tok::LParen, "'('")?;
    let guard = p.guard()?;
    p.expect(Tok::RParen, "')'")?;
    p.expect(Tok::LBrace, "'{'")?;
    let mut assigns: Vec<Assignment> = Vec::new();
    while p.peek() != Some(&Tok::RBrace) {
        if p.peek().is_none() {
            return Err(p.err("expected '}'"));
        }
        let target = p.ident()?;
        p.expect(Tok::Assign, "':='")?;
        let at = p.here();
        let rhs = p.linexpr()?;
        p.expect(Tok::Semi, "';'")?;
        if assigns.iter().any(|(t, _, _)| t.0 == target.0) {
            return Err(FrontendError::DuplicateAssignment {
                name: target.0,
                line: target.1,
                col: target.2,
            });
        }
        assigns.push((target, rhs, at));
    }
    p.pos += 1;
    if p.peek().is_some() {
        return Err(p.err("trailing input after loop body"));
    }

    for (expr, _, (l, c)) in &guard {
        if !expr.constant.is_zero() {
            return Err(FrontendError::NonHomogeneous { line: *l, col: *c });
        }
    }
    for (_, expr, (l, c)) in &assigns {
        if !expr.constant.is_zero() {
            return Err(FrontendError::NonHomogeneous { line: *l, col: *c });
        }
    }

    // Declared variables: guard mentions and assignment targets.
    let mut names: Vec<String> = Vec::new();
    let mut declare = |n: &str| {
        if !names.iter().any(|m| m == n) {
            names.push(n.to_string());
        }
    };
    for (expr, _, _) in &guard {
        for (v, _, _, _) in &expr.coeffs {
            declare(v);
        }
    }
    for ((t, _, _), _, _) in &assigns {
        declare(t);
    }
    for (_, expr, _) in &assigns {
        for (v, _, l, c) in &expr.coeffs {
            if !names.contains(v) {
                return Err(FrontendError::UnknownVariable {
                    name: v.clone(),
                    line: *l,
                    col: *c,
                });
            }
        }
    }
    if names.iter().all(|n| indexed_name(n).is_some()) {
        names.sort_by_key(|n| indexed_name(n));
    }
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let n = names.len();

    let row_of = |expr: &LinExpr| {
        let mut row = vec![Rational::zero(); n];
        for (v, c, _, _) in &expr.coeffs {
            row[index[v.as_str()]] += c;
        }
        row
    };

    let mut update = Matrix::<Rational>::identity(n);
    for ((t, _, _), expr, _) in &assigns {
        let i = index[t.as_str()];
        for (j, v) in row_of(expr).into_iter().enumerate() {
            update.set(i, j, v);
        }
    }
    let strict = guard.iter().map(|(_, s, _)| *s).collect();
    let rows = guard.iter().map(|(e, _, _)| row_of(e)).collect();
    let guard = Matrix::from_rows(rows).map_err(|e| FrontendError::Malformed(e.to_string()))?;
    LoopSpec::new(names, update, guard, strict)
}

/// `x12` -> `Some(12)`.
fn indexed_name(name: &str) -> Option<u64> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}
