//! Predicate syntax trees and their concrete text syntax.
//!
//! ```text
//! pred  := "true" | "false"
//!        | "[" bound "-" bound "]"
//!        | "div" int | "atom" value
//!        | "!" pred
//!        | "(" pred ")" | "(" pred ("&" pred)+ ")" | "(" pred ("|" pred)+ ")"
//! bound := value | "inf" | "-inf"
//! value := int | "'" char "'" | "U+" hex
//! ```

use std::fmt::Write as _;

use super::{Algebra, AlgebraError};

/// A predicate over a single free variable ranging over the algebra's domain.
///
/// Values are stored as `i64`: codepoints for [`Algebra::Unicode`], plain
/// integers for [`Algebra::Integer`]. `i64::MIN` and `i64::MAX` act as the
/// infinite interval bounds of the integer algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pred {
    False,
    True,
    /// Inclusive interval `[lo, hi]`.
    Range { lo: i64, hi: i64 },
    /// `x mod k = 0`.
    Div(u64),
    Atom(i64),
    Not(Box<Pred>),
    And(Vec<Pred>),
    Or(Vec<Pred>),
}

impl Pred {
    pub fn range(lo: i64, hi: i64) -> Pred {
        Pred::Range { lo, hi }
    }

    /// `x < hi` for integers.
    pub fn less_than(hi: i64) -> Pred {
        Pred::range(i64::MIN, hi - 1)
    }

    /// `x > lo` for integers.
    pub fn greater_than(lo: i64) -> Pred {
        Pred::range(lo + 1, i64::MAX)
    }

    pub fn char(c: char) -> Pred {
        Pred::Atom(c as i64)
    }

    pub fn char_range(lo: char, hi: char) -> Pred {
        Pred::range(lo as i64, hi as i64)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Pred) -> Pred {
        Pred::Not(Box::new(p))
    }

    pub fn and(p: Pred, q: Pred) -> Pred {
        Pred::And(vec![p, q])
    }

    pub fn or(p: Pred, q: Pred) -> Pred {
        Pred::Or(vec![p, q])
    }

    /// Conjunction of any number of operands; `true` when empty.
    pub fn and_all(mut ps: Vec<Pred>) -> Pred {
        match ps.len() {
            0 => Pred::True,
            1 => ps.pop().unwrap(),
            _ => Pred::And(ps),
        }
    }

    /// Disjunction of any number of operands; `false` when empty.
    pub fn or_all(mut ps: Vec<Pred>) -> Pred {
        match ps.len() {
            0 => Pred::False,
            1 => ps.pop().unwrap(),
            _ => Pred::Or(ps),
        }
    }

    /// Structural evaluation of the denotation at `x`.
    pub fn eval(&self, x: i64) -> bool {
        match self {
            Pred::False => false,
            Pred::True => true,
            Pred::Range { lo, hi } => *lo <= x && x <= *hi,
            Pred::Div(k) => *k != 0 && (x as i128).rem_euclid(*k as i128) == 0,
            Pred::Atom(a) => x == *a,
            Pred::Not(p) => !p.eval(x),
            Pred::And(ps) => ps.iter().all(|p| p.eval(x)),
            Pred::Or(ps) => ps.iter().any(|p| p.eval(x)),
        }
    }

    pub(crate) fn visit_literals(&self, f: &mut impl FnMut(&Pred)) {
        match self {
            Pred::Not(p) => p.visit_literals(f),
            Pred::And(ps) | Pred::Or(ps) => ps.iter().for_each(|p| p.visit_literals(f)),
            lit => f(lit),
        }
    }
}

pub(crate) fn format_value(alg: Algebra, v: i64, out: &mut String) {
    match alg {
        Algebra::Unicode => match char::from_u32(v as u32) {
            Some(c) if (0x20..0x7f).contains(&v) && c != '\'' && c != '\\' => {
                let _ = write!(out, "'{c}'");
            }
            _ => {
                let _ = write!(out, "U+{v:04X}");
            }
        },
        Algebra::Integer => match v {
            i64::MIN => out.push_str("-inf"),
            i64::MAX => out.push_str("inf"),
            _ => {
                let _ = write!(out, "{v}");
            }
        },
    }
}

pub(crate) fn format(alg: Algebra, p: &Pred, out: &mut String) {
    match p {
        Pred::False => out.push_str("false"),
        Pred::True => out.push_str("true"),
        Pred::Range { lo, hi } => {
            out.push('[');
            format_value(alg, *lo, out);
            out.push('-');
            format_value(alg, *hi, out);
            out.push(']');
        }
        Pred::Div(k) => {
            let _ = write!(out, "div {k}");
        }
        Pred::Atom(a) => {
            out.push_str("atom ");
            format_value(alg, *a, out);
        }
        Pred::Not(q) => {
            out.push_str("!(");
            format(alg, q, out);
            out.push(')');
        }
        Pred::And(ps) | Pred::Or(ps) => {
            let sep = if matches!(p, Pred::And(_)) { " & " } else { " | " };
            out.push('(');
            for (i, q) in ps.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                format(alg, q, out);
            }
            out.push(')');
        }
    }
}

pub(crate) struct Parser<'a> {
    alg: Algebra,
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(alg: Algebra, src: &'a str) -> Self {
        Parser { alg, src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), AlgebraError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with(kw)
            && !rest[kw.len()..].starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn parse_all(mut self) -> Result<Pred, AlgebraError> {
        let p = self.pred()?;
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("trailing input");
        }
        Ok(p)
    }

    pub(crate) fn parse_value_all(mut self) -> Result<i64, AlgebraError> {
        let v = self.value()?;
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("trailing input");
        }
        Ok(v)
    }

    fn pred(&mut self) -> Result<Pred, AlgebraError> {
        self.skip_ws();
        if self.keyword("true") {
            return Ok(Pred::True);
        }
        if self.keyword("false") {
            return Ok(Pred::False);
        }
        if self.keyword("div") {
            let k = self.unsigned()?;
            return Ok(Pred::Div(k));
        }
        if self.keyword("atom") {
            return Ok(Pred::Atom(self.value()?));
        }
        if self.eat("!") {
            return Ok(Pred::not(self.pred()?));
        }
        if self.eat("[") {
            let lo = self.bound()?;
            self.expect("-")?;
            let hi = self.bound()?;
            self.expect("]")?;
            return Ok(Pred::Range { lo, hi });
        }
        if self.eat("(") {
            let first = self.pred()?;
            if self.eat(")") {
                return Ok(first);
            }
            let op = if self.eat("&") {
                '&'
            } else if self.eat("|") {
                '|'
            } else {
                return self.err("expected `&`, `|` or `)`");
            };
            let mut ops = vec![first, self.pred()?];
            while !self.eat(")") {
                let sep = if op == '&' { "&" } else { "|" };
                self.expect(sep)?;
                ops.push(self.pred()?);
            }
            return Ok(if op == '&' { Pred::And(ops) } else { Pred::Or(ops) });
        }
        self.err("expected a predicate")
    }

    fn unsigned(&mut self) -> Result<u64, AlgebraError> {
        self.skip_ws();
        let digits: &str = {
            let r = self.rest();
            let n = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
            &r[..n]
        };
        if digits.is_empty() {
            return self.err("expected an unsigned integer");
        }
        match digits.parse::<u64>() {
            Ok(v) => {
                self.pos += digits.len();
                Ok(v)
            }
            Err(_) => self.err("integer out of range"),
        }
    }

    fn bound(&mut self) -> Result<i64, AlgebraError> {
        if self.alg == Algebra::Integer {
            if self.keyword("inf") || self.keyword("+inf") {
                return Ok(i64::MAX);
            }
            if self.keyword("-inf") {
                return Ok(i64::MIN);
            }
        }
        self.value()
    }

    fn value(&mut self) -> Result<i64, AlgebraError> {
        self.skip_ws();
        let rest = self.rest();
        if let Some(body) = rest.strip_prefix('\'') {
            let mut chars = body.chars();
            let c = match chars.next() {
                Some(c) => c,
                None => return self.err("unterminated character literal"),
            };
            if chars.next() != Some('\'') {
                return self.err("expected `'` closing the character literal");
            }
            self.pos += 2 + c.len_utf8();
            return Ok(c as i64);
        }
        if let Some(hex) = rest.strip_prefix("U+") {
            let n = hex.find(|c: char| !c.is_ascii_hexdigit()).unwrap_or(hex.len());
            if n == 0 {
                return self.err("expected hex digits after `U+`");
            }
            return match i64::from_str_radix(&hex[..n], 16) {
                Ok(v) => {
                    self.pos += 2 + n;
                    Ok(v)
                }
                Err(_) => self.err("codepoint out of range"),
            };
        }
        let neg = rest.starts_with('-');
        let body = if neg { &rest[1..] } else { rest };
        let n = body.find(|c: char| !c.is_ascii_digit()).unwrap_or(body.len());
        if n == 0 {
            return self.err("expected a value");
        }
        let text = &rest[..n + neg as usize];
        match text.parse::<i64>() {
            Ok(v) => {
                self.pos += text.len();
                Ok(v)
            }
            Err(_) => self.err("integer out of range"),
        }
    }
}
