//! Effective Boolean algebras over a single free variable.
//!
//! Two instances share one predicate syntax ([`Pred`]):
//!
//! * [`Algebra::Unicode`]: codepoints `0..=0x10FFFF` with interval and atom
//!   literals;
//! * [`Algebra::Integer`]: 64-bit signed integers with intervals (the extreme
//!   values stand in for ±∞), atoms and divisibility literals `x mod k = 0`.
//!
//! Satisfiability, cardinality thresholds and witnesses are decided exactly
//! by normalising a predicate into disjoint cells (see `cells`).

mod cells;
mod minterm;
mod pred;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use cells::Cells;
pub use minterm::{BasisId, Minterm, MintermSet};
pub use pred::Pred;

pub const MAX_CODEPOINT: i64 = 0x10FFFF;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    Unicode,
    Integer,
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algebra::Unicode => "unicode",
            Algebra::Integer => "integer",
        })
    }
}

/// A domain element tagged with the algebra it belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Char(u32),
    Int(i64),
}

impl Elem {
    pub fn value(self) -> i64 {
        match self {
            Elem::Char(c) => c as i64,
            Elem::Int(i) => i,
        }
    }

    pub fn algebra(self) -> Algebra {
        match self {
            Elem::Char(_) => Algebra::Unicode,
            Elem::Int(_) => Algebra::Integer,
        }
    }
}

impl From<char> for Elem {
    fn from(c: char) -> Self {
        Elem::Char(c as u32)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        pred::format_value(self.algebra(), self.value(), &mut s);
        f.write_str(&s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Not,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element {elem} does not belong to the {algebra} algebra")]
    InstanceMismatch { algebra: Algebra, elem: Elem },
    #[error("value {value} lies outside the {algebra} domain")]
    OutOfDomain { algebra: Algebra, value: i64 },
    #[error("`{literal}` is not a literal of the {algebra} algebra")]
    UnsupportedLiteral { algebra: Algebra, literal: String },
    #[error("{connective:?} takes {expected} operand(s), got {got}")]
    Arity { connective: Connective, expected: &'static str, got: usize },
    #[error("predicate syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

impl Algebra {
    pub fn contains_value(self, v: i64) -> bool {
        match self {
            Algebra::Unicode => (0..=MAX_CODEPOINT).contains(&v),
            Algebra::Integer => true,
        }
    }

    /// Tags a raw value as an element of this algebra.
    pub fn elem(self, v: i64) -> Result<Elem, AlgebraError> {
        match self {
            Algebra::Unicode if self.contains_value(v) => Ok(Elem::Char(v as u32)),
            Algebra::Unicode => Err(AlgebraError::OutOfDomain { algebra: self, value: v }),
            Algebra::Integer => Ok(Elem::Int(v)),
        }
    }

    pub(crate) fn elem_unchecked(self, v: i64) -> Elem {
        match self {
            Algebra::Unicode => Elem::Char(v as u32),
            Algebra::Integer => Elem::Int(v),
        }
    }

    pub fn check_elem(self, a: Elem) -> Result<(), AlgebraError> {
        if a.algebra() == self {
            Ok(())
        } else {
            Err(AlgebraError::InstanceMismatch { algebra: self, elem: a })
        }
    }

    /// Rejects literals that do not belong to this instance.
    pub fn check(self, p: &Pred) -> Result<(), AlgebraError> {
        let mut result = Ok(());
        p.visit_literals(&mut |lit| {
            if result.is_err() {
                return;
            }
            result = match lit {
                Pred::Div(k) if self == Algebra::Unicode || *k == 0 || *k > cells::MAX_MODULUS => {
                    Err(AlgebraError::UnsupportedLiteral { algebra: self, literal: self.format(lit) })
                }
                Pred::Atom(a) if !self.contains_value(*a) => {
                    Err(AlgebraError::OutOfDomain { algebra: self, value: *a })
                }
                Pred::Range { lo, hi } if self == Algebra::Unicode => {
                    match [lo, hi].into_iter().find(|v| !self.contains_value(**v)) {
                        Some(v) => Err(AlgebraError::OutOfDomain { algebra: self, value: *v }),
                        None => Ok(()),
                    }
                }
                _ => Ok(()),
            };
        });
        result
    }

    pub fn denotes(self, p: &Pred, a: Elem) -> Result<bool, AlgebraError> {
        self.check_elem(a)?;
        Ok(p.eval(a.value()))
    }

    pub fn build(self, connective: Connective, mut operands: Vec<Pred>) -> Result<Pred, AlgebraError> {
        for p in &operands {
            self.check(p)?;
        }
        match connective {
            Connective::Not if operands.len() == 1 => Ok(Pred::not(operands.pop().unwrap())),
            Connective::And if operands.len() >= 2 => Ok(Pred::And(operands)),
            Connective::Or if operands.len() >= 2 => Ok(Pred::Or(operands)),
            _ => Err(AlgebraError::Arity {
                connective,
                expected: if connective == Connective::Not { "1" } else { "at least 2" },
                got: operands.len(),
            }),
        }
    }

    pub(crate) fn cells(self, p: &Pred) -> Cells {
        Cells::of(self, p)
    }

    pub fn is_sat(self, p: &Pred) -> bool {
        !self.cells(p).is_empty()
    }

    /// Whether the two predicates denote the same set.
    pub fn equivalent(self, p: &Pred, q: &Pred) -> bool {
        self.cells(p).xor(&self.cells(q)).is_empty()
    }

    /// `|[[p]]| ≥ k`.
    ///
    /// Equivalent to `k` rounds of witness extraction with exclusion, but
    /// answered by a capped count over the cell decomposition.
    pub fn has_min_size(self, p: &Pred, k: u64) -> bool {
        self.cells(p).count_capped(k as u128) >= k as u128
    }

    /// The least element of `[[p]] \ excluded` under the algebra's witness
    /// order: ascending codepoints, or `0, 1, -1, 2, -2, …` for integers.
    pub fn witness(self, p: &Pred, excluded: &[Elem]) -> Option<Elem> {
        let points: Vec<i64> = excluded.iter().map(|e| e.value()).collect();
        self.cells(p).without_points(self, &points).least(self).map(|v| self.elem_unchecked(v))
    }

    /// Members of `[[p]]` within `[lo, hi]`, ascending.
    pub fn enumerate(self, p: &Pred, lo: i64, hi: i64) -> Vec<Elem> {
        self.cells(&Pred::and(p.clone(), Pred::range(lo, hi)))
            .elements()
            .map(|v| self.elem_unchecked(v))
            .collect()
    }

    pub fn minterms(self, preds: &[Pred]) -> MintermSet {
        MintermSet::new(self, preds)
    }

    pub fn parse(self, src: &str) -> Result<Pred, AlgebraError> {
        let p = pred::Parser::new(self, src).parse_all()?;
        self.check(&p)?;
        Ok(p)
    }

    /// Parses a single value literal (`42`, `'c'`, `U+0041`).
    pub fn parse_value(self, src: &str) -> Result<Elem, AlgebraError> {
        let v = pred::Parser::new(self, src).parse_value_all()?;
        self.elem(v)
    }

    pub fn format(self, p: &Pred) -> String {
        let mut s = String::new();
        pred::format(self, p, &mut s);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_syntax_round_trips() {
        let alg = Algebra::Integer;
        for src in [
            "true",
            "false",
            "[-5--1]",
            "[0-inf]",
            "[-inf-4]",
            "div 3",
            "atom -7",
            "!(atom 0)",
            "(div 3 & !(atom 0))",
            "(([0-10] & div 5) | [11-inf] | [-inf--1])",
        ] {
            let p = alg.parse(src).unwrap();
            assert_eq!(alg.format(&p), src);
        }
    }

    #[test]
    fn unicode_literals() {
        let alg = Algebra::Unicode;
        let p = alg.parse("(['a'-'z'] | atom U+00E9)").unwrap();
        assert_eq!(p, Pred::or(Pred::char_range('a', 'z'), Pred::Atom(0xE9)));
        assert_eq!(alg.format(&p), "(['a'-'z'] | atom U+00E9)");
        assert_eq!(alg.format(&Pred::char('\'')), "atom U+0027");
        assert!(alg.parse("div 2").is_err());
        assert!(alg.parse("atom U+110000").is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = Algebra::Integer.parse("(div 3 & )").unwrap_err();
        assert!(matches!(err, AlgebraError::Syntax { pos: 9, .. }), "{err:?}");
        assert!(Algebra::Integer.parse("true false").is_err());
    }

    #[test]
    fn witness_order() {
        let alg = Algebra::Integer;
        assert_eq!(alg.witness(&Pred::True, &[]), Some(Elem::Int(0)));
        let ex = [Elem::Int(0), Elem::Int(1)];
        assert_eq!(alg.witness(&Pred::True, &ex), Some(Elem::Int(-1)));
        assert_eq!(alg.witness(&Pred::range(-9, -3), &[]), Some(Elem::Int(-3)));
        assert_eq!(alg.witness(&Pred::and(Pred::Div(4), Pred::range(-6, 9)), &[Elem::Int(0)]), Some(Elem::Int(4)));
        assert_eq!(Algebra::Unicode.witness(&Pred::True, &[]), Some(Elem::Char(0)));
    }

    #[test]
    fn build_checks_arity() {
        let alg = Algebra::Integer;
        assert!(alg.build(Connective::Not, vec![]).is_err());
        assert!(alg.build(Connective::And, vec![Pred::True]).is_err());
        assert!(Algebra::Unicode.build(Connective::Or, vec![Pred::True, Pred::Div(2)]).is_err());
    }

    #[test]
    fn extreme_moduli_and_bounds() {
        let alg = Algebra::Integer;
        let p = Pred::and(Pred::Div(7), Pred::range(i64::MAX - 20, i64::MAX));
        assert!(alg.has_min_size(&p, 3));
        assert!(!alg.has_min_size(&p, 4));
        assert!(alg.has_min_size(&Pred::True, u64::MAX));
        let q = Pred::and(Pred::Div(6), Pred::not(Pred::Div(3)));
        assert!(!alg.is_sat(&q));
    }
}
