//! Regular expressions with back-references, compiled to register automata.
//!
//! Only bounded back-references are supported: every group that is referenced
//! must match words of one fixed length `L`, and owns `L` registers. Position
//! `j` of the group stores into its `j`-th register; `\g` reads the registers
//! back in order. Patterns match the whole input.

mod benchmarks;
mod compile;
mod parse;
pub mod scaling;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{Elem, Pred};
use crate::automaton::{RegId, Sra};

pub use benchmarks::{benchmark, benchmark_patterns, pattern_source, Benchmark, BENCHMARK_NAMES};
pub use compile::compile;
pub use parse::parse;

/// Largest accepted repetition bound in `{n}` / `{n,m}`.
pub const MAX_REPEAT: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Literal(char),
    /// A character class, already desugared to a predicate over codepoints.
    Class(Pred),
    Dot,
    Concat(Vec<Node>),
    Alternation(Vec<Node>),
    Star(Box<Node>),
    Plus(Box<Node>),
    /// `child{min,max}`; `?` is `{0,1}` and `{n,}` has no upper bound.
    Repeat { child: Box<Node>, min: usize, max: Option<usize> },
    /// Capture group; indices are dense from 1 in order of opening parentheses.
    Group(usize, Box<Node>),
    Backref(usize),
}

impl Node {
    pub fn empty() -> Node {
        Node::Concat(Vec::new())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegexAst {
    pub node: Node,
    pub groups: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RegexError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("back-reference \\{index} at {pos} refers to a group that is not closed yet")]
    UnopenedGroup { pos: usize, index: usize },
    #[error("group {0} is referenced but has no fixed length; registers can only hold bounded captures")]
    UnboundedGroup(usize),
    #[error("{0} registers needed, at most {max} supported", max = crate::automaton::MAX_REGISTERS)]
    TooManyRegisters(usize),
}

/// A compiled pattern together with the registers backing each referenced group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledPattern {
    pub sra: Sra,
    /// Referenced groups only, each with its registers in position order.
    pub group_registers: BTreeMap<usize, Vec<RegId>>,
}

impl CompiledPattern {
    pub fn new(pattern: &str) -> Result<CompiledPattern, RegexError> {
        compile(&parse(pattern)?)
    }

    pub fn is_match(&self, input: &str) -> bool {
        self.sra.accepts_str(input)
    }

    pub fn is_match_word(&self, word: &[Elem]) -> bool {
        self.sra.accepts(word)
    }
}
