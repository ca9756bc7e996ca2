//! Recursive-descent parser for the supported pattern grammar.
//!
//! ```text
//! alt    := concat ('|' concat)*
//! concat := repeat*
//! repeat := atom ('*' | '+' | '?' | '{n}' | '{n,}' | '{n,m}')*
//! atom   := literal | '.' | escape | class | '(' alt ')' | '(?:' alt ')'
//! ```

use super::{Node, RegexAst, RegexError, MAX_REPEAT};
use crate::algebra::Pred;

pub fn parse(pattern: &str) -> Result<RegexAst, RegexError> {
    let mut p = Parser { chars: pattern.chars().collect(), pos: 0, groups: 0, closed: Vec::new() };
    let node = p.alternation()?;
    if p.pos < p.chars.len() {
        // Only an unmatched ')' stops the top-level alternation early.
        return Err(p.error("unmatched ')'"));
    }
    Ok(RegexAst { node, groups: p.groups })
}

pub(crate) fn digit() -> Pred {
    Pred::char_range('0', '9')
}

pub(crate) fn space() -> Pred {
    Pred::Or(vec![Pred::char_range('\t', '\r'), Pred::char(' ')])
}

pub(crate) fn word() -> Pred {
    Pred::Or(vec![Pred::char_range('0', '9'), Pred::char_range('A', 'Z'), Pred::char('_'), Pred::char_range('a', 'z')])
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    groups: usize,
    /// closed[g - 1] holds once group g's ')' has been consumed.
    closed: Vec<bool>,
}

impl Parser {
    fn error(&self, message: &str) -> RegexError {
        RegexError::Syntax { pos: self.pos, message: message.to_string() }
    }

    fn peek(&self) -> Option<char> {
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

    fn alternation(&mut self) -> Result<Node, RegexError> {
        let mut branches = vec![self.concat()?];
        while self.eat('|') {
            branches.push(self.concat()?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { Node::Alternation(branches) })
    }

    fn concat(&mut self) -> Result<Node, RegexError> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            items.push(self.repeat()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Node::Concat(items) })
    }

    fn repeat(&mut self) -> Result<Node, RegexError> {
        let mut node = self.atom()?;
        loop {
            let start = self.pos;
            node = match self.peek() {
                Some('*') => Node::Star(Box::new(node)),
                Some('+') => Node::Plus(Box::new(node)),
                Some('?') => Node::Repeat { child: Box::new(node), min: 0, max: Some(1) },
                Some('{') => {
                    self.pos += 1;
                    let (min, max) = self.bounds()?;
                    if max.is_some_and(|m| m < min) {
                        self.pos = start;
                        return Err(self.error("repetition bounds out of order"));
                    }
                    self.pos -= 1;
                    Node::Repeat { child: Box::new(node), min, max }
                }
                _ => return Ok(node),
            };
            self.pos += 1;
            if self.peek() == Some('?') {
                return Err(self.error("lazy quantifiers are not supported"));
            }
        }
    }

    /// Parses `n}`, `n,}` or `n,m}` after the opening brace; leaves the
    /// cursor just past the closing brace.
    fn bounds(&mut self) -> Result<(usize, Option<usize>), RegexError> {
        let min = self.number()?;
        let max = if self.eat(',') {
            if self.peek() == Some('}') {
                None
            } else {
                Some(self.number()?)
            }
        } else {
            Some(min)
        };
        if !self.eat('}') {
            return Err(self.error("expected '}'"));
        }
        Ok((min, max))
    }

    fn number(&mut self) -> Result<usize, RegexError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<usize>() {
            Ok(n) if n <= MAX_REPEAT => Ok(n),
            _ => {
                self.pos = start;
                Err(self.error(&format!("repetition bound above {MAX_REPEAT}")))
            }
        }
    }

    fn atom(&mut self) -> Result<Node, RegexError> {
        let c = self.peek().ok_or_else(|| self.error("unexpected end of pattern"))?;
        match c {
            '(' => {
                self.pos += 1;
                let index = if self.chars[self.pos..].starts_with(&['?', ':']) {
                    self.pos += 2;
                    None
                } else if self.peek() == Some('?') {
                    return Err(self.error("only (?:...) groups are supported"));
                } else {
                    self.groups += 1;
                    self.closed.push(false);
                    Some(self.groups)
                };
                let inner = self.alternation()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(match index {
                    Some(g) => {
                        self.closed[g - 1] = true;
                        Node::Group(g, Box::new(inner))
                    }
                    None => inner,
                })
            }
            '*' | '+' | '?' | '{' => Err(self.error("repetition without an operand")),
            ')' => Err(self.error("unmatched ')'")),
            '.' => {
                self.pos += 1;
                Ok(Node::Dot)
            }
            '[' => {
                self.pos += 1;
                self.class().map(Node::Class)
            }
            '\\' => {
                self.pos += 1;
                let start = self.pos - 1;
                let e = self.peek().ok_or_else(|| self.error("dangling escape"))?;
                if let Some(d) = e.to_digit(10).filter(|&d| d > 0) {
                    self.pos += 1;
                    let index = d as usize;
                    if !self.closed.get(index - 1).copied().unwrap_or(false) {
                        return Err(RegexError::UnopenedGroup { pos: start, index });
                    }
                    return Ok(Node::Backref(index));
                }
                match self.escape()? {
                    Escaped::Char(c) => Ok(Node::Literal(c)),
                    Escaped::Class(p) => Ok(Node::Class(p)),
                }
            }
            _ => {
                self.pos += 1;
                Ok(Node::Literal(c))
            }
        }
    }

    /// Escape body after the backslash, shared by atoms and classes.
    fn escape(&mut self) -> Result<Escaped, RegexError> {
        let e = self.peek().ok_or_else(|| self.error("dangling escape"))?;
        let out = match e {
            'd' => Escaped::Class(digit()),
            'D' => Escaped::Class(Pred::not(digit())),
            's' => Escaped::Class(space()),
            'S' => Escaped::Class(Pred::not(space())),
            'w' => Escaped::Class(word()),
            'W' => Escaped::Class(Pred::not(word())),
            'n' => Escaped::Char('\n'),
            't' => Escaped::Char('\t'),
            'r' => Escaped::Char('\r'),
            'f' => Escaped::Char('\x0c'),
            'v' => Escaped::Char('\x0b'),
            c if c.is_ascii_alphanumeric() => return Err(self.error(&format!("unsupported escape \\{c}"))),
            c => Escaped::Char(c),
        };
        self.pos += 1;
        Ok(out)
    }

    /// Class body after '['; consumes the closing ']'.
    fn class(&mut self) -> Result<Pred, RegexError> {
        let negated = self.eat('^');
        let mut parts = Vec::new();
        let mut first = true;
        loop {
            let c = self.peek().ok_or_else(|| self.error("unterminated class"))?;
            if c == ']' && !first {
                self.pos += 1;
                break;
            }
            first = false;
            let lo = match self.class_item()? {
                Escaped::Class(p) => {
                    parts.push(p);
                    continue;
                }
                Escaped::Char(c) => c,
            };
            // A '-' right before ']' is a literal.
            if self.peek() == Some('-') && self.chars.get(self.pos + 1).is_some_and(|&c| c != ']') {
                self.pos += 1;
                let hi = match self.class_item()? {
                    Escaped::Char(c) => c,
                    Escaped::Class(_) => return Err(self.error("class escape as range bound")),
                };
                if hi < lo {
                    return Err(self.error("range bounds out of order"));
                }
                parts.push(Pred::char_range(lo, hi));
            } else {
                parts.push(Pred::char(lo));
            }
        }
        let union = Pred::or_all(parts);
        Ok(if negated { Pred::not(union) } else { union })
    }

    fn class_item(&mut self) -> Result<Escaped, RegexError> {
        let c = self.peek().ok_or_else(|| self.error("unterminated class"))?;
        self.pos += 1;
        if c == '\\' {
            if self.peek().is_some_and(|d| d.is_ascii_digit()) {
                return Err(self.error("back-reference inside a class"));
            }
            self.escape()
        } else {
            Ok(Escaped::Char(c))
        }
    }
}

enum Escaped {
    Char(char),
    Class(Pred),
}
