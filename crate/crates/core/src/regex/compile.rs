//! Position-automaton (Glushkov) construction with registers.
//!
//! Every character-consuming leaf becomes one state; the automaton has no
//! epsilon moves, so each leaf's label sits on all transitions entering its
//! state. A leaf at offset `j` inside a referenced group stores into the
//! group's `j`-th register; a back-reference expands to one read per
//! register of its group.

use std::collections::{BTreeMap, BTreeSet};

use super::{CompiledPattern, Node, RegexAst, RegexError};
use crate::algebra::{Algebra, Pred};
use crate::automaton::{Label, RegId, RegSet, Sra, Transition, Valuation, MAX_REGISTERS};

pub fn compile(ast: &RegexAst) -> Result<CompiledPattern, RegexError> {
    let mut groups = vec![None; ast.groups + 1];
    collect_groups(&ast.node, &mut groups);
    let mut referenced = BTreeSet::new();
    collect_backrefs(&ast.node, &mut referenced);

    let mut group_registers = BTreeMap::new();
    let mut names = Vec::new();
    for &g in &referenced {
        let inner = groups[g].expect("parser only accepts backrefs to closed groups");
        let len = fixed_len(inner, &groups).ok_or(RegexError::UnboundedGroup(g))?;
        let regs: Vec<RegId> = (names.len()..names.len() + len).collect();
        names.extend((0..len).map(|j| format!("g{g}[{j}]")));
        group_registers.insert(g, regs);
    }
    if names.len() > MAX_REGISTERS {
        return Err(RegexError::TooManyRegisters(names.len()));
    }

    let mut b = Builder { groups: &groups, group_registers: &group_registers, labels: vec![None], follow: vec![Vec::new()] };
    let root = b.build(&ast.node, &[]);
    b.narrow_reads(names.len());

    let mut transitions = Vec::new();
    for &p in &root.first {
        transitions.push(b.edge(0, p));
    }
    for from in 1..b.labels.len() {
        for &to in &b.follow[from] {
            transitions.push(b.edge(from, to));
        }
    }
    let mut finals = root.last.clone();
    if root.nullable {
        finals.insert(0, 0);
    }
    let states = (0..b.labels.len()).map(|i| i.to_string()).collect();
    let regs = names.len();
    let sra = Sra::from_parts(Algebra::Unicode, names, states, 0, Valuation::empty(regs), finals, transitions);
    debug_assert!(sra.validate().is_empty());
    Ok(CompiledPattern { sra, group_registers })
}

fn collect_groups<'a>(node: &'a Node, out: &mut Vec<Option<&'a Node>>) {
    match node {
        Node::Group(g, inner) => {
            out[*g] = Some(inner);
            collect_groups(inner, out);
        }
        Node::Concat(cs) | Node::Alternation(cs) => cs.iter().for_each(|c| collect_groups(c, out)),
        Node::Star(c) | Node::Plus(c) | Node::Repeat { child: c, .. } => collect_groups(c, out),
        Node::Literal(_) | Node::Class(_) | Node::Dot | Node::Backref(_) => {}
    }
}

fn collect_backrefs(node: &Node, out: &mut BTreeSet<usize>) {
    match node {
        Node::Backref(g) => {
            out.insert(*g);
        }
        Node::Group(_, c) | Node::Star(c) | Node::Plus(c) | Node::Repeat { child: c, .. } => collect_backrefs(c, out),
        Node::Concat(cs) | Node::Alternation(cs) => cs.iter().for_each(|c| collect_backrefs(c, out)),
        Node::Literal(_) | Node::Class(_) | Node::Dot => {}
    }
}

/// Length shared by every word `node` matches, if there is one.
fn fixed_len(node: &Node, groups: &[Option<&Node>]) -> Option<usize> {
    match node {
        Node::Literal(_) | Node::Class(_) | Node::Dot => Some(1),
        Node::Concat(cs) => cs.iter().map(|c| fixed_len(c, groups)).sum(),
        Node::Alternation(cs) => {
            let first = fixed_len(&cs[0], groups)?;
            cs[1..].iter().all(|c| fixed_len(c, groups) == Some(first)).then_some(first)
        }
        Node::Star(c) | Node::Plus(c) => (fixed_len(c, groups)? == 0).then_some(0),
        Node::Repeat { child, min, max } => {
            let len = fixed_len(child, groups)?;
            if len == 0 {
                Some(0)
            } else {
                (*max == Some(*min)).then_some(len * min)
            }
        }
        Node::Group(_, c) => fixed_len(c, groups),
        // Backrefs only point backwards, so this terminates.
        Node::Backref(g) => fixed_len(groups[*g]?, groups),
    }
}

/// Glushkov summary of a subexpression: nullability plus the positions that
/// can start and end its words. Sets keep insertion order for reproducibility.
#[derive(Clone, Debug, Default)]
struct Frag {
    nullable: bool,
    first: Vec<usize>,
    last: Vec<usize>,
}

fn union_into(into: &mut Vec<usize>, from: &[usize]) {
    for &p in from {
        if !into.contains(&p) {
            into.push(p);
        }
    }
}

struct Builder<'a> {
    groups: &'a [Option<&'a Node>],
    group_registers: &'a BTreeMap<usize, Vec<RegId>>,
    /// labels[p] for positions p >= 1; index 0 is the initial state.
    labels: Vec<Option<Label>>,
    follow: Vec<Vec<usize>>,
}

impl Builder<'_> {
    fn edge(&self, from: usize, to: usize) -> Transition {
        Transition { from, label: self.labels[to].clone().expect("positions carry labels"), to }
    }

    /// Registers start empty and are only written by store positions, so a
    /// read of `r` can only see a value admitted by some guard storing into
    /// `r`. Narrowing read guards to that union keeps the language and lets
    /// reads be seen as disjoint from unrelated classes.
    fn narrow_reads(&mut self, num_registers: usize) {
        let mut stored: Vec<Vec<Pred>> = vec![Vec::new(); num_registers];
        for label in self.labels.iter().flatten() {
            for r in label.upd.iter() {
                if !stored[r].contains(&label.guard) {
                    stored[r].push(label.guard.clone());
                }
            }
        }
        for label in self.labels.iter_mut().flatten() {
            if let Some(r) = label.eq.iter().next() {
                if label.guard == Pred::True {
                    label.guard = Pred::or_all(stored[r].clone());
                }
            }
        }
    }

    fn position(&mut self, label: Label) -> Frag {
        let p = self.labels.len();
        self.labels.push(Some(label));
        self.follow.push(Vec::new());
        Frag { nullable: false, first: vec![p], last: vec![p] }
    }

    fn link(&mut self, from: &[usize], to: &[usize]) {
        for &l in from {
            union_into(&mut self.follow[l], to);
        }
    }

    fn concat(&mut self, a: Frag, b: Frag) -> Frag {
        self.link(&a.last, &b.first);
        let mut first = a.first;
        if a.nullable {
            union_into(&mut first, &b.first);
        }
        let mut last = b.last;
        if b.nullable {
            union_into(&mut last, &a.last);
        }
        Frag { nullable: a.nullable && b.nullable, first, last }
    }

    fn looped(&mut self, a: Frag, nullable: bool) -> Frag {
        self.link(&a.last.clone(), &a.first);
        Frag { nullable: a.nullable || nullable, ..a }
    }

    fn empty() -> Frag {
        Frag { nullable: true, ..Frag::default() }
    }

    /// `ctx` holds the register each enclosing referenced group assigns to
    /// the next position.
    fn build(&mut self, node: &Node, ctx: &[RegId]) -> Frag {
        let upd: RegSet = ctx.iter().copied().collect();
        match node {
            Node::Literal(c) => self.position(Label::store(Pred::char(*c), upd)),
            Node::Class(p) => self.position(Label::store(p.clone(), upd)),
            Node::Dot => self.position(Label::store(Pred::True, upd)),
            Node::Backref(g) => {
                let regs = self.group_registers[g].clone();
                let mut out = Self::empty();
                for (j, &r) in regs.iter().enumerate() {
                    let upd: RegSet = ctx.iter().map(|c| c + j).collect();
                    let f = self.position(Label::new(Pred::True, RegSet::singleton(r), RegSet::EMPTY, upd));
                    out = self.concat(out, f);
                }
                out
            }
            Node::Concat(cs) => {
                let mut out = Self::empty();
                let mut ctx = ctx.to_vec();
                for c in cs {
                    let f = self.build(c, &ctx);
                    out = self.concat(out, f);
                    if !ctx.is_empty() {
                        // Inside a referenced group every part has a fixed length.
                        let len = fixed_len(c, self.groups).unwrap_or(0);
                        ctx.iter_mut().for_each(|r| *r += len);
                    }
                }
                out
            }
            Node::Alternation(cs) => {
                let mut out = Frag::default();
                for c in cs {
                    let f = self.build(c, ctx);
                    out.nullable |= f.nullable;
                    union_into(&mut out.first, &f.first);
                    union_into(&mut out.last, &f.last);
                }
                out
            }
            Node::Star(c) => {
                let f = self.build(c, ctx);
                self.looped(f, true)
            }
            Node::Plus(c) => {
                let f = self.build(c, ctx);
                self.looped(f, false)
            }
            Node::Repeat { child, min, max } => self.repeat(child, *min, *max, ctx),
            Node::Group(g, c) => match self.group_registers.get(g) {
                Some(regs) if !regs.is_empty() => {
                    let mut inner = ctx.to_vec();
                    inner.push(regs[0]);
                    self.build(c, &inner)
                }
                _ => self.build(c, ctx),
            },
        }
    }

    /// `x{min,max}` as `min` copies followed by nested optional copies
    /// (`x(x(x)?)?`), or by a starred copy when unbounded; `x{n,}` with
    /// `n > 0` reuses the last mandatory copy as `x+`.
    fn repeat(&mut self, child: &Node, min: usize, max: Option<usize>, ctx: &[RegId]) -> Frag {
        let len = if ctx.is_empty() { 0 } else { fixed_len(child, self.groups).unwrap_or(0) };
        let at = |i: usize| -> Vec<RegId> { ctx.iter().map(|r| r + i * len).collect() };
        let mut out = Self::empty();
        for i in 0..min {
            let f = self.build(child, &at(i));
            let f = if max.is_none() && i + 1 == min { self.looped(f, false) } else { f };
            out = self.concat(out, f);
        }
        match max {
            None if min == 0 => {
                let f = self.build(child, ctx);
                let f = self.looped(f, true);
                self.concat(out, f)
            }
            None => out,
            Some(max) => {
                let copies: Vec<Frag> = (min..max).map(|i| self.build(child, &at(i))).collect();
                let mut tail = Self::empty();
                for f in copies.into_iter().rev() {
                    tail = self.concat(f, tail);
                    tail.nullable = true;
                }
                self.concat(out, tail)
            }
        }
    }
}
