//! Translation of arbitrary SRAs into single-valued form.
//!
//! A single-valued SRA keeps register contents pairwise distinct and only
//! uses two label shapes: `read(r) = ({r}, ∅, ∅)` and
//! `fresh(r) = (∅, R, {r})`.
//!
//! The translation tracks, in each state `(q, f)`, a map `f : R → R′` from
//! the source registers to the registers of the output, maintaining
//! `v = w ∘ f` between a source valuation `v` and the output valuation `w`.
//! The output has one register more than the input (`R′ = R ⊎ {r̂}`), so `f`
//! is never surjective and a fresh input value always has a free slot: the
//! source's "read a fresh value but store it nowhere" case is a `fresh`
//! transition into the least register outside the image of `f`. Registers of
//! `w` that fall out of the image of `f` keep stale values; an input equal to
//! such a value is fresh for the source and handled by a `read` transition.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::algebra::Pred;
use crate::automaton::{Label, RegId, RegSet, Sra, StateId, Transition, Valuation, MAX_REGISTERS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SvKind {
    Read(RegId),
    Fresh(RegId),
    /// A fresh value that is stored nowhere, encoded as `(∅, R, ∅)`.
    Bullet,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SvLabel {
    pub kind: SvKind,
    pub guard: Pred,
}

impl SvLabel {
    /// The `E/I/U` encoding over `num_registers` registers.
    pub fn to_label(&self, num_registers: usize) -> Label {
        let all = RegSet::all(num_registers);
        match self.kind {
            SvKind::Read(r) => Label::read(self.guard.clone(), r),
            SvKind::Fresh(r) => Label::fresh(self.guard.clone(), r, num_registers),
            SvKind::Bullet => Label::new(self.guard.clone(), RegSet::EMPTY, all, RegSet::EMPTY),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SvError {
    #[error("transition {0} is not a read, fresh or bullet label")]
    NotSvLabel(usize),
    #[error("initial valuation is not injective")]
    NotInjective,
    #[error("translation needs {0} registers, above the supported maximum")]
    TooManyRegisters(usize),
}

/// Classifies a label as `read`, `fresh` or `bullet`, if it has one of those shapes.
pub fn classify(label: &Label, num_registers: usize) -> Option<SvKind> {
    let all = RegSet::all(num_registers);
    if label.eq.len() == 1 && label.neq.is_empty() && label.upd.is_empty() {
        return label.eq.iter().next().map(SvKind::Read);
    }
    if label.eq.is_empty() && label.neq == all {
        return match label.upd.len() {
            0 => Some(SvKind::Bullet),
            1 => label.upd.iter().next().map(SvKind::Fresh),
            _ => None,
        };
    }
    None
}

/// The `read`/`fresh` kind of every transition, or `None` unless the
/// automaton is single-valued.
pub fn sv_kinds(s: &Sra) -> Option<Vec<SvKind>> {
    if !s.initial_valuation().is_injective() {
        return None;
    }
    s.transitions()
        .iter()
        .map(|t| match classify(&t.label, s.num_registers()) {
            Some(SvKind::Bullet) | None => None,
            k => k,
        })
        .collect()
}

pub fn is_single_valued(s: &Sra) -> bool {
    sv_kinds(s).is_some()
}

/// A state `(q, f)` of the translation; `f[x]` is the output register
/// holding source register `x`'s value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct SvState {
    base: StateId,
    f: Vec<u8>,
}

fn preimage(f: &[u8], r: usize) -> RegSet {
    f.iter().enumerate().filter(|(_, &t)| t as usize == r).map(|(x, _)| x).collect()
}

fn redirect(f: &[u8], upd: RegSet, r: usize) -> Vec<u8> {
    let mut g = f.to_vec();
    for x in upd.iter() {
        g[x] = r as u8;
    }
    g
}

/// A candidate output transition: `read` or `fresh` into `reg`.
struct Move {
    fresh: bool,
    reg: usize,
    target: SvState,
}

/// Applies rules (reg) and (fresh) to one source transition.
fn moves(state: &SvState, t: &Transition, written: RegSet, width: usize) -> Vec<Move> {
    let l = &t.label;
    let mut out = Vec::new();
    // (reg): the input equals the value held by output register r.
    for r in written.iter() {
        let holders = preimage(&state.f, r);
        if l.eq.is_subset(holders) && l.neq.intersection(holders).is_empty() {
            out.push(Move { fresh: false, reg: r, target: SvState { base: t.to, f: redirect(&state.f, l.upd, r) } });
        }
    }
    // (fresh): the input is new; it goes to the least register whose
    // current holders are all overwritten.
    if l.eq.is_empty() {
        let r = (0..width).find(|&r| preimage(&state.f, r).is_subset(l.upd)).expect("f is never surjective onto R′");
        out.push(Move { fresh: true, reg: r, target: SvState { base: t.to, f: redirect(&state.f, l.upd, r) } });
    }
    out
}

fn spare_name(s: &Sra) -> String {
    let mut name = String::from("r^");
    while s.register_names().contains(&name) {
        name.push('^');
    }
    name
}

/// A bisimilar single-valued SRA with one more register than `s`.
///
/// Only states reachable from the initial one are built. Registers of the
/// output that are never written are not read from.
pub fn to_single_valued(s: &Sra) -> Result<Sra, SvError> {
    let n = s.num_registers();
    let width = n + 1;
    if width > MAX_REGISTERS {
        return Err(SvError::TooManyRegisters(width));
    }
    // v0′ keeps each value in the first register holding it; f0 sends every
    // other holder there and empty registers to themselves.
    let v0 = s.initial_valuation();
    let mut w0 = vec![None; width];
    let mut f0 = vec![0u8; n];
    for x in 0..n {
        match v0.get(x) {
            None => f0[x] = x as u8,
            Some(a) => {
                let first = (0..n).find(|&y| v0.get(y) == Some(a)).unwrap();
                f0[x] = first as u8;
                w0[first] = Some(a);
            }
        }
    }
    let initial_written: RegSet = (0..width).filter(|&r| w0[r].is_some()).collect();

    let start = SvState { base: s.initial(), f: f0 };
    let mut ids: HashMap<SvState, usize> = HashMap::from([(start.clone(), 0)]);
    let mut states = vec![start];
    let mut written = vec![initial_written];
    let mut queue = VecDeque::from([0usize]);
    let mut queued = vec![true];
    // Registers written on some path only grow, so states are revisited
    // until their written sets stabilise.
    while let Some(id) = queue.pop_front() {
        queued[id] = false;
        let state = states[id].clone();
        let w = written[id];
        for &ti in s.outgoing(state.base) {
            for m in moves(&state, &s.transitions()[ti], w, width) {
                let tw = if m.fresh { w.union(RegSet::singleton(m.reg)) } else { w };
                let tid = match ids.get(&m.target) {
                    Some(&tid) => {
                        if tw.is_subset(written[tid]) {
                            continue;
                        }
                        written[tid] = written[tid].union(tw);
                        tid
                    }
                    None => {
                        let tid = states.len();
                        ids.insert(m.target.clone(), tid);
                        states.push(m.target);
                        written.push(tw);
                        queued.push(false);
                        tid
                    }
                };
                if !queued[tid] {
                    queued[tid] = true;
                    queue.push_back(tid);
                }
            }
        }
    }

    let mut transitions = Vec::new();
    for (id, state) in states.iter().enumerate() {
        for &ti in s.outgoing(state.base) {
            let t = &s.transitions()[ti];
            for m in moves(state, t, written[id], width) {
                let label = if m.fresh {
                    Label::fresh(t.label.guard.clone(), m.reg, width)
                } else {
                    Label::read(t.label.guard.clone(), m.reg)
                };
                transitions.push(Transition { from: id, label, to: ids[&m.target] });
            }
        }
    }

    let mut registers = s.register_names().to_vec();
    registers.push(spare_name(s));
    let names = states
        .iter()
        .map(|st| {
            let f: Vec<String> = st.f.iter().map(|r| r.to_string()).collect();
            format!("{}|{}", s.state_names()[st.base], f.join(","))
        })
        .collect();
    let finals: Vec<StateId> = (0..states.len()).filter(|&i| s.is_final(states[i].base)).collect();
    Ok(Sra::from_parts(s.algebra(), registers, names, 0, Valuation::new(w0), finals, transitions))
}

/// Removes bullet labels from an automaton whose labels are all `read`,
/// `fresh` or `bullet`, adding one register.
///
/// A bullet becomes `fresh` into a spare register, or `read` of the spare
/// register when it holds the input. A `fresh(r)` transition also gains a
/// `read` of the spare register whose target treats the spare as the new
/// home of `r`'s value; states record that renaming.
pub fn eliminate_bullet(s: &Sra) -> Result<Sra, SvError> {
    if !s.initial_valuation().is_injective() {
        return Err(SvError::NotInjective);
    }
    if let Some(i) = s.transitions().iter().position(|t| classify(&t.label, s.num_registers()).is_none()) {
        return Err(SvError::NotSvLabel(i));
    }
    to_single_valued(s)
}
