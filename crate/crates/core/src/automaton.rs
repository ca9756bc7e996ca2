//! Symbolic register automata and their configuration semantics.
//!
//! A transition `p -[φ/E,I,U]-> q` reads `a` from configuration `(p, v)` when
//! `a ∈ [[φ]]`, every register in `E` holds `a`, no register in `I` holds
//! `a`, and then moves to `(q, v[U ↦ a])`.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Elem, Pred};

pub type StateId = usize;
pub type RegId = usize;

/// Registers are interned as bit positions, so at most this many exist.
pub const MAX_REGISTERS: usize = 64;

/// A set of register ids.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegSet(u64);

impl RegSet {
    pub const EMPTY: RegSet = RegSet(0);

    pub fn singleton(r: RegId) -> Self {
        RegSet(1 << r)
    }

    /// `{0, …, n-1}`.
    pub fn all(n: usize) -> Self {
        if n >= 64 {
            RegSet(u64::MAX)
        } else {
            RegSet((1u64 << n) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        RegSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, r: RegId) -> bool {
        r < 64 && self.0 >> r & 1 == 1
    }

    pub fn insert(&mut self, r: RegId) {
        self.0 |= 1 << r;
    }

    pub fn remove(&mut self, r: RegId) {
        self.0 &= !(1 << r);
    }

    pub fn union(self, o: RegSet) -> RegSet {
        RegSet(self.0 | o.0)
    }

    pub fn intersection(self, o: RegSet) -> RegSet {
        RegSet(self.0 & o.0)
    }

    pub fn difference(self, o: RegSet) -> RegSet {
        RegSet(self.0 & !o.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, o: RegSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Renumbers every member `r` to `r + offset`.
    pub fn shifted(self, offset: usize) -> RegSet {
        RegSet(self.0 << offset)
    }

    pub fn iter(self) -> impl Iterator<Item = RegId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let r = bits.trailing_zeros() as RegId;
            bits &= bits - 1;
            Some(r)
        })
    }
}

impl FromIterator<RegId> for RegSet {
    fn from_iter<T: IntoIterator<Item = RegId>>(iter: T) -> Self {
        let mut s = RegSet::EMPTY;
        for r in iter {
            s.insert(r);
        }
        s
    }
}

impl fmt::Debug for RegSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub guard: Pred,
    /// `E`: registers that must hold the input.
    pub eq: RegSet,
    /// `I`: registers that must not hold the input.
    pub neq: RegSet,
    /// `U`: registers that receive the input.
    pub upd: RegSet,
}

impl Label {
    pub fn new(guard: Pred, eq: RegSet, neq: RegSet, upd: RegSet) -> Self {
        Label { guard, eq, neq, upd }
    }

    /// No register constraint.
    pub fn plain(guard: Pred) -> Self {
        Label::new(guard, RegSet::EMPTY, RegSet::EMPTY, RegSet::EMPTY)
    }

    /// Reads the value held by `r`.
    pub fn read(guard: Pred, r: RegId) -> Self {
        Label::new(guard, RegSet::singleton(r), RegSet::EMPTY, RegSet::EMPTY)
    }

    /// Reads a value held by none of the `num_registers` registers and stores it in `r`.
    pub fn fresh(guard: Pred, r: RegId, num_registers: usize) -> Self {
        Label::new(guard, RegSet::EMPTY, RegSet::all(num_registers), RegSet::singleton(r))
    }

    /// Stores the input into `upd` unconditionally.
    pub fn store(guard: Pred, upd: RegSet) -> Self {
        Label::new(guard, RegSet::EMPTY, RegSet::EMPTY, upd)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub label: Label,
    pub to: StateId,
}

/// A register assignment; `None` is the empty register `♯`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation(Vec<Option<Elem>>);

impl Valuation {
    pub fn new(values: Vec<Option<Elem>>) -> Self {
        Valuation(values)
    }

    pub fn empty(num_registers: usize) -> Self {
        Valuation(vec![None; num_registers])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, r: RegId) -> Option<Elem> {
        self.0[r]
    }

    pub fn set(&mut self, r: RegId, a: Option<Elem>) {
        self.0[r] = a;
    }

    pub fn values(&self) -> &[Option<Elem>] {
        &self.0
    }

    /// `v⁻¹(a)`.
    pub fn preimage(&self, a: Elem) -> RegSet {
        self.0.iter().enumerate().filter(|(_, v)| **v == Some(a)).map(|(r, _)| r).collect()
    }

    /// Distinct non-empty values, in register order.
    pub fn image(&self) -> Vec<Elem> {
        let mut out: Vec<Elem> = Vec::new();
        for a in self.0.iter().flatten() {
            if !out.contains(a) {
                out.push(*a);
            }
        }
        out
    }

    /// No value occurs in two registers.
    pub fn is_injective(&self) -> bool {
        let filled = self.0.iter().flatten().count();
        self.image().len() == filled
    }

    /// `v[U ↦ a]`.
    pub fn assign(&mut self, upd: RegSet, a: Elem) {
        for r in upd.iter() {
            self.0[r] = Some(a);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: StateId,
    pub valuation: Valuation,
}

/// Why an automaton is not well formed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("{0} registers exceed the supported maximum of {MAX_REGISTERS}")]
    TooManyRegisters(usize),
    #[error("initial state {0} does not exist")]
    InitialOutOfRange(StateId),
    #[error("initial valuation has {got} entries for {expected} registers")]
    ValuationArity { expected: usize, got: usize },
    #[error("initial value of register {register}: {error}")]
    InitialValue { register: RegId, error: AlgebraError },
    #[error("final state {0} does not exist")]
    FinalOutOfRange(StateId),
    #[error("transition {index} refers to missing state {state}")]
    UnknownState { index: usize, state: StateId },
    #[error("transition {index} refers to registers {registers:?} outside R")]
    UnknownRegister { index: usize, registers: RegSet },
    #[error("transition {index} has E ∩ I = {overlap:?} ≠ ∅")]
    Overlap { index: usize, overlap: RegSet },
    #[error("transition {index} guard: {error}")]
    Guard { index: usize, error: AlgebraError },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("malformed automaton: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Malformed(Vec<Violation>),
    #[error("automata over different algebras ({0} vs {1})")]
    AlgebraMismatch(Algebra, Algebra),
}

/// Two distinct successor configurations were found during a single-path scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("nondeterministic step at input position {position}")]
pub struct NondeterministicStep {
    pub position: usize,
}

/// A symbolic register automaton `(R, Q, q0, v0, F, Δ)`.
///
/// Registers and states are dense indices with display names kept on the
/// side. Values are immutable once built.
#[derive(Clone, Debug)]
pub struct Sra {
    algebra: Algebra,
    registers: Vec<String>,
    states: Vec<String>,
    initial: StateId,
    initial_valuation: Valuation,
    finals: Vec<bool>,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
}

impl PartialEq for Sra {
    fn eq(&self, o: &Self) -> bool {
        self.algebra == o.algebra
            && self.registers == o.registers
            && self.states == o.states
            && self.initial == o.initial
            && self.initial_valuation == o.initial_valuation
            && self.finals == o.finals
            && self.transitions == o.transitions
    }
}

impl Eq for Sra {}

impl Sra {
    /// Assembles an automaton without validating it; see [`Sra::validate`].
    pub fn from_parts(
        algebra: Algebra,
        registers: Vec<String>,
        states: Vec<String>,
        initial: StateId,
        initial_valuation: Valuation,
        finals: impl IntoIterator<Item = StateId>,
        transitions: Vec<Transition>,
    ) -> Sra {
        let n = states.len();
        let finals: Vec<StateId> = finals.into_iter().collect();
        // Out-of-range finals are kept so that `validate` can report them.
        let len = finals.iter().map(|q| q + 1).max().unwrap_or(0).max(n);
        let mut is_final = vec![false; len];
        for q in finals {
            is_final[q] = true;
        }
        let mut outgoing = vec![Vec::new(); n];
        for (i, t) in transitions.iter().enumerate() {
            if t.from < n && t.to < n {
                outgoing[t.from].push(i);
            }
        }
        Sra { algebra, registers, states, initial, initial_valuation, finals: is_final, transitions, outgoing }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn register_names(&self) -> &[String] {
        &self.registers
    }

    pub fn num_registers(&self) -> usize {
        self.registers.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn initial_valuation(&self) -> &Valuation {
        &self.initial_valuation
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals.get(q).copied().unwrap_or(false)
    }

    pub fn finals(&self) -> impl Iterator<Item = StateId> + '_ {
        self.finals.iter().enumerate().filter(|(_, f)| **f).map(|(q, _)| q)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Indices of the transitions leaving `q`.
    pub fn outgoing(&self, q: StateId) -> &[usize] {
        &self.outgoing[q]
    }

    /// The same automaton with a different set of final states.
    pub fn with_finals(&self, finals: impl IntoIterator<Item = StateId>) -> Sra {
        Sra::from_parts(
            self.algebra,
            self.registers.clone(),
            self.states.clone(),
            self.initial,
            self.initial_valuation.clone(),
            finals,
            self.transitions.clone(),
        )
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let nr = self.registers.len();
        let ns = self.states.len();
        if nr > MAX_REGISTERS {
            out.push(Violation::TooManyRegisters(nr));
        }
        if self.initial >= ns {
            out.push(Violation::InitialOutOfRange(self.initial));
        }
        if self.initial_valuation.len() != nr {
            out.push(Violation::ValuationArity { expected: nr, got: self.initial_valuation.len() });
        }
        for (r, v) in self.initial_valuation.values().iter().enumerate() {
            if let Some(a) = v {
                let check = self.algebra.check_elem(*a).and_then(|_| self.algebra.elem(a.value()).map(|_| ()));
                if let Err(error) = check {
                    out.push(Violation::InitialValue { register: r, error });
                }
            }
        }
        for (q, f) in self.finals.iter().enumerate() {
            if *f && q >= ns {
                out.push(Violation::FinalOutOfRange(q));
            }
        }
        let all = RegSet::all(nr);
        for (index, t) in self.transitions.iter().enumerate() {
            for state in [t.from, t.to] {
                if state >= ns {
                    out.push(Violation::UnknownState { index, state });
                }
            }
            let l = &t.label;
            let stray = l.eq.union(l.neq).union(l.upd).difference(all);
            if !stray.is_empty() {
                out.push(Violation::UnknownRegister { index, registers: stray });
            }
            let overlap = l.eq.intersection(l.neq);
            if !overlap.is_empty() {
                out.push(Violation::Overlap { index, overlap });
            }
            if let Err(error) = self.algebra.check(&l.guard) {
                out.push(Violation::Guard { index, error });
            }
        }
        out
    }

    /// Fails with [`CoreError::Malformed`] unless [`Sra::validate`] is clean.
    pub fn validated(self) -> Result<Sra, CoreError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(CoreError::Malformed(v))
        }
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration { state: self.initial, valuation: self.initial_valuation.clone() }
    }

    /// Whether transition `t` fires on `a` when the registers holding `a` are `holders`.
    fn fires(t: &Transition, holders: RegSet, a: Elem) -> bool {
        t.label.eq.is_subset(holders) && t.label.neq.intersection(holders).is_empty() && t.label.guard.eval(a.value())
    }

    /// All successors of `c` on input `a`, without duplicates.
    pub fn step(&self, c: &Configuration, a: Elem) -> Vec<Configuration> {
        let holders = c.valuation.preimage(a);
        let mut out: Vec<Configuration> = Vec::new();
        for &i in &self.outgoing[c.state] {
            let t = &self.transitions[i];
            if Self::fires(t, holders, a) {
                let mut valuation = c.valuation.clone();
                valuation.assign(t.label.upd, a);
                let next = Configuration { state: t.to, valuation };
                if !out.contains(&next) {
                    out.push(next);
                }
            }
        }
        out
    }

    /// Membership by breadth-first closure over configuration sets.
    pub fn accepts(&self, word: &[Elem]) -> bool {
        self.accepts_iter(word.iter().copied())
    }

    /// Streaming membership. While only one configuration is live the
    /// valuation is updated in place, so deterministic automata run as a
    /// single linear scan without buffering the input.
    pub fn accepts_iter(&self, word: impl IntoIterator<Item = Elem>) -> bool {
        let mut word = word.into_iter();
        let mut single = self.initial_configuration();
        while let Some(a) = word.next() {
            let holders = single.valuation.preimage(a);
            let mut fired: Option<&Transition> = None;
            let mut branching = false;
            for &i in &self.outgoing[single.state] {
                let t = &self.transitions[i];
                if Self::fires(t, holders, a) {
                    match fired {
                        None => fired = Some(t),
                        Some(f) if f.to == t.to && f.label.upd == t.label.upd => {}
                        Some(_) => {
                            branching = true;
                            break;
                        }
                    }
                }
            }
            if branching {
                return self.accepts_from(vec![single], std::iter::once(a).chain(word));
            }
            match fired {
                None => return false,
                Some(t) => {
                    single.valuation.assign(t.label.upd, a);
                    single.state = t.to;
                }
            }
        }
        self.is_final(single.state)
    }

    fn accepts_from(&self, start: Vec<Configuration>, word: impl Iterator<Item = Elem>) -> bool {
        let mut current = start;
        for a in word {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for c in &current {
                for s in self.step(c, a) {
                    if seen.insert(s.clone()) {
                        next.push(s);
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        current.iter().any(|c| self.is_final(c.state))
    }

    /// Membership for Unicode automata on a string.
    pub fn accepts_str(&self, s: &str) -> bool {
        self.accepts_iter(s.chars().map(Elem::from))
    }

    /// Single-path membership scan that fails as soon as two different
    /// successor configurations exist.
    pub fn scan(&self, word: &[Elem]) -> Result<bool, NondeterministicStep> {
        let mut c = self.initial_configuration();
        for (position, &a) in word.iter().enumerate() {
            let mut next = self.step(&c, a);
            match next.len() {
                0 => return Ok(false),
                1 => c = next.pop().unwrap(),
                _ => return Err(NondeterministicStep { position }),
            }
        }
        Ok(self.is_final(c.state))
    }
}

/// Incremental construction of an [`Sra`], mainly for fixtures.
#[derive(Clone, Debug)]
pub struct SraBuilder {
    algebra: Algebra,
    registers: Vec<String>,
    valuation: Vec<Option<Elem>>,
    states: Vec<String>,
    initial: StateId,
    finals: Vec<StateId>,
    transitions: Vec<Transition>,
}

impl SraBuilder {
    pub fn new(algebra: Algebra) -> Self {
        SraBuilder {
            algebra,
            registers: Vec::new(),
            valuation: Vec::new(),
            states: Vec::new(),
            initial: 0,
            finals: Vec::new(),
            transitions: Vec::new(),
        }
    }

    pub fn register(&mut self, name: impl Into<String>, initial: Option<Elem>) -> RegId {
        self.registers.push(name.into());
        self.valuation.push(initial);
        self.registers.len() - 1
    }

    /// Adds a state; the first one added is initial unless changed.
    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        self.states.push(name.into());
        self.states.len() - 1
    }

    /// Adds `n` states named by their index.
    pub fn states(&mut self, n: usize) -> Vec<StateId> {
        (0..n).map(|_| {
            let name = self.states.len().to_string();
            self.state(name)
        }).collect()
    }

    pub fn initial(&mut self, q: StateId) -> &mut Self {
        self.initial = q;
        self
    }

    pub fn accept(&mut self, q: StateId) -> &mut Self {
        self.finals.push(q);
        self
    }

    pub fn transition(&mut self, from: StateId, label: Label, to: StateId) -> &mut Self {
        self.transitions.push(Transition { from, label, to });
        self
    }

    pub fn num_registers(&self) -> usize {
        self.registers.len()
    }

    pub fn build(&self) -> Sra {
        Sra::from_parts(
            self.algebra,
            self.registers.clone(),
            self.states.clone(),
            self.initial,
            Valuation::new(self.valuation.clone()),
            self.finals.iter().copied(),
            self.transitions.clone(),
        )
    }
}

/// A register-automaton transition: register constraints only, no guard.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaTransition {
    pub from: StateId,
    pub eq: RegSet,
    pub neq: RegSet,
    pub upd: RegSet,
    pub to: StateId,
}

#[derive(Clone, Debug)]
pub struct RaDescription {
    pub algebra: Algebra,
    pub num_states: usize,
    pub initial: StateId,
    pub finals: Vec<StateId>,
    pub initial_valuation: Vec<Option<Elem>>,
    pub transitions: Vec<RaTransition>,
}

/// Encodes a register automaton as an SRA whose guards are all `true`.
pub fn from_ra(ra: &RaDescription) -> Result<Sra, CoreError> {
    let transitions = ra
        .transitions
        .iter()
        .map(|t| Transition { from: t.from, label: Label::new(Pred::True, t.eq, t.neq, t.upd), to: t.to })
        .collect();
    Sra::from_parts(
        ra.algebra,
        (0..ra.initial_valuation.len()).map(|r| format!("r{r}")).collect(),
        (0..ra.num_states).map(|q| q.to_string()).collect(),
        ra.initial,
        Valuation::new(ra.initial_valuation.clone()),
        ra.finals.iter().copied(),
        transitions,
    )
    .validated()
}

#[derive(Clone, Debug)]
pub struct SfaDescription {
    pub algebra: Algebra,
    pub num_states: usize,
    pub initial: StateId,
    pub finals: Vec<StateId>,
    pub transitions: Vec<(StateId, Pred, StateId)>,
}

/// Encodes a symbolic finite automaton as a register-free SRA.
pub fn from_sfa(sfa: &SfaDescription) -> Result<Sra, CoreError> {
    let transitions = sfa
        .transitions
        .iter()
        .map(|(from, guard, to)| Transition { from: *from, label: Label::plain(guard.clone()), to: *to })
        .collect();
    Sra::from_parts(
        sfa.algebra,
        Vec::new(),
        (0..sfa.num_states).map(|q| q.to_string()).collect(),
        sfa.initial,
        Valuation::empty(0),
        sfa.finals.iter().copied(),
        transitions,
    )
    .validated()
}
