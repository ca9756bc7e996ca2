//! Closure constructions: intersection, union, completion and complement.

use thiserror::Error;

use crate::algebra::Pred;
use crate::automaton::{Label, Sra, StateId, Transition, Valuation, MAX_REGISTERS};
use crate::normal::{self, NormalError};
use crate::single_valued::{self, SvKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpsError {
    #[error("automata over different algebras ({0} vs {1})")]
    AlgebraMismatch(crate::algebra::Algebra, crate::algebra::Algebra),
    #[error("{0} registers exceed the supported maximum of {MAX_REGISTERS}")]
    TooManyRegisters(usize),
    #[error("automaton is not single-valued")]
    NotSingleValued,
    #[error("automaton is not deterministic")]
    Nondeterministic,
    #[error("automaton is not complete")]
    Incomplete,
    #[error(transparent)]
    Normal(#[from] NormalError),
}

fn check_pair(s1: &Sra, s2: &Sra) -> Result<usize, OpsError> {
    if s1.algebra() != s2.algebra() {
        return Err(OpsError::AlgebraMismatch(s1.algebra(), s2.algebra()));
    }
    let width = s1.num_registers() + s2.num_registers();
    if width > MAX_REGISTERS {
        return Err(OpsError::TooManyRegisters(width));
    }
    Ok(width)
}

/// Registers of both automata, prefixed `1.` and `2.`, and their joint
/// initial valuation.
fn joint_registers(s1: &Sra, s2: &Sra) -> (Vec<String>, Valuation) {
    let names = s1
        .register_names()
        .iter()
        .map(|r| format!("1.{r}"))
        .chain(s2.register_names().iter().map(|r| format!("2.{r}")))
        .collect();
    let values = s1.initial_valuation().values().iter().chain(s2.initial_valuation().values()).copied().collect();
    (names, Valuation::new(values))
}

fn conjoin(a: &Pred, b: &Pred) -> Pred {
    match (a, b) {
        (Pred::True, p) | (p, Pred::True) => p.clone(),
        _ => Pred::and(a.clone(), b.clone()),
    }
}

/// Product automaton over `Q1 × Q2` with registers `R1 ⊎ R2`.
///
/// Pairs whose guard conjunction is unsatisfiable are dropped; they could
/// never fire.
pub fn intersect(s1: &Sra, s2: &Sra) -> Result<Sra, OpsError> {
    check_pair(s1, s2)?;
    let alg = s1.algebra();
    let shift = s1.num_registers();
    let n2 = s2.num_states();
    let pair = |p: StateId, q: StateId| p * n2 + q;
    let mut states = Vec::with_capacity(s1.num_states() * n2);
    for p in s1.state_names() {
        for q in s2.state_names() {
            states.push(format!("({p},{q})"));
        }
    }
    let mut transitions = Vec::new();
    for p in 0..s1.num_states() {
        for q in 0..n2 {
            for &i in s1.outgoing(p) {
                let t1 = &s1.transitions()[i];
                for &j in s2.outgoing(q) {
                    let t2 = &s2.transitions()[j];
                    let guard = conjoin(&t1.label.guard, &t2.label.guard);
                    if !alg.is_sat(&guard) {
                        continue;
                    }
                    let (l1, l2) = (&t1.label, &t2.label);
                    let label = Label::new(
                        guard,
                        l1.eq.union(l2.eq.shifted(shift)),
                        l1.neq.union(l2.neq.shifted(shift)),
                        l1.upd.union(l2.upd.shifted(shift)),
                    );
                    transitions.push(Transition { from: pair(p, q), label, to: pair(t1.to, t2.to) });
                }
            }
        }
    }
    let finals: Vec<StateId> = s1.finals().flat_map(|p| s2.finals().map(move |q| pair(p, q))).collect();
    let (registers, v0) = joint_registers(s1, s2);
    Ok(Sra::from_parts(alg, registers, states, pair(s1.initial(), s2.initial()), v0, finals, transitions))
}

/// Disjoint union with a new initial state copying both initial states'
/// outgoing transitions.
pub fn union(s1: &Sra, s2: &Sra) -> Result<Sra, OpsError> {
    check_pair(s1, s2)?;
    let shift = s1.num_registers();
    let off1 = 1;
    let off2 = 1 + s1.num_states();
    let mut states = vec!["init".to_string()];
    states.extend(s1.state_names().iter().map(|q| format!("1.{q}")));
    states.extend(s2.state_names().iter().map(|q| format!("2.{q}")));
    let lift2 = |l: &Label| {
        Label::new(l.guard.clone(), l.eq.shifted(shift), l.neq.shifted(shift), l.upd.shifted(shift))
    };
    let mut transitions = Vec::new();
    for t in s1.transitions() {
        transitions.push(Transition { from: t.from + off1, label: t.label.clone(), to: t.to + off1 });
    }
    for t in s2.transitions() {
        transitions.push(Transition { from: t.from + off2, label: lift2(&t.label), to: t.to + off2 });
    }
    for &i in s1.outgoing(s1.initial()) {
        let t = &s1.transitions()[i];
        transitions.push(Transition { from: 0, label: t.label.clone(), to: t.to + off1 });
    }
    for &i in s2.outgoing(s2.initial()) {
        let t = &s2.transitions()[i];
        transitions.push(Transition { from: 0, label: lift2(&t.label), to: t.to + off2 });
    }
    let mut finals: Vec<StateId> = s1.finals().map(|q| q + off1).chain(s2.finals().map(|q| q + off2)).collect();
    if s1.is_final(s1.initial()) || s2.is_final(s2.initial()) {
        finals.push(0);
    }
    let (registers, v0) = joint_registers(s1, s2);
    Ok(Sra::from_parts(s1.algebra(), registers, states, 0, v0, finals, transitions))
}

fn fresh_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Adds a sink state so that every configuration can read every element.
///
/// For each state `p` and register `r`, a `read(r)` transition to the sink
/// is guarded by the negated disjunction of `p`'s `read(r)` guards; likewise
/// one `fresh` transition into register 0 covers the fresh inputs no
/// `fresh` transition of `p` accepts. A register is added when `R = ∅`.
pub fn complete(s: &Sra) -> Result<Sra, OpsError> {
    let kinds = single_valued::sv_kinds(s).ok_or(OpsError::NotSingleValued)?;
    if !normal::is_deterministic(s)? {
        return Err(OpsError::Nondeterministic);
    }
    let alg = s.algebra();
    let mut registers = s.register_names().to_vec();
    let mut v0 = s.initial_valuation().clone();
    if registers.is_empty() {
        registers.push("r".to_string());
        v0 = Valuation::empty(1);
    }
    let width = registers.len();
    let mut states = s.state_names().to_vec();
    let sink = states.len();
    states.push(fresh_name(s.state_names(), "sink"));
    let mut transitions = s.transitions().to_vec();
    let negated = |guards: Vec<Pred>| if guards.is_empty() { Pred::True } else { Pred::not(Pred::or_all(guards)) };
    for p in 0..s.num_states() {
        let out = s.outgoing(p);
        for r in 0..s.num_registers() {
            let reads = out.iter().filter(|&&i| kinds[i] == SvKind::Read(r)).map(|&i| s.transitions()[i].label.guard.clone());
            let guard = negated(reads.collect());
            if alg.is_sat(&guard) {
                transitions.push(Transition { from: p, label: Label::read(guard, r), to: sink });
            }
        }
        let fresh = out
            .iter()
            .filter(|&&i| matches!(kinds[i], SvKind::Fresh(_)))
            .map(|&i| s.transitions()[i].label.guard.clone());
        let guard = negated(fresh.collect());
        if alg.is_sat(&guard) {
            transitions.push(Transition { from: p, label: Label::fresh(guard, 0, width), to: sink });
        }
    }
    for r in 0..width {
        transitions.push(Transition { from: sink, label: Label::read(Pred::True, r), to: sink });
    }
    transitions.push(Transition { from: sink, label: Label::fresh(Pred::True, 0, width), to: sink });
    Ok(Sra::from_parts(alg, registers, states, s.initial(), v0, s.finals().collect::<Vec<_>>(), transitions))
}

/// Swaps final and non-final states of a complete deterministic automaton.
pub fn complement(s: &Sra) -> Result<Sra, OpsError> {
    if !single_valued::is_single_valued(s) {
        return Err(OpsError::NotSingleValued);
    }
    if !normal::is_deterministic(s)? {
        return Err(OpsError::Nondeterministic);
    }
    if !normal::is_complete(s)? {
        return Err(OpsError::Incomplete);
    }
    Ok(s.with_finals((0..s.num_states()).filter(|&q| !s.is_final(q)).collect::<Vec<_>>()))
}

/// Whether `complete` would add nothing reachable: the automaton already
/// reads every element from every reachable configuration.
pub fn is_complete(s: &Sra) -> Result<bool, OpsError> {
    if !single_valued::is_single_valued(s) {
        return Err(OpsError::NotSingleValued);
    }
    Ok(normal::is_complete(s)?)
}
