//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod backtrack;

use sra::algebra::{Algebra, Elem, Pred};
use sra::automaton::{Label, RegSet, Sra, SraBuilder, Transition};

pub fn int(v: i64) -> Elem {
    Elem::Int(v)
}

pub fn ints(vs: &[i64]) -> Vec<Elem> {
    vs.iter().map(|&v| Elem::Int(v)).collect()
}

pub fn chars(s: &str) -> Vec<Elem> {
    s.chars().map(Elem::from).collect()
}

fn even() -> Pred {
    Pred::Div(2)
}

/// Every word of length at most `max_len` over `alphabet`, shortest first.
pub fn words(alphabet: &[Elem], max_len: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &a in alphabet {
                let mut v: Vec<Elem> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Membership by exhaustive depth-first search over runs, written directly
/// from the transition semantics and independent of `Sra::accepts`.
pub fn oracle_accepts(s: &Sra, word: &[Elem]) -> bool {
    fn run(s: &Sra, q: usize, v: &mut Vec<Option<i64>>, word: &[Elem]) -> bool {
        let Some((a, rest)) = word.split_first() else {
            return s.is_final(q);
        };
        let a = a.value();
        for t in s.transitions().iter().filter(|t| t.from == q) {
            let l = &t.label;
            let eq_ok = l.eq.iter().all(|r| v[r] == Some(a));
            let neq_ok = l.neq.iter().all(|r| v[r] != Some(a));
            if l.guard.eval(a) && eq_ok && neq_ok {
                let saved = v.clone();
                for r in l.upd.iter() {
                    v[r] = Some(a);
                }
                let ok = run(s, t.to, v, rest);
                *v = saved;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    let mut v: Vec<Option<i64>> = s.initial_valuation().values().iter().map(|e| e.map(|e| e.value())).collect();
    run(s, s.initial(), &mut v, word)
}

/// The integer automaton with an empty language although every guard is
/// satisfiable: the value stored on the way to state 1 is a nonzero
/// multiple of 3, which can never also be a multiple of 5 within [0, 10].
pub fn dead_read() -> Sra {
    dead_read_with(Pred::and(Pred::range(0, 10), Pred::Div(5)))
}

/// `dead_read` with the guard of the read transition replaced by `[0,10] ∧ div 3`.
pub fn live_read() -> Sra {
    dead_read_with(Pred::and(Pred::range(0, 10), Pred::Div(3)))
}

fn dead_read_with(read_guard: Pred) -> Sra {
    let mut b = SraBuilder::new(Algebra::Integer);
    let r = b.register("r", Some(int(0)));
    let q = b.states(3);
    b.transition(q[0], Label::fresh(Pred::Div(3), r, 1), q[1]);
    b.transition(q[1], Label::read(read_guard, r), q[2]);
    b.transition(q[2], Label::fresh(Pred::or(Pred::less_than(0), Pred::greater_than(10)), r, 1), q[2]);
    b.accept(q[2]);
    b.build()
}

/// Nonempty words of even integers whose first and last symbols coincide.
pub fn even_same_ends() -> Sra {
    same_ends_with(even())
}

/// `even_same_ends` with every guard relaxed to `true`: first equals last, any parity.
pub fn same_ends() -> Sra {
    same_ends_with(Pred::True)
}

fn same_ends_with(g: Pred) -> Sra {
    let mut b = SraBuilder::new(Algebra::Integer);
    let r = b.register("r", None);
    let q = b.states(3);
    let rs = RegSet::singleton(r);
    b.transition(q[0], Label::store(g.clone(), rs), q[1]);
    b.transition(q[1], Label::new(g.clone(), rs, RegSet::EMPTY, RegSet::EMPTY), q[1]);
    b.transition(q[1], Label::new(g.clone(), RegSet::EMPTY, rs, RegSet::EMPTY), q[2]);
    b.transition(q[2], Label::new(g.clone(), rs, RegSet::EMPTY, RegSet::EMPTY), q[1]);
    b.transition(q[2], Label::new(g, RegSet::EMPTY, rs, RegSet::EMPTY), q[2]);
    b.accept(q[1]);
    b.build()
}

/// The predicate `even_same_ends` is meant to recognise.
pub fn even_same_ends_spec(w: &[Elem]) -> bool {
    !w.is_empty() && w.iter().all(|a| a.value() % 2 == 0) && w[0] == w[w.len() - 1]
}

/// Single-valued: accepts words with no two adjacent equal symbols, all
/// within `[0, 9]`.
pub fn adjacent_distinct() -> Sra {
    let mut b = SraBuilder::new(Algebra::Integer);
    let r = b.register("r", None);
    let q = b.states(2);
    let digit = Pred::range(0, 9);
    b.transition(q[0], Label::fresh(digit.clone(), r, 1), q[1]);
    b.transition(q[1], Label::fresh(digit, r, 1), q[1]);
    b.accept(q[0]).accept(q[1]);
    b.build()
}

/// Nondeterministic: some symbol occurs twice.
pub fn has_repeat() -> Sra {
    let mut b = SraBuilder::new(Algebra::Integer);
    let r = b.register("r", None);
    let q = b.states(3);
    let rs = RegSet::singleton(r);
    b.transition(q[0], Label::plain(Pred::True), q[0]);
    b.transition(q[0], Label::store(Pred::True, rs), q[1]);
    b.transition(q[1], Label::plain(Pred::True), q[1]);
    b.transition(q[1], Label::new(Pred::True, rs, RegSet::EMPTY, RegSet::EMPTY), q[2]);
    b.transition(q[2], Label::plain(Pred::True), q[2]);
    b.accept(q[2]);
    b.build()
}

/// Two registers with overlapping initial content and a store into both.
pub fn two_registers() -> Sra {
    let mut b = SraBuilder::new(Algebra::Integer);
    let r = b.register("r", Some(int(1)));
    let s = b.register("s", Some(int(1)));
    let q = b.states(3);
    let both = RegSet::singleton(r).union(RegSet::singleton(s));
    b.transition(q[0], Label::read(Pred::True, s), q[1]);
    b.transition(q[0], Label::store(Pred::range(2, 5), both), q[1]);
    b.transition(q[1], Label::new(Pred::True, RegSet::singleton(r), RegSet::EMPTY, RegSet::singleton(s)), q[2]);
    b.transition(q[1], Label::new(even(), RegSet::EMPTY, both, RegSet::singleton(r)), q[1]);
    b.transition(q[2], Label::new(Pred::True, RegSet::singleton(s), RegSet::EMPTY, RegSet::EMPTY), q[2]);
    b.accept(q[2]);
    b.build()
}

/// A register-free automaton accepting words of digits, at least one.
pub fn digits_sfa() -> Sra {
    sra::automaton::from_sfa(&sra::automaton::SfaDescription {
        algebra: Algebra::Integer,
        num_states: 2,
        initial: 0,
        finals: vec![1],
        transitions: vec![(0, Pred::range(0, 9), 1), (1, Pred::range(0, 9), 1)],
    })
    .unwrap()
}

/// Single-valued and deterministic: stores the first symbol; then accepts
/// once it reappears, with odd symbols other than it in between.
pub fn first_returns() -> Sra {
    let mut b = SraBuilder::new(Algebra::Integer);
    let r = b.register("r", None);
    let q = b.states(3);
    b.transition(q[0], Label::fresh(Pred::True, r, 1), q[1]);
    b.transition(q[1], Label::read(Pred::True, r), q[2]);
    b.transition(q[1], Label::new(Pred::not(even()), RegSet::EMPTY, RegSet::singleton(r), RegSet::EMPTY), q[1]);
    b.accept(q[2]);
    b.build()
}

/// Two fresh transitions with equal guards into different registers.
pub fn nondeterministic_fresh() -> Sra {
    let mut b = SraBuilder::new(Algebra::Integer);
    let r = b.register("r", None);
    let s = b.register("s", None);
    let q = b.states(3);
    b.transition(q[0], Label::fresh(Pred::True, r, 2), q[1]);
    b.transition(q[0], Label::fresh(Pred::True, s, 2), q[2]);
    b.accept(q[1]);
    b.build()
}

/// Same label, overlapping guards, different targets.
pub fn nondeterministic_targets() -> Sra {
    let mut b = SraBuilder::new(Algebra::Integer);
    let q = b.states(3);
    b.transition(q[0], Label::plain(Pred::range(0, 5)), q[1]);
    b.transition(q[0], Label::plain(Pred::range(5, 9)), q[2]);
    b.accept(q[1]);
    b.build()
}

/// Integer fixtures paired for the construction invariants, together with
/// a sample alphabet exercising their guards.
pub fn fixture_pairs() -> Vec<(&'static str, Sra, Sra)> {
    vec![
        ("even_same_ends/weakened", even_same_ends(), same_ends()),
        ("adjacent/first-returns", adjacent_distinct(), first_returns()),
        ("digits/even_same_ends", digits_sfa(), even_same_ends()),
        ("repeat/two-registers", has_repeat(), two_registers()),
        ("dead_read/mutated", dead_read(), live_read()),
    ]
}

pub fn sample_alphabet() -> Vec<Elem> {
    ints(&[0, 1, 2, 3, 12])
}

/// Every named integer fixture.
pub fn integer_fixtures() -> Vec<(&'static str, Sra)> {
    vec![
        ("dead_read", dead_read()),
        ("dead_read-mutated", live_read()),
        ("even_same_ends", even_same_ends()),
        ("even_same_ends-weakened", same_ends()),
        ("adjacent-distinct", adjacent_distinct()),
        ("has-repeat", has_repeat()),
        ("two-registers", two_registers()),
        ("digits", digits_sfa()),
        ("first-returns", first_returns()),
        ("nondeterministic-fresh", nondeterministic_fresh()),
        ("nondeterministic-targets", nondeterministic_targets()),
    ]
}

/// Deterministic fixtures (by construction) among `integer_fixtures`.
pub fn deterministic_fixtures() -> Vec<(&'static str, Sra)> {
    vec![
        ("dead_read", dead_read()),
        ("dead_read-mutated", live_read()),
        ("even_same_ends", even_same_ends()),
        ("even_same_ends-weakened", same_ends()),
        ("adjacent-distinct", adjacent_distinct()),
        ("two-registers", two_registers()),
        ("digits", digits_sfa()),
        ("first-returns", first_returns()),
    ]
}

pub fn transition(from: usize, label: Label, to: usize) -> Transition {
    Transition { from, label, to }
}

/// Reachable configurations over `domain`, counted by breadth-first search
/// written directly from the transition semantics.
pub fn oracle_configurations(s: &Sra, domain: &[i64]) -> usize {
    use std::collections::{HashSet, VecDeque};
    let v0: Vec<Option<i64>> = s.initial_valuation().values().iter().map(|e| e.map(|e| e.value())).collect();
    let mut seen = HashSet::from([(s.initial(), v0.clone())]);
    let mut queue = VecDeque::from([(s.initial(), v0)]);
    while let Some((q, v)) = queue.pop_front() {
        for t in s.transitions().iter().filter(|t| t.from == q) {
            let l = &t.label;
            for &a in domain {
                if l.guard.eval(a) && l.eq.iter().all(|r| v[r] == Some(a)) && l.neq.iter().all(|r| v[r] != Some(a)) {
                    let mut w = v.clone();
                    for r in l.upd.iter() {
                        w[r] = Some(a);
                    }
                    if seen.insert((t.to, w.clone())) {
                        queue.push_back((t.to, w));
                    }
                }
            }
        }
    }
    seen.len()
}

/// Small random integer automata: up to 3 states and 2 registers, guards
/// from a pool the sample alphabet `0..4` distinguishes, and arbitrary
/// register constraints with `E ∩ I = ∅`.
pub fn arb_sra() -> impl proptest::strategy::Strategy<Value = Sra> {
    use proptest::prelude::*;
    let guards = || {
        prop_oneof![
            Just(Pred::True),
            Just(Pred::Div(2)),
            Just(Pred::range(0, 2)),
            Just(Pred::Atom(1)),
            Just(Pred::not(Pred::Atom(0))),
        ]
    };
    (1usize..=3, 0usize..=2).prop_flat_map(move |(states, regs)| {
        let mask = (1u64 << regs) - 1;
        let label = (guards(), 0..=mask, 0..=mask, 0..=mask).prop_map(|(g, e, i, u)| {
            Label::new(g, RegSet::from_bits(e), RegSet::from_bits(i & !e), RegSet::from_bits(u))
        });
        let transition = (0..states, label, 0..states).prop_map(|(from, label, to)| Transition { from, label, to });
        (
            prop::collection::vec(prop::option::of(0i64..4), regs),
            prop::collection::vec(any::<bool>(), states),
            prop::collection::vec(transition, 0..7),
        )
            .prop_map(move |(v0, finals, transitions)| {
                Sra::from_parts(
                    Algebra::Integer,
                    (0..regs).map(|r| format!("r{r}")).collect(),
                    (0..states).map(|q| format!("q{q}")).collect(),
                    0,
                    sra::automaton::Valuation::new(v0.into_iter().map(|v| v.map(int)).collect()),
                    (0..states).filter(|&q| finals[q]).collect::<Vec<_>>(),
                    transitions,
                )
            })
    })
}
