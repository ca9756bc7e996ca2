mod common;

use common::*;
use sra::algebra::{Algebra, Elem, Pred};
use sra::automaton::{Label, Sra, SraBuilder, Valuation};
use sra::boolean_ops::{complete, union};
use sra::equiv::{correspondence_of, equivalent, includes, n_bisimilar, n_similar, EquivError, Failure};
use sra::normal::normalize;
use sra::single_valued::to_single_valued;

fn bounded_inclusion(s1: &Sra, s2: &Sra, alphabet: &[Elem], len: usize) -> bool {
    words(alphabet, len).iter().all(|w| !oracle_accepts(s1, w) || oracle_accepts(s2, w))
}

fn complete_sv(s: &Sra) -> Sra {
    complete(&to_single_valued(s).unwrap()).unwrap()
}

#[test]
fn correspondence_examples() {
    let e = correspondence_of(&Valuation::empty(2), &Valuation::empty(1)).unwrap();
    assert!(e.is_empty());
    let five = Valuation::new(vec![Some(int(5))]);
    let seven = Valuation::new(vec![Some(int(7))]);
    assert_eq!(correspondence_of(&five, &five).unwrap().pairs(), vec![(0, 0)]);
    assert!(correspondence_of(&five, &seven).unwrap().is_empty());
    let dup = Valuation::new(vec![Some(int(5)), Some(int(5))]);
    assert_eq!(correspondence_of(&dup, &five), Err(EquivError::NotInjective));
    let sigma = correspondence_of(&Valuation::new(vec![Some(int(5)), Some(int(7))]), &Valuation::new(vec![Some(int(7)), Some(int(5))])).unwrap();
    assert_eq!(sigma.pairs(), vec![(0, 1), (1, 0)]);
    // Updating drops the pair that already targeted the new register.
    assert_eq!(sigma.update(0, 0).pairs(), vec![(0, 0)]);
}

#[test]
fn self_simulation() {
    for (name, s) in integer_fixtures() {
        assert!(n_similar(&s, &s).unwrap().holds, "{name}");
        assert!(n_bisimilar(&s, &s).unwrap().holds, "{name}");
    }
}

#[test]
fn empty_language_is_simulated_by_complete_automata() {
    for (name, s) in deterministic_fixtures() {
        let c = complete_sv(&s);
        assert!(n_similar(&dead_read(), &c).unwrap().holds, "{name}");
        assert!(includes(&dead_read(), &s).unwrap().holds, "{name}");
    }
}

#[test]
fn even_same_ends_against_weakened() {
    assert!(n_similar(&even_same_ends(), &same_ends()).unwrap().holds);
    let back = n_similar(&same_ends(), &even_same_ends()).unwrap();
    assert!(!back.holds);
    let alphabet = ints(&[0, 1, 2, 4]);
    assert!(bounded_inclusion(&even_same_ends(), &same_ends(), &alphabet, 3));
    assert!(!bounded_inclusion(&same_ends(), &even_same_ends(), &alphabet, 3));
    let d = includes(&same_ends(), &even_same_ends()).unwrap();
    let w = d.counterexample.unwrap();
    assert!(same_ends().accepts(&w) && !even_same_ends().accepts(&w), "{w:?}");
}

#[test]
fn translations_are_bisimilar() {
    for (name, s) in integer_fixtures() {
        let sv = to_single_valued(&s).unwrap();
        assert!(n_bisimilar(&s, &sv).unwrap().holds, "{name}");
        assert!(n_bisimilar(&s, &normalize(&sv).unwrap()).unwrap().holds, "{name}");
    }
}

#[test]
fn finals_matter() {
    let r = n_bisimilar(&even_same_ends(), &even_same_ends().with_finals(Vec::new())).unwrap();
    assert!(!r.holds);
    let c = r.counterexample.unwrap();
    assert_eq!(c.failure, Failure::LeftFinal);
    assert!(even_same_ends().accepts(&c.word));
}

#[test]
fn inclusion_and_equivalence_basics() {
    for (name, s) in deterministic_fixtures() {
        assert!(includes(&s, &s).unwrap().holds, "{name}");
        assert!(equivalent(&s, &s).unwrap().holds, "{name}");
        let mut b = SraBuilder::new(Algebra::Integer);
        b.states(1);
        let u = union(&s, &b.build()).unwrap();
        assert!(equivalent(&s, &u).unwrap().holds, "{name}");
    }
}

#[test]
fn nondeterministic_inputs_are_refused() {
    assert_eq!(includes(&has_repeat(), &even_same_ends()), Err(EquivError::Nondeterministic(sra::equiv::Side::Left)));
    assert!(matches!(equivalent(&even_same_ends(), &nondeterministic_fresh()), Err(EquivError::Nondeterministic(_))));
}

#[test]
fn inclusion_matches_bounded_oracle() {
    let alphabet = sample_alphabet();
    let fixtures = deterministic_fixtures();
    for (n1, s1) in &fixtures {
        for (n2, s2) in &fixtures {
            let d = includes(s1, s2).unwrap();
            let bounded = bounded_inclusion(s1, s2, &alphabet, 3);
            match &d.counterexample {
                Some(w) => {
                    assert!(!d.holds);
                    assert!(oracle_accepts(s1, w) && !oracle_accepts(s2, w), "{n1} ⊆ {n2}: {w:?}");
                    // A short counterexample must show up in the bounded search.
                    assert!(!bounded || w.len() > 3 || !w.iter().all(|a| alphabet.contains(a)), "{n1} ⊆ {n2}");
                }
                None => {
                    assert!(d.holds, "{n1} ⊆ {n2}: failure without a word");
                    assert!(bounded, "{n1} ⊆ {n2}: bounded search disagrees");
                }
            }
            let e = equivalent(s1, s2).unwrap();
            if let Some(w) = &e.counterexample {
                assert_ne!(oracle_accepts(s1, w), oracle_accepts(s2, w), "{n1} = {n2}: {w:?}");
            }
            let both = includes(s2, s1).unwrap().holds && d.holds;
            assert_eq!(e.holds, both, "{n1} = {n2}");
        }
    }
}

/// Simulation soundness on the bounded word set for every fixture pair,
/// deterministic or not.
#[test]
fn simulation_is_sound_on_samples() {
    let alphabet = sample_alphabet();
    for (_, s1) in integer_fixtures() {
        for (_, s2) in integer_fixtures() {
            if n_similar(&s1, &s2).unwrap().holds {
                assert!(bounded_inclusion(&s1, &s2, &alphabet, 3));
            }
        }
    }
}

/// Completed deterministic automata: bounded inclusion failing forces
/// simulation to fail; simulation holding forces bounded inclusion.
#[test]
fn simulation_is_complete_on_complete_fixtures() {
    let alphabet = sample_alphabet();
    let fixtures: Vec<_> = deterministic_fixtures().into_iter().map(|(n, s)| (n, complete_sv(&s))).collect();
    for (n1, s1) in &fixtures {
        for (n2, s2) in &fixtures {
            let sim = n_similar(s1, s2).unwrap().holds;
            if !bounded_inclusion(s1, s2, &alphabet, 3) {
                assert!(!sim, "{n1} ≺ {n2}");
            }
            assert_eq!(sim, includes(s1, s2).unwrap().holds, "{n1} ≺ {n2}");
        }
    }
}

/// A value shared by both sides through σ must be counted once when
/// deciding whether some element is fresh for both. Here the left side
/// reads two distinct elements of {1, 2}; after the first, each side holds
/// one value of the guard (the same one), so the second is fresh for both
/// and must be matched. Counting the shared value twice would skip that
/// obligation and wrongly report a simulation.
#[test]
fn shared_values_are_not_double_counted() {
    let g = Pred::range(1, 2);
    let mut b = SraBuilder::new(Algebra::Integer);
    let r = b.register("r", None);
    let s = b.register("s", None);
    let q = b.states(3);
    b.transition(q[0], Label::fresh(g.clone(), r, 2), q[1]);
    b.transition(q[1], Label::fresh(g.clone(), s, 2), q[2]);
    b.accept(q[2]);
    let s1 = b.build();

    let mut b = SraBuilder::new(Algebra::Integer);
    let r = b.register("r", None);
    let q = b.states(2);
    b.transition(q[0], Label::fresh(g, r, 1), q[1]);
    b.accept(q[1]);
    let s2 = b.build();

    assert!(s1.accepts(&ints(&[1, 2])) && !s2.accepts(&ints(&[1, 2])));
    let r = n_similar(&s1, &s2).unwrap();
    assert!(!r.holds);
    assert_eq!(r.counterexample.unwrap().failure, Failure::Unmatched(sra::equiv::Side::Left));
    assert!(!includes(&s1, &s2).unwrap().holds);
}

#[test]
fn trace_replays_on_the_left() {
    let r = n_similar(&first_returns(), &adjacent_distinct()).unwrap();
    assert!(!r.holds);
    let c = r.counterexample.unwrap();
    assert_eq!(c.trace.len(), c.word.len());
    let d = includes(&first_returns(), &adjacent_distinct()).unwrap();
    let w = d.counterexample.unwrap();
    assert!(first_returns().accepts(&w) && !adjacent_distinct().accepts(&w));
}
