//! Register abstractions and the normalized automaton `N(S)`.
//!
//! A state of `N(S)` is a pair `⟨q, θ⟩` where `θ` records, for every
//! register, the minterm its value lies in (or `⊥` when it is empty). Every
//! transition of `N(S)` is guarded by a single minterm and is enabled: some
//! valuation compatible with `θ` can take it. This makes emptiness a plain
//! graph search and determinism a syntactic check.
//!
//! `N(S)` is explored lazily by [`Normalizer`]; [`normalize`] materializes
//! the reachable part.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::algebra::{Algebra, BasisId, Elem, MintermSet, Pred};
use crate::automaton::{Label, Sra, StateId, Transition, Valuation};
use crate::single_valued::{self, SvError, SvKind};

/// Marks an empty register in an abstraction.
const BOTTOM: u16 = u16::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalError {
    #[error("automaton is not single-valued")]
    NotSingleValued,
    #[error(transparent)]
    Translation(#[from] SvError),
    #[error("{0} minterms exceed the supported maximum")]
    TooManyMinterms(usize),
    #[error("guard or minterm does not belong to this minterm basis")]
    BasisMismatch,
    #[error("automata over different algebras ({0} vs {1})")]
    AlgebraMismatch(Algebra, Algebra),
}

/// Minterms over the guards of `s` (and `extra`) together with atoms of
/// their non-empty initial register values.
pub fn minterm_basis(s: &Sra, extra: Option<&Sra>) -> MintermSet {
    let mut preds = Vec::new();
    for a in std::iter::once(s).chain(extra) {
        preds.extend(a.transitions().iter().map(|t| t.label.guard.clone()));
        preds.extend(a.initial_valuation().values().iter().flatten().map(|e| Pred::Atom(e.value())));
    }
    s.algebra().minterms(&preds)
}

/// `θ`: the minterm (index into a basis) of every register, or `⊥`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RegisterAbstraction {
    basis: BasisId,
    slots: Box<[u16]>,
}

impl RegisterAbstraction {
    /// The abstraction of a concrete valuation.
    pub fn of(basis: &MintermSet, v: &Valuation) -> Result<Self, NormalError> {
        let slots = v
            .values()
            .iter()
            .map(|a| match a {
                None => Ok(BOTTOM),
                Some(a) => basis.minterm_of(a.value()).map(|m| m as u16).ok_or(NormalError::BasisMismatch),
            })
            .collect::<Result<_, _>>()?;
        Ok(RegisterAbstraction { basis: basis.id(), slots })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// `θ_r`, or `None` for `⊥`.
    pub fn get(&self, r: usize) -> Option<usize> {
        let m = self.slots[r];
        (m != BOTTOM).then_some(m as usize)
    }

    pub fn basis(&self) -> BasisId {
        self.basis
    }

    fn count(&self, m: usize) -> usize {
        self.slots.iter().filter(|&&s| s as usize == m).count()
    }

    /// Some injective valuation satisfies `θ`: no minterm holds more
    /// registers than it has elements.
    pub fn is_meaningful(&self, basis: &MintermSet) -> bool {
        (0..basis.len()).all(|m| {
            let e = self.count(m) as u64;
            e == 0 || basis.size_capped(m, e) >= e
        })
    }
}

impl fmt::Debug for RegisterAbstraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&abstraction_string(&self.slots))
    }
}

fn abstraction_string(slots: &[u16]) -> String {
    let parts: Vec<String> =
        slots.iter().map(|&m| if m == BOTTOM { "_".to_string() } else { format!("m{m}") }).collect();
    format!("[{}]", parts.join(","))
}

/// `E(θ, m)`: how many registers `θ` places in minterm `m`.
pub fn count_matching_registers(theta: &RegisterAbstraction, basis: &MintermSet, m: usize) -> Result<usize, NormalError> {
    if theta.basis != basis.id() || m >= basis.len() {
        return Err(NormalError::BasisMismatch);
    }
    Ok(theta.count(m))
}

/// Whether a transition with label `kind` and minterm guard `m` can fire
/// from some valuation satisfying `θ`.
pub fn enabled(theta: &RegisterAbstraction, basis: &MintermSet, kind: SvKind, m: usize) -> Result<bool, NormalError> {
    let e = count_matching_registers(theta, basis, m)?;
    Ok(match kind {
        SvKind::Read(r) => theta.get(r) == Some(m),
        SvKind::Fresh(_) | SvKind::Bullet => basis.size_capped(m, e as u64 + 1) > e as u64,
    })
}

/// A state `⟨q, θ⟩` of `N(S)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormState {
    pub base: StateId,
    pub abstraction: RegisterAbstraction,
}

/// A transition of `N(S)`: minterm guard, `read`/`fresh` label, target id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NormEdge {
    pub minterm: usize,
    pub kind: SvKind,
    pub to: usize,
}

/// Lazy explorer of `N(S)` for a single-valued `S` over a fixed basis.
///
/// States get dense ids in discovery order; id 0 is the initial state.
pub struct Normalizer<'a> {
    sra: &'a Sra,
    basis: &'a MintermSet,
    kinds: Vec<SvKind>,
    guards: Vec<usize>,
    /// `min(|m|, R + 1)` for every minterm, enough for every threshold test.
    sizes: Vec<u64>,
    states: Vec<NormState>,
    ids: HashMap<NormState, usize>,
    edges: Vec<Option<Vec<NormEdge>>>,
}

impl<'a> Normalizer<'a> {
    pub fn new(sra: &'a Sra, basis: &'a MintermSet) -> Result<Self, NormalError> {
        if sra.algebra() != basis.algebra() {
            return Err(NormalError::AlgebraMismatch(sra.algebra(), basis.algebra()));
        }
        let kinds = single_valued::sv_kinds(sra).ok_or(NormalError::NotSingleValued)?;
        if basis.len() >= BOTTOM as usize {
            return Err(NormalError::TooManyMinterms(basis.len()));
        }
        let guards = sra
            .transitions()
            .iter()
            .map(|t| basis.index_of(&t.label.guard).ok_or(NormalError::BasisMismatch))
            .collect::<Result<_, _>>()?;
        let cap = sra.num_registers() as u64 + 1;
        let sizes = (0..basis.len()).map(|m| basis.size_capped(m, cap)).collect();
        let initial = NormState {
            base: sra.initial(),
            abstraction: RegisterAbstraction::of(basis, sra.initial_valuation())?,
        };
        Ok(Normalizer {
            sra,
            basis,
            kinds,
            guards,
            sizes,
            ids: HashMap::from([(initial.clone(), 0)]),
            states: vec![initial],
            edges: vec![None],
        })
    }

    pub fn sra(&self) -> &'a Sra {
        self.sra
    }

    pub fn basis(&self) -> &'a MintermSet {
        self.basis
    }

    /// Number of states discovered so far.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: usize) -> &NormState {
        &self.states[id]
    }

    pub fn is_final(&self, id: usize) -> bool {
        self.sra.is_final(self.states[id].base)
    }

    fn intern(&mut self, s: NormState) -> usize {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.states.len();
        self.ids.insert(s.clone(), id);
        self.states.push(s);
        self.edges.push(None);
        id
    }

    /// The outgoing transitions of state `id`, computed on first request.
    pub fn successors(&mut self, id: usize) -> &[NormEdge] {
        if self.edges[id].is_none() {
            let edges = self.expand(id);
            self.edges[id] = Some(edges);
        }
        self.edges[id].as_deref().unwrap()
    }

    fn expand(&mut self, id: usize) -> Vec<NormEdge> {
        let NormState { base, abstraction } = self.states[id].clone();
        let sra = self.sra;
        let basis = self.basis;
        let mut out = Vec::new();
        for &ti in sra.outgoing(base) {
            let t = &sra.transitions()[ti];
            let g = self.guards[ti];
            match self.kinds[ti] {
                SvKind::Read(r) => {
                    // Enabled iff the guard covers θ_r; the new guard is θ_r itself.
                    if let Some(m) = abstraction.get(r).filter(|&m| basis.get(m).has_positive(g)) {
                        let to = self.intern(NormState { base: t.to, abstraction: abstraction.clone() });
                        out.push(NormEdge { minterm: m, kind: SvKind::Read(r), to });
                    }
                }
                SvKind::Fresh(r) => {
                    for &m in basis.minterms_under(g) {
                        if self.sizes[m] <= abstraction.count(m) as u64 {
                            continue;
                        }
                        let mut slots = abstraction.slots.clone();
                        slots[r] = m as u16;
                        let to = self.intern(NormState {
                            base: t.to,
                            abstraction: RegisterAbstraction { basis: abstraction.basis, slots },
                        });
                        out.push(NormEdge { minterm: m, kind: SvKind::Fresh(r), to });
                    }
                }
                SvKind::Bullet => unreachable!("single-valued automata have no bullet labels"),
            }
        }
        out
    }

    /// Explores every reachable state, up to `limit` states.
    /// Returns whether exploration finished.
    pub fn explore(&mut self, limit: usize) -> bool {
        let mut next = 0;
        while next < self.states.len() {
            if self.states.len() > limit {
                return false;
            }
            self.successors(next);
            next += 1;
        }
        true
    }

    /// A shortest path of edges from the initial state to a final state.
    pub fn path_to_final(&mut self) -> Option<Vec<NormEdge>> {
        let mut parent: HashMap<usize, (usize, NormEdge)> = HashMap::new();
        let mut queue = VecDeque::from([0usize]);
        let mut seen = vec![false; self.len()];
        seen[0] = true;
        while let Some(id) = queue.pop_front() {
            if self.is_final(id) {
                let mut path = Vec::new();
                let mut cur = id;
                while let Some(&(prev, e)) = parent.get(&cur) {
                    path.push(e);
                    cur = prev;
                }
                path.reverse();
                return Some(path);
            }
            let edges = self.successors(id).to_vec();
            seen.resize(self.len(), false);
            for e in edges {
                if !seen[e.to] {
                    seen[e.to] = true;
                    parent.insert(e.to, (id, e));
                    queue.push_back(e.to);
                }
            }
        }
        None
    }

    /// Turns a path of edges from the initial state into a concrete word.
    pub fn replay(&self, path: &[NormEdge]) -> Vec<Elem> {
        replay(self.sra, self.basis, path.iter().map(|e| (e.kind, e.minterm)))
    }
}

/// Instantiates a sequence of minterm-guarded `read`/`fresh` steps from the
/// initial valuation of a single-valued `sra`: reads repeat the register,
/// fresh steps take the least element of the minterm not currently held.
pub fn replay(sra: &Sra, basis: &MintermSet, steps: impl IntoIterator<Item = (SvKind, usize)>) -> Vec<Elem> {
    let alg = sra.algebra();
    let mut v = sra.initial_valuation().clone();
    let mut word = Vec::new();
    for (kind, m) in steps {
        let a = match kind {
            SvKind::Read(r) => v.get(r).expect("enabled read has a value"),
            SvKind::Fresh(r) => {
                let held: Vec<i64> = v.values().iter().flatten().map(|e| e.value()).collect();
                let a = alg.elem(basis.witness(m, &held).expect("enabled fresh has a witness")).unwrap();
                v.set(r, Some(a));
                a
            }
            SvKind::Bullet => unreachable!("single-valued automata have no bullet labels"),
        };
        word.push(a);
    }
    word
}

/// `s` itself when single-valued, otherwise its single-valued translation.
pub fn single_valued_form(s: &Sra) -> Result<std::borrow::Cow<'_, Sra>, NormalError> {
    if single_valued::is_single_valued(s) {
        Ok(std::borrow::Cow::Borrowed(s))
    } else {
        Ok(std::borrow::Cow::Owned(single_valued::to_single_valued(s)?))
    }
}

/// The reachable part of `N(s)` for a single-valued `s`, over its own basis.
pub fn normalize(s: &Sra) -> Result<Sra, NormalError> {
    let basis = minterm_basis(s, None);
    normalize_with(s, &basis)
}

/// The reachable part of `N(s)` over a given basis. State names carry the
/// base state and the abstraction (`m<i>` for minterm `i`, `_` for `⊥`).
pub fn normalize_with(s: &Sra, basis: &MintermSet) -> Result<Sra, NormalError> {
    let mut n = Normalizer::new(s, basis)?;
    n.explore(usize::MAX);
    let width = s.num_registers();
    let mut guards: HashMap<usize, Pred> = HashMap::new();
    let mut transitions = Vec::new();
    for id in 0..n.len() {
        for e in n.successors(id).to_vec() {
            let guard = guards.entry(e.minterm).or_insert_with(|| basis.compact(e.minterm)).clone();
            let label = match e.kind {
                SvKind::Read(r) => Label::read(guard, r),
                SvKind::Fresh(r) => Label::fresh(guard, r, width),
                SvKind::Bullet => unreachable!(),
            };
            transitions.push(Transition { from: id, label, to: e.to });
        }
    }
    let names = n
        .states
        .iter()
        .map(|st| format!("{}{}", s.state_names()[st.base], abstraction_string(&st.abstraction.slots)))
        .collect();
    let finals: Vec<StateId> = (0..n.len()).filter(|&i| n.is_final(i)).collect();
    Ok(Sra::from_parts(
        s.algebra(),
        s.register_names().to_vec(),
        names,
        0,
        s.initial_valuation().clone(),
        finals,
        transitions,
    ))
}

/// An accepted word of `s`, or `None` when `L(s) = ∅`.
pub fn emptiness(s: &Sra) -> Result<Option<Vec<Elem>>, NormalError> {
    let sv = single_valued_form(s)?;
    let basis = minterm_basis(&sv, None);
    let mut n = Normalizer::new(&sv, &basis)?;
    let word = n.path_to_final().map(|p| n.replay(&p));
    debug_assert!(word.as_ref().is_none_or(|w| s.accepts(w)));
    Ok(word)
}

pub fn is_empty(s: &Sra) -> Result<bool, NormalError> {
    Ok(emptiness(s)?.is_none())
}

/// Two transitions from the same state can never both fire on one input
/// from one configuration, or always lead to the same configuration.
fn pair_is_safe(alg: Algebra, single_valued: bool, t1: &Transition, t2: &Transition) -> bool {
    let (l1, l2) = (&t1.label, &t2.label);
    if !l1.eq.intersection(l2.neq).is_empty() || !l2.eq.intersection(l1.neq).is_empty() {
        return true;
    }
    if t1.to == t2.to && l1.upd == l2.upd {
        return true;
    }
    // Distinct registers of a single-valued automaton never share a value.
    if single_valued && !l1.eq.is_empty() && !l2.eq.is_empty() && l1.eq != l2.eq {
        return true;
    }
    !alg.is_sat(&Pred::and(l1.guard.clone(), l2.guard.clone()))
}

/// A sufficient syntactic condition for determinism: every pair of
/// transitions leaving one state is safe (see `pair_is_safe`).
pub fn is_syntactically_deterministic(s: &Sra) -> bool {
    let sv = single_valued::is_single_valued(s);
    (0..s.num_states()).all(|q| {
        let out = s.outgoing(q);
        out.iter().enumerate().all(|(i, &a)| {
            out[i + 1..].iter().all(|&b| pair_is_safe(s.algebra(), sv, &s.transitions()[a], &s.transitions()[b]))
        })
    })
}

/// Whether every reachable configuration has at most one successor per input.
///
/// The syntactic test answers most automata; otherwise the reachable part
/// of `N` of the single-valued form is searched for two transitions with the
/// same minterm guard that either share a label but not a target, or are
/// fresh into different registers.
pub fn is_deterministic(s: &Sra) -> Result<bool, NormalError> {
    if is_syntactically_deterministic(s) {
        return Ok(true);
    }
    exactly_deterministic(s)
}

/// The exact determinism test without the syntactic shortcut.
pub fn exactly_deterministic(s: &Sra) -> Result<bool, NormalError> {
    let sv = single_valued_form(s)?;
    let basis = minterm_basis(&sv, None);
    let mut n = Normalizer::new(&sv, &basis)?;
    let mut id = 0;
    while id < n.len() {
        let edges = n.successors(id);
        for (i, a) in edges.iter().enumerate() {
            for b in &edges[i + 1..] {
                if a.minterm != b.minterm {
                    continue;
                }
                let clash = match (a.kind, b.kind) {
                    (x, y) if x == y => a.to != b.to,
                    (SvKind::Fresh(_), SvKind::Fresh(_)) => true,
                    _ => false,
                };
                if clash {
                    return Ok(false);
                }
            }
        }
        id += 1;
    }
    Ok(true)
}

/// Whether every reachable configuration of a single-valued `s` can read
/// every domain element: each non-empty register has a read, and every
/// minterm with an element outside the registers has a fresh transition.
pub fn is_complete(s: &Sra) -> Result<bool, NormalError> {
    let basis = minterm_basis(s, None);
    let mut n = Normalizer::new(s, &basis)?;
    let cap = s.num_registers() as u64 + 1;
    let sizes: Vec<u64> = (0..basis.len()).map(|m| basis.size_capped(m, cap)).collect();
    let mut id = 0;
    while id < n.len() {
        let theta = n.state(id).abstraction.clone();
        let edges = n.successors(id);
        for r in 0..theta.len() {
            if let Some(m) = theta.get(r) {
                if !edges.iter().any(|e| e.kind == SvKind::Read(r) && e.minterm == m) {
                    return Ok(false);
                }
            }
        }
        for m in 0..basis.len() {
            if sizes[m] > theta.count(m) as u64
                && !edges.iter().any(|e| matches!(e.kind, SvKind::Fresh(_)) && e.minterm == m)
            {
                return Ok(false);
            }
        }
        id += 1;
    }
    Ok(true)
}
