//! Symbolic simulation, bisimulation, inclusion and equivalence.
//!
//! Both automata are brought to single-valued form and normalized over one
//! shared minterm basis. A simulation relates triples `(p1, p2, σ)` of
//! normalized states and a partial injective map `σ : R1 ⇀ R2` recording
//! which registers of the two sides hold the same value. From a triple,
//! every transition of the left side must be matched on the right:
//!
//! * `read(r)` with `r ∈ dom σ` by `read(σ(r))` under the same minterm;
//! * `read(r)` with `r ∉ dom σ` by some `fresh(s)`, the value being new to
//!   the right side;
//! * `fresh(r)`, for every right register `s ∉ img σ` abstracted to the
//!   guard minterm, by `read(s)`;
//! * `fresh(r)`, when the minterm still has an element held by neither
//!   side, by some `fresh(s)`.
//!
//! Values shared through `σ` are counted once in the last test.
//!
//! For deterministic inputs every obligation has at most one candidate and
//! the search is a plain worklist; otherwise candidate choices are resolved
//! by a greatest-fixpoint pass over all reachable triples.

use std::borrow::Cow;
use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::algebra::{Elem, MintermSet, Pred};
use crate::automaton::{RegId, Sra, Valuation};
use crate::boolean_ops::{self, OpsError};
use crate::normal::{self, minterm_basis, NormEdge, NormalError, Normalizer};
use crate::single_valued::SvKind;

const NONE: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("automata over different algebras ({0} vs {1})")]
    AlgebraMismatch(crate::algebra::Algebra, crate::algebra::Algebra),
    #[error("valuation is not injective")]
    NotInjective,
    #[error("the {0} automaton is not deterministic")]
    Nondeterministic(Side),
    #[error(transparent)]
    Normal(#[from] NormalError),
    #[error(transparent)]
    Ops(#[from] OpsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A partial injective map from left registers to right registers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegisterCorrespondence(Box<[u8]>);

impl RegisterCorrespondence {
    pub fn empty(left_registers: usize) -> Self {
        RegisterCorrespondence(vec![NONE; left_registers].into())
    }

    pub fn get(&self, r: RegId) -> Option<RegId> {
        let s = self.0[r];
        (s != NONE).then_some(s as RegId)
    }

    /// `σ[r ↦ s]`: drops any pair already targeting `s`, then maps `r` to `s`.
    pub fn update(&self, r: RegId, s: RegId) -> Self {
        RegisterCorrespondence(updated(&self.0, r, s))
    }

    pub fn pairs(&self) -> Vec<(RegId, RegId)> {
        (0..self.0.len()).filter_map(|r| self.get(r).map(|s| (r, s))).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&s| s == NONE)
    }
}

fn updated(sigma: &[u8], r: RegId, s: RegId) -> Box<[u8]> {
    let mut out: Box<[u8]> = sigma.into();
    for t in out.iter_mut() {
        if *t as usize == s {
            *t = NONE;
        }
    }
    out[r] = s as u8;
    out
}

fn inverse(sigma: &[u8], right_registers: usize) -> Box<[u8]> {
    let mut out = vec![NONE; right_registers];
    for (r, &s) in sigma.iter().enumerate() {
        if s != NONE {
            out[s as usize] = r as u8;
        }
    }
    out.into()
}

/// `v1 ⋈ v2`: `σ(r) = s` iff `v1(r) = v2(s) ≠ ♯`.
pub fn correspondence_of(v1: &Valuation, v2: &Valuation) -> Result<RegisterCorrespondence, EquivError> {
    if !v1.is_injective() || !v2.is_injective() {
        return Err(EquivError::NotInjective);
    }
    let mut sigma = vec![NONE; v1.len()];
    for (r, a) in v1.values().iter().enumerate() {
        if let Some(a) = a {
            if let Some(s) = v2.values().iter().position(|b| b == &Some(*a)) {
                sigma[r] = s as u8;
            }
        }
    }
    Ok(RegisterCorrespondence(sigma.into()))
}

/// How a leading transition is matched; determines the concrete input
/// chosen when a trace is replayed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Case {
    /// The leader reads its register `r`.
    ReadLeader(RegId),
    /// The leader reads a fresh value equal to the follower's register `s`.
    FreshHeldByFollower(RegId),
    /// A value new to both sides.
    FreshBoth,
}

/// One step of a simulation trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// The minterm guard of the step.
    pub guard: Pred,
    pub left: Option<SvKind>,
    pub right: Option<SvKind>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// Only the left state is final.
    LeftFinal,
    /// Only the right state is final.
    RightFinal,
    /// A transition of `side` has no counterpart.
    Unmatched(Side),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// Input along the trace, ending with the unmatched symbol if any.
    pub word: Vec<Elem>,
    pub trace: Vec<TraceStep>,
    pub failure: Failure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimResult {
    pub holds: bool,
    /// Present when a failure is reachable without any choice of candidates.
    pub counterexample: Option<Counterexample>,
    /// Number of triples visited.
    pub triples: usize,
}

/// Outcome of an inclusion or equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub holds: bool,
    /// A word in exactly one of the languages when `holds` is false.
    pub counterexample: Option<Vec<Elem>>,
}

struct Candidate {
    left_to: usize,
    right_to: usize,
    sigma: Box<[u8]>,
    follower: NormEdge,
}

struct Obligation {
    leader: Side,
    edge: NormEdge,
    case: Case,
    candidates: Vec<Candidate>,
}

#[derive(Clone)]
struct Link {
    parent: usize,
    leader: Side,
    leader_edge: NormEdge,
    follower_edge: NormEdge,
    case: Case,
}

/// Obligations of the transitions of `a` (in `na`) against `b` (in `nb`),
/// with `sigma` mapping `na`'s registers to `nb`'s. Candidate states and
/// maps are returned in the leader's orientation.
fn obligations(na: &mut Normalizer, nb: &mut Normalizer, a: usize, b: usize, sigma: &[u8], sizes: &[u64]) -> Vec<(NormEdge, Case, Vec<(usize, Box<[u8]>, NormEdge)>)> {
    let theta_a = na.state(a).abstraction.clone();
    let theta_b = nb.state(b).abstraction.clone();
    let edges_a = na.successors(a).to_vec();
    let edges_b = nb.successors(b).to_vec();
    let count = |t: &normal::RegisterAbstraction, g: usize| (0..t.len()).filter(|&r| t.get(r) == Some(g)).count();
    let matching = |kind: fn(SvKind) -> bool, g: usize| -> Vec<NormEdge> {
        let mut out: Vec<NormEdge> = Vec::new();
        for e in &edges_b {
            if e.minterm == g && kind(e.kind) && !out.contains(e) {
                out.push(*e);
            }
        }
        out
    };
    let is_fresh = |k: SvKind| matches!(k, SvKind::Fresh(_));
    let mut out = Vec::new();
    for e in edges_a {
        let g = e.minterm;
        match e.kind {
            SvKind::Read(r) => {
                if sigma[r] != NONE {
                    let s = sigma[r] as usize;
                    let cands = edges_b
                        .iter()
                        .filter(|f| f.minterm == g && f.kind == SvKind::Read(s))
                        .map(|f| (f.to, Box::<[u8]>::from(sigma), *f))
                        .collect();
                    out.push((e, Case::ReadLeader(r), dedup(cands)));
                } else {
                    let cands = matching(is_fresh, g)
                        .into_iter()
                        .map(|f| match f.kind {
                            SvKind::Fresh(s) => (f.to, updated(sigma, r, s), f),
                            _ => unreachable!(),
                        })
                        .collect();
                    out.push((e, Case::ReadLeader(r), dedup(cands)));
                }
            }
            SvKind::Fresh(r) => {
                let image: Vec<usize> = sigma.iter().filter(|&&s| s != NONE).map(|&s| s as usize).collect();
                for s in (0..theta_b.len()).filter(|s| !image.contains(s) && theta_b.get(*s) == Some(g)) {
                    let cands = edges_b
                        .iter()
                        .filter(|f| f.minterm == g && f.kind == SvKind::Read(s))
                        .map(|f| (f.to, updated(sigma, r, s), *f))
                        .collect();
                    out.push((e, Case::FreshHeldByFollower(s), dedup(cands)));
                }
                let shared = sigma
                    .iter()
                    .enumerate()
                    .filter(|(r2, &s)| s != NONE && theta_a.get(*r2) == Some(g))
                    .count();
                let held = count(&theta_a, g) + count(&theta_b, g) - shared;
                if sizes[g] > held as u64 {
                    let cands = matching(is_fresh, g)
                        .into_iter()
                        .map(|f| match f.kind {
                            SvKind::Fresh(s) => (f.to, updated(sigma, r, s), f),
                            _ => unreachable!(),
                        })
                        .collect();
                    out.push((e, Case::FreshBoth, dedup(cands)));
                }
            }
            SvKind::Bullet => unreachable!("normalized automata have no bullet labels"),
        }
    }
    out
}

fn dedup(mut v: Vec<(usize, Box<[u8]>, NormEdge)>) -> Vec<(usize, Box<[u8]>, NormEdge)> {
    let mut seen: Vec<(usize, Box<[u8]>)> = Vec::new();
    v.retain(|(to, sigma, _)| {
        let key = (*to, sigma.clone());
        if seen.contains(&key) {
            false
        } else {
            seen.push(key);
            true
        }
    });
    v
}

type Key = (usize, usize, Box<[u8]>);

struct Checker<'a> {
    left: Normalizer<'a>,
    right: Normalizer<'a>,
    basis: &'a MintermSet,
    sizes: Vec<u64>,
    both_ways: bool,
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
    links: Vec<Option<Link>>,
}

enum Verdict {
    Pass(Vec<Obligation>),
    Fail(Failure, Option<(NormEdge, Side, Case)>),
}

impl<'a> Checker<'a> {
    fn new(s1: &'a Sra, s2: &'a Sra, basis: &'a MintermSet, both_ways: bool) -> Result<Self, EquivError> {
        let left = Normalizer::new(s1, basis)?;
        let right = Normalizer::new(s2, basis)?;
        let cap = (s1.num_registers() + s2.num_registers() + 1) as u64;
        let sizes = (0..basis.len()).map(|m| basis.size_capped(m, cap)).collect();
        let sigma = correspondence_of(s1.initial_valuation(), s2.initial_valuation())?.0;
        let root = (0, 0, sigma);
        Ok(Checker {
            left,
            right,
            basis,
            sizes,
            both_ways,
            index: HashMap::from([(root.clone(), 0)]),
            keys: vec![root],
            links: vec![None],
        })
    }

    fn intern(&mut self, key: Key, link: Link) -> (usize, bool) {
        if let Some(&id) = self.index.get(&key) {
            return (id, false);
        }
        let id = self.keys.len();
        self.index.insert(key.clone(), id);
        self.keys.push(key);
        self.links.push(Some(link));
        (id, true)
    }

    /// Checks the finals condition and collects the obligations of a triple.
    fn verdict(&mut self, id: usize) -> Verdict {
        let (a, b, sigma) = self.keys[id].clone();
        let (fa, fb) = (self.left.is_final(a), self.right.is_final(b));
        if fa && !fb {
            return Verdict::Fail(Failure::LeftFinal, None);
        }
        if self.both_ways && fb && !fa {
            return Verdict::Fail(Failure::RightFinal, None);
        }
        let mut out = Vec::new();
        for (edge, case, cands) in obligations(&mut self.left, &mut self.right, a, b, &sigma, &self.sizes) {
            let candidates = cands
                .into_iter()
                .map(|(to, s, f)| Candidate { left_to: edge.to, right_to: to, sigma: s, follower: f })
                .collect();
            out.push(Obligation { leader: Side::Left, edge, case, candidates });
        }
        if self.both_ways {
            let inv = inverse(&sigma, self.right.sra().num_registers());
            let nl = self.left.sra().num_registers();
            for (edge, case, cands) in obligations(&mut self.right, &mut self.left, b, a, &inv, &self.sizes) {
                let candidates = cands
                    .into_iter()
                    .map(|(to, s, f)| Candidate {
                        left_to: to,
                        right_to: edge.to,
                        sigma: inverse(&s, nl),
                        follower: f,
                    })
                    .collect();
                out.push(Obligation { leader: Side::Right, edge, case, candidates });
            }
        }
        if let Some(o) = out.iter().find(|o| o.candidates.is_empty()) {
            return Verdict::Fail(Failure::Unmatched(o.leader), Some((o.edge, o.leader, o.case)));
        }
        Verdict::Pass(out)
    }

    fn run(&mut self) -> SimResult {
        let mut queue = VecDeque::from([0usize]);
        let mut forced = vec![true];
        let mut succ: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        let mut failed = vec![false];
        while let Some(id) = queue.pop_front() {
            match self.verdict(id) {
                Verdict::Fail(failure, unmatched) => {
                    if forced[id] {
                        let counterexample = Some(self.counterexample(id, failure, unmatched));
                        return SimResult { holds: false, counterexample, triples: self.keys.len() };
                    }
                    failed[id] = true;
                }
                Verdict::Pass(obligations) => {
                    let mut ids = Vec::with_capacity(obligations.len());
                    for o in obligations {
                        let single = o.candidates.len() == 1;
                        let mut targets = Vec::with_capacity(o.candidates.len());
                        for c in o.candidates {
                            let link = Link {
                                parent: id,
                                leader: o.leader,
                                leader_edge: o.edge,
                                follower_edge: c.follower,
                                case: o.case,
                            };
                            let (t, new) = self.intern((c.left_to, c.right_to, c.sigma), link);
                            if new {
                                forced.push(forced[id] && single);
                                succ.push(Vec::new());
                                failed.push(false);
                                queue.push_back(t);
                            }
                            targets.push(t);
                        }
                        ids.push(targets);
                    }
                    succ[id] = ids;
                }
            }
        }
        // Greatest fixpoint: drop triples with an obligation whose candidates
        // are all dropped.
        let mut alive: Vec<bool> = failed.iter().map(|f| !f).collect();
        let mut changed = true;
        while changed {
            changed = false;
            for id in 0..alive.len() {
                if alive[id] && succ[id].iter().any(|c| c.iter().all(|&t| !alive[t])) {
                    alive[id] = false;
                    changed = true;
                }
            }
        }
        SimResult { holds: alive[0], counterexample: None, triples: self.keys.len() }
    }

    fn counterexample(&self, id: usize, failure: Failure, unmatched: Option<(NormEdge, Side, Case)>) -> Counterexample {
        let mut links = Vec::new();
        let mut cur = id;
        while let Some(link) = &self.links[cur] {
            links.push(link.clone());
            cur = link.parent;
        }
        links.reverse();
        let alg = self.basis.algebra();
        let mut v = [self.left.sra().initial_valuation().clone(), self.right.sra().initial_valuation().clone()];
        let slot = |s: Side| match s {
            Side::Left => 0,
            Side::Right => 1,
        };
        let choose = |v: &[Valuation; 2], leader: Side, g: usize, case: Case| -> Elem {
            match case {
                Case::ReadLeader(r) => v[slot(leader)].get(r).expect("read register holds a value"),
                Case::FreshHeldByFollower(s) => v[slot(leader.other())].get(s).expect("matched register holds a value"),
                Case::FreshBoth => {
                    let held: Vec<i64> = v.iter().flat_map(|w| w.values().iter().flatten().map(|e| e.value())).collect();
                    alg.elem(self.basis.witness(g, &held).expect("minterm has an unheld element")).unwrap()
                }
            }
        };
        let mut word = Vec::new();
        let mut trace = Vec::new();
        for l in &links {
            let a = choose(&v, l.leader, l.leader_edge.minterm, l.case);
            word.push(a);
            for (side, e) in [(l.leader, l.leader_edge), (l.leader.other(), l.follower_edge)] {
                if let SvKind::Fresh(r) = e.kind {
                    v[slot(side)].set(r, Some(a));
                }
            }
            let (left, right) = match l.leader {
                Side::Left => (l.leader_edge.kind, l.follower_edge.kind),
                Side::Right => (l.follower_edge.kind, l.leader_edge.kind),
            };
            trace.push(TraceStep { guard: self.basis.compact(l.leader_edge.minterm), left: Some(left), right: Some(right) });
        }
        if let Some((edge, leader, case)) = unmatched {
            word.push(choose(&v, leader, edge.minterm, case));
            let (left, right) = match leader {
                Side::Left => (Some(edge.kind), None),
                Side::Right => (None, Some(edge.kind)),
            };
            trace.push(TraceStep { guard: self.basis.compact(edge.minterm), left, right });
        }
        Counterexample { word, trace, failure }
    }
}

fn check(s1: &Sra, s2: &Sra, both_ways: bool) -> Result<SimResult, EquivError> {
    if s1.algebra() != s2.algebra() {
        return Err(EquivError::AlgebraMismatch(s1.algebra(), s2.algebra()));
    }
    let sv1 = normal::single_valued_form(s1)?;
    let sv2 = normal::single_valued_form(s2)?;
    let basis = minterm_basis(&sv1, Some(&sv2));
    let mut checker = Checker::new(&sv1, &sv2, &basis, both_ways)?;
    Ok(checker.run())
}

/// Whether `s1` is simulated by `s2`.
pub fn n_similar(s1: &Sra, s2: &Sra) -> Result<SimResult, EquivError> {
    check(s1, s2, false)
}

/// Whether `s1` and `s2` are bisimilar.
pub fn n_bisimilar(s1: &Sra, s2: &Sra) -> Result<SimResult, EquivError> {
    check(s1, s2, true)
}

fn deterministic_sv(s: &Sra, side: Side) -> Result<Cow<'_, Sra>, EquivError> {
    if !normal::is_deterministic(s)? {
        return Err(EquivError::Nondeterministic(side));
    }
    Ok(normal::single_valued_form(s)?)
}

/// `L(s1) ⊆ L(s2)` for deterministic automata, with a word of
/// `L(s1) \ L(s2)` when inclusion fails.
pub fn includes(s1: &Sra, s2: &Sra) -> Result<Decision, EquivError> {
    if s1.algebra() != s2.algebra() {
        return Err(EquivError::AlgebraMismatch(s1.algebra(), s2.algebra()));
    }
    let sv1 = deterministic_sv(s1, Side::Left)?;
    let c2 = boolean_ops::complete(&*deterministic_sv(s2, Side::Right)?)?;
    let r = n_similar(&sv1, &c2)?;
    let counterexample = r.counterexample.map(|c| c.word);
    debug_assert!(counterexample.as_ref().is_none_or(|w| s1.accepts(w) && !s2.accepts(w)));
    Ok(Decision { holds: r.holds, counterexample })
}

/// `L(s1) = L(s2)` for deterministic automata, with a word in exactly one
/// of the languages when they differ.
pub fn equivalent(s1: &Sra, s2: &Sra) -> Result<Decision, EquivError> {
    if s1.algebra() != s2.algebra() {
        return Err(EquivError::AlgebraMismatch(s1.algebra(), s2.algebra()));
    }
    let c1 = boolean_ops::complete(&*deterministic_sv(s1, Side::Left)?)?;
    let c2 = boolean_ops::complete(&*deterministic_sv(s2, Side::Right)?)?;
    let r = n_bisimilar(&c1, &c2)?;
    let counterexample = r.counterexample.map(|c| c.word);
    debug_assert!(counterexample.as_ref().is_none_or(|w| s1.accepts(w) != s2.accepts(w)));
    Ok(Decision { holds: r.holds, counterexample })
}
