//! Expansion of an SRA into a register-free automaton over a finite domain.
//!
//! States of the result are the reachable configurations `(q, v)` of the
//! source, with every register value drawn from the domain (or an initial
//! value). All domain elements leading from one configuration to the same
//! successor share one transition whose guard is the union of their atoms.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::algebra::{Algebra, Elem, Pred};
use crate::automaton::{Configuration, Sra, Transition, Valuation};

pub const DEFAULT_MAX_STATES: usize = 2_000_000;

pub const CSV_HEADER: &str = "name,sra_states,sra_tr,registers,reg_domain,sfa_states,sfa_tr";

/// A finite, sorted set of domain values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    algebra: Algebra,
    values: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("bad domain item {item:?}: {reason}")]
pub struct DomainError {
    pub item: String,
    pub reason: &'static str,
}

impl Domain {
    pub fn new(algebra: Algebra, values: impl IntoIterator<Item = i64>) -> Domain {
        let mut values: Vec<i64> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        Domain { algebra, values }
    }

    pub fn from_elems(elems: &[Elem]) -> Domain {
        let algebra = elems.first().map_or(Algebra::Integer, |e| e.algebra());
        Domain::new(algebra, elems.iter().map(|e| e.value()))
    }

    /// Parses a comma-separated list of items.
    ///
    /// Unicode items are single characters, ranges `a-z`, codepoints
    /// `U+0041` or `U+0041-U+005A`, and `bmp` for all of `U+0000-U+FFFF`.
    /// Integer items are `n` or `lo..hi` (inclusive).
    pub fn parse(algebra: Algebra, spec: &str) -> Result<Domain, DomainError> {
        let mut values = Vec::new();
        for item in spec.split(',').filter(|i| !i.is_empty()) {
            let bad = |reason| DomainError { item: item.to_string(), reason };
            let (lo, hi) = match algebra {
                Algebra::Unicode => parse_unicode_item(item).ok_or_else(|| bad("expected c, a-z, U+XXXX[-U+YYYY] or bmp"))?,
                Algebra::Integer => {
                    let num = |s: &str| s.trim().parse::<i64>().ok();
                    let pair = match item.split_once("..") {
                        Some((l, h)) => num(l).zip(num(h)),
                        None => num(item).map(|v| (v, v)),
                    };
                    pair.ok_or_else(|| bad("expected n or lo..hi"))?
                }
            };
            if hi < lo {
                return Err(bad("range bounds out of order"));
            }
            if hi - lo >= DEFAULT_MAX_STATES as i64 {
                return Err(bad("range too large"));
            }
            values.extend(lo..=hi);
        }
        Ok(Domain::new(algebra, values))
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn contains(&self, v: i64) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    pub fn elems(&self) -> impl Iterator<Item = Elem> + '_ {
        self.values.iter().map(|&v| elem(self.algebra, v))
    }
}

fn parse_unicode_item(item: &str) -> Option<(i64, i64)> {
    if item == "bmp" {
        return Some((0, 0xFFFF));
    }
    let point = |s: &str| -> Option<i64> {
        match s.strip_prefix("U+") {
            Some(hex) => i64::from_str_radix(hex, 16).ok().filter(|&v| v <= crate::algebra::MAX_CODEPOINT),
            None => {
                let mut cs = s.chars();
                let c = cs.next()?;
                cs.next().is_none().then_some(c as i64)
            }
        }
    };
    if let Some(v) = point(item) {
        return Some((v, v));
    }
    // Split on a '-' that is not the whole item, so "-" alone stays a literal.
    let (l, h) = item.char_indices().skip(1).find(|&(_, c)| c == '-').map(|(i, _)| (&item[..i], &item[i + 1..]))?;
    Some((point(l)?, point(h)?))
}

fn elem(algebra: Algebra, v: i64) -> Elem {
    match algebra {
        Algebra::Unicode => Elem::Char(v as u32),
        Algebra::Integer => Elem::Int(v),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_states: DEFAULT_MAX_STATES }
    }
}

/// The exploration stopped once more than `max_states` configurations were found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow {
    pub max_states: usize,
    pub discovered: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expansion {
    Sfa(Sra),
    Overflow(Overflow),
}

impl Expansion {
    pub fn sfa(&self) -> Option<&Sra> {
        match self {
            Expansion::Sfa(s) => Some(s),
            Expansion::Overflow(_) => None,
        }
    }
}

/// Guard holding exactly the given sorted, distinct values.
fn atoms_guard(values: &[i64]) -> Pred {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i;
        while j + 1 < values.len() && values[j + 1] == values[j] + 1 {
            j += 1;
        }
        parts.push(if i == j { Pred::Atom(values[i]) } else { Pred::range(values[i], values[j]) });
        i = j + 1;
    }
    Pred::or_all(parts)
}

fn config_name(s: &Sra, c: &Configuration) -> String {
    let values: Vec<String> = c.valuation.values().iter().map(|v| v.map_or("_".to_string(), |e| e.to_string())).collect();
    format!("{}[{}]", s.state_names()[c.state], values.join(","))
}

/// Breadth-first expansion of the configuration graph restricted to `domain`.
pub fn expand_to_sfa(s: &Sra, domain: &Domain, limits: Limits) -> Expansion {
    let alg = s.algebra();
    // Domain elements admitted by each transition guard.
    let admitted: Vec<Vec<i64>> =
        s.transitions().iter().map(|t| domain.values().iter().copied().filter(|&v| t.label.guard.eval(v)).collect()).collect();

    let mut index: HashMap<Configuration, usize> = HashMap::new();
    let mut configs = vec![s.initial_configuration()];
    index.insert(configs[0].clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    let mut transitions = Vec::new();

    while let Some(id) = queue.pop_front() {
        let c = configs[id].clone();
        let mut by_target: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
        for &ti in s.outgoing(c.state) {
            let t = &s.transitions()[ti];
            let mut fire = |a: i64, configs: &mut Vec<Configuration>, queue: &mut VecDeque<usize>| -> bool {
                let mut valuation = c.valuation.clone();
                valuation.assign(t.label.upd, elem(alg, a));
                let next = Configuration { state: t.to, valuation };
                let target = match index.get(&next) {
                    Some(&i) => i,
                    None => {
                        let i = configs.len();
                        index.insert(next.clone(), i);
                        configs.push(next);
                        queue.push_back(i);
                        i
                    }
                };
                by_target.entry(target).or_default().push(a);
                configs.len() <= limits.max_states
            };
            if let Some(r) = t.label.eq.iter().next() {
                // Only the value held in an E-register can fire.
                let Some(a) = c.valuation.get(r) else { continue };
                let holders = c.valuation.preimage(a);
                let a = a.value();
                if domain.contains(a) && fires(t, holders, a) && !fire(a, &mut configs, &mut queue) {
                    return overflow(limits, configs.len());
                }
            } else {
                for &a in &admitted[ti] {
                    let holders = c.valuation.preimage(elem(alg, a));
                    if holders.intersection(t.label.neq).is_empty() && !fire(a, &mut configs, &mut queue) {
                        return overflow(limits, configs.len());
                    }
                }
            }
        }
        for (to, mut values) in by_target {
            values.sort_unstable();
            values.dedup();
            transitions.push(Transition { from: id, label: crate::automaton::Label::plain(atoms_guard(&values)), to });
        }
    }

    let names = configs.iter().map(|c| config_name(s, c)).collect();
    let finals: Vec<usize> = (0..configs.len()).filter(|&i| s.is_final(configs[i].state)).collect();
    Expansion::Sfa(Sra::from_parts(alg, Vec::new(), names, 0, Valuation::empty(0), finals, transitions))
}

fn fires(t: &Transition, holders: crate::automaton::RegSet, a: i64) -> bool {
    t.label.eq.is_subset(holders) && t.label.neq.intersection(holders).is_empty() && t.label.guard.eval(a)
}

fn overflow(limits: Limits, discovered: usize) -> Expansion {
    Expansion::Overflow(Overflow { max_states: limits.max_states, discovered })
}

/// One row of a size table: the automaton, how many domain values its
/// registers can hold, and the expansion's size or an overflow marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SizeRow {
    pub name: String,
    pub sra_states: usize,
    pub sra_transitions: usize,
    pub registers: usize,
    pub register_domain: usize,
    /// `(states, transitions)`, or `None` after an overflow.
    pub sfa: Option<(usize, usize)>,
}

pub fn size_report(name: &str, s: &Sra, domain: &Domain, expansion: &Expansion) -> SizeRow {
    SizeRow {
        name: name.to_string(),
        sra_states: s.num_states(),
        sra_transitions: s.transitions().len(),
        registers: s.num_registers(),
        register_domain: register_domain(s, domain),
        sfa: expansion.sfa().map(|e| (e.num_states(), e.transitions().len())),
    }
}

/// Domain values admitted by some guard of a storing transition.
pub fn register_domain(s: &Sra, domain: &Domain) -> usize {
    let stores: Vec<&Pred> = s.transitions().iter().filter(|t| !t.label.upd.is_empty()).map(|t| &t.label.guard).collect();
    domain.values().iter().filter(|&&v| stores.iter().any(|g| g.eval(v))).count()
}

impl fmt::Display for SizeRow {
    /// The row in [`CSV_HEADER`] order; overflowing expansions print `---`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = if self.name.contains([',', '"']) { format!("\"{}\"", self.name.replace('"', "\"\"")) } else { self.name.clone() };
        write!(f, "{name},{},{},{},{},", self.sra_states, self.sra_transitions, self.registers, self.register_domain)?;
        match self.sfa {
            Some((states, tr)) => write!(f, "{states},{tr}"),
            None => f.write_str("---,---"),
        }
    }
}
