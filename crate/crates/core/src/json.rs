//! The JSON automaton interchange format.
//!
//! ```json
//! {
//!   "algebra": "integer",
//!   "registers": ["r"],
//!   "states": ["0", "1"],
//!   "initial": "0",
//!   "initial_valuation": { "r": null },
//!   "finals": ["1"],
//!   "transitions": [
//!     { "from": "0", "guard": "div 2", "E": [], "I": [], "U": ["r"], "to": "1" }
//!   ]
//! }
//! ```
//!
//! Values are JSON integers (codepoints for the Unicode algebra, which also
//! accepts one-character strings on input). [`to_json`] emits the canonical
//! layout, and parsing then printing a canonical file reproduces it exactly.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, Elem};
use crate::automaton::{CoreError, Label, RegSet, Sra, Transition, Valuation};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("duplicate {kind} name `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("initial_valuation must list every register exactly once (missing `{0}`)")]
    MissingValue(String),
    #[error("invalid value for register `{register}`: {value}")]
    BadValue { register: String, value: String },
    #[error("guard of transition {index}: {error}")]
    Guard { index: usize, error: AlgebraError },
    #[error(transparent)]
    Core(#[from] CoreError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    algebra: Algebra,
    registers: Vec<String>,
    states: Vec<String>,
    initial: String,
    initial_valuation: IndexMap<String, Option<Value>>,
    finals: Vec<String>,
    transitions: Vec<TransitionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    from: String,
    guard: String,
    #[serde(rename = "E")]
    eq: Vec<String>,
    #[serde(rename = "I")]
    neq: Vec<String>,
    #[serde(rename = "U")]
    upd: Vec<String>,
    to: String,
}

fn index(names: &[String], kind: &'static str) -> Result<HashMap<String, usize>, FormatError> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i).is_some() {
            return Err(FormatError::Duplicate { kind, name: n.clone() });
        }
    }
    Ok(map)
}

fn lookup(map: &HashMap<String, usize>, kind: &'static str, name: &str) -> Result<usize, FormatError> {
    map.get(name).copied().ok_or_else(|| FormatError::Unknown { kind, name: name.to_string() })
}

/// Reads a JSON value as a domain element of `alg`.
pub fn elem_from_json(alg: Algebra, v: &Value) -> Option<Elem> {
    match v {
        Value::Number(n) => alg.elem(n.as_i64()?).ok(),
        Value::String(s) if alg == Algebra::Unicode => {
            let mut cs = s.chars();
            let c = cs.next()?;
            cs.next().is_none().then_some(Elem::from(c))
        }
        _ => None,
    }
}

pub fn elem_to_json(a: Elem) -> Value {
    Value::from(a.value())
}

pub fn from_json(src: &str) -> Result<Sra, FormatError> {
    let doc: Document = serde_json::from_str(src)?;
    let alg = doc.algebra;
    let regs = index(&doc.registers, "register")?;
    let states = index(&doc.states, "state")?;
    let mut values = vec![None; doc.registers.len()];
    for (name, v) in &doc.initial_valuation {
        let r = lookup(&regs, "register", name)?;
        values[r] = match v {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                elem_from_json(alg, v)
                    .ok_or_else(|| FormatError::BadValue { register: name.clone(), value: v.to_string() })?,
            ),
        };
    }
    if let Some(missing) = doc.registers.iter().find(|r| !doc.initial_valuation.contains_key(*r)) {
        return Err(FormatError::MissingValue(missing.clone()));
    }
    let regset = |names: &[String]| -> Result<RegSet, FormatError> {
        names.iter().map(|n| lookup(&regs, "register", n)).collect()
    };
    let mut transitions = Vec::with_capacity(doc.transitions.len());
    for (i, t) in doc.transitions.iter().enumerate() {
        let guard = alg.parse(&t.guard).map_err(|error| FormatError::Guard { index: i, error })?;
        transitions.push(Transition {
            from: lookup(&states, "state", &t.from)?,
            label: Label::new(guard, regset(&t.eq)?, regset(&t.neq)?, regset(&t.upd)?),
            to: lookup(&states, "state", &t.to)?,
        });
    }
    let finals = doc.finals.iter().map(|f| lookup(&states, "state", f)).collect::<Result<Vec<_>, _>>()?;
    let initial = lookup(&states, "state", &doc.initial)?;
    Ok(Sra::from_parts(alg, doc.registers, doc.states, initial, Valuation::new(values), finals, transitions)
        .validated()?)
}

/// Canonical pretty-printed JSON, newline-terminated.
pub fn to_json(sra: &Sra) -> String {
    let alg = sra.algebra();
    let regs = sra.register_names();
    let states = sra.state_names();
    let names = |s: RegSet| s.iter().map(|r| regs[r].clone()).collect::<Vec<_>>();
    let doc = Document {
        algebra: alg,
        registers: regs.to_vec(),
        states: states.to_vec(),
        initial: states[sra.initial()].clone(),
        initial_valuation: regs
            .iter()
            .zip(sra.initial_valuation().values())
            .map(|(n, v)| (n.clone(), Some(v.map_or(Value::Null, elem_to_json))))
            .collect(),
        finals: sra.finals().map(|q| states[q].clone()).collect(),
        transitions: sra
            .transitions()
            .iter()
            .map(|t| TransitionDoc {
                from: states[t.from].clone(),
                guard: alg.format(&t.label.guard),
                eq: names(t.label.eq),
                neq: names(t.label.neq),
                upd: names(t.label.upd),
                to: states[t.to].clone(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("automaton documents always serialize");
    out.push('\n');
    out
}
