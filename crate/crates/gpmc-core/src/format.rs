//! JSON file formats for models and automata.
//!
//! Degrees are decimal strings, never floating literals, so values survive
//! serialization micro-exactly. Entries omitted from the `initial`,
//! `transitions` and `labels` sections default to zero; the sections
//! themselves are required.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{FuzzyMatrix, FuzzyVector};
use crate::automata::{AcceptanceMode, FuzzyAutomaton, Guard, GuardedTransition};
use crate::gpks::{Gpks, Letter, ModelError};
use crate::poss::Poss;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{context}: {source}")]
    BadDegree {
        context: String,
        source: crate::poss::ParsePossError,
    },
    #[error("{context}: unknown {kind} `{name}`")]
    UnknownName {
        context: String,
        kind: &'static str,
        name: String,
    },
    #[error("bad guard in transition {from} -> {to}: {source}")]
    BadGuard {
        from: String,
        to: String,
        source: crate::automata::GuardParseError,
    },
    #[error("`mode` must be \"finite\" or \"buchi\", got `{0}`")]
    BadMode(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub states: Vec<String>,
    pub ap: Vec<String>,
    pub initial: BTreeMap<String, String>,
    pub transitions: Vec<ModelTransition>,
    pub labels: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelTransition {
    pub from: String,
    pub to: String,
    pub p: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AutomatonFile {
    pub states: Vec<String>,
    pub ap: Vec<String>,
    pub mode: String,
    pub initial: BTreeMap<String, String>,
    #[serde(rename = "final")]
    pub accepting: BTreeMap<String, String>,
    pub transitions: Vec<AutomatonTransition>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_letters: Vec<BTreeMap<String, String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AutomatonTransition {
    pub from: String,
    pub guard: String,
    pub value: String,
    pub to: String,
}

fn degree(text: &str, context: impl Fn() -> String) -> Result<Poss, LoadError> {
    Poss::parse(text).map_err(|source| LoadError::BadDegree {
        context: context(),
        source,
    })
}

fn index_of(
    names: &[String],
    name: &str,
    kind: &'static str,
    context: impl Fn() -> String,
) -> Result<usize, LoadError> {
    // With duplicate declarations the first occurrence wins; duplicates are
    // a diagnostic, not a load failure.
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| LoadError::UnknownName {
            context: context(),
            kind,
            name: name.to_string(),
        })
}

impl ModelFile {
    pub fn into_model(self) -> Result<Gpks, LoadError> {
        let n = self.states.len();
        let mut initial_entries = vec![Poss::ZERO; n];
        for (state, value) in &self.initial {
            let s = index_of(&self.states, state, "state", || "initial".into())?;
            initial_entries[s] = degree(value, || format!("initial[{state}]"))?;
        }
        let initial = FuzzyVector::new(initial_entries);

        let mut trans = FuzzyMatrix::zeros(n, n);
        for t in &self.transitions {
            let context = || format!("transition {} -> {}", t.from, t.to);
            let from = index_of(&self.states, &t.from, "state", context)?;
            let to = index_of(&self.states, &t.to, "state", context)?;
            let p = degree(&t.p, context)?;
            // Repeated entries combine by max, consistent with possibilistic
            // alternatives.
            if p > trans.get(from, to) {
                trans.set(from, to, p);
            }
        }

        let mut labels = FuzzyMatrix::zeros(n, self.ap.len());
        for (state, row) in &self.labels {
            let s = index_of(&self.states, state, "state", || "labels".into())?;
            for (ap, value) in row {
                let a = index_of(&self.ap, ap, "atomic proposition", || {
                    format!("labels[{state}]")
                })?;
                labels.set(s, a, degree(value, || format!("labels[{state}][{ap}]"))?);
            }
        }

        Ok(Gpks::new(self.states, self.ap, trans, initial, labels)?)
    }

    pub fn from_model(model: &Gpks) -> ModelFile {
        let mut initial = BTreeMap::new();
        for (s, name) in model.states().iter().enumerate() {
            let v = model.initial().get(s);
            if !v.is_zero() {
                initial.insert(name.clone(), v.to_string());
            }
        }
        let mut transitions = Vec::new();
        for s in 0..model.state_count() {
            for t in 0..model.state_count() {
                let p = model.trans().get(s, t);
                if !p.is_zero() {
                    transitions.push(ModelTransition {
                        from: model.states()[s].clone(),
                        to: model.states()[t].clone(),
                        p: p.to_string(),
                    });
                }
            }
        }
        let mut labels = BTreeMap::new();
        for (s, name) in model.states().iter().enumerate() {
            let mut row = BTreeMap::new();
            for (a, ap) in model.ap().iter().enumerate() {
                let v = model.labels().get(s, a);
                if !v.is_zero() {
                    row.insert(ap.clone(), v.to_string());
                }
            }
            labels.insert(name.clone(), row);
        }
        ModelFile {
            states: model.states().to_vec(),
            ap: model.ap().to_vec(),
            initial,
            transitions,
            labels,
        }
    }
}

impl AutomatonFile {
    pub fn into_automaton(self) -> Result<FuzzyAutomaton, LoadError> {
        let mode = match self.mode.as_str() {
            "finite" => AcceptanceMode::Finite,
            "buchi" => AcceptanceMode::Buchi,
            other => return Err(LoadError::BadMode(other.to_string())),
        };
        let k = self.states.len();
        let mut initial = vec![Poss::ZERO; k];
        for (state, value) in &self.initial {
            let q = index_of(&self.states, state, "automaton state", || "initial".into())?;
            initial[q] = degree(value, || format!("initial[{state}]"))?;
        }
        let mut accepting = vec![Poss::ZERO; k];
        for (state, value) in &self.accepting {
            let q = index_of(&self.states, state, "automaton state", || "final".into())?;
            accepting[q] = degree(value, || format!("final[{state}]"))?;
        }
        let mut transitions = Vec::new();
        for t in &self.transitions {
            let context = || format!("transition {} -> {}", t.from, t.to);
            let from = index_of(&self.states, &t.from, "automaton state", context)?;
            let to = index_of(&self.states, &t.to, "automaton state", context)?;
            let guard = Guard::parse(&t.guard).map_err(|source| LoadError::BadGuard {
                from: t.from.clone(),
                to: t.to.clone(),
                source,
            })?;
            let mut atoms = std::collections::BTreeSet::new();
            guard.atoms(&mut atoms);
            for atom in atoms {
                if !self.ap.contains(&atom) {
                    return Err(LoadError::UnknownName {
                        context: context(),
                        kind: "atomic proposition",
                        name: atom,
                    });
                }
            }
            transitions.push(GuardedTransition {
                from,
                to,
                guard,
                value: degree(&t.value, context)?,
            });
        }
        let mut extra_letters = Vec::new();
        for (i, letter) in self.extra_letters.iter().enumerate() {
            let mut values = BTreeMap::new();
            for ap in &self.ap {
                values.insert(ap.clone(), Poss::ZERO);
            }
            for (ap, value) in letter {
                index_of(&self.ap, ap, "atomic proposition", || {
                    format!("extra_letters[{i}]")
                })?;
                values.insert(
                    ap.clone(),
                    degree(value, || format!("extra_letters[{i}][{ap}]"))?,
                );
            }
            extra_letters.push(Letter::new(values));
        }
        Ok(FuzzyAutomaton::new(
            self.states,
            self.ap,
            mode,
            FuzzyVector::new(initial),
            FuzzyVector::new(accepting),
            transitions,
            extra_letters,
        ))
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Gpks, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    model_from_json(&text)
}

pub fn model_from_json(text: &str) -> Result<Gpks, LoadError> {
    let file: ModelFile = serde_json::from_str(text)?;
    file.into_model()
}

pub fn load_automaton(path: impl AsRef<Path>) -> Result<FuzzyAutomaton, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    automaton_from_json(&text)
}

pub fn automaton_from_json(text: &str) -> Result<FuzzyAutomaton, LoadError> {
    let file: AutomatonFile = serde_json::from_str(text)?;
    file.into_automaton()
}

pub fn model_to_json(model: &Gpks) -> String {
    let mut text =
        serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("model serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{fig1, poss};

    fn fixture(name: &str) -> String {
        format!(
            "{}/../../models/{name}",
            env!("CARGO_MANIFEST_DIR")
        )
    }

    #[test]
    fn loads_the_reference_model() {
        let m = load_model(fixture("fig1.json")).unwrap();
        assert_eq!(m, fig1());
        assert!(m.validate().is_empty());
    }

    #[test]
    fn loads_the_example_automata() {
        let a = load_automaton(fixture("psafe.json")).unwrap();
        assert_eq!(a.mode(), AcceptanceMode::Finite);
        assert_eq!(a.state_count(), 2);
        let b = load_automaton(fixture("prun.json")).unwrap();
        assert_eq!(b.mode(), AcceptanceMode::Buchi);
    }

    #[test]
    fn missing_sections_are_format_errors() {
        let text = r#"{"states": ["s"], "ap": [], "initial": {}, "labels": {}}"#;
        assert!(matches!(model_from_json(text), Err(LoadError::Json(_))));
    }

    #[test]
    fn undeclared_names_are_rejected() {
        let text = r#"{
            "states": ["s"], "ap": [],
            "initial": {"t": "1"},
            "transitions": [], "labels": {}
        }"#;
        assert!(matches!(
            model_from_json(text),
            Err(LoadError::UnknownName { .. })
        ));
    }

    #[test]
    fn bad_degrees_are_rejected_in_context() {
        let text = r#"{
            "states": ["s"], "ap": [],
            "initial": {"s": "1.5"},
            "transitions": [], "labels": {}
        }"#;
        match model_from_json(text) {
            Err(LoadError::BadDegree { context, .. }) => assert_eq!(context, "initial[s]"),
            other => panic!("expected BadDegree, got {other:?}"),
        }
    }

    #[test]
    fn guards_must_reference_declared_ap() {
        let text = r#"{
            "states": ["q"], "ap": ["x"], "mode": "finite",
            "initial": {"q": "1"}, "final": {"q": "1"},
            "transitions": [{"from": "q", "guard": "y > 0", "value": "1", "to": "q"}]
        }"#;
        assert!(matches!(
            automaton_from_json(text),
            Err(LoadError::UnknownName { kind: "atomic proposition", .. })
        ));
    }

    #[test]
    fn model_round_trips_through_json() {
        let m = fig1();
        let text = model_to_json(&m);
        let reloaded = model_from_json(&text).unwrap();
        assert_eq!(reloaded, m);
        // Rendered degrees are canonical.
        assert!(text.contains("\"0.8\""));
        assert!(!text.contains("0.800000"));
    }

    #[test]
    fn duplicate_transitions_combine_by_max() {
        let text = r#"{
            "states": ["s"], "ap": [],
            "initial": {"s": "1"},
            "transitions": [
                {"from": "s", "to": "s", "p": "0.3"},
                {"from": "s", "to": "s", "p": "0.6"}
            ],
            "labels": {}
        }"#;
        let m = model_from_json(text).unwrap();
        assert_eq!(m.trans().get(0, 0), poss("0.6"));
    }
}
