//! Deterministic JSON reports for the command-line front end.
//!
//! Key order is insertion order and state entries follow declaration order,
//! so identical inputs render byte-identical reports. All degrees print in
//! the canonical decimal form and re-parse to the same micros.

use serde_json::{Map, Value};

use crate::algebra::{FuzzyMatrix, FuzzyVector};
use crate::gpks::Gpks;

pub fn vector_value(model: &Gpks, v: &FuzzyVector) -> Value {
    let mut map = Map::new();
    for (i, name) in model.states().iter().enumerate() {
        map.insert(name.clone(), Value::String(v.get(i).to_string()));
    }
    Value::Object(map)
}

/// Matrix as nested maps, zero entries omitted.
pub fn matrix_value(model: &Gpks, m: &FuzzyMatrix) -> Value {
    let mut rows = Map::new();
    for (i, from) in model.states().iter().enumerate() {
        let mut row = Map::new();
        for (j, to) in model.states().iter().enumerate() {
            let p = m.get(i, j);
            if !p.is_zero() {
                row.insert(to.clone(), Value::String(p.to_string()));
            }
        }
        rows.insert(from.clone(), Value::Object(row));
    }
    Value::Object(rows)
}

pub struct ReportBuilder {
    map: Map<String, Value>,
}

impl ReportBuilder {
    pub fn new(command: &str) -> ReportBuilder {
        let mut map = Map::new();
        map.insert("command".into(), Value::String(command.to_string()));
        ReportBuilder { map }
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> ReportBuilder {
        self.map.insert(key.to_string(), value.into());
        self
    }

    pub fn finish(self) -> String {
        let mut text = serde_json::to_string_pretty(&Value::Object(self.map))
            .expect("report serializes");
        text.push('\n');
        text
    }
}
