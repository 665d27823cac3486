//! Python bindings: `Model` and `Automaton` classes over the core checker.
//!
//! Degrees cross the boundary as canonical decimal strings so Python sees
//! the same micro-exact values the Rust side computes.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gpmc_core::format::{self, LoadError};
use gpmc_core::gpoltl::{self, Measure};
use gpmc_core::oracle::{self, OracleConfig};
use gpmc_core::patterns::{self, Pattern, PatternKind};
use gpmc_core::product::{self, CheckTarget};
use gpmc_core::{FuzzyVector, Gpks, Poss};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load_err(e: LoadError) -> PyErr {
    match e {
        LoadError::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_measure(measure: &str) -> PyResult<Measure> {
    match measure {
        "po" => Ok(Measure::Po),
        "ne" => Ok(Measure::Ne),
        other => Err(value_err(format!(
            "measure must be \"po\" or \"ne\", got `{other}`"
        ))),
    }
}

fn vector_map(model: &Gpks, v: &FuzzyVector) -> BTreeMap<String, String> {
    model
        .states()
        .iter()
        .enumerate()
        .map(|(i, name)| (name.clone(), v.get(i).to_string()))
        .collect()
}

/// A possibilistic Kripke structure with fuzzy labels.
#[pyclass]
struct Model {
    inner: Gpks,
}

/// A fuzzy finite-word or Büchi automaton with guarded transitions.
#[pyclass]
struct Automaton {
    inner: gpmc_core::FuzzyAutomaton,
}

impl Model {
    /// Fuzzy-state argument: a `{state: "degree"}` dict or a propositional
    /// expression string.
    fn fuzzy_state(&self, arg: &Bound<'_, PyAny>) -> PyResult<FuzzyVector> {
        if let Ok(map) = arg.extract::<BTreeMap<String, String>>() {
            let mut entries = vec![Poss::ZERO; self.inner.state_count()];
            for (state, value) in map {
                let idx = self.inner.require_state(&state).map_err(value_err)?;
                entries[idx] = Poss::parse(&value).map_err(value_err)?;
            }
            return Ok(FuzzyVector::new(entries));
        }
        let text: String = arg.extract()?;
        let formula = gpoltl::parse(&text).map_err(value_err)?;
        let expr = gpoltl::as_state_expr(&formula).ok_or_else(|| {
            value_err("fuzzy-state arguments must be propositional (no temporal operators)")
        })?;
        self.inner.eval_state_expr(&expr).map_err(value_err)
    }

    fn vector_report<'py>(
        &self,
        py: Python<'py>,
        vector: &FuzzyVector,
    ) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        out.set_item("values", vector_map(&self.inner, vector))?;
        let aggregated = patterns::aggregate_initial(&self.inner, vector).map_err(value_err)?;
        out.set_item("initial", aggregated.to_string())?;
        Ok(out)
    }
}

#[pymethods]
impl Model {
    /// Load a model from a JSON file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Model> {
        Ok(Model {
            inner: format::load_model(path).map_err(load_err)?,
        })
    }

    /// Parse a model from a JSON string.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Model> {
        Ok(Model {
            inner: format::model_from_json(text).map_err(load_err)?,
        })
    }

    fn states(&self) -> Vec<String> {
        self.inner.states().to_vec()
    }

    fn ap(&self) -> Vec<String> {
        self.inner.ap().to_vec()
    }

    /// Well-formedness findings; empty means the model is valid.
    fn validate(&self) -> Vec<String> {
        self.inner
            .validate()
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    fn is_normal(&self) -> bool {
        self.inner.is_normal()
    }

    fn crisp_labels(&self) -> bool {
        self.inner.has_crisp_labels()
    }

    /// Per-state supremum of path possibilities.
    fn rp(&self) -> BTreeMap<String, String> {
        vector_map(&self.inner, &self.inner.path_sup())
    }

    fn total_possibility(&self) -> String {
        self.inner.total_possibility().to_string()
    }

    /// Same model restarted from a single initial state.
    fn rebase(&self, state: &str) -> PyResult<Model> {
        Ok(Model {
            inner: self.inner.rebase_initial(state).map_err(value_err)?,
        })
    }

    /// Closed-form check of a formula; returns the per-state vector and the
    /// value aggregated over the initial distribution.
    #[pyo3(signature = (formula, measure="po"))]
    fn check<'py>(
        &self,
        py: Python<'py>,
        formula: &str,
        measure: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let phi = gpoltl::parse(formula).map_err(value_err)?;
        let vector =
            gpoltl::check_vector(&self.inner, &phi, parse_measure(measure)?).map_err(value_err)?;
        self.vector_report(py, &vector)
    }

    /// Closed-form check of a named pattern with explicit fuzzy-state
    /// arguments (dicts or propositional expressions).
    #[pyo3(signature = (kind, set=None, left=None, right=None, bound=None, next=0, measure="po"))]
    #[allow(clippy::too_many_arguments)]
    fn check_pattern<'py>(
        &self,
        py: Python<'py>,
        kind: &str,
        set: Option<&Bound<'py, PyAny>>,
        left: Option<&Bound<'py, PyAny>>,
        right: Option<&Bound<'py, PyAny>>,
        bound: Option<u32>,
        next: u32,
        measure: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let single = |arg: Option<&Bound<'py, PyAny>>| {
            arg.ok_or_else(|| value_err("pattern requires `set`"))
                .and_then(|a| self.fuzzy_state(a))
        };
        let pair = || -> PyResult<(FuzzyVector, FuzzyVector)> {
            let l = left.ok_or_else(|| value_err("pattern requires `left`"))?;
            let r = right.ok_or_else(|| value_err("pattern requires `right`"))?;
            Ok((self.fuzzy_state(l)?, self.fuzzy_state(r)?))
        };
        let need_bound = || bound.ok_or_else(|| value_err("pattern requires `bound`"));
        let kind = match kind {
            "now" => PatternKind::Now(single(set)?),
            "eventually" => PatternKind::Eventually(single(set)?),
            "bounded-eventually" => PatternKind::BoundedEventually(single(set)?, need_bound()?),
            "always" => PatternKind::Always(single(set)?),
            "until" => {
                let (l, r) = pair()?;
                PatternKind::Until(l, r)
            }
            "bounded-until" => {
                let (l, r) = pair()?;
                PatternKind::BoundedUntil(l, r, need_bound()?)
            }
            "repeated" => PatternKind::RepeatedlyEventually(single(set)?),
            "persistence" => PatternKind::EventuallyForever(single(set)?),
            other => return Err(value_err(format!("unknown pattern `{other}`"))),
        };
        let pattern = Pattern { shifts: next, kind };
        let vector = match parse_measure(measure)? {
            Measure::Po => patterns::possibility(&self.inner, &pattern),
            Measure::Ne => patterns::necessity(&self.inner, &pattern),
        }
        .map_err(value_err)?;
        self.vector_report(py, &vector)
    }

    /// Regular safety check at one state against a deterministic finite-word
    /// automaton; returns both measures.
    fn safety<'py>(
        &self,
        py: Python<'py>,
        automaton: &Automaton,
        state: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let po =
            product::safety_possibility(&self.inner, &automaton.inner, state).map_err(value_err)?;
        let ne =
            product::safety_necessity(&self.inner, &automaton.inner, state).map_err(value_err)?;
        let out = PyDict::new(py);
        out.set_item("po", po.to_string())?;
        out.set_item("ne", ne.to_string())?;
        Ok(out)
    }

    /// ω-regular check against a fuzzy Büchi automaton, at one state or over
    /// the initial distribution; returns both measures.
    #[pyo3(signature = (automaton, state=None))]
    fn omega<'py>(
        &self,
        py: Python<'py>,
        automaton: &Automaton,
        state: Option<&str>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let target = match state {
            Some(name) => CheckTarget::State(name.to_string()),
            None => CheckTarget::Initial,
        };
        let po =
            product::omega_possibility(&self.inner, &automaton.inner, &target).map_err(value_err)?;
        let ne =
            product::omega_necessity(&self.inner, &automaton.inner, &target).map_err(value_err)?;
        let out = PyDict::new(py);
        out.set_item("po", po.to_string())?;
        out.set_item("ne", ne.to_string())?;
        Ok(out)
    }

    /// Brute-force evaluation of any formula by lasso enumeration.
    #[pyo3(signature = (formula, state=None, prefix_bound=None, cycle_bound=None, measure="po", double_check=false))]
    #[allow(clippy::too_many_arguments)]
    fn oracle<'py>(
        &self,
        py: Python<'py>,
        formula: &str,
        state: Option<&str>,
        prefix_bound: Option<usize>,
        cycle_bound: Option<usize>,
        measure: &str,
        double_check: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let phi = gpoltl::parse(formula).map_err(value_err)?;
        let mut cfg = match state {
            Some(name) => OracleConfig::for_state(
                &self.inner,
                self.inner.require_state(name).map_err(value_err)?,
            ),
            None => OracleConfig::for_initial(&self.inner),
        };
        if let Some(k) = prefix_bound {
            cfg.max_prefix = k;
        }
        if let Some(m) = cycle_bound {
            cfg.max_cycle = m;
        }
        let measure = parse_measure(measure)?;
        let evaluate = |cfg: &OracleConfig| -> PyResult<Poss> {
            let result = match measure {
                Measure::Po => oracle::oracle_po(&self.inner, cfg, |l| {
                    gpoltl::path_eval(&self.inner, &phi, l)
                }),
                Measure::Ne => oracle::oracle_ne(&self.inner, cfg, |l| {
                    gpoltl::path_eval(&self.inner, &phi, l)
                }),
            };
            result.map_err(value_err)
        };
        let value = evaluate(&cfg)?;
        let out = PyDict::new(py);
        out.set_item("value", value.to_string())?;
        out.set_item("prefix_bound", cfg.max_prefix)?;
        out.set_item("cycle_bound", cfg.max_cycle)?;
        if double_check {
            let doubled = evaluate(&cfg.doubled())?;
            out.set_item("double_check_value", doubled.to_string())?;
            out.set_item("agrees", doubled == value)?;
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(states={}, ap={}, normal={})",
            self.inner.state_count(),
            self.inner.ap().len(),
            self.inner.is_normal()
        )
    }
}

#[pymethods]
impl Automaton {
    /// Load an automaton from a JSON file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Automaton> {
        Ok(Automaton {
            inner: format::load_automaton(path).map_err(load_err)?,
        })
    }

    /// Parse an automaton from a JSON string.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Automaton> {
        Ok(Automaton {
            inner: format::automaton_from_json(text).map_err(load_err)?,
        })
    }

    fn states(&self) -> Vec<String> {
        self.inner.states().to_vec()
    }

    fn mode(&self) -> String {
        self.inner.mode().to_string()
    }

    /// Deterministic over the letters of the given model (plus any extra
    /// letters the automaton declares)?
    fn is_deterministic_for(&self, model: &Model) -> bool {
        let alphabet = product::determinism_alphabet(&model.inner, &self.inner);
        self.inner.is_deterministic(&alphabet)
    }

    fn __repr__(&self) -> String {
        format!(
            "Automaton(states={}, mode={})",
            self.inner.state_count(),
            self.inner.mode()
        )
    }
}

#[pymodule]
fn gpmc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Model>()?;
    m.add_class::<Automaton>()?;
    Ok(())
}
