//! Possibilistic Kripke structures with fuzzy labels.
//!
//! A model is a finite state set with a `[0,1]`-valued transition matrix, a
//! fuzzy initial distribution and a fuzzy labeling of states by atomic
//! propositions. Infinite paths are represented finitely as lassos; traces
//! are ultimately periodic words of fuzzy letters.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{FuzzyMatrix, FuzzyVector};
use crate::poss::Poss;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("inconsistent model shape: {0}")]
    Shape(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown atomic proposition `{0}`")]
    UnknownAtom(String),
    #[error("lasso uses an impossible transition {from} -> {to}")]
    InvalidLasso { from: String, to: String },
    #[error("path fragment is empty")]
    EmptyFragment,
}

/// A well-formedness finding reported by [`Gpks::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyStateName { index: usize },
    DuplicateState { name: String },
    DuplicateAp { name: String },
    /// State with no positive outgoing transition; trace semantics need
    /// every state to have one.
    TerminalState { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyStateName { index } => {
                write!(f, "state #{index} has an empty name")
            }
            Violation::DuplicateState { name } => {
                write!(f, "duplicate state name `{name}`")
            }
            Violation::DuplicateAp { name } => {
                write!(f, "duplicate atomic proposition `{name}`")
            }
            Violation::TerminalState { name } => {
                write!(f, "state `{name}` has no outgoing transition with positive possibility")
            }
        }
    }
}

/// A fuzzy letter: the degree of each atomic proposition at one position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Letter {
    values: BTreeMap<String, Poss>,
}

impl Letter {
    pub fn new(values: BTreeMap<String, Poss>) -> Letter {
        Letter { values }
    }

    /// Degree of `ap`; propositions not mentioned have degree zero.
    pub fn get(&self, ap: &str) -> Poss {
        self.values.get(ap).copied().unwrap_or(Poss::ZERO)
    }

    pub fn contains(&self, ap: &str) -> bool {
        self.values.contains_key(ap)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Poss)> {
        self.values.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Finite presentation of an infinite path: a prefix followed by a cycle
/// repeated forever. States are indices into the owning model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoPath {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl LassoPath {
    pub fn new(prefix: Vec<usize>, cycle: Vec<usize>) -> LassoPath {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        LassoPath { prefix, cycle }
    }

    pub fn first(&self) -> usize {
        *self.prefix.first().unwrap_or(&self.cycle[0])
    }

    /// All positions of one unrolling: prefix then one cycle traversal.
    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.prefix.iter().chain(self.cycle.iter()).copied()
    }

    /// Consecutive transition pairs, including the cycle-closing edge.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let spine: Vec<usize> = self.positions().collect();
        let mut out: Vec<(usize, usize)> = spine.windows(2).map(|w| (w[0], w[1])).collect();
        out.push((*self.cycle.last().unwrap(), self.cycle[0]));
        out
    }
}

/// Finite presentation of an infinite word of fuzzy letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltimatelyPeriodicWord {
    prefix: Vec<Letter>,
    period: Vec<Letter>,
}

impl UltimatelyPeriodicWord {
    pub fn new(prefix: Vec<Letter>, period: Vec<Letter>) -> UltimatelyPeriodicWord {
        assert!(!period.is_empty(), "period must be nonempty");
        UltimatelyPeriodicWord { prefix, period }
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    /// Letter at an arbitrary position of the infinite word.
    pub fn letter(&self, pos: usize) -> &Letter {
        if pos < self.prefix.len() {
            &self.prefix[pos]
        } else {
            &self.period[(pos - self.prefix.len()) % self.period.len()]
        }
    }
}

/// Propositional expression over atomic propositions, evaluated pointwise
/// per state with min / max / complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateExpr {
    True,
    False,
    Atom(String),
    Not(Box<StateExpr>),
    And(Box<StateExpr>, Box<StateExpr>),
    Or(Box<StateExpr>, Box<StateExpr>),
    Implies(Box<StateExpr>, Box<StateExpr>),
}

/// A generalized possibilistic Kripke structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gpks {
    states: Vec<String>,
    ap: Vec<String>,
    trans: FuzzyMatrix,
    initial: FuzzyVector,
    labels: FuzzyMatrix,
}

impl Gpks {
    pub fn new(
        states: Vec<String>,
        ap: Vec<String>,
        trans: FuzzyMatrix,
        initial: FuzzyVector,
        labels: FuzzyMatrix,
    ) -> Result<Gpks, ModelError> {
        let n = states.len();
        if n == 0 {
            return Err(ModelError::Shape("model has no states".into()));
        }
        if trans.rows() != n || trans.cols() != n {
            return Err(ModelError::Shape(format!(
                "transition matrix is {}x{}, expected {n}x{n}",
                trans.rows(),
                trans.cols()
            )));
        }
        if initial.len() != n {
            return Err(ModelError::Shape(format!(
                "initial distribution has {} entries, expected {n}",
                initial.len()
            )));
        }
        if labels.rows() != n || labels.cols() != ap.len() {
            return Err(ModelError::Shape(format!(
                "label matrix is {}x{}, expected {n}x{}",
                labels.rows(),
                labels.cols(),
                ap.len()
            )));
        }
        Ok(Gpks {
            states,
            ap,
            trans,
            initial,
            labels,
        })
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn ap(&self) -> &[String] {
        &self.ap
    }

    pub fn trans(&self) -> &FuzzyMatrix {
        &self.trans
    }

    pub fn initial(&self) -> &FuzzyVector {
        &self.initial
    }

    pub fn labels(&self) -> &FuzzyMatrix {
        &self.labels
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn require_state(&self, name: &str) -> Result<usize, ModelError> {
        self.state_index(name)
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.ap.iter().position(|a| a == name)
    }

    /// Collects all well-formedness findings. An empty result means the
    /// model satisfies name uniqueness and has no terminal states.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, name) in self.states.iter().enumerate() {
            if name.is_empty() {
                out.push(Violation::EmptyStateName { index: i });
            }
            if self.states[..i].contains(name) {
                out.push(Violation::DuplicateState { name: name.clone() });
            }
        }
        for (i, name) in self.ap.iter().enumerate() {
            if self.ap[..i].contains(name) {
                out.push(Violation::DuplicateAp { name: name.clone() });
            }
        }
        for s in 0..self.state_count() {
            if self.trans.row(s).iter().all(|p| p.is_zero()) {
                out.push(Violation::TerminalState {
                    name: self.states[s].clone(),
                });
            }
        }
        out
    }

    /// Whether every label degree is 0 or 1. Informational; fuzzy labels are
    /// perfectly valid, this only tells classical labelings apart.
    pub fn has_crisp_labels(&self) -> bool {
        self.labels
            .entries()
            .all(|p| p.is_zero() || p.is_one())
    }

    /// Per-state supremum of path possibilities: the greatest min-weight of
    /// any infinite path starting at each state.
    pub fn path_sup(&self) -> FuzzyVector {
        self.trans.path_sup().expect("transition matrix is square")
    }

    /// Whether every transition row and the initial distribution attain 1.
    pub fn is_normal(&self) -> bool {
        let rows_normal = (0..self.state_count())
            .all(|s| self.trans.row(s).iter().copied().max() == Some(Poss::ONE));
        rows_normal && self.initial.max_entry().is_one()
    }

    /// Possibility of the infinite path described by a lasso: the min of the
    /// initial degree and every transition possibility along it.
    pub fn path_possibility(&self, lasso: &LassoPath) -> Result<Poss, ModelError> {
        let mut acc = self.initial.get(lasso.first());
        for (from, to) in lasso.edges() {
            let p = self.trans.get(from, to);
            if p.is_zero() {
                return Err(ModelError::InvalidLasso {
                    from: self.states[from].clone(),
                    to: self.states[to].clone(),
                });
            }
            acc = acc.min(p);
        }
        Ok(acc)
    }

    /// Possibility of the cylinder of all paths extending a finite fragment:
    /// `I(s0) ∧ transitions ∧ path_sup(last)`.
    pub fn cylinder_possibility(&self, fragment: &[usize]) -> Result<Poss, ModelError> {
        let (&first, rest) = fragment.split_first().ok_or(ModelError::EmptyFragment)?;
        let mut acc = self.initial.get(first);
        let mut prev = first;
        for &s in rest {
            acc = acc.min(self.trans.get(prev, s));
            prev = s;
        }
        Ok(acc.min(self.path_sup().get(prev)))
    }

    /// Possibility of the set of all paths of the model.
    pub fn total_possibility(&self) -> Poss {
        let sup = self.path_sup();
        (0..self.state_count())
            .map(|s| self.initial.get(s).min(sup.get(s)))
            .max()
            .unwrap_or(Poss::ZERO)
    }

    /// Same model with the initial distribution replaced by the point
    /// distribution at `state`.
    pub fn rebase_initial(&self, state: &str) -> Result<Gpks, ModelError> {
        let idx = self.require_state(state)?;
        Ok(self.rebase_initial_at(idx))
    }

    pub fn rebase_initial_at(&self, idx: usize) -> Gpks {
        let mut rebased = self.clone();
        rebased.initial = FuzzyVector::from_fn(self.state_count(), |s| {
            if s == idx {
                Poss::ONE
            } else {
                Poss::ZERO
            }
        });
        rebased
    }

    /// The fuzzy letter of one state: each declared proposition mapped to
    /// its label degree.
    pub fn letter_of(&self, state: usize) -> Letter {
        let mut values = BTreeMap::new();
        for (i, ap) in self.ap.iter().enumerate() {
            values.insert(ap.clone(), self.labels.get(state, i));
        }
        Letter::new(values)
    }

    pub fn letter_of_named(&self, state: &str) -> Result<Letter, ModelError> {
        Ok(self.letter_of(self.require_state(state)?))
    }

    /// Letters of all states, in declaration order.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.state_count()).map(|s| self.letter_of(s)).collect()
    }

    /// Trace of a lasso path as an ultimately periodic word.
    pub fn trace(&self, lasso: &LassoPath) -> UltimatelyPeriodicWord {
        UltimatelyPeriodicWord::new(
            lasso.prefix.iter().map(|&s| self.letter_of(s)).collect(),
            lasso.cycle.iter().map(|&s| self.letter_of(s)).collect(),
        )
    }

    /// Evaluates a propositional expression pointwise over states.
    pub fn eval_state_expr(&self, expr: &StateExpr) -> Result<FuzzyVector, ModelError> {
        match expr {
            StateExpr::True => Ok(FuzzyVector::ones(self.state_count())),
            StateExpr::False => Ok(FuzzyVector::zeros(self.state_count())),
            StateExpr::Atom(name) => {
                let i = self
                    .ap_index(name)
                    .ok_or_else(|| ModelError::UnknownAtom(name.clone()))?;
                Ok(FuzzyVector::from_fn(self.state_count(), |s| {
                    self.labels.get(s, i)
                }))
            }
            StateExpr::Not(e) => Ok(self.eval_state_expr(e)?.complement()),
            StateExpr::And(l, r) => Ok(self
                .eval_state_expr(l)?
                .meet(&self.eval_state_expr(r)?)
                .expect("same dimension")),
            StateExpr::Or(l, r) => Ok(self
                .eval_state_expr(l)?
                .join(&self.eval_state_expr(r)?)
                .expect("same dimension")),
            StateExpr::Implies(l, r) => Ok(self
                .eval_state_expr(l)?
                .complement()
                .join(&self.eval_state_expr(r)?)
                .expect("same dimension")),
        }
    }
}
