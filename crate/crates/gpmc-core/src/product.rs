//! Product of a model with a fuzzy automaton, and the reductions of regular
//! safety and ω-regular properties to pattern checks on that product.
//!
//! Product states are pairs `(s, q)`; the pair transition possibility is
//! `min(P(s,s'), delta(q, L(s'), q'))`, so the automaton component is always
//! one letter ahead of the model component. A safety check becomes `always`
//! over the accepting vector at the pair `(s, q_s)`; an ω-regular check
//! becomes `repeatedly-eventually` aggregated over the product's initial
//! distribution. Necessity values are the complements of the complemented
//! dual patterns.

use thiserror::Error;

use crate::algebra::{FuzzyMatrix, FuzzyVector};
use crate::automata::{AcceptanceMode, AutomatonError, FuzzyAutomaton};
use crate::gpks::{Gpks, Letter, ModelError};
use crate::patterns;
use crate::poss::Poss;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("automaton proposition `{0}` is not declared by the model")]
    ApMismatch(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A model/automaton product with pair-indexed states.
#[derive(Debug, Clone)]
pub struct ProductGpks {
    gpks: Gpks,
    model_states: usize,
    automaton_states: usize,
}

impl ProductGpks {
    pub fn gpks(&self) -> &Gpks {
        &self.gpks
    }

    pub fn pair_index(&self, s: usize, q: usize) -> usize {
        debug_assert!(s < self.model_states && q < self.automaton_states);
        s * self.automaton_states + q
    }

    /// The vector assigning each pair `(s, q)` the automaton's accepting
    /// degree of `q`.
    pub fn accepting_vector(&self, automaton: &FuzzyAutomaton) -> FuzzyVector {
        FuzzyVector::from_fn(self.gpks.state_count(), |i| {
            automaton.accepting().get(i % self.automaton_states)
        })
    }
}

/// Model letters plus any extra letters declared by the automaton; this is
/// the alphabet determinism is validated against.
pub fn determinism_alphabet(model: &Gpks, automaton: &FuzzyAutomaton) -> Vec<Letter> {
    let set: std::collections::BTreeSet<Letter> = model
        .letters()
        .into_iter()
        .chain(automaton.extra_letters().iter().cloned())
        .collect();
    set.into_iter().collect()
}

/// Builds the product. All pairs are kept, including pairs with no positive
/// in- or out-possibility, so indices stay predictable; the result may have
/// terminal states, which the pattern formulas handle (their continuation
/// possibility is zero).
pub fn product(model: &Gpks, automaton: &FuzzyAutomaton) -> Result<ProductGpks, ProductError> {
    for ap in automaton.ap() {
        if model.ap_index(ap).is_none() {
            return Err(ProductError::ApMismatch(ap.clone()));
        }
    }
    let n = model.state_count();
    let k = automaton.state_count();
    let letters = model.letters();

    let names: Vec<String> = (0..n)
        .flat_map(|s| {
            (0..k).map(move |q| format!("{}|{}", model.states()[s], automaton.states()[q]))
        })
        .collect();

    // delta(q, L(s), q') for every (q, s, q'), reused for both I' and P'.
    let mut delta_rows = Vec::with_capacity(n * k);
    for letter in &letters {
        for q in 0..k {
            delta_rows.push(automaton.delta_row(q, letter));
        }
    }
    let delta = |q: usize, s: usize, q2: usize| delta_rows[s * k + q].get(q2);

    let mut trans = FuzzyMatrix::zeros(n * k, n * k);
    for s in 0..n {
        for s2 in 0..n {
            let p = model.trans().get(s, s2);
            if p.is_zero() {
                continue;
            }
            for q in 0..k {
                for q2 in 0..k {
                    let v = p.min(delta(q, s2, q2));
                    if !v.is_zero() {
                        trans.set(s * k + q, s2 * k + q2, v);
                    }
                }
            }
        }
    }

    let initial = FuzzyVector::from_fn(n * k, |idx| {
        let (s, q) = (idx / k, idx % k);
        let i = model.initial().get(s);
        if i.is_zero() {
            return Poss::ZERO;
        }
        let entry = (0..k)
            .map(|q0| automaton.initial().get(q0).min(delta(q0, s, q)))
            .max()
            .unwrap_or(Poss::ZERO);
        i.min(entry)
    });

    // Pair states are labeled crisply by themselves.
    let labels = FuzzyMatrix::identity(n * k);

    let gpks = Gpks::new(names.clone(), names, trans, initial, labels)?;
    Ok(ProductGpks {
        gpks,
        model_states: n,
        automaton_states: k,
    })
}

/// The automaton state after reading `L(s)` from the deterministic start.
fn entry_state(
    model: &Gpks,
    automaton: &FuzzyAutomaton,
    s: usize,
) -> Result<usize, ProductError> {
    let alphabet = determinism_alphabet(model, automaton);
    if !automaton.is_deterministic(&alphabet) {
        return Err(AutomatonError::NotDeterministic(
            "the automaton must be deterministic over the model's letters".into(),
        )
        .into());
    }
    let start = automaton.deterministic_start()?;
    Ok(automaton.det_successor(start, &model.letter_of(s))?)
}

fn require_mode(automaton: &FuzzyAutomaton, mode: AcceptanceMode) -> Result<(), ProductError> {
    if automaton.mode() != mode {
        let expected = match mode {
            AcceptanceMode::Finite => "finite",
            AcceptanceMode::Buchi => "buchi",
        };
        return Err(AutomatonError::WrongMode { expected }.into());
    }
    Ok(())
}

/// Possibility that the regular safety property accepted (via its good
/// prefixes) by a deterministic finite-word automaton holds at `state`:
/// `always(accepting)` on the product, read at `(state, q_state)`.
pub fn safety_possibility(
    model: &Gpks,
    automaton: &FuzzyAutomaton,
    state: &str,
) -> Result<Poss, ProductError> {
    require_mode(automaton, AcceptanceMode::Finite)?;
    let s = model.require_state(state)?;
    let q_s = entry_state(model, automaton, s)?;
    let prod = product(model, automaton)?;
    let b = prod.accepting_vector(automaton);
    let v = patterns::always(prod.gpks(), &b).expect("product dimensions are consistent");
    Ok(v.get(prod.pair_index(s, q_s)))
}

/// Necessity of the same property: the complement of eventually reaching the
/// complemented accepting vector.
pub fn safety_necessity(
    model: &Gpks,
    automaton: &FuzzyAutomaton,
    state: &str,
) -> Result<Poss, ProductError> {
    require_mode(automaton, AcceptanceMode::Finite)?;
    let s = model.require_state(state)?;
    let q_s = entry_state(model, automaton, s)?;
    let prod = product(model, automaton)?;
    let not_b = prod.accepting_vector(automaton).complement();
    let v = patterns::eventually(prod.gpks(), &not_b).expect("product dimensions are consistent");
    Ok(v.get(prod.pair_index(s, q_s)).complement())
}

/// Where an ω-regular check is anchored: one state, or the whole initial
/// distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckTarget {
    State(String),
    Initial,
}

fn omega_vector(
    model: &Gpks,
    automaton: &FuzzyAutomaton,
    target: &CheckTarget,
    persistence_of_complement: bool,
) -> Result<Poss, ProductError> {
    require_mode(automaton, AcceptanceMode::Buchi)?;
    let based = match target {
        CheckTarget::State(name) => model.rebase_initial(name)?,
        CheckTarget::Initial => model.clone(),
    };
    let prod = product(&based, automaton)?;
    let b = prod.accepting_vector(automaton);
    let vector = if persistence_of_complement {
        patterns::persistence(prod.gpks(), &b.complement())
    } else {
        patterns::repeated_reachability(prod.gpks(), &b)
    }
    .expect("product dimensions are consistent");
    let aggregated = patterns::aggregate_initial(prod.gpks(), &vector)
        .expect("product dimensions are consistent");

    if !persistence_of_complement {
        if let CheckTarget::State(name) = target {
            // Deterministic corollary: the aggregated value must agree with
            // the vector entry at (s, q_s) whenever both forms apply.
            let alphabet = determinism_alphabet(model, automaton);
            if automaton.is_deterministic(&alphabet) {
                let s = based.require_state(name)?;
                let start = automaton.deterministic_start()?;
                let q_s = automaton.det_successor(start, &based.letter_of(s))?;
                assert_eq!(
                    aggregated,
                    vector.get(prod.pair_index(s, q_s)),
                    "aggregated and entry forms of the deterministic check disagree"
                );
            }
        }
    }
    Ok(aggregated)
}

/// Possibility that the ω-regular property accepted by a (possibly
/// nondeterministic) Büchi automaton holds at the target:
/// `repeatedly-eventually(accepting)` aggregated over the product's initial
/// distribution.
pub fn omega_possibility(
    model: &Gpks,
    automaton: &FuzzyAutomaton,
    target: &CheckTarget,
) -> Result<Poss, ProductError> {
    omega_vector(model, automaton, target, false)
}

/// Necessity of the same property: the complement of
/// `eventually-forever(complement of accepting)` on the product.
pub fn omega_necessity(
    model: &Gpks,
    automaton: &FuzzyAutomaton,
    target: &CheckTarget,
) -> Result<Poss, ProductError> {
    Ok(omega_vector(model, automaton, target, true)?.complement())
}

/// Outcome of one safety or ω-regular check: both measures plus the
/// accepting vector of the product the check reduced to (nonzero entries,
/// keyed by pair-state name).
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub property: String,
    pub target: CheckTarget,
    pub possibility: Poss,
    pub necessity: Poss,
    pub accepting: Vec<(String, Poss)>,
}

fn accepting_entries(model: &Gpks, automaton: &FuzzyAutomaton) -> Result<Vec<(String, Poss)>, ProductError> {
    let prod = product(model, automaton)?;
    let b = prod.accepting_vector(automaton);
    Ok(prod
        .gpks()
        .states()
        .iter()
        .zip(b.iter())
        .filter(|(_, degree)| !degree.is_zero())
        .map(|(name, degree)| (name.clone(), degree))
        .collect())
}

pub fn safety_report(
    model: &Gpks,
    automaton: &FuzzyAutomaton,
    state: &str,
    property: &str,
) -> Result<CheckReport, ProductError> {
    Ok(CheckReport {
        property: property.to_string(),
        target: CheckTarget::State(state.to_string()),
        possibility: safety_possibility(model, automaton, state)?,
        necessity: safety_necessity(model, automaton, state)?,
        accepting: accepting_entries(model, automaton)?,
    })
}

pub fn omega_report(
    model: &Gpks,
    automaton: &FuzzyAutomaton,
    target: &CheckTarget,
    property: &str,
) -> Result<CheckReport, ProductError> {
    let based = match target {
        CheckTarget::State(name) => model.rebase_initial(name)?,
        CheckTarget::Initial => model.clone(),
    };
    Ok(CheckReport {
        property: property.to_string(),
        target: target.clone(),
        possibility: omega_possibility(model, automaton, target)?,
        necessity: omega_necessity(model, automaton, target)?,
        accepting: accepting_entries(&based, automaton)?,
    })
}
