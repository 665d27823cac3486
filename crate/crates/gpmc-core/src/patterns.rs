//! Closed-form possibility and necessity of linear-time patterns over fuzzy
//! states.
//!
//! Each pattern over a fuzzy state `B` (a vector over model states) has a
//! per-state possibility vector expressible with max-min matrix operations:
//!
//! - eventually: `P* ∘ D_B ∘ path_sup`
//! - always: greatest fixed point of `Z ↦ B ∧ P ∘ D_Z ∘ path_sup`
//! - bounded/unbounded constrained until: joins of `(D_C ∘ P)^i ∘ D_B ∘ path_sup`
//! - repeatedly-eventually: `P⁺ ∘ diag(P⁺(t,t)) ∘ B`
//! - eventually-forever: `P* ∘ path_sup(D_B ∘ P)`
//!
//! Necessity values are derived from the possibility of the complemented
//! dual pattern; constrained until has no such dual and is refused.

use thiserror::Error;

use crate::algebra::{AlgebraError, FuzzyMatrix, FuzzyVector};
use crate::gpks::Gpks;
use crate::poss::Poss;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("necessity of an until-style pattern has no closed dual; use the path oracle")]
    NoClosedDual,
}

/// A pattern shape over arguments of type `A` (state expressions before
/// resolution, fuzzy vectors after).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternKind<A> {
    /// The fuzzy state itself, at the first position.
    Now(A),
    Eventually(A),
    BoundedEventually(A, u32),
    Always(A),
    Until(A, A),
    BoundedUntil(A, A, u32),
    /// Visited with high degree infinitely often.
    RepeatedlyEventually(A),
    /// From some point on forever.
    EventuallyForever(A),
}

impl<A> PatternKind<A> {
    pub fn map<B, E>(
        self,
        mut f: impl FnMut(A) -> Result<B, E>,
    ) -> Result<PatternKind<B>, E> {
        Ok(match self {
            PatternKind::Now(a) => PatternKind::Now(f(a)?),
            PatternKind::Eventually(a) => PatternKind::Eventually(f(a)?),
            PatternKind::BoundedEventually(a, n) => PatternKind::BoundedEventually(f(a)?, n),
            PatternKind::Always(a) => PatternKind::Always(f(a)?),
            PatternKind::Until(c, b) => PatternKind::Until(f(c)?, f(b)?),
            PatternKind::BoundedUntil(c, b, n) => PatternKind::BoundedUntil(f(c)?, f(b)?, n),
            PatternKind::RepeatedlyEventually(a) => PatternKind::RepeatedlyEventually(f(a)?),
            PatternKind::EventuallyForever(a) => PatternKind::EventuallyForever(f(a)?),
        })
    }
}

/// A pattern with resolved fuzzy-state arguments, shifted `shifts` steps into
/// the future (each shift is one left-composition with the transition matrix).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub shifts: u32,
    pub kind: PatternKind<FuzzyVector>,
}

impl Pattern {
    pub fn new(kind: PatternKind<FuzzyVector>) -> Pattern {
        Pattern { shifts: 0, kind }
    }

    /// The pattern whose path value is the complement of this one, when one
    /// exists among the supported shapes.
    pub fn dual(&self) -> Option<Pattern> {
        let kind = match &self.kind {
            PatternKind::Now(b) => PatternKind::Now(b.complement()),
            PatternKind::Eventually(b) => PatternKind::Always(b.complement()),
            PatternKind::Always(b) => PatternKind::Eventually(b.complement()),
            PatternKind::RepeatedlyEventually(b) => {
                PatternKind::EventuallyForever(b.complement())
            }
            PatternKind::EventuallyForever(b) => {
                PatternKind::RepeatedlyEventually(b.complement())
            }
            PatternKind::BoundedEventually(..)
            | PatternKind::Until(..)
            | PatternKind::BoundedUntil(..) => return None,
        };
        Some(Pattern {
            shifts: self.shifts,
            kind,
        })
    }
}

/// `P* ∘ D_B ∘ path_sup`: reaching the fuzzy state `B`.
pub fn eventually(model: &Gpks, b: &FuzzyVector) -> Result<FuzzyVector, AlgebraError> {
    let star = model.trans().reflexive_transitive_closure()?;
    star.apply(&b.meet(&model.path_sup())?)
}

/// Greatest fixed point of `Z ↦ B ∧ P ∘ D_Z ∘ path_sup`: staying in `B`
/// forever. Iteration descends from the all-ones vector and must stabilize
/// within `|distinct values| × |S|` steps.
pub fn always(model: &Gpks, b: &FuzzyVector) -> Result<FuzzyVector, AlgebraError> {
    let n = model.state_count();
    if b.len() != n {
        return Err(AlgebraError::DimensionMismatch {
            left: n.to_string(),
            right: b.len().to_string(),
        });
    }
    let sup = model.path_sup();
    let mut distinct: std::collections::BTreeSet<Poss> = b.iter().collect();
    distinct.extend(model.trans().entries());
    distinct.extend(sup.iter());
    let cap = distinct.len() * n + 2;

    let mut z = FuzzyVector::ones(n);
    for _ in 0..cap {
        let next = b.meet(&model.trans().apply(&z.meet(&sup)?)?)?;
        if next == z {
            return Ok(z);
        }
        z = next;
    }
    unreachable!("greatest fixed point iteration failed to stabilize within its bound");
}

/// `∨_{i=0..n} (D_C ∘ P)^i ∘ D_B ∘ path_sup`: reaching `B` through `C` in at
/// most `n` steps.
pub fn bounded_until(
    model: &Gpks,
    c: &FuzzyVector,
    b: &FuzzyVector,
    n: u32,
) -> Result<FuzzyVector, AlgebraError> {
    let gated = FuzzyMatrix::diagonal(c).compose(model.trans())?;
    let base = b.meet(&model.path_sup())?;
    let mut acc = base.clone();
    let mut term = base;
    for _ in 0..n {
        term = gated.apply(&term)?;
        let next = acc.join(&term)?;
        if next == acc {
            break;
        }
        acc = next;
    }
    Ok(acc)
}

/// `(D_C ∘ P)* ∘ D_B ∘ path_sup`: reaching `B` through `C`, unbounded.
pub fn until(model: &Gpks, c: &FuzzyVector, b: &FuzzyVector) -> Result<FuzzyVector, AlgebraError> {
    let gated = FuzzyMatrix::diagonal(c).compose(model.trans())?;
    let star = gated.reflexive_transitive_closure()?;
    star.apply(&b.meet(&model.path_sup())?)
}

/// `P⁺ ∘ diag(P⁺(t,t)) ∘ B`: visiting `B` infinitely often.
pub fn repeated_reachability(model: &Gpks, b: &FuzzyVector) -> Result<FuzzyVector, AlgebraError> {
    let plus = model.trans().transitive_closure()?;
    let cycles = FuzzyVector::from_fn(model.state_count(), |t| plus.get(t, t));
    plus.apply(&cycles.meet(b)?)
}

/// `P* ∘ path_sup(D_B ∘ P)`: staying in `B` forever from some point on.
pub fn persistence(model: &Gpks, b: &FuzzyVector) -> Result<FuzzyVector, AlgebraError> {
    let gated = FuzzyMatrix::diagonal(b).compose(model.trans())?;
    let star = model.trans().reflexive_transitive_closure()?;
    star.apply(&gated.path_sup()?)
}

/// `P^k ∘ v`: the value of `v` observed `k` steps into the future.
pub fn next_shift(model: &Gpks, v: &FuzzyVector, k: u32) -> Result<FuzzyVector, AlgebraError> {
    let mut out = v.clone();
    for _ in 0..k {
        out = model.trans().apply(&out)?;
    }
    Ok(out)
}

/// Bounded reachability: until with an unconstrained left side.
pub fn bounded_eventually(
    model: &Gpks,
    b: &FuzzyVector,
    n: u32,
) -> Result<FuzzyVector, AlgebraError> {
    bounded_until(model, &FuzzyVector::ones(model.state_count()), b, n)
}

/// `max_s min(I(s), v(s))`: lifts a per-state vector to the initial
/// distribution.
pub fn aggregate_initial(model: &Gpks, v: &FuzzyVector) -> Result<Poss, AlgebraError> {
    Ok(model.initial().meet(v)?.max_entry())
}

/// Per-state possibility vector of a pattern.
pub fn possibility(model: &Gpks, pattern: &Pattern) -> Result<FuzzyVector, PatternError> {
    let base = match &pattern.kind {
        PatternKind::Now(b) => b.meet(&model.path_sup())?,
        PatternKind::Eventually(b) => eventually(model, b)?,
        PatternKind::BoundedEventually(b, n) => bounded_eventually(model, b, *n)?,
        PatternKind::Always(b) => always(model, b)?,
        PatternKind::Until(c, b) => until(model, c, b)?,
        PatternKind::BoundedUntil(c, b, n) => bounded_until(model, c, b, *n)?,
        PatternKind::RepeatedlyEventually(b) => repeated_reachability(model, b)?,
        PatternKind::EventuallyForever(b) => persistence(model, b)?,
    };
    Ok(next_shift(model, &base, pattern.shifts)?)
}

/// Per-state necessity vector: the complement of the possibility of the
/// complemented dual pattern.
pub fn necessity(model: &Gpks, pattern: &Pattern) -> Result<FuzzyVector, PatternError> {
    let dual = pattern.dual().ok_or(PatternError::NoClosedDual)?;
    Ok(possibility(model, &dual)?.complement())
}
