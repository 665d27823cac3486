//! Quantitative model checking of fuzzy linear-time properties over
//! generalized possibilistic Kripke structures.
//!
//! Models carry `[0,1]`-valued transitions, initial degrees and labels; the
//! possibility of a property is the sup over paths of the min of the path's
//! transition degrees and the property's value on its trace, and necessity is
//! the complemented dual. Reachability-style patterns have closed forms in
//! max-min matrix algebra; regular safety and ω-regular properties reduce to
//! pattern checks on a product with a fuzzy (Büchi) automaton; a brute-force
//! lasso oracle provides ground truth for differential testing.
//!
//! All arithmetic is exact: degrees are integers in units of 10⁻⁶, so values
//! computed along different routes compare with `==`.

pub mod algebra;
pub mod automata;
pub mod format;
pub mod gpks;
pub mod gpoltl;
pub mod oracle;
pub mod patterns;
pub mod poss;
pub mod product;
pub mod report;

#[cfg(test)]
pub(crate) mod testutil;

pub use algebra::{AlgebraError, FuzzyMatrix, FuzzyVector};
pub use automata::{AcceptanceMode, FuzzyAutomaton, Guard, GuardedTransition};
pub use gpks::{Gpks, LassoPath, Letter, ModelError, StateExpr, UltimatelyPeriodicWord, Violation};
pub use gpoltl::{Formula, Measure};
pub use oracle::{OracleConfig, OracleStart};
pub use poss::Poss;
pub use product::{CheckTarget, ProductGpks};
