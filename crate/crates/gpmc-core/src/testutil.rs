//! Shared fixtures for unit tests.

use crate::algebra::{FuzzyMatrix, FuzzyVector};
use crate::gpks::Gpks;
use crate::poss::Poss;

pub fn poss(text: &str) -> Poss {
    Poss::parse(text).unwrap()
}

pub fn vector(entries: &[&str]) -> FuzzyVector {
    FuzzyVector::new(entries.iter().map(|e| poss(e)).collect())
}

/// The four-state reference model used across the suite.
pub fn fig1() -> Gpks {
    let trans_rows = [
        ["0", "0.8", "0", "0.9"],
        ["0", "0", "0.2", "0.5"],
        ["0", "0", "0.9", "0"],
        ["0", "0.7", "0.6", "0"],
    ];
    let label_rows = [
        ["1", "0.8", "0"],
        ["0.7", "1", "0"],
        ["1", "0", "0.7"],
        ["0", "0.5", "1"],
    ];
    Gpks::new(
        vec!["s0".into(), "s1".into(), "s2".into(), "s3".into()],
        vec!["a".into(), "b".into(), "c".into()],
        FuzzyMatrix::from_fn(4, 4, |i, j| poss(trans_rows[i][j])),
        vector(&["1", "0", "0", "0"]),
        FuzzyMatrix::from_fn(4, 3, |i, j| poss(label_rows[i][j])),
    )
    .unwrap()
}
