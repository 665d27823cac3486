//! Max-min algebra of fuzzy vectors and matrices.
//!
//! Composition replaces the ring operations of ordinary linear algebra with
//! `max` (addition) and `min` (multiplication); closures are the finite joins
//! of powers. Every operation is exact: outputs only ever take values that
//! already occur in the inputs.

use thiserror::Error;

use crate::poss::Poss;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

fn mismatch(left: impl ToString, right: impl ToString) -> AlgebraError {
    AlgebraError::DimensionMismatch {
        left: left.to_string(),
        right: right.to_string(),
    }
}

/// A `[0,1]`-valued vector indexed by `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyVector {
    entries: Vec<Poss>,
}

impl FuzzyVector {
    pub fn new(entries: Vec<Poss>) -> FuzzyVector {
        FuzzyVector { entries }
    }

    pub fn constant(len: usize, value: Poss) -> FuzzyVector {
        FuzzyVector {
            entries: vec![value; len],
        }
    }

    pub fn zeros(len: usize) -> FuzzyVector {
        Self::constant(len, Poss::ZERO)
    }

    pub fn ones(len: usize) -> FuzzyVector {
        Self::constant(len, Poss::ONE)
    }

    pub fn from_fn(len: usize, f: impl FnMut(usize) -> Poss) -> FuzzyVector {
        FuzzyVector {
            entries: (0..len).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Poss {
        self.entries[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = Poss> + '_ {
        self.entries.iter().copied()
    }

    pub fn as_slice(&self) -> &[Poss] {
        &self.entries
    }

    /// Pointwise `1 - x`.
    pub fn complement(&self) -> FuzzyVector {
        FuzzyVector {
            entries: self.entries.iter().map(|p| p.complement()).collect(),
        }
    }

    /// Pointwise max.
    pub fn join(&self, other: &FuzzyVector) -> Result<FuzzyVector, AlgebraError> {
        self.zip_with(other, Poss::max)
    }

    /// Pointwise min.
    pub fn meet(&self, other: &FuzzyVector) -> Result<FuzzyVector, AlgebraError> {
        self.zip_with(other, Poss::min)
    }

    fn zip_with(
        &self,
        other: &FuzzyVector,
        f: impl Fn(Poss, Poss) -> Poss,
    ) -> Result<FuzzyVector, AlgebraError> {
        if self.len() != other.len() {
            return Err(mismatch(self.len(), other.len()));
        }
        Ok(FuzzyVector {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Greatest entry; zero for the empty vector.
    pub fn max_entry(&self) -> Poss {
        self.entries.iter().copied().max().unwrap_or(Poss::ZERO)
    }

    /// Pointwise order test `self ≤ other`.
    pub fn le(&self, other: &FuzzyVector) -> bool {
        self.len() == other.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a <= b)
    }
}

/// A `[0,1]`-valued matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poss>,
}

impl FuzzyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Poss>) -> Result<FuzzyMatrix, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(mismatch(format!("{rows}x{cols}"), entries.len()));
        }
        Ok(FuzzyMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> FuzzyMatrix {
        FuzzyMatrix {
            rows,
            cols,
            entries: vec![Poss::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> FuzzyMatrix {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Poss::ONE);
        }
        m
    }

    /// Square matrix with `v` on the diagonal and zero elsewhere.
    pub fn diagonal(v: &FuzzyVector) -> FuzzyMatrix {
        let mut m = Self::zeros(v.len(), v.len());
        for i in 0..v.len() {
            m.set(i, i, v.get(i));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Poss) -> FuzzyMatrix {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        FuzzyMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Poss {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Poss) {
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Poss] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = Poss> + '_ {
        self.entries.iter().copied()
    }

    fn dims(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    /// Max-min composition: `C(i,k) = max_j min(A(i,j), B(j,k))`.
    pub fn compose(&self, other: &FuzzyMatrix) -> Result<FuzzyMatrix, AlgebraError> {
        if self.cols != other.rows {
            return Err(mismatch(self.dims(), other.dims()));
        }
        let mut out = FuzzyMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.cols {
                    let v = a.min(other.get(j, k));
                    if v > out.get(i, k) {
                        out.set(i, k, v);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Composition with a column vector: `(M ∘ v)(i) = max_j min(M(i,j), v(j))`.
    pub fn apply(&self, v: &FuzzyVector) -> Result<FuzzyVector, AlgebraError> {
        if self.cols != v.len() {
            return Err(mismatch(self.dims(), v.len()));
        }
        Ok(FuzzyVector::from_fn(self.rows, |i| {
            self.row(i)
                .iter()
                .zip(v.iter())
                .map(|(&m, x)| m.min(x))
                .max()
                .unwrap_or(Poss::ZERO)
        }))
    }

    /// Composition with a row vector on the left: `(v ∘ M)(k) = max_j min(v(j), M(j,k))`.
    pub fn apply_left(&self, v: &FuzzyVector) -> Result<FuzzyVector, AlgebraError> {
        if self.rows != v.len() {
            return Err(mismatch(v.len(), self.dims()));
        }
        let mut out = FuzzyVector::zeros(self.cols);
        for j in 0..self.rows {
            let a = v.get(j);
            if a.is_zero() {
                continue;
            }
            for k in 0..self.cols {
                let val = a.min(self.get(j, k));
                if val > out.entries[k] {
                    out.entries[k] = val;
                }
            }
        }
        Ok(out)
    }

    /// Elementwise max.
    pub fn join(&self, other: &FuzzyMatrix) -> Result<FuzzyMatrix, AlgebraError> {
        self.zip_with(other, Poss::max)
    }

    /// Elementwise min.
    pub fn meet(&self, other: &FuzzyMatrix) -> Result<FuzzyMatrix, AlgebraError> {
        self.zip_with(other, Poss::min)
    }

    fn zip_with(
        &self,
        other: &FuzzyMatrix,
        f: impl Fn(Poss, Poss) -> Poss,
    ) -> Result<FuzzyMatrix, AlgebraError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(mismatch(self.dims(), other.dims()));
        }
        Ok(FuzzyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    fn require_square(&self) -> Result<(), AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Transitive closure `M⁺ = M ∨ M² ∨ ⋯ ∨ Mᴺ` for an `N×N` matrix.
    ///
    /// Stops early once joining the next power no longer changes the
    /// accumulator; further powers are then dominated as well.
    pub fn transitive_closure(&self) -> Result<FuzzyMatrix, AlgebraError> {
        self.require_square()?;
        let mut acc = self.clone();
        let mut power = self.clone();
        for _ in 1..self.rows {
            power = power.compose(self)?;
            let next = acc.join(&power)?;
            if next == acc {
                break;
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Reflexive-transitive closure `M* = I ∨ M⁺`.
    pub fn reflexive_transitive_closure(&self) -> Result<FuzzyMatrix, AlgebraError> {
        let plus = self.transitive_closure()?;
        FuzzyMatrix::identity(self.rows).join(&plus)
    }

    /// Per-row supremum over infinite walks: `v(i) = max_t min(M⁺(i,t), M⁺(t,t))`.
    ///
    /// This is the greatest min-weight of any infinite walk starting at each
    /// row index; it is zero exactly on rows from which no cycle is reachable.
    pub fn path_sup(&self) -> Result<FuzzyVector, AlgebraError> {
        let plus = self.transitive_closure()?;
        let cycles = FuzzyVector::from_fn(self.rows, |t| plus.get(t, t));
        plus.apply(&cycles)
    }

    /// Elementwise order test `self ≤ other`.
    pub fn le(&self, other: &FuzzyMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a <= b)
    }
}
