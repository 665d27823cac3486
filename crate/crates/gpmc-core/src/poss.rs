//! Exact possibility degrees.
//!
//! A degree is stored as an integer number of millionths ("micros"), so that
//! `min`, `max` and the complement `1 - x` are exact and results computed
//! along different algebraic routes can be compared with `==` instead of a
//! tolerance.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Number of micros in 1.0.
pub const SCALE: u32 = 1_000_000;

/// A possibility degree in `[0, 1]`, held as micros (units of 10⁻⁶).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poss(u32);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParsePossError {
    #[error("`{0}` is not a decimal numeral")]
    Syntax(String),
    #[error("`{0}` is outside [0, 1]")]
    Range(String),
    #[error("`{0}` has more than 6 fractional digits")]
    Precision(String),
}

impl Poss {
    pub const ZERO: Poss = Poss(0);
    pub const ONE: Poss = Poss(SCALE);

    /// Builds a degree from micros; `None` if above 1.0.
    pub fn from_micros(micros: u32) -> Option<Poss> {
        (micros <= SCALE).then_some(Poss(micros))
    }

    pub fn micros(self) -> u32 {
        self.0
    }

    /// The complement `1 - x`.
    pub fn complement(self) -> Poss {
        Poss(SCALE - self.0)
    }

    /// Gödel implication as used by necessity measures: `a → b = (1-a) ∨ b`.
    pub fn implies(self, other: Poss) -> Poss {
        self.complement().max(other)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_one(self) -> bool {
        self.0 == SCALE
    }

    /// Parses a decimal numeral with at most 6 fractional digits in `[0, 1]`.
    pub fn parse(text: &str) -> Result<Poss, ParsePossError> {
        let bad = || ParsePossError::Syntax(text.to_string());
        if text.starts_with('-') && Poss::parse(&text[1..]).is_ok() {
            // A well-formed numeral with a sign is out of range, not garbage.
            return Err(ParsePossError::Range(text.to_string()));
        }
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        if frac_part.len() > 6 {
            return Err(ParsePossError::Precision(text.to_string()));
        }
        let int: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let mut frac: u64 = 0;
        for c in frac_part.chars() {
            frac = frac * 10 + c.to_digit(10).unwrap() as u64;
        }
        frac *= 10u64.pow(6 - frac_part.len() as u32);
        let micros = int * SCALE as u64 + frac;
        if micros > SCALE as u64 {
            return Err(ParsePossError::Range(text.to_string()));
        }
        Ok(Poss(micros as u32))
    }
}

impl FromStr for Poss {
    type Err = ParsePossError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Poss::parse(s)
    }
}

impl fmt::Display for Poss {
    /// Canonical rendering: no exponent, no trailing fractional zeros.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let int = self.0 / SCALE;
        let frac = self.0 % SCALE;
        if frac == 0 {
            return write!(f, "{int}");
        }
        let digits = format!("{frac:06}");
        write!(f, "{int}.{}", digits.trim_end_matches('0'))
    }
}

impl fmt::Debug for Poss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poss({self})")
    }
}
