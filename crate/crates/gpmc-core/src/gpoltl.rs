//! Linear-temporal formulas over fuzzy letters.
//!
//! Syntax follows ASCII LTL conventions: `!`, `&`, `|`, `->`, `X`, `F`, `G`,
//! `U`, and the bounded forms `F<=n` / `U<=n`. Unary operators bind
//! strongest, then `U`, then `&`, `|` and `->`; `U` and `->` associate to the
//! right. Semantics over an ultimately periodic word are computed exactly:
//! sup/inf over infinitely many shifts collapse to a fixed-point sweep over
//! one period.

use std::fmt;

use thiserror::Error;

use crate::algebra::FuzzyVector;
use crate::gpks::{Gpks, LassoPath, ModelError, StateExpr, UltimatelyPeriodicWord};
use crate::patterns::{self, Pattern, PatternError, PatternKind};
use crate::poss::Poss;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    BoundedUntil(Box<Formula>, Box<Formula>, u32),
    Eventually(Box<Formula>),
    BoundedEventually(Box<Formula>, u32),
    Always(Box<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at offset {position}: {message}")]
pub struct SyntaxError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown atomic proposition `{0}`")]
    UnknownAtom(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("formula has no closed-form state evaluation; use the path oracle or an automaton-based check")]
    UnsupportedFormula,
    #[error("necessity of an until-style pattern has no closed dual; use the path oracle")]
    NoClosedDual,
    #[error("unknown atomic proposition `{0}`")]
    UnknownAtom(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Po,
    Ne,
}

// ---------------------------------------------------------------------------
// Lexing and parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Int(u32),
    KwTrue,
    KwFalse,
    KwU,
    KwX,
    KwF,
    KwG,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Le,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let token = match c {
            '!' => {
                i += 1;
                Token::Bang
            }
            '&' => {
                i += 1;
                Token::Amp
            }
            '|' => {
                i += 1;
                Token::Pipe
            }
            '(' => {
                i += 1;
                Token::LParen
            }
            ')' => {
                i += 1;
                Token::RParen
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    Token::Arrow
                } else {
                    return Err(SyntaxError {
                        position: i,
                        message: "expected `->`".into(),
                    });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    Token::Le
                } else {
                    return Err(SyntaxError {
                        position: i,
                        message: "expected `<=`".into(),
                    });
                }
            }
            c if c.is_ascii_digit() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let value: u32 = text[start..i].parse().map_err(|_| SyntaxError {
                    position: start,
                    message: "integer is too large".into(),
                })?;
                Token::Int(value)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                match &text[start..i] {
                    "true" => Token::KwTrue,
                    "false" => Token::KwFalse,
                    "U" => Token::KwU,
                    "X" => Token::KwX,
                    "F" => Token::KwF,
                    "G" => Token::KwG,
                    ident => Token::Ident(ident.to_string()),
                }
            }
            _ => {
                return Err(SyntaxError {
                    position: i,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((token, start));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(Token, usize)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, p)| p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            position: self.here(),
            message: message.into(),
        }
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn bound(&mut self) -> Result<Option<u32>, SyntaxError> {
        if self.peek() != Some(&Token::Le) {
            return Ok(None);
        }
        self.pos += 1;
        match self.bump() {
            Some(Token::Int(n)) => Ok(Some(n)),
            _ => {
                self.pos -= 1;
                Err(self.error("expected an integer bound after `<=`"))
            }
        }
    }

    fn implies(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.or()?;
        if self.peek() == Some(&Token::Arrow) {
            self.pos += 1;
            let right = self.implies()?;
            return Ok(Formula::Implies(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.and()?;
        while self.peek() == Some(&Token::Pipe) {
            self.pos += 1;
            let right = self.and()?;
            left = Formula::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut left = self.until()?;
        while self.peek() == Some(&Token::Amp) {
            self.pos += 1;
            let right = self.until()?;
            left = Formula::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn until(&mut self) -> Result<Formula, SyntaxError> {
        let mut parts: Vec<(Formula, Option<u32>)> = Vec::new();
        let first = self.unary()?;
        parts.push((first, None));
        while self.peek() == Some(&Token::KwU) {
            self.pos += 1;
            let bound = self.bound()?;
            let next = self.unary()?;
            parts.last_mut().unwrap().1 = bound;
            parts.push((next, None));
        }
        // U associates to the right.
        let (mut formula, _) = parts.pop().unwrap();
        while let Some((left, bound)) = parts.pop() {
            formula = match bound {
                None => Formula::Until(Box::new(left), Box::new(formula)),
                Some(n) => Formula::BoundedUntil(Box::new(left), Box::new(formula), n),
            };
        }
        Ok(formula)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        enum Prefix {
            Not,
            Next,
            Eventually(Option<u32>),
            Always,
        }
        let mut prefixes = Vec::new();
        loop {
            match self.peek() {
                Some(Token::Bang) => {
                    self.pos += 1;
                    prefixes.push(Prefix::Not);
                }
                Some(Token::KwX) => {
                    self.pos += 1;
                    prefixes.push(Prefix::Next);
                }
                Some(Token::KwF) => {
                    self.pos += 1;
                    prefixes.push(Prefix::Eventually(self.bound()?));
                }
                Some(Token::KwG) => {
                    self.pos += 1;
                    prefixes.push(Prefix::Always);
                }
                _ => break,
            }
        }
        let mut formula = self.primary()?;
        for prefix in prefixes.into_iter().rev() {
            formula = match prefix {
                Prefix::Not => Formula::Not(Box::new(formula)),
                Prefix::Next => Formula::Next(Box::new(formula)),
                Prefix::Eventually(None) => Formula::Eventually(Box::new(formula)),
                Prefix::Eventually(Some(n)) => {
                    Formula::BoundedEventually(Box::new(formula), n)
                }
                Prefix::Always => Formula::Always(Box::new(formula)),
            };
        }
        Ok(formula)
    }

    fn primary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().cloned() {
            Some(Token::KwTrue) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Token::KwFalse) => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(Formula::True)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.implies()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("expected a formula")),
        }
    }
}

/// Parses a formula in the concrete syntax described in the module docs.
pub fn parse(text: &str) -> Result<Formula, SyntaxError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        end: text.len(),
    };
    let formula = parser.implies()?;
    if parser.pos != tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(formula)
}

impl Formula {
    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Until(..) | Formula::BoundedUntil(..) => 4,
            Formula::Not(..)
            | Formula::Next(..)
            | Formula::Eventually(..)
            | Formula::BoundedEventually(..)
            | Formula::Always(..) => 5,
            Formula::True | Formula::Atom(..) => 6,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let mine = self.precedence();
        if mine < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(p) => {
                write!(f, "!")?;
                p.fmt_prec(f, 5)
            }
            Formula::Next(p) => {
                write!(f, "X ")?;
                p.fmt_prec(f, 5)
            }
            Formula::Eventually(p) => {
                write!(f, "F ")?;
                p.fmt_prec(f, 5)
            }
            Formula::BoundedEventually(p, n) => {
                write!(f, "F<={n} ")?;
                p.fmt_prec(f, 5)
            }
            Formula::Always(p) => {
                write!(f, "G ")?;
                p.fmt_prec(f, 5)
            }
            Formula::Until(l, r) => {
                l.fmt_prec(f, 5)?;
                write!(f, " U ")?;
                r.fmt_prec(f, 4)
            }
            Formula::BoundedUntil(l, r, n) => {
                l.fmt_prec(f, 5)?;
                write!(f, " U<={n} ")?;
                r.fmt_prec(f, 4)
            }
            Formula::And(l, r) => {
                l.fmt_prec(f, 3)?;
                write!(f, " & ")?;
                r.fmt_prec(f, 4)
            }
            Formula::Or(l, r) => {
                l.fmt_prec(f, 2)?;
                write!(f, " | ")?;
                r.fmt_prec(f, 3)
            }
            Formula::Implies(l, r) => {
                l.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                r.fmt_prec(f, 1)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

// ---------------------------------------------------------------------------
// Language semantics over ultimately periodic words
// ---------------------------------------------------------------------------

/// Exact language value of `phi` on the infinite word presented by `w`.
pub fn language_eval(phi: &Formula, w: &UltimatelyPeriodicWord) -> Result<Poss, EvalError> {
    Ok(eval_positions(phi, w)?[0])
}

/// Value of `phi` at every position `0 .. prefix+period`; positions in the
/// periodic part stand for all of their unrollings.
fn eval_positions(phi: &Formula, w: &UltimatelyPeriodicWord) -> Result<Vec<Poss>, EvalError> {
    let pre = w.prefix().len();
    let per = w.period().len();
    let n = pre + per;
    let next = |i: usize| if i + 1 < n { i + 1 } else { pre };
    let letter = |i: usize| {
        if i < pre {
            &w.prefix()[i]
        } else {
            &w.period()[i - pre]
        }
    };
    Ok(match phi {
        Formula::True => vec![Poss::ONE; n],
        Formula::Atom(a) => {
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                if !letter(i).contains(a) {
                    return Err(EvalError::UnknownAtom(a.clone()));
                }
                out.push(letter(i).get(a));
            }
            out
        }
        Formula::Not(p) => eval_positions(p, w)?
            .into_iter()
            .map(Poss::complement)
            .collect(),
        Formula::And(l, r) => zip(eval_positions(l, w)?, eval_positions(r, w)?, Poss::min),
        Formula::Or(l, r) => zip(eval_positions(l, w)?, eval_positions(r, w)?, Poss::max),
        Formula::Implies(l, r) => zip(eval_positions(l, w)?, eval_positions(r, w)?, |a, b| {
            a.implies(b)
        }),
        Formula::Next(p) => {
            let v = eval_positions(p, w)?;
            (0..n).map(|i| v[next(i)]).collect()
        }
        Formula::Until(l, r) => {
            let lv = eval_positions(l, w)?;
            let rv = eval_positions(r, w)?;
            until_positions(&lv, &rv, pre, per)
        }
        Formula::Eventually(p) => {
            let v = eval_positions(p, w)?;
            until_positions(&vec![Poss::ONE; n], &v, pre, per)
        }
        Formula::Always(p) => {
            // G phi = !F !phi, computed through the same sup machinery.
            let v: Vec<Poss> = eval_positions(p, w)?
                .into_iter()
                .map(Poss::complement)
                .collect();
            until_positions(&vec![Poss::ONE; n], &v, pre, per)
                .into_iter()
                .map(Poss::complement)
                .collect()
        }
        Formula::BoundedUntil(l, r, k) => {
            let lv = eval_positions(l, w)?;
            let rv = eval_positions(r, w)?;
            bounded_until_positions(&lv, &rv, *k, n, next)
        }
        Formula::BoundedEventually(p, k) => {
            let v = eval_positions(p, w)?;
            bounded_until_positions(&vec![Poss::ONE; n], &v, *k, n, next)
        }
    })
}

fn zip(a: Vec<Poss>, b: Vec<Poss>, f: impl Fn(Poss, Poss) -> Poss) -> Vec<Poss> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Least solution of `x(i) = b(i) ∨ (a(i) ∧ x(next(i)))`.
///
/// The cycle part is solved by backward sweeps from the zero vector; each
/// sweep pushes information one full period backwards, so the iteration
/// stabilizes within a number of sweeps bounded by the count of distinct
/// values involved.
fn until_positions(a: &[Poss], b: &[Poss], pre: usize, per: usize) -> Vec<Poss> {
    let n = pre + per;
    let next = |i: usize| if i + 1 < n { i + 1 } else { pre };
    let mut x = vec![Poss::ZERO; n];
    let distinct: std::collections::BTreeSet<Poss> = a
        .iter()
        .chain(b.iter())
        .copied()
        .chain([Poss::ZERO])
        .collect();
    let cap = distinct.len() + 3;
    let mut sweeps = 0;
    loop {
        let mut changed = false;
        for i in (pre..n).rev() {
            let v = b[i].max(a[i].min(x[next(i)]));
            if v != x[i] {
                x[i] = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        sweeps += 1;
        assert!(
            sweeps <= cap,
            "until evaluation failed to stabilize within its value bound"
        );
    }
    for i in (0..pre).rev() {
        x[i] = b[i].max(a[i].min(x[i + 1]));
    }
    x
}

/// `x(i) = ∨_{j=0..k} (b at j steps ∧ conjunction of a over the first j)`.
fn bounded_until_positions(
    a: &[Poss],
    b: &[Poss],
    k: u32,
    n: usize,
    next: impl Fn(usize) -> usize,
) -> Vec<Poss> {
    (0..n)
        .map(|start| {
            let mut best = Poss::ZERO;
            let mut conj = Poss::ONE;
            let mut pos = start;
            for _ in 0..=k {
                best = best.max(conj.min(b[pos]));
                conj = conj.min(a[pos]);
                if conj.is_zero() {
                    break;
                }
                pos = next(pos);
            }
            best
        })
        .collect()
}

/// Path value of `phi` on a lasso: the language value of its trace.
pub fn path_eval(model: &Gpks, phi: &Formula, lasso: &LassoPath) -> Result<Poss, EvalError> {
    model.path_possibility(lasso)?;
    language_eval(phi, &model.trace(lasso))
}

// ---------------------------------------------------------------------------
// Pattern compilation
// ---------------------------------------------------------------------------

/// A recognized pattern: `shifts` next-steps applied to a closed-form shape
/// whose arguments are propositional state expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledPattern {
    pub shifts: u32,
    pub kind: PatternKind<StateExpr>,
}

/// Extracts a propositional (non-temporal) state expression.
pub fn as_state_expr(phi: &Formula) -> Option<StateExpr> {
    Some(match phi {
        Formula::True => StateExpr::True,
        Formula::Atom(a) => StateExpr::Atom(a.clone()),
        Formula::Not(p) => StateExpr::Not(Box::new(as_state_expr(p)?)),
        Formula::And(l, r) => StateExpr::And(
            Box::new(as_state_expr(l)?),
            Box::new(as_state_expr(r)?),
        ),
        Formula::Or(l, r) => StateExpr::Or(
            Box::new(as_state_expr(l)?),
            Box::new(as_state_expr(r)?),
        ),
        Formula::Implies(l, r) => StateExpr::Implies(
            Box::new(as_state_expr(l)?),
            Box::new(as_state_expr(r)?),
        ),
        _ => return None,
    })
}

/// Recognizes formulas with a closed-form state evaluation: a chain of
/// next-steps over one of the supported shapes. Negation is pushed through
/// shapes that have duals; everything else is unsupported (`None`).
pub fn compile_pattern(phi: &Formula) -> Option<CompiledPattern> {
    if let Some(e) = as_state_expr(phi) {
        return Some(CompiledPattern {
            shifts: 0,
            kind: PatternKind::Now(e),
        });
    }
    match phi {
        Formula::Next(p) => {
            let mut cp = compile_pattern(p)?;
            cp.shifts += 1;
            Some(cp)
        }
        Formula::Not(p) => negate_pattern(compile_pattern(p)?),
        Formula::Eventually(p) => {
            let cp = compile_pattern(p)?;
            let kind = match cp.kind {
                PatternKind::Now(e) => PatternKind::Eventually(e),
                PatternKind::Always(e) => PatternKind::EventuallyForever(e),
                _ => return None,
            };
            Some(CompiledPattern {
                shifts: cp.shifts,
                kind,
            })
        }
        Formula::Always(p) => {
            let cp = compile_pattern(p)?;
            let kind = match cp.kind {
                PatternKind::Now(e) => PatternKind::Always(e),
                PatternKind::Eventually(e) => PatternKind::RepeatedlyEventually(e),
                _ => return None,
            };
            Some(CompiledPattern {
                shifts: cp.shifts,
                kind,
            })
        }
        Formula::BoundedEventually(p, n) => {
            let cp = compile_pattern(p)?;
            match cp.kind {
                PatternKind::Now(e) => Some(CompiledPattern {
                    shifts: cp.shifts,
                    kind: PatternKind::BoundedEventually(e, *n),
                }),
                _ => None,
            }
        }
        Formula::Until(l, r) => Some(CompiledPattern {
            shifts: 0,
            kind: PatternKind::Until(as_state_expr(l)?, as_state_expr(r)?),
        }),
        Formula::BoundedUntil(l, r, n) => Some(CompiledPattern {
            shifts: 0,
            kind: PatternKind::BoundedUntil(as_state_expr(l)?, as_state_expr(r)?, *n),
        }),
        _ => None,
    }
}

fn negate_pattern(cp: CompiledPattern) -> Option<CompiledPattern> {
    let negated = |e: StateExpr| StateExpr::Not(Box::new(e));
    let kind = match cp.kind {
        PatternKind::Now(e) => PatternKind::Now(negated(e)),
        PatternKind::Eventually(e) => PatternKind::Always(negated(e)),
        PatternKind::Always(e) => PatternKind::Eventually(negated(e)),
        PatternKind::RepeatedlyEventually(e) => PatternKind::EventuallyForever(negated(e)),
        PatternKind::EventuallyForever(e) => PatternKind::RepeatedlyEventually(negated(e)),
        PatternKind::BoundedEventually(..)
        | PatternKind::Until(..)
        | PatternKind::BoundedUntil(..) => return None,
    };
    Some(CompiledPattern {
        shifts: cp.shifts,
        kind,
    })
}

/// Resolves a compiled pattern's state expressions against a model.
pub fn resolve_pattern(model: &Gpks, cp: &CompiledPattern) -> Result<Pattern, ModelError> {
    let kind = cp
        .kind
        .clone()
        .map(|e| model.eval_state_expr(&e))?;
    Ok(Pattern {
        shifts: cp.shifts,
        kind,
    })
}

/// Per-state closed-form value of a supported formula.
pub fn check_vector(
    model: &Gpks,
    phi: &Formula,
    measure: Measure,
) -> Result<FuzzyVector, CheckError> {
    let cp = compile_pattern(phi).ok_or(CheckError::UnsupportedFormula)?;
    let pattern = resolve_pattern(model, &cp).map_err(|e| match e {
        ModelError::UnknownAtom(a) => CheckError::UnknownAtom(a),
        other => panic!("state expression evaluation cannot fail with {other}"),
    })?;
    let result = match measure {
        Measure::Po => patterns::possibility(model, &pattern),
        Measure::Ne => patterns::necessity(model, &pattern),
    };
    result.map_err(|e| match e {
        PatternError::NoClosedDual => CheckError::NoClosedDual,
        PatternError::Algebra(e) => panic!("resolved pattern has consistent dimensions: {e}"),
    })
}

/// Closed-form value of a supported formula at one state.
pub fn check_state(
    model: &Gpks,
    phi: &Formula,
    state: &str,
    measure: Measure,
) -> Result<Poss, CheckError> {
    let idx = model
        .state_index(state)
        .ok_or_else(|| CheckError::UnknownState(state.to_string()))?;
    Ok(check_vector(model, phi, measure)?.get(idx))
}
