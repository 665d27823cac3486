//! Fuzzy finite and Büchi automata with guard-labeled transitions.
//!
//! The alphabet of fuzzy letters is exponentially large, so transitions carry
//! guards: boolean predicates over one letter. The transition possibility
//! `delta(q, A, q')` on a concrete letter is the max value over matching
//! transitions. Infinite-word acceptance is evaluated by cut-level
//! decomposition: the value set is finite, so the fuzzy optimum is the
//! largest cut at which a boolean lasso search succeeds.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::algebra::FuzzyVector;
use crate::gpks::{Letter, UltimatelyPeriodicWord};
use crate::poss::Poss;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("operation requires a {expected}-word automaton")]
    WrongMode { expected: &'static str },
    #[error("automaton is not deterministic: {0}")]
    NotDeterministic(String),
    #[error("unknown automaton state `{0}`")]
    UnknownState(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptanceMode {
    Finite,
    Buchi,
}

impl fmt::Display for AcceptanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcceptanceMode::Finite => write!(f, "finite"),
            AcceptanceMode::Buchi => write!(f, "buchi"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn eval(self, left: Poss, right: Poss) -> bool {
        match self {
            CmpOp::Eq => left == right,
            CmpOp::Ne => left != right,
            CmpOp::Lt => left < right,
            CmpOp::Le => left <= right,
            CmpOp::Gt => left > right,
            CmpOp::Ge => left >= right,
        }
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        };
        write!(f, "{s}")
    }
}

/// Boolean predicate over one fuzzy letter.
///
/// A bare proposition `ap` abbreviates `ap > 0`; `!` is general negation, so
/// `!ap` means `ap == 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Guard {
    Any,
    Atom(String),
    Cmp(String, CmpOp, Poss),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("guard syntax error at offset {position}: {message}")]
pub struct GuardParseError {
    pub position: usize,
    pub message: String,
}

impl Guard {
    pub fn eval(&self, letter: &Letter) -> bool {
        match self {
            Guard::Any => true,
            Guard::Atom(ap) => !letter.get(ap).is_zero(),
            Guard::Cmp(ap, op, value) => op.eval(letter.get(ap), *value),
            Guard::Not(g) => !g.eval(letter),
            Guard::And(l, r) => l.eval(letter) && r.eval(letter),
            Guard::Or(l, r) => l.eval(letter) || r.eval(letter),
        }
    }

    /// Atomic propositions the guard mentions.
    pub fn atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Guard::Any => {}
            Guard::Atom(ap) | Guard::Cmp(ap, _, _) => {
                out.insert(ap.clone());
            }
            Guard::Not(g) => g.atoms(out),
            Guard::And(l, r) | Guard::Or(l, r) => {
                l.atoms(out);
                r.atoms(out);
            }
        }
    }

    /// Parses `g := term ("||" term)* ; term := factor ("&&" factor)* ;
    /// factor := "!" factor | "(" g ")" | "any" | IDENT | IDENT OP NUMBER`.
    pub fn parse(text: &str) -> Result<Guard, GuardParseError> {
        let mut p = GuardParser { text, pos: 0 };
        let g = p.or()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(g)
    }
}

struct GuardParser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> GuardParser<'a> {
    fn error(&self, message: impl Into<String>) -> GuardParseError {
        GuardParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Guard, GuardParseError> {
        let mut left = self.and()?;
        while self.eat("||") {
            let right = self.and()?;
            left = Guard::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<Guard, GuardParseError> {
        let mut left = self.factor()?;
        while self.eat("&&") {
            let right = self.factor()?;
            left = Guard::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Guard, GuardParseError> {
        self.skip_ws();
        if self.eat("!") {
            return Ok(Guard::Not(Box::new(self.factor()?)));
        }
        if self.eat("(") {
            let inner = self.or()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            return Ok(inner);
        }
        let ident = self.ident()?;
        if ident == "any" {
            return Ok(Guard::Any);
        }
        self.skip_ws();
        for (text, op) in [
            ("==", CmpOp::Eq),
            ("!=", CmpOp::Ne),
            ("<=", CmpOp::Le),
            (">=", CmpOp::Ge),
            ("<", CmpOp::Lt),
            (">", CmpOp::Gt),
        ] {
            if self.eat(text) {
                let value = self.number()?;
                return Ok(Guard::Cmp(ident, op, value));
            }
        }
        Ok(Guard::Atom(ident))
    }

    fn ident(&mut self) -> Result<String, GuardParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        if self.pos >= bytes.len()
            || !(bytes[self.pos].is_ascii_alphabetic() || bytes[self.pos] == b'_')
        {
            return Err(self.error("expected an identifier"));
        }
        while self.pos < bytes.len()
            && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Ok(self.text[start..self.pos].to_string())
    }

    fn number(&mut self) -> Result<Poss, GuardParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        while self.pos < bytes.len()
            && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.')
        {
            self.pos += 1;
        }
        Poss::parse(&self.text[start..self.pos]).map_err(|e| GuardParseError {
            position: start,
            message: e.to_string(),
        })
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Any => write!(f, "any"),
            Guard::Atom(ap) => write!(f, "{ap}"),
            Guard::Cmp(ap, op, value) => write!(f, "{ap} {op} {value}"),
            Guard::Not(g) => match g.as_ref() {
                Guard::And(..) | Guard::Or(..) => write!(f, "!({g})"),
                _ => write!(f, "!{g}"),
            },
            Guard::And(l, r) => {
                let wrap = |g: &Guard| matches!(g, Guard::Or(..));
                if wrap(l) {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " && ")?;
                if wrap(r) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            Guard::Or(l, r) => write!(f, "{l} || {r}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedTransition {
    pub from: usize,
    pub to: usize,
    pub guard: Guard,
    pub value: Poss,
}

/// A fuzzy automaton over guard-labeled transitions; `mode` selects between
/// finite-word and Büchi acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyAutomaton {
    states: Vec<String>,
    ap: Vec<String>,
    mode: AcceptanceMode,
    initial: FuzzyVector,
    accepting: FuzzyVector,
    transitions: Vec<GuardedTransition>,
    extra_letters: Vec<Letter>,
}

impl FuzzyAutomaton {
    pub fn new(
        states: Vec<String>,
        ap: Vec<String>,
        mode: AcceptanceMode,
        initial: FuzzyVector,
        accepting: FuzzyVector,
        transitions: Vec<GuardedTransition>,
        extra_letters: Vec<Letter>,
    ) -> FuzzyAutomaton {
        assert_eq!(initial.len(), states.len());
        assert_eq!(accepting.len(), states.len());
        for t in &transitions {
            assert!(t.from < states.len() && t.to < states.len());
        }
        FuzzyAutomaton {
            states,
            ap,
            mode,
            initial,
            accepting,
            transitions,
            extra_letters,
        }
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

    pub fn mode(&self) -> AcceptanceMode {
        self.mode
    }

    pub fn initial(&self) -> &FuzzyVector {
        &self.initial
    }

    pub fn accepting(&self) -> &FuzzyVector {
        &self.accepting
    }

    pub fn transitions(&self) -> &[GuardedTransition] {
        &self.transitions
    }

    pub fn extra_letters(&self) -> &[Letter] {
        &self.extra_letters
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Transition possibility on a concrete letter: the max value over
    /// matching transitions from `q` to `q2`, zero if none match.
    pub fn delta(&self, q: usize, letter: &Letter, q2: usize) -> Poss {
        self.transitions
            .iter()
            .filter(|t| t.from == q && t.to == q2 && t.guard.eval(letter))
            .map(|t| t.value)
            .max()
            .unwrap_or(Poss::ZERO)
    }

    /// All successor possibilities from `q` on one letter.
    pub fn delta_row(&self, q: usize, letter: &Letter) -> FuzzyVector {
        let mut out = vec![Poss::ZERO; self.state_count()];
        for t in &self.transitions {
            if t.from == q && t.guard.eval(letter) && t.value > out[t.to] {
                out[t.to] = t.value;
            }
        }
        FuzzyVector::new(out)
    }

    /// Finite-word acceptance by max-min vector propagation.
    pub fn accept_finite(&self, word: &[Letter]) -> Result<Poss, AutomatonError> {
        if self.mode != AcceptanceMode::Finite {
            return Err(AutomatonError::WrongMode { expected: "finite" });
        }
        let mut current = self.initial.clone();
        for letter in word {
            let mut next = vec![Poss::ZERO; self.state_count()];
            for q in 0..self.state_count() {
                let reach = current.get(q);
                if reach.is_zero() {
                    continue;
                }
                for t in &self.transitions {
                    if t.from == q && t.guard.eval(letter) {
                        let v = reach.min(t.value);
                        if v > next[t.to] {
                            next[t.to] = v;
                        }
                    }
                }
            }
            current = FuzzyVector::new(next);
        }
        Ok(current
            .meet(&self.accepting)
            .expect("same dimension")
            .max_entry())
    }

    /// Deterministic over `alphabet`: a unique initial state with degree 1,
    /// and on every letter each state has exactly one value-1 successor and
    /// no other positive one.
    pub fn is_deterministic(&self, alphabet: &[Letter]) -> bool {
        let positive: Vec<Poss> = self.initial.iter().filter(|p| !p.is_zero()).collect();
        if positive != vec![Poss::ONE] {
            return false;
        }
        (0..self.state_count()).all(|q| {
            alphabet
                .iter()
                .all(|letter| self.unique_one_successor(q, letter).is_some())
        })
    }

    fn unique_one_successor(&self, q: usize, letter: &Letter) -> Option<usize> {
        let row = self.delta_row(q, letter);
        let mut successor = None;
        for (q2, value) in row.iter().enumerate() {
            if value.is_one() {
                if successor.is_some() {
                    return None;
                }
                successor = Some(q2);
            } else if !value.is_zero() {
                return None;
            }
        }
        successor
    }

    /// The unique value-1 initial state of a deterministic automaton.
    pub fn deterministic_start(&self) -> Result<usize, AutomatonError> {
        let mut start = None;
        for (q, value) in self.initial.iter().enumerate() {
            if !value.is_zero() {
                if !value.is_one() || start.is_some() {
                    return Err(AutomatonError::NotDeterministic(
                        "initial distribution is not a single value-1 state".into(),
                    ));
                }
                start = Some(q);
            }
        }
        start.ok_or_else(|| {
            AutomatonError::NotDeterministic("initial distribution is empty".into())
        })
    }

    /// The unique value-1 successor of `q` on `letter`.
    pub fn det_successor(&self, q: usize, letter: &Letter) -> Result<usize, AutomatonError> {
        self.unique_one_successor(q, letter).ok_or_else(|| {
            AutomatonError::NotDeterministic(format!(
                "state `{}` has no unique value-1 successor on a model letter",
                self.states[q]
            ))
        })
    }

    /// Büchi acceptance of an ultimately periodic word, by descending
    /// cut-level search over the finite set of involved degrees.
    pub fn accept_omega(&self, w: &UltimatelyPeriodicWord) -> Result<Poss, AutomatonError> {
        if self.mode != AcceptanceMode::Buchi {
            return Err(AutomatonError::WrongMode { expected: "buchi" });
        }
        let pre = w.prefix().len();
        let per = w.period().len();
        let positions = pre + per;
        // Candidate cuts: degrees of the initial/accepting distributions and
        // of delta on the word's letters.
        let mut cuts: BTreeSet<Poss> = self.initial.iter().chain(self.accepting.iter()).collect();
        let letters: Vec<&Letter> = (0..positions).map(|i| w.letter(i)).collect();
        let mut rows = Vec::with_capacity(positions * self.state_count());
        for &letter in &letters {
            for q in 0..self.state_count() {
                let row = self.delta_row(q, letter);
                cuts.extend(row.iter());
                rows.push(row);
            }
        }
        cuts.remove(&Poss::ZERO);
        for cut in cuts.into_iter().rev() {
            if self.cut_accepts(cut, pre, positions, &rows) {
                return Ok(cut);
            }
        }
        Ok(Poss::ZERO)
    }

    /// Boolean Büchi emptiness at one cut: is there a run over nodes
    /// `(state, position)` using only transitions of degree ≥ cut, starting
    /// from an initial state of degree ≥ cut, that reaches a cycle through a
    /// node whose state accepts with degree ≥ cut?
    fn cut_accepts(&self, cut: Poss, pre: usize, positions: usize, rows: &[FuzzyVector]) -> bool {
        let k = self.state_count();
        let node = |q: usize, pos: usize| pos * k + q;
        let next_pos = |pos: usize| if pos + 1 < positions { pos + 1 } else { pre };
        let successors = |id: usize| {
            let (pos, q) = (id / k, id % k);
            let row = &rows[pos * k + q];
            let target = next_pos(pos);
            (0..k)
                .filter(move |&q2| row.get(q2) >= cut)
                .map(move |q2| node(q2, target))
                .collect::<Vec<_>>()
        };

        let mut reachable = vec![false; k * positions];
        let mut queue = VecDeque::new();
        for q in 0..k {
            if self.initial.get(q) >= cut {
                reachable[node(q, 0)] = true;
                queue.push_back(node(q, 0));
            }
        }
        while let Some(id) = queue.pop_front() {
            for succ in successors(id) {
                if !reachable[succ] {
                    reachable[succ] = true;
                    queue.push_back(succ);
                }
            }
        }

        // A cycle through an accepting node: the node must reach itself.
        for pos in pre..positions {
            for q in 0..k {
                let id = node(q, pos);
                if !reachable[id] || self.accepting.get(q) < cut {
                    continue;
                }
                let mut seen = vec![false; k * positions];
                let mut queue: VecDeque<usize> = successors(id).into_iter().collect();
                while let Some(cur) = queue.pop_front() {
                    if cur == id {
                        return true;
                    }
                    if seen[cur] {
                        continue;
                    }
                    seen[cur] = true;
                    queue.extend(successors(cur));
                }
            }
        }
        false
    }
}
