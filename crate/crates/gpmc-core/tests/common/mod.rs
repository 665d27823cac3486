//! Shared generators and independent reference evaluators for the
//! integration suites.
//!
//! Everything here is deliberately dumb: path-value folds over explicit
//! lassos, explicit sup/inf unrollings, and DFS run searches. None of it
//! reuses the closed-form matrix route it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::prelude::*;
use rand::rngs::SmallRng;

use gpmc_core::algebra::{FuzzyMatrix, FuzzyVector};
use gpmc_core::automata::{AcceptanceMode, CmpOp, FuzzyAutomaton, Guard, GuardedTransition};
use gpmc_core::gpks::{Gpks, LassoPath, Letter, UltimatelyPeriodicWord};
use gpmc_core::gpoltl::Formula;
use gpmc_core::oracle::{self, OracleConfig, OracleStart};
use gpmc_core::poss::Poss;

pub fn poss(text: &str) -> Poss {
    Poss::parse(text).unwrap()
}

pub fn vector(entries: &[&str]) -> FuzzyVector {
    FuzzyVector::new(entries.iter().map(|e| poss(e)).collect())
}

pub fn fixture(name: &str) -> String {
    format!("{}/../../models/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn load_model(name: &str) -> Gpks {
    gpmc_core::format::load_model(fixture(name)).unwrap()
}

pub fn load_automaton(name: &str) -> FuzzyAutomaton {
    gpmc_core::format::load_automaton(fixture(name)).unwrap()
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

pub const DEGREES: [&str; 5] = ["0", "0.3", "0.5", "0.7", "1"];

pub fn random_degree(rng: &mut SmallRng) -> Poss {
    poss(DEGREES[rng.random_range(0..DEGREES.len())])
}

pub fn random_positive_degree(rng: &mut SmallRng) -> Poss {
    poss(DEGREES[rng.random_range(1..DEGREES.len())])
}

/// A random total model: 2–4 states, out-degree 1–2 per state, transition
/// degrees in {0.3, 0.5, 0.7, 1}, labels over {a, b} in the five-point set.
pub fn random_model(rng: &mut SmallRng) -> Gpks {
    let n = rng.random_range(2..=4);
    let mut trans = FuzzyMatrix::zeros(n, n);
    for s in 0..n {
        let degree = rng.random_range(1..=2usize);
        let mut targets: Vec<usize> = (0..n).collect();
        targets.shuffle(rng);
        for &t in targets.iter().take(degree) {
            trans.set(s, t, random_positive_degree(rng));
        }
    }
    let labels = FuzzyMatrix::from_fn(n, 2, |_, _| random_degree(rng));
    let mut initial = FuzzyVector::from_fn(n, |_| random_degree(rng));
    if initial.max_entry().is_zero() {
        let lucky = rng.random_range(0..n);
        initial = FuzzyVector::from_fn(n, |s| {
            if s == lucky {
                Poss::ONE
            } else {
                Poss::ZERO
            }
        });
    }
    Gpks::new(
        (0..n).map(|s| format!("s{s}")).collect(),
        vec!["a".into(), "b".into()],
        trans,
        initial,
        labels,
    )
    .unwrap()
}

/// Raises one transition per row and one initial entry to 1, which makes the
/// distributions normal.
pub fn normalize(model: &Gpks) -> Gpks {
    let n = model.state_count();
    let mut trans = model.trans().clone();
    for s in 0..n {
        let t = (0..n)
            .find(|&t| !trans.get(s, t).is_zero())
            .expect("random models are total");
        trans.set(s, t, Poss::ONE);
    }
    let top = (0..n)
        .max_by_key(|&s| model.initial().get(s))
        .unwrap();
    let initial = FuzzyVector::from_fn(n, |s| {
        if s == top {
            Poss::ONE
        } else {
            model.initial().get(s)
        }
    });
    Gpks::new(
        model.states().to_vec(),
        model.ap().to_vec(),
        trans,
        initial,
        model.labels().clone(),
    )
    .unwrap()
}

pub fn random_state_vector(rng: &mut SmallRng, n: usize) -> FuzzyVector {
    FuzzyVector::from_fn(n, |_| random_degree(rng))
}

/// Oracle bounds sufficient for the pattern optima: any optimum is realized
/// by a simple reach segment plus a simple continuation into a simple cycle,
/// so prefixes never need more than `2|S| - 2` states.
pub fn pattern_bounds(model: &Gpks) -> (usize, usize) {
    let n = model.state_count();
    ((2 * n - 2).max(n + 2), n)
}

// ---------------------------------------------------------------------------
// Path-value folds over explicit lassos
// ---------------------------------------------------------------------------

/// Reaching value: max of `b` over all positions of one unrolling.
pub fn fold_eventually(b: &FuzzyVector, lasso: &LassoPath) -> Poss {
    lasso.positions().map(|s| b.get(s)).max().unwrap()
}

/// Staying value: min of `b` over all positions.
pub fn fold_always(b: &FuzzyVector, lasso: &LassoPath) -> Poss {
    lasso.positions().map(|s| b.get(s)).min().unwrap()
}

/// Constrained reaching: the sup over hit positions is realized within the
/// first unrolling because the running constraint conjunction only shrinks.
pub fn fold_until(c: &FuzzyVector, b: &FuzzyVector, lasso: &LassoPath) -> Poss {
    let mut best = Poss::ZERO;
    let mut conj = Poss::ONE;
    for s in lasso.positions() {
        best = best.max(conj.min(b.get(s)));
        conj = conj.min(c.get(s));
        if conj.is_zero() {
            break;
        }
    }
    best
}

pub fn fold_bounded_until(c: &FuzzyVector, b: &FuzzyVector, n: u32, lasso: &LassoPath) -> Poss {
    let mut best = Poss::ZERO;
    let mut conj = Poss::ONE;
    let len = lasso.prefix.len() + lasso.cycle.len();
    for s in lasso.positions().take((n as usize + 1).min(len)) {
        best = best.max(conj.min(b.get(s)));
        conj = conj.min(c.get(s));
        if conj.is_zero() {
            break;
        }
    }
    best
}

/// Infinitely-often value: max of `b` over the cycle states.
pub fn fold_repeated(b: &FuzzyVector, lasso: &LassoPath) -> Poss {
    lasso.cycle.iter().map(|&s| b.get(s)).max().unwrap()
}

/// From-some-point-on value: min of `b` over the cycle states.
pub fn fold_persistence(b: &FuzzyVector, lasso: &LassoPath) -> Poss {
    lasso.cycle.iter().map(|&s| b.get(s)).min().unwrap()
}

/// Per-state oracle vectors for all six patterns at once, with possibility
/// and necessity variants, from one enumeration pass per start state.
pub struct PatternOracle {
    pub eventually: FuzzyVector,
    pub always: FuzzyVector,
    pub until: FuzzyVector,
    pub bounded_until: FuzzyVector,
    pub repeated: FuzzyVector,
    pub persistence: FuzzyVector,
    pub ne_eventually: FuzzyVector,
    pub ne_always: FuzzyVector,
    pub ne_repeated: FuzzyVector,
    pub ne_persistence: FuzzyVector,
}

pub fn pattern_oracle(
    model: &Gpks,
    b: &FuzzyVector,
    c: &FuzzyVector,
    n: u32,
    bounds: (usize, usize),
) -> PatternOracle {
    let states = model.state_count();
    let mut po = vec![[Poss::ZERO; 6]; states];
    let mut ne = vec![[Poss::ONE; 4]; states];
    for s in 0..states {
        let based = model.rebase_initial_at(s);
        let cfg = OracleConfig {
            max_prefix: bounds.0,
            max_cycle: bounds.1,
            start: OracleStart::State(s),
        };
        oracle::for_each_lasso(&based, &cfg, &mut |lasso| {
            let possibility = based.path_possibility(lasso).unwrap();
            let values = [
                fold_eventually(b, lasso),
                fold_always(b, lasso),
                fold_until(c, b, lasso),
                fold_bounded_until(c, b, n, lasso),
                fold_repeated(b, lasso),
                fold_persistence(b, lasso),
            ];
            for (acc, value) in po[s].iter_mut().zip(values) {
                *acc = (*acc).max(possibility.min(value));
            }
            for (acc, value) in ne[s]
                .iter_mut()
                .zip([values[0], values[1], values[4], values[5]])
            {
                *acc = (*acc).min(possibility.implies(value));
            }
        });
    }
    let collect = |pick: &dyn Fn(usize) -> Poss| FuzzyVector::from_fn(states, pick);
    PatternOracle {
        eventually: collect(&|s| po[s][0]),
        always: collect(&|s| po[s][1]),
        until: collect(&|s| po[s][2]),
        bounded_until: collect(&|s| po[s][3]),
        repeated: collect(&|s| po[s][4]),
        persistence: collect(&|s| po[s][5]),
        ne_eventually: collect(&|s| ne[s][0]),
        ne_always: collect(&|s| ne[s][1]),
        ne_repeated: collect(&|s| ne[s][2]),
        ne_persistence: collect(&|s| ne[s][3]),
    }
}

// ---------------------------------------------------------------------------
// Automaton-side reference evaluators
// ---------------------------------------------------------------------------

/// Cached `delta(q, L(s), q')` rows for every model state.
pub struct DeltaTable {
    k: usize,
    rows: Vec<FuzzyVector>,
}

impl DeltaTable {
    pub fn new(model: &Gpks, automaton: &FuzzyAutomaton) -> DeltaTable {
        let k = automaton.state_count();
        let mut rows = Vec::with_capacity(model.state_count() * k);
        for s in 0..model.state_count() {
            let letter = model.letter_of(s);
            for q in 0..k {
                rows.push(automaton.delta_row(q, &letter));
            }
        }
        DeltaTable { k, rows }
    }

    pub fn row(&self, model_state: usize, q: usize) -> &FuzzyVector {
        &self.rows[model_state * self.k + q]
    }
}

/// Safety value of one lasso: the inf over all nonempty trace prefixes of
/// the automaton's finite-word acceptance, computed by forward max-min
/// propagation with exact cycle detection on the reached vector.
pub fn prefix_inf_accept(
    automaton: &FuzzyAutomaton,
    table: &DeltaTable,
    lasso: &LassoPath,
) -> Poss {
    let k = automaton.state_count();
    let step = |v: &Vec<Poss>, model_state: usize| -> Vec<Poss> {
        let mut next = vec![Poss::ZERO; k];
        for (q, &reach) in v.iter().enumerate() {
            if reach.is_zero() {
                continue;
            }
            let row = table.row(model_state, q);
            for (q2, slot) in next.iter_mut().enumerate() {
                let value = reach.min(row.get(q2));
                if value > *slot {
                    *slot = value;
                }
            }
        }
        next
    };
    let accept = |v: &Vec<Poss>| {
        v.iter()
            .enumerate()
            .map(|(q, &x)| x.min(automaton.accepting().get(q)))
            .max()
            .unwrap_or(Poss::ZERO)
    };

    let mut v: Vec<Poss> = automaton.initial().iter().collect();
    let mut inf = Poss::ONE;
    for &s in &lasso.prefix {
        v = step(&v, s);
        inf = inf.min(accept(&v));
    }
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    loop {
        let key: Vec<u32> = v.iter().map(|p| p.micros()).collect();
        if !seen.insert(key) {
            return inf;
        }
        for &s in &lasso.cycle {
            v = step(&v, s);
            inf = inf.min(accept(&v));
        }
    }
}

/// Büchi acceptance by exhaustive search over simple run lassos in the
/// `(state, word position)` graph: for every candidate accepting node, the
/// best simple path to it joined with the best simple cycle through it.
pub fn brute_omega(automaton: &FuzzyAutomaton, word: &UltimatelyPeriodicWord) -> Poss {
    let k = automaton.state_count();
    let pre = word.prefix().len();
    let per = word.period().len();
    let positions = pre + per;
    let next_pos = |pos: usize| if pos + 1 < positions { pos + 1 } else { pre };
    let mut rows = Vec::with_capacity(positions * k);
    for pos in 0..positions {
        for q in 0..k {
            rows.push(automaton.delta_row(q, word.letter(pos)));
        }
    }
    let edge = |q: usize, pos: usize, q2: usize| rows[pos * k + q].get(q2);
    let node_count = k * positions;
    let node = |q: usize, pos: usize| pos * k + q;

    // Best max-min value over simple paths from `from` to `to` of length >= 1.
    fn best_path(
        from: usize,
        to: usize,
        k: usize,
        next_pos: &dyn Fn(usize) -> usize,
        edge: &dyn Fn(usize, usize, usize) -> Poss,
        node_count: usize,
    ) -> Poss {
        #[allow(clippy::too_many_arguments)]
        fn dfs(
            current: usize,
            to: usize,
            value: Poss,
            on_path: &mut Vec<bool>,
            best: &mut Poss,
            k: usize,
            next_pos: &dyn Fn(usize) -> usize,
            edge: &dyn Fn(usize, usize, usize) -> Poss,
        ) {
            if value <= *best {
                return;
            }
            let (pos, q) = (current / k, current % k);
            let target_pos = next_pos(pos);
            for q2 in 0..k {
                let weight = edge(q, pos, q2);
                if weight.is_zero() {
                    continue;
                }
                let succ = target_pos * k + q2;
                let reached = value.min(weight);
                if succ == to {
                    *best = (*best).max(reached);
                    continue;
                }
                if !on_path[succ] {
                    on_path[succ] = true;
                    dfs(succ, to, reached, on_path, best, k, next_pos, edge);
                    on_path[succ] = false;
                }
            }
        }
        let mut best = Poss::ZERO;
        let mut on_path = vec![false; node_count];
        on_path[from] = true;
        dfs(from, to, Poss::ONE, &mut on_path, &mut best, k, next_pos, edge);
        best
    }

    let mut best = Poss::ZERO;
    for target_q in 0..k {
        let accepting = automaton.accepting().get(target_q);
        if accepting.is_zero() {
            continue;
        }
        for target_pos in pre..positions {
            let u = node(target_q, target_pos);
            let cycle = best_path(u, u, k, &next_pos, &edge, node_count);
            if cycle.is_zero() {
                continue;
            }
            for q0 in 0..k {
                let start_value = automaton.initial().get(q0);
                if start_value.is_zero() {
                    continue;
                }
                let reach = if node(q0, 0) == u {
                    Poss::ONE
                } else {
                    best_path(node(q0, 0), u, k, &next_pos, &edge, node_count)
                };
                best = best.max(start_value.min(reach).min(cycle).min(accepting));
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Random automata
// ---------------------------------------------------------------------------

/// A guard matched by exactly one letter: the conjunction of `ap == value`
/// over every proposition.
fn letter_exact_guard(ap: &[String], letter: &Letter) -> Guard {
    let mut guard: Option<Guard> = None;
    for name in ap {
        let clause = Guard::Cmp(name.clone(), CmpOp::Eq, letter.get(name));
        guard = Some(match guard {
            None => clause,
            Some(g) => Guard::And(Box::new(g), Box::new(clause)),
        });
    }
    guard.unwrap_or(Guard::Any)
}

/// A deterministic automaton over the model's letters: for every state and
/// every distinct model letter, exactly one value-1 transition.
pub fn random_deterministic_automaton(
    rng: &mut SmallRng,
    model: &Gpks,
    states: usize,
    mode: AcceptanceMode,
) -> FuzzyAutomaton {
    let distinct: BTreeSet<Letter> = model.letters().into_iter().collect();
    let mut transitions = Vec::new();
    for q in 0..states {
        for letter in &distinct {
            transitions.push(GuardedTransition {
                from: q,
                to: rng.random_range(0..states),
                guard: letter_exact_guard(model.ap(), letter),
                value: Poss::ONE,
            });
        }
    }
    let start = rng.random_range(0..states);
    let initial = FuzzyVector::from_fn(states, |q| {
        if q == start {
            Poss::ONE
        } else {
            Poss::ZERO
        }
    });
    let accepting = FuzzyVector::from_fn(states, |_| random_degree(rng));
    FuzzyAutomaton::new(
        (0..states).map(|q| format!("q{q}")).collect(),
        model.ap().to_vec(),
        mode,
        initial,
        accepting,
        transitions,
        vec![],
    )
}

/// A random guard over the model's propositions.
fn random_guard(rng: &mut SmallRng, ap: &[String]) -> Guard {
    let name = ap[rng.random_range(0..ap.len())].clone();
    match rng.random_range(0..5) {
        0 => Guard::Any,
        1 => Guard::Atom(name),
        2 => Guard::Not(Box::new(Guard::Atom(name))),
        3 => Guard::Cmp(name, CmpOp::Ge, random_positive_degree(rng)),
        _ => Guard::Cmp(name, CmpOp::Le, random_degree(rng)),
    }
}

/// A random (usually nondeterministic) Büchi automaton.
pub fn random_buchi(rng: &mut SmallRng, ap: &[String], states: usize) -> FuzzyAutomaton {
    let mut transitions = Vec::new();
    for q in 0..states {
        for _ in 0..rng.random_range(1..=3usize) {
            transitions.push(GuardedTransition {
                from: q,
                to: rng.random_range(0..states),
                guard: random_guard(rng, ap),
                value: random_positive_degree(rng),
            });
        }
    }
    let start = rng.random_range(0..states);
    let initial = FuzzyVector::from_fn(states, |q| {
        if q == start {
            Poss::ONE
        } else if rng.random_bool(0.3) {
            random_positive_degree(rng)
        } else {
            Poss::ZERO
        }
    });
    let accepting = FuzzyVector::from_fn(states, |_| random_degree(rng));
    FuzzyAutomaton::new(
        (0..states).map(|q| format!("q{q}")).collect(),
        ap.to_vec(),
        AcceptanceMode::Buchi,
        initial,
        accepting,
        transitions,
        vec![],
    )
}

// ---------------------------------------------------------------------------
// Reference evaluator for formulas over ultimately periodic words
// ---------------------------------------------------------------------------

/// Evaluates a formula by explicit enumeration of shift positions, memoized
/// on wrapped positions. Sups and infs without a constraint prefix range
/// over one wrap of positions exactly; the until sup is truncated at a
/// value-count horizon and re-checked one period later, so any unsound
/// truncation would be caught.
pub fn unrolled_eval(phi: &Formula, w: &UltimatelyPeriodicWord) -> Poss {
    let pre = w.prefix().len();
    let per = w.period().len();
    let mut values: BTreeSet<Poss> = [Poss::ZERO, Poss::ONE].into();
    for letter in w.prefix().iter().chain(w.period()) {
        values.extend(letter.iter().map(|(_, v)| v));
    }
    let horizon = (pre + per) * (values.len() + 2);
    let mut memo = BTreeMap::new();
    eval_at(phi, w, 0, horizon, &mut memo)
}

type Memo = BTreeMap<(usize, usize), Poss>;

fn wrap(pos: usize, pre: usize, per: usize) -> usize {
    if pos < pre {
        pos
    } else {
        pre + (pos - pre) % per
    }
}

fn eval_at(
    phi: &Formula,
    w: &UltimatelyPeriodicWord,
    pos: usize,
    horizon: usize,
    memo: &mut Memo,
) -> Poss {
    let pre = w.prefix().len();
    let per = w.period().len();
    let pos = wrap(pos, pre, per);
    let key = (phi as *const Formula as usize, pos);
    if let Some(&hit) = memo.get(&key) {
        return hit;
    }
    let span = pre + per;
    let value = match phi {
        Formula::True => Poss::ONE,
        Formula::Atom(a) => w.letter(pos).get(a),
        Formula::Not(p) => eval_at(p, w, pos, horizon, memo).complement(),
        Formula::And(l, r) => {
            eval_at(l, w, pos, horizon, memo).min(eval_at(r, w, pos, horizon, memo))
        }
        Formula::Or(l, r) => {
            eval_at(l, w, pos, horizon, memo).max(eval_at(r, w, pos, horizon, memo))
        }
        Formula::Implies(l, r) => {
            eval_at(l, w, pos, horizon, memo).implies(eval_at(r, w, pos, horizon, memo))
        }
        Formula::Next(p) => eval_at(p, w, pos + 1, horizon, memo),
        Formula::Eventually(p) => (0..span)
            .map(|j| eval_at(p, w, pos + j, horizon, memo))
            .max()
            .unwrap(),
        Formula::Always(p) => (0..span)
            .map(|j| eval_at(p, w, pos + j, horizon, memo))
            .min()
            .unwrap(),
        Formula::Until(l, r) => {
            let truncated = until_sup(l, r, w, pos, horizon, memo);
            let extended = until_sup(l, r, w, pos, horizon + per, memo);
            assert_eq!(truncated, extended, "until truncation horizon too small");
            truncated
        }
        Formula::BoundedUntil(l, r, n) => {
            bounded_until_sup(Some(l), r, w, pos, *n, horizon, memo)
        }
        Formula::BoundedEventually(p, n) => bounded_until_sup(None, p, w, pos, *n, horizon, memo),
    };
    memo.insert(key, value);
    value
}

fn until_sup(
    l: &Formula,
    r: &Formula,
    w: &UltimatelyPeriodicWord,
    pos: usize,
    horizon: usize,
    memo: &mut Memo,
) -> Poss {
    let mut best = Poss::ZERO;
    let mut conj = Poss::ONE;
    for j in 0..=horizon {
        best = best.max(conj.min(eval_at(r, w, pos + j, horizon, memo)));
        conj = conj.min(eval_at(l, w, pos + j, horizon, memo));
        if conj.is_zero() {
            break;
        }
    }
    best
}

fn bounded_until_sup(
    l: Option<&Formula>,
    r: &Formula,
    w: &UltimatelyPeriodicWord,
    pos: usize,
    n: u32,
    horizon: usize,
    memo: &mut Memo,
) -> Poss {
    let mut best = Poss::ZERO;
    let mut conj = Poss::ONE;
    for j in 0..=n as usize {
        best = best.max(conj.min(eval_at(r, w, pos + j, horizon, memo)));
        if let Some(l) = l {
            conj = conj.min(eval_at(l, w, pos + j, horizon, memo));
        }
        if conj.is_zero() {
            break;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Random formulas, words and lassos
// ---------------------------------------------------------------------------

pub fn random_formula(rng: &mut SmallRng, depth: u32) -> Formula {
    let atom = |rng: &mut SmallRng| {
        Formula::Atom(if rng.random_bool(0.5) { "a" } else { "b" }.to_string())
    };
    if depth == 0 {
        return match rng.random_range(0..3) {
            0 => Formula::True,
            _ => atom(rng),
        };
    }
    let sub = |rng: &mut SmallRng| Box::new(random_formula(rng, depth - 1));
    match rng.random_range(0..10) {
        0 => Formula::Not(sub(rng)),
        1 => Formula::And(sub(rng), sub(rng)),
        2 => Formula::Or(sub(rng), sub(rng)),
        3 => Formula::Implies(sub(rng), sub(rng)),
        4 => Formula::Next(sub(rng)),
        5 => Formula::Until(sub(rng), sub(rng)),
        6 => Formula::BoundedUntil(sub(rng), sub(rng), rng.random_range(0..4)),
        7 => Formula::Eventually(sub(rng)),
        8 => Formula::BoundedEventually(sub(rng), rng.random_range(0..6)),
        _ => Formula::Always(sub(rng)),
    }
}

pub fn random_letter(rng: &mut SmallRng) -> Letter {
    let mut map = BTreeMap::new();
    map.insert("a".to_string(), random_degree(rng));
    map.insert("b".to_string(), random_degree(rng));
    Letter::new(map)
}

pub fn random_word(rng: &mut SmallRng) -> UltimatelyPeriodicWord {
    let prefix = (0..rng.random_range(0..3)).map(|_| random_letter(rng)).collect();
    let period = (0..rng.random_range(1..=3)).map(|_| random_letter(rng)).collect();
    UltimatelyPeriodicWord::new(prefix, period)
}

/// A random positive-transition lasso of the model, as a random walk that
/// closes on its first revisited state.
pub fn random_lasso(rng: &mut SmallRng, model: &Gpks) -> LassoPath {
    let n = model.state_count();
    let mut walk = vec![rng.random_range(0..n)];
    loop {
        let here = *walk.last().unwrap();
        let successors: Vec<usize> = (0..n)
            .filter(|&t| !model.trans().get(here, t).is_zero())
            .collect();
        let next = successors[rng.random_range(0..successors.len())];
        if let Some(at) = walk.iter().position(|&s| s == next) {
            let cycle = walk.split_off(at);
            return LassoPath::new(walk, cycle);
        }
        walk.push(next);
    }
}
