//! Brute-force ground truth by lasso enumeration.
//!
//! Every ultimately periodic path within the configured prefix and cycle
//! bounds is visited once; possibility is the max over lassos of
//! `min(path possibility, f(lasso))` and necessity the min of
//! `path possibility → f(lasso)`. The defaults are generous relative to the
//! witnesses the pattern optima need, and the doubling check on the CLI
//! turns that argument into something executable.

use crate::gpks::{Gpks, LassoPath};
use crate::poss::Poss;

/// Where enumeration starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleStart {
    /// All lassos beginning at this state, in the rebased model.
    State(usize),
    /// All lassos beginning at any state, weighted by the initial
    /// distribution.
    Initial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_prefix: usize,
    pub max_cycle: usize,
    pub start: OracleStart,
}

impl OracleConfig {
    /// Default bounds: prefix up to `|S|²`, cycle up to `|S|`.
    pub fn for_state(model: &Gpks, state: usize) -> OracleConfig {
        OracleConfig {
            max_prefix: model.state_count() * model.state_count(),
            max_cycle: model.state_count(),
            start: OracleStart::State(state),
        }
    }

    pub fn for_initial(model: &Gpks) -> OracleConfig {
        OracleConfig {
            max_prefix: model.state_count() * model.state_count(),
            max_cycle: model.state_count(),
            start: OracleStart::Initial,
        }
    }

    pub fn with_bounds(mut self, max_prefix: usize, max_cycle: usize) -> OracleConfig {
        self.max_prefix = max_prefix;
        self.max_cycle = max_cycle;
        self
    }

    pub fn doubled(&self) -> OracleConfig {
        OracleConfig {
            max_prefix: self.max_prefix * 2,
            max_cycle: self.max_cycle * 2,
            start: self.start.clone(),
        }
    }
}

/// Calls `visit` once for every lasso within bounds whose transitions all
/// have positive possibility. Lassos are distinct as (prefix, cycle) pairs;
/// rotations of the same cycle are distinct lassos and all visited.
pub fn for_each_lasso(
    model: &Gpks,
    cfg: &OracleConfig,
    visit: &mut impl FnMut(&LassoPath),
) {
    let starts: Vec<usize> = match cfg.start {
        OracleStart::State(s) => vec![s],
        OracleStart::Initial => (0..model.state_count())
            .filter(|&s| !model.initial().get(s).is_zero())
            .collect(),
    };
    let mut spine = Vec::with_capacity(cfg.max_prefix + 1);
    for start in starts {
        spine.push(start);
        walk_spine(model, cfg, &mut spine, visit);
        spine.pop();
    }
}

/// The spine is the prefix plus the cycle head (its last element).
fn walk_spine(
    model: &Gpks,
    cfg: &OracleConfig,
    spine: &mut Vec<usize>,
    visit: &mut impl FnMut(&LassoPath),
) {
    let head = *spine.last().unwrap();
    let prefix = &spine[..spine.len() - 1];
    let mut cycle = Vec::with_capacity(cfg.max_cycle);
    cycle.push(head);
    walk_cycle(model, cfg, prefix, head, &mut cycle, visit);

    if spine.len() - 1 < cfg.max_prefix {
        for t in 0..model.state_count() {
            if model.trans().get(head, t).is_zero() {
                continue;
            }
            spine.push(t);
            walk_spine(model, cfg, spine, visit);
            spine.pop();
        }
    }
}

fn walk_cycle(
    model: &Gpks,
    cfg: &OracleConfig,
    prefix: &[usize],
    head: usize,
    cycle: &mut Vec<usize>,
    visit: &mut impl FnMut(&LassoPath),
) {
    let last = *cycle.last().unwrap();
    if !model.trans().get(last, head).is_zero() {
        let lasso = LassoPath {
            prefix: prefix.to_vec(),
            cycle: cycle.clone(),
        };
        visit(&lasso);
    }
    if cycle.len() < cfg.max_cycle {
        for t in 0..model.state_count() {
            if model.trans().get(last, t).is_zero() {
                continue;
            }
            cycle.push(t);
            walk_cycle(model, cfg, prefix, head, cycle, visit);
            cycle.pop();
        }
    }
}

/// Convenience collector, mainly for tests and small models.
pub fn enumerate_lassos(model: &Gpks, cfg: &OracleConfig) -> Vec<LassoPath> {
    let mut out = Vec::new();
    for_each_lasso(model, cfg, &mut |lasso| out.push(lasso.clone()));
    out
}

fn effective_model(model: &Gpks, cfg: &OracleConfig) -> Gpks {
    match cfg.start {
        OracleStart::State(s) => model.rebase_initial_at(s),
        OracleStart::Initial => model.clone(),
    }
}

/// Consumer of the pruned traversal: lassos arrive with their exact path
/// possibility, and whole branches are skipped once no completion (whose
/// possibility can only be ≤ the running minimum) can change the result.
trait LassoSink<E> {
    fn interesting(&self, running: Poss) -> bool;
    fn consume(&mut self, lasso: &LassoPath, possibility: Poss) -> Result<(), E>;
}

struct PoSink<F> {
    best: Poss,
    f: F,
}

impl<F, E> LassoSink<E> for PoSink<F>
where
    F: FnMut(&LassoPath) -> Result<Poss, E>,
{
    fn interesting(&self, running: Poss) -> bool {
        // min(possibility, f) can only beat the current max if the
        // possibility itself does.
        running > self.best
    }

    fn consume(&mut self, lasso: &LassoPath, possibility: Poss) -> Result<(), E> {
        let value = (self.f)(lasso)?;
        self.best = self.best.max(possibility.min(value));
        Ok(())
    }
}

struct NeSink<F> {
    worst: Poss,
    f: F,
}

impl<F, E> LassoSink<E> for NeSink<F>
where
    F: FnMut(&LassoPath) -> Result<Poss, E>,
{
    fn interesting(&self, running: Poss) -> bool {
        // The implication value is at least 1 - possibility, so branches
        // whose complement already reaches the current min cannot lower it.
        running.complement() < self.worst
    }

    fn consume(&mut self, lasso: &LassoPath, possibility: Poss) -> Result<(), E> {
        let value = (self.f)(lasso)?;
        self.worst = self.worst.min(possibility.implies(value));
        Ok(())
    }
}

fn pruned_walk<E>(
    model: &Gpks,
    cfg: &OracleConfig,
    sink: &mut impl LassoSink<E>,
) -> Result<(), E> {
    let starts: Vec<usize> = match cfg.start {
        OracleStart::State(s) => vec![s],
        OracleStart::Initial => (0..model.state_count())
            .filter(|&s| !model.initial().get(s).is_zero())
            .collect(),
    };
    let mut spine = Vec::with_capacity(cfg.max_prefix + 1);
    for start in starts {
        let running = model.initial().get(start);
        if !sink.interesting(running) {
            continue;
        }
        spine.push(start);
        pruned_spine(model, cfg, &mut spine, running, sink)?;
        spine.pop();
    }
    Ok(())
}

fn pruned_spine<E>(
    model: &Gpks,
    cfg: &OracleConfig,
    spine: &mut Vec<usize>,
    running: Poss,
    sink: &mut impl LassoSink<E>,
) -> Result<(), E> {
    let head = *spine.last().unwrap();
    let mut cycle = Vec::with_capacity(cfg.max_cycle);
    cycle.push(head);
    pruned_cycle(model, cfg, spine, running, head, &mut cycle, sink)?;

    if spine.len() - 1 < cfg.max_prefix {
        for t in 0..model.state_count() {
            let p = model.trans().get(head, t);
            if p.is_zero() {
                continue;
            }
            let extended = running.min(p);
            if !sink.interesting(extended) {
                continue;
            }
            spine.push(t);
            pruned_spine(model, cfg, spine, extended, sink)?;
            spine.pop();
        }
    }
    Ok(())
}

fn pruned_cycle<E>(
    model: &Gpks,
    cfg: &OracleConfig,
    spine: &[usize],
    running: Poss,
    head: usize,
    cycle: &mut Vec<usize>,
    sink: &mut impl LassoSink<E>,
) -> Result<(), E> {
    let last = *cycle.last().unwrap();
    let closing = model.trans().get(last, head);
    if !closing.is_zero() {
        let possibility = running.min(closing);
        if sink.interesting(possibility) {
            let lasso = LassoPath {
                prefix: spine[..spine.len() - 1].to_vec(),
                cycle: cycle.clone(),
            };
            sink.consume(&lasso, possibility)?;
        }
    }
    if cycle.len() < cfg.max_cycle {
        for t in 0..model.state_count() {
            let p = model.trans().get(last, t);
            if p.is_zero() {
                continue;
            }
            let extended = running.min(p);
            if !sink.interesting(extended) {
                continue;
            }
            cycle.push(t);
            pruned_cycle(model, cfg, spine, extended, head, cycle, sink)?;
            cycle.pop();
        }
    }
    Ok(())
}

/// `max` over enumerated lassos of `min(path possibility, f(lasso))`.
pub fn oracle_po<E>(
    model: &Gpks,
    cfg: &OracleConfig,
    f: impl FnMut(&LassoPath) -> Result<Poss, E>,
) -> Result<Poss, E> {
    let based = effective_model(model, cfg);
    let mut sink = PoSink {
        best: Poss::ZERO,
        f,
    };
    pruned_walk(&based, cfg, &mut sink)?;
    Ok(sink.best)
}

/// `min` over enumerated lassos of `path possibility → f(lasso)`.
pub fn oracle_ne<E>(
    model: &Gpks,
    cfg: &OracleConfig,
    f: impl FnMut(&LassoPath) -> Result<Poss, E>,
) -> Result<Poss, E> {
    let based = effective_model(model, cfg);
    let mut sink = NeSink {
        worst: Poss::ONE,
        f,
    };
    pruned_walk(&based, cfg, &mut sink)?;
    Ok(sink.worst)
}
