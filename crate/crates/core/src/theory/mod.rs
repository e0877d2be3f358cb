//! Equational theories over effectful signatures.
//!
//! A rule applies inside a diagram when its side appears as a contiguous
//! window of some exchange-equivalent arrangement, with every wire shifted by
//! the same amount. The exchanges needed to reach that arrangement form the
//! occurrence's prelude, so crossings are explicit and bounded.

mod search;
mod state;

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{
    apply_step, legal_steps, same_signature, Diagram, DiagramError, ExchangeStep, Node, Slice,
};
use crate::signature::{show_interface, EffectfulSignature};

pub use state::{global_state_theory, race_condition_cases, race_condition_theory, RaceCase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("rule `{rule}` relates {} -> {} to {} -> {}", show_interface(&.lhs.0), show_interface(&.lhs.1), show_interface(&.rhs.0), show_interface(&.rhs.1))]
    RuleBoundaryMismatch {
        rule: String,
        lhs: (crate::Interface, crate::Interface),
        rhs: (crate::Interface, crate::Interface),
    },
    #[error("rule `{0}` is over another signature")]
    RuleSignatureMismatch(String),
    #[error("duplicate rule name `{0}`")]
    DuplicateRule(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("occurrence of `{0}` does not replay on this diagram")]
    StaleOccurrence(String),
    #[error("search limits exceeded after exploring {states_explored} states")]
    LimitExceeded { states_explored: usize },
}

/// Which way a rule is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Replace the left-hand side by the right-hand side.
    Forward,
    /// Replace the right-hand side by the left-hand side.
    Backward,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Backward];

    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

/// An equation between two diagrams with the same boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub name: String,
    pub lhs: Diagram,
    pub rhs: Diagram,
}

impl RewriteRule {
    pub fn new(name: impl Into<String>, lhs: Diagram, rhs: Diagram) -> Self {
        RewriteRule {
            name: name.into(),
            lhs,
            rhs,
        }
    }

    /// The side matched and the side substituted when used in `dir`.
    pub fn sides(&self, dir: Direction) -> (&Diagram, &Diagram) {
        match dir {
            Direction::Forward => (&self.lhs, &self.rhs),
            Direction::Backward => (&self.rhs, &self.lhs),
        }
    }

    fn check(&self, sig: &Arc<EffectfulSignature>) -> Result<(), TheoryError> {
        if !same_signature(self.lhs.sig(), sig) || !same_signature(self.rhs.sig(), sig) {
            return Err(TheoryError::RuleSignatureMismatch(self.name.clone()));
        }
        if self.lhs.dom() != self.rhs.dom() || self.lhs.cod() != self.rhs.cod() {
            return Err(TheoryError::RuleBoundaryMismatch {
                rule: self.name.clone(),
                lhs: (self.lhs.dom().clone(), self.lhs.cod().clone()),
                rhs: (self.rhs.dom().clone(), self.rhs.cod().clone()),
            });
        }
        Ok(())
    }
}

/// A signature and a list of rules, each usable in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    sig: Arc<EffectfulSignature>,
    rules: Vec<RewriteRule>,
}

impl Theory {
    pub fn new(sig: Arc<EffectfulSignature>, rules: Vec<RewriteRule>) -> Result<Theory, TheoryError> {
        let mut theory = Theory {
            sig,
            rules: Vec::with_capacity(rules.len()),
        };
        for rule in rules {
            theory.push(rule)?;
        }
        Ok(theory)
    }

    pub fn push(&mut self, rule: RewriteRule) -> Result<(), TheoryError> {
        rule.check(&self.sig)?;
        if self.rule(&rule.name).is_some() {
            return Err(TheoryError::DuplicateRule(rule.name));
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn sig(&self) -> &Arc<EffectfulSignature> {
        &self.sig
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn rule(&self, name: &str) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.name == name)
    }
}

/// Where a rule side sits in a diagram: after applying `prelude`, slices
/// `[start, start + len)` are the side's slices shifted right by `shift`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Occurrence {
    pub prelude: Vec<ExchangeStep>,
    pub start: usize,
    pub shift: usize,
}

impl Occurrence {
    fn order_key(&self) -> (usize, usize, usize) {
        (self.prelude.len(), self.start, self.shift)
    }
}

/// Arrangements of a diagram reachable within an exchange budget.
pub(crate) struct Arrangements {
    /// Breadth-first order; the first entry is the diagram itself.
    pub items: Vec<(Vec<Node>, Vec<ExchangeStep>)>,
    /// Whether some arrangement lies just beyond the budget.
    pub truncated: bool,
}

pub(crate) fn arrangements(d: &Diagram, budget: usize) -> Arrangements {
    let start = d.nodes();
    let key = |nodes: &[Node]| -> Vec<Slice> { nodes.iter().map(|n| n.slice.clone()).collect() };
    let mut seen: HashSet<Vec<Slice>> = HashSet::from([key(&start)]);
    let mut items = vec![(start, Vec::new())];
    let mut queue = VecDeque::from([0]);
    let mut truncated = false;
    while let Some(i) = queue.pop_front() {
        let at_budget = items[i].1.len() >= budget;
        for step in legal_steps(&items[i].0) {
            let mut nodes = items[i].0.clone();
            apply_step(&mut nodes, step);
            let k = key(&nodes);
            if seen.contains(&k) {
                continue;
            }
            if at_budget {
                truncated = true;
                break;
            }
            seen.insert(k);
            let mut prelude = items[i].1.clone();
            prelude.push(step);
            items.push((nodes, prelude));
            queue.push_back(items.len() - 1);
        }
    }
    Arrangements { items, truncated }
}

/// Shifts at which `pattern` sits as the window starting at `start` of `nodes`.
fn window_shift(pattern: &Diagram, nodes: &[Node], start: usize) -> Option<usize> {
    let p = pattern.slices();
    let window = nodes.get(start..start + p.len())?;
    let shift = window[0].slice.offset.checked_sub(p[0].offset)?;
    window
        .iter()
        .zip(p)
        .all(|(n, s)| n.slice.gen == s.gen && n.slice.offset == s.offset + shift)
        .then_some(shift)
}

fn boundary_fits(pattern: &Diagram, word: &[crate::SortId], shift: usize) -> bool {
    let dom = pattern.dom();
    word.get(shift..shift + dom.len()) == Some(&dom[..])
}

/// Occurrences of `pattern` in `d` with the index of the arrangement they sit
/// in, unordered and possibly redundant.
pub(crate) fn raw_matches(pattern: &Diagram, d: &Diagram, arr: &Arrangements) -> Vec<(usize, Occurrence)> {
    let mut out = Vec::new();
    if pattern.is_empty() {
        // Inserting at some level of `d` itself: other arrangements only
        // repeat these up to exchange.
        for (start, word) in d.levels().iter().enumerate() {
            for shift in 0..=word.len() {
                if boundary_fits(pattern, word, shift) {
                    let occ = Occurrence {
                        prelude: Vec::new(),
                        start,
                        shift,
                    };
                    out.push((0, occ));
                }
            }
        }
        return out;
    }
    let sig = d.sig();
    for (index, (nodes, prelude)) in arr.items.iter().enumerate() {
        let mut levels = None;
        for start in 0..nodes.len() {
            let Some(shift) = window_shift(pattern, nodes, start) else {
                continue;
            };
            let levels = levels.get_or_insert_with(|| {
                let slices: Vec<Slice> = nodes.iter().map(|n| n.slice.clone()).collect();
                crate::diagram::replay_levels(sig, d.dom(), &slices).expect("exchanges preserve typing")
            });
            if boundary_fits(pattern, &levels[start], shift) {
                let occ = Occurrence {
                    prelude: prelude.clone(),
                    start,
                    shift,
                };
                out.push((index, occ));
            }
        }
    }
    out
}

/// Replaces the window of `occ` in the arrangement `nodes` by `replacement`.
fn splice(d: &Diagram, nodes: &[Node], occ: &Occurrence, len: usize, replacement: &Diagram) -> Diagram {
    let slices: Vec<Slice> = nodes[..occ.start]
        .iter()
        .map(|n| n.slice.clone())
        .chain(replacement.slices().iter().map(|s| Slice {
            gen: Arc::clone(&s.gen),
            offset: s.offset + occ.shift,
        }))
        .chain(nodes[occ.start + len..].iter().map(|n| n.slice.clone()))
        .collect();
    Diagram::from_parts_unchecked(Arc::clone(d.sig()), d.dom().clone(), d.cod().clone(), slices)
}

/// Every way to apply `rule` in direction `dir` to `d` within `budget`
/// exchanges, deduplicated by result and ordered by prelude length, window
/// start and shift.
pub fn find_matches(rule: &RewriteRule, d: &Diagram, dir: Direction, budget: usize) -> Vec<Occurrence> {
    find_matches_in(rule, d, dir, budget)
        .into_iter()
        .map(|(occ, _, _)| occ)
        .collect()
}

/// [`find_matches`] together with each result and its normal form.
pub(crate) fn find_matches_in(
    rule: &RewriteRule,
    d: &Diagram,
    dir: Direction,
    budget: usize,
) -> Vec<(Occurrence, Diagram, Vec<Slice>)> {
    if !same_signature(rule.lhs.sig(), d.sig()) {
        return Vec::new();
    }
    applications(rule, dir, d, &arrangements(d, budget))
}

/// Occurrences of `rule` in `dir` with their results and result normal forms,
/// in occurrence order, one per distinct result.
pub(crate) fn applications(
    rule: &RewriteRule,
    dir: Direction,
    d: &Diagram,
    arr: &Arrangements,
) -> Vec<(Occurrence, Diagram, Vec<Slice>)> {
    let (from, to) = rule.sides(dir);
    if from.is_empty() && to.is_empty() {
        return Vec::new();
    }
    let mut occs = raw_matches(from, d, arr);
    occs.sort_by_key(|(_, o)| o.order_key());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (index, occ) in occs {
        let result = splice(d, &arr.items[index].0, &occ, from.len(), to);
        let key = result.normal_form().slices().to_vec();
        if seen.insert(key.clone()) {
            out.push((occ, result, key));
        }
    }
    out
}

/// Applies `rule` in direction `dir` at `occ`.
pub fn rewrite(
    rule: &RewriteRule,
    d: &Diagram,
    occ: &Occurrence,
    dir: Direction,
) -> Result<Diagram, TheoryError> {
    let stale = || TheoryError::StaleOccurrence(rule.name.clone());
    if !same_signature(rule.lhs.sig(), d.sig()) {
        return Err(DiagramError::SignatureMismatch.into());
    }
    let (from, to) = rule.sides(dir);
    let arranged = d.exchange_all(&occ.prelude).map_err(|_| stale())?;
    let nodes = arranged.nodes();
    let fits = if from.is_empty() {
        occ.start <= nodes.len()
    } else {
        window_shift(from, &nodes, occ.start) == Some(occ.shift)
    };
    if !fits || !boundary_fits(from, &arranged.levels()[occ.start], occ.shift) {
        return Err(stale());
    }
    Ok(splice(d, &nodes, occ, from.len(), to))
}

/// Bounds for [`Theory::prove_equal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Distinct diagrams (up to exchange) visited over both directions.
    pub max_states: usize,
    /// Exchanges allowed before a rule application.
    pub max_prelude: usize,
    /// Threads used to expand frontiers; the result does not depend on it.
    pub workers: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_states: 100_000,
            max_prelude: 8,
            workers: 1,
        }
    }
}

/// One rule application in a proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStep {
    pub rule: String,
    pub direction: Direction,
    pub prelude: Vec<ExchangeStep>,
    pub start: usize,
    pub shift: usize,
}

impl ProofStep {
    pub fn occurrence(&self) -> Occurrence {
        Occurrence {
            prelude: self.prelude.clone(),
            start: self.start,
            shift: self.shift,
        }
    }
}

/// A sequence of rule applications, each preceded by its exchanges.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub steps: Vec<ProofStep>,
}

impl ProofTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Applies every step to `source`, returning the final diagram.
    pub fn replay(&self, theory: &Theory, source: &Diagram) -> Result<Diagram, TheoryError> {
        let mut d = source.clone();
        for step in &self.steps {
            let rule = theory
                .rule(&step.rule)
                .ok_or_else(|| TheoryError::UnknownRule(step.rule.clone()))?;
            d = rewrite(rule, &d, &step.occurrence(), step.direction)?;
        }
        Ok(d)
    }
}

impl fmt::Display for ProofTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return writeln!(f, "(equal up to exchange, no rule needed)");
        }
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                f,
                "{}. {} {} at slice {}, shift {} after {} exchange{}",
                i + 1,
                s.rule,
                s.direction,
                s.start,
                s.shift,
                s.prelude.len(),
                if s.prelude.len() == 1 { "" } else { "s" }
            )?;
        }
        Ok(())
    }
}

/// Result of a completed search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofOutcome {
    Proven(ProofTrace),
    /// Both search spaces were exhausted without meeting.
    NotFound {
        states_explored: usize,
    },
}
