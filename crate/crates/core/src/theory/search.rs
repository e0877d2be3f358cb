//! Bidirectional breadth-first proof search over diagrams up to exchange.
//!
//! States are keyed by normal form. Layers are expanded in full, one side at
//! a time (the smaller frontier first), and successors are merged in frontier
//! order, so the trace found depends only on the inputs and limits. Worker
//! threads only compute successor lists.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{
    applications, arrangements, find_matches_in, Direction, Occurrence, ProofOutcome, ProofStep, ProofTrace,
    SearchLimits, Theory, TheoryError,
};
use crate::diagram::{same_signature, Diagram, DiagramError, Slice};

/// Frontier states expanded between two checks of the state limit.
const CHUNK: usize = 64;

struct Successor {
    key: Vec<Slice>,
    rep: Diagram,
    rule: usize,
    dir: Direction,
}

struct State {
    /// A diagram reached by replaying rules from this side's root.
    rep: Diagram,
    /// Predecessor on the same side and the rule that led here from it.
    parent: Option<(usize, usize, Direction)>,
    depth: usize,
}

struct Side {
    states: Vec<State>,
    frontier: Vec<usize>,
}

/// One rule application in search orientation, from `source` to `target`.
struct Edge {
    rule: usize,
    dir: Direction,
    /// A diagram equal up to exchange to the step's source on which the
    /// application is known to exist.
    source: Diagram,
    target: Vec<Slice>,
}

fn successors(theory: &Theory, d: &Diagram, max_prelude: usize) -> (Vec<Successor>, bool) {
    let arr = arrangements(d, max_prelude);
    let mut out = Vec::new();
    for (rule_index, rule) in theory.rules().iter().enumerate() {
        for dir in Direction::BOTH {
            for (_, rep, key) in applications(rule, dir, d, &arr) {
                out.push(Successor {
                    key,
                    rep,
                    rule: rule_index,
                    dir,
                });
            }
        }
    }
    (out, arr.truncated)
}

/// Exchanges turning `from` into `to`, which must share a normal form.
fn exchange_path(from: &Diagram, to: &Diagram) -> Vec<crate::ExchangeStep> {
    let (nf_from, mut steps) = from.normal_form_with_witness();
    let (nf_to, back) = to.normal_form_with_witness();
    debug_assert_eq!(nf_from, nf_to);
    steps.extend(back.into_iter().rev().map(|s| s.inverse()));
    steps
}

impl Theory {
    /// Searches for a chain of rule applications from `d1` to `d2`.
    ///
    /// Returns the shortest chain found within `limits`; `NotFound` when both
    /// sides ran out of states without hitting a limit, and `LimitExceeded`
    /// when the state budget was exhausted or a match may lie beyond the
    /// prelude budget.
    pub fn prove_equal(
        &self,
        d1: &Diagram,
        d2: &Diagram,
        limits: &SearchLimits,
    ) -> Result<ProofOutcome, TheoryError> {
        if !same_signature(d1.sig(), self.sig()) || !same_signature(d2.sig(), self.sig()) {
            return Err(DiagramError::SignatureMismatch.into());
        }
        if d1.dom() != d2.dom() || d1.cod() != d2.cod() {
            return Err(DiagramError::BoundaryMismatch {
                left: d1.dom().iter().chain(d1.cod()).cloned().collect(),
                right: d2.dom().iter().chain(d2.cod()).cloned().collect(),
            }
            .into());
        }
        let pool = (limits.workers > 1)
            .then(|| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(limits.workers)
                    .build()
            })
            .transpose()
            .ok()
            .flatten();
        let mut keys: HashMap<Vec<Slice>, (usize, usize)> = HashMap::new();
        let mut sides = [d1, d2].map(|d| Side {
            states: vec![State {
                rep: d.clone(),
                parent: None,
                depth: 0,
            }],
            frontier: vec![0],
        });
        let k1 = d1.normal_form().slices().to_vec();
        let k2 = d2.normal_form().slices().to_vec();
        if k1 == k2 {
            return Ok(ProofOutcome::Proven(ProofTrace::default()));
        }
        keys.insert(k1, (0, 0));
        keys.insert(k2, (1, 0));
        let mut truncated = false;
        loop {
            let s = if sides[0].frontier.len() <= sides[1].frontier.len() {
                0
            } else {
                1
            };
            if sides[s].frontier.is_empty() {
                return if truncated {
                    Err(TheoryError::LimitExceeded {
                        states_explored: keys.len(),
                    })
                } else {
                    Ok(ProofOutcome::NotFound {
                        states_explored: keys.len(),
                    })
                };
            }
            let frontier = std::mem::take(&mut sides[s].frontier);
            let mut next = Vec::new();
            // (other-side depth, parent, successor) of the best meeting so far.
            let mut meet: Option<(usize, usize, Successor, usize)> = None;
            let mut over_limit = false;
            for chunk in frontier.chunks(CHUNK) {
                let expand = |&id: &usize| successors(self, &sides[s].states[id].rep, limits.max_prelude);
                let expanded: Vec<(Vec<Successor>, bool)> = match &pool {
                    Some(pool) => pool.install(|| chunk.par_iter().map(expand).collect()),
                    None => chunk.iter().map(expand).collect(),
                };
                for (&parent, (succs, cut)) in chunk.iter().zip(expanded) {
                    truncated |= cut;
                    for succ in succs {
                        match keys.get(&succ.key) {
                            Some(&(side, _)) if side == s => {}
                            Some(&(_, other)) => {
                                let depth = sides[1 - s].states[other].depth;
                                if meet.as_ref().is_none_or(|m| depth < m.0) {
                                    meet = Some((depth, parent, succ, other));
                                }
                            }
                            None => {
                                if keys.len() >= limits.max_states {
                                    over_limit = true;
                                    continue;
                                }
                                let depth = sides[s].states[parent].depth + 1;
                                sides[s].states.push(State {
                                    rep: succ.rep,
                                    parent: Some((parent, succ.rule, succ.dir)),
                                    depth,
                                });
                                let id = sides[s].states.len() - 1;
                                keys.insert(succ.key, (s, id));
                                next.push(id);
                            }
                        }
                    }
                }
                if over_limit {
                    break;
                }
            }
            if let Some((_, parent, succ, other)) = meet {
                let edges = self.path(&sides, &keys, s, parent, succ, other);
                return Ok(ProofOutcome::Proven(self.reconstruct(d1, edges, limits)?));
            }
            if over_limit {
                return Err(TheoryError::LimitExceeded {
                    states_explored: keys.len(),
                });
            }
            sides[s].frontier = next;
        }
    }

    /// The edges from the root of side 0 to the root of side 1 through a meeting.
    fn path(
        &self,
        sides: &[Side; 2],
        keys: &HashMap<Vec<Slice>, (usize, usize)>,
        s: usize,
        parent: usize,
        succ: Successor,
        other: usize,
    ) -> Vec<Edge> {
        let key_of = |side: usize, id: usize| -> Vec<Slice> {
            keys.iter()
                .find(|(_, &v)| v == (side, id))
                .map(|(k, _)| k.clone())
                .expect("every state is keyed")
        };
        // Walks from a state back to its root, yielding search-oriented edges.
        let chain = |side: usize, mut id: usize| -> Vec<(usize, usize, usize, Direction)> {
            let mut out = Vec::new();
            while let Some((p, rule, dir)) = sides[side].states[id].parent {
                out.push((p, id, rule, dir));
                id = p;
            }
            out
        };
        let forward_edge = |p: usize, c: usize, rule: usize, dir: Direction| Edge {
            rule,
            dir,
            source: sides[0].states[p].rep.clone(),
            target: key_of(0, c),
        };
        // A backward-side edge p -> c is used from c to p in the opposite direction.
        let backward_edge = |p: usize, c: usize, rule: usize, dir: Direction| Edge {
            rule,
            dir: dir.flip(),
            source: sides[1].states[c].rep.clone(),
            target: key_of(1, p),
        };
        let (front, back, middle) = if s == 0 {
            let middle = Edge {
                rule: succ.rule,
                dir: succ.dir,
                source: sides[0].states[parent].rep.clone(),
                target: succ.key,
            };
            (parent, other, middle)
        } else {
            let middle = Edge {
                rule: succ.rule,
                dir: succ.dir.flip(),
                source: succ.rep,
                target: key_of(1, parent),
            };
            (other, parent, middle)
        };
        let mut edges: Vec<Edge> = chain(0, front)
            .into_iter()
            .rev()
            .map(|(p, c, r, d)| forward_edge(p, c, r, d))
            .collect();
        edges.push(middle);
        edges.extend(
            chain(1, back)
                .into_iter()
                .map(|(p, c, r, d)| backward_edge(p, c, r, d)),
        );
        edges
    }

    /// Turns edges between states into steps replaying from `d1` itself.
    fn reconstruct(
        &self,
        d1: &Diagram,
        edges: Vec<Edge>,
        limits: &SearchLimits,
    ) -> Result<ProofTrace, TheoryError> {
        let mut current = d1.clone();
        let mut steps = Vec::with_capacity(edges.len());
        for edge in edges {
            let rule = &self.rules()[edge.rule];
            let hit = |d: &Diagram| -> Option<(Occurrence, Diagram)> {
                find_matches_in(rule, d, edge.dir, limits.max_prelude)
                    .into_iter()
                    .find(|(_, _, key)| *key == edge.target)
                    .map(|(occ, result, _)| (occ, result))
            };
            let (occ, result) = match hit(&current) {
                Some(found) => found,
                None => {
                    let (mut occ, _) = hit(&edge.source).expect("search edges replay on their source");
                    let mut prelude = exchange_path(&current, &edge.source);
                    prelude.append(&mut occ.prelude);
                    occ.prelude = prelude;
                    let result = super::rewrite(rule, &current, &occ, edge.dir)?;
                    (occ, result)
                }
            };
            steps.push(ProofStep {
                rule: rule.name.clone(),
                direction: edge.dir,
                prelude: occ.prelude,
                start: occ.start,
                shift: occ.shift,
            });
            current = result;
        }
        Ok(ProofTrace { steps })
    }
}
