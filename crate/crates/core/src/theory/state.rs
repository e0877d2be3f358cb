//! The theory of global state and the race-condition example.

use std::sync::Arc;

use super::{RewriteRule, Theory};
use crate::diagram::{Diagram, Slice};
use crate::signature::{global_state_signature, interface, EffectfulSignature};

fn chain(sig: &Arc<EffectfulSignature>, dom: &[&str], slices: &[(&str, usize)]) -> Diagram {
    let slices = slices.iter().map(|&(g, o)| Slice::new(g, o)).collect();
    Diagram::new(sig, interface(dom.iter().copied()), slices).expect("builtin diagrams are well-typed")
}

fn rule(
    sig: &Arc<EffectfulSignature>,
    name: &str,
    dom: &[&str],
    lhs: &[(&str, usize)],
    rhs: &[(&str, usize)],
) -> RewriteRule {
    RewriteRule::new(name, chain(sig, dom, lhs), chain(sig, dom, rhs))
}

fn state_rules(sig: &Arc<EffectfulSignature>) -> Vec<RewriteRule> {
    vec![
        rule(
            sig,
            "coassoc",
            &["X"],
            &[("copy", 0), ("copy", 0)],
            &[("copy", 0), ("copy", 1)],
        ),
        rule(sig, "counit-left", &["X"], &[("copy", 0), ("discard", 0)], &[]),
        rule(sig, "counit-right", &["X"], &[("copy", 0), ("discard", 1)], &[]),
        rule(
            sig,
            "get-get",
            &[],
            &[("get", 0), ("get", 1)],
            &[("get", 0), ("copy", 0)],
        ),
        rule(sig, "get-discard", &[], &[("get", 0), ("discard", 0)], &[]),
        rule(
            sig,
            "put-put",
            &["X", "X"],
            &[("put", 0), ("put", 0)],
            &[("discard", 0), ("put", 0)],
        ),
        rule(sig, "get-put", &[], &[("get", 0), ("put", 0)], &[]),
        rule(
            sig,
            "put-get",
            &["X"],
            &[("put", 0), ("get", 0)],
            &[("copy", 0), ("put", 0)],
        ),
    ]
}

/// Comonoid laws for `copy`/`discard` and the five axioms relating them to
/// `get`/`put`: reading twice, reading and discarding, writing twice, reading
/// then writing back, and writing then reading.
pub fn global_state_theory() -> Theory {
    let sig = Arc::new(global_state_signature());
    let rules = state_rules(&sig);
    Theory::new(sig, rules).expect("builtin rules are well-typed")
}

/// Global state with two discardable processes `f, g: X -> X`.
pub fn race_condition_theory() -> Theory {
    let sig = Arc::new(global_state_signature().with_pure("f", &["X"], &["X"]).with_pure(
        "g",
        &["X"],
        &["X"],
    ));
    let mut rules = state_rules(&sig);
    rules.push(rule(
        &sig,
        "f-discard",
        &["X"],
        &[("f", 0), ("discard", 0)],
        &[("discard", 0)],
    ));
    rules.push(rule(
        &sig,
        "g-discard",
        &["X"],
        &[("g", 0), ("discard", 0)],
        &[("discard", 0)],
    ));
    Theory::new(sig, rules).expect("builtin rules are well-typed")
}

/// One possible outcome of running `f` and `g` against shared state.
#[derive(Clone, Debug)]
pub struct RaceCase {
    pub name: &'static str,
    pub description: &'static str,
    /// How the two processes were interleaved.
    pub interleaving: Diagram,
    /// What the interleaving amounts to.
    pub outcome: Diagram,
}

/// The four outcomes of a race between `f` and `g`, each paired with an
/// interleaving that produces it.
pub fn race_condition_cases() -> Vec<RaceCase> {
    let theory = race_condition_theory();
    let sig = theory.sig();
    let d = |slices: &[(&str, usize)]| chain(sig, &[], slices);
    vec![
        RaceCase {
            name: "f-only",
            description: "both read, g writes first, f overwrites: only f survives",
            interleaving: d(&[("get", 0), ("get", 1), ("g", 0), ("put", 0), ("f", 0), ("put", 0)]),
            outcome: d(&[("get", 0), ("f", 0), ("put", 0)]),
        },
        RaceCase {
            name: "g-only",
            description: "both read, f writes first, g overwrites: only g survives",
            interleaving: d(&[("get", 0), ("get", 1), ("f", 0), ("put", 0), ("g", 0), ("put", 0)]),
            outcome: d(&[("get", 0), ("g", 0), ("put", 0)]),
        },
        RaceCase {
            name: "f-then-g",
            description: "f reads and writes, then g reads and writes",
            interleaving: d(&[("get", 0), ("f", 0), ("put", 0), ("get", 0), ("g", 0), ("put", 0)]),
            outcome: d(&[("get", 0), ("f", 0), ("g", 0), ("put", 0)]),
        },
        RaceCase {
            name: "g-then-f",
            description: "g reads and writes, then f reads and writes",
            interleaving: d(&[("get", 0), ("g", 0), ("put", 0), ("get", 0), ("f", 0), ("put", 0)]),
            outcome: d(&[("get", 0), ("g", 0), ("f", 0), ("put", 0)]),
        },
    ]
}
