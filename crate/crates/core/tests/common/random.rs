//! Well-typed diagram generation, random and exhaustive.

use std::sync::Arc;

use premonoidal::runtime::{braid_over_id, braid_under_id};
use premonoidal::signature::{interface, EffectfulSignature, Interface};
use premonoidal::{Diagram, RuntimeDiagram, Slice};
use rand::seq::SliceRandom;
use rand::Rng;

/// Every `(generator, offset)` applicable to `word`, in signature order.
pub fn applicable(sig: &EffectfulSignature, word: &[premonoidal::SortId]) -> Vec<Slice> {
    let mut out = Vec::new();
    for g in sig.generators() {
        let n = g.decl.dom.len();
        if n > word.len() {
            continue;
        }
        for offset in 0..=word.len() - n {
            if word[offset..offset + n] == g.decl.dom[..] {
                out.push(Slice::new(&g.decl.id, offset));
            }
        }
    }
    out
}

fn step(sig: &EffectfulSignature, word: &[premonoidal::SortId], s: &Slice) -> Interface {
    let g = sig.generator(&s.gen).unwrap();
    word[..s.offset]
        .iter()
        .chain(&g.decl.cod)
        .chain(&word[s.offset + g.decl.dom.len()..])
        .cloned()
        .collect()
}

/// A random diagram of at most `max_len` slices whose intermediate words
/// never exceed `max_width`.
pub fn random_diagram<R: Rng>(
    rng: &mut R,
    sig: &Arc<EffectfulSignature>,
    dom: Interface,
    max_len: usize,
    max_width: usize,
) -> Diagram {
    let len = rng.gen_range(0..=max_len);
    let mut word = dom.clone();
    let mut slices = Vec::new();
    for _ in 0..len {
        let options: Vec<Slice> = applicable(sig, &word)
            .into_iter()
            .filter(|s| step(sig, &word, s).len() <= max_width)
            .collect();
        let Some(s) = options.choose(rng) else { break };
        word = step(sig, &word, s);
        slices.push(s.clone());
    }
    Diagram::new(sig, dom, slices).unwrap()
}

/// Calls `visit` on every diagram from `dom` with at most `max_len` slices.
pub fn for_each_diagram(
    sig: &Arc<EffectfulSignature>,
    dom: &Interface,
    max_len: usize,
    visit: &mut dyn FnMut(&Diagram),
) {
    fn go(
        sig: &Arc<EffectfulSignature>,
        dom: &Interface,
        word: &Interface,
        slices: &mut Vec<Slice>,
        left: usize,
        visit: &mut dyn FnMut(&Diagram),
    ) {
        visit(&Diagram::new(sig, dom.clone(), slices.clone()).unwrap());
        if left == 0 {
            return;
        }
        for s in applicable(sig, word) {
            let next = step(sig, word, &s);
            slices.push(s);
            go(sig, dom, &next, slices, left - 1, visit);
            slices.pop();
        }
    }
    go(sig, dom, dom, &mut Vec::new(), max_len, visit);
}

/// Applies up to `moves` random legal exchanges.
pub fn shuffle<R: Rng>(rng: &mut R, d: &Diagram, moves: usize) -> Diagram {
    let mut d = d.clone();
    for _ in 0..moves {
        let steps = d.legal_exchanges();
        let Some(&step) = steps.choose(rng) else { break };
        d = d.exchange(step).unwrap();
    }
    d
}

/// Sorts `{X, Y, Z}` with a spread of arities; used by the randomized suites.
pub fn mixed_signature() -> EffectfulSignature {
    EffectfulSignature::new()
        .with_sort("X")
        .with_sort("Y")
        .with_sort("Z")
        .with_pure("copy", &["X"], &["X", "X"])
        .with_pure("drop", &["Y"], &[])
        .with_pure("mk", &[], &["Y"])
        .with_pure("conv", &["X", "Y"], &["Z"])
        .with_pure("split", &["Z"], &["Y", "X"])
        .with_pure("unit", &[], &[])
        .with_effectful("get", &[], &["X"])
        .with_effectful("put", &["X"], &[])
        .with_effectful("step", &["Z"], &["Z"])
        .with_effectful("emit", &["Y", "X"], &["X"])
        .with_effectful("tick", &[], &[])
}

/// Up to two wires of random sorts from `{X, Y, Z}`.
pub fn random_dom<R: Rng>(rng: &mut R) -> Interface {
    let sorts = ["X", "Y", "Z"];
    let n = rng.gen_range(0..=2);
    interface((0..n).map(|_| *sorts.choose(rng).unwrap()))
}

/// Random braid-preserving noise: spurious braid pairs at the runtime wire and
/// monoidal exchanges.
pub fn perturb<R: Rng>(rng: &mut R, rd: &RuntimeDiagram, moves: usize) -> RuntimeDiagram {
    let rsig = rd.runtime_signature();
    let mut d = rd.diagram().clone();
    for _ in 0..moves {
        if rng.gen_bool(0.3) {
            let levels = d.levels();
            let at = rng.gen_range(0..levels.len());
            let word = &levels[at];
            let r = word.iter().position(|s| s.as_str() == "R").unwrap();
            let pair = if r + 1 < word.len() && (r == 0 || rng.gen_bool(0.5)) {
                [
                    Slice::new(&braid_over_id(&word[r + 1]), r),
                    Slice::new(&braid_under_id(&word[r + 1]), r),
                ]
            } else if r > 0 {
                [
                    Slice::new(&braid_under_id(&word[r - 1]), r - 1),
                    Slice::new(&braid_over_id(&word[r - 1]), r - 1),
                ]
            } else {
                continue;
            };
            let mut slices = d.slices().to_vec();
            slices.splice(at..at, pair);
            d = Diagram::new(rsig.signature(), d.dom().clone(), slices).unwrap();
        } else {
            d = shuffle(rng, &d, 1);
        }
    }
    RuntimeDiagram::new(rsig, d).unwrap()
}
