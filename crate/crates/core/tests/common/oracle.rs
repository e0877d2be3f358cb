//! Brute-force exchange classes.
//!
//! Two adjacent slices may be swapped when the swap keeps every wire
//! connected to the same generators and leaves the final wire order intact,
//! and at least one of the two generators is pure. Candidate offsets are
//! enumerated exhaustively; no offset arithmetic is shared with the library.

use std::collections::{BTreeSet, HashSet, VecDeque};

use premonoidal::signature::EffectfulSignature;
use premonoidal::{Diagram, Slice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Wire {
    Input(usize),
    Output { node: usize, port: usize },
}

struct Gen {
    inputs: usize,
    outputs: usize,
    pure: bool,
}

fn gen(sig: &EffectfulSignature, id: &str) -> Gen {
    let g = sig.generator(id).expect("known generator");
    Gen {
        inputs: g.decl.dom.len(),
        outputs: g.decl.cod.len(),
        pure: g.is_pure(),
    }
}

/// Applies node `node` (generator `g`) at `offset`, returning the consumed wires.
fn fire(word: &mut Vec<Wire>, g: &Gen, offset: usize, node: usize) -> Option<Vec<Wire>> {
    if offset + g.inputs > word.len() {
        return None;
    }
    let consumed: Vec<Wire> = word
        .splice(
            offset..offset + g.inputs,
            (0..g.outputs).map(|port| Wire::Output { node, port }),
        )
        .collect();
    Some(consumed)
}

fn is_scalar(g: &Gen) -> bool {
    g.inputs == 0 && g.outputs == 0
}

/// A scalar has no wires pinning its position; it must stay in the same face
/// of the diagram. Checked as a cut condition: the wires to its left that
/// the other node does not touch are unchanged, it is not wedged between two
/// of that node's wires, and it stays on the same side of that node.
fn same_face(old_left: &[Wire], new_left: &[Wire], old_side: &[Wire], new_side: &[Wire]) -> bool {
    let bystanders = |left: &[Wire]| -> HashSet<Wire> {
        left.iter()
            .filter(|w| !old_side.contains(w) && !new_side.contains(w))
            .copied()
            .collect()
    };
    if bystanders(old_left) != bystanders(new_left) {
        return false;
    }
    let placement = |left: &[Wire], side: &[Wire]| -> Option<Option<bool>> {
        if side.is_empty() {
            return Some(None);
        }
        let inside = side.iter().filter(|w| left.contains(w)).count();
        if inside == side.len() {
            Some(Some(true))
        } else if inside == 0 {
            Some(Some(false))
        } else {
            None
        }
    };
    match (placement(old_left, old_side), placement(new_left, new_side)) {
        (Some(Some(x)), Some(Some(y))) => x == y,
        (Some(_), Some(_)) => true,
        _ => false,
    }
}

#[allow(clippy::too_many_arguments)]
fn scalars_stay_put(
    a: &Gen,
    b: &Gen,
    slices: &[Slice],
    i: usize,
    oa: usize,
    ob: usize,
    before: &[Wire],
    after_b: &[Wire],
    a_in: &[Wire],
    b_in: &[Wire],
    nodes: &[usize],
) -> bool {
    let a_out: Vec<Wire> = (0..a.outputs)
        .map(|port| Wire::Output { node: nodes[i], port })
        .collect();
    let b_out: Vec<Wire> = (0..b.outputs)
        .map(|port| Wire::Output {
            node: nodes[i + 1],
            port,
        })
        .collect();
    if is_scalar(b) {
        // b moves above a
        let mut after_a = before.to_vec();
        after_a.splice(
            slices[i].offset..slices[i].offset + a.inputs,
            a_out.iter().copied(),
        );
        if !same_face(&after_a[..slices[i + 1].offset], &before[..ob], &a_out, a_in) {
            return false;
        }
    }
    if is_scalar(a) {
        // a moves below b
        if !same_face(&before[..slices[i].offset], &after_b[..oa], b_in, &b_out) {
            return false;
        }
    }
    true
}

/// Every legal arrangement obtained by swapping positions `i` and `i + 1`.
fn swaps(
    sig: &EffectfulSignature,
    dom_width: usize,
    slices: &[Slice],
    nodes: &[usize],
    i: usize,
) -> Vec<(Vec<Slice>, Vec<usize>)> {
    let a = gen(sig, &slices[i].gen);
    let b = gen(sig, &slices[i + 1].gen);
    if !a.pure && !b.pure {
        return Vec::new();
    }
    let mut word: Vec<Wire> = (0..dom_width).map(Wire::Input).collect();
    for k in 0..i {
        fire(&mut word, &gen(sig, &slices[k].gen), slices[k].offset, nodes[k]).unwrap();
    }
    let before = word.clone();
    let mut after = word.clone();
    let a_in = fire(&mut after, &a, slices[i].offset, nodes[i]).unwrap();
    let b_in = fire(&mut after, &b, slices[i + 1].offset, nodes[i + 1]).unwrap();

    let mut out = Vec::new();
    for ob in 0..=before.len() {
        let mut w = before.clone();
        let Some(b_in2) = fire(&mut w, &b, ob, nodes[i + 1]) else {
            continue;
        };
        if b_in2 != b_in {
            continue;
        }
        for oa in 0..=w.len() {
            let mut w2 = w.clone();
            let Some(a_in2) = fire(&mut w2, &a, oa, nodes[i]) else {
                continue;
            };
            if a_in2 == a_in
                && w2 == after
                && scalars_stay_put(&a, &b, slices, i, oa, ob, &before, &w, &a_in, &b_in, nodes)
            {
                let mut s = slices.to_vec();
                let mut n = nodes.to_vec();
                s[i] = Slice::new(&slices[i + 1].gen, ob);
                s[i + 1] = Slice::new(&slices[i].gen, oa);
                n.swap(i, i + 1);
                out.push((s, n));
            }
        }
    }
    out
}

/// The whole exchange class of `d`, as slice sequences.
pub fn exchange_class(d: &Diagram) -> BTreeSet<Vec<Slice>> {
    let sig = d.sig();
    let width = d.dom().len();
    let start: Vec<usize> = (0..d.len()).collect();
    let mut seen: HashSet<Vec<Slice>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(d.slices().to_vec());
    queue.push_back((d.slices().to_vec(), start));
    while let Some((slices, nodes)) = queue.pop_front() {
        for i in 0..slices.len().saturating_sub(1) {
            for (s, n) in swaps(sig, width, &slices, &nodes, i) {
                if seen.insert(s.clone()) {
                    queue.push_back((s, n));
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Least element of the class under `(offset, generator id)` order.
pub fn lex_least(class: &BTreeSet<Vec<Slice>>) -> Vec<Slice> {
    class
        .iter()
        .min_by(|a, b| {
            let ka = a.iter().map(|s| (s.offset, s.gen.to_string()));
            let kb = b.iter().map(|s| (s.offset, s.gen.to_string()));
            ka.cmp(kb)
        })
        .cloned()
        .expect("classes are nonempty")
}
