//! The exchange relation on sliced diagrams and its lexicographic normal form.
//!
//! Two adjacent slices may trade places when the later one's inputs lie
//! entirely to one side of the earlier one's outputs and at least one of them
//! is central. When both footprints are empty and sit at the same position the
//! later slice may pass on either side, and both placements are legal.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Which side of the earlier slice's outputs the later slice passes on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Swap slices `index` and `index + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExchangeStep {
    pub index: usize,
    pub side: Side,
}

impl ExchangeStep {
    /// The step undoing `self`.
    pub fn inverse(self) -> ExchangeStep {
        ExchangeStep {
            index: self.index,
            side: self.side.flip(),
        }
    }
}

/// One generator application: `gen` whiskered by `offset` wires on the left.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slice {
    pub gen: Arc<str>,
    pub offset: usize,
}

impl Slice {
    pub fn new(gen: &str, offset: usize) -> Self {
        Slice {
            gen: Arc::from(gen),
            offset,
        }
    }

    fn key(&self) -> (usize, &str) {
        (self.offset, &self.gen)
    }
}

/// Arity and centrality of a slice's generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Shape {
    pub inputs: usize,
    pub outputs: usize,
    pub central: bool,
}

/// New offsets `(later, earlier)` after moving `later` above `earlier` on `side`,
/// or `None` when that placement is illegal.
pub(crate) fn swap_offsets(
    earlier: (usize, Shape),
    later: (usize, Shape),
    side: Side,
) -> Option<(usize, usize)> {
    let (o1, s1) = earlier;
    let (o2, s2) = later;
    if !s1.central && !s2.central {
        return None;
    }
    match side {
        Side::Left if o2 + s2.inputs <= o1 => Some((o2, o1 - s2.inputs + s2.outputs)),
        Side::Right if o2 >= o1 + s1.outputs => Some((o2 - s1.outputs + s1.inputs, o1)),
        _ => None,
    }
}

/// Legal placements for swapping `earlier` and `later`, deduplicated, `Left` first.
pub(crate) fn swap_options(
    earlier: (usize, Shape),
    later: (usize, Shape),
) -> impl Iterator<Item = (Side, usize, usize)> {
    let left = swap_offsets(earlier, later, Side::Left);
    let right = swap_offsets(earlier, later, Side::Right).filter(|r| Some(*r) != left);
    left.map(|(a, b)| (Side::Left, a, b))
        .into_iter()
        .chain(right.map(|(a, b)| (Side::Right, a, b)))
}

#[derive(Clone, Debug)]
pub(crate) struct Node {
    pub slice: Slice,
    pub shape: Shape,
}

/// Applies one exchange in place. Returns false (leaving `nodes` untouched)
/// when the step is illegal.
pub(crate) fn apply_step(nodes: &mut [Node], step: ExchangeStep) -> bool {
    let i = step.index;
    if i + 1 >= nodes.len() {
        return false;
    }
    let earlier = (nodes[i].slice.offset, nodes[i].shape);
    let later = (nodes[i + 1].slice.offset, nodes[i + 1].shape);
    match swap_offsets(earlier, later, step.side) {
        Some((new_later, new_earlier)) => {
            nodes[i].slice.offset = new_earlier;
            nodes[i + 1].slice.offset = new_later;
            nodes.swap(i, i + 1);
            true
        }
        None => false,
    }
}

/// Every legal single exchange of `nodes`, in (index, side) order.
pub(crate) fn legal_steps(nodes: &[Node]) -> Vec<ExchangeStep> {
    let mut out = Vec::new();
    for i in 0..nodes.len().saturating_sub(1) {
        let earlier = (nodes[i].slice.offset, nodes[i].shape);
        let later = (nodes[i + 1].slice.offset, nodes[i + 1].shape);
        for (side, _, _) in swap_options(earlier, later) {
            out.push(ExchangeStep { index: i, side });
        }
    }
    out
}

/// All ways of bubbling `nodes[from]` up to position `to` by direct swaps,
/// as (final offset, sides taken from the bottom up).
fn bubble_paths(nodes: &[Node], from: usize, to: usize) -> Vec<(usize, Vec<Side>)> {
    fn go(
        nodes: &[Node],
        k: usize,
        to: usize,
        moving: (usize, Shape),
        path: &mut Vec<Side>,
        out: &mut Vec<(usize, Vec<Side>)>,
    ) {
        if k == to {
            out.push((moving.0, path.clone()));
            return;
        }
        let above = &nodes[k - 1];
        for (side, new_moving, _) in swap_options((above.slice.offset, above.shape), moving) {
            path.push(side);
            go(nodes, k - 1, to, (new_moving, moving.1), path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    let moving = (nodes[from].slice.offset, nodes[from].shape);
    go(nodes, from, to, moving, &mut Vec::new(), &mut out);
    out
}

/// Lexicographically least arrangement reachable by exchanges, keyed by
/// `(offset, generator id)` per slice, with the exchange steps that reach it.
///
/// When every generator has at least one input, its offset at any position is
/// fixed by the wires it consumes, and the least arrangement is built greedily:
/// each position takes the least slice that can be bubbled up to it, branching
/// on ties. Generators without inputs can drift sideways inside their face by
/// moving down and back up; those classes are searched over cut states.
pub(crate) fn normalize(nodes: Vec<Node>, dom_width: usize) -> (Vec<Node>, Vec<ExchangeStep>) {
    if nodes.iter().all(|n| n.shape.inputs > 0) {
        greedy(nodes, 0, Vec::new())
    } else {
        let target = super::faces::least_arrangement(&nodes, dom_width);
        route(nodes, &target)
    }
}

/// The least arrangement alone, skipping the witness where that is cheaper.
pub(crate) fn least(nodes: Vec<Node>, dom_width: usize) -> Vec<Slice> {
    if nodes.iter().all(|n| n.shape.inputs > 0) {
        slices_of(&greedy(nodes, 0, Vec::new()).0)
    } else {
        super::faces::least_arrangement(&nodes, dom_width)
            .into_iter()
            .map(|(i, offset)| Slice {
                gen: Arc::clone(&nodes[i].slice.gen),
                offset,
            })
            .collect()
    }
}

/// Exchanges turning `nodes` into `target`, given as (original index, offset)
/// per position. Each target slice is moved into place on its own, first by
/// bubbling it straight up, then by letting it wander up and down past its
/// neighbours; only if both fail is the rest of the class searched.
fn route(mut nodes: Vec<Node>, target: &[(usize, usize)]) -> (Vec<Node>, Vec<ExchangeStep>) {
    let mut ids: Vec<usize> = (0..nodes.len()).collect();
    let mut witness = Vec::new();
    for (p, &(id, offset)) in target.iter().enumerate() {
        let j = ids
            .iter()
            .position(|&i| i == id)
            .expect("target names every node");
        let path = bubble_paths(&nodes, j, p).into_iter().find(|(o, _)| *o == offset);
        if let Some((_, sides)) = path {
            for (k, side) in (p + 1..=j).rev().zip(sides) {
                let step = ExchangeStep { index: k - 1, side };
                let ok = apply_step(&mut nodes, step);
                debug_assert!(ok, "bubble path must replay");
                ids.swap(k - 1, k);
                witness.push(step);
            }
            continue;
        }
        let prefix = slices_of(&nodes[..p]);
        if let Some(steps) = wander(&nodes, j, p, offset, &prefix) {
            for step in steps {
                apply_step(&mut nodes, step);
                ids.swap(step.index, step.index + 1);
                witness.push(step);
            }
            continue;
        }
        let goal: Vec<Slice> = target
            .iter()
            .map(|&(i, o)| Slice {
                gen: Arc::clone(&nodes[ids.iter().position(|&x| x == i).unwrap()].slice.gen),
                offset: o,
            })
            .collect();
        for step in search_to(nodes.clone(), &goal) {
            let ok = apply_step(&mut nodes, step);
            debug_assert!(ok, "search path must replay");
            witness.push(step);
        }
        return (nodes, witness);
    }
    (nodes, witness)
}

/// Moves only the node at `from`, one exchange at a time in either direction,
/// until it sits at position `to` with offset `offset` above an unchanged
/// `prefix`.
fn wander(
    nodes: &[Node],
    from: usize,
    to: usize,
    offset: usize,
    prefix: &[Slice],
) -> Option<Vec<ExchangeStep>> {
    use std::collections::hash_map::Entry;
    use std::collections::{HashMap, VecDeque};

    type Key = Vec<Slice>;
    let mut parent: HashMap<Key, Option<(Key, ExchangeStep)>> = HashMap::new();
    parent.insert(slices_of(nodes), None);
    let mut queue = VecDeque::from([(nodes.to_vec(), from)]);
    while let Some((current, at)) = queue.pop_front() {
        let key = slices_of(&current);
        if at == to && current[at].slice.offset == offset && key[..to] == *prefix {
            let mut steps = Vec::new();
            let mut cursor = key;
            while let Some(Some((prev, step))) = parent.get(&cursor) {
                steps.push(*step);
                cursor = prev.clone();
            }
            steps.reverse();
            return Some(steps);
        }
        let mut moves = Vec::new();
        if at > 0 {
            moves.push((at - 1, at - 1));
        }
        if at + 1 < current.len() {
            moves.push((at, at + 1));
        }
        for (index, next_at) in moves {
            for side in [Side::Left, Side::Right] {
                let step = ExchangeStep { index, side };
                let mut next = current.clone();
                if !apply_step(&mut next, step) {
                    continue;
                }
                if let Entry::Vacant(e) = parent.entry(slices_of(&next)) {
                    e.insert(Some((key.clone(), step)));
                    queue.push_back((next, next_at));
                }
            }
        }
    }
    None
}

fn slices_of(nodes: &[Node]) -> Vec<Slice> {
    nodes.iter().map(|n| n.slice.clone()).collect()
}

fn greedy(
    mut nodes: Vec<Node>,
    from: usize,
    mut witness: Vec<ExchangeStep>,
) -> (Vec<Node>, Vec<ExchangeStep>) {
    for p in from..nodes.len() {
        let mut best_key: Option<(usize, Arc<str>)> = None;
        let mut tied: Vec<(usize, Vec<Side>)> = Vec::new();
        for j in p..nodes.len() {
            for (offset, sides) in bubble_paths(&nodes, j, p) {
                let key = (offset, Arc::clone(&nodes[j].slice.gen));
                match &best_key {
                    Some(b) if key > *b => {}
                    Some(b) if key == *b => tied.push((j, sides)),
                    _ => {
                        best_key = Some(key);
                        tied = vec![(j, sides)];
                    }
                }
            }
        }
        let mut outcomes: Vec<(Vec<Node>, Vec<ExchangeStep>)> = Vec::new();
        for (j, sides) in tied {
            let mut next = nodes.clone();
            let mut steps = Vec::new();
            for (k, side) in (p + 1..=j).rev().zip(sides) {
                let step = ExchangeStep { index: k - 1, side };
                let ok = apply_step(&mut next, step);
                debug_assert!(ok, "bubble path must replay");
                steps.push(step);
            }
            if !outcomes.iter().any(|(o, _)| slices_of(o) == slices_of(&next)) {
                outcomes.push((next, steps));
            }
        }
        if outcomes.len() == 1 {
            let (next, steps) = outcomes.pop().unwrap();
            nodes = next;
            witness.extend(steps);
            continue;
        }
        return outcomes
            .into_iter()
            .map(|(next, steps)| {
                let mut w = witness.clone();
                w.extend(steps);
                greedy(next, p + 1, w)
            })
            .min_by(|a, b| compare_slices(&slices_of(&a.0), &slices_of(&b.0)))
            .expect("at least one candidate");
    }
    (nodes, witness)
}

/// Exchanges reaching `goal`, by breadth-first search from both ends. Steps
/// are invertible, so the half grown from `goal` is replayed backwards.
fn search_to(nodes: Vec<Node>, goal: &[Slice]) -> Vec<ExchangeStep> {
    use std::collections::HashMap;

    type Parents = HashMap<Vec<Slice>, Option<(Vec<Slice>, ExchangeStep)>>;

    fn trail(parents: &Parents, mut at: Vec<Slice>) -> Vec<ExchangeStep> {
        let mut steps = Vec::new();
        while let Some(Some((prev, step))) = parents.get(&at) {
            steps.push(*step);
            at = prev.clone();
        }
        steps.reverse();
        steps
    }

    let start = slices_of(&nodes);
    if start == goal {
        return Vec::new();
    }
    let mut goal_nodes = nodes.clone();
    for (n, s) in goal_nodes.iter_mut().zip(goal) {
        n.slice = s.clone();
    }
    // shapes follow the generator, so re-derive them for the goal ordering
    let shape_of: HashMap<Arc<str>, Shape> = nodes
        .iter()
        .map(|n| (Arc::clone(&n.slice.gen), n.shape))
        .collect();
    for n in goal_nodes.iter_mut() {
        n.shape = shape_of[&n.slice.gen];
    }

    let mut sides: [(Parents, Vec<Vec<Node>>); 2] = [
        (HashMap::from([(start, None)]), vec![nodes]),
        (HashMap::from([(goal.to_vec(), None)]), vec![goal_nodes]),
    ];
    loop {
        let grow = usize::from(sides[1].1.len() < sides[0].1.len());
        let frontier = std::mem::take(&mut sides[grow].1);
        assert!(!frontier.is_empty(), "the goal lies in the exchange class");
        let mut next_frontier = Vec::new();
        for current in frontier {
            let key = slices_of(&current);
            for step in legal_steps(&current) {
                let mut next = current.clone();
                apply_step(&mut next, step);
                let next_key = slices_of(&next);
                if sides[grow].0.contains_key(&next_key) {
                    continue;
                }
                sides[grow].0.insert(next_key.clone(), Some((key.clone(), step)));
                if sides[1 - grow].0.contains_key(&next_key) {
                    let mut steps = trail(&sides[0].0, next_key.clone());
                    let back = trail(&sides[1].0, next_key);
                    steps.extend(back.into_iter().rev().map(ExchangeStep::inverse));
                    return steps;
                }
                next_frontier.push(next);
            }
        }
        sides[grow].1 = next_frontier;
    }
}

/// Compares two slice sequences under the normal-form ordering.
pub fn compare_slices(a: &[Slice], b: &[Slice]) -> std::cmp::Ordering {
    a.iter().map(Slice::key).cmp(b.iter().map(Slice::key))
}
