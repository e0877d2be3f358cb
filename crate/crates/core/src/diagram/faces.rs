//! Least arrangements for diagrams with generators that have no inputs.
//!
//! Such a generator is not held in place by any wire. A pure one may sit in
//! any gap of the current cut that belongs to the same face of the planar
//! diagram; faces are computed once from the given arrangement. An effectful
//! one cannot pass the effectful generators around it, so it only roams the
//! part of its face reachable through cuts between its neighbours in the
//! effect order.
//!
//! The search explores cut states (which nodes have fired, plus the ordered
//! live wires) one effect phase at a time, then picks the least slice
//! sequence that fires every node and ends on the same ordered output wires.

use std::collections::HashMap;

use super::exchange::Node;

type Wire = u32;

/// Sort key of a slice: offset, then generator id.
type SliceKey<'a> = (usize, &'a str);

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn fresh(&mut self) -> usize {
        self.0.push(self.0.len());
        self.0.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a] = b;
    }
}

/// Wire identities and faces of the given arrangement.
struct Planar {
    inputs: Vec<Vec<Wire>>,
    outputs: Vec<Vec<Wire>>,
    /// Face of the gap each node was drawn in; only read for input-free nodes.
    face: Vec<usize>,
    /// Face immediately to the right of each wire.
    right_face: Vec<usize>,
    left_outer: usize,
    right_outer: usize,
    dom: Vec<Wire>,
    cod: Vec<Wire>,
}

impl Planar {
    fn new(nodes: &[Node], dom_width: usize) -> Planar {
        let mut uf = UnionFind(Vec::new());
        let left_outer = uf.fresh();
        let right_outer = if dom_width == 0 { left_outer } else { uf.fresh() };
        let mut gaps: Vec<usize> = vec![left_outer];
        for _ in 1..dom_width {
            gaps.push(uf.fresh());
        }
        if dom_width > 0 {
            gaps.push(right_outer);
        }
        let dom: Vec<Wire> = (0..dom_width as Wire).collect();
        let mut right_face: Vec<usize> = gaps[1..].to_vec();
        let mut word = dom.clone();
        let mut next_wire = dom_width as Wire;
        let (mut inputs, mut outputs, mut face) = (Vec::new(), Vec::new(), Vec::new());
        for node in nodes {
            let (o, k, m) = (node.slice.offset, node.shape.inputs, node.shape.outputs);
            let left = gaps[o];
            let right = gaps[o + k];
            face.push(left);
            let produced: Vec<Wire> = (0..m as Wire).map(|i| next_wire + i).collect();
            next_wire += m as Wire;
            let segment: Vec<usize> = if m == 0 {
                uf.union(left, right);
                vec![left]
            } else {
                let mut s = vec![left];
                for _ in 1..m {
                    s.push(uf.fresh());
                }
                s.push(right);
                s
            };
            right_face.extend_from_slice(&segment[1..]);
            gaps.splice(o..=o + k, segment);
            inputs.push(word.splice(o..o + k, produced.iter().copied()).collect());
            outputs.push(produced);
        }
        let mut resolve = |r: usize| uf.find(r);
        Planar {
            inputs,
            outputs,
            face: face.into_iter().map(&mut resolve).collect(),
            right_face: right_face.into_iter().map(&mut resolve).collect(),
            left_outer: resolve(left_outer),
            right_outer: resolve(right_outer),
            dom,
            cod: word,
        }
    }

    fn gap_face(&self, word: &[Wire], g: usize) -> usize {
        if g == 0 {
            self.left_outer
        } else if g == word.len() {
            self.right_outer
        } else {
            self.right_face[word[g - 1] as usize]
        }
    }
}

/// Where gap `g` goes when a node with `k` inputs and `m` outputs fires at
/// offset `o`. Gaps inside the consumed span have nowhere to go; the gap an
/// input-free node is dropped into ends up on both of its sides.
fn carry_gap(g: usize, o: usize, k: usize, m: usize) -> Vec<usize> {
    if g < o {
        vec![g]
    } else if g == o && k == 0 && m > 0 {
        vec![o, o + m]
    } else if g == o {
        vec![o]
    } else if g < o + k {
        Vec::new()
    } else if g == o + k {
        vec![o + m]
    } else {
        vec![g - k + m]
    }
}

/// A chosen slice: node index and its offset.
type Move = (usize, usize);

/// Cut states are packed as fired-node bit words followed by the live wires.
struct Explorer<'a> {
    nodes: &'a [Node],
    planar: Planar,
    mask_words: usize,
    states: Vec<Box<[u32]>>,
    index: HashMap<Box<[u32]>, usize>,
    edges: Vec<Vec<(Move, usize)>>,
    scratch: Vec<u32>,
}

impl Explorer<'_> {
    fn fired(&self, state: usize, n: usize) -> bool {
        self.states[state][n / 32] & (1 << (n % 32)) != 0
    }

    fn word(&self, state: usize) -> &[Wire] {
        &self.states[state][self.mask_words..]
    }

    fn intern_scratch(&mut self) -> (usize, bool) {
        if let Some(&id) = self.index.get(&self.scratch[..]) {
            return (id, false);
        }
        let id = self.states.len();
        let key: Box<[u32]> = self.scratch.as_slice().into();
        self.index.insert(key.clone(), id);
        self.states.push(key);
        self.edges.push(Vec::new());
        (id, true)
    }

    fn fire(&mut self, from: usize, (n, o): Move) -> (usize, bool) {
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.clear();
        scratch.extend_from_slice(&self.states[from][..self.mask_words]);
        scratch[n / 32] |= 1 << (n % 32);
        let word = self.word(from);
        let k = self.planar.inputs[n].len();
        scratch.extend_from_slice(&word[..o]);
        scratch.extend_from_slice(&self.planar.outputs[n]);
        scratch.extend_from_slice(&word[o + k..]);
        self.scratch = scratch;
        let (to, new) = self.intern_scratch();
        self.edges[from].push(((n, o), to));
        (to, new)
    }

    /// Offset at which a node with inputs can fire, if its inputs are adjacent.
    fn pinned_offset(&self, state: usize, n: usize) -> Option<usize> {
        let word = self.word(state);
        let ins = &self.planar.inputs[n];
        let pos = word.iter().position(|&w| w == ins[0])?;
        word[pos..].starts_with(ins).then_some(pos)
    }

    fn pure_moves(&self, state: usize, out: &mut Vec<Move>) {
        out.clear();
        let word = self.word(state);
        for n in 0..self.nodes.len() {
            if self.fired(state, n) || !self.nodes[n].shape.central {
                continue;
            }
            if self.planar.inputs[n].is_empty() {
                for g in 0..=word.len() {
                    if self.planar.gap_face(word, g) == self.planar.face[n] {
                        out.push((n, g));
                    }
                }
            } else if let Some(o) = self.pinned_offset(state, n) {
                out.push((n, o));
            }
        }
    }

    /// Closes `seeds` under pure firings; returns every state of the phase.
    fn close(&mut self, seeds: Vec<usize>) -> Vec<usize> {
        let mut phase = seeds.clone();
        let mut stack = seeds;
        let mut moves = Vec::new();
        while let Some(s) = stack.pop() {
            self.pure_moves(s, &mut moves);
            for &m in &moves {
                let (to, new) = self.fire(s, m);
                if new {
                    phase.push(to);
                    stack.push(to);
                }
            }
        }
        phase
    }

    /// Gaps of each phase state reachable by an input-free effectful node
    /// from its position in the given arrangement, `anchor`.
    fn roaming(&self, phase: &[usize], anchor: (usize, usize)) -> Vec<(usize, usize)> {
        let mut base: HashMap<usize, usize> = HashMap::new();
        let mut uf = UnionFind(Vec::new());
        for &s in phase {
            base.insert(s, uf.0.len());
            for _ in 0..=self.word(s).len() {
                uf.fresh();
            }
        }
        for &s in phase {
            for &((n, o), to) in &self.edges[s] {
                let Some(&to_base) = base.get(&to) else { continue };
                let (k, m) = (self.planar.inputs[n].len(), self.planar.outputs[n].len());
                for g in 0..=self.word(s).len() {
                    for h in carry_gap(g, o, k, m) {
                        uf.union(base[&s] + g, to_base + h);
                    }
                }
            }
        }
        let root = uf.find(base[&anchor.0] + anchor.1);
        let mut out = Vec::new();
        for &s in phase {
            for g in 0..=self.word(s).len() {
                if uf.find(base[&s] + g) == root {
                    out.push((s, g));
                }
            }
        }
        out
    }

    fn key(&self, (node, offset): Move) -> SliceKey<'_> {
        (offset, &self.nodes[node].slice.gen)
    }

    /// Least completion from `start`. States are ranked level by level from
    /// the end, so that comparing a move's key and then its target's rank
    /// orders whole suffixes.
    fn least_path(&self, start: usize) -> Option<Vec<Move>> {
        let n = self.nodes.len();
        let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for s in 0..self.states.len() {
            let fired: u32 = self.states[s][..self.mask_words]
                .iter()
                .map(|w| w.count_ones())
                .sum();
            by_level[fired as usize].push(s);
        }
        // rank[s]: position of s's least suffix among its level, if s completes
        let mut rank: Vec<Option<usize>> = vec![None; self.states.len()];
        let mut choice: Vec<Option<(Move, usize)>> = vec![None; self.states.len()];
        for &s in &by_level[n] {
            if self.word(s) == self.planar.cod {
                rank[s] = Some(0);
            }
        }
        for level in (0..n).rev() {
            let mut ranked: Vec<(usize, SliceKey, usize)> = Vec::new();
            for &s in &by_level[level] {
                let mut best: Option<(SliceKey, usize, (Move, usize))> = None;
                for &(m, to) in &self.edges[s] {
                    let Some(r) = rank[to] else { continue };
                    let cand = (self.key(m), r, (m, to));
                    if best.as_ref().is_none_or(|b| (cand.0, cand.1) < (b.0, b.1)) {
                        best = Some(cand);
                    }
                }
                if let Some((k, r, c)) = best {
                    choice[s] = Some(c);
                    ranked.push((s, k, r));
                }
            }
            ranked.sort_by(|a, b| (a.1, a.2).cmp(&(b.1, b.2)));
            let mut dense = 0;
            for i in 0..ranked.len() {
                if i > 0 && (ranked[i].1, ranked[i].2) != (ranked[i - 1].1, ranked[i - 1].2) {
                    dense += 1;
                }
                rank[ranked[i].0] = Some(dense);
            }
        }
        rank[start]?;
        let mut path = Vec::with_capacity(n);
        let mut at = start;
        while let Some((m, to)) = choice[at] {
            path.push(m);
            at = to;
        }
        Some(path)
    }
}

/// The least arrangement of `nodes` as (original node index, offset) pairs.
pub(crate) fn least_arrangement(nodes: &[Node], dom_width: usize) -> Vec<(usize, usize)> {
    let planar = Planar::new(nodes, dom_width);
    let chain: Vec<usize> = (0..nodes.len()).filter(|&n| !nodes[n].shape.central).collect();
    let mask_words = nodes.len().div_ceil(32).max(1);

    // the given arrangement's packed cut just before each effectful node fires
    let mut before_effect: Vec<(Vec<u32>, usize)> = Vec::new();
    {
        let mut mask = vec![0u32; mask_words];
        let mut word = planar.dom.clone();
        for (n, node) in nodes.iter().enumerate() {
            let o = node.slice.offset;
            if !node.shape.central {
                let mut key = mask.clone();
                key.extend_from_slice(&word);
                before_effect.push((key, o));
            }
            word.splice(o..o + node.shape.inputs, planar.outputs[n].iter().copied());
            mask[n / 32] |= 1 << (n % 32);
        }
    }

    let mut scratch = vec![0u32; mask_words];
    scratch.extend_from_slice(&planar.dom);
    let mut ex = Explorer {
        nodes,
        planar,
        mask_words,
        states: Vec::new(),
        index: HashMap::new(),
        edges: Vec::new(),
        scratch,
    };
    let (start, _) = ex.intern_scratch();
    let mut seeds = vec![start];
    for (i, &e) in chain.iter().enumerate() {
        let phase = ex.close(std::mem::take(&mut seeds));
        let placements: Vec<(usize, usize)> = if ex.planar.inputs[e].is_empty() {
            let (key, offset) = &before_effect[i];
            let anchor = ex.index[&key[..]];
            ex.roaming(&phase, (anchor, *offset))
        } else {
            phase
                .iter()
                .filter_map(|&s| ex.pinned_offset(s, e).map(|o| (s, o)))
                .collect()
        };
        for (s, o) in placements {
            let (to, new) = ex.fire(s, (e, o));
            if new {
                seeds.push(to);
            }
        }
    }
    ex.close(seeds);
    ex.least_path(start).expect("the given arrangement completes")
}
