//! Free strict effectful categories as sliced string diagrams.
//!
//! A [`Diagram`] is a domain word and a sequence of [`Slice`]s, each one
//! generator whiskered by some wires on its left. Two diagrams denote the same
//! morphism exactly when their slice sequences are related by legal exchanges;
//! [`Diagram::normal_form`] picks a canonical representative of that class.

mod exchange;
mod faces;

use std::sync::Arc;

use thiserror::Error;

use crate::signature::{show_interface, EffectfulSignature, Interface, SortId};

pub(crate) use exchange::{apply_step, least, legal_steps, normalize, Node, Shape};
pub use exchange::{compare_slices, ExchangeStep, Side, Slice};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("undeclared sort `{0}`")]
    UndeclaredSort(SortId),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("boundary mismatch: {} vs {}", show_interface(.left), show_interface(.right))]
    BoundaryMismatch { left: Interface, right: Interface },
    #[error("slice {index} (`{gen}` at offset {offset}) does not fit in width {width}")]
    SliceOutOfBounds {
        index: usize,
        gen: String,
        offset: usize,
        width: usize,
    },
    #[error(
        "slice {index} (`{gen}`) expects {} but finds {}",
        show_interface(.expected),
        show_interface(.found)
    )]
    SliceSortMismatch {
        index: usize,
        gen: String,
        expected: Interface,
        found: Interface,
    },
    #[error("tensor of two effectful diagrams is undefined; pick an order with compose and whiskering")]
    PremonoidalTensorUndefined,
    #[error("diagrams are over different signatures")]
    SignatureMismatch,
    #[error("exchange at {index} is not legal")]
    IllegalExchange { index: usize },
}

pub(crate) fn same_signature(a: &Arc<EffectfulSignature>, b: &Arc<EffectfulSignature>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Replays `slices` from `dom`, returning the word at every level (one more
/// than the number of slices).
pub(crate) fn replay_levels(
    sig: &EffectfulSignature,
    dom: &[SortId],
    slices: &[Slice],
) -> Result<Vec<Interface>, DiagramError> {
    if let Some(s) = sig.undeclared_sort(dom) {
        return Err(DiagramError::UndeclaredSort(s.clone()));
    }
    let mut levels = Vec::with_capacity(slices.len() + 1);
    let mut word: Interface = dom.to_vec();
    for (index, slice) in slices.iter().enumerate() {
        let gen = sig
            .generator(&slice.gen)
            .ok_or_else(|| DiagramError::UnknownGenerator(slice.gen.to_string()))?;
        let decl = gen.decl;
        let end = slice.offset + decl.dom.len();
        if end > word.len() {
            return Err(DiagramError::SliceOutOfBounds {
                index,
                gen: decl.id.clone(),
                offset: slice.offset,
                width: word.len(),
            });
        }
        if word[slice.offset..end] != decl.dom[..] {
            return Err(DiagramError::SliceSortMismatch {
                index,
                gen: decl.id.clone(),
                expected: decl.dom.clone(),
                found: word[slice.offset..end].to_vec(),
            });
        }
        let next: Interface = word[..slice.offset]
            .iter()
            .chain(&decl.cod)
            .chain(&word[end..])
            .cloned()
            .collect();
        levels.push(std::mem::replace(&mut word, next));
    }
    levels.push(word);
    Ok(levels)
}

/// A well-typed morphism of the free effectful category over `sig`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    sig: Arc<EffectfulSignature>,
    dom: Interface,
    cod: Interface,
    slices: Vec<Slice>,
}

impl Diagram {
    /// Type-checks `slices` from `dom` and computes the codomain.
    pub fn new(
        sig: &Arc<EffectfulSignature>,
        dom: Interface,
        slices: Vec<Slice>,
    ) -> Result<Diagram, DiagramError> {
        let mut levels = replay_levels(sig, &dom, &slices)?;
        let cod = levels.pop().expect("replay yields at least one level");
        Ok(Diagram {
            sig: Arc::clone(sig),
            dom,
            cod,
            slices,
        })
    }

    /// Like [`Diagram::new`], additionally checking the codomain.
    pub fn with_boundary(
        sig: &Arc<EffectfulSignature>,
        dom: Interface,
        cod: Interface,
        slices: Vec<Slice>,
    ) -> Result<Diagram, DiagramError> {
        let d = Diagram::new(sig, dom, slices)?;
        if let Some(s) = sig.undeclared_sort(&cod) {
            return Err(DiagramError::UndeclaredSort(s.clone()));
        }
        if d.cod != cod {
            return Err(DiagramError::BoundaryMismatch {
                left: d.cod,
                right: cod,
            });
        }
        Ok(d)
    }

    /// Caller guarantees the slices are well-typed from `dom` to `cod`.
    pub(crate) fn from_parts_unchecked(
        sig: Arc<EffectfulSignature>,
        dom: Interface,
        cod: Interface,
        slices: Vec<Slice>,
    ) -> Diagram {
        debug_assert_eq!(
            replay_levels(&sig, &dom, &slices).map(|mut l| l.pop().unwrap()),
            Ok(cod.clone())
        );
        Diagram {
            sig,
            dom,
            cod,
            slices,
        }
    }

    pub fn identity(sig: &Arc<EffectfulSignature>, iface: Interface) -> Result<Diagram, DiagramError> {
        Diagram::new(sig, iface, Vec::new())
    }

    pub fn from_generator(sig: &Arc<EffectfulSignature>, id: &str) -> Result<Diagram, DiagramError> {
        let gen = sig
            .generator(id)
            .ok_or_else(|| DiagramError::UnknownGenerator(id.to_owned()))?;
        Diagram::new(sig, gen.decl.dom.clone(), vec![Slice::new(id, 0)])
    }

    pub fn sig(&self) -> &Arc<EffectfulSignature> {
        &self.sig
    }

    pub fn dom(&self) -> &Interface {
        &self.dom
    }

    pub fn cod(&self) -> &Interface {
        &self.cod
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    /// The word of sorts between consecutive slices, from `dom` to `cod`.
    pub fn levels(&self) -> Vec<Interface> {
        replay_levels(&self.sig, &self.dom, &self.slices).expect("diagrams are well-typed")
    }

    fn check_same_sig(&self, other: &Diagram) -> Result<(), DiagramError> {
        if same_signature(&self.sig, &other.sig) {
            Ok(())
        } else {
            Err(DiagramError::SignatureMismatch)
        }
    }

    /// `self ; next`.
    pub fn compose(&self, next: &Diagram) -> Result<Diagram, DiagramError> {
        self.check_same_sig(next)?;
        if self.cod != next.dom {
            return Err(DiagramError::BoundaryMismatch {
                left: self.cod.clone(),
                right: next.dom.clone(),
            });
        }
        let slices = self.slices.iter().chain(&next.slices).cloned().collect();
        Ok(Diagram::from_parts_unchecked(
            Arc::clone(&self.sig),
            self.dom.clone(),
            next.cod.clone(),
            slices,
        ))
    }

    fn check_declared(&self, iface: &[SortId]) -> Result<(), DiagramError> {
        match self.sig.undeclared_sort(iface) {
            Some(s) => Err(DiagramError::UndeclaredSort(s.clone())),
            None => Ok(()),
        }
    }

    /// `id_iface ⊗ self`.
    pub fn whisker_left(iface: &[SortId], d: &Diagram) -> Result<Diagram, DiagramError> {
        d.check_declared(iface)?;
        let shift = iface.len();
        let slices = d
            .slices
            .iter()
            .map(|s| Slice {
                gen: Arc::clone(&s.gen),
                offset: s.offset + shift,
            })
            .collect();
        Ok(Diagram::from_parts_unchecked(
            Arc::clone(&d.sig),
            iface.iter().chain(&d.dom).cloned().collect(),
            iface.iter().chain(&d.cod).cloned().collect(),
            slices,
        ))
    }

    /// `self ⊗ id_iface`.
    pub fn whisker_right(&self, iface: &[SortId]) -> Result<Diagram, DiagramError> {
        self.check_declared(iface)?;
        Ok(Diagram::from_parts_unchecked(
            Arc::clone(&self.sig),
            self.dom.iter().chain(iface).cloned().collect(),
            self.cod.iter().chain(iface).cloned().collect(),
            self.slices.clone(),
        ))
    }

    /// `self ⊗ other`, defined when at least one side is pure.
    ///
    /// With `other` pure this is `(self ⊗ id) ; (id ⊗ other)`; with only `self`
    /// pure it is `(id ⊗ other) ; (self ⊗ id)`.
    pub fn tensor(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        self.check_same_sig(other)?;
        if other.is_pure() {
            self.whisker_right(&other.dom)?
                .compose(&Diagram::whisker_left(&self.cod, other)?)
        } else if self.is_pure() {
            Diagram::whisker_left(&self.dom, other)?.compose(&self.whisker_right(&other.cod)?)
        } else {
            Err(DiagramError::PremonoidalTensorUndefined)
        }
    }

    pub fn is_pure(&self) -> bool {
        self.slices
            .iter()
            .all(|s| self.sig.generator(&s.gen).is_some_and(|g| g.is_pure()))
    }

    /// Ids of effectful slices, in order.
    pub fn effectful_ids(&self) -> Vec<&str> {
        self.slices
            .iter()
            .filter(|s| self.sig.generator(&s.gen).is_some_and(|g| !g.is_pure()))
            .map(|s| &*s.gen)
            .collect()
    }

    pub(crate) fn nodes(&self) -> Vec<Node> {
        self.slices
            .iter()
            .map(|s| {
                let g = self.sig.generator(&s.gen).expect("diagrams are well-typed");
                Node {
                    slice: s.clone(),
                    shape: Shape {
                        inputs: g.decl.dom.len(),
                        outputs: g.decl.cod.len(),
                        central: g.is_pure(),
                    },
                }
            })
            .collect()
    }

    /// Same boundaries, another arrangement of the same class; callers
    /// guarantee `slices` comes from exchanges, which preserve typing.
    pub(crate) fn with_slices(&self, slices: Vec<Slice>) -> Diagram {
        Diagram {
            sig: Arc::clone(&self.sig),
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            slices,
        }
    }

    /// Every exchange applicable to this arrangement.
    pub fn legal_exchanges(&self) -> Vec<ExchangeStep> {
        legal_steps(&self.nodes())
    }

    pub fn exchange(&self, step: ExchangeStep) -> Result<Diagram, DiagramError> {
        self.exchange_all(&[step])
    }

    /// Applies a sequence of exchanges, failing at the first illegal one.
    pub fn exchange_all(&self, steps: &[ExchangeStep]) -> Result<Diagram, DiagramError> {
        let mut nodes = self.nodes();
        for &step in steps {
            if !apply_step(&mut nodes, step) {
                return Err(DiagramError::IllegalExchange { index: step.index });
            }
        }
        Ok(self.with_slices(nodes.into_iter().map(|n| n.slice).collect()))
    }

    /// The least arrangement of this diagram's exchange class under
    /// `(offset, generator id)` lexicographic order.
    pub fn normal_form(&self) -> Diagram {
        self.with_slices(least(self.nodes(), self.dom.len()))
    }

    /// The normal form together with exchanges turning `self` into it.
    pub fn normal_form_with_witness(&self) -> (Diagram, Vec<ExchangeStep>) {
        let (nodes, witness) = normalize(self.nodes(), self.dom.len());
        (
            self.with_slices(nodes.into_iter().map(|n| n.slice).collect()),
            witness,
        )
    }

    /// Equality in the free effectful category: same boundaries and same normal form.
    pub fn equals(&self, other: &Diagram) -> Result<bool, DiagramError> {
        self.check_same_sig(other)?;
        if self.dom != other.dom || self.cod != other.cod {
            return Ok(false);
        }
        Ok(self.normal_form().slices == other.normal_form().slices)
    }
}
