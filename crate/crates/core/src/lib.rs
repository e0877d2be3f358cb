//! String diagrams for premonoidal and effectful categories.
//!
//! Effectful diagrams are built over an [`EffectfulSignature`], compared up to
//! the exchange of slices that involve at least one pure generator, and can be
//! translated to plain monoidal diagrams carrying an extra runtime wire.

pub mod diagram;
pub mod frontend;
pub mod io;
pub mod render;
pub mod runtime;
pub mod signature;
pub mod theory;

pub use diagram::{Diagram, DiagramError, ExchangeStep, Side, Slice};
pub use runtime::{RuntimeDiagram, RuntimeError, RuntimeSignature};
pub use signature::{EffectfulSignature, GeneratorDecl, Interface, Purity, SortId};
pub use theory::{
    Direction, Occurrence, ProofOutcome, ProofTrace, RewriteRule, SearchLimits, Theory, TheoryError,
};
