//! The runtime wire: effectful diagrams as plain monoidal diagrams.
//!
//! Every effectful generator `g: A -> B` is lifted to `run:g: [R]+A -> [R]+B`,
//! and the runtime sort `R` may cross any base sort through the braids
//! `sigma+:A: [R,A] -> [A,R]` and `sigma-:A: [A,R] -> [R,A]`. All generators of
//! the runtime signature are central, so its diagrams are ordinary monoidal
//! diagrams; the shared `R` wire is what stops effectful generators from
//! exchanging.

use std::sync::Arc;

use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, Slice};
use crate::signature::{EffectfulSignature, GeneratorDecl, Interface, Polygraph, SortId};
use crate::theory::{ProofOutcome, RewriteRule, SearchLimits, Theory, TheoryError};

/// Name of the reserved runtime sort.
pub const RUNTIME_SORT: &str = "R";
const LIFT_PREFIX: &str = "run:";
const OVER_PREFIX: &str = "sigma+:";
const UNDER_PREFIX: &str = "sigma-:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("sort `{0}` is reserved for the runtime")]
    ReservedSortClash(String),
    #[error("generator `{0}` uses a name reserved for runtime generators")]
    ReservedGeneratorClash(String),
    #[error("not a runtime signature: {0}")]
    NotRuntimeSignature(String),
    #[error("malformed runtime diagram: {0}")]
    MalformedRuntimeDiagram(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

pub fn lifted_id(gen: &str) -> String {
    format!("{LIFT_PREFIX}{gen}")
}

/// Braid moving the runtime rightward across one wire of `sort`.
pub fn braid_over_id(sort: &SortId) -> String {
    format!("{OVER_PREFIX}{sort}")
}

/// Braid moving the runtime leftward across one wire of `sort`.
pub fn braid_under_id(sort: &SortId) -> String {
    format!("{UNDER_PREFIX}{sort}")
}

fn is_reserved_id(id: &str) -> bool {
    [LIFT_PREFIX, OVER_PREFIX, UNDER_PREFIX]
        .iter()
        .any(|p| id.starts_with(p))
}

/// How a generator of the runtime signature acts on the runtime wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role<'a> {
    /// A base pure generator; never touches `R`.
    Pure,
    /// `run:g`, firing the base effectful generator `g`.
    Lifted(&'a str),
    /// `sigma+:A`.
    Over,
    /// `sigma-:A`.
    Under,
}

/// A base signature together with its runtime monoidal signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuntimeSignature {
    base: Arc<EffectfulSignature>,
    sig: Arc<EffectfulSignature>,
}

/// `R` plus lifted effectful generators and braids for every base sort.
pub fn runtime_signature(base: &Arc<EffectfulSignature>) -> Result<RuntimeSignature, RuntimeError> {
    RuntimeSignature::new(base)
}

impl RuntimeSignature {
    pub fn new(base: &Arc<EffectfulSignature>) -> Result<RuntimeSignature, RuntimeError> {
        let r = SortId::new(RUNTIME_SORT);
        if base.has_sort(&r) {
            return Err(RuntimeError::ReservedSortClash(RUNTIME_SORT.to_owned()));
        }
        if let Some(g) = base.generators().find(|g| is_reserved_id(&g.decl.id)) {
            return Err(RuntimeError::ReservedGeneratorClash(g.decl.id.clone()));
        }
        let with_r = |iface: &[SortId]| -> Interface {
            std::iter::once(r.clone()).chain(iface.iter().cloned()).collect()
        };
        let mut pure = base.pure.clone();
        pure.extend(
            base.effectful
                .iter()
                .map(|g| GeneratorDecl::new(lifted_id(&g.id), with_r(&g.dom), with_r(&g.cod))),
        );
        for a in &base.sorts {
            let ra = vec![r.clone(), a.clone()];
            let ar = vec![a.clone(), r.clone()];
            pure.push(GeneratorDecl::new(braid_over_id(a), ra.clone(), ar.clone()));
            pure.push(GeneratorDecl::new(braid_under_id(a), ar, ra));
        }
        let mut sorts = base.sorts.clone();
        sorts.push(r);
        Ok(RuntimeSignature {
            base: Arc::clone(base),
            sig: Arc::new(EffectfulSignature {
                sorts,
                pure,
                effectful: Vec::new(),
            }),
        })
    }

    /// Recovers the base signature from a runtime signature built by
    /// [`RuntimeSignature::new`].
    pub fn recover(sig: &EffectfulSignature) -> Result<RuntimeSignature, RuntimeError> {
        let not = |why: &str| RuntimeError::NotRuntimeSignature(why.to_owned());
        let r = SortId::new(RUNTIME_SORT);
        if !sig.has_sort(&r) {
            return Err(not("no runtime sort"));
        }
        if !sig.effectful.is_empty() {
            return Err(not("runtime signatures have no effectful generators"));
        }
        let strip = |iface: &[SortId]| -> Option<Interface> {
            match iface.split_first() {
                Some((first, rest)) if *first == r => Some(rest.to_vec()),
                _ => None,
            }
        };
        let mut base = EffectfulSignature {
            sorts: sig.sorts.iter().filter(|s| **s != r).cloned().collect(),
            ..EffectfulSignature::default()
        };
        for g in &sig.pure {
            if let Some(id) = g.id.strip_prefix(LIFT_PREFIX) {
                let (dom, cod) = strip(&g.dom)
                    .zip(strip(&g.cod))
                    .ok_or_else(|| not("lifted generator without a leading runtime wire"))?;
                base.effectful.push(GeneratorDecl::new(id, dom, cod));
            } else if !g.id.starts_with(OVER_PREFIX) && !g.id.starts_with(UNDER_PREFIX) {
                base.pure.push(g.clone());
            }
        }
        let rsig = RuntimeSignature::new(&Arc::new(base))?;
        if *rsig.sig != *sig {
            return Err(not("generators differ from the derived runtime signature"));
        }
        Ok(rsig)
    }

    pub fn base(&self) -> &Arc<EffectfulSignature> {
        &self.base
    }

    /// The monoidal signature over which runtime diagrams live.
    pub fn signature(&self) -> &Arc<EffectfulSignature> {
        &self.sig
    }

    pub fn runtime_sort(&self) -> SortId {
        SortId::new(RUNTIME_SORT)
    }

    /// What `id` does to the runtime wire; `None` when it is not a generator.
    pub fn role<'a>(&self, id: &'a str) -> Option<Role<'a>> {
        self.sig.generator(id)?;
        Some(if let Some(g) = id.strip_prefix(LIFT_PREFIX) {
            Role::Lifted(g)
        } else if id.starts_with(OVER_PREFIX) {
            Role::Over
        } else if id.starts_with(UNDER_PREFIX) {
            Role::Under
        } else {
            Role::Pure
        })
    }

    /// Braid invertibility for every base sort and naturality of the braids
    /// over every base pure generator.
    pub fn braid_theory(&self) -> Theory {
        let r = self.runtime_sort();
        let sig = &self.sig;
        let diagram = |dom: Interface, slices: Vec<Slice>| {
            Diagram::new(sig, dom, slices).expect("braid axioms are well-typed")
        };
        let mut rules = Vec::new();
        for a in &self.base.sorts {
            let ra = vec![r.clone(), a.clone()];
            let ar = vec![a.clone(), r.clone()];
            let (over, under) = (braid_over_id(a), braid_under_id(a));
            rules.push(RewriteRule::new(
                format!("cancel-over:{a}"),
                diagram(ra.clone(), vec![Slice::new(&over, 0), Slice::new(&under, 0)]),
                diagram(ra, Vec::new()),
            ));
            rules.push(RewriteRule::new(
                format!("cancel-under:{a}"),
                diagram(ar.clone(), vec![Slice::new(&under, 0), Slice::new(&over, 0)]),
                diagram(ar, Vec::new()),
            ));
        }
        for v in &self.base.pure {
            let with_r: Interface = std::iter::once(r.clone()).chain(v.dom.iter().cloned()).collect();
            let r_last: Interface = v.dom.iter().cloned().chain(std::iter::once(r.clone())).collect();
            let overs = |iface: &[SortId]| -> Vec<Slice> {
                iface
                    .iter()
                    .enumerate()
                    .map(|(i, s)| Slice::new(&braid_over_id(s), i))
                    .collect()
            };
            let unders = |iface: &[SortId]| -> Vec<Slice> {
                iface
                    .iter()
                    .enumerate()
                    .rev()
                    .map(|(i, s)| Slice::new(&braid_under_id(s), i))
                    .collect()
            };
            // v left of the runtime, after crossing, equals v right of it.
            let mut lhs = overs(&v.dom);
            lhs.push(Slice::new(&v.id, 0));
            let mut rhs = vec![Slice::new(&v.id, 1)];
            rhs.extend(overs(&v.cod));
            rules.push(RewriteRule::new(
                format!("natural-over:{}", v.id),
                diagram(with_r.clone(), lhs),
                diagram(with_r, rhs),
            ));
            let mut lhs = vec![Slice::new(&v.id, 0)];
            lhs.extend(unders(&v.cod));
            let mut rhs = unders(&v.dom);
            rhs.push(Slice::new(&v.id, 1));
            rules.push(RewriteRule::new(
                format!("natural-under:{}", v.id),
                diagram(r_last.clone(), lhs),
                diagram(r_last, rhs),
            ));
        }
        Theory::new(Arc::clone(sig), rules).expect("braid axioms are well-typed")
    }
}

/// A diagram over a runtime signature with exactly one `R`, leftmost, at
/// both boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuntimeDiagram {
    rsig: Arc<RuntimeSignature>,
    diagram: Diagram,
}

impl RuntimeDiagram {
    pub fn new(rsig: &Arc<RuntimeSignature>, diagram: Diagram) -> Result<RuntimeDiagram, RuntimeError> {
        if **diagram.sig() != *rsig.sig {
            return Err(DiagramError::SignatureMismatch.into());
        }
        let r = rsig.runtime_sort();
        for (name, word) in [("domain", diagram.dom()), ("codomain", diagram.cod())] {
            let count = word.iter().filter(|s| **s == r).count();
            if count != 1 {
                return Err(RuntimeError::MalformedRuntimeDiagram(format!(
                    "{name} carries {count} runtime wires"
                )));
            }
            if word[0] != r {
                return Err(RuntimeError::MalformedRuntimeDiagram(format!(
                    "runtime wire is not leftmost in the {name}"
                )));
            }
        }
        Ok(RuntimeDiagram {
            rsig: Arc::clone(rsig),
            diagram,
        })
    }

    /// Reads a diagram over a runtime signature, recovering the base signature.
    pub fn from_diagram(diagram: Diagram) -> Result<RuntimeDiagram, RuntimeError> {
        let rsig = Arc::new(RuntimeSignature::recover(diagram.sig())?);
        RuntimeDiagram::new(&rsig, diagram)
    }

    pub fn runtime_signature(&self) -> &Arc<RuntimeSignature> {
        &self.rsig
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn into_diagram(self) -> Diagram {
        self.diagram
    }

    /// Position of `R` at every level, from domain to codomain.
    pub fn runtime_positions(&self) -> Vec<usize> {
        let r = self.rsig.runtime_sort();
        self.diagram
            .levels()
            .iter()
            .map(|w| w.iter().position(|s| *s == r).expect("R is conserved"))
            .collect()
    }
}

/// Translates `d` into the runtime monoidal category, keeping `R` leftmost
/// between effectful generators.
pub fn encode(rsig: &Arc<RuntimeSignature>, d: &Diagram) -> Result<RuntimeDiagram, RuntimeError> {
    if **d.sig() != *rsig.base {
        return Err(DiagramError::SignatureMismatch.into());
    }
    let r = rsig.runtime_sort();
    let levels = d.levels();
    let mut slices = Vec::new();
    for (slice, word) in d.slices().iter().zip(&levels) {
        let gen = d.sig().generator(&slice.gen).expect("diagrams are well-typed");
        if gen.is_pure() {
            slices.push(Slice {
                gen: Arc::clone(&slice.gen),
                offset: slice.offset + 1,
            });
            continue;
        }
        let k = slice.offset;
        slices.extend((0..k).map(|i| Slice::new(&braid_over_id(&word[i]), i)));
        slices.push(Slice::new(&lifted_id(&slice.gen), k));
        slices.extend((0..k).rev().map(|i| Slice::new(&braid_under_id(&word[i]), i)));
    }
    let with_r =
        |iface: &[SortId]| -> Interface { std::iter::once(r.clone()).chain(iface.iter().cloned()).collect() };
    let diagram = Diagram::with_boundary(&rsig.sig, with_r(d.dom()), with_r(d.cod()), slices)?;
    RuntimeDiagram::new(rsig, diagram)
}

/// The base diagram whose encoding is braid-equivalent to `rd`: braids are
/// erased and each lifted generator is recorded where the runtime sat.
pub fn decode(rd: &RuntimeDiagram) -> Result<Diagram, RuntimeError> {
    let rsig = &rd.rsig;
    let d = &rd.diagram;
    let malformed = |i: usize, why: &str| {
        RuntimeError::MalformedRuntimeDiagram(format!("slice {i} (`{}`) {why}", d.slices()[i].gen))
    };
    let mut r = 0;
    let mut slices = Vec::with_capacity(d.len());
    for (i, slice) in d.slices().iter().enumerate() {
        let gen = rsig.sig.generator(&slice.gen).expect("diagrams are well-typed");
        let (inputs, outputs) = (gen.decl.dom.len(), gen.decl.cod.len());
        let o = slice.offset;
        match rsig.role(&slice.gen).expect("diagrams are well-typed") {
            Role::Pure => {
                if o + inputs <= r {
                    slices.push(slice.clone());
                    r = r + outputs - inputs;
                } else if o > r {
                    slices.push(Slice {
                        gen: Arc::clone(&slice.gen),
                        offset: o - 1,
                    });
                } else {
                    return Err(malformed(i, "consumes the runtime wire"));
                }
            }
            Role::Lifted(g) if o == r => slices.push(Slice::new(g, r)),
            Role::Over if o == r => r += 1,
            Role::Under if o + 1 == r => r -= 1,
            _ => return Err(malformed(i, "does not meet the runtime wire where it expects it")),
        }
    }
    let strip = |iface: &[SortId]| iface[1..].to_vec();
    Ok(Diagram::with_boundary(
        &rsig.base,
        strip(d.dom()),
        strip(d.cod()),
        slices,
    )?)
}

/// `encode(decode(rd))`: the representative with `R` leftmost between
/// effectful generators and every braid routed straight to its generator.
pub fn braid_canonical(rd: &RuntimeDiagram) -> Result<RuntimeDiagram, RuntimeError> {
    encode(&rd.rsig, &decode(rd)?)
}

/// Equality of runtime diagrams modulo the braid axioms and monoidal exchange.
pub fn equals_runtime(a: &RuntimeDiagram, b: &RuntimeDiagram) -> Result<bool, RuntimeError> {
    if a.rsig != b.rsig {
        return Err(DiagramError::SignatureMismatch.into());
    }
    Ok(decode(a)?.equals(&decode(b)?)?)
}

/// A rewrite witness from `rd` to its braid-canonical form using only the
/// braid axioms, found by bounded search.
pub fn braid_witness(rd: &RuntimeDiagram, limits: &SearchLimits) -> Result<ProofOutcome, RuntimeError> {
    let target = braid_canonical(rd)?;
    let theory = rd.rsig.braid_theory();
    theory
        .prove_equal(&rd.diagram, &target.diagram, limits)
        .map_err(|e| match e {
            TheoryError::Diagram(e) => RuntimeError::Diagram(e),
            other => RuntimeError::MalformedRuntimeDiagram(other.to_string()),
        })
}

/// Every generator of a plain polygraph declared effectful: the free
/// premonoidal category over it.
pub fn premonoidal_free(plain: &Polygraph) -> EffectfulSignature {
    EffectfulSignature {
        sorts: plain.sorts.clone(),
        pure: Vec::new(),
        effectful: plain.generators.clone(),
    }
}
