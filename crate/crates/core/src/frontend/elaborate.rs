//! Elaboration: variables become wires on a stack, binds become slices.
//!
//! A bind consumes its arguments as an adjacent run of wires, in argument
//! order, and leaves its outputs in their place. Binds without arguments go
//! on the right, except pure ones with outputs (literals and constants):
//! those are central, so they are not placed when bound:
//! they float until first used and are then inserted next to the other
//! arguments, which keeps programs like "bind a constant, then combine it
//! with an earlier result" free of explicit permutations.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::{Expr, FrontendError, Pattern, Pos, Program, Rhs, Var};
use crate::diagram::{Diagram, Slice};
use crate::signature::{EffectfulSignature, GeneratorDecl, Interface, SortId};

#[derive(Clone, Debug)]
struct Wire {
    var: String,
    /// Unknown only for unannotated parameters not yet consumed.
    sort: Option<SortId>,
}

/// A pure nullary generator bound but not yet placed.
#[derive(Clone, Debug)]
struct Floating {
    gen: String,
    outputs: Vec<Wire>,
}

struct Elaborator<'a> {
    sig: &'a Arc<EffectfulSignature>,
    word: Vec<Wire>,
    /// Parameter sorts, filled in as they become known.
    params: Vec<(String, Option<SortId>, Pos)>,
    floating: Vec<Floating>,
    slices: Vec<Slice>,
    bound: HashSet<String>,
    used: HashSet<String>,
    binder_pos: HashMap<String, Pos>,
}

/// Builds the diagram denoted by `p` over `sig`.
pub fn elaborate(p: &Program, sig: &Arc<EffectfulSignature>) -> Result<Diagram, FrontendError> {
    let mut e = Elaborator {
        sig,
        word: Vec::new(),
        params: Vec::new(),
        floating: Vec::new(),
        slices: Vec::new(),
        bound: HashSet::new(),
        used: HashSet::new(),
        binder_pos: HashMap::new(),
    };
    for b in &p.params.binders {
        if let Some(sort) = &b.sort {
            e.check_sort_declared(sort, b.pos)?;
        }
        e.bind(&b.name, b.pos)?;
        e.params.push((b.name.clone(), b.sort.clone(), b.pos));
        e.word.push(Wire {
            var: b.name.clone(),
            sort: b.sort.clone(),
        });
    }
    for stmt in &p.stmts {
        e.stmt(&stmt.pattern, &stmt.rhs, stmt.pos)?;
    }
    e.finish(&p.result)
}

impl Elaborator<'_> {
    fn check_sort_declared(&self, sort: &SortId, pos: Pos) -> Result<(), FrontendError> {
        if self.sig.has_sort(sort) {
            Ok(())
        } else {
            Err(FrontendError::UndeclaredSort {
                sort: sort.clone(),
                pos,
            })
        }
    }

    fn bind(&mut self, name: &str, pos: Pos) -> Result<(), FrontendError> {
        if !self.bound.insert(name.to_owned()) {
            return Err(FrontendError::DuplicateBinding {
                name: name.to_owned(),
                pos,
            });
        }
        self.binder_pos.insert(name.to_owned(), pos);
        Ok(())
    }

    fn position(&self, name: &str) -> Option<usize> {
        self.word.iter().position(|w| w.var == name)
    }

    fn floating_index(&self, name: &str) -> Option<(usize, usize)> {
        self.floating
            .iter()
            .enumerate()
            .find_map(|(i, f)| f.outputs.iter().position(|w| w.var == name).map(|k| (i, k)))
    }

    /// Marks every variable of `vars` as used, checking linearity.
    fn consume(&mut self, vars: &[Var]) -> Result<(), FrontendError> {
        for v in vars {
            if !self.bound.contains(&v.name) {
                return Err(FrontendError::UnboundVariable {
                    name: v.name.clone(),
                    pos: v.pos,
                });
            }
            if !self.used.insert(v.name.clone()) {
                return Err(FrontendError::ReusedVariable {
                    name: v.name.clone(),
                    pos: v.pos,
                });
            }
        }
        Ok(())
    }

    /// Places floating constants among `vars`, then returns the position of
    /// the first one after checking that all sit adjacent and in order.
    fn align(&mut self, vars: &[Var], pos: Pos) -> Result<usize, FrontendError> {
        for (i, v) in vars.iter().enumerate() {
            let Some((f, k)) = self.floating_index(&v.name) else {
                continue;
            };
            let after_prev = i
                .checked_sub(1)
                .and_then(|j| self.position(&vars[j].name))
                .map(|p| p + 1);
            let before_next = || {
                vars[i + 1..]
                    .iter()
                    .enumerate()
                    .find_map(|(d, w)| self.position(&w.name).map(|p| p.saturating_sub(d)))
            };
            let target = after_prev.or_else(before_next).unwrap_or(self.word.len());
            let at = target.saturating_sub(k).min(self.word.len());
            let group = self.floating.remove(f);
            self.slices.push(Slice::new(&group.gen, at));
            self.word.splice(at..at, group.outputs);
        }
        let positions: Vec<Option<usize>> = vars.iter().map(|v| self.position(&v.name)).collect();
        let first = positions.first().copied().flatten().unwrap_or(self.word.len());
        let aligned = positions.iter().enumerate().all(|(i, p)| *p == Some(first + i));
        if aligned {
            Ok(first)
        } else {
            Err(FrontendError::UnalignedVariables {
                names: vars.iter().map(|v| v.name.clone()).collect(),
                pos,
            })
        }
    }

    fn lookup(&self, gen: &str, pos: Pos) -> Result<(&GeneratorDecl, bool), FrontendError> {
        let g = self
            .sig
            .generator(gen)
            .ok_or_else(|| FrontendError::UnknownGenerator {
                gen: gen.to_owned(),
                pos,
            })?;
        Ok((g.decl, g.is_pure()))
    }

    fn check_arity(gen: &str, expected: usize, found: usize, pos: Pos) -> Result<(), FrontendError> {
        if expected == found {
            Ok(())
        } else {
            Err(FrontendError::ArityMismatch {
                gen: gen.to_owned(),
                expected,
                found,
                pos,
            })
        }
    }

    /// Checks the sorts of the wires at `at..` against `dom`, fixing the sorts
    /// of unannotated parameters.
    fn check_sorts(&mut self, at: usize, dom: &[SortId], pos: Pos) -> Result<(), FrontendError> {
        for (i, expected) in dom.iter().enumerate() {
            let wire = &mut self.word[at + i];
            match &wire.sort {
                Some(found) if found != expected => {
                    return Err(FrontendError::SortMismatch {
                        name: wire.var.clone(),
                        expected: expected.clone(),
                        found: found.clone(),
                        pos,
                    })
                }
                Some(_) => {}
                None => {
                    wire.sort = Some(expected.clone());
                    if let Some(p) = self.params.iter_mut().find(|p| p.0 == wire.var) {
                        p.1 = Some(expected.clone());
                    }
                }
            }
        }
        Ok(())
    }

    fn outputs(&mut self, pattern: &Pattern, cod: &Interface) -> Result<Vec<Wire>, FrontendError> {
        let mut out = Vec::new();
        for (b, sort) in pattern.binders.iter().zip(cod) {
            if let Some(s) = &b.sort {
                if s != sort {
                    return Err(FrontendError::SortMismatch {
                        name: b.name.clone(),
                        expected: sort.clone(),
                        found: s.clone(),
                        pos: b.pos,
                    });
                }
            }
            self.bind(&b.name, b.pos)?;
            out.push(Wire {
                var: b.name.clone(),
                sort: Some(sort.clone()),
            });
        }
        Ok(out)
    }

    fn stmt(&mut self, pattern: &Pattern, rhs: &Rhs, pos: Pos) -> Result<(), FrontendError> {
        let (gen, args, pure_call) = match rhs {
            Rhs::Literal(text) => {
                let literal = || FrontendError::UnknownLiteral {
                    literal: text.clone(),
                    pos,
                };
                let g = self.sig.generator(text).ok_or_else(literal)?;
                if !g.is_pure() || !g.decl.dom.is_empty() || g.decl.cod.len() != 1 {
                    return Err(literal());
                }
                (text, &[][..], true)
            }
            Rhs::Pure { gen, args } => (gen, &args.vars[..], true),
            Rhs::Effect { gen, arg } => (gen, &arg.vars[..], false),
        };
        let (decl, is_pure) = self.lookup(gen, pos)?;
        let (dom, cod) = (decl.dom.clone(), decl.cod.clone());
        if is_pure != pure_call {
            let name = |pure| if pure { "pure" } else { "effectful" };
            return Err(FrontendError::PurityMismatch {
                gen: gen.clone(),
                declared: name(is_pure),
                used: name(pure_call),
                pos,
            });
        }
        Self::check_arity(gen, dom.len(), args.len(), pos)?;
        Self::check_arity(gen, cod.len(), pattern.binders.len(), pos)?;
        self.consume(args)?;
        let outputs = self.outputs(pattern, &cod)?;
        if is_pure && args.is_empty() && !outputs.is_empty() {
            self.floating.push(Floating {
                gen: gen.clone(),
                outputs,
            });
            return Ok(());
        }
        let at = self.align(args, pos)?;
        self.check_sorts(at, &dom, pos)?;
        self.slices.push(Slice::new(gen, at));
        self.word.splice(at..at + args.len(), outputs);
        Ok(())
    }

    fn finish(mut self, result: &Expr) -> Result<Diagram, FrontendError> {
        self.consume(&result.vars)?;
        let unused = self
            .word
            .iter()
            .map(|w| &w.var)
            .chain(
                self.floating
                    .iter()
                    .flat_map(|f| f.outputs.iter().map(|w| &w.var)),
            )
            .find(|v| !self.used.contains(*v));
        if let Some(v) = unused {
            return Err(FrontendError::UnusedVariable {
                name: v.clone(),
                pos: self.binder_pos[v],
            });
        }
        let pos = result.vars.first().map_or(Pos::default(), |v| v.pos);
        self.align(&result.vars, pos)?;
        let mut dom = Vec::with_capacity(self.params.len());
        for (name, sort, pos) in &self.params {
            dom.push(sort.clone().ok_or_else(|| FrontendError::UntypedParameter {
                name: name.clone(),
                pos: *pos,
            })?);
        }
        Ok(Diagram::new(self.sig, dom, self.slices).expect("elaboration keeps slices well-typed"))
    }
}
