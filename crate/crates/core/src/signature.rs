//! Signatures: the generating data of free effectful categories.
//!
//! An [`EffectfulSignature`] is a pair of polygraphs over one shared set of
//! sorts. Generators in the `pure` half interchange with everything; generators
//! in the `effectful` half only interchange with pure ones. Purity is a
//! property of the declaration and is never inferred.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of an object (wire type) of a signature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SortId(Arc<str>);

impl SortId {
    pub fn new(name: impl Into<String>) -> Self {
        SortId(Arc::from(name.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SortId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SortId {
    fn from(s: &str) -> Self {
        SortId(Arc::from(s))
    }
}

impl From<String> for SortId {
    fn from(s: String) -> Self {
        SortId(Arc::from(s))
    }
}

/// An ordered word of sorts. The empty word is the monoidal unit.
pub type Interface = Vec<SortId>;

/// Builds an [`Interface`] from anything yielding sort names.
pub fn interface<I, S>(sorts: I) -> Interface
where
    I: IntoIterator<Item = S>,
    S: Into<SortId>,
{
    sorts.into_iter().map(Into::into).collect()
}

/// Renders an interface as `[A,B]`, or `[]` for the unit.
pub fn show_interface(iface: &[SortId]) -> String {
    let names: Vec<&str> = iface.iter().map(SortId::as_str).collect();
    format!("[{}]", names.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorDecl {
    pub id: String,
    pub dom: Interface,
    pub cod: Interface,
}

impl GeneratorDecl {
    pub fn new(id: impl Into<String>, dom: Interface, cod: Interface) -> Self {
        GeneratorDecl {
            id: id.into(),
            dom,
            cod,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Purity {
    Pure,
    Effectful,
}

/// A generator looked up in a signature, together with the half it was declared in.
#[derive(Clone, Copy, Debug)]
pub struct Generator<'a> {
    pub decl: &'a GeneratorDecl,
    pub purity: Purity,
}

impl Generator<'_> {
    pub fn is_pure(&self) -> bool {
        self.purity == Purity::Pure
    }
}

/// A polygraph couple: pure and effectful generators over the same sorts.
///
/// Serialized as `{"sorts":[..],"pure":[..],"effectful":[..]}` with arrays in
/// declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectfulSignature {
    #[serde(default)]
    pub sorts: Vec<SortId>,
    #[serde(default)]
    pub pure: Vec<GeneratorDecl>,
    #[serde(default)]
    pub effectful: Vec<GeneratorDecl>,
}

impl EffectfulSignature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_sort(mut self, name: impl Into<SortId>) -> Self {
        self.sorts.push(name.into());
        self
    }

    pub fn with_pure(mut self, id: &str, dom: &[&str], cod: &[&str]) -> Self {
        self.pure.push(GeneratorDecl::new(
            id,
            interface(dom.iter().copied()),
            interface(cod.iter().copied()),
        ));
        self
    }

    pub fn with_effectful(mut self, id: &str, dom: &[&str], cod: &[&str]) -> Self {
        self.effectful.push(GeneratorDecl::new(
            id,
            interface(dom.iter().copied()),
            interface(cod.iter().copied()),
        ));
        self
    }

    pub fn has_sort(&self, sort: &SortId) -> bool {
        self.sorts.contains(sort)
    }

    pub fn generator(&self, id: &str) -> Option<Generator<'_>> {
        if let Some(decl) = self.pure.iter().find(|g| g.id == id) {
            return Some(Generator {
                decl,
                purity: Purity::Pure,
            });
        }
        self.effectful.iter().find(|g| g.id == id).map(|decl| Generator {
            decl,
            purity: Purity::Effectful,
        })
    }

    /// All generators, pure ones first, each in declaration order.
    pub fn generators(&self) -> impl Iterator<Item = Generator<'_>> {
        let pure = self.pure.iter().map(|decl| Generator {
            decl,
            purity: Purity::Pure,
        });
        let eff = self.effectful.iter().map(|decl| Generator {
            decl,
            purity: Purity::Effectful,
        });
        pure.chain(eff)
    }

    /// Returns the first sort of `iface` not declared here, if any.
    pub fn undeclared_sort<'a>(&self, iface: &'a [SortId]) -> Option<&'a SortId> {
        iface.iter().find(|s| !self.has_sort(s))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen_sorts = HashSet::new();
        for sort in &self.sorts {
            if sort.as_str().is_empty() {
                violations.push(Violation::EmptySortName);
            } else if !seen_sorts.insert(sort) {
                violations.push(Violation::DuplicateSort { sort: sort.clone() });
            }
        }
        let mut seen_ids = HashSet::new();
        for gen in self.generators() {
            let decl = gen.decl;
            if decl.id.is_empty() {
                violations.push(Violation::EmptyGeneratorId);
            } else if !seen_ids.insert(decl.id.as_str()) {
                violations.push(Violation::DuplicateGenerator {
                    generator: decl.id.clone(),
                });
            }
            for sort in decl.dom.iter().chain(&decl.cod) {
                if !self.has_sort(sort) {
                    violations.push(Violation::UndeclaredSort {
                        generator: decl.id.clone(),
                        sort: sort.clone(),
                    });
                }
            }
        }
        ValidationReport { violations }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    EmptySortName,
    DuplicateSort { sort: SortId },
    EmptyGeneratorId,
    DuplicateGenerator { generator: String },
    UndeclaredSort { generator: String, sort: SortId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptySortName => write!(f, "empty sort name"),
            Violation::DuplicateSort { sort } => write!(f, "sort `{sort}` declared twice"),
            Violation::EmptyGeneratorId => write!(f, "empty generator id"),
            Violation::DuplicateGenerator { generator } => {
                write!(f, "generator `{generator}` declared twice")
            }
            Violation::UndeclaredSort { generator, sort } => {
                write!(f, "generator `{generator}` uses undeclared sort `{sort}`")
            }
        }
    }
}

/// Outcome of [`EffectfulSignature::validate`]. Violations are data, not errors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A plain polygraph, with no pure/effectful split.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygraph {
    #[serde(default)]
    pub sorts: Vec<SortId>,
    #[serde(default)]
    pub generators: Vec<GeneratorDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("signature morphism has no mapping for `{0}`")]
    MissingMapping(String),
}

/// A relabeling of sorts and generators.
///
/// Generators keep the half they were declared in, so pure maps to pure and
/// effectful to effectful.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureMorphism {
    pub sort_map: BTreeMap<SortId, SortId>,
    pub gen_map: BTreeMap<String, String>,
}

impl SignatureMorphism {
    pub fn identity(sig: &EffectfulSignature) -> Self {
        SignatureMorphism {
            sort_map: sig.sorts.iter().map(|s| (s.clone(), s.clone())).collect(),
            gen_map: sig
                .generators()
                .map(|g| (g.decl.id.clone(), g.decl.id.clone()))
                .collect(),
        }
    }

    fn map_sort(&self, sort: &SortId) -> Result<SortId, SignatureError> {
        self.sort_map
            .get(sort)
            .cloned()
            .ok_or_else(|| SignatureError::MissingMapping(sort.to_string()))
    }

    fn map_gen(&self, id: &str) -> Result<String, SignatureError> {
        self.gen_map
            .get(id)
            .cloned()
            .ok_or_else(|| SignatureError::MissingMapping(id.to_owned()))
    }

    fn map_decl(&self, decl: &GeneratorDecl) -> Result<GeneratorDecl, SignatureError> {
        let map_iface = |iface: &[SortId]| -> Result<Interface, SignatureError> {
            iface.iter().map(|s| self.map_sort(s)).collect()
        };
        Ok(GeneratorDecl {
            id: self.map_gen(&decl.id)?,
            dom: map_iface(&decl.dom)?,
            cod: map_iface(&decl.cod)?,
        })
    }

    /// The image of `sig`. Sorts and declarations identified by a non-injective
    /// map are merged, keeping the first occurrence.
    pub fn apply(&self, sig: &EffectfulSignature) -> Result<EffectfulSignature, SignatureError> {
        let mut sorts = Vec::new();
        for s in &sig.sorts {
            let t = self.map_sort(s)?;
            if !sorts.contains(&t) {
                sorts.push(t);
            }
        }
        let map_half = |decls: &[GeneratorDecl]| -> Result<Vec<GeneratorDecl>, SignatureError> {
            let mut out: Vec<GeneratorDecl> = Vec::new();
            for d in decls {
                let m = self.map_decl(d)?;
                if !out.contains(&m) {
                    out.push(m);
                }
            }
            Ok(out)
        };
        Ok(EffectfulSignature {
            sorts,
            pure: map_half(&sig.pure)?,
            effectful: map_half(&sig.effectful)?,
        })
    }

    /// `self` followed by `next`, restricted to the domain of `self`.
    pub fn then(&self, next: &SignatureMorphism) -> Result<SignatureMorphism, SignatureError> {
        let sort_map = self
            .sort_map
            .iter()
            .map(|(k, v)| Ok((k.clone(), next.map_sort(v)?)))
            .collect::<Result<_, SignatureError>>()?;
        let gen_map = self
            .gen_map
            .iter()
            .map(|(k, v)| Ok((k.clone(), next.map_gen(v)?)))
            .collect::<Result<_, SignatureError>>()?;
        Ok(SignatureMorphism { sort_map, gen_map })
    }
}

/// The global-state signature: one sort `X`, pure `copy`/`discard`, effectful
/// `get`/`put`.
pub fn global_state_signature() -> EffectfulSignature {
    EffectfulSignature::new()
        .with_sort("X")
        .with_pure("copy", &["X"], &["X", "X"])
        .with_pure("discard", &["X"], &[])
        .with_effectful("get", &[], &["X"])
        .with_effectful("put", &["X"], &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_state_signature_is_valid() {
        assert!(global_state_signature().validate().is_ok());
    }

    #[test]
    fn empty_signature_is_valid() {
        assert!(EffectfulSignature::new().validate().is_ok());
    }

    #[test]
    fn undeclared_sort_is_named() {
        let sig = EffectfulSignature::new()
            .with_sort("X")
            .with_pure("f", &["Y"], &["X"]);
        let report = sig.validate();
        assert_eq!(
            report.violations,
            vec![Violation::UndeclaredSort {
                generator: "f".into(),
                sort: "Y".into()
            }]
        );
        assert!(report.to_string().contains("`f`"));
        assert!(report.to_string().contains("`Y`"));
    }

    #[test]
    fn ids_are_unique_across_halves() {
        let sig = EffectfulSignature::new()
            .with_sort("X")
            .with_pure("f", &["X"], &["X"])
            .with_effectful("f", &["X"], &["X"]);
        assert_eq!(
            sig.validate().violations,
            vec![Violation::DuplicateGenerator {
                generator: "f".into()
            }]
        );
    }

    #[test]
    fn duplicate_and_empty_sorts() {
        let sig = EffectfulSignature::new()
            .with_sort("X")
            .with_sort("X")
            .with_sort("");
        assert_eq!(
            sig.validate().violations,
            vec![
                Violation::DuplicateSort { sort: "X".into() },
                Violation::EmptySortName
            ]
        );
    }

    #[test]
    fn violations_serialize_with_kind() {
        let report = EffectfulSignature::new().with_sort("X").with_sort("X").validate();
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            r#"{"violations":[{"kind":"duplicate-sort","sort":"X"}]}"#
        );
    }

    #[test]
    fn lookup_reports_purity() {
        let sig = global_state_signature();
        assert!(sig.generator("copy").unwrap().is_pure());
        assert!(!sig.generator("get").unwrap().is_pure());
        assert!(sig.generator("nope").is_none());
    }

    #[test]
    fn identity_morphism_is_identity() {
        let sig = global_state_signature();
        let id = SignatureMorphism::identity(&sig);
        assert_eq!(id.apply(&sig).unwrap(), sig);
    }

    #[test]
    fn renaming_a_sort() {
        let sig = global_state_signature();
        let mut m = SignatureMorphism::identity(&sig);
        m.sort_map.insert("X".into(), "S".into());
        let expected = EffectfulSignature::new()
            .with_sort("S")
            .with_pure("copy", &["S"], &["S", "S"])
            .with_pure("discard", &["S"], &[])
            .with_effectful("get", &[], &["S"])
            .with_effectful("put", &["S"], &[]);
        assert_eq!(m.apply(&sig).unwrap(), expected);
    }

    #[test]
    fn partial_morphism_is_rejected() {
        let sig = global_state_signature();
        let mut m = SignatureMorphism::identity(&sig);
        m.gen_map.remove("put");
        assert_eq!(m.apply(&sig), Err(SignatureError::MissingMapping("put".into())));
    }

    #[test]
    fn json_field_order() {
        let sig = EffectfulSignature::new()
            .with_sort("X")
            .with_effectful("get", &[], &["X"]);
        assert_eq!(
            serde_json::to_string(&sig).unwrap(),
            r#"{"sorts":["X"],"pure":[],"effectful":[{"id":"get","dom":[],"cod":["X"]}]}"#
        );
    }
}
