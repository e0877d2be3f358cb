//! JSON file formats for signatures, diagrams and theories.
//!
//! A diagram file carries its signature either inline or as a path relative
//! to the file itself:
//! `{"sig": <signature or path>, "dom": [..], "cod": [..], "slices": [{"gen": .., "offset": n}]}`.
//! Theory files are `{"sig": .., "rules": [{"name": .., "lhs": <diagram>, "rhs": <diagram>}]}`,
//! where rule diagrams may omit `sig`.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, Slice};
use crate::signature::{EffectfulSignature, Interface};
use crate::theory::{RewriteRule, Theory, TheoryError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid file {path}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}: no signature given inline, by path, or on the command line")]
    MissingSignature(PathBuf),
    #[error("rule `{0}` names a signature different from its theory's")]
    RuleSignature(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// A signature given inline or by path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigRef {
    Path(String),
    Inline(EffectfulSignature),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sig: Option<SigRef>,
    pub dom: Interface,
    pub cod: Interface,
    pub slices: Vec<Slice>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleFile {
    pub name: String,
    pub lhs: DiagramFile,
    pub rhs: DiagramFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryFile {
    pub sig: SigRef,
    pub rules: Vec<RuleFile>,
}

/// Reads `path`, or standard input when `path` is `-`.
pub fn read_text(path: &Path) -> Result<String, IoError> {
    let read = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())
    } else {
        fs::read_to_string(path)
    };
    read.map_err(|source| IoError::Read {
        path: path.to_owned(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|source| IoError::Json {
        path: path.to_owned(),
        source,
    })
}

fn base_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if path != Path::new("-") => p.to_owned(),
        _ => PathBuf::from("."),
    }
}

pub fn read_signature(path: &Path) -> Result<EffectfulSignature, IoError> {
    parse(path, &read_text(path)?)
}

impl SigRef {
    /// Loads the signature, resolving paths against `dir`.
    pub fn load(&self, dir: &Path) -> Result<EffectfulSignature, IoError> {
        match self {
            SigRef::Inline(sig) => Ok(sig.clone()),
            SigRef::Path(p) => read_signature(&dir.join(p)),
        }
    }
}

impl DiagramFile {
    pub fn from_diagram(d: &Diagram) -> DiagramFile {
        DiagramFile {
            sig: Some(SigRef::Inline((**d.sig()).clone())),
            dom: d.dom().clone(),
            cod: d.cod().clone(),
            slices: d.slices().to_vec(),
        }
    }

    /// Type-checks the file against `sig`.
    pub fn to_diagram(&self, sig: &Arc<EffectfulSignature>) -> Result<Diagram, DiagramError> {
        Diagram::with_boundary(sig, self.dom.clone(), self.cod.clone(), self.slices.clone())
    }
}

/// Reads a diagram file. `sig` takes precedence over the file's own signature.
pub fn read_diagram(path: &Path, sig: Option<&Arc<EffectfulSignature>>) -> Result<Diagram, IoError> {
    let file: DiagramFile = parse(path, &read_text(path)?)?;
    let sig = match (sig, &file.sig) {
        (Some(sig), _) => Arc::clone(sig),
        (None, Some(r)) => Arc::new(r.load(&base_dir(path))?),
        (None, None) => return Err(IoError::MissingSignature(path.to_owned())),
    };
    Ok(file.to_diagram(&sig)?)
}

/// Canonical serialization: pretty JSON, signature inline, trailing newline.
pub fn diagram_to_json(d: &Diagram) -> String {
    to_json(&DiagramFile::from_diagram(d))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file formats serialize");
    s.push('\n');
    s
}

pub fn read_theory(path: &Path) -> Result<Theory, IoError> {
    let file: TheoryFile = parse(path, &read_text(path)?)?;
    theory_from_file(&file, &base_dir(path))
}

pub fn theory_from_file(file: &TheoryFile, dir: &Path) -> Result<Theory, IoError> {
    let sig = Arc::new(file.sig.load(dir)?);
    let mut theory = Theory::new(Arc::clone(&sig), Vec::new())?;
    for rule in &file.rules {
        for side in [&rule.lhs, &rule.rhs] {
            if let Some(r) = &side.sig {
                if r.load(dir)? != *sig {
                    return Err(IoError::RuleSignature(rule.name.clone()));
                }
            }
        }
        theory.push(RewriteRule::new(
            rule.name.clone(),
            rule.lhs.to_diagram(&sig)?,
            rule.rhs.to_diagram(&sig)?,
        ))?;
    }
    Ok(theory)
}

/// The theory with its signature inline and rule diagrams without one.
pub fn theory_to_file(theory: &Theory) -> TheoryFile {
    let bare = |d: &Diagram| DiagramFile {
        sig: None,
        ..DiagramFile::from_diagram(d)
    };
    TheoryFile {
        sig: SigRef::Inline((**theory.sig()).clone()),
        rules: theory
            .rules()
            .iter()
            .map(|r| RuleFile {
                name: r.name.clone(),
                lhs: bare(&r.lhs),
                rhs: bare(&r.rhs),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::global_state_signature;
    use crate::theory::global_state_theory;

    #[test]
    fn diagram_round_trip() {
        let sig = Arc::new(global_state_signature());
        let d = Diagram::from_generator(&sig, "get")
            .unwrap()
            .compose(&Diagram::from_generator(&sig, "copy").unwrap())
            .unwrap();
        let json = diagram_to_json(&d);
        let file: DiagramFile = serde_json::from_str(&json).unwrap();
        let SigRef::Inline(inline) = file.sig.clone().unwrap() else {
            panic!("signature should be inline");
        };
        assert_eq!(file.to_diagram(&Arc::new(inline)).unwrap(), d);
        assert!(json.starts_with("{\n  \"sig\": {"));
        assert_eq!(diagram_to_json(&d), json);
    }

    #[test]
    fn compact_field_order() {
        let file = DiagramFile {
            sig: Some(SigRef::Path("gs.json".into())),
            dom: vec![],
            cod: vec!["X".into()],
            slices: vec![Slice::new("get", 0)],
        };
        assert_eq!(
            serde_json::to_string(&file).unwrap(),
            r#"{"sig":"gs.json","dom":[],"cod":["X"],"slices":[{"gen":"get","offset":0}]}"#
        );
    }

    #[test]
    fn theory_round_trip() {
        let theory = global_state_theory();
        let file = theory_to_file(&theory);
        let text = to_json(&file);
        let back: TheoryFile = serde_json::from_str(&text).unwrap();
        assert_eq!(theory_from_file(&back, Path::new(".")).unwrap(), theory);
    }
}
