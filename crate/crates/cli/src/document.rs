//! The `ld-system/1` JSON document and its validation into core types.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ld_core::{InfoSystem, LogBase, OutcomeSpace, Partition, RefinementMap};
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const SCHEMA_VERSION: &str = "ld-system/1";

/// One outcome, or one child of a refined outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeEntry {
    pub label: String,
    pub p: f64,
}

/// Parent label to its children, each child weighted.
pub type SplitTable = BTreeMap<String, Vec<OutcomeEntry>>;

/// A system on disk. Variables are lists of blocks, each block a list of
/// outcome labels; they load in name order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub schema: String,
    pub outcomes: Vec<OutcomeEntry>,
    #[serde(default)]
    pub variables: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinements: Option<SplitTable>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadOptions {
    pub base: LogBase,
    /// Rescale all weights, refinements included, so the outcomes sum to one.
    pub normalize: bool,
    /// Warn when the outcomes do not sum to one within `tol`.
    pub check_normalization: bool,
    pub tol: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            base: LogBase::BITS,
            normalize: false,
            check_normalization: true,
            tol: 1e-9,
        }
    }
}

/// A validated document.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub system: InfoSystem,
    pub refinement: Option<RefinementMap>,
    /// Factor applied to every weight on load; 1 unless normalising.
    pub scale: f64,
    pub warnings: Vec<String>,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn json_failure(origin: &str, e: serde_json::Error) -> Failure {
    Failure::Parse(format!("{origin}:{}:{}: {e}", e.line(), e.column()))
}

/// Parses and schema-checks a document without building anything.
pub fn parse_document(text: &str, origin: &str) -> Result<SystemDocument, Failure> {
    let doc: SystemDocument = serde_json::from_str(text).map_err(|e| json_failure(origin, e))?;
    if doc.schema != SCHEMA_VERSION {
        return Err(Failure::Parse(format!(
            "{origin}: field `schema`: expected \"{SCHEMA_VERSION}\", found \"{}\"",
            doc.schema
        )));
    }
    Ok(doc)
}

pub fn read_document(path: &Path) -> Result<SystemDocument, Failure> {
    parse_document(&read(path)?, &path.display().to_string())
}

/// Reads a standalone refinement file: an object mapping parent labels to
/// weighted children.
pub fn read_refinement(path: &Path) -> Result<SplitTable, Failure> {
    let origin = path.display().to_string();
    serde_json::from_str(&read(path)?).map_err(|e| json_failure(&origin, e))
}

/// Builds the refinement map of `space`, rescaling child weights by `scale`.
pub fn build_refinement(
    space: &OutcomeSpace,
    table: &SplitTable,
    scale: f64,
    origin: &str,
) -> Result<RefinementMap, Failure> {
    let splits: Vec<(&str, Vec<(&str, f64)>)> = table
        .iter()
        .map(|(parent, kids)| {
            let kids = kids
                .iter()
                .map(|c| (c.label.as_str(), c.p * scale))
                .collect();
            (parent.as_str(), kids)
        })
        .collect();
    RefinementMap::new(space, &splits).map_err(|e| Failure::at(origin, "refinements", e))
}

impl SystemDocument {
    pub fn build(&self, origin: &str, opts: &LoadOptions) -> Result<Loaded, Failure> {
        let mut warnings = Vec::new();
        let total: f64 = self.outcomes.iter().map(|o| o.p).sum();
        let scale = if opts.normalize && total > 0.0 {
            1.0 / total
        } else {
            1.0
        };
        if !opts.normalize && opts.check_normalization && (total - 1.0).abs() > opts.tol {
            warnings.push(format!(
                "{origin}: outcome weights sum to {total}, not 1; proceeding with the weights as given"
            ));
        }
        let labels = self.outcomes.iter().map(|o| o.label.clone());
        let weights: Vec<f64> = self.outcomes.iter().map(|o| o.p * scale).collect();
        let space =
            OutcomeSpace::new(labels, &weights).map_err(|e| Failure::at(origin, "outcomes", e))?;
        let mut variables = Vec::with_capacity(self.variables.len());
        for (name, blocks) in &self.variables {
            let p = Partition::from_blocks(&space, blocks)
                .map_err(|e| Failure::at(origin, &format!("variables.{name}"), e))?;
            variables.push((name.clone(), p));
        }
        let refinement = self
            .refinements
            .as_ref()
            .map(|table| build_refinement(&space, table, scale, origin))
            .transpose()?;
        let system = InfoSystem::new(space, variables)
            .map_err(|e| Failure::at(origin, "variables", e))?
            .with_base(opts.base);
        Ok(Loaded {
            system,
            refinement,
            scale,
            warnings,
        })
    }
}

pub fn load_system(path: &Path, opts: &LoadOptions) -> Result<Loaded, Failure> {
    read_document(path)?.build(&path.display().to_string(), opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"{
        "schema": "ld-system/1",
        "outcomes": [
            {"label": "1", "p": 0.1}, {"label": "2", "p": 0.2},
            {"label": "3", "p": 0.3}, {"label": "4", "p": 0.4}
        ],
        "variables": {"X": [["1", "3"], ["2", "4"]], "Y": [["1", "2"], ["3", "4"]]}
    }"#;

    #[test]
    fn worked_document_loads() {
        let doc = parse_document(WORKED, "worked").unwrap();
        let loaded = doc.build("worked", &LoadOptions::default()).unwrap();
        assert!(loaded.warnings.is_empty());
        assert_eq!(loaded.system.variables().len(), 2);
        assert!(loaded.refinement.is_none());
    }

    #[test]
    fn wrong_schema_is_a_parse_failure() {
        let text = WORKED.replace("ld-system/1", "ld-system/0");
        assert!(matches!(parse_document(&text, "x"), Err(Failure::Parse(_))));
    }

    #[test]
    fn unknown_field_is_a_parse_failure() {
        let text = WORKED.replace("\"variables\"", "\"vars\"");
        let Err(Failure::Parse(msg)) = parse_document(&text, "x") else {
            panic!("expected a parse failure");
        };
        assert!(msg.contains("vars"), "{msg}");
    }

    #[test]
    fn overlapping_blocks_are_semantic() {
        let text = WORKED.replace(r#"["2", "4"]"#, r#"["1", "2", "4"]"#);
        let doc = parse_document(&text, "x").unwrap();
        let Err(Failure::Semantic(msg)) = doc.build("x", &LoadOptions::default()) else {
            panic!("expected a semantic failure");
        };
        assert!(msg.contains("variables.X"), "{msg}");
    }

    #[test]
    fn unnormalised_weights_warn_or_rescale() {
        let text = WORKED.replace("0.4", "0.5");
        let doc = parse_document(&text, "x").unwrap();
        let loaded = doc.build("x", &LoadOptions::default()).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
        assert!((loaded.system.space().total_weight() - 1.1).abs() < 1e-12);

        let quiet = LoadOptions {
            check_normalization: false,
            ..LoadOptions::default()
        };
        assert!(doc.build("x", &quiet).unwrap().warnings.is_empty());

        let scaled = LoadOptions {
            normalize: true,
            ..LoadOptions::default()
        };
        let loaded = doc.build("x", &scaled).unwrap();
        assert!(loaded.warnings.is_empty());
        assert!((loaded.system.space().total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refinements_scale_with_normalisation() {
        let text = r#"{
            "schema": "ld-system/1",
            "outcomes": [{"label": "a", "p": 2}, {"label": "b", "p": 2}],
            "refinements": {"a": [{"label": "a1", "p": 1}, {"label": "a2", "p": 1}]}
        }"#;
        let doc = parse_document(text, "x").unwrap();
        let opts = LoadOptions {
            normalize: true,
            ..LoadOptions::default()
        };
        let map = doc.build("x", &opts).unwrap().refinement.unwrap();
        assert_eq!(map.child().weights(), &[0.25, 0.25, 0.5]);
    }
}
