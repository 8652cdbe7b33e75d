//! Where a model comes from: a catalog spec such as `blowup_abelian_codim:4,3`
//! or a JSON model file.

use std::fmt;
use std::path::Path;

use albtower_core::catalog::{self, CatalogEntry};
use albtower_core::model::{validate_model, Severity, ValidationOptions, ValidationReport};
use albtower_core::VarietyModel;
use anyhow::{Context, Result};

use crate::model_file::ModelFile;

const ALIASES: &[(&str, &str)] = &[
    ("blowup", "blowup_abelian4_curve"),
    ("codim", "blowup_abelian_codim"),
    ("fibered", "fibered_over_curve"),
    ("elliptic", "elliptic_surface_qI0"),
    ("cartwright_steger", "cartwright_steger_like"),
    ("line_bundle", "nondeg_line_bundle"),
];

pub fn resolve_alias(name: &str) -> &str {
    ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, full)| full)
}

/// `name` or `name:a,b,...`.
pub fn parse_builtin(spec: &str) -> Result<CatalogEntry> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n.trim(), p.trim()),
        None => (spec.trim(), ""),
    };
    let params = if params.is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<i64>()
                    .with_context(|| format!("bad parameter `{s}` in `{spec}`"))
            })
            .collect::<Result<_>>()?
    };
    Ok(catalog::builtin(resolve_alias(name), &params)?)
}

pub fn read_model(path: &Path) -> Result<VarietyModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ModelFile::parse(&text)
        .and_then(|f| f.to_model())
        .with_context(|| format!("parsing {}", path.display()))
}

/// A loaded model and a label for reports.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub label: String,
    pub model: VarietyModel,
}

impl Loaded {
    pub fn builtin(spec: &str) -> Result<Self> {
        let entry = parse_builtin(spec)?;
        let params: Vec<String> = entry.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        Ok(Loaded {
            label: format!("{}({})", entry.name, params.join(", ")),
            model: entry.model,
        })
    }

    pub fn file(path: &Path) -> Result<Self> {
        Ok(Loaded {
            label: path.display().to_string(),
            model: read_model(path)?,
        })
    }
}

/// The model failed validation; carries the report for printing.
#[derive(Debug)]
pub struct Rejected(pub ValidationReport);

impl fmt::Display for Rejected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model rejected by validation:")?;
        write!(f, "{}", render_report(&self.0))
    }
}

impl std::error::Error for Rejected {}

pub fn render_report(report: &ValidationReport) -> String {
    let mut out = String::new();
    for finding in &report.findings {
        let tag = match finding.severity {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        out.push_str(&format!("  {tag:<7} {}\n", finding.message));
    }
    out.push_str(&format!(
        "  {} errors, {} warnings, {} notes\n",
        report.count(Severity::Error),
        report.count(Severity::Warning),
        report.count(Severity::Info)
    ));
    out
}

/// Validates and returns the report, or `Rejected` when it has errors.
pub fn checked(model: &VarietyModel, opts: &ValidationOptions) -> std::result::Result<ValidationReport, Rejected> {
    let report = validate_model(model, opts);
    if report.is_accepted() {
        Ok(report)
    } else {
        Err(Rejected(report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_and_aliases() {
        assert_eq!(parse_builtin("blowup").unwrap().name, "blowup_abelian4_curve");
        let e = parse_builtin("codim:5, 3").unwrap();
        assert_eq!(e.parameters, vec![("g".into(), 5), ("c".into(), 3)]);
        assert_eq!(
            parse_builtin("cartwright_steger").unwrap().name,
            "cartwright_steger_like"
        );
        assert!(parse_builtin("abelian:x").is_err());
        assert!(parse_builtin("nonsense").is_err());
        assert!(parse_builtin("abelian:1,2").is_err());
    }

    #[test]
    fn labels_list_parameters() {
        assert_eq!(Loaded::builtin("fibered").unwrap().label, "fibered_over_curve(h=2)");
    }
}
