//! Experiment configuration: the JSON document form, validation, and
//! default resolution.

use std::collections::BTreeSet;

use riesz_lab::family::Family;
use riesz_lab::grid::{spaced, Spacing};
use riesz_lab::semiclassics::default_alpha;
use riesz_lab::spectrum::DEFAULT_SPECTRUM_BUDGET;
use riesz_lab::{Body, BoundaryCondition, Domain};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_PARAMETER_POINTS: usize = 64;
pub const DEFAULT_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_GAMMA_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Spectrum,
    Riesz,
    Weyl,
    Polya,
    Bly,
    Excess,
    Critical,
    Margin,
    Optimize,
    Multicomp,
    Scan,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Spectrum => "spectrum",
            Task::Riesz => "riesz",
            Task::Weyl => "weyl",
            Task::Polya => "polya",
            Task::Bly => "bly",
            Task::Excess => "excess",
            Task::Critical => "critical",
            Task::Margin => "margin",
            Task::Optimize => "optimize",
            Task::Multicomp => "multicomp",
            Task::Scan => "scan",
        }
    }

    /// Task-specific keys accepted on top of the common ones.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Task::Spectrum | Task::Polya => &["domain", "lambda"],
            Task::Riesz | Task::Bly => &["domain", "gamma", "lambda"],
            Task::Weyl => &["domain", "gamma", "lambda", "alpha"],
            Task::Excess | Task::Margin => &["family", "gamma", "lambda", "points"],
            Task::Critical => &["family", "gamma_grid", "lambda", "points"],
            Task::Optimize | Task::Scan => &["family", "gamma", "lambda", "points", "tol"],
            Task::Multicomp => &["candidates", "gamma", "lambda"],
        }
    }

    /// Keys that must be present.
    fn required(self) -> &'static [&'static str] {
        match self {
            Task::Spectrum | Task::Polya => &["domain", "lambda"],
            Task::Bly => &["domain", "lambda"],
            Task::Riesz | Task::Weyl => &["domain", "gamma", "lambda"],
            Task::Excess | Task::Margin | Task::Optimize | Task::Scan => &["family", "gamma", "lambda"],
            Task::Critical => &["family", "lambda"],
            Task::Multicomp => &["candidates", "gamma", "lambda"],
        }
    }
}

const COMMON_KEYS: [&str; 5] = ["bc", "output", "budget", "threads", "task"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

/// Spectral parameters: an explicit list or a generated range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    List(Vec<f64>),
    Range(LambdaRange),
}

impl LambdaSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let v = match self {
            LambdaSpec::List(v) => v.clone(),
            LambdaSpec::Range(r) => spaced(r.min, r.max, r.points, r.spacing)?,
        };
        riesz_lab::grid::check_increasing(&v).map_err(|e| CliError::Validation(format!("lambda: {e}")))?;
        Ok(v)
    }
}

/// A trial-union base body and the spectral parameter it is tuned to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    pub domain: String,
    pub base_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Option<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<BoundaryCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaSpec>,
    /// Parameter grid points per family coordinate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<Candidate>>,
    /// Output prefix; `<output>.csv` and `<output>.json` are written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    fn present_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let flags = [
            ("task", self.task.is_some()),
            ("domain", self.domain.is_some()),
            ("family", self.family.is_some()),
            ("bc", self.bc.is_some()),
            ("gamma", self.gamma.is_some()),
            ("gamma_grid", self.gamma_grid.is_some()),
            ("lambda", self.lambda.is_some()),
            ("points", self.points.is_some()),
            ("tol", self.tol.is_some()),
            ("alpha", self.alpha.is_some()),
            ("candidates", self.candidates.is_some()),
            ("output", self.output.is_some()),
            ("budget", self.budget.is_some()),
            ("threads", self.threads.is_some()),
        ];
        for (k, on) in flags {
            if on {
                keys.push(k);
            }
        }
        keys
    }

    /// Checks keys against the task and parses every descriptor.
    pub fn validate(&self) -> Result<Task, CliError> {
        let task = self
            .task
            .ok_or_else(|| CliError::Validation("missing key: task".into()))?;
        let allowed: BTreeSet<&str> = task.keys().iter().chain(COMMON_KEYS.iter()).copied().collect();
        let present = self.present_keys();
        let extra: Vec<&str> = present.iter().copied().filter(|k| !allowed.contains(k)).collect();
        if !extra.is_empty() {
            return Err(CliError::Validation(format!(
                "keys not used by task `{}`: {}",
                task.name(),
                extra.join(", ")
            )));
        }
        let missing: Vec<&str> = task
            .required()
            .iter()
            .copied()
            .filter(|k| !present.contains(k))
            .collect();
        if !missing.is_empty() {
            return Err(CliError::Validation(format!(
                "task `{}` is missing keys: {}",
                task.name(),
                missing.join(", ")
            )));
        }
        if let Some(d) = &self.domain {
            d.parse::<Body>()?;
        }
        if let Some(f) = &self.family {
            f.parse::<Family>()?;
        }
        if let Some(cands) = &self.candidates {
            if cands.is_empty() {
                return Err(CliError::Validation("candidates: list is empty".into()));
            }
            for c in cands {
                c.domain.parse::<Domain>()?;
                positive("candidates.base_lambda", c.base_lambda)?;
            }
        }
        if let Some(g) = self.gamma {
            if !(g.is_finite() && g >= 0.0) {
                return Err(CliError::Validation(format!("gamma: must be >= 0, got {g}")));
            }
        }
        if let Some(grid) = &self.gamma_grid {
            if grid.is_empty() {
                return Err(CliError::Validation("gamma_grid: list is empty".into()));
            }
        }
        if let Some(l) = &self.lambda {
            l.values()?;
        }
        if let Some(t) = self.tol {
            positive("tol", t)?;
        }
        if let Some(a) = self.alpha {
            if !a.is_finite() {
                return Err(CliError::Validation(format!("alpha: must be finite, got {a}")));
            }
        }
        for (key, v) in [
            ("points", self.points),
            ("budget", self.budget),
            ("threads", self.threads),
        ] {
            if v == Some(0) {
                return Err(CliError::Validation(format!("{key}: must be at least 1")));
            }
        }
        Ok(task)
    }

    /// Fills task defaults. Thread count and output prefix are left as
    /// given since they do not affect results.
    pub fn resolved(&self) -> Result<ExperimentConfig, CliError> {
        let task = self.validate()?;
        let mut c = self.clone();
        c.bc.get_or_insert(BoundaryCondition::Dirichlet);
        c.budget.get_or_insert(DEFAULT_SPECTRUM_BUDGET);
        match task {
            Task::Bly => {
                c.gamma.get_or_insert(1.0);
            }
            Task::Weyl => {
                let g = c.gamma.expect("validated");
                c.alpha.get_or_insert(default_alpha(g));
            }
            Task::Critical => {
                c.gamma_grid.get_or_insert_with(default_gamma_grid);
            }
            _ => {}
        }
        if task.keys().contains(&"points") {
            c.points.get_or_insert(DEFAULT_PARAMETER_POINTS);
        }
        if task.keys().contains(&"tol") {
            c.tol.get_or_insert(DEFAULT_TOLERANCE);
        }
        Ok(c)
    }

    /// Config with the fields that cannot change results removed, used for
    /// hashing.
    pub fn fingerprint(&self) -> ExperimentConfig {
        ExperimentConfig {
            output: None,
            threads: None,
            ..self.clone()
        }
    }
}

/// `0, 0.05, ..., 1.5`.
pub fn default_gamma_grid() -> Vec<f64> {
    let n = (1.5 / DEFAULT_GAMMA_STEP).round() as usize;
    (0..=n).map(|i| i as f64 * DEFAULT_GAMMA_STEP).collect()
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{key}: must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_named() {
        let err = ExperimentConfig::from_json(r#"{"task":"riesz","domian":"box:1,1"}"#).unwrap_err();
        assert!(err.to_string().contains("domian"), "{err}");
    }

    #[test]
    fn task_keys_are_checked() {
        let c = ExperimentConfig::from_json(r#"{"task":"polya","domain":"box:1,1","lambda":[10],"gamma":1}"#).unwrap();
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
        let c = ExperimentConfig::from_json(r#"{"task":"riesz","domain":"box:1,1"}"#).unwrap();
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("gamma, lambda"), "{err}");
    }

    #[test]
    fn lambda_forms() {
        let c = ExperimentConfig::from_json(
            r#"{"task":"polya","domain":"box:1,1","lambda":{"min":10,"max":1e4,"points":40,"spacing":"log"}}"#,
        )
        .unwrap();
        let v = c.lambda.unwrap().values().unwrap();
        assert_eq!(v.len(), 40);
        assert_eq!((v[0], v[39]), (10.0, 1e4));
    }

    #[test]
    fn defaults_are_resolved() {
        let c = ExperimentConfig::from_json(r#"{"task":"critical","family":"box2d:1..4","lambda":[10]}"#).unwrap();
        let r = c.resolved().unwrap();
        assert_eq!(r.bc, Some(BoundaryCondition::Dirichlet));
        assert_eq!(r.gamma_grid.as_ref().unwrap().len(), 31);
        assert_eq!(r.points, Some(DEFAULT_PARAMETER_POINTS));
    }
}
