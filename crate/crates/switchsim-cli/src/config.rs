//! Experiment configuration: a versioned TOML document with a system
//! section (which model to build), a run section (integration, ensemble,
//! and output parameters), and optional cyclic-law and tolerance sections.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub system: SystemSection,
    pub run: RunSection,
    #[serde(default)]
    pub cyclic: CyclicSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    /// n-qubit graph-state stabilization with one generator per qubit.
    Graph,
    /// The three-level pair where neither generator (nor any fixed mixture)
    /// is stabilizing on its own but switching is.
    ThreeLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementKind {
    /// C is the Lyapunov matrix itself (kernel on the target).
    #[default]
    Certificate,
    /// C is the raw graph Hamiltonian (same shape, 2n times stronger).
    GraphHamiltonian,
    /// No continuous monitoring.
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub kind: SystemKind,
    #[serde(default)]
    pub n_qubits: Option<usize>,
    #[serde(default)]
    pub edges: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub measurement: MeasurementKind,
    /// Pattern over {+,-} defining the true initial state (conjugated by
    /// the graph circuit). Graph systems only.
    #[serde(default)]
    pub true_pattern: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    #[default]
    Kraus,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// Estimate starts at the true state.
    #[default]
    Exact,
    /// Estimate is the true state mixed evenly with the fully mixed state.
    UniformMix,
    /// Estimate is the true state mixed evenly with the sign-flipped
    /// pattern state (orthogonal to it). Graph systems only.
    OrthogonalMix,
    /// Estimate is the true state mixed evenly with the rotated
    /// custom_pattern state. Graph systems only.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    Cyclic,
    State,
    Measurement,
}

impl LawKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Cyclic => "cyclic",
            Self::State => "state",
            Self::Measurement => "measurement",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub dt: f64,
    pub n_steps: usize,
    pub dwell_steps: usize,
    pub n_realizations: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub scheme: SchemeKind,
    #[serde(default)]
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub custom_pattern: Option<String>,
    pub laws: Vec<LawKind>,
    pub output_path: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct CyclicSection {
    /// Cycle fractions per generator; default uniform.
    pub alpha: Option<Vec<f64>>,
    /// Cycle period; default one dwell interval per generator.
    pub period: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    /// Invariance / certificate construction tolerance.
    pub invariant: f64,
    /// Per-step numerical guard.
    pub step: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        Self {
            invariant: 1e-9,
            step: 1e-6,
        }
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile, CliError> {
    let cfg: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config {
        reason: e.to_string().replace('\n', " "),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Deterministic serialization used for the sidecar metadata and the
/// provenance hash.
pub fn canonical_toml(cfg: &ConfigFile) -> String {
    toml::to_string_pretty(cfg).expect("config serializes")
}

fn field_err(field: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Field {
        field,
        reason: reason.into(),
    }
}

impl ConfigFile {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(field_err(
                "schema_version",
                format!(
                    "version {} not supported (expected {SCHEMA_VERSION})",
                    self.schema_version
                ),
            ));
        }
        let run = &self.run;
        if !run.dt.is_finite() || run.dt <= 0.0 {
            return Err(field_err("run.dt", "must be positive and finite"));
        }
        if run.dwell_steps == 0 {
            return Err(field_err("run.dwell_steps", "must be at least 1"));
        }
        if run.n_realizations == 0 {
            return Err(field_err("run.n_realizations", "must be at least 1"));
        }
        if run.laws.is_empty() {
            return Err(field_err("run.laws", "at least one law is required"));
        }
        let mut seen = Vec::new();
        for law in &run.laws {
            if seen.contains(law) {
                return Err(field_err(
                    "run.laws",
                    format!("law '{}' listed twice", law.label()),
                ));
            }
            seen.push(*law);
        }
        if run.output_path.is_empty() {
            return Err(field_err("run.output_path", "must not be empty"));
        }
        if let Some(alpha) = &self.cyclic.alpha {
            if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
                return Err(field_err("cyclic.alpha", "fractions must be nonnegative"));
            }
            let sum: f64 = alpha.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(field_err(
                    "cyclic.alpha",
                    format!("fractions sum to {sum}, expected 1"),
                ));
            }
        }
        if let Some(period) = self.cyclic.period {
            if !period.is_finite() || period <= 0.0 {
                return Err(field_err("cyclic.period", "must be positive and finite"));
            }
        }
        let tol = &self.tolerances;
        if tol.invariant <= 0.0 || tol.step <= 0.0 || tol.invariant.is_nan() || tol.step.is_nan() {
            return Err(field_err("tolerances", "tolerances must be positive"));
        }

        match self.system.kind {
            SystemKind::Graph => self.validate_graph(),
            SystemKind::ThreeLevel => self.validate_three_level(),
        }
    }

    fn validate_graph(&self) -> Result<(), CliError> {
        let sys = &self.system;
        let n = sys
            .n_qubits
            .ok_or_else(|| field_err("system.n_qubits", "required for graph systems"))?;
        if n == 0 || n > switchsim::MAX_QUBITS {
            return Err(field_err(
                "system.n_qubits",
                format!("must be in 1..={}", switchsim::MAX_QUBITS),
            ));
        }
        let pattern = sys
            .true_pattern
            .as_ref()
            .ok_or_else(|| field_err("system.true_pattern", "required for graph systems"))?;
        if pattern.len() != n || !pattern.chars().all(|c| c == '+' || c == '-') {
            return Err(field_err(
                "system.true_pattern",
                format!("must be {n} characters over {{+,-}}"),
            ));
        }
        match self.run.scenario {
            ScenarioKind::Custom => {
                let custom = self.run.custom_pattern.as_ref().ok_or_else(|| {
                    field_err("run.custom_pattern", "required when scenario = \"custom\"")
                })?;
                if custom.len() != n || !custom.chars().all(|c| c == '+' || c == '-') {
                    return Err(field_err(
                        "run.custom_pattern",
                        format!("must be {n} characters over {{+,-}}"),
                    ));
                }
            }
            _ => {
                if self.run.custom_pattern.is_some() {
                    return Err(field_err(
                        "run.custom_pattern",
                        "only valid when scenario = \"custom\"",
                    ));
                }
            }
        }
        Ok(())
    }

    fn validate_three_level(&self) -> Result<(), CliError> {
        let sys = &self.system;
        if sys.n_qubits.is_some() || sys.edges.is_some() || sys.true_pattern.is_some() {
            return Err(field_err(
                "system",
                "n_qubits/edges/true_pattern do not apply to three-level systems",
            ));
        }
        if sys.measurement == MeasurementKind::GraphHamiltonian {
            return Err(field_err(
                "system.measurement",
                "graph-hamiltonian applies only to graph systems",
            ));
        }
        if self.run.scenario != ScenarioKind::Exact {
            return Err(field_err(
                "run.scenario",
                "three-level systems support only the exact scenario",
            ));
        }
        if self.run.custom_pattern.is_some() {
            return Err(field_err(
                "run.custom_pattern",
                "does not apply to three-level systems",
            ));
        }
        Ok(())
    }
}
