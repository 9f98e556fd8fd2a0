//! Run configuration: one self-describing JSON document per experiment.

use dsigma::mat::CMatrix;
use dsigma::{DensityOperator, MetricChoice, Observable, Spectrum, UnitaryFrame};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub spectrum: SpectrumConfig,
    pub hamiltonian: HamiltonianConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeConfig>,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_metric")]
    pub metric: MetricChoice,
    #[serde(default)]
    pub seed: u64,
    pub task: Task,
}

fn default_hbar() -> f64 {
    1.0
}

fn default_metric() -> MetricChoice {
    MetricChoice::Submersion
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub values: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_final: f64,
    pub steps: usize,
}

/// Hamiltonian specification: a named qubit preset, an explicit matrix as
/// real and imaginary parts, or a seeded random GUE-style draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianConfig {
    Preset(String),
    Random { random: RandomHamiltonian },
    Explicit { re: Vec<Vec<f64>>, im: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomHamiltonian {
    pub seed: u64,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Evolve,
    Phase,
    Qsl,
    Distance,
    OrbitInfo,
    Verify,
}

/// Validation failure tied to a named config field.
#[derive(Debug)]
pub struct ValidationError {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid field '{}': {}", self.field, self.message)
    }
}

impl std::error::Error for ValidationError {}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

impl ExperimentConfig {
    pub fn build_spectrum(&self) -> Result<Spectrum, ValidationError> {
        let s = Spectrum::new(&self.spectrum.values, &self.spectrum.multiplicities)
            .map_err(|e| ValidationError { field: "spectrum", message: e.to_string() })?;
        if s.dim() != self.n {
            return Err(ValidationError {
                field: "spectrum",
                message: format!("total multiplicity {} does not match n = {}", s.dim(), self.n),
            });
        }
        Ok(s)
    }

    pub fn build_hamiltonian(&self) -> Result<Observable, ValidationError> {
        let invalid = |message: String| ValidationError { field: "hamiltonian", message };
        match &self.hamiltonian {
            HamiltonianConfig::Preset(name) => {
                if self.n != 2 {
                    return Err(invalid(format!("preset '{name}' requires n = 2")));
                }
                match name.as_str() {
                    "pauli-x" => Ok(Observable::pauli_x()),
                    "pauli-y" => Ok(Observable::pauli_y()),
                    "pauli-z" => Ok(Observable::pauli_z()),
                    other => Err(invalid(format!("unknown preset '{other}'"))),
                }
            }
            HamiltonianConfig::Random { random } => {
                Ok(dsigma::random_observable(self.n, random.seed, random.scale))
            }
            HamiltonianConfig::Explicit { re, im } => {
                let n = self.n;
                if re.len() != n || im.len() != n || re.iter().chain(im).any(|r| r.len() != n) {
                    return Err(invalid(format!("matrix parts must be {n}x{n}")));
                }
                let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(re[i][j], im[i][j]));
                Observable::new(m).map_err(|e| invalid(e.to_string()))
            }
        }
    }

    pub fn build_time(&self) -> Result<TimeConfig, ValidationError> {
        let t = self.time.ok_or(ValidationError {
            field: "time",
            message: "this task requires a time section".into(),
        })?;
        if t.steps < 1 {
            return Err(ValidationError { field: "time", message: "steps must be >= 1".into() });
        }
        if t.t_final.is_nan() || t.t_final <= 0.0 {
            return Err(ValidationError { field: "time", message: "t_final must be > 0".into() });
        }
        Ok(t)
    }

    /// Initial state: the spectrum placed on the computational basis.
    pub fn build_initial_state(&self) -> Result<DensityOperator, ValidationError> {
        let s = self.build_spectrum()?;
        DensityOperator::from_frame(&UnitaryFrame::identity(self.n), &s)
            .map_err(|e| ValidationError { field: "spectrum", message: e.to_string() })
    }
}
