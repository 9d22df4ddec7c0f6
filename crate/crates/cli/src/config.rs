//! Run configuration: a flat JSON document with fail-fast parsing
//! (unknown keys are rejected).

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use hartree_core::{
    Dimension, DomainSpec, EnergyContext, NonlinearitySpec, OperatorParams, SolveConfig,
};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NonlinearityChoice {
    Power { r: f64 },
    Loglike,
    Zero,
}

fn default_dimension() -> u8 {
    1
}
fn default_m() -> f64 {
    1.0
}
fn default_lambda() -> f64 {
    1.0
}
fn default_nonlinearity() -> NonlinearityChoice {
    NonlinearityChoice::Loglike
}
fn default_path_nodes() -> usize {
    41
}
fn default_grad_tol() -> f64 {
    1e-8
}
fn default_max_sweeps() -> usize {
    100_000
}
fn default_t_max() -> f64 {
    1e3
}
fn default_polish_max_steps() -> usize {
    40
}
fn default_polish_attempts() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_dimension")]
    pub dimension: u8,
    /// Interior nodes per axis; defaults to 255 in 1D and 63 in 2D.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_m")]
    pub m: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_nonlinearity")]
    pub nonlinearity: NonlinearityChoice,
    #[serde(default = "default_path_nodes")]
    pub path_nodes: usize,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    #[serde(default = "default_max_sweeps")]
    pub max_sweeps: usize,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_polish_max_steps")]
    pub polish_max_steps: usize,
    #[serde(default = "default_polish_attempts")]
    pub polish_attempts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub dealias: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Validation(format!("config parse error: {e}")))
    }

    /// Canonical serialization used for the manifest hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn dimension_enum(&self) -> Result<Dimension, CliError> {
        match self.dimension {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            d => Err(CliError::Validation(format!(
                "dimension must be 1 or 2, got {d}"
            ))),
        }
    }

    pub fn points_per_axis(&self) -> Result<usize, CliError> {
        let n = self
            .n
            .unwrap_or(match self.dimension_enum()? {
                Dimension::One => 255,
                Dimension::Two => 63,
            });
        if n == 0 {
            return Err(CliError::Validation("n must be at least 1".into()));
        }
        Ok(n)
    }

    pub fn nonlinearity_spec(&self, dim: Dimension) -> Result<NonlinearitySpec, CliError> {
        let spec = match &self.nonlinearity {
            NonlinearityChoice::Power { r } => NonlinearitySpec::power(*r, dim),
            NonlinearityChoice::Loglike => Ok(NonlinearitySpec::loglike(dim)),
            NonlinearityChoice::Zero => Ok(NonlinearitySpec::zero(dim)),
        };
        spec.map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn build_domain(&self) -> Result<Arc<DomainSpec>, CliError> {
        Ok(DomainSpec::with_dimension(
            self.dimension_enum()?,
            self.points_per_axis()?,
        ))
    }

    /// Build the validated energy context (plain sign) for solve-type modes.
    pub fn build_context(&self) -> Result<EnergyContext, CliError> {
        let dim = self.dimension_enum()?;
        let domain = self.build_domain()?;
        let params = OperatorParams::new(self.m, self.omega, self.lambda)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let nonlin = self.nonlinearity_spec(dim)?;
        EnergyContext::new(&domain, params, nonlin)
            .map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig {
            path_nodes: self.path_nodes,
            grad_tol: self.grad_tol,
            max_sweeps: self.max_sweeps,
            t_max: self.t_max,
            polish_max_steps: self.polish_max_steps,
            polish_attempts: self.polish_attempts,
            seed: self.seed,
            dealias: self.dealias,
            ..SolveConfig::default()
        }
    }
}
