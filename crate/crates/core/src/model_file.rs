//! JSON model file written by `gor fit` and read by `gor ratios` / `gor verify`.
//!
//! ```json
//! {"schema":1,"n_vars":1,"var_names":["x1"],"intercept":-1.386,"betas":[1.792],
//!  "fit":{"log_likelihood":-61.1,"iterations":4,"converged":true}}
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::FitResult;
use crate::model::Coefficients;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitInfo {
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub schema: u32,
    pub n_vars: usize,
    pub var_names: Vec<String>,
    pub intercept: f64,
    pub betas: Vec<f64>,
    pub fit: Option<FitInfo>,
}

impl ModelFile {
    pub fn from_fit(var_names: &[String], fit: &FitResult) -> Self {
        let c = &fit.coefficients;
        ModelFile {
            schema: SCHEMA_VERSION,
            n_vars: c.n_vars(),
            var_names: var_names.to_vec(),
            intercept: c.intercept(),
            betas: c.betas().to_vec(),
            fit: Some(FitInfo {
                log_likelihood: fit.log_likelihood,
                iterations: fit.iterations,
                converged: fit.converged,
            }),
        }
    }

    pub fn coefficients(&self) -> Result<Coefficients> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "model file schema {} is not supported (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.betas.len() != self.n_vars || self.var_names.len() != self.n_vars {
            return Err(Error::Schema(format!(
                "model file declares n_vars = {} but has {} betas and {} names",
                self.n_vars,
                self.betas.len(),
                self.var_names.len()
            )));
        }
        Coefficients::new(self.intercept, self.betas.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let model: ModelFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        model.coefficients()?;
        Ok(model)
    }
}
