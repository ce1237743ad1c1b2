use thiserror::Error;

/// One step of a Newton fit, kept so that a failed fit can report how it got there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub log_likelihood: f64,
    pub score_norm: f64,
    pub max_abs_coefficient: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{n_vars} variables exceed the materialization cap of {cap}; use the streaming variant (or raise GOR_MAX_N)")]
    Capacity { n_vars: usize, cap: usize },

    #[error("{n_vars} variables requested; at most {max} are supported")]
    TooManyVariables { n_vars: usize, max: usize },

    #[error("range error: exponent {exponent} is outside [-{limit}, {limit}]")]
    Range { exponent: f64, limit: f64 },

    #[error("validation error at data row {row} (line {line}), column '{column}': value '{value}' is not 0 or 1")]
    Validation {
        row: usize,
        line: usize,
        column: String,
        value: String,
    },

    #[error("invalid weight at data row {row} (line {line}), column '{column}': '{value}' is not a positive number")]
    InvalidWeight {
        row: usize,
        line: usize,
        column: String,
        value: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("degenerate response: every row has {column} = {value}")]
    DegenerateResponse { column: String, value: u8 },

    #[error("fit did not converge in {iterations} iterations (final score norm {:e})", .trajectory.last().map_or(f64::NAN, |r| r.score_norm))]
    Convergence {
        iterations: usize,
        trajectory: Vec<IterationRecord>,
    },

    #[error("separation detected at iteration {iteration}: |{column}| = {magnitude:.3} exceeds the divergence bound {bound} while the likelihood is still improving")]
    Separation {
        column: String,
        magnitude: f64,
        bound: f64,
        iteration: usize,
        trajectory: Vec<IterationRecord>,
    },

    #[error("collinear design: column(s) {} are linearly dependent on earlier columns", .columns.join(", "))]
    Collinearity { columns: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Capacity { .. } | Error::TooManyVariables { .. } => "capacity",
            Error::Range { .. } => "range",
            Error::Validation { .. } => "validation",
            Error::InvalidWeight { .. } => "validation",
            Error::Schema(_) => "schema",
            Error::DegenerateResponse { .. } => "degenerate-response",
            Error::Convergence { .. } => "convergence",
            Error::Separation { .. } => "separation",
            Error::Collinearity { .. } => "collinearity",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    pub fn is_fit_failure(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::Separation { .. } | Error::Collinearity { .. }
        )
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
