//! Maximum-likelihood fit of `P(y = 1) = logistic(β0 + β • x)`.
//!
//! Newton-Raphson (equivalently IRLS for the canonical logit link) started
//! at β = 0, with step-halving whenever a full step lowers the likelihood.
//! Because every covariate is binary, rows are first pooled into one cell
//! per distinct event; the likelihood, score and Hessian are sums over cells.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

pub use crate::error::IterationRecord;
use crate::error::{Error, Result};
use crate::model::{Coefficients, Dataset};

/// Relative threshold under which a design column counts as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

const MAX_HALVINGS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Convergence when the max-norm of the score vector is at most this.
    pub score_tolerance: f64,
    /// Any `|βk|` above this before convergence is reported as separation.
    pub divergence_bound: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 50,
            score_tolerance: 1e-8,
            divergence_bound: 15.0,
        }
    }
}

impl FitOptions {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be positive"));
        }
        if !(self.score_tolerance > 0.0 && self.score_tolerance.is_finite()) {
            return Err(Error::domain("score_tolerance must be a positive number"));
        }
        if self.divergence_bound.is_nan() || self.divergence_bound <= 0.0 {
            return Err(Error::domain("divergence_bound must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub coefficients: Coefficients,
    pub log_likelihood: f64,
    /// Newton steps taken.
    pub iterations: usize,
    pub converged: bool,
    /// Max-norm of the score at the returned coefficients.
    pub score_norm: f64,
    /// One entry per evaluated iterate, starting at β = 0.
    pub trace: Vec<IterationRecord>,
}

/// Pooled responses for one distinct event.
#[derive(Clone, Debug)]
struct Cell {
    design: Vec<f64>,
    successes: f64,
    failures: f64,
}

impl Cell {
    fn total(&self) -> f64 {
        self.successes + self.failures
    }
}

fn pool(data: &Dataset) -> Vec<Cell> {
    let mut cells: BTreeMap<u64, (f64, f64, Vec<f64>)> = BTreeMap::new();
    for (event, y, w) in data.rows() {
        let entry = cells.entry(event.number()).or_insert_with(|| {
            let mut design = Vec::with_capacity(event.n_vars() + 1);
            design.push(1.0);
            design.extend(event.bits().into_iter().map(f64::from));
            (0.0, 0.0, design)
        });
        if y {
            entry.0 += w;
        } else {
            entry.1 += w;
        }
    }
    cells
        .into_values()
        .map(|(successes, failures, design)| Cell {
            design,
            successes,
            failures,
        })
        .collect()
}

fn column_names(data: &Dataset) -> Vec<String> {
    std::iter::once("(intercept)".to_string())
        .chain(data.var_names().iter().cloned())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn cells_log_likelihood(cells: &[Cell], beta: &[f64]) -> f64 {
    cells
        .iter()
        .map(|c| {
            let eta = dot(&c.design, beta);
            c.successes * eta - c.total() * softplus(eta)
        })
        .sum()
}

fn cells_score(cells: &[Cell], beta: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; beta.len()];
    for c in cells {
        let resid = c.successes - c.total() * logistic(dot(&c.design, beta));
        for (gj, xj) in g.iter_mut().zip(&c.design) {
            *gj += xj * resid;
        }
    }
    g
}

/// Fisher information `Xᵀ W X` with `W = n p (1 - p)`.
fn cells_information(cells: &[Cell], beta: &[f64]) -> DMatrix<f64> {
    let k = beta.len();
    let mut h = DMatrix::zeros(k, k);
    for c in cells {
        let p = logistic(dot(&c.design, beta));
        let w = c.total() * p * (1.0 - p);
        for i in 0..k {
            for j in 0..=i {
                h[(i, j)] += w * c.design[i] * c.design[j];
            }
        }
    }
    h.fill_upper_triangle_with_lower_triangle();
    h
}

fn check_dims(data: &Dataset, coeffs: &Coefficients) -> Result<()> {
    if data.n_vars() != coeffs.n_vars() {
        return Err(Error::domain(format!(
            "dataset has {} variables but the coefficients have {}",
            data.n_vars(),
            coeffs.n_vars()
        )));
    }
    Ok(())
}

fn as_vector(coeffs: &Coefficients) -> Vec<f64> {
    std::iter::once(coeffs.intercept())
        .chain(coeffs.betas().iter().copied())
        .collect()
}

/// Bernoulli log-likelihood of `data` under `coeffs` (weights multiply rows).
pub fn log_likelihood(data: &Dataset, coeffs: &Coefficients) -> Result<f64> {
    check_dims(data, coeffs)?;
    Ok(cells_log_likelihood(&pool(data), &as_vector(coeffs)))
}

/// Gradient of [`log_likelihood`]: `Xᵀ(y - p)`, intercept first.
pub fn score(data: &Dataset, coeffs: &Coefficients) -> Result<Vec<f64>> {
    check_dims(data, coeffs)?;
    Ok(cells_score(&pool(data), &as_vector(coeffs)))
}

/// Modified Gram-Schmidt over the weighted design columns. Returns the
/// indices of columns that lie in the span of earlier ones.
fn dependent_columns(cells: &[Cell]) -> Vec<usize> {
    let k = cells.first().map_or(0, |c| c.design.len());
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..k {
        let col: Vec<f64> = cells
            .iter()
            .map(|c| c.total().sqrt() * c.design[j])
            .collect();
        let norm = dot(&col, &col).sqrt();
        let mut v = col;
        // two passes keep the projection accurate
        for _ in 0..2 {
            for q in &basis {
                let r = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(vi, qi)| *vi -= r * qi);
            }
        }
        let rest = dot(&v, &v).sqrt();
        if norm == 0.0 || rest <= RANK_TOLERANCE * norm {
            dependent.push(j);
        } else {
            v.iter_mut().for_each(|vi| *vi /= rest);
            basis.push(v);
        }
    }
    dependent
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Fits the logit model to `data` by maximum likelihood.
pub fn fit_logit(data: &Dataset, options: &FitOptions) -> Result<FitResult> {
    options.validate()?;
    data.check_response()?;
    let names = column_names(data);
    let cells = pool(data);

    let dependent = dependent_columns(&cells);
    if !dependent.is_empty() {
        return Err(Error::Collinearity {
            columns: dependent.into_iter().map(|j| names[j].clone()).collect(),
        });
    }

    let k = names.len();
    let mut beta = vec![0.0; k];
    let mut ll = cells_log_likelihood(&cells, &beta);
    let mut trace = Vec::new();

    for iteration in 0..=options.max_iterations {
        let g = cells_score(&cells, &beta);
        let score_norm = max_abs(&g);
        trace.push(IterationRecord {
            iteration,
            log_likelihood: ll,
            score_norm,
            max_abs_coefficient: max_abs(&beta),
        });

        if score_norm <= options.score_tolerance {
            return Ok(FitResult {
                coefficients: Coefficients::new(beta[0], beta[1..].to_vec())?,
                log_likelihood: ll,
                iterations: iteration,
                converged: true,
                score_norm,
                trace,
            });
        }
        if let Some((j, b)) = beta
            .iter()
            .enumerate()
            .filter(|(_, b)| b.abs() > options.divergence_bound)
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        {
            return Err(Error::Separation {
                column: names[j].clone(),
                magnitude: b.abs(),
                bound: options.divergence_bound,
                iteration,
                trajectory: trace,
            });
        }
        if iteration == options.max_iterations {
            break;
        }

        let info = cells_information(&cells, &beta);
        let Some(chol) = info.cholesky() else {
            return Err(Error::Convergence {
                iterations: iteration,
                trajectory: trace,
            });
        };
        let step = chol.solve(&DVector::from_vec(g.clone()));
        let predicted_gain = dot(&g, step.as_slice());

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let candidate: Vec<f64> = beta
                .iter()
                .zip(step.iter())
                .map(|(b, s)| b + t * s)
                .collect();
            let cand_ll = cells_log_likelihood(&cells, &candidate);
            // below rounding resolution of ll the comparison carries no information
            let negligible = t * predicted_gain <= 1e-13 * ll.abs().max(1.0);
            if cand_ll >= ll || (negligible && cand_ll.is_finite()) {
                accepted = Some((candidate, cand_ll));
                break;
            }
            t *= 0.5;
        }
        let Some((next, next_ll)) = accepted else {
            return Err(Error::Convergence {
                iterations: iteration,
                trajectory: trace,
            });
        };
        beta = next;
        ll = next_ll;
    }

    Err(Error::Convergence {
        iterations: options.max_iterations,
        trajectory: trace,
    })
}
