//! Log-odds, odds and probability of an event under a logit model.
//!
//! [`oracle_odds_ratio`] divides two separately exponentiated odds. It never
//! cancels terms algebraically, which keeps it independent of the closed-form
//! exponents in [`crate::ratios`].

use crate::error::{Error, Result};
use crate::model::{Coefficients, Event};

/// Largest magnitude of a log-odds (or ratio exponent) that is exponentiated.
pub const MAX_ABS_EXPONENT: f64 = 700.0;

fn check_dims(coeffs: &Coefficients, event: Event) -> Result<()> {
    if coeffs.n_vars() != event.n_vars() {
        return Err(Error::domain(format!(
            "event {event} has {} variables but the model has {}",
            event.n_vars(),
            coeffs.n_vars()
        )));
    }
    Ok(())
}

pub(crate) fn checked_exp(exponent: f64) -> Result<f64> {
    if exponent.abs() > MAX_ABS_EXPONENT {
        return Err(Error::Range {
            exponent,
            limit: MAX_ABS_EXPONENT,
        });
    }
    Ok(exponent.exp())
}

/// `β0 + Σ βi·xi` with the event's states as the `xi`.
pub fn log_odds(coeffs: &Coefficients, event: Event) -> Result<f64> {
    check_dims(coeffs, event)?;
    let slope_sum: f64 = coeffs
        .betas()
        .iter()
        .zip(event.bits())
        .map(|(b, x)| b * f64::from(x))
        .sum();
    Ok(coeffs.intercept() + slope_sum)
}

/// `exp(log_odds)`.
pub fn odds_of_event(coeffs: &Coefficients, event: Event) -> Result<f64> {
    checked_exp(log_odds(coeffs, event)?)
}

/// `odds / (1 + odds)`.
///
/// Fails with a range error when the probability is not representable
/// strictly inside (0, 1) as an `f64`.
pub fn probability_of_event(coeffs: &Coefficients, event: Event) -> Result<f64> {
    let eta = log_odds(coeffs, event)?;
    let odds = checked_exp(eta)?;
    let p = odds / (1.0 + odds);
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::Range {
            exponent: eta,
            limit: (1.0 / f64::EPSILON).ln(),
        });
    }
    Ok(p)
}

/// `O(target) / O(reference)`, evaluated as a literal quotient of odds.
pub fn oracle_odds_ratio(coeffs: &Coefficients, reference: Event, target: Event) -> Result<f64> {
    check_dims(coeffs, reference)?;
    check_dims(coeffs, target)?;
    if reference == target {
        return Err(Error::domain(format!(
            "reference and target are the same event {reference}; an odds ratio needs E_r != E_t"
        )));
    }
    let numerator = odds_of_event(coeffs, target)?;
    let denominator = odds_of_event(coeffs, reference)?;
    Ok(numerator / denominator)
}
