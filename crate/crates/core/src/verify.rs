//! Exhaustive checks of the odds-ratio laws for a given model.
//!
//! Each law compares closed-form ratios from a [`RatioSource`] against an
//! independent route (the long-way oracle, products of basic ratios, ...)
//! over every event pair of the model, and records the worst relative
//! error together with the first counterexample beyond tolerance.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{check_cap, iter_events, iter_reference_target_pairs, pure_transitions};
use crate::model::{full_mask, Coefficients, Event, SubsetSpec};
use crate::odds::oracle_odds_ratio;
use crate::ratios;

/// Largest `N` for exhaustive verification.
pub const MAX_VERIFY_VARS: usize = 12;

/// Intercept shifts always applied by the invariance check.
pub const INTERCEPT_SHIFTS: [f64; 4] = [-3.0, -0.5, 0.5, 3.0];

/// Where closed-form ratio values come from. The default methods use
/// [`crate::ratios`]; the trait exists so tests can substitute a faulty
/// source and confirm that the checks catch it.
pub trait RatioSource {
    fn between(&self, coeffs: &Coefficients, reference: Event, target: Event) -> Result<f64> {
        ratios::odds_ratio_between(coeffs, reference, target).map(|r| r.value())
    }

    fn group(&self, coeffs: &Coefficients, subset: SubsetSpec) -> Result<f64> {
        ratios::group_odds_ratio(coeffs, subset).map(|r| r.value())
    }

    fn basic(&self, coeffs: &Coefficients, var: usize) -> Result<f64> {
        ratios::basic_odds_ratio(coeffs, var).map(|r| r.value())
    }

    fn inverse(&self, coeffs: &Coefficients) -> Result<f64> {
        ratios::inverse_odds_ratio(coeffs).map(|r| r.value())
    }

    /// Ensemble values for targets `1..2^N`, in order.
    fn ensemble(&self, coeffs: &Coefficients) -> Result<Vec<f64>> {
        ratios::ensemble_iter(coeffs)?
            .map(|r| r.map(|r| r.value()))
            .collect()
    }
}

/// The production closed-form ratios.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClosedForm;

impl RatioSource for ClosedForm {}

/// Closed-form ratios with every value whose target is `target` multiplied
/// by `factor`. Used to self-test the verifier.
#[derive(Clone, Copy, Debug)]
pub struct Perturbed {
    pub target: u64,
    pub factor: f64,
}

impl Perturbed {
    fn apply(&self, target: u64, value: f64) -> f64 {
        if target == self.target {
            value * self.factor
        } else {
            value
        }
    }
}

impl RatioSource for Perturbed {
    fn between(&self, coeffs: &Coefficients, reference: Event, target: Event) -> Result<f64> {
        Ok(self.apply(
            target.number(),
            ClosedForm.between(coeffs, reference, target)?,
        ))
    }

    fn group(&self, coeffs: &Coefficients, subset: SubsetSpec) -> Result<f64> {
        Ok(self.apply(subset.number(), ClosedForm.group(coeffs, subset)?))
    }

    fn basic(&self, coeffs: &Coefficients, var: usize) -> Result<f64> {
        let target = 1u64 << (coeffs.n_vars() - var);
        Ok(self.apply(target, ClosedForm.basic(coeffs, var)?))
    }

    fn inverse(&self, coeffs: &Coefficients) -> Result<f64> {
        Ok(self.apply(0, ClosedForm.inverse(coeffs)?))
    }

    fn ensemble(&self, coeffs: &Coefficients) -> Result<Vec<f64>> {
        Ok(ClosedForm
            .ensemble(coeffs)?
            .into_iter()
            .enumerate()
            .map(|(i, v)| self.apply(i as u64 + 1, v))
            .collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    OracleEquivalence,
    Product,
    ContextFree,
    Subsumption,
    Inverse,
    InterceptInvariance,
}

impl Law {
    pub const ALL: [Law; 6] = [
        Law::OracleEquivalence,
        Law::Product,
        Law::ContextFree,
        Law::Subsumption,
        Law::Inverse,
        Law::InterceptInvariance,
    ];

    /// Relative tolerance; 0 means exact equality.
    pub fn tolerance(self) -> f64 {
        match self {
            Law::OracleEquivalence => 1e-10,
            Law::Subsumption => 0.0,
            _ => 1e-12,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Law::OracleEquivalence => "oracle-equivalence",
            Law::Product => "product",
            Law::ContextFree => "context-free",
            Law::Subsumption => "subsumption",
            Law::Inverse => "inverse",
            Law::InterceptInvariance => "intercept-invariance",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample {
    pub intercept: f64,
    pub betas: Vec<f64>,
    pub reference: u64,
    pub target: u64,
    pub expected: f64,
    pub actual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let betas: Vec<String> = self.betas.iter().map(|b| format!("{b:e}")).collect();
        write!(
            f,
            "b0={:e} b=[{}] E_r=E_{} E_t=E_{} expected={:e} actual={:e}",
            self.intercept,
            betas.join(", "),
            self.reference,
            self.target,
            self.expected,
            self.actual
        )?;
        if let Some(e) = &self.error {
            write!(f, " ({e})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LawOutcome {
    pub law: Law,
    pub checks: usize,
    pub worst_relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub counterexample: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n_vars: usize,
    pub coefficient_sets: usize,
    pub laws: Vec<LawOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.passed)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Extra random coefficient vectors (seeds `0..seeds`) checked alongside
    /// the model, each coefficient uniform on `[-2, 2]`.
    pub seeds: u64,
    pub max_vars: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seeds: 0,
            max_vars: MAX_VERIFY_VARS,
        }
    }
}

/// Coefficients with every entry uniform on `[-scale, scale]`.
pub fn random_coefficients(n_vars: usize, seed: u64, scale: f64) -> Result<Coefficients> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let intercept = rng.random_range(-scale..=scale);
    let betas = (0..n_vars)
        .map(|_| rng.random_range(-scale..=scale))
        .collect();
    Coefficients::new(intercept, betas)
}

fn relative_error(actual: f64, expected: f64) -> f64 {
    if actual == expected {
        0.0
    } else {
        (actual / expected - 1.0).abs()
    }
}

struct Tally {
    law: Law,
    checks: usize,
    worst: f64,
    counterexample: Option<Counterexample>,
}

impl Tally {
    fn new(law: Law) -> Self {
        Tally {
            law,
            checks: 0,
            worst: 0.0,
            counterexample: None,
        }
    }

    fn compare(
        &mut self,
        coeffs: &Coefficients,
        (reference, target): (u64, u64),
        actual: Result<f64>,
        expected: Result<f64>,
    ) {
        self.checks += 1;
        let (err, note) = match (&actual, &expected) {
            (Ok(a), Ok(e)) => (relative_error(*a, *e), None),
            (Err(e), _) | (_, Err(e)) => (f64::INFINITY, Some(e.to_string())),
        };
        let bad = err.is_nan() || err > self.law.tolerance();
        if err > self.worst || err.is_nan() {
            self.worst = if err.is_nan() { f64::INFINITY } else { err };
        }
        if bad && self.counterexample.is_none() {
            self.counterexample = Some(Counterexample {
                intercept: coeffs.intercept(),
                betas: coeffs.betas().to_vec(),
                reference,
                target,
                expected: *expected.as_ref().unwrap_or(&f64::NAN),
                actual: *actual.as_ref().unwrap_or(&f64::NAN),
                error: note,
            });
        }
    }

    fn finish(self) -> LawOutcome {
        LawOutcome {
            law: self.law,
            checks: self.checks,
            worst_relative_error: self.worst,
            tolerance: self.law.tolerance(),
            passed: self.counterexample.is_none(),
            counterexample: self.counterexample,
        }
    }
}

/// Runs every law against `coeffs` (and any extra random models) using the
/// production ratios.
pub fn verify_laws(coeffs: &Coefficients, options: &VerifyOptions) -> Result<VerifyReport> {
    verify_laws_with(&ClosedForm, coeffs, options)
}

pub fn verify_laws_with(
    source: &dyn RatioSource,
    coeffs: &Coefficients,
    options: &VerifyOptions,
) -> Result<VerifyReport> {
    let n = coeffs.n_vars();
    check_cap(n, options.max_vars.min(MAX_VERIFY_VARS))?;
    let mut models = vec![coeffs.clone()];
    for seed in 0..options.seeds {
        models.push(random_coefficients(n, seed, 2.0)?);
    }

    let mut tallies: Vec<Tally> = Law::ALL.iter().map(|&l| Tally::new(l)).collect();
    for c in &models {
        check_model(source, c, &mut tallies)?;
    }
    Ok(VerifyReport {
        n_vars: n,
        coefficient_sets: models.len(),
        laws: tallies.into_iter().map(Tally::finish).collect(),
    })
}

fn check_model(source: &dyn RatioSource, c: &Coefficients, tallies: &mut [Tally]) -> Result<()> {
    let n = c.n_vars();
    let ones = full_mask(n);
    let [oracle, product, context, subsumption, inverse, intercept] = tallies else {
        return Err(Error::domain("one tally per law expected"));
    };

    for (r, t) in pure_transitions(n)? {
        let pair = (r.number(), t.number());
        let closed = source.between(c, r, t);
        oracle.compare(c, pair, closed, oracle_odds_ratio(c, r, t));
    }

    for s in iter_events(n)?.skip(1).map(SubsetSpec::from_indicator) {
        let pair = (0, s.number());
        let by_product = s
            .members()
            .iter()
            .map(|&m| source.basic(c, m))
            .product::<Result<f64>>();
        product.compare(c, pair, source.group(c, s), by_product);
    }

    for var in 1..=n {
        let single = SubsetSpec::from_members(n, &[var])?;
        let mut pairs = iter_reference_target_pairs(single)?;
        let Some((r0, t0)) = pairs.next() else {
            continue;
        };
        let first = source.between(c, r0, t0);
        for (r, t) in pairs {
            let v = source.between(c, r, t);
            context.compare(c, (r.number(), t.number()), v, clone_result(&first));
        }
    }

    let values = source.ensemble(c)?;
    for var in 1..=n {
        let target = 1u64 << (n - var);
        let at_target = values
            .get(target as usize - 1)
            .copied()
            .ok_or_else(|| Error::domain("ensemble is missing records"));
        subsumption.compare(c, (0, target), at_target, source.basic(c, var));
    }

    let full = SubsetSpec::new(n, ones)?;
    let product_with_full = match (source.inverse(c), source.group(c, full)) {
        (Ok(i), Ok(g)) => Ok(i * g),
        (Err(e), _) | (_, Err(e)) => Err(e),
    };
    inverse.compare(c, (ones, 0), product_with_full, Ok(1.0));

    for shift in INTERCEPT_SHIFTS {
        let shifted = c.with_intercept_shift(shift)?;
        for (r, t) in pure_transitions(n)? {
            let pair = (r.number(), t.number());
            intercept.compare(
                c,
                pair,
                source.between(&shifted, r, t),
                source.between(c, r, t),
            );
            intercept.compare(
                c,
                pair,
                oracle_odds_ratio(&shifted, r, t),
                oracle_odds_ratio(c, r, t),
            );
        }
    }
    Ok(())
}

fn clone_result(r: &Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(*v),
        Err(e) => Err(Error::domain(e.to_string())),
    }
}
