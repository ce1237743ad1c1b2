//! Closed-form basic, Group and inverse odds ratios, and the full ensemble.
//!
//! Every ratio is `exp(Σ βi)` over the variables that switch from 0 to 1.
//! The sum is accumulated in ascending variable order and exponentiated once.
//! The intercept never enters an exponent.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::events::{
    all_ones, all_zeros, check_cap, event_for_single_variable, iter_events, EventIter,
};
use crate::model::{
    full_mask, Coefficients, Event, OddsRatioRecord, RatioKind, SubsetSpec, DEFAULT_MAX_N,
};
use crate::odds::checked_exp;

/// Relative tolerance for classifying a ratio as equal to 1.
pub const UNIT_TOLERANCE: f64 = 1e-12;

fn subset_exponent(coeffs: &Coefficients, subset: SubsetSpec) -> f64 {
    subset.members().iter().map(|&m| coeffs.beta(m)).sum()
}

fn record(
    coeffs: &Coefficients,
    subset: SubsetSpec,
    reference: Event,
    target: Event,
) -> Result<OddsRatioRecord> {
    let exponent = subset_exponent(coeffs, subset);
    let value = checked_exp(exponent)?;
    let kind = if subset.len() == 1 {
        RatioKind::Basic
    } else {
        RatioKind::Group
    };
    Ok(OddsRatioRecord {
        subset,
        reference,
        target,
        exponent,
        value,
        kind,
    })
}

fn check_model_dims(coeffs: &Coefficients, n_vars: usize) -> Result<()> {
    if coeffs.n_vars() != n_vars {
        return Err(Error::domain(format!(
            "expected {} variables to match the model, got {n_vars}",
            coeffs.n_vars()
        )));
    }
    Ok(())
}

/// `exp(β_var)` for the switch of one variable, referenced to `E_0`.
pub fn basic_odds_ratio(coeffs: &Coefficients, var: usize) -> Result<OddsRatioRecord> {
    let n = coeffs.n_vars();
    let target = event_for_single_variable(n, var)?;
    record(
        coeffs,
        SubsetSpec::from_indicator(target),
        all_zeros(n)?,
        target,
    )
}

/// `exp(β • (E_t - E_r))` for a pure 0→1 transition.
///
/// Pairs where some variable goes from 1 to 0 are rejected.
pub fn odds_ratio_between(
    coeffs: &Coefficients,
    reference: Event,
    target: Event,
) -> Result<OddsRatioRecord> {
    check_model_dims(coeffs, reference.n_vars())?;
    check_model_dims(coeffs, target.n_vars())?;
    if reference == target {
        return Err(Error::domain(format!(
            "reference and target are the same event {reference}; an odds ratio needs E_r != E_t"
        )));
    }
    let falling = reference.number() & !target.number();
    if falling != 0 {
        let n = reference.n_vars();
        let names: Vec<String> = SubsetSpec::from_indicator(Event::from_parts(n, falling))
            .members()
            .iter()
            .map(|m| format!("x{m}"))
            .collect();
        return Err(Error::domain(format!(
            "{reference} -> {target} is not a pure 0->1 transition: {} go from 1 to 0",
            names.join(", ")
        )));
    }
    let diff = Event::from_parts(target.n_vars(), target.number() ^ reference.number());
    record(coeffs, SubsetSpec::from_indicator(diff), reference, target)
}

/// `G(S, E_0, E_S) = exp(Σ_{i∈S} βi)`.
pub fn group_odds_ratio(coeffs: &Coefficients, subset: SubsetSpec) -> Result<OddsRatioRecord> {
    check_model_dims(coeffs, subset.n_vars())?;
    if subset.is_empty() {
        return Err(Error::domain(
            "the empty subset has no Group Odds Ratio; see the inverse odds ratio",
        ));
    }
    record(
        coeffs,
        subset,
        all_zeros(subset.n_vars())?,
        subset.indicator(),
    )
}

/// All variables switching 1→0 together, referenced to the all-ones event:
/// `exp(-(β1 + ... + βN))`.
pub fn inverse_odds_ratio(coeffs: &Coefficients) -> Result<OddsRatioRecord> {
    let n = coeffs.n_vars();
    let ones = all_ones(n)?;
    let full = SubsetSpec::from_indicator(ones);
    let exponent = -subset_exponent(coeffs, full);
    Ok(OddsRatioRecord {
        subset: full,
        reference: ones,
        target: all_zeros(n)?,
        exponent,
        value: checked_exp(exponent)?,
        kind: RatioKind::Inverse,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct EnsembleOptions {
    /// Append the inverse ratio after the `2^N - 1` group records.
    pub include_inverse: bool,
    /// Refuse to materialize ensembles for more variables than this.
    pub max_vars: usize,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        EnsembleOptions {
            include_inverse: false,
            max_vars: DEFAULT_MAX_N,
        }
    }
}

/// One Group Odds Ratio per non-empty subset, ordered by target event
/// `E_1..E_{2^N-1}`, all referenced to `E_0`.
pub fn ensemble(coeffs: &Coefficients) -> Result<Vec<OddsRatioRecord>> {
    ensemble_with(coeffs, &EnsembleOptions::default())
}

pub fn ensemble_with(
    coeffs: &Coefficients,
    options: &EnsembleOptions,
) -> Result<Vec<OddsRatioRecord>> {
    check_cap(coeffs.n_vars(), options.max_vars)?;
    let mut records = ensemble_iter(coeffs)?.collect::<Result<Vec<_>>>()?;
    if options.include_inverse {
        records.push(inverse_odds_ratio(coeffs)?);
    }
    Ok(records)
}

/// Lazy ensemble with no materialization cap.
pub fn ensemble_iter(
    coeffs: &Coefficients,
) -> Result<impl Iterator<Item = Result<OddsRatioRecord>> + '_> {
    let events = iter_events(coeffs.n_vars())?.skip(1);
    Ok(events.map(move |t| group_odds_ratio(coeffs, SubsetSpec::from_indicator(t))))
}

/// Same records as [`ensemble_with`], generated in parallel over contiguous
/// target ranges of `chunk` events and merged back in ν order.
pub fn ensemble_parallel(
    coeffs: &Coefficients,
    options: &EnsembleOptions,
    chunk: u64,
) -> Result<Vec<OddsRatioRecord>> {
    let n = coeffs.n_vars();
    check_cap(n, options.max_vars)?;
    let chunk = chunk.max(1);
    let last = full_mask(n);
    let parts: Vec<Vec<OddsRatioRecord>> = (0..=last / chunk)
        .into_par_iter()
        .map(|i| {
            let lo = (i * chunk).max(1);
            let hi = (i * chunk).saturating_add(chunk - 1).min(last);
            if lo > hi {
                return Ok(Vec::new());
            }
            EventIter::range(n, lo, hi)?
                .map(|t| group_odds_ratio(coeffs, SubsetSpec::from_indicator(t)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<OddsRatioRecord> = parts.into_iter().flatten().collect();
    if options.include_inverse {
        records.push(inverse_odds_ratio(coeffs)?);
    }
    Ok(records)
}

/// Extremes and central tendency of a set of odds ratios.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub count: usize,
    pub min: f64,
    pub min_subset: SubsetSpec,
    pub max: f64,
    pub max_subset: SubsetSpec,
    /// `exp` of the mean exponent.
    pub geometric_mean: f64,
    pub above_one: usize,
    pub equal_one: usize,
    pub below_one: usize,
}

/// Streaming accumulator behind [`ensemble_summary`]. Ties keep the first
/// record seen.
#[derive(Clone, Debug, Default)]
pub struct SummaryAccumulator {
    count: usize,
    exponent_sum: f64,
    min: Option<(f64, SubsetSpec)>,
    max: Option<(f64, SubsetSpec)>,
    above: usize,
    equal: usize,
    below: usize,
}

impl SummaryAccumulator {
    pub fn push(&mut self, record: &OddsRatioRecord) {
        let v = record.value();
        self.count += 1;
        self.exponent_sum += record.exponent();
        if self.min.is_none_or(|(m, _)| v < m) {
            self.min = Some((v, record.subset()));
        }
        if self.max.is_none_or(|(m, _)| v > m) {
            self.max = Some((v, record.subset()));
        }
        if (v - 1.0).abs() <= UNIT_TOLERANCE {
            self.equal += 1;
        } else if v > 1.0 {
            self.above += 1;
        } else {
            self.below += 1;
        }
    }

    pub fn finish(self) -> Result<EnsembleSummary> {
        let (Some((min, min_subset)), Some((max, max_subset))) = (self.min, self.max) else {
            return Err(Error::domain(
                "cannot summarize an empty set of odds ratios",
            ));
        };
        Ok(EnsembleSummary {
            count: self.count,
            min,
            min_subset,
            max,
            max_subset,
            geometric_mean: (self.exponent_sum / self.count as f64).exp(),
            above_one: self.above,
            equal_one: self.equal,
            below_one: self.below,
        })
    }
}

pub fn ensemble_summary(records: &[OddsRatioRecord]) -> Result<EnsembleSummary> {
    let mut acc = SummaryAccumulator::default();
    records.iter().for_each(|r| acc.push(r));
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(n: usize, nu: u64) -> Event {
        Event::new(n, nu).unwrap()
    }

    fn ln235() -> Coefficients {
        Coefficients::new(0.0, vec![2f64.ln(), 3f64.ln(), 5f64.ln()]).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a / b - 1.0).abs()
    }

    #[test]
    fn basic_examples() {
        let c = Coefficients::new(0.1, vec![0.7, -0.2]).unwrap();
        let r = basic_odds_ratio(&c, 1).unwrap();
        assert_eq!((r.reference(), r.target()), (ev(2, 0), ev(2, 2)));
        assert_eq!(r.value(), 0.7f64.exp());
        assert_eq!(r.kind(), RatioKind::Basic);
        let c3 = Coefficients::new(0.1, vec![0.7, -0.2, 0.3]).unwrap();
        let r = basic_odds_ratio(&c3, 2).unwrap();
        assert_eq!(r.target().bits(), vec![0, 1, 0]);
        assert_eq!(r.value(), (-0.2f64).exp());
        let z = Coefficients::new(0.1, vec![0.0]).unwrap();
        assert_eq!(basic_odds_ratio(&z, 1).unwrap().value(), 1.0);
        assert!(basic_odds_ratio(&c, 3).is_err());
        assert!(basic_odds_ratio(&c, 0).is_err());
    }

    #[test]
    fn between_examples() {
        let c = Coefficients::new(0.1, vec![0.7, -0.2]).unwrap();
        let r = odds_ratio_between(&c, ev(2, 2), ev(2, 3)).unwrap();
        assert_eq!(r.value(), (-0.2f64).exp());
        assert_eq!(r.subset().members(), vec![2]);
        assert_eq!(r.kind(), RatioKind::Basic);
        let c3 = ln235();
        let r = odds_ratio_between(&c3, ev(3, 0), ev(3, 5)).unwrap();
        assert_eq!(r.exponent(), 2f64.ln() + 5f64.ln());
        assert_eq!(r.kind(), RatioKind::Group);
        assert_eq!(r.exponent_symbolic(), "b1+b3");
        assert!(odds_ratio_between(&c3, ev(3, 0), ev(3, 0)).is_err());
        let err = odds_ratio_between(&c3, ev(3, 4), ev(3, 3))
            .unwrap_err()
            .to_string();
        assert!(err.contains("x1"), "{err}");
        assert!(odds_ratio_between(&c3, ev(2, 0), ev(2, 1)).is_err());
    }

    #[test]
    fn group_examples() {
        let c = ln235();
        let s = |m: &[usize]| SubsetSpec::from_members(3, m).unwrap();
        let g7 = group_odds_ratio(&c, s(&[1, 2, 3])).unwrap();
        assert!(rel(g7.value(), 30.0) < 1e-14);
        assert_eq!(g7.exponent_symbolic(), "b1+b2+b3");
        let g3 = group_odds_ratio(&c, s(&[2, 3])).unwrap();
        assert_eq!(g3.target(), ev(3, 3));
        assert!(rel(g3.value(), 15.0) < 1e-14);
        let g4 = group_odds_ratio(&c, s(&[1])).unwrap();
        assert_eq!(g4, basic_odds_ratio(&c, 1).unwrap());
        assert!(group_odds_ratio(&c, s(&[])).is_err());
    }

    #[test]
    fn inverse_examples() {
        let z = Coefficients::new(3.0, vec![0.0; 4]).unwrap();
        assert_eq!(inverse_odds_ratio(&z).unwrap().value(), 1.0);
        let inv = inverse_odds_ratio(&ln235()).unwrap();
        assert!(rel(inv.value(), 1.0 / 30.0) < 1e-14);
        assert_eq!((inv.reference(), inv.target()), (ev(3, 7), ev(3, 0)));
        assert_eq!(inv.exponent_symbolic(), "-(b1+b2+b3)");
        let one = Coefficients::new(0.0, vec![4f64.ln()]).unwrap();
        assert!(rel(inverse_odds_ratio(&one).unwrap().value(), 0.25) < 1e-15);
    }

    #[test]
    fn ensemble_examples() {
        let e = ensemble(&ln235()).unwrap();
        let values: Vec<f64> = e.iter().map(OddsRatioRecord::value).collect();
        for (v, want) in values.iter().zip([5.0, 3.0, 15.0, 2.0, 10.0, 6.0, 30.0]) {
            assert!(rel(*v, want) < 1e-12, "{v} vs {want}");
        }
        let one = Coefficients::new(0.0, vec![0.4]).unwrap();
        let e1 = ensemble(&one).unwrap();
        assert_eq!(e1.len(), 1);
        assert_eq!(e1[0].value(), 0.4f64.exp());
        let two = Coefficients::new(0.0, vec![2f64.ln(), 3f64.ln()]).unwrap();
        let v2: Vec<f64> = ensemble(&two).unwrap().iter().map(|r| r.value()).collect();
        assert!(rel(v2[0], 3.0) < 1e-15 && rel(v2[1], 2.0) < 1e-15 && rel(v2[2], 6.0) < 1e-15);
        let opts = EnsembleOptions {
            include_inverse: true,
            ..Default::default()
        };
        let with_inv = ensemble_with(&two, &opts).unwrap();
        assert_eq!(with_inv.len(), 4);
        assert_eq!(with_inv[3].kind(), RatioKind::Inverse);
        let big = Coefficients::new(0.0, vec![0.0; 21]).unwrap();
        assert!(matches!(ensemble(&big), Err(Error::Capacity { .. })));
        assert_eq!(ensemble_iter(&big).unwrap().take(3).count(), 3);
    }

    #[test]
    fn parallel_matches_sequential() {
        let c =
            Coefficients::new(0.3, (1..=10).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
        let opts = EnsembleOptions {
            include_inverse: true,
            ..Default::default()
        };
        let seq = ensemble_with(&c, &opts).unwrap();
        for chunk in [1, 7, 64, 1000, 5000] {
            let par = ensemble_parallel(&c, &opts, chunk).unwrap();
            assert_eq!(par.len(), seq.len());
            for (a, b) in par.iter().zip(&seq) {
                assert_eq!(a.value().to_bits(), b.value().to_bits());
                assert_eq!(a.target(), b.target());
            }
        }
    }

    #[test]
    fn summary_examples() {
        let s = ensemble_summary(&ensemble(&ln235()).unwrap()).unwrap();
        assert!(rel(s.max, 30.0) < 1e-14);
        assert_eq!(s.max_subset.number(), 7);
        assert!(rel(s.min, 2.0) < 1e-14);
        assert_eq!(s.min_subset.members(), vec![1]);
        assert_eq!((s.above_one, s.equal_one, s.below_one), (7, 0, 0));
        // geometric mean of 5,3,15,2,10,6,30 = 30^(4/7)
        assert!(rel(s.geometric_mean, 30f64.powf(4.0 / 7.0)) < 1e-13);

        let zero = Coefficients::new(1.0, vec![0.0; 4]).unwrap();
        let s = ensemble_summary(&ensemble(&zero).unwrap()).unwrap();
        assert_eq!((s.count, s.equal_one), (15, 15));

        let cancel = Coefficients::new(0.0, vec![2f64.ln(), -(2f64.ln())]).unwrap();
        let e = ensemble(&cancel).unwrap();
        assert_eq!(e[2].value(), 1.0);
        let s = ensemble_summary(&e).unwrap();
        assert_eq!((s.above_one, s.equal_one, s.below_one), (1, 1, 1));

        assert!(ensemble_summary(&[]).is_err());
    }
}
