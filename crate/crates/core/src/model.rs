//! Value types shared by every other module.
//!
//! Variables are addressed 1-based (`x1..xN`) everywhere in the public API.
//! An [`Event`] packs the states of all `N` variables into an integer whose
//! most significant of `N` binary digits is `x1`, so `{0,1,0}` is event 2.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `N` an [`Event`] can represent (event numbers live in a `u64`).
pub const MAX_VARS: usize = 63;

/// Default cap on `N` for operations that materialize all `2^N` events.
pub const DEFAULT_MAX_N: usize = 20;

/// One realization of all `N` binary explanatory variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    n_vars: u32,
    number: u64,
}

pub(crate) fn check_n_vars(n_vars: usize) -> Result<()> {
    if n_vars == 0 {
        return Err(Error::domain("the number of variables must be at least 1"));
    }
    if n_vars > MAX_VARS {
        return Err(Error::TooManyVariables {
            n_vars,
            max: MAX_VARS,
        });
    }
    Ok(())
}

/// `2^n - 1`, the number of the all-ones event.
pub(crate) fn full_mask(n_vars: usize) -> u64 {
    (1u64 << n_vars) - 1
}

impl Event {
    /// Builds event `number` for `n_vars` variables.
    pub fn new(n_vars: usize, number: u64) -> Result<Self> {
        check_n_vars(n_vars)?;
        let max = full_mask(n_vars);
        if number > max {
            return Err(Error::domain(format!(
                "event number {number} is out of range 0..={max} for {n_vars} variables"
            )));
        }
        Ok(Event {
            n_vars: n_vars as u32,
            number,
        })
    }

    /// Builds an event from its states, `bits[0]` being `x1`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        check_n_vars(bits.len())?;
        let mut number = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            if b > 1 {
                return Err(Error::domain(format!(
                    "state of x{} is {b}; event states must be 0 or 1",
                    i + 1
                )));
            }
            number = (number << 1) | u64::from(b);
        }
        Ok(Event {
            n_vars: bits.len() as u32,
            number,
        })
    }

    pub(crate) fn from_parts(n_vars: usize, number: u64) -> Self {
        debug_assert!((1..=MAX_VARS).contains(&n_vars) && number <= full_mask(n_vars));
        Event {
            n_vars: n_vars as u32,
            number,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars as usize
    }

    /// The event number ν.
    pub fn number(&self) -> u64 {
        self.number
    }

    /// State of variable `var` (1-based). Panics if `var` is out of range.
    pub fn state(&self, var: usize) -> u8 {
        assert!(
            (1..=self.n_vars()).contains(&var),
            "variable x{var} out of range for {} variables",
            self.n_vars
        );
        ((self.number >> (self.n_vars() - var)) & 1) as u8
    }

    /// States of `x1..xN` in order.
    pub fn bits(&self) -> Vec<u8> {
        (1..=self.n_vars()).map(|v| self.state(v)).collect()
    }

    /// Number of variables in state 1.
    pub fn ones(&self) -> usize {
        self.number.count_ones() as usize
    }

    /// `E_5`
    pub fn name(&self) -> String {
        format!("E_{}", self.number)
    }

    /// `101`
    pub fn binary(&self) -> String {
        format!("{:0width$b}", self.number, width = self.n_vars())
    }

    /// `{1,0,1}`
    pub fn state_list(&self) -> String {
        let states: Vec<String> = self.bits().iter().map(u8::to_string).collect();
        format!("{{{}}}", states.join(","))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.name(), self.state_list())
    }
}

/// Intercept `β0` and per-variable coefficients `β1..βN` of a logit model.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    intercept: f64,
    betas: Vec<f64>,
}

impl Coefficients {
    pub fn new(intercept: f64, betas: Vec<f64>) -> Result<Self> {
        check_n_vars(betas.len())?;
        if !intercept.is_finite() {
            return Err(Error::domain(format!(
                "intercept b0 = {intercept} is not finite"
            )));
        }
        if let Some((i, b)) = betas.iter().enumerate().find(|(_, b)| !b.is_finite()) {
            return Err(Error::domain(format!(
                "coefficient b{} = {b} is not finite",
                i + 1
            )));
        }
        Ok(Coefficients { intercept, betas })
    }

    /// Parses `"b0,b1,...,bN"`.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::domain(format!("'{}' is not a number", s.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        match values.split_first() {
            Some((&b0, rest)) if !rest.is_empty() => Coefficients::new(b0, rest.to_vec()),
            _ => Err(Error::domain(
                "coefficients must list the intercept followed by at least one slope",
            )),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.betas.len()
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// `β_var` for a 1-based variable index. Panics if out of range.
    pub fn beta(&self, var: usize) -> f64 {
        self.betas[var - 1]
    }

    /// Same slopes, intercept moved by `shift`.
    pub fn with_intercept_shift(&self, shift: f64) -> Result<Self> {
        Coefficients::new(self.intercept + shift, self.betas.clone())
    }
}

/// A subset `S_k` of the variables, numbered like the events: bit `N - i`
/// of `k` is set iff `x_i` is a member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetSpec {
    n_vars: u32,
    number: u64,
}

impl SubsetSpec {
    /// The subset with number `k`.
    pub fn new(n_vars: usize, number: u64) -> Result<Self> {
        let ev = Event::new(n_vars, number)?;
        Ok(SubsetSpec::from_indicator(ev))
    }

    /// Builds a subset from 1-based member indices (any order, no duplicates).
    pub fn from_members(n_vars: usize, members: &[usize]) -> Result<Self> {
        check_n_vars(n_vars)?;
        let mut number = 0u64;
        for &m in members {
            if !(1..=n_vars).contains(&m) {
                return Err(Error::domain(format!(
                    "variable index {m} is out of range 1..={n_vars}"
                )));
            }
            let bit = 1u64 << (n_vars - m);
            if number & bit != 0 {
                return Err(Error::domain(format!("variable x{m} listed twice")));
            }
            number |= bit;
        }
        Ok(SubsetSpec {
            n_vars: n_vars as u32,
            number,
        })
    }

    /// The subset whose indicator is `event`.
    pub fn from_indicator(event: Event) -> Self {
        SubsetSpec {
            n_vars: event.n_vars,
            number: event.number,
        }
    }

    /// The event with state 1 exactly at the members.
    pub fn indicator(&self) -> Event {
        Event {
            n_vars: self.n_vars,
            number: self.number,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars as usize
    }

    pub fn number(&self) -> u64 {
        self.number
    }

    /// Members as strictly increasing 1-based indices.
    pub fn members(&self) -> Vec<usize> {
        let n = self.n_vars();
        (1..=n)
            .filter(|&v| (self.number >> (n - v)) & 1 == 1)
            .collect()
    }

    pub fn contains(&self, var: usize) -> bool {
        (1..=self.n_vars()).contains(&var) && (self.number >> (self.n_vars() - var)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.number.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.number == 0
    }

    /// `S_5`
    pub fn name(&self) -> String {
        format!("S_{}", self.number)
    }

    /// `{x1,x3}` using the default variable labels.
    pub fn member_list(&self) -> String {
        let names: Vec<String> = self.members().iter().map(|m| format!("x{m}")).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Like [`member_list`](Self::member_list) but with caller-supplied labels.
    pub fn member_list_named(&self, var_names: &[String]) -> String {
        let names: Vec<&str> = self
            .members()
            .iter()
            .map(|&m| var_names.get(m - 1).map_or("?", String::as_str))
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

impl fmt::Display for SubsetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.name(), self.member_list())
    }
}

impl serde::Serialize for SubsetSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SubsetSpec", 3)?;
        st.serialize_field("name", &self.name())?;
        st.serialize_field("number", &self.number())?;
        st.serialize_field("members", &self.members())?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioKind {
    Basic,
    Group,
    Inverse,
}

impl fmt::Display for RatioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RatioKind::Basic => "basic",
            RatioKind::Group => "group",
            RatioKind::Inverse => "inverse",
        })
    }
}

/// One odds ratio `O(target) / O(reference)` together with how it was formed.
#[derive(Clone, Debug, PartialEq)]
pub struct OddsRatioRecord {
    pub(crate) subset: SubsetSpec,
    pub(crate) reference: Event,
    pub(crate) target: Event,
    pub(crate) exponent: f64,
    pub(crate) value: f64,
    pub(crate) kind: RatioKind,
}

impl OddsRatioRecord {
    pub fn subset(&self) -> SubsetSpec {
        self.subset
    }

    pub fn reference(&self) -> Event {
        self.reference
    }

    pub fn target(&self) -> Event {
        self.target
    }

    /// Sum of the member coefficients (negated for the inverse ratio).
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn kind(&self) -> RatioKind {
        self.kind
    }

    /// Exponent written with coefficient symbols, e.g. `b1+b3` or `-(b1+b2)`.
    pub fn exponent_symbolic(&self) -> String {
        let sum: Vec<String> = self
            .subset
            .members()
            .iter()
            .map(|m| format!("b{m}"))
            .collect();
        let sum = sum.join("+");
        match self.kind {
            RatioKind::Inverse => format!("-({sum})"),
            _ => sum,
        }
    }
}

/// A (0,1)-coded observation table. Each row's explanatory values form an
/// [`Event`]; the response is stored as a bool (`true` = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    var_names: Vec<String>,
    response_name: String,
    x: Vec<Event>,
    y: Vec<bool>,
    weights: Option<Vec<f64>>,
}

impl Dataset {
    /// Builds a dataset from raw rows, checking the (0,1) coding of every
    /// value and the positivity of every weight.
    pub fn new(
        var_names: Vec<String>,
        response_name: impl Into<String>,
        rows: Vec<(Vec<u8>, u8)>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n_vars = var_names.len();
        check_n_vars(n_vars)?;
        let response_name = response_name.into();
        let mut x = Vec::with_capacity(rows.len());
        let mut y = Vec::with_capacity(rows.len());
        for (i, (xs, yv)) in rows.into_iter().enumerate() {
            if xs.len() != n_vars {
                return Err(Error::Schema(format!(
                    "row {} has {} explanatory values, expected {n_vars}",
                    i + 1,
                    xs.len()
                )));
            }
            if let Some(pos) = xs.iter().position(|&v| v > 1) {
                return Err(Error::Validation {
                    row: i + 1,
                    line: i + 2,
                    column: var_names[pos].clone(),
                    value: xs[pos].to_string(),
                });
            }
            if yv > 1 {
                return Err(Error::Validation {
                    row: i + 1,
                    line: i + 2,
                    column: response_name.clone(),
                    value: yv.to_string(),
                });
            }
            x.push(Event::from_bits(&xs)?);
            y.push(yv == 1);
        }
        Dataset::from_events(var_names, response_name, x, y, weights)
    }

    /// Builds a dataset whose explanatory rows are already events.
    pub fn from_events(
        var_names: Vec<String>,
        response_name: impl Into<String>,
        x: Vec<Event>,
        y: Vec<bool>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        let n_vars = var_names.len();
        check_n_vars(n_vars)?;
        if x.len() != y.len() {
            return Err(Error::Schema(format!(
                "{} explanatory rows but {} responses",
                x.len(),
                y.len()
            )));
        }
        if let Some(ev) = x.iter().find(|e| e.n_vars() != n_vars) {
            return Err(Error::Schema(format!(
                "event {ev} does not have {n_vars} variables"
            )));
        }
        if let Some(w) = &weights {
            if w.len() != x.len() {
                return Err(Error::Schema(format!(
                    "{} weights for {} rows",
                    w.len(),
                    x.len()
                )));
            }
            if let Some(i) = w.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::InvalidWeight {
                    row: i + 1,
                    line: i + 2,
                    column: "weight".into(),
                    value: w[i].to_string(),
                });
            }
        }
        Ok(Dataset {
            var_names,
            response_name: response_name.into(),
            x,
            y,
            weights,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// Rows as `(event, response, weight)`, weight 1 for unweighted data.
    pub fn rows(&self) -> impl Iterator<Item = (Event, bool, f64)> + '_ {
        self.x.iter().zip(&self.y).enumerate().map(|(i, (&e, &y))| {
            let w = self.weights.as_ref().map_or(1.0, |w| w[i]);
            (e, y, w)
        })
    }

    /// Total weight of rows with `y = 1` and `y = 0`.
    pub fn outcome_totals(&self) -> (f64, f64) {
        self.rows().fold(
            (0.0, 0.0),
            |(s, f), (_, y, w)| {
                if y {
                    (s + w, f)
                } else {
                    (s, f + w)
                }
            },
        )
    }

    /// Fails unless both outcomes occur.
    pub fn check_response(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Schema("the dataset has no rows".into()));
        }
        match self.outcome_totals() {
            (0.0, _) => Err(Error::DegenerateResponse {
                column: self.response_name.clone(),
                value: 0,
            }),
            (_, 0.0) => Err(Error::DegenerateResponse {
                column: self.response_name.clone(),
                value: 1,
            }),
            _ => Ok(()),
        }
    }

    /// Replaces every weighted row by `weight` unweighted copies. Weights must
    /// be whole numbers.
    pub fn expanded(&self) -> Result<Dataset> {
        let Some(weights) = &self.weights else {
            return Ok(self.clone());
        };
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (i, ((&e, &r), &w)) in self.x.iter().zip(&self.y).zip(weights).enumerate() {
            if w.fract() != 0.0 {
                return Err(Error::InvalidWeight {
                    row: i + 1,
                    line: i + 2,
                    column: "weight".into(),
                    value: w.to_string(),
                });
            }
            for _ in 0..w as u64 {
                x.push(e);
                y.push(r);
            }
        }
        Dataset::from_events(
            self.var_names.clone(),
            self.response_name.clone(),
            x,
            y,
            None,
        )
    }
}

/// `x1..xN`
pub fn default_var_names(n_vars: usize) -> Vec<String> {
    (1..=n_vars).map(|i| format!("x{i}")).collect()
}
