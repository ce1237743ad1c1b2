//! Odds ratios for logistic regression with binary explanatory variables.
//!
//! With `N` binary variables coded (0,1) there are `2^N` joint states
//! (*events*). The odds ratio between a reference and a target event that
//! differ by a set of variables switching from 0 to 1 is `exp` of the sum of
//! those variables' coefficients. This crate enumerates the events, maps
//! each target event to its variable subset, computes the basic (one
//! variable), Group (several variables) and inverse (all variables 1→0)
//! odds ratios, fits the coefficients from data, and checks all of it
//! against a brute-force quotient of odds.
//!
//! ```
//! use group_odds::{ratios, Coefficients};
//!
//! let c = Coefficients::new(0.0, vec![2f64.ln(), 3f64.ln(), 5f64.ln()]).unwrap();
//! let values: Vec<f64> = ratios::ensemble(&c).unwrap().iter().map(|r| r.value()).collect();
//! let expected = [5.0, 3.0, 15.0, 2.0, 10.0, 6.0, 30.0];
//! assert!(values.iter().zip(expected).all(|(v, e)| (v / e - 1.0).abs() < 1e-12));
//! ```

pub mod cli;
pub mod data;
pub mod error;
pub mod events;
pub mod fit;
pub mod model;
pub mod model_file;
pub mod odds;
pub mod ratios;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Coefficients, Dataset, Event, OddsRatioRecord, RatioKind, SubsetSpec};
