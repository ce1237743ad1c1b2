//! CSV ingestion of (0,1)-coded datasets and seeded synthetic generation.
//!
//! The CSV dialect is comma separated with a header row. Every column other
//! than the response and the optional weight column is an explanatory
//! variable, numbered `x1..xN` in file order.
//!
//! Synthetic data is drawn from a `ChaCha8Rng` seeded with
//! `SeedableRng::seed_from_u64(seed)`. For each row the explanatory states
//! are drawn first (in `x1..xN` order), then one uniform `u` in `[0, 1)`;
//! the response is 1 iff `u < P(y = 1 | x)`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{default_var_names, full_mask, Coefficients, Dataset, Event};
use crate::odds::log_odds;

/// Column name used for weights when writing a weighted dataset.
pub const WEIGHT_COLUMN: &str = "weight";

/// Reads a dataset from a CSV file. See [`read_csv`].
pub fn load_csv(
    path: impl AsRef<Path>,
    response_column: &str,
    weight_column: Option<&str>,
) -> Result<Dataset> {
    let file = File::open(path.as_ref())?;
    read_csv(file, response_column, weight_column)
}

/// Reads and validates a headered CSV. Rejects non-binary cells with their
/// coordinates, a missing response column, an empty table and a response
/// that is constant.
pub fn read_csv<R: Read>(
    reader: R,
    response_column: &str,
    weight_column: Option<&str>,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    for (i, h) in headers.iter().enumerate() {
        if headers[..i].contains(h) {
            return Err(Error::Schema(format!("duplicate column '{h}'")));
        }
    }
    let find = |name: &str| headers.iter().position(|h| h == name);
    let response_idx = find(response_column).ok_or_else(|| {
        Error::Schema(format!(
            "response column '{response_column}' not found in header [{}]",
            headers.join(",")
        ))
    })?;
    let weight_idx = match weight_column {
        Some(w) => Some(
            find(w)
                .ok_or_else(|| Error::Schema(format!("weight column '{w}' not found in header")))?,
        ),
        None => None,
    };
    let var_idx: Vec<usize> = (0..headers.len())
        .filter(|&i| i != response_idx && Some(i) != weight_idx)
        .collect();
    if var_idx.is_empty() {
        return Err(Error::Schema("no explanatory columns".into()));
    }
    let var_names: Vec<String> = var_idx.iter().map(|&i| headers[i].clone()).collect();

    let binary = |record: &csv::StringRecord, col: usize, row: usize| -> Result<u8> {
        let line = record.position().map_or(row + 1, |p| p.line() as usize);
        match record.get(col) {
            Some("0") => Ok(0),
            Some("1") => Ok(1),
            other => Err(Error::Validation {
                row,
                line,
                column: headers[col].clone(),
                value: other.unwrap_or("").to_string(),
            }),
        }
    };

    let mut rows = Vec::new();
    let mut weights = weight_idx.map(|_| Vec::new());
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        let x = var_idx
            .iter()
            .map(|&c| binary(&record, c, row))
            .collect::<Result<Vec<u8>>>()?;
        let y = binary(&record, response_idx, row)?;
        if let (Some(wi), Some(ws)) = (weight_idx, weights.as_mut()) {
            let raw = record.get(wi).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(w) if w.is_finite() && w > 0.0 => ws.push(w),
                _ => {
                    return Err(Error::InvalidWeight {
                        row,
                        line: record.position().map_or(row + 1, |p| p.line() as usize),
                        column: headers[wi].clone(),
                        value: raw.to_string(),
                    })
                }
            }
        }
        rows.push((x, y));
    }
    if rows.is_empty() {
        return Err(Error::Schema(
            "the file has a header but no data rows".into(),
        ));
    }
    let data = Dataset::new(var_names, response_column, rows, weights)?;
    data.check_response()?;
    Ok(data)
}

/// Writes `data` in the same dialect [`read_csv`] accepts. Weighted datasets
/// get a trailing [`WEIGHT_COLUMN`].
pub fn write_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = data.var_names().iter().map(String::as_str).collect();
    header.push(data.response_name());
    if data.weights().is_some() {
        header.push(WEIGHT_COLUMN);
    }
    wtr.write_record(&header)?;
    for (event, y, w) in data.rows() {
        let mut fields: Vec<String> = event.bits().iter().map(u8::to_string).collect();
        fields.push(u8::from(y).to_string());
        if data.weights().is_some() {
            fields.push(w.to_string());
        }
        wtr.write_record(&fields)?;
    }
    wtr.flush()?;
    Ok(())
}

/// How explanatory states are drawn for synthetic rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Design {
    /// Every event equally likely.
    UniformEvents,
    /// Each variable independently 1 with the given probability.
    IidBernoulli(f64),
}

impl FromStr for Design {
    type Err = Error;

    /// `uniform-events` (or `uniform`), `iid-bernoulli:P` (or `bernoulli:P`).
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "uniform-events" || s == "uniform" => Ok(Design::UniformEvents),
            Some((kind, p)) if kind == "iid-bernoulli" || kind == "bernoulli" => {
                let p: f64 = p
                    .parse()
                    .map_err(|_| Error::domain(format!("'{p}' is not a probability")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::domain(format!("probability {p} is outside [0, 1]")));
                }
                Ok(Design::IidBernoulli(p))
            }
            _ => Err(Error::domain(format!(
                "unknown design '{s}'; expected uniform-events or iid-bernoulli:P"
            ))),
        }
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Draws `n_rows` observations from the logit model `coeffs`.
/// The result depends only on the arguments.
pub fn generate_synthetic(
    coeffs: &Coefficients,
    n_rows: usize,
    seed: u64,
    design: Design,
) -> Result<Dataset> {
    if n_rows == 0 {
        return Err(Error::domain("n_rows must be at least 1"));
    }
    if let Design::IidBernoulli(p) = design {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("probability {p} is outside [0, 1]")));
        }
    }
    let n = coeffs.n_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n_rows);
    let mut y = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let event = match design {
            Design::UniformEvents => Event::new(n, rng.random_range(0..=full_mask(n)))?,
            Design::IidBernoulli(p) => {
                let bits: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(p))).collect();
                Event::from_bits(&bits)?
            }
        };
        let p = logistic(log_odds(coeffs, event)?);
        let u: f64 = rng.random();
        x.push(event);
        y.push(u < p);
    }
    Dataset::from_events(default_var_names(n), "y", x, y, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset> {
        read_csv(text.as_bytes(), "y", None)
    }

    #[test]
    fn reads_a_three_variable_table() {
        let mut text = String::from("x1,x2,x3,y\n");
        for nu in 0..8u32 {
            text.push_str(&format!(
                "{},{},{},{}\n",
                nu >> 2 & 1,
                nu >> 1 & 1,
                nu & 1,
                nu % 2
            ));
        }
        let d = parse(&text).unwrap();
        assert_eq!(d.n_vars(), 3);
        assert_eq!(d.len(), 8);
        assert_eq!(d.var_names(), &["x1", "x2", "x3"]);
        let events: Vec<u64> = d.rows().map(|(e, _, _)| e.number()).collect();
        assert_eq!(events, (0..8).collect::<Vec<u64>>());
    }

    #[test]
    fn response_column_can_be_anywhere() {
        let d = read_csv("out,a,b\n1,0,1\n0,1,1\n".as_bytes(), "out", None).unwrap();
        assert_eq!(d.var_names(), &["a", "b"]);
        assert_eq!(d.response_name(), "out");
    }

    #[test]
    fn non_binary_cell_reports_coordinates() {
        match parse("x1,x2,y\n0,1,1\n1,2,0\n") {
            Err(Error::Validation {
                row,
                line,
                column,
                value,
            }) => {
                assert_eq!((row, line), (2, 3));
                assert_eq!(column, "x2");
                assert_eq!(value, "2");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("x1,y\n0,1\n1,yes\n"),
            Err(Error::Validation { .. })
        ));
        assert!(matches!(
            parse("x1,y\n0,1\n1,\n"),
            Err(Error::Validation { .. })
        ));
        assert!(matches!(
            parse("x1,y\n0.0,1\n1,0\n"),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(parse("x1,z\n0,1\n"), Err(Error::Schema(_))));
        assert!(matches!(parse("x1,y\n"), Err(Error::Schema(_))));
        assert!(matches!(parse("y\n1\n0\n"), Err(Error::Schema(_))));
        assert!(matches!(parse("x1,x1,y\n0,0,1\n"), Err(Error::Schema(_))));
        assert!(matches!(
            parse("x1,y\n0,1\n1,1\n"),
            Err(Error::DegenerateResponse { value: 1, .. })
        ));
    }

    #[test]
    fn grouped_file_matches_expansion() {
        let text = "x1,y,count\n1,1,3\n1,0,2\n0,1,1\n0,0,4\n";
        let g = read_csv(text.as_bytes(), "y", Some("count")).unwrap();
        assert_eq!(g.weights(), Some(&[3.0, 2.0, 1.0, 4.0][..]));
        assert_eq!(g.var_names(), &["x1"]);
        let e = g.expanded().unwrap();
        assert_eq!(e.len(), 10);
        assert_eq!(e.outcome_totals(), g.outcome_totals());
        assert!(matches!(
            read_csv("x1,y,count\n1,1,0\n0,0,1\n".as_bytes(), "y", Some("count")),
            Err(Error::InvalidWeight { row: 1, .. })
        ));
        assert!(read_csv(text.as_bytes(), "y", Some("n")).is_err());
    }

    #[test]
    fn write_then_read_round_trips() {
        let c = Coefficients::new(-0.2, vec![0.4, -1.0, 0.9]).unwrap();
        let d = generate_synthetic(&c, 200, 3, Design::UniformEvents).unwrap();
        let mut buf = Vec::new();
        write_csv(&d, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice(), "y", None).unwrap(), d);

        let g = read_csv(
            "x1,y,count\n1,1,3\n0,0,4.5\n".as_bytes(),
            "y",
            Some("count"),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&g, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "x1,y,weight\n1,1,3\n0,0,4.5\n"
        );
        assert_eq!(read_csv(buf.as_slice(), "y", Some("weight")).unwrap(), g);
    }

    #[test]
    fn generation_is_deterministic() {
        let c = Coefficients::new(0.1, vec![0.5, 0.5]).unwrap();
        let a = generate_synthetic(&c, 500, 42, Design::IidBernoulli(0.3)).unwrap();
        let b = generate_synthetic(&c, 500, 42, Design::IidBernoulli(0.3)).unwrap();
        let other = generate_synthetic(&c, 500, 43, Design::IidBernoulli(0.3)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        let (mut ba, mut bb) = (Vec::new(), Vec::new());
        write_csv(&a, &mut ba).unwrap();
        write_csv(&b, &mut bb).unwrap();
        assert_eq!(ba, bb);
    }

    #[test]
    fn zero_model_is_a_fair_coin() {
        let c = Coefficients::new(0.0, vec![0.0; 3]).unwrap();
        let d = generate_synthetic(&c, 40_000, 7, Design::UniformEvents).unwrap();
        let (s, f) = d.outcome_totals();
        let rate = s / (s + f);
        // 5 standard errors of a proportion at n = 40000
        assert!((rate - 0.5).abs() < 5.0 * 0.5 / 200.0, "{rate}");
    }

    #[test]
    fn cellwise_odds_ratio_approaches_population_value() {
        let c = Coefficients::new(0.25f64.ln(), vec![6f64.ln()]).unwrap();
        let d = generate_synthetic(&c, 100_000, 11, Design::UniformEvents).unwrap();
        let mut n = [[0.0f64; 2]; 2];
        for (e, y, w) in d.rows() {
            n[e.number() as usize][usize::from(y)] += w;
        }
        let or = (n[1][1] * n[0][0]) / (n[1][0] * n[0][1]);
        // log OR standard error ≈ sqrt(Σ 1/n_ij) ≈ 0.021 here
        assert!((or.ln() - 6f64.ln()).abs() < 0.1, "{or}");
    }

    #[test]
    fn single_row_and_bad_inputs() {
        let c = Coefficients::new(0.0, vec![1.0]).unwrap();
        let d = generate_synthetic(&c, 1, 0, Design::UniformEvents).unwrap();
        assert_eq!(d.len(), 1);
        assert!(generate_synthetic(&c, 0, 0, Design::UniformEvents).is_err());
        assert!(generate_synthetic(&c, 5, 0, Design::IidBernoulli(1.5)).is_err());
        assert_eq!("uniform".parse::<Design>().unwrap(), Design::UniformEvents);
        assert_eq!(
            "iid-bernoulli:0.25".parse::<Design>().unwrap(),
            Design::IidBernoulli(0.25)
        );
        assert!("bernoulli:x".parse::<Design>().is_err());
        assert!("gray".parse::<Design>().is_err());
    }
}
