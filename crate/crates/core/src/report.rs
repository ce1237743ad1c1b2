//! Text, CSV and JSON renderings of events, ratio records and summaries.
//!
//! Tables print numbers with 6 significant digits; CSV and JSON carry the
//! shortest representation that round-trips the `f64`.

use std::io::{self, Write};

use serde_json::json;

use crate::model::{Event, OddsRatioRecord, SubsetSpec};
use crate::ratios::EnsembleSummary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// `%.6g`: 6 significant digits, trailing zeros dropped, scientific
/// notation outside `1e-4 ..< 1e6`.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{v:.*}", (5 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Left-aligned columns separated by two spaces.
#[derive(Clone, Debug, Default)]
pub struct TextTable {
    widths: Vec<usize>,
}

impl TextTable {
    /// Column widths fitting every row in `sample`.
    pub fn fitting<'a>(sample: impl IntoIterator<Item = &'a [String]>) -> Self {
        let mut widths: Vec<usize> = Vec::new();
        for row in sample {
            if widths.len() < row.len() {
                widths.resize(row.len(), 0);
            }
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        TextTable { widths }
    }

    pub fn line(&self, row: &[String]) -> String {
        let mut s = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(cell);
            let w = self.widths.get(i).copied().unwrap_or(0);
            s.extend(std::iter::repeat_n(
                ' ',
                w.saturating_sub(cell.chars().count()),
            ));
        }
        s.trim_end().to_string()
    }
}

fn csv_line(fields: &[String]) -> io::Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(fields).map_err(io::Error::other)?;
    let bytes = w
        .into_inner()
        .map_err(|e| io::Error::other(e.to_string()))?;
    Ok(String::from_utf8_lossy(&bytes)
        .trim_end_matches('\n')
        .to_string())
}

pub fn event_header(n_vars: usize) -> Vec<String> {
    let vars: Vec<String> = (1..=n_vars).map(|i| format!("x{i}")).collect();
    vec![
        "Event".into(),
        "Number".into(),
        "Binary".into(),
        format!("{{{}}}", vars.join(",")),
    ]
}

pub fn event_row(e: &Event) -> Vec<String> {
    vec![e.name(), e.number().to_string(), e.binary(), e.state_list()]
}

/// Writes an event listing. Column widths depend only on `n_vars`, so the
/// events may come from a lazy iterator.
pub fn write_events(
    out: &mut dyn Write,
    n_vars: usize,
    events: impl Iterator<Item = Event>,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Table => {
            let header = event_header(n_vars);
            let widest = event_row(&Event::new(n_vars, (1u64 << n_vars) - 1).expect("valid"));
            let table = TextTable::fitting([header.as_slice(), widest.as_slice()]);
            writeln!(out, "{}", table.line(&header))?;
            for e in events {
                writeln!(out, "{}", table.line(&event_row(&e)))?;
            }
        }
        Format::Csv => {
            writeln!(out, "event,number,binary,bits")?;
            for e in events {
                writeln!(out, "{}", csv_line(&event_row(&e))?)?;
            }
        }
        Format::Json => {
            write!(out, "{{\"n_vars\":{n_vars},\"events\":[")?;
            for (i, e) in events.enumerate() {
                let sep = if i == 0 { "\n" } else { ",\n" };
                let obj = json!({
                    "name": e.name(),
                    "number": e.number(),
                    "binary": e.binary(),
                    "bits": e.bits(),
                });
                write!(out, "{sep}{obj}")?;
            }
            writeln!(out, "\n]}}")?;
        }
    }
    Ok(())
}

/// Renders records and an optional summary.
pub struct RatioWriter<'a> {
    out: &'a mut dyn Write,
    format: Format,
    var_names: Vec<String>,
    table: TextTable,
    written: usize,
}

pub fn ratio_header() -> Vec<String> {
    [
        "Kind",
        "Reference",
        "Target",
        "Subset",
        "Exponent",
        "Odds ratio",
        "Value",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn subset_label(s: &SubsetSpec, var_names: &[String]) -> String {
    format!("{}={}", s.name(), s.member_list_named(var_names))
}

impl<'a> RatioWriter<'a> {
    /// `widest` should include the longest rows that will be written (the
    /// full-set record and, if present, the inverse record).
    pub fn new(
        out: &'a mut dyn Write,
        format: Format,
        var_names: Vec<String>,
        widest: &[OddsRatioRecord],
    ) -> Self {
        let header = ratio_header();
        let sample: Vec<Vec<String>> = std::iter::once(header)
            .chain(widest.iter().map(|r| table_row(r, &var_names)))
            .collect();
        let table = TextTable::fitting(sample.iter().map(Vec::as_slice));
        RatioWriter {
            out,
            format,
            var_names,
            table,
            written: 0,
        }
    }

    pub fn begin(&mut self) -> io::Result<()> {
        match self.format {
            Format::Table => writeln!(self.out, "{}", self.table.line(&ratio_header())),
            Format::Csv => writeln!(
                self.out,
                "kind,reference,target,subset,members,exponent_symbolic,exponent,value"
            ),
            Format::Json => {
                let names = serde_json::to_string(&self.var_names).map_err(io::Error::other)?;
                write!(
                    self.out,
                    "{{\"n_vars\":{},\"var_names\":{names},\"records\":[",
                    self.var_names.len()
                )
            }
        }
    }

    pub fn record(&mut self, r: &OddsRatioRecord) -> io::Result<()> {
        match self.format {
            Format::Table => {
                let line = self.table.line(&table_row(r, &self.var_names));
                writeln!(self.out, "{line}")?;
            }
            Format::Csv => {
                let fields = vec![
                    r.kind().to_string(),
                    r.reference().number().to_string(),
                    r.target().number().to_string(),
                    r.subset().name(),
                    r.subset().member_list_named(&self.var_names),
                    r.exponent_symbolic(),
                    r.exponent().to_string(),
                    r.value().to_string(),
                ];
                writeln!(self.out, "{}", csv_line(&fields)?)?;
            }
            Format::Json => {
                let sep = if self.written == 0 { "\n" } else { ",\n" };
                write!(self.out, "{sep}{}", record_json(r, &self.var_names))?;
            }
        }
        self.written += 1;
        Ok(())
    }

    pub fn finish(self, summary: Option<&EnsembleSummary>) -> io::Result<()> {
        match self.format {
            Format::Table => {
                if let Some(s) = summary {
                    writeln!(self.out)?;
                    for line in summary_lines(s, &self.var_names) {
                        writeln!(self.out, "{line}")?;
                    }
                }
            }
            Format::Csv => {}
            Format::Json => {
                write!(self.out, "\n]")?;
                if let Some(s) = summary {
                    let v = serde_json::to_string(s).map_err(io::Error::other)?;
                    write!(self.out, ",\"summary\":{v}")?;
                }
                writeln!(self.out, "}}")?;
            }
        }
        Ok(())
    }
}

pub fn table_row(r: &OddsRatioRecord, var_names: &[String]) -> Vec<String> {
    vec![
        r.kind().to_string(),
        r.reference().to_string(),
        r.target().to_string(),
        subset_label(&r.subset(), var_names),
        r.exponent_symbolic(),
        format!("exp({})", r.exponent_symbolic()),
        sig6(r.value()),
    ]
}

pub fn record_json(r: &OddsRatioRecord, var_names: &[String]) -> serde_json::Value {
    json!({
        "kind": r.kind(),
        "reference": {"number": r.reference().number(), "bits": r.reference().bits()},
        "target": {"number": r.target().number(), "bits": r.target().bits()},
        "subset": {
            "name": r.subset().name(),
            "members": r.subset().members(),
            "names": r.subset().members().iter().map(|&m| var_names[m - 1].clone()).collect::<Vec<_>>(),
        },
        "exponent_symbolic": r.exponent_symbolic(),
        "exponent": r.exponent(),
        "value": r.value(),
    })
}

pub fn summary_lines(s: &EnsembleSummary, var_names: &[String]) -> Vec<String> {
    let rows: Vec<Vec<String>> = vec![
        vec!["records".into(), s.count.to_string()],
        vec![
            "max".into(),
            format!(
                "{} at {}",
                sig6(s.max),
                subset_label(&s.max_subset, var_names)
            ),
        ],
        vec![
            "min".into(),
            format!(
                "{} at {}",
                sig6(s.min),
                subset_label(&s.min_subset, var_names)
            ),
        ],
        vec!["geometric mean".into(), sig6(s.geometric_mean)],
        vec!["above 1".into(), s.above_one.to_string()],
        vec!["equal to 1".into(), s.equal_one.to_string()],
        vec!["below 1".into(), s.below_one.to_string()],
    ];
    let table = TextTable::fitting(rows.iter().map(Vec::as_slice));
    std::iter::once("summary".to_string())
        .chain(rows.iter().map(|r| format!("  {}", table.line(r))))
        .collect()
}
