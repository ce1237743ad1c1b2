//! The `gor` command line: `events`, `fit`, `ratios`, `verify`, `generate`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage, capacity or
//! input-validation error, 3 fit failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::data::{generate_synthetic, load_csv, write_csv, Design};
use crate::error::{Error, Result};
use crate::events::{check_cap, event_from_number, iter_events};
use crate::fit::{fit_logit, FitOptions};
use crate::model::{default_var_names, Coefficients, SubsetSpec, DEFAULT_MAX_N, MAX_VARS};
use crate::model_file::ModelFile;
use crate::ratios::{
    ensemble_iter, group_odds_ratio, inverse_odds_ratio, odds_ratio_between, SummaryAccumulator,
};
use crate::report::{write_events, Format, RatioWriter};
use crate::verify::{
    verify_laws_with, ClosedForm, Perturbed, RatioSource, VerifyOptions, VerifyReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FIT_FAILED: i32 = 3;

/// Environment variable overriding the materialization cap on `N`.
pub const MAX_N_ENV: &str = "GOR_MAX_N";

#[derive(Debug, Parser)]
#[command(
    name = "gor",
    version,
    about = "Odds-ratio ensembles for logit models with binary variables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the 2^N events of N binary variables.
    Events {
        #[arg(long)]
        n_vars: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Allow N above the materialization cap by streaming rows.
        #[arg(long)]
        stream: bool,
    },
    /// Fit a logit model to a (0,1)-coded CSV file.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "y")]
        response: String,
        /// Column holding per-row counts for grouped data.
        #[arg(long)]
        weights: Option<String>,
        /// Where to write the model JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        max_iterations: usize,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[arg(long, default_value_t = 15.0)]
        divergence_bound: f64,
        /// Print failures as JSON on stdout.
        #[arg(long)]
        error_json: bool,
    },
    /// Basic, Group and inverse odds ratios of a model.
    Ratios {
        #[command(flatten)]
        source: ModelSource,
        /// Only the Group Odds Ratio of these 1-based variables, e.g. "2,3".
        #[arg(long, conflicts_with_all = ["reference", "target"])]
        subset: Option<String>,
        /// Reference event number (requires --target).
        #[arg(long, requires = "target")]
        reference: Option<u64>,
        /// Target event number (requires --reference).
        #[arg(long, requires = "reference")]
        target: Option<u64>,
        /// Append the all-ones to all-zeros inverse odds ratio.
        #[arg(long)]
        include_inverse: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Allow N above the materialization cap by streaming records.
        #[arg(long)]
        stream: bool,
    },
    /// Check the odds-ratio laws exhaustively for a model.
    Verify {
        #[command(flatten)]
        source: ModelSource,
        /// Also check this many random coefficient vectors (seeds 0..k).
        #[arg(long, default_value_t = 0)]
        seeds: u64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Scale every ratio with this target number by 1 + 1e-6.
        #[arg(long, hide = true)]
        inject_fault: Option<u64>,
    },
    /// Draw a synthetic dataset from known coefficients.
    Generate {
        /// "b0,b1,...,bN"
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        rows: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// uniform-events or iid-bernoulli:P
        #[arg(long, default_value = "uniform-events")]
        design: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ModelSource {
    /// Model JSON written by `gor fit`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Inline coefficients "b0,b1,...,bN".
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
}

impl ModelSource {
    fn load(&self) -> Result<(Coefficients, Vec<String>)> {
        match (&self.model, &self.coeffs) {
            (Some(path), _) => {
                let m = ModelFile::load(path)?;
                Ok((m.coefficients()?, m.var_names))
            }
            (None, Some(text)) => {
                let c = Coefficients::parse(text)?;
                let names = default_var_names(c.n_vars());
                Ok((c, names))
            }
            (None, None) => Err(Error::domain("either --model or --coeffs is required")),
        }
    }
}

/// Settings taken from the environment.
#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub max_n: usize,
}

impl Default for Context {
    fn default() -> Self {
        Context {
            max_n: DEFAULT_MAX_N,
        }
    }
}

impl Context {
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_N_ENV) {
            Ok(v) => {
                let max_n: usize = v.trim().parse().map_err(|_| {
                    Error::domain(format!("{MAX_N_ENV}='{v}' is not a non-negative integer"))
                })?;
                Ok(Context {
                    max_n: max_n.min(MAX_VARS),
                })
            }
            Err(_) => Ok(Context::default()),
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_fit_failure() {
        EXIT_FIT_FAILED
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Context::from_env() {
        Ok(ctx) => run_with(args, ctx, out, err),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run_with<I, T>(args: I, ctx: Context, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return e.exit_code();
        }
    };
    let error_json = matches!(
        cli.command,
        Command::Fit {
            error_json: true,
            ..
        }
    );
    match dispatch(cli.command, ctx, out) {
        Ok(code) => code,
        // downstream closed the pipe (`gor events --stream | head`)
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            if error_json {
                let body = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
                let _ = writeln!(out, "{body}");
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, ctx: Context, out: &mut dyn Write) -> Result<i32> {
    let mut out = BufWriter::new(out);
    let code = match command {
        Command::Events {
            n_vars,
            format,
            stream,
        } => {
            check_cap(n_vars, if stream { MAX_VARS } else { ctx.max_n })?;
            write_events(&mut out, n_vars, iter_events(n_vars)?, format)?;
            EXIT_OK
        }
        Command::Fit {
            data,
            response,
            weights,
            out: model_path,
            max_iterations,
            tolerance,
            divergence_bound,
            ..
        } => {
            let dataset = load_csv(&data, &response, weights.as_deref())?;
            let options = FitOptions {
                max_iterations,
                score_tolerance: tolerance,
                divergence_bound,
            };
            let fit = fit_logit(&dataset, &options)?;
            let model = ModelFile::from_fit(dataset.var_names(), &fit);
            if let Some(path) = &model_path {
                model.save(path)?;
            }
            print_fit(
                &mut out,
                dataset.var_names(),
                &response,
                dataset.len(),
                &model,
            )?;
            if let Some(path) = &model_path {
                writeln!(out, "model written to {}", path.display())?;
            }
            EXIT_OK
        }
        Command::Ratios {
            source,
            subset,
            reference,
            target,
            include_inverse,
            format,
            stream,
        } => {
            let (coeffs, names) = source.load()?;
            run_ratios(
                &mut out,
                &coeffs,
                names,
                RatioSelection {
                    subset,
                    pair: reference.zip(target),
                    include_inverse,
                },
                format,
                if stream { MAX_VARS } else { ctx.max_n },
            )?;
            EXIT_OK
        }
        Command::Verify {
            source,
            seeds,
            format,
            inject_fault,
        } => {
            let (coeffs, _) = source.load()?;
            let options = VerifyOptions {
                seeds,
                ..Default::default()
            };
            let perturbed;
            let ratio_source: &dyn RatioSource = match inject_fault {
                Some(target) => {
                    perturbed = Perturbed {
                        target,
                        factor: 1.0 + 1e-6,
                    };
                    &perturbed
                }
                None => &ClosedForm,
            };
            let report = verify_laws_with(ratio_source, &coeffs, &options)?;
            print_verify(&mut out, &report, format)?;
            if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            }
        }
        Command::Generate {
            coeffs,
            rows,
            seed,
            design,
            out: path,
        } => {
            let c = Coefficients::parse(&coeffs)?;
            let design: Design = design.parse()?;
            let dataset = generate_synthetic(&c, rows, seed, design)?;
            match path {
                Some(p) => write_csv(&dataset, BufWriter::new(File::create(p)?))?,
                None => write_csv(&dataset, &mut out)?,
            }
            EXIT_OK
        }
    };
    out.flush()?;
    Ok(code)
}

fn print_fit(
    out: &mut dyn Write,
    names: &[String],
    response: &str,
    rows: usize,
    model: &ModelFile,
) -> io::Result<()> {
    let fit = model.fit.as_ref().expect("fitted model");
    writeln!(out, "logit model for P({response} = 1), {rows} rows")?;
    writeln!(out, "log-likelihood  {:.6}", fit.log_likelihood)?;
    writeln!(out, "iterations      {}", fit.iterations)?;
    writeln!(out, "converged       {}", fit.converged)?;
    writeln!(out)?;
    writeln!(out, "coefficients")?;
    let width = names
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max("(intercept)".len());
    writeln!(
        out,
        "  b0  {:<width$}  {:>12.6}",
        "(intercept)", model.intercept
    )?;
    for (i, (name, b)) in names.iter().zip(&model.betas).enumerate() {
        writeln!(out, "  b{}  {name:<width$}  {b:>12.6}", i + 1)?;
    }
    writeln!(out)?;
    writeln!(
        out,
        "baseline odds (all variables 0): exp(b0) = {:.6}",
        model.intercept.exp()
    )?;
    writeln!(out, "basic odds ratios")?;
    for (i, (name, b)) in names.iter().zip(&model.betas).enumerate() {
        writeln!(out, "  {name:<width$}  exp(b{}) = {:.6}", i + 1, b.exp())?;
    }
    Ok(())
}

fn print_verify(out: &mut dyn Write, report: &VerifyReport, format: Format) -> Result<()> {
    if format == Format::Json {
        writeln!(out, "{}", serde_json::to_string(report)?)?;
        return Ok(());
    }
    if format == Format::Csv {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "law",
            "passed",
            "checks",
            "worst_relative_error",
            "tolerance",
        ])?;
        for law in &report.laws {
            w.write_record([
                law.law.name().to_string(),
                law.passed.to_string(),
                law.checks.to_string(),
                format!("{:e}", law.worst_relative_error),
                format!("{:e}", law.tolerance),
            ])?;
        }
        w.flush()?;
        return Ok(());
    }
    writeln!(
        out,
        "verifying N = {} over {} coefficient set(s)",
        report.n_vars, report.coefficient_sets
    )?;
    let width = report
        .laws
        .iter()
        .map(|l| l.law.name().len())
        .max()
        .unwrap_or(0);
    for law in &report.laws {
        let status = if law.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{status}  {:<width$}  checks={:<8} worst_rel_err={:<10.3e} tol={}",
            law.law.name(),
            law.checks,
            law.worst_relative_error,
            if law.tolerance == 0.0 {
                "exact".to_string()
            } else {
                format!("{:e}", law.tolerance)
            }
        )?;
        if let Some(cx) = &law.counterexample {
            writeln!(out, "      counterexample: {cx}")?;
        }
    }
    writeln!(
        out,
        "{}",
        if report.passed() {
            "all laws hold"
        } else {
            "law violations found"
        }
    )?;
    Ok(())
}

struct RatioSelection {
    subset: Option<String>,
    pair: Option<(u64, u64)>,
    include_inverse: bool,
}

fn parse_indices(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::domain(format!("'{}' is not a variable index", s.trim())))
        })
        .collect()
}

fn run_ratios(
    out: &mut dyn Write,
    coeffs: &Coefficients,
    names: Vec<String>,
    selection: RatioSelection,
    format: Format,
    cap: usize,
) -> Result<()> {
    let n = coeffs.n_vars();
    let inverse = if selection.include_inverse {
        Some(inverse_odds_ratio(coeffs)?)
    } else {
        None
    };

    let single = match (&selection.subset, selection.pair) {
        (Some(text), _) => {
            let members = parse_indices(text)?;
            Some(group_odds_ratio(
                coeffs,
                SubsetSpec::from_members(n, &members)?,
            )?)
        }
        (None, Some((r, t))) => Some(odds_ratio_between(
            coeffs,
            event_from_number(n, r)?,
            event_from_number(n, t)?,
        )?),
        (None, None) => None,
    };

    if let Some(record) = single {
        let mut widest = vec![record.clone()];
        widest.extend(inverse.clone());
        let mut w = RatioWriter::new(out, format, names, &widest);
        w.begin()?;
        w.record(&record)?;
        if let Some(inv) = &inverse {
            w.record(inv)?;
        }
        w.finish(None)?;
        return Ok(());
    }

    check_cap(n, cap)?;
    let full = group_odds_ratio(
        coeffs,
        SubsetSpec::from_indicator(crate::events::all_ones(n)?),
    )?;
    let mut widest = vec![full];
    widest.extend(inverse.clone());
    let mut w = RatioWriter::new(out, format, names, &widest);
    let mut summary = SummaryAccumulator::default();
    w.begin()?;
    for record in ensemble_iter(coeffs)? {
        let record = record?;
        summary.push(&record);
        w.record(&record)?;
    }
    if let Some(inv) = &inverse {
        w.record(inv)?;
    }
    w.finish(Some(&summary.finish()?))?;
    Ok(())
}
