//! Draws data from known coefficients, writes it as CSV, reads it back and
//! refits.
//!
//!     cargo run --example synthetic_round_trip -- 20000 2024

use group_odds::data::{generate_synthetic, read_csv, write_csv, Design};
use group_odds::fit::{fit_logit, FitOptions};
use group_odds::Coefficients;

fn main() -> group_odds::Result<()> {
    let mut args = std::env::args().skip(1);
    let rows: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(20_000);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(2024);

    let truth = Coefficients::new(-0.3, vec![0.5, -0.8, 1.2])?;
    let data = generate_synthetic(&truth, rows, seed, Design::UniformEvents)?;

    let mut csv = Vec::new();
    write_csv(&data, &mut csv)?;
    let reread = read_csv(csv.as_slice(), "y", None)?;
    assert_eq!(reread, data);

    let fit = fit_logit(&reread, &FitOptions::default())?;
    println!("coef  truth    estimate");
    println!(
        "b0   {:>6.3}  {:>9.6}",
        truth.intercept(),
        fit.coefficients.intercept()
    );
    for k in 1..=truth.n_vars() {
        println!(
            "b{k}   {:>6.3}  {:>9.6}",
            truth.beta(k),
            fit.coefficients.beta(k)
        );
    }
    Ok(())
}
