//! Fits a grouped 2x2 table: 30 of 50 respond when x1 = 1, 10 of 50 when
//! x1 = 0. The fitted odds ratio is the cross-product ratio, 6.

use group_odds::fit::{fit_logit, FitOptions};
use group_odds::ratios::basic_odds_ratio;
use group_odds::Dataset;

fn main() -> group_odds::Result<()> {
    let rows = vec![(vec![1], 1), (vec![1], 0), (vec![0], 1), (vec![0], 0)];
    let counts = vec![30.0, 20.0, 10.0, 40.0];
    let data = Dataset::new(vec!["exposed".into()], "outcome", rows, Some(counts))?;

    let fit = fit_logit(&data, &FitOptions::default())?;
    println!("iterations     {}", fit.iterations);
    println!("log-likelihood {:.6}", fit.log_likelihood);
    println!(
        "b0 = {:.9}  (ln 0.25 = {:.9})",
        fit.coefficients.intercept(),
        0.25f64.ln()
    );
    println!(
        "b1 = {:.9}  (ln 6    = {:.9})",
        fit.coefficients.beta(1),
        6f64.ln()
    );
    println!(
        "odds ratio {:.6}",
        basic_odds_ratio(&fit.coefficients, 1)?.value()
    );
    for it in &fit.trace {
        println!(
            "  iter {:>2}  ll {:>14.8}  |score| {:.2e}",
            it.iteration, it.log_likelihood, it.score_norm
        );
    }
    Ok(())
}
