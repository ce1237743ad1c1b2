//! Monte-Carlo spread of fitted coefficients around the truth.
//!
//! Draws `REPS` synthetic datasets (n = 20000, uniform events) from a known
//! N = 3 model, fits each, and prints the 0.5% and 99.5% quantiles of
//! `β̂ - β` per coefficient. The acceptance suite freezes these bounds.
//!
//!     cargo run --release --example calibrate_recovery [reps]

use group_odds::data::{generate_synthetic, Design};
use group_odds::fit::{fit_logit, FitOptions};
use group_odds::Coefficients;

const ROWS: usize = 20_000;
const FIRST_SEED: u64 = 1_000_000;

fn quantile(sorted: &[f64], q: f64) -> f64 {
    // linear interpolation between order statistics
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn main() {
    let reps: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("reps must be an integer"))
        .unwrap_or(2000);
    let truth = Coefficients::new(-0.3, vec![0.5, -0.8, 1.2]).unwrap();
    let want: Vec<f64> = std::iter::once(truth.intercept())
        .chain(truth.betas().iter().copied())
        .collect();

    let mut deviations: Vec<Vec<f64>> = vec![Vec::new(); want.len()];
    for seed in FIRST_SEED..FIRST_SEED + reps {
        let data = generate_synthetic(&truth, ROWS, seed, Design::UniformEvents).unwrap();
        let fit = fit_logit(&data, &FitOptions::default()).unwrap();
        let c = &fit.coefficients;
        let got = std::iter::once(c.intercept()).chain(c.betas().iter().copied());
        for ((dev, g), w) in deviations.iter_mut().zip(got).zip(&want) {
            dev.push(g - w);
        }
    }

    println!("{reps} replicates, n = {ROWS}, seeds {FIRST_SEED}..");
    println!("coef   truth     q0.005      q0.995      mean        sd");
    for (i, dev) in deviations.iter_mut().enumerate() {
        dev.sort_by(f64::total_cmp);
        let mean = dev.iter().sum::<f64>() / dev.len() as f64;
        let sd =
            (dev.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (dev.len() - 1) as f64).sqrt();
        println!(
            "b{i}  {:>7.3}  {:>10.6}  {:>10.6}  {:>10.6}  {:>8.6}",
            want[i],
            quantile(dev, 0.005),
            quantile(dev, 0.995),
            mean,
            sd
        );
    }
}
