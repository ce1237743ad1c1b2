//! Runs the law checker on a model, then on a deliberately broken ratio
//! source to show what a counterexample looks like.

use group_odds::verify::{verify_laws, verify_laws_with, Perturbed, VerifyOptions};
use group_odds::Coefficients;

fn main() -> group_odds::Result<()> {
    let c = Coefficients::new(0.1, vec![0.8, -0.4, 1.3, 0.2])?;
    let opts = VerifyOptions::default();

    let report = verify_laws(&c, &opts)?;
    for law in &report.laws {
        println!(
            "{:<22} checks={:<6} worst={:.1e}",
            law.law.to_string(),
            law.checks,
            law.worst_relative_error
        );
    }
    println!("holds: {}", report.passed());

    let broken = Perturbed {
        target: 6,
        factor: 1.0 + 1e-6,
    };
    let report = verify_laws_with(&broken, &c, &opts)?;
    for law in report.laws.iter().filter(|l| !l.passed) {
        println!(
            "{} fails: {}",
            law.law,
            law.counterexample.as_ref().unwrap()
        );
    }
    Ok(())
}
