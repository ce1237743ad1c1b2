//! The full ensemble of Group Odds Ratios for a three-variable model, plus
//! the inverse ratio and a summary.

use group_odds::ratios::{ensemble_summary, ensemble_with, EnsembleOptions};
use group_odds::Coefficients;

fn main() -> group_odds::Result<()> {
    let c = Coefficients::new(-1.0, vec![2f64.ln(), 3f64.ln(), 5f64.ln()])?;
    let opts = EnsembleOptions {
        include_inverse: true,
        ..EnsembleOptions::default()
    };
    let records = ensemble_with(&c, &opts)?;
    for r in &records {
        println!(
            "{:<8} {} -> {}  {:<16} exp({}) = {:.6}",
            r.kind().to_string(),
            r.reference().name(),
            r.target().name(),
            r.subset().to_string(),
            r.exponent_symbolic(),
            r.value()
        );
    }

    let groups = &records[..records.len() - 1];
    let s = ensemble_summary(groups)?;
    println!();
    println!("largest  {:.6} at {}", s.max, s.max_subset);
    println!("smallest {:.6} at {}", s.min, s.min_subset);
    println!("geometric mean {:.6}", s.geometric_mean);
    Ok(())
}
