//! Streams the ensemble of a 20-variable model without materializing it,
//! keeping only a running summary.

use group_odds::ratios::{ensemble_iter, SummaryAccumulator};
use group_odds::verify::random_coefficients;

fn main() -> group_odds::Result<()> {
    let c = random_coefficients(20, 7, 0.5)?;
    let mut acc = SummaryAccumulator::default();
    for r in ensemble_iter(&c)? {
        acc.push(&r?);
    }
    let s = acc.finish()?;
    println!("records        {}", s.count);
    println!("max            {:.6} at {}", s.max, s.max_subset.name());
    println!("min            {:.6} at {}", s.min, s.min_subset.name());
    println!("geometric mean {:.6}", s.geometric_mean);
    println!("above / below 1: {} / {}", s.above_one, s.below_one);
    Ok(())
}
