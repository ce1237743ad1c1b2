//! Every (reference, target) pair that switches the same variables on gives
//! the same odds ratio, whatever the other variables are doing.

use group_odds::events::reference_target_pairs;
use group_odds::odds::oracle_odds_ratio;
use group_odds::ratios::odds_ratio_between;
use group_odds::{Coefficients, SubsetSpec};

fn main() -> group_odds::Result<()> {
    let c = Coefficients::new(0.4, vec![0.7, -1.1, 0.25, 0.9])?;
    let subset = SubsetSpec::from_members(4, &[1, 3])?;
    println!("pairs switching {subset}:");
    for (r, t) in reference_target_pairs(subset)? {
        let closed = odds_ratio_between(&c, r, t)?.value();
        let direct = oracle_odds_ratio(&c, r, t)?;
        println!("  {r} -> {t}  closed form {closed:.12}  odds/odds {direct:.12}");
    }
    Ok(())
}
