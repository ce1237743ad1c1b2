//! Lists the events of N binary variables, numbered with x1 as the most
//! significant bit.
//!
//!     cargo run --example events_table -- 3

use group_odds::events::enumerate_events;

fn main() -> group_odds::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(3);
    for e in enumerate_events(n)? {
        println!(
            "{:<6} {:>4}  {}  {}",
            e.name(),
            e.number(),
            e.binary(),
            e.state_list()
        );
    }
    Ok(())
}
