//! Solve and enumerate a small instance.

use roommates::io::parse_instance;
use roommates::solver::{enumerate, solve, DEFAULT_CAP};
use roommates::{blocking_edges, cost};

fn main() -> roommates::Result<()> {
    let inst = parse_instance(
        "sri 6
1: 2 4 3
2: 3 1 5
3: 1 2 6
4: 5 1 6
5: 6 4 2
6: 4 5 3
",
    )?;
    match solve(&inst)? {
        Some(m) => println!("stable: {m} (cost {})", cost(&inst, &m)?),
        None => println!("no stable matching"),
    }
    for m in &enumerate(&inst, DEFAULT_CAP)? {
        let report = blocking_edges(&inst, m)?;
        println!("  {m} cost={} stable={}", cost(&inst, m)?, report.stable);
    }
    Ok(())
}
