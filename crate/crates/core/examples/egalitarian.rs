//! Approximate egalitarian matchings on random instances and compare against
//! the exact optimum.

use roommates::egal::{egal_2sri, egal_approx_with, egal_exact, MinWeightMode};
use roommates::io::random_instance;
use roommates::solver::solve;

fn main() -> roommates::Result<()> {
    for d in 3..=5 {
        let mut worst = None;
        let mut seen = 0;
        for seed in 0.. {
            let inst = random_instance(12, d, 0.0, seed);
            if solve(&inst)?.is_none() {
                continue;
            }
            let r = egal_approx_with(&inst, d, MinWeightMode::Exact, true)?;
            let ratio = r.ratio().expect("oracle requested");
            worst = worst.max(Some(ratio));
            seen += 1;
            if seen == 200 {
                break;
            }
        }
        let bound = roommates::egal::guarantee(d)?;
        println!(
            "d={d}: worst ratio {} over {seen} instances (bound {bound})",
            worst.unwrap()
        );
    }

    let inst = random_instance(20, 2, 0.0, 7);
    if let Ok((m, c)) = egal_2sri(&inst) {
        println!(
            "d=2: polynomial optimum {c}, exact {}",
            egal_exact(&inst)?.1
        );
        println!("  {m}");
    }
    Ok(())
}
