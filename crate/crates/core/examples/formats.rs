//! Generate, print and re-read instances.

use roommates::io::{parse_instance, random_instance, render_instance, render_matching};
use roommates::solver::solve;

fn main() -> roommates::Result<()> {
    let inst = random_instance(8, 3, 0.0, 42);
    let text = render_instance(&inst);
    print!("{text}");
    assert_eq!(parse_instance(&text)?, inst);
    if let Some(m) = solve(&inst)? {
        print!("{}", render_matching(&m));
    }
    print!("{}", render_instance(&random_instance(6, 2, 0.5, 1)));
    Ok(())
}
