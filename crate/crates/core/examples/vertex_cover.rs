//! Minimum vertex cover of K4 through the egalitarian reduction.

use roommates::egal::egal_exact;
use roommates::io::parse_graph;
use roommates::reductions::{gen_egal_from_vc, k_prime, matching_to_cover};

fn main() -> roommates::Result<()> {
    let g = parse_graph("p 4 6\n1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n")?;
    let bundle = gen_egal_from_vc(&g, 3);
    println!(
        "{} agents, K' = {}",
        bundle.instance.num_agents(),
        k_prime(&g, 3)
    );
    let (m, c) = egal_exact(&bundle.instance)?;
    let cover = matching_to_cover(&bundle, &m)?;
    println!("egalitarian cost {c}, cover {cover:?}");
    for a in bundle.instance.agents().take(8) {
        println!("  agent {a} = {}", bundle.role(a));
    }
    Ok(())
}
