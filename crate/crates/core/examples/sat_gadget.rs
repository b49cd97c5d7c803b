//! Satisfiability through stable matchings with ties, and the amplified
//! family where a satisfiable formula yields exactly one blocking edge.

use roommates::blocking_edges;
use roommates::io::parse_dimacs;
use roommates::reductions::{
    assignment_to_matching, brute_sat, gen_amplified, gen_srti_from_sat, matching_to_assignment,
    FormulaMode,
};
use roommates::srti::solvable;

fn main() -> roommates::Result<()> {
    let f = parse_dimacs(
        "p cnf 3 4\n1 2 3 0\n1 2 3 0\n-1 -2 -3 0\n-1 -2 -3 0\n",
        FormulaMode::Strict,
    )?;
    let bundle = gen_srti_from_sat(&f);
    println!("{} agents", bundle.instance.num_agents());
    if let Some(m) = solvable(&bundle.instance, None)? {
        println!(
            "stable matching found, assignment {:?}",
            matching_to_assignment(&bundle, &m)?
        );
    }

    let a = brute_sat(&f)?.expect("satisfiable");
    for copies in 1..=3 {
        let amp = gen_amplified(&f, copies)?;
        let m = assignment_to_matching(&amp, &a)?;
        let bp = blocking_edges(&amp.instance, &m)?.blocking.len();
        println!(
            "copies={copies}: {} agents, witness has {bp} blocking edge(s)",
            amp.instance.num_agents()
        );
    }
    Ok(())
}
