//! Most-stable matchings when every list has length at most two.

use roommates::io::{parse_instance, random_instance};
use roommates::srti::{classify_components, min_bp_2srti, min_bp_brute, solvable, BruteOutcome};

fn main() -> roommates::Result<()> {
    // A 5-cycle where everyone prefers their successor, plus a tied triangle.
    let inst = parse_instance(
        "srti 8
1: 2 5
2: 3 1
3: 4 2
4: 5 3
5: 1 4
6: (7 8)
7: 8 6
8: 6 7
",
    )?;
    for shape in classify_components(&inst)? {
        let ids: Vec<usize> = shape.vertices.iter().map(|a| a.get()).collect();
        println!("{:?} {ids:?} odd_party={}", shape.kind, shape.odd_party);
    }
    let best = min_bp_2srti(&inst)?;
    println!("bp={} {}", best.bp_count, best.matching);
    if let BruteOutcome::Found(r) = min_bp_brute(&inst, 3, false)? {
        println!("brute force agrees: bp={}", r.bp_count);
    }
    println!("solvable: {:?}", solvable(&inst, None)?.is_some());

    let big = random_instance(200_000, 2, 0.3, 1);
    let start = std::time::Instant::now();
    let r = min_bp_2srti(&big)?;
    println!("n=200000: bp={} in {:?}", r.bp_count, start.elapsed());
    Ok(())
}
