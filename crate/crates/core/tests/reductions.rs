mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{cubic_graphs, relaxed_formula};
use roommates::io::{parse_instance, render_instance};
use roommates::reductions::{
    assignment_to_matching, brute_sat, gen_amplified, gen_egal_from_vc, gen_srti_from_sat,
    matching_to_assignment, CnfFormula, FormulaMode, ReductionBundle,
};
use roommates::srti::solvable;
use roommates::{blocking_edges, validate};

fn check_bundle(b: &ReductionBundle) {
    assert!(validate(&b.instance.to_raw(), 3).is_ok());
    assert_eq!(b.instance.max_list_len(), 3);
    let roles: BTreeSet<String> = b.instance.agents().map(|a| b.role(a).to_string()).collect();
    assert_eq!(
        roles.len(),
        b.instance.num_agents(),
        "labels must be distinct"
    );
    assert_eq!(
        parse_instance(&render_instance(&b.instance)).unwrap(),
        b.instance
    );
}

/// Every relaxed formula over at most four variables is satisfiable.
///
/// With each literal used at most twice there are at most 16 literal slots,
/// so at most five clauses. All clause multisets of that size are checked.
#[test]
fn small_relaxed_formulas_are_all_satisfiable() {
    let mut clauses = Vec::new();
    for a in 1..=4i32 {
        for b in a + 1..=4 {
            for c in b + 1..=4 {
                for signs in 0..8 {
                    let s = |bit: i32, v: i32| if signs & bit != 0 { -v } else { v };
                    clauses.push([s(1, a), s(2, b), s(4, c)]);
                }
            }
        }
    }
    let satisfied = |f: &[[i32; 3]], bits: u32| {
        f.iter().all(|cl| {
            cl.iter()
                .any(|&l| (bits >> (l.unsigned_abs() - 1)) & 1 == u32::from(l > 0))
        })
    };
    let mut checked = 0u64;
    let mut stack = vec![(Vec::<[i32; 3]>::new(), 0usize, [[0u8; 2]; 4])];
    while let Some((f, from, used)) = stack.pop() {
        if !f.is_empty() {
            checked += 1;
            assert!(
                (0..16).any(|bits| satisfied(&f, bits)),
                "unsatisfiable: {f:?}"
            );
        }
        for (i, cl) in clauses.iter().enumerate().skip(from) {
            let mut next = used;
            let fits = cl.iter().all(|&l| {
                let slot = &mut next[l.unsigned_abs() as usize - 1][usize::from(l < 0)];
                *slot += 1;
                *slot <= 2
            });
            if fits {
                let mut g = f.clone();
                g.push(*cl);
                stack.push((g, i, next));
            }
        }
    }
    assert_eq!(checked, 15_432);
}

#[test]
fn vc_bundles_are_valid_for_all_small_cubic_graphs() {
    for (name, g) in cubic_graphs() {
        let b = gen_egal_from_vc(&g, 0);
        assert_eq!(
            b.instance.num_agents(),
            12 * g.num_vertices() + 4 * g.num_edges(),
            "{name}"
        );
        check_bundle(&b);
    }
}

#[test]
fn sat_iff_on_a_balanced_formula() {
    let f = CnfFormula::new(
        3,
        vec![[1, 2, 3], [1, -2, -3], [-1, 2, -3], [-1, -2, 3]],
        FormulaMode::Relaxed,
    )
    .unwrap();
    let b = gen_srti_from_sat(&f);
    check_bundle(&b);
    assert_eq!(
        brute_sat(&f).unwrap().is_some(),
        solvable(&b.instance, None).unwrap().is_some()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sat_gadget_agrees_with_brute_force(seed in any::<u64>(), vars in 3usize..=4) {
        let f = relaxed_formula(&mut ChaCha8Rng::seed_from_u64(seed), vars, 5);
        let b = gen_srti_from_sat(&f);
        check_bundle(&b);
        let found = solvable(&b.instance, Some(10_000_000)).unwrap();
        prop_assert_eq!(found.is_some(), brute_sat(&f).unwrap().is_some());
        if let Some(m) = found {
            let a = matching_to_assignment(&b, &m).unwrap();
            prop_assert!(f.first_false(&a).is_none());
            let back = assignment_to_matching(&b, &a).unwrap();
            prop_assert!(blocking_edges(&b.instance, &back).unwrap().stable);
        }
    }

    #[test]
    fn amplified_witness_has_one_blocking_edge(seed in any::<u64>(), copies in 1usize..=3) {
        let f = relaxed_formula(&mut ChaCha8Rng::seed_from_u64(seed), 4, 5);
        let b = gen_amplified(&f, copies).unwrap();
        prop_assert_eq!(b.instance.num_agents(), copies * (4 * 4 + 20 * f.clauses().len()) + 3);
        check_bundle(&b);
        let a = brute_sat(&f).unwrap().expect("small relaxed formulas are satisfiable");
        let m = assignment_to_matching(&b, &a).unwrap();
        prop_assert_eq!(blocking_edges(&b.instance, &m).unwrap().blocking.len(), 1);
    }
}
