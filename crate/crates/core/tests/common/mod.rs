#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roommates::io::random_instance;
use roommates::reductions::{CnfFormula, CubicGraph, FormulaMode};
use roommates::solver::solve;
use roommates::Instance;

type RawGraph = (&'static str, usize, Vec<(usize, usize)>);

/// Every cubic graph on at most 8 vertices, up to isomorphism.
pub fn cubic_graphs() -> Vec<(&'static str, CubicGraph)> {
    let raw: Vec<RawGraph> = vec![
        (
            "K4",
            4,
            vec![(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
        ),
        (
            "K3,3",
            6,
            vec![
                (1, 4),
                (1, 5),
                (1, 6),
                (2, 4),
                (2, 5),
                (2, 6),
                (3, 4),
                (3, 5),
                (3, 6),
            ],
        ),
        (
            "prism",
            6,
            vec![
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 5),
                (3, 6),
                (4, 5),
                (4, 6),
                (5, 6),
            ],
        ),
        (
            "2K4",
            8,
            vec![
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 4),
                (3, 4),
                (5, 6),
                (5, 7),
                (5, 8),
                (6, 7),
                (6, 8),
                (7, 8),
            ],
        ),
        (
            "C8a",
            8,
            vec![
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 4),
                (3, 5),
                (4, 6),
                (5, 7),
                (5, 8),
                (6, 7),
                (6, 8),
                (7, 8),
            ],
        ),
        (
            "C8b",
            8,
            vec![
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 5),
                (3, 6),
                (4, 5),
                (4, 7),
                (5, 8),
                (6, 7),
                (6, 8),
                (7, 8),
            ],
        ),
        (
            "C8c",
            8,
            vec![
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 5),
                (3, 6),
                (4, 7),
                (4, 8),
                (5, 7),
                (5, 8),
                (6, 7),
                (6, 8),
            ],
        ),
        (
            "cube",
            8,
            vec![
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 5),
                (2, 6),
                (3, 5),
                (3, 7),
                (4, 6),
                (4, 7),
                (5, 8),
                (6, 8),
                (7, 8),
            ],
        ),
        (
            "Wagner",
            8,
            vec![
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 5),
                (2, 6),
                (3, 5),
                (3, 7),
                (4, 6),
                (4, 8),
                (5, 8),
                (6, 7),
                (7, 8),
            ],
        ),
    ];
    raw.into_iter()
        .map(|(name, n, e)| (name, CubicGraph::new(n, e).unwrap()))
        .collect()
}

/// `count` solvable strict instances with `4 <= n <= 12` and lists of length
/// at most `d`, deterministic in `seed`.
pub fn solvable_corpus(d: usize, count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(4..=12);
        let inst = random_instance(n, d, 0.0, rng.gen());
        if inst.num_edges() > 0 && solve(&inst).unwrap().is_some() {
            out.push(inst);
        }
    }
    out
}

/// Random relaxed formulas on `vars` variables with up to `max_clauses`
/// clauses, respecting the two-per-polarity bound.
pub fn relaxed_formula(rng: &mut ChaCha8Rng, vars: usize, max_clauses: usize) -> CnfFormula {
    let mut left = vec![[2usize; 2]; vars];
    let mut clauses = Vec::new();
    let target = rng.gen_range(1..=max_clauses);
    let mut attempts = 0;
    while clauses.len() < target && attempts < 200 {
        attempts += 1;
        let mut clause = [0i32; 3];
        let mut ok = true;
        for r in 0..3 {
            let v = rng.gen_range(0..vars);
            let neg = rng.gen_bool(0.5);
            if clause[..r]
                .iter()
                .any(|&l| l.unsigned_abs() as usize == v + 1)
                || left[v][usize::from(neg)] == 0
            {
                ok = false;
                break;
            }
            clause[r] = if neg { -(v as i32 + 1) } else { v as i32 + 1 };
        }
        if ok {
            for l in clause {
                left[l.unsigned_abs() as usize - 1][usize::from(l < 0)] -= 1;
            }
            clauses.push(clause);
        }
    }
    CnfFormula::new(vars, clauses, FormulaMode::Relaxed).unwrap()
}

/// All assignments of `n` variables.
pub fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |s| (0..n).map(|i| s & (1 << i) != 0).collect())
}
