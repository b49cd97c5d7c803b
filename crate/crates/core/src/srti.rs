//! Instances with ties: solvability search, the linear most-stable algorithm
//! for lists of length at most two, and an exhaustive most-stable baseline.

use std::ops::ControlFlow;

use serde::Serialize;

use crate::egal::components_deg2;
use crate::error::{Error, Result};
use crate::model::{blocking_edges, AgentId, Edge, Instance, Matching};
use crate::search::{Branching, Csp};
use crate::solver::solve_flat;

pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const BRUTE_GUARD: usize = 12;

/// A weakly stable matching, `None` if the search proves there is none, or
/// `Timeout` once more than `budget` branching nodes were needed.
pub fn solvable(inst: &Instance, budget: Option<u64>) -> Result<Option<Matching>> {
    let mut csp = Csp::new(inst, Branching::SmallestDomain, budget);
    let mut found = None;
    let _ = csp.run(&mut |m| {
        found = Some(m);
        ControlFlow::Break(())
    })?;
    Ok(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Path,
    EvenCycle,
    OddCycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentShape {
    pub kind: ShapeKind,
    /// Walk order. For an odd party every vertex strictly prefers the next
    /// vertex to the previous one.
    pub vertices: Vec<AgentId>,
    pub odd_party: bool,
}

/// Splits a degree-2 instance into paths and cycles.
pub fn classify_components(inst: &Instance) -> Result<Vec<ComponentShape>> {
    inst.require_max_len(2)?;
    Ok(components_deg2(inst)
        .into_iter()
        .map(|(mut vertices, is_cycle)| {
            if !is_cycle {
                return ComponentShape {
                    kind: ShapeKind::Path,
                    vertices,
                    odd_party: false,
                };
            }
            if vertices.len() % 2 == 0 {
                return ComponentShape {
                    kind: ShapeKind::EvenCycle,
                    vertices,
                    odd_party: false,
                };
            }
            let tiers = neighbour_tiers(inst, &vertices);
            let forward = tiers.iter().all(|&[prev, next]| next < prev);
            let backward = tiers.iter().all(|&[prev, next]| prev < next);
            if backward {
                vertices[1..].reverse();
            }
            let odd_party = forward || backward;
            if !odd_party {
                assert!(
                    neglected_vertex(&tiers).is_some(),
                    "odd cycle that is not a party has a vertex neither neighbour prefers"
                );
            }
            ComponentShape {
                kind: ShapeKind::OddCycle,
                vertices,
                odd_party,
            }
        })
        .collect())
}

/// Tiers of each cycle vertex's predecessor and successor in its own list.
fn neighbour_tiers(inst: &Instance, cycle: &[AgentId]) -> Vec<[u32; 2]> {
    let k = cycle.len();
    (0..k)
        .map(|i| {
            let t = |b: AgentId| inst.tier_of(cycle[i], b).expect("cycle edge");
            [t(cycle[(i + k - 1) % k]), t(cycle[(i + 1) % k])]
        })
        .collect()
}

/// A vertex of the cycle that neither neighbour strictly prefers over its
/// other neighbour.
fn neglected_vertex(tiers: &[[u32; 2]]) -> Option<usize> {
    let k = tiers.len();
    (0..k).find(|&i| {
        let [p_prev, p_next] = tiers[(i + k - 1) % k];
        let [s_prev, s_next] = tiers[(i + 1) % k];
        p_next >= p_prev && s_prev >= s_next
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MostStableResult {
    pub matching: Matching,
    pub bp_count: usize,
}

/// A matching with the fewest blocking edges when every list has length at
/// most two. The minimum equals the number of odd parties.
pub fn min_bp_2srti(inst: &Instance) -> Result<MostStableResult> {
    let shapes = classify_components(inst)?;
    let mut pairs = Vec::new();
    let mut on_odd_cycle = vec![false; inst.num_agents()];
    for s in &shapes {
        match s.kind {
            ShapeKind::OddCycle if s.odd_party => {
                pairs.extend(s.vertices.chunks_exact(2).map(|c| Edge::new(c[0], c[1])));
            }
            ShapeKind::OddCycle => pairs.extend(odd_cycle_matching(inst, &s.vertices)),
            _ => continue,
        }
        for v in &s.vertices {
            on_odd_cycle[v.index()] = true;
        }
    }
    // Paths and even cycles are bipartite: with ties broken by agent id the
    // proposal phases always end in a stable matching.
    let (start, to) = tie_broken(inst, &on_odd_cycle);
    let rest = solve_flat(start, to).expect("bipartite strict instances are solvable");
    pairs.extend(rest.pairs().iter().copied());
    let matching = Matching::new(inst, pairs)?;
    let bp_count = blocking_edges(inst, &matching)?.blocking.len();
    Ok(MostStableResult { matching, bp_count })
}

/// Flat strict lists of `inst` with ties ordered by id and the masked
/// agents' lists emptied, in the layout [`solve_flat`] expects.
fn tie_broken(inst: &Instance, masked: &[bool]) -> (Vec<usize>, Vec<u32>) {
    let mut start = Vec::with_capacity(inst.num_agents() + 1);
    let mut to = Vec::new();
    start.push(0);
    for a in inst.agents() {
        if !masked[a.index()] {
            for tier in inst.tiers(a) {
                let from = to.len();
                to.extend(tier.iter().map(|b| b.index() as u32));
                to[from..].sort_unstable();
            }
        }
        start.push(to.len());
    }
    (start, to)
}

/// Fewest-blocking-edge matching of a single cycle, by dynamic programming
/// over vertex states (matched backwards, matched forwards, unmatched).
fn odd_cycle_matching(inst: &Instance, cycle: &[AgentId]) -> Vec<Edge> {
    const BACK: usize = 0;
    const FWD: usize = 1;
    const FREE: usize = 2;
    let k = cycle.len();
    // tier[i][s]: tier of vertex i's partner in state s, unmatched last.
    let tier: Vec<[u32; 3]> = (0..k)
        .map(|i| {
            let t = |b: AgentId| inst.tier_of(cycle[i], b).expect("cycle edge");
            [t(cycle[(i + k - 1) % k]), t(cycle[(i + 1) % k]), u32::MAX]
        })
        .collect();
    // Cost of edge (i, i+1) given both states, or None if inconsistent.
    let edge_cost = |i: usize, si: usize, sj: usize| -> Option<usize> {
        let j = (i + 1) % k;
        match (si == FWD, sj == BACK) {
            (true, true) => Some(0),
            (false, false) => {
                let b = tier[i][FWD] < tier[i][si] && tier[j][BACK] < tier[j][sj];
                Some(usize::from(b))
            }
            _ => None,
        }
    };
    // Cheapest assignment of states 1..k given vertex 0 in state `s0`,
    // returning the final costs and, if asked, each vertex's parent states.
    let run = |s0: usize, mut parents: Option<&mut Vec<[u8; 3]>>| {
        let mut cur = [usize::MAX; 3];
        cur[s0] = 0;
        for i in 1..k {
            let mut next = [usize::MAX; 3];
            let mut from = [0u8; 3];
            for s in 0..3 {
                for (p, &cp) in cur.iter().enumerate() {
                    if cp == usize::MAX {
                        continue;
                    }
                    if let Some(c) = edge_cost(i - 1, p, s) {
                        if cp + c < next[s] {
                            next[s] = cp + c;
                            from[s] = p as u8;
                        }
                    }
                }
            }
            if let Some(ps) = parents.as_deref_mut() {
                ps.push(from);
            }
            cur = next;
        }
        cur
    };
    let mut best: Option<(usize, usize, usize)> = None;
    for s0 in [BACK, FWD, FREE] {
        let last = run(s0, None);
        for (s, &cost) in last.iter().enumerate() {
            if cost == usize::MAX {
                continue;
            }
            let Some(close) = edge_cost(k - 1, s, s0) else {
                continue;
            };
            let total = cost + close;
            if best.is_none_or(|(b, _, _)| total < b) {
                best = Some((total, s0, s));
            }
        }
    }
    let (_, s0, s_last) = best.expect("the empty matching is always consistent");
    let mut parents = Vec::with_capacity(k);
    run(s0, Some(&mut parents));
    let mut states = vec![0; k];
    states[0] = s0;
    let mut cur = s_last;
    for i in (1..k).rev() {
        states[i] = cur;
        cur = usize::from(parents[i - 1][cur]);
    }
    (0..k)
        .filter(|&i| states[i] == FWD)
        .map(|i| Edge::new(cycle[i], cycle[(i + 1) % k]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum BruteOutcome {
    Found(MostStableResult),
    /// Every matching has more than this many blocking edges.
    NoneWithin(usize),
}

/// Exhaustive scan of all matchings for one with the fewest blocking edges,
/// up to `k_max`. Refuses more than [`BRUTE_GUARD`] agents unless `force`.
pub fn min_bp_brute(inst: &Instance, k_max: usize, force: bool) -> Result<BruteOutcome> {
    let n = inst.num_agents();
    if n > BRUTE_GUARD && !force {
        return Err(Error::SizeGuardExceeded {
            size: n,
            guard: BRUTE_GUARD,
        });
    }
    let mut scan = Scan {
        inst,
        mate: vec![None; n],
        limit: k_max + 1,
        best: None,
    };
    scan.go(0, 0);
    Ok(match scan.best {
        Some((bp_count, matching)) => BruteOutcome::Found(MostStableResult { matching, bp_count }),
        None => BruteOutcome::NoneWithin(k_max),
    })
}

struct Scan<'a> {
    inst: &'a Instance,
    mate: Vec<Option<AgentId>>,
    /// Only matchings with fewer blocking edges than this are of interest.
    limit: usize,
    best: Option<(usize, Matching)>,
}

impl Scan<'_> {
    /// Blocking edges between `a` and already decided agents below `a`'s
    /// index, once `a` and all agents before it are decided.
    fn settled_at(&self, a: usize) -> usize {
        let x = AgentId::from_index(a);
        self.inst
            .list(x)
            .filter(|&y| y.index() < a)
            .filter(|&y| {
                self.mate[a] != Some(y)
                    && self.inst.prefers(x, y, self.mate[a])
                    && self.inst.prefers(y, x, self.mate[y.index()])
            })
            .count()
    }

    fn go(&mut self, a: usize, bp: usize) {
        if bp >= self.limit {
            return;
        }
        let n = self.mate.len();
        if a == n {
            let m = Matching::from_mates(self.mate.clone());
            self.limit = bp;
            self.best = Some((bp, m));
            return;
        }
        let x = AgentId::from_index(a);
        if self.mate[a].is_some() {
            let add = self.settled_at(a);
            self.go(a + 1, bp + add);
            return;
        }
        let options: Vec<AgentId> = self
            .inst
            .list(x)
            .filter(|y| y.index() > a && self.mate[y.index()].is_none())
            .collect();
        for y in options {
            self.mate[a] = Some(y);
            self.mate[y.index()] = Some(x);
            let add = self.settled_at(a);
            self.go(a + 1, bp + add);
            self.mate[a] = None;
            self.mate[y.index()] = None;
        }
        let add = self.settled_at(a);
        self.go(a + 1, bp + add);
    }
}
