//! Egalitarian stable matchings: an exact oracle, the preprocessing and
//! (1,2)-pair weighting behind the `(2d+3)/7` approximation for `d in {3,4,5}`,
//! and the linear algorithm for lists of length at most two.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{cost, pair_type, AgentId, Edge, Instance, Matching, PairType};
use crate::solver::{for_each_stable, solve};

const PAIR_12: PairType = PairType { low: 1, high: 2 };

/// A minimum-cost stable matching (smallest pair list among equal costs) and
/// its cost.
pub fn egal_exact(inst: &Instance) -> Result<(Matching, u64)> {
    inst.require_strict()?;
    let mut best: Option<(u64, Matching)> = None;
    let _ = for_each_stable(inst, |m| {
        let c = cost(inst, &m).expect("stable matchings use instance edges");
        if best.as_ref().is_none_or(|(bc, bm)| (c, &m) < (*bc, bm)) {
            best = Some((c, m));
        }
        ControlFlow::Continue(())
    });
    best.map(|(c, m)| (m, c)).ok_or(Error::Unsolvable)
}

/// Result of [`preprocess`]. The reduced instance keeps the original agent
/// ids; its lists are the original lists minus removed edges and minus every
/// edge at a forced agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessOutcome {
    pub reduced: Instance,
    /// Pairs ranked first by both ends at the time they were fixed.
    pub forced: Vec<Edge>,
    /// Edges ranked last by both ends that lie in every stable matching. They
    /// stay in `reduced`.
    pub pinned: Vec<Edge>,
    /// Cost of `forced` in original ranks.
    pub base_cost: u64,
    /// Edges ranked last by both ends that lie in no stable matching.
    pub removed: BTreeSet<Edge>,
}

impl PreprocessOutcome {
    /// Lifts a matching of the reduced instance back to the original one.
    pub fn lift(&self, m: &Matching) -> Result<Matching> {
        m.with_pairs(self.forced.iter().copied())
    }
}

/// Fixes mutual first choices and drops mutual last choices that no stable
/// matching uses, repeating until neither applies.
///
/// A mutual last choice that *is* used by stable matchings is kept in the
/// reduced instance: removing its endpoints can create stable matchings that
/// do not extend to the original instance.
pub fn preprocess(inst: &Instance) -> Result<PreprocessOutcome> {
    inst.require_strict()?;
    let mut cur = inst.clone();
    let mut forced = Vec::new();
    let mut removed = BTreeSet::new();
    loop {
        let firsts: Vec<Edge> = cur
            .agents()
            .filter_map(|a| {
                let b = cur.first(a)?;
                (a < b && cur.first(b) == Some(a)).then(|| Edge::new(a, b))
            })
            .collect();
        if !firsts.is_empty() {
            let gone: BTreeSet<AgentId> = firsts.iter().flat_map(|e| [e.lo(), e.hi()]).collect();
            forced.extend(firsts);
            cur = cur.without_agents(&gone);
            continue;
        }
        let m0 = solve(&cur)?.ok_or(Error::Unsolvable)?;
        let (pinned, dead): (Vec<Edge>, Vec<Edge>) = cur
            .agents()
            .filter_map(|a| {
                let b = cur.last(a)?;
                (a < b && cur.last(b) == Some(a)).then(|| Edge::new(a, b))
            })
            .partition(|&e| m0.contains(e));
        if dead.is_empty() {
            forced.sort_unstable();
            let base_cost = forced
                .iter()
                .map(|&e| u64::from(pair_type(inst, e).expect("strict").cost()))
                .sum();
            return Ok(PreprocessOutcome {
                reduced: cur,
                forced,
                pinned,
                base_cost,
                removed,
            });
        }
        let dead: BTreeSet<Edge> = dead.into_iter().collect();
        cur = cur.without_edges(&dead);
        removed.extend(dead);
    }
}

/// `0` for a (1,2)-pair of `inst`, `1` for any other edge.
pub fn weight12(inst: &Instance, e: Edge) -> Result<u32> {
    Ok(u32::from(pair_type(inst, e)? != PAIR_12))
}

/// Non-negative edge weights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightFn {
    weights: BTreeMap<Edge, u32>,
}

impl WeightFn {
    pub fn from_fn(inst: &Instance, mut f: impl FnMut(Edge) -> u32) -> Self {
        WeightFn {
            weights: inst.edges().into_iter().map(|e| (e, f(e))).collect(),
        }
    }

    /// [`weight12`] with ranks taken from `original`, on the edges of `inst`.
    pub fn weight12(original: &Instance, inst: &Instance) -> Result<Self> {
        original.require_strict()?;
        Ok(Self::from_fn(inst, |e| {
            weight12(original, e).expect("edge of original")
        }))
    }

    /// Weight of an edge; edges without an entry weigh 0.
    pub fn get(&self, e: Edge) -> u32 {
        self.weights.get(&e).copied().unwrap_or(0)
    }

    pub fn of(&self, m: &Matching) -> u64 {
        m.pairs().iter().map(|&e| u64::from(self.get(e))).sum()
    }
}

/// Checks that along every agent's list the weights first (weakly) fall and
/// then (weakly) rise. Returns the first agent where this fails.
pub fn check_u_shaped(inst: &Instance, w: &WeightFn) -> std::result::Result<(), AgentId> {
    for a in inst.agents() {
        let seq: Vec<u32> = inst.list(a).map(|b| w.get(Edge::new(a, b))).collect();
        if !is_u_shaped(&seq) {
            return Err(a);
        }
    }
    Ok(())
}

pub(crate) fn is_u_shaped(seq: &[u32]) -> bool {
    let mut rising = false;
    for pair in seq.windows(2) {
        if pair[1] > pair[0] {
            rising = true;
        } else if pair[1] < pair[0] && rising {
            return false;
        }
    }
    true
}

/// Any routine returning a stable matching whose weight is at most twice the
/// minimum stable weight.
pub trait MinWeightSolver {
    fn min_weight(&self, inst: &Instance, w: &WeightFn) -> Result<Matching>;
}

/// Exact minimum weight by enumeration; ties go to the smallest pair list.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactMinWeight;

impl MinWeightSolver for ExactMinWeight {
    fn min_weight(&self, inst: &Instance, w: &WeightFn) -> Result<Matching> {
        let mut best: Option<(u64, Matching)> = None;
        let _ = for_each_stable(inst, |m| {
            let c = w.of(&m);
            if best.as_ref().is_none_or(|(bc, bm)| (c, &m) < (*bc, bm)) {
                best = Some((c, m));
            }
            ControlFlow::Continue(())
        });
        best.map(|(_, m)| m).ok_or(Error::Unsolvable)
    }
}

#[derive(Clone, Copy)]
pub enum MinWeightMode<'a> {
    Exact,
    Pluggable(&'a dyn MinWeightSolver),
}

pub fn min_weight_stable(
    inst: &Instance,
    w: &WeightFn,
    mode: MinWeightMode<'_>,
) -> Result<Matching> {
    inst.require_strict()?;
    match mode {
        MinWeightMode::Exact => ExactMinWeight.min_weight(inst, w),
        MinWeightMode::Pluggable(s) => s.min_weight(inst, w),
    }
}

/// Checks a min-weight answer against the enumerated optimum.
pub fn check_contract(inst: &Instance, w: &WeightFn, m: &Matching) -> Result<()> {
    let report = crate::model::blocking_edges(inst, m)?;
    if !report.stable {
        return Err(Error::NotStable(report.blocking.len()));
    }
    let optimum = w.of(&ExactMinWeight.min_weight(inst, w)?);
    let got = w.of(m);
    if got > 2 * optimum {
        return Err(Error::ContractViolation { got, optimum });
    }
    Ok(())
}

/// Number of (1,2)-pairs of `m`, ranks from `inst`.
pub fn count_12(inst: &Instance, m: &Matching) -> usize {
    m.pairs()
        .iter()
        .filter(|&&e| pair_type(inst, e).ok() == Some(PAIR_12))
        .count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApproxReport {
    pub output: Matching,
    pub output_cost: u64,
    /// Egalitarian cost, when the oracle was run.
    pub oracle_cost: Option<u64>,
    #[serde(serialize_with = "ratio_str")]
    pub guarantee: Ratio<u64>,
    pub count_12_output: usize,
    /// (1,2)-pairs of the egalitarian matching, when the oracle was run.
    pub count_12_egal: Option<usize>,
    /// (1,2)-pairs of an exact minimum-weight matching of the reduced
    /// instance, when the oracle was run.
    pub count_12_opt: Option<usize>,
}

impl ApproxReport {
    pub fn ratio(&self) -> Option<Ratio<u64>> {
        match self.oracle_cost? {
            0 => Some(Ratio::from_integer(1)),
            c => Some(Ratio::new(self.output_cost, c)),
        }
    }

    pub fn within_guarantee(&self) -> Option<bool> {
        let c = self.oracle_cost?;
        Some(Ratio::from_integer(self.output_cost) <= self.guarantee * c)
    }
}

fn ratio_str<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `(2d+3)/7`.
pub fn guarantee(d: usize) -> Result<Ratio<u64>> {
    if !(3..=5).contains(&d) {
        return Err(Error::DegreeTooHigh {
            found: d,
            allowed: 5,
        });
    }
    Ok(Ratio::new(2 * d as u64 + 3, 7))
}

pub fn egal_approx(inst: &Instance, d: usize) -> Result<ApproxReport> {
    egal_approx_with(inst, d, MinWeightMode::Exact, false)
}

/// The approximation pipeline with a chosen min-weight subroutine; `oracle`
/// also computes the egalitarian optimum for comparison.
pub fn egal_approx_with(
    inst: &Instance,
    d: usize,
    mode: MinWeightMode<'_>,
    oracle: bool,
) -> Result<ApproxReport> {
    let guarantee = guarantee(d)?;
    inst.require_strict()?;
    inst.require_max_len(d)?;
    let pre = preprocess(inst)?;
    let w = WeightFn::weight12(inst, &pre.reduced)?;
    let sub = min_weight_stable(&pre.reduced, &w, mode)?;
    let output = pre.lift(&sub)?;
    let output_cost = cost(inst, &output)?;
    let (oracle_cost, count_12_egal, count_12_opt) = if oracle {
        let (egal, c) = egal_exact(inst)?;
        let opt = ExactMinWeight.min_weight(&pre.reduced, &w)?;
        (
            Some(c),
            Some(count_12(inst, &egal)),
            Some(count_12(inst, &opt)),
        )
    } else {
        (None, None, None)
    };
    Ok(ApproxReport {
        count_12_output: count_12(inst, &output),
        output,
        output_cost,
        oracle_cost,
        guarantee,
        count_12_egal,
        count_12_opt,
    })
}

/// Connected components of a graph with maximum degree two. Each component is
/// listed by walking from an end (paths) or from its smallest agent (cycles).
pub(crate) fn components_deg2(inst: &Instance) -> Vec<(Vec<AgentId>, bool)> {
    let n = inst.num_agents();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let walk = |start: AgentId, seen: &mut Vec<bool>| {
        let mut path = vec![start];
        seen[start.index()] = true;
        let mut prev: Option<AgentId> = None;
        let mut cur = start;
        loop {
            let next = inst.list(cur).filter(|&b| Some(b) != prev).min();
            match next {
                Some(b) if !seen[b.index()] => {
                    seen[b.index()] = true;
                    path.push(b);
                    prev = Some(cur);
                    cur = b;
                }
                _ => return path,
            }
        }
    };
    for a in inst.agents() {
        if !seen[a.index()] && inst.list_len(a) <= 1 {
            out.push((walk(a, &mut seen), false));
        }
    }
    for a in inst.agents() {
        if !seen[a.index()] {
            out.push((walk(a, &mut seen), true));
        }
    }
    out.sort_by_key(|(c, _)| *c.iter().min().expect("non-empty"));
    out
}

/// Egalitarian stable matching when every list has at most two entries.
pub fn egal_2sri(inst: &Instance) -> Result<(Matching, u64)> {
    inst.require_strict()?;
    inst.require_max_len(2)?;
    let m0 = solve(inst)?.ok_or(Error::Unsolvable)?;
    let mut pairs: BTreeSet<Edge> = m0.pairs().iter().copied().collect();
    for (cycle, is_cycle) in components_deg2(inst) {
        let k = cycle.len();
        if !is_cycle || k % 2 == 1 || cycle.iter().any(|&a| m0.partner(a).is_none()) {
            continue;
        }
        let ring = |off: usize| -> Vec<Edge> {
            (0..k / 2)
                .map(|i| Edge::new(cycle[(2 * i + off) % k], cycle[(2 * i + off + 1) % k]))
                .collect()
        };
        let (mut a, mut b) = (ring(0), ring(1));
        a.sort_unstable();
        b.sort_unstable();
        let (held, other) = if m0.contains(a[0]) { (a, b) } else { (b, a) };
        // Only edges of `held` can block once the cycle switches to `other`.
        let stable_other = held.iter().all(|&h| {
            let (u, v) = (h.lo(), h.hi());
            let nu = other.iter().find(|e| e.contains(u)).map(|e| e.other(u));
            let nv = other.iter().find(|e| e.contains(v)).map(|e| e.other(v));
            !(inst.prefers(u, v, nu) && inst.prefers(v, u, nv))
        });
        if !stable_other {
            continue;
        }
        let sum = |es: &[Edge]| -> u32 {
            es.iter()
                .map(|&e| pair_type(inst, e).expect("strict").cost())
                .sum()
        };
        let (ch, co) = (sum(&held), sum(&other));
        if co < ch || (co == ch && other[0] < held[0]) {
            for e in &held {
                pairs.remove(e);
            }
            pairs.extend(other);
        }
    }
    let m = Matching::new(inst, pairs)?;
    let c = cost(inst, &m)?;
    Ok((m, c))
}
