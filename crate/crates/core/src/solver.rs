//! Stable matchings of strict instances: Irving's two-phase algorithm and an
//! exhaustive enumerator used as ground truth.

use std::collections::{BTreeSet, VecDeque};
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::model::{AgentId, Instance, Matching};
use crate::search::{Branching, Csp};

pub const DEFAULT_CAP: usize = 1_000_000;

/// Reduced preference table for the proposal phases, stored as flat arrays
/// indexed by `start[a] + k`. Deletions are always applied to both ends of a
/// pair.
struct Table {
    start: Vec<usize>,
    to: Vec<u32>,
    /// Position of the reverse entry in the other agent's list.
    back: Vec<u32>,
    alive: Vec<bool>,
    count: Vec<u32>,
    head: Vec<usize>,
    tail: Vec<usize>,
    /// Endpoints of deleted entries since the last clear.
    touched: Vec<usize>,
}

impl Table {
    fn new(inst: &Instance) -> Self {
        let mut start = Vec::with_capacity(inst.num_agents() + 1);
        let mut to = Vec::new();
        start.push(0);
        for a in inst.agents() {
            to.extend(inst.list(a).map(|b| b.index() as u32));
            start.push(to.len());
        }
        Table::from_flat(start, to)
    }

    fn from_flat(start: Vec<usize>, to: Vec<u32>) -> Self {
        let n = start.len() - 1;
        let back = (0..n)
            .flat_map(|a| (start[a]..start[a + 1]).map(move |i| (a, i)))
            .map(|(a, i)| {
                let b = to[i] as usize;
                let k = to[start[b]..start[b + 1]]
                    .iter()
                    .position(|&x| x as usize == a);
                k.expect("symmetric") as u32
            })
            .collect();
        Table {
            alive: vec![true; to.len()],
            count: (0..n).map(|a| (start[a + 1] - start[a]) as u32).collect(),
            head: vec![0; n],
            tail: (0..n).map(|a| start[a + 1] - start[a]).collect(),
            touched: Vec::new(),
            start,
            to,
            back,
        }
    }

    fn len(&self, a: usize) -> usize {
        self.start[a + 1] - self.start[a]
    }

    fn is_alive(&self, a: usize, k: usize) -> bool {
        self.alive[self.start[a] + k]
    }

    fn to(&self, a: usize, k: usize) -> usize {
        self.to[self.start[a] + k] as usize
    }

    fn back(&self, a: usize, k: usize) -> usize {
        self.back[self.start[a] + k] as usize
    }

    fn first(&mut self, a: usize) -> Option<usize> {
        while self.head[a] < self.len(a) && !self.is_alive(a, self.head[a]) {
            self.head[a] += 1;
        }
        (self.head[a] < self.len(a)).then_some(self.head[a])
    }

    fn second(&mut self, a: usize) -> Option<usize> {
        let f = self.first(a)?;
        (f + 1..self.len(a)).find(|&k| self.is_alive(a, k))
    }

    fn last(&mut self, a: usize) -> Option<usize> {
        while self.tail[a] > 0 && !self.is_alive(a, self.tail[a] - 1) {
            self.tail[a] -= 1;
        }
        (self.tail[a] > 0).then(|| self.tail[a] - 1)
    }

    fn delete(&mut self, a: usize, k: usize) {
        if !self.is_alive(a, k) {
            return;
        }
        let (b, kb) = (self.to(a, k), self.back(a, k));
        self.alive[self.start[a] + k] = false;
        self.alive[self.start[b] + kb] = false;
        self.count[a] -= 1;
        self.count[b] -= 1;
        self.touched.extend([a, b]);
    }

    /// Deletes every live entry after position `k` in `a`'s list and returns
    /// the agents whose list lost its first entry.
    fn truncate_after(&mut self, a: usize, k: usize, freed: &mut Vec<usize>) {
        let end = self.last(a).map_or(0, |l| l + 1);
        for j in k + 1..end {
            if self.is_alive(a, j) {
                let (z, kz) = (self.to(a, j), self.back(a, j));
                let was_first = self.first(z) == Some(kz);
                self.delete(a, j);
                if was_first {
                    freed.push(z);
                }
            }
        }
    }
}

/// Finds a stable matching of a strict instance, or `None` if none exists.
pub fn solve(inst: &Instance) -> Result<Option<Matching>> {
    inst.require_strict()?;
    let m = run(Table::new(inst));
    debug_assert!(m
        .as_ref()
        .is_none_or(|m| crate::model::is_stable(inst, m).unwrap_or(false)));
    Ok(m)
}

/// [`solve`] on strict lists given as flat arrays: agent `a` (zero-based)
/// lists `to[start[a]..start[a + 1]]`, best first. Lists must be symmetric.
pub(crate) fn solve_flat(start: Vec<usize>, to: Vec<u32>) -> Option<Matching> {
    run(Table::from_flat(start, to))
}

fn run(mut t: Table) -> Option<Matching> {
    let n = t.count.len();

    // Phase 1: proposals.
    let mut queue: VecDeque<usize> = (0..n).collect();
    let mut freed = Vec::new();
    while let Some(x) = queue.pop_front() {
        let Some(k) = t.first(x) else { continue };
        let y = t.to(x, k);
        let py = t.back(x, k);
        t.truncate_after(y, py, &mut freed);
        queue.extend(freed.drain(..));
    }
    let must_match: Vec<bool> = t.count.iter().map(|&c| c > 0).collect();
    t.touched.clear();

    // Phase 2: rotation elimination.
    let mut scan = 0;
    let mut seen = vec![usize::MAX; n];
    loop {
        while scan < n && t.count[scan] < 2 {
            scan += 1;
        }
        if scan == n {
            break;
        }
        let mut seq = vec![scan];
        seen[scan] = 0;
        let start = loop {
            let p = *seq.last().expect("non-empty");
            let k = t.second(p)?;
            let q = t.to(p, k);
            let l = t.last(q)?;
            let next = t.to(q, l);
            if seen[next] != usize::MAX {
                break seen[next];
            }
            seen[next] = seq.len();
            seq.push(next);
        };
        for &x in &seq {
            seen[x] = usize::MAX;
        }
        let rotation = &seq[start..];
        let mut moves = Vec::with_capacity(rotation.len());
        for &x in rotation {
            let k = t.second(x).expect("rotation member has a second choice");
            let y = t.to(x, k);
            moves.push((y, t.back(x, k)));
        }
        for (y, px) in moves {
            t.truncate_after(y, px, &mut freed);
            freed.clear();
        }
        let touched = std::mem::take(&mut t.touched);
        if touched.iter().any(|&a| must_match[a] && t.count[a] == 0) {
            return None;
        }
    }

    let mut mate = vec![None; n];
    for a in 0..n {
        if t.count[a] == 1 {
            let k = t.first(a).expect("one entry");
            mate[a] = Some(AgentId::from_index(t.to(a, k)));
        } else if must_match[a] {
            return None;
        }
    }
    Some(Matching::from_mates(mate))
}

/// All stable matchings of an instance, in lexicographic order of their
/// sorted pair lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableSet {
    matchings: Vec<Matching>,
}

impl StableSet {
    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Matching> {
        self.matchings.iter()
    }

    pub fn into_vec(self) -> Vec<Matching> {
        self.matchings
    }
}

impl<'a> IntoIterator for &'a StableSet {
    type Item = &'a Matching;
    type IntoIter = std::slice::Iter<'a, Matching>;

    fn into_iter(self) -> Self::IntoIter {
        self.matchings.iter()
    }
}

/// Streams every (weakly) stable matching to `visit`, stopping early if it
/// breaks. Works for tied instances too.
pub fn for_each_stable(
    inst: &Instance,
    mut visit: impl FnMut(Matching) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut csp = Csp::new(inst, Branching::InOrder, None);
    csp.run(&mut visit).expect("no budget, no timeout")
}

/// Complete set of stable matchings, failing once more than `cap` are found.
pub fn enumerate(inst: &Instance, cap: usize) -> Result<StableSet> {
    let mut out = Vec::new();
    let flow = for_each_stable(inst, |m| {
        out.push(m);
        if out.len() > cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if flow.is_break() {
        return Err(Error::CapExceeded { found: out.len() });
    }
    out.sort_unstable();
    out.dedup();
    Ok(StableSet { matchings: out })
}

/// Agents matched in every stable matching (they are the same in all of them).
pub fn matched_set(inst: &Instance) -> Result<BTreeSet<AgentId>> {
    solve(inst)?
        .map(|m| m.matched_agents())
        .ok_or(Error::Unsolvable)
}
