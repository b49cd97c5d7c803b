//! Constraint propagation over partner domains, shared by exhaustive
//! enumeration and the tied-instance solvability search.
//!
//! Every agent has a domain: the still-possible partners plus, optionally,
//! "unmatched". Each edge `uv` carries the weak-stability constraint
//! "u ends with someone at least as good as v, or v ends with someone at least
//! as good as u". If u has no such option other than v itself, v's domain is
//! cut down to its options at least as good as u (and symmetrically).

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::model::{AgentId, Instance, Matching};

#[derive(Debug, Clone, Copy)]
enum Change {
    Entry(u32, u32),
    Single(u32),
}

/// How to pick the next branching agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Branching {
    /// Lowest undecided agent, its earliest remaining edge.
    InOrder,
    /// Undecided agent with the smallest domain.
    SmallestDomain,
}

pub(crate) struct Csp<'a> {
    inst: &'a Instance,
    list: Vec<Vec<u32>>,
    tier: Vec<Vec<u32>>,
    /// back[a][k]: position of a in the list of list[a][k].
    back: Vec<Vec<u32>>,
    alive: Vec<Vec<bool>>,
    alive_count: Vec<u32>,
    single: Vec<bool>,
    trail: Vec<Change>,
    queue: Vec<u32>,
    queued: Vec<bool>,
    nodes: u64,
    budget: Option<u64>,
    branching: Branching,
}

impl<'a> Csp<'a> {
    pub(crate) fn new(inst: &'a Instance, branching: Branching, budget: Option<u64>) -> Self {
        let n = inst.num_agents();
        let list: Vec<Vec<u32>> = inst
            .agents()
            .map(|a| inst.list(a).map(|b| b.index() as u32).collect())
            .collect();
        let tier = inst
            .agents()
            .map(|a| {
                inst.list(a)
                    .map(|b| inst.tier_of(a, b).unwrap_or(0))
                    .collect()
            })
            .collect();
        let back = inst
            .agents()
            .map(|a| {
                inst.list(a)
                    .map(|b| inst.position(b, a).expect("symmetric lists") as u32)
                    .collect()
            })
            .collect();
        let alive = list.iter().map(|l| vec![true; l.len()]).collect();
        let alive_count = list.iter().map(|l| l.len() as u32).collect();
        Csp {
            inst,
            list,
            tier,
            back,
            alive,
            alive_count,
            single: vec![true; n],
            trail: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; n],
            nodes: 0,
            budget,
            branching,
        }
    }

    fn enqueue(&mut self, a: u32) {
        if !self.queued[a as usize] {
            self.queued[a as usize] = true;
            self.queue.push(a);
        }
    }

    fn domain_size(&self, a: usize) -> u32 {
        self.alive_count[a] + u32::from(self.single[a])
    }

    /// Removes the pair at position `k` of `a`'s list from both domains.
    fn remove_pair(&mut self, a: u32, k: u32) {
        let (ai, ki) = (a as usize, k as usize);
        if !self.alive[ai][ki] {
            return;
        }
        let b = self.list[ai][ki];
        let kb = self.back[ai][ki];
        self.alive[ai][ki] = false;
        self.alive_count[ai] -= 1;
        self.trail.push(Change::Entry(a, k));
        self.alive[b as usize][kb as usize] = false;
        self.alive_count[b as usize] -= 1;
        self.trail.push(Change::Entry(b, kb));
        self.enqueue(a);
        self.enqueue(b);
    }

    fn forbid_single(&mut self, a: u32) {
        if self.single[a as usize] {
            self.single[a as usize] = false;
            self.trail.push(Change::Single(a));
            self.enqueue(a);
        }
    }

    /// Keeps only partners of `a` in tiers `<= max_tier`; forbids unmatched.
    fn restrict(&mut self, a: u32, max_tier: u32) {
        self.forbid_single(a);
        for k in 0..self.list[a as usize].len() {
            if self.alive[a as usize][k] && self.tier[a as usize][k] > max_tier {
                self.remove_pair(a, k as u32);
            }
        }
    }

    /// Fixes `a`'s partner to position `k`.
    fn assign(&mut self, a: u32, k: u32) {
        self.forbid_single(a);
        for j in 0..self.list[a as usize].len() as u32 {
            if j != k {
                self.remove_pair(a, j);
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("non-empty trail") {
                Change::Entry(a, k) => {
                    self.alive[a as usize][k as usize] = true;
                    self.alive_count[a as usize] += 1;
                }
                Change::Single(a) => self.single[a as usize] = true,
            }
        }
    }

    /// Whether `a` has a live option in tiers `<= t` other than position `skip`.
    fn has_option(&self, a: usize, t: u32, skip: usize) -> bool {
        (0..self.list[a].len()).any(|k| k != skip && self.alive[a][k] && self.tier[a][k] <= t)
    }

    /// Runs propagation to a fixpoint; `false` on a wiped-out domain.
    fn propagate(&mut self) -> bool {
        while let Some(a) = self.queue.pop() {
            self.queued[a as usize] = false;
            let ai = a as usize;
            if self.domain_size(ai) == 0 {
                self.clear_queue();
                return false;
            }
            if self.alive_count[ai] == 1 && !self.single[ai] {
                let k = self.alive[ai]
                    .iter()
                    .position(|&x| x)
                    .expect("one live entry");
                let b = self.list[ai][k];
                let kb = self.back[ai][k];
                self.assign(b, kb);
            }
            for k in 0..self.list[ai].len() {
                let b = self.list[ai][k] as usize;
                let kb = self.back[ai][k] as usize;
                let ta = self.tier[ai][k];
                let tb = self.tier[b][kb];
                if !self.has_option(ai, ta, k) {
                    self.restrict(b as u32, tb);
                }
                if !self.has_option(b, tb, kb) {
                    self.restrict(a, ta);
                }
                if self.domain_size(ai) == 0 || self.domain_size(b) == 0 {
                    self.clear_queue();
                    return false;
                }
            }
        }
        true
    }

    fn clear_queue(&mut self) {
        for a in self.queue.drain(..) {
            self.queued[a as usize] = false;
        }
    }

    fn pick(&self) -> Option<(u32, u32)> {
        let undecided = (0..self.list.len()).filter(|&a| self.domain_size(a) > 1);
        let a = match self.branching {
            Branching::InOrder => undecided.min(),
            Branching::SmallestDomain => undecided.min_by_key(|&a| (self.domain_size(a), a)),
        }?;
        let k = match self.branching {
            Branching::InOrder => (0..self.list[a].len())
                .filter(|&k| self.alive[a][k])
                .min_by_key(|&k| self.list[a][k])?,
            Branching::SmallestDomain => self.alive[a].iter().position(|&x| x)?,
        };
        Some((a as u32, k as u32))
    }

    fn current(&self) -> Matching {
        let mate = (0..self.list.len())
            .map(|a| {
                (!self.single[a] || self.alive_count[a] > 0)
                    .then(|| {
                        let k = self.alive[a].iter().position(|&x| x)?;
                        Some(AgentId::from_index(self.list[a][k] as usize))
                    })
                    .flatten()
            })
            .collect();
        Matching::from_mates(mate)
    }

    /// Visits every weakly stable matching until `visit` breaks.
    pub(crate) fn run(
        &mut self,
        visit: &mut dyn FnMut(Matching) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        for a in 0..self.list.len() as u32 {
            self.enqueue(a);
        }
        if !self.propagate() {
            return Ok(ControlFlow::Continue(()));
        }
        self.descend(visit)
    }

    fn descend(
        &mut self,
        visit: &mut dyn FnMut(Matching) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        let Some((a, k)) = self.pick() else {
            let m = self.current();
            debug_assert!(crate::model::is_stable(self.inst, &m).unwrap_or(false));
            return Ok(visit(m));
        };
        self.nodes += 1;
        if let Some(limit) = self.budget {
            if self.nodes > limit {
                return Err(Error::Timeout {
                    nodes: self.nodes - 1,
                });
            }
        }
        let mark = self.trail.len();

        self.assign(a, k);
        if self.propagate() && self.descend(visit)?.is_break() {
            return Ok(ControlFlow::Break(()));
        }
        self.undo_to(mark);

        self.remove_pair(a, k);
        if self.propagate() && self.descend(visit)?.is_break() {
            return Ok(ControlFlow::Break(()));
        }
        self.undo_to(mark);
        Ok(ControlFlow::Continue(()))
    }
}
