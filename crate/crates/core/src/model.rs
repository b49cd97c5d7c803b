//! Instances, matchings, ranks and blocking edges.
//!
//! An [`Instance`] is a set of agents `1..=n`, each with a preference list made
//! of tiers (a tier is a set of agents the owner is indifferent between). Strict
//! instances have singleton tiers only. All types are immutable once built.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A 1-based agent identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(u32);

impl AgentId {
    /// Panics if `id` is zero.
    pub fn new(id: usize) -> Self {
        assert!(id >= 1, "agent ids are 1-based");
        AgentId(u32::try_from(id).expect("agent id overflows u32"))
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Zero-based index, for addressing per-agent arrays.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(idx: usize) -> Self {
        AgentId::new(idx + 1)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for AgentId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

/// An unordered pair of agents, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    lo: AgentId,
    hi: AgentId,
}

impl Edge {
    pub fn new(a: AgentId, b: AgentId) -> Self {
        if a <= b {
            Edge { lo: a, hi: b }
        } else {
            Edge { lo: b, hi: a }
        }
    }

    pub fn of(a: usize, b: usize) -> Self {
        Edge::new(AgentId::new(a), AgentId::new(b))
    }

    pub fn lo(self) -> AgentId {
        self.lo
    }

    pub fn hi(self) -> AgentId {
        self.hi
    }

    pub fn other(self, a: AgentId) -> AgentId {
        if a == self.lo {
            self.hi
        } else {
            self.lo
        }
    }

    pub fn contains(self, a: AgentId) -> bool {
        self.lo == a || self.hi == a
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.lo, self.hi)
    }
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.lo.0, self.hi.0].serialize(s)
    }
}

/// One problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ZeroDegreeBound,
    OutOfRange {
        agent: usize,
        entry: usize,
    },
    SelfLoop {
        agent: usize,
    },
    Duplicate {
        agent: usize,
        entry: usize,
    },
    EmptyTier {
        agent: usize,
    },
    /// `entry` is on `agent`'s list but `agent` is not on `entry`'s list.
    Asymmetric {
        agent: usize,
        entry: usize,
    },
    ListTooLong {
        agent: usize,
        len: usize,
        bound: usize,
    },
}

impl Violation {
    /// The agent whose list exhibits the problem, if any.
    pub fn agent(&self) -> Option<usize> {
        match *self {
            Violation::ZeroDegreeBound => None,
            Violation::OutOfRange { agent, .. }
            | Violation::SelfLoop { agent }
            | Violation::Duplicate { agent, .. }
            | Violation::EmptyTier { agent }
            | Violation::Asymmetric { agent, .. }
            | Violation::ListTooLong { agent, .. } => Some(agent),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDegreeBound => write!(f, "degree bound must be at least 1"),
            Violation::OutOfRange { agent, entry } => {
                write!(f, "agent {agent} lists unknown agent {entry}")
            }
            Violation::SelfLoop { agent } => write!(f, "agent {agent} lists itself"),
            Violation::Duplicate { agent, entry } => {
                write!(f, "agent {agent} lists agent {entry} more than once")
            }
            Violation::EmptyTier { agent } => write!(f, "agent {agent} has an empty tie"),
            Violation::Asymmetric { agent, entry } => write!(
                f,
                "asymmetric acceptability: agent {agent} lists {entry} but {entry} does not list {agent}"
            ),
            Violation::ListTooLong { agent, len, bound } => write!(
                f,
                "agent {agent} has {len} acceptable agents, above the degree bound {bound}"
            ),
        }
    }
}

/// Checks every instance invariant and reports all violations at once.
///
/// `tiers[i]` is the list of agent `i + 1`; entries are 1-based ids.
pub fn validate(
    tiers: &[Vec<Vec<usize>>],
    degree_bound: usize,
) -> std::result::Result<(), Vec<Violation>> {
    let n = tiers.len();
    let mut out = Vec::new();
    if degree_bound == 0 {
        out.push(Violation::ZeroDegreeBound);
    }
    let mut listed: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, list) in tiers.iter().enumerate() {
        let agent = i + 1;
        let mut len = 0;
        for tier in list {
            if tier.is_empty() {
                out.push(Violation::EmptyTier { agent });
            }
            for &entry in tier {
                len += 1;
                if entry == 0 || entry > n {
                    out.push(Violation::OutOfRange { agent, entry });
                    continue;
                }
                if entry == agent {
                    out.push(Violation::SelfLoop { agent });
                    continue;
                }
                listed[i].push(entry);
            }
        }
        listed[i].sort_unstable();
        for w in listed[i].windows(2).filter(|w| w[0] == w[1]) {
            out.push(Violation::Duplicate { agent, entry: w[0] });
        }
        listed[i].dedup();
        if degree_bound > 0 && len > degree_bound {
            out.push(Violation::ListTooLong {
                agent,
                len,
                bound: degree_bound,
            });
        }
    }
    for (i, set) in listed.iter().enumerate() {
        for &entry in set {
            if listed[entry - 1].binary_search(&(i + 1)).is_err() {
                out.push(Violation::Asymmetric {
                    agent: i + 1,
                    entry,
                });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entry {
    /// Zero-based tier index.
    tier: u32,
    /// 1 + number of strictly preferred agents.
    rank: u32,
}

/// A validated roommates instance with (possibly tied) incomplete lists.
///
/// Lists are stored back to back: agent `a`'s list is
/// `listed[start[a]..start[a + 1]]`, with `entries` alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    start: Vec<u32>,
    listed: Vec<AgentId>,
    entries: Vec<Entry>,
    strict: bool,
    degree_bound: usize,
}

impl Instance {
    /// Builds an instance from per-agent tiers of 1-based ids. The degree bound
    /// defaults to the longest list (at least 1).
    pub fn new(tiers: Vec<Vec<Vec<usize>>>, degree_bound: Option<usize>) -> Result<Self> {
        let longest = tiers
            .iter()
            .map(|l| l.iter().map(Vec::len).sum::<usize>())
            .max()
            .unwrap_or(0);
        let d = degree_bound.unwrap_or(longest.max(1));
        validate(&tiers, d).map_err(Error::Validation)?;
        let tiers: Vec<Vec<Vec<AgentId>>> = tiers
            .into_iter()
            .map(|l| {
                l.into_iter()
                    .map(|t| t.into_iter().map(AgentId::new).collect())
                    .collect()
            })
            .collect();
        Ok(Self::from_checked(tiers, d))
    }

    /// Strict lists: `lists[i]` is agent `i + 1`'s list, best first.
    pub fn from_lists(lists: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(
            lists
                .into_iter()
                .map(|l| l.into_iter().map(|a| vec![a]).collect())
                .collect(),
            None,
        )
    }

    pub(crate) fn from_checked(tiers: Vec<Vec<Vec<AgentId>>>, degree_bound: usize) -> Self {
        let mut strict = true;
        let mut start = Vec::with_capacity(tiers.len() + 1);
        let mut listed = Vec::new();
        let mut entries = Vec::new();
        start.push(0);
        for list in &tiers {
            let mut before = 0u32;
            for (t, tier) in list.iter().enumerate() {
                strict &= tier.len() == 1;
                for &agent in tier {
                    listed.push(agent);
                    entries.push(Entry {
                        tier: t as u32,
                        rank: before + 1,
                    });
                }
                before += tier.len() as u32;
            }
            start.push(listed.len() as u32);
        }
        Instance {
            start,
            listed,
            entries,
            strict,
            degree_bound,
        }
    }

    fn range(&self, a: AgentId) -> std::ops::Range<usize> {
        self.start[a.index()] as usize..self.start[a.index() + 1] as usize
    }

    pub fn num_agents(&self) -> usize {
        self.start.len() - 1
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.num_agents()).map(AgentId::from_index)
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn max_list_len(&self) -> usize {
        self.start
            .windows(2)
            .map(|w| (w[1] - w[0]) as usize)
            .max()
            .unwrap_or(0)
    }

    /// `a`'s list grouped into ties, best first.
    pub fn tiers(&self, a: AgentId) -> impl Iterator<Item = &[AgentId]> + '_ {
        let r = self.range(a);
        let listed = &self.listed[r.clone()];
        let mut at = 0;
        self.entries[r]
            .chunk_by(|x, y| x.tier == y.tier)
            .map(move |c| {
                at += c.len();
                &listed[at - c.len()..at]
            })
    }

    /// The agents acceptable to `a`, best first (ties in stored order).
    pub fn list(&self, a: AgentId) -> impl ExactSizeIterator<Item = AgentId> + '_ {
        self.listed[self.range(a)].iter().copied()
    }

    pub fn list_len(&self, a: AgentId) -> usize {
        self.range(a).len()
    }

    pub fn first(&self, a: AgentId) -> Option<AgentId> {
        self.listed[self.range(a)].first().copied()
    }

    pub fn last(&self, a: AgentId) -> Option<AgentId> {
        self.listed[self.range(a)].last().copied()
    }

    fn entry(&self, a: AgentId, b: AgentId) -> Option<&Entry> {
        let r = self.range(a);
        let k = self.listed[r.clone()].iter().position(|&x| x == b)?;
        Some(&self.entries[r.start + k])
    }

    pub fn is_acceptable(&self, a: AgentId, b: AgentId) -> bool {
        self.entry(a, b).is_some()
    }

    /// Zero-based tier index of `b` in `a`'s list.
    pub fn tier_of(&self, a: AgentId, b: AgentId) -> Option<u32> {
        self.entry(a, b).map(|e| e.tier)
    }

    /// Zero-based position of `b` in `a`'s flattened list.
    pub fn position(&self, a: AgentId, b: AgentId) -> Option<usize> {
        self.listed[self.range(a)].iter().position(|&x| x == b)
    }

    /// `1 + |{c : a strictly prefers c to b}|`.
    pub fn rank(&self, a: AgentId, b: AgentId) -> Result<u32> {
        self.entry(a, b)
            .map(|e| e.rank)
            .ok_or(Error::NotAcceptable { from: a, to: b })
    }

    /// Whether `a` strictly prefers `x` to its outcome `y` (`None` = unmatched,
    /// which every acceptable agent beats).
    pub fn prefers(&self, a: AgentId, x: AgentId, y: Option<AgentId>) -> bool {
        let Some(tx) = self.tier_of(a, x) else {
            return false;
        };
        match y {
            None => true,
            Some(y) => self.tier_of(a, y).is_some_and(|ty| tx < ty),
        }
    }

    /// All edges, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for a in self.agents() {
            for b in self.list(a) {
                if a < b {
                    out.push(Edge::new(a, b));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn num_edges(&self) -> usize {
        self.listed.len() / 2
    }

    pub fn is_edge(&self, e: Edge) -> bool {
        e.lo != e.hi && e.hi.index() < self.num_agents() && self.is_acceptable(e.lo, e.hi)
    }

    /// A copy with the given edges removed. Relative order is kept; ranks
    /// are recomputed for the new lists.
    pub fn without_edges(&self, removed: &BTreeSet<Edge>) -> Instance {
        let tiers = self
            .agents()
            .map(|a| {
                self.tiers(a)
                    .map(|t| {
                        t.iter()
                            .copied()
                            .filter(|&b| !removed.contains(&Edge::new(a, b)))
                            .collect::<Vec<_>>()
                    })
                    .filter(|t| !t.is_empty())
                    .collect()
            })
            .collect();
        Instance::from_checked(tiers, self.degree_bound)
    }

    /// A copy in which the given agents have empty lists.
    pub fn without_agents(&self, gone: &BTreeSet<AgentId>) -> Instance {
        let removed = gone
            .iter()
            .flat_map(|&a| self.list(a).map(move |b| Edge::new(a, b)))
            .collect();
        self.without_edges(&removed)
    }

    /// The tiers as plain 1-based ids, suitable for [`Instance::new`].
    pub fn to_raw(&self) -> Vec<Vec<Vec<usize>>> {
        self.agents()
            .map(|a| {
                self.tiers(a)
                    .map(|t| t.iter().map(|b| b.get()).collect())
                    .collect()
            })
            .collect()
    }

    pub(crate) fn require_strict(&self) -> Result<()> {
        if self.strict {
            Ok(())
        } else {
            Err(Error::TiesPresent)
        }
    }

    pub(crate) fn require_max_len(&self, allowed: usize) -> Result<()> {
        let found = self.max_list_len();
        if found > allowed {
            Err(Error::DegreeTooHigh { found, allowed })
        } else {
            Ok(())
        }
    }
}

/// A set of disjoint pairs over agents `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    pairs: Vec<Edge>,
    mate: Vec<Option<AgentId>>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Matching {
            pairs: Vec::new(),
            mate: vec![None; n],
        }
    }

    /// Builds a matching of `inst`, rejecting non-edges and repeated agents.
    pub fn new(inst: &Instance, pairs: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let m = Self::on_agents(inst.num_agents(), pairs)?;
        m.check_edges(inst)?;
        Ok(m)
    }

    /// Builds a matching over `n` agents without reference to an instance.
    pub fn on_agents(n: usize, pairs: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut mate = vec![None; n];
        let mut list = Vec::new();
        for e in pairs {
            if e.lo == e.hi {
                return Err(Error::InvalidMatching(format!(
                    "agent {} paired with itself",
                    e.lo
                )));
            }
            if e.hi.index() >= n {
                return Err(Error::InvalidMatching(format!(
                    "agent {} out of range",
                    e.hi
                )));
            }
            for a in [e.lo, e.hi] {
                if mate[a.index()].is_some() {
                    return Err(Error::InvalidMatching(format!("agent {a} matched twice")));
                }
            }
            mate[e.lo.index()] = Some(e.hi);
            mate[e.hi.index()] = Some(e.lo);
            list.push(e);
        }
        list.sort_unstable();
        Ok(Matching { pairs: list, mate })
    }

    pub(crate) fn from_mates(mate: Vec<Option<AgentId>>) -> Self {
        let pairs = mate
            .iter()
            .enumerate()
            .filter_map(|(i, m)| {
                let a = AgentId::from_index(i);
                m.filter(|&b| a < b).map(|b| Edge::new(a, b))
            })
            .collect();
        Matching { pairs, mate }
    }

    pub fn check_edges(&self, inst: &Instance) -> Result<()> {
        if self.mate.len() != inst.num_agents() {
            return Err(Error::InvalidMatching(format!(
                "matching is over {} agents, instance has {}",
                self.mate.len(),
                inst.num_agents()
            )));
        }
        match self.pairs.iter().find(|e| !inst.is_edge(**e)) {
            Some(e) => Err(Error::InvalidMatching(format!(
                "pair {{{}}} is not an edge",
                e
            ))),
            None => Ok(()),
        }
    }

    pub fn num_agents(&self) -> usize {
        self.mate.len()
    }

    /// Sorted pairs.
    pub fn pairs(&self) -> &[Edge] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn partner(&self, a: AgentId) -> Option<AgentId> {
        self.mate[a.index()]
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.mate[e.lo.index()] == Some(e.hi)
    }

    pub fn matched_agents(&self) -> BTreeSet<AgentId> {
        self.pairs.iter().flat_map(|e| [e.lo, e.hi]).collect()
    }

    /// Adds pairs over currently unmatched agents.
    pub fn with_pairs(&self, extra: impl IntoIterator<Item = Edge>) -> Result<Matching> {
        Matching::on_agents(self.mate.len(), self.pairs.iter().copied().chain(extra))
    }
}

/// `{12, 34}` while every id is a single digit, `{1-12, 3-4}` otherwise.
impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.mate.len() > 9 { "-" } else { "" };
        f.write_str("{")?;
        for (i, e) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}{sep}{}", e.lo, e.hi)?;
        }
        f.write_str("}")
    }
}

impl Serialize for Matching {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs.serialize(s)
    }
}

/// Blocking edges of a matching, sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockingReport {
    pub blocking: Vec<Edge>,
    pub stable: bool,
}

/// Ranks of an edge seen from its two ends, `low <= high`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairType {
    pub low: u32,
    pub high: u32,
}

impl PairType {
    pub fn new(a: u32, b: u32) -> Self {
        PairType {
            low: a.min(b),
            high: a.max(b),
        }
    }

    /// Both endpoint ranks summed: the edge's contribution to cost.
    pub fn cost(self) -> u32 {
        self.low + self.high
    }
}

impl fmt::Display for PairType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.low, self.high)
    }
}

pub fn rank(inst: &Instance, i: AgentId, j: AgentId) -> Result<u32> {
    inst.rank(i, j)
}

pub fn pair_type(inst: &Instance, e: Edge) -> Result<PairType> {
    inst.require_strict()?;
    Ok(PairType::new(
        inst.rank(e.lo, e.hi)?,
        inst.rank(e.hi, e.lo)?,
    ))
}

/// Whether the non-matching edge `uv` blocks `m` (weak stability: indifference
/// never blocks).
pub(crate) fn blocks(inst: &Instance, m: &Matching, u: AgentId, v: AgentId) -> bool {
    m.partner(u) != Some(v) && inst.prefers(u, v, m.partner(u)) && inst.prefers(v, u, m.partner(v))
}

pub fn blocking_edges(inst: &Instance, m: &Matching) -> Result<BlockingReport> {
    m.check_edges(inst)?;
    let blocking: Vec<Edge> = inst
        .edges()
        .into_iter()
        .filter(|e| blocks(inst, m, e.lo, e.hi))
        .collect();
    let stable = blocking.is_empty();
    Ok(BlockingReport { blocking, stable })
}

pub fn is_stable(inst: &Instance, m: &Matching) -> Result<bool> {
    m.check_edges(inst)?;
    Ok(!inst
        .edges()
        .into_iter()
        .any(|e| blocks(inst, m, e.lo, e.hi)))
}

/// Sum over matched agents of the rank of their partner. Unmatched agents add 0.
pub fn cost(inst: &Instance, m: &Matching) -> Result<u64> {
    inst.require_strict()?;
    m.check_edges(inst)?;
    let mut total = 0u64;
    for e in m.pairs() {
        total += u64::from(inst.rank(e.lo, e.hi)? + inst.rank(e.hi, e.lo)?);
    }
    Ok(total)
}
