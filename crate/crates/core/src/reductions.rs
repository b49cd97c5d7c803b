//! Gadget reductions from cubic vertex cover to egalitarian 3-SRI and from
//! (2,2)-E3-SAT to solvability of 3-SRTI, with witness converters in both
//! directions and brute-force oracles for the source problems.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Polarity, Result};
use crate::model::{blocking_edges, AgentId, Edge, Instance, Matching};

pub const BRUTE_GUARD: usize = 20;

/// A simple graph in which every vertex has degree three. Vertices are
/// `1..=n`; edges are numbered `1..=m` in input order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct CubicGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    incident: Vec<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for CubicGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        CubicGraph::new(raw.n, raw.edges)
    }
}

impl From<CubicGraph> for RawGraph {
    fn from(g: CubicGraph) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges,
        }
    }
}

impl CubicGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut norm = Vec::with_capacity(edges.len());
        for (j, &(u, v)) in edges.iter().enumerate() {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::NotCubic(format!(
                    "edge {u}-{v} has an endpoint outside 1..={n}"
                )));
            }
            if u == v {
                return Err(Error::NotCubic(format!("self-loop at {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::NotCubic(format!("repeated edge {}-{}", e.0, e.1)));
            }
            inc[u - 1].push(j + 1);
            inc[v - 1].push(j + 1);
            norm.push(e);
        }
        let incident = inc
            .iter()
            .enumerate()
            .map(|(i, l)| {
                <[usize; 3]>::try_from(l.as_slice()).map_err(|_| {
                    Error::NotCubic(format!("vertex {} has degree {}", i + 1, l.len()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CubicGraph {
            n,
            edges: norm,
            incident,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(lo, hi)` vertex pairs; edge `j` is at index `j - 1`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The three edges at vertex `i`, in increasing order.
    pub fn incident(&self, i: usize) -> [usize; 3] {
        self.incident[i - 1]
    }

    /// An edge not covered by `cover`, if any.
    pub fn uncovered(&self, cover: &BTreeSet<usize>) -> Option<(usize, usize)> {
        self.edges
            .iter()
            .copied()
            .find(|(u, v)| !cover.contains(u) && !cover.contains(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaMode {
    /// Every variable exactly twice unnegated and exactly twice negated.
    Strict,
    /// At most twice each way.
    Relaxed,
}

/// A CNF formula with exactly three literals per clause, each on a distinct
/// variable. Literals are non-zero integers as in DIMACS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFormula", into = "RawFormula")]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[i32; 3]>,
    mode: FormulaMode,
}

#[derive(Serialize, Deserialize)]
struct RawFormula {
    num_vars: usize,
    clauses: Vec<[i32; 3]>,
    mode: FormulaMode,
}

impl TryFrom<RawFormula> for CnfFormula {
    type Error = Error;

    fn try_from(raw: RawFormula) -> Result<Self> {
        CnfFormula::new(raw.num_vars, raw.clauses, raw.mode)
    }
}

impl From<CnfFormula> for RawFormula {
    fn from(f: CnfFormula) -> Self {
        RawFormula {
            num_vars: f.num_vars,
            clauses: f.clauses,
            mode: f.mode,
        }
    }
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>, mode: FormulaMode) -> Result<Self> {
        let mut count = vec![[0usize; 2]; num_vars];
        for (j, c) in clauses.iter().enumerate() {
            for (r, &lit) in c.iter().enumerate() {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > num_vars {
                    return Err(Error::MalformedFormula(format!(
                        "clause {}: literal {lit} outside 1..={num_vars}",
                        j + 1
                    )));
                }
                if c[..r].iter().any(|x| x.unsigned_abs() as usize == var) {
                    return Err(Error::MalformedFormula(format!(
                        "clause {}: variable {var} repeated",
                        j + 1
                    )));
                }
                count[var - 1][usize::from(lit < 0)] += 1;
            }
        }
        for (v, c) in count.iter().enumerate() {
            for (polarity, k) in [(Polarity::Positive, c[0]), (Polarity::Negative, c[1])] {
                if k > 2 || (mode == FormulaMode::Strict && k != 2) {
                    return Err(Error::OccurrenceBound {
                        var: v + 1,
                        polarity,
                        count: k,
                    });
                }
            }
        }
        Ok(CnfFormula {
            num_vars,
            clauses,
            mode,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    pub fn mode(&self) -> FormulaMode {
        self.mode
    }

    /// The first clause (1-based) left false by `assignment`, if any.
    /// `assignment[i]` is the value of variable `i + 1`.
    pub fn first_false(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses
            .iter()
            .position(|c| !c.iter().any(|&l| literal_true(l, assignment)))
            .map(|j| j + 1)
    }

    /// For every clause and literal position, whether this is the first or
    /// second occurrence of the literal's polarity.
    fn occurrence_index(&self) -> Vec<[usize; 3]> {
        let mut seen = vec![[0usize; 2]; self.num_vars];
        self.clauses
            .iter()
            .map(|c| {
                c.map(|lit| {
                    let slot = &mut seen[lit.unsigned_abs() as usize - 1][usize::from(lit < 0)];
                    *slot += 1;
                    *slot - 1
                })
            })
            .collect()
    }
}

fn literal_true(lit: i32, assignment: &[bool]) -> bool {
    assignment[lit.unsigned_abs() as usize - 1] == (lit > 0)
}

/// The gadget vertex an agent stands for, e.g. `v3^2` or `2:a1^3` for the
/// second copy of an amplified instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Role {
    pub copy: Option<usize>,
    pub name: char,
    pub index: usize,
    pub sub: usize,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.copy {
            write!(f, "{c}:")?;
        }
        write!(f, "{}{}^{}", self.name, self.index, self.sub)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Source {
    VertexCover {
        graph: CubicGraph,
        k: usize,
    },
    Sat {
        formula: CnfFormula,
        copies: usize,
        triangle: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// A stable matching of cost at most this exists iff the graph has a
    /// vertex cover of size at most `k`.
    EgalAtMost(u64),
    /// Solvable iff the formula is satisfiable.
    SolvableIffSatisfiable,
    /// A matching with exactly one blocking edge exists iff the formula is
    /// satisfiable; otherwise every matching has more than `copies`.
    OneBlockingEdgeIffSatisfiable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionBundle {
    pub instance: Instance,
    /// `labels[i]` is the role of agent `i + 1`.
    pub labels: Vec<Role>,
    pub source: Source,
    pub target: Target,
}

impl ReductionBundle {
    pub fn role(&self, a: AgentId) -> Role {
        self.labels[a.index()]
    }

    /// Tab-separated `id role` lines.
    pub fn labels_text(&self) -> String {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, r)| format!("{}\t{r}\n", i + 1))
            .collect()
    }

    /// Rebuilds the bundle from its source.
    pub fn regenerate(source: &Source) -> Result<Self> {
        match source {
            Source::VertexCover { graph, k } => Ok(gen_egal_from_vc(graph, *k)),
            Source::Sat {
                formula,
                copies,
                triangle,
            } => Ok(build_sat(formula, *copies, *triangle)),
        }
    }

    fn graph(&self) -> Result<&CubicGraph> {
        match &self.source {
            Source::VertexCover { graph, .. } => Ok(graph),
            Source::Sat { .. } => Err(Error::MalformedMatching(
                "bundle was not generated from a vertex cover instance".into(),
            )),
        }
    }

    fn formula(&self) -> Result<(&CnfFormula, usize, bool)> {
        match &self.source {
            Source::Sat {
                formula,
                copies,
                triangle,
            } => Ok((formula, *copies, *triangle)),
            Source::VertexCover { .. } => Err(Error::MalformedFormula(
                "bundle was not generated from a formula".into(),
            )),
        }
    }
}

// ---- vertex cover ----

struct VcIds {
    n: usize,
    m: usize,
}

impl VcIds {
    fn v(&self, i: usize, r: usize) -> usize {
        4 * (i - 1) + r
    }
    fn e(&self, j: usize, s: usize) -> usize {
        4 * self.n + 4 * (j - 1) + s
    }
    fn w(&self, i: usize, r: usize) -> usize {
        4 * self.n + 4 * self.m + 4 * (i - 1) + r
    }
    fn z(&self, i: usize, r: usize) -> usize {
        8 * self.n + 4 * self.m + 4 * (i - 1) + r
    }
}

/// `7m + 19n + k`.
pub fn k_prime(g: &CubicGraph, k: usize) -> u64 {
    (7 * g.num_edges() + 19 * g.num_vertices() + k) as u64
}

/// Egalitarian 3-SRI instance on `12n + 4m` agents whose minimum stable cost
/// is `7m + 19n + τ(g)`.
pub fn gen_egal_from_vc(g: &CubicGraph, k: usize) -> ReductionBundle {
    let (n, m) = (g.num_vertices(), g.num_edges());
    let id = VcIds { n, m };
    let total = 12 * n + 4 * m;
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut labels = vec![
        Role {
            copy: None,
            name: '?',
            index: 0,
            sub: 0
        };
        total
    ];
    let mut set = |a: usize, name: char, index: usize, sub: usize, list: Vec<usize>| {
        lists[a - 1] = list;
        labels[a - 1] = Role {
            copy: None,
            name,
            index,
            sub,
        };
    };
    // e(v_i^r): the endpoint slot of the r-th edge at v_i.
    let edge_slot = |i: usize, r: usize| {
        let j = g.incident(i)[r - 1];
        let s = if g.edges()[j - 1].0 == i { 1 } else { 2 };
        id.e(j, s)
    };
    // v(e_j^s): the vertex slot of the s-th endpoint of e_j.
    let vertex_slot = |j: usize, s: usize| {
        let (lo, hi) = g.edges()[j - 1];
        let i = if s == 1 { lo } else { hi };
        let r = g
            .incident(i)
            .iter()
            .position(|&x| x == j)
            .expect("incident")
            + 1;
        id.v(i, r)
    };
    for i in 1..=n {
        for r in 1..=3 {
            set(
                id.v(i, r),
                'v',
                i,
                r,
                vec![id.w(i, r), edge_slot(i, r), id.w(i, r + 1)],
            );
        }
        set(id.v(i, 4), 'v', i, 4, vec![id.w(i, 4), id.w(i, 1)]);
        for r in 1..=4 {
            let prev = if r == 1 { 4 } else { r - 1 };
            set(
                id.w(i, r),
                'w',
                i,
                r,
                vec![id.v(i, prev), id.z(i, r), id.v(i, r)],
            );
        }
        set(id.z(i, 1), 'z', i, 1, vec![id.z(i, 2), id.w(i, 1)]);
        set(id.z(i, 2), 'z', i, 2, vec![id.z(i, 1), id.w(i, 2)]);
        set(id.z(i, 3), 'z', i, 3, vec![id.z(i, 4), id.w(i, 3)]);
        set(id.z(i, 4), 'z', i, 4, vec![id.z(i, 3), id.w(i, 4)]);
    }
    for j in 1..=m {
        let e = |s| id.e(j, s);
        set(e(1), 'e', j, 1, vec![e(2), vertex_slot(j, 1), e(4)]);
        set(e(2), 'e', j, 2, vec![e(3), vertex_slot(j, 2), e(1)]);
        set(e(3), 'e', j, 3, vec![e(4), e(2)]);
        set(e(4), 'e', j, 4, vec![e(1), e(3)]);
    }
    let instance = strict_instance(lists);
    ReductionBundle {
        instance,
        labels,
        source: Source::VertexCover {
            graph: g.clone(),
            k,
        },
        target: Target::EgalAtMost(k_prime(g, k)),
    }
}

fn strict_instance(lists: Vec<Vec<usize>>) -> Instance {
    let tiers = lists
        .into_iter()
        .map(|l| l.into_iter().map(|a| vec![a]).collect())
        .collect();
    Instance::new(tiers, Some(3)).expect("gadget lists are symmetric")
}

/// The stable matching of cost `7m + 19n + |cover|` built from a vertex cover.
pub fn cover_to_matching(bundle: &ReductionBundle, cover: &BTreeSet<usize>) -> Result<Matching> {
    let g = bundle.graph()?;
    if let Some((u, v)) = g.uncovered(cover) {
        return Err(Error::NotACover(u, v));
    }
    let id = VcIds {
        n: g.num_vertices(),
        m: g.num_edges(),
    };
    let mut pairs = Vec::new();
    for i in 1..=g.num_vertices() {
        for r in 1..=4 {
            let w = if cover.contains(&i) { r } else { r % 4 + 1 };
            pairs.push(Edge::of(id.v(i, r), id.w(i, w)));
        }
        pairs.push(Edge::of(id.z(i, 1), id.z(i, 2)));
        pairs.push(Edge::of(id.z(i, 3), id.z(i, 4)));
    }
    for (j, &(lo, _)) in g.edges().iter().enumerate() {
        let e = |s| id.e(j + 1, s);
        if cover.contains(&lo) {
            pairs.extend([Edge::of(e(1), e(4)), Edge::of(e(2), e(3))]);
        } else {
            pairs.extend([Edge::of(e(1), e(2)), Edge::of(e(3), e(4))]);
        }
    }
    Matching::new(&bundle.instance, pairs)
}

/// The vertices whose gadget is matched "covered" by a stable matching.
pub fn matching_to_cover(bundle: &ReductionBundle, m: &Matching) -> Result<BTreeSet<usize>> {
    let g = bundle.graph()?;
    require_stable(&bundle.instance, m)?;
    let id = VcIds {
        n: g.num_vertices(),
        m: g.num_edges(),
    };
    Ok((1..=g.num_vertices())
        .filter(|&i| (1..=4).all(|r| m.contains(Edge::of(id.v(i, r), id.w(i, r)))))
        .collect())
}

fn require_stable(inst: &Instance, m: &Matching) -> Result<()> {
    let report = blocking_edges(inst, m)?;
    if report.stable {
        Ok(())
    } else {
        Err(Error::NotStable(report.blocking.len()))
    }
}

// ---- satisfiability ----

struct SatIds {
    n0: usize,
    copy_size: usize,
}

const Y: usize = 0;
const ZC: usize = 4;
const P: usize = 8;
const Q: usize = 11;
const B: usize = 14;
const A: usize = 17;

impl SatIds {
    fn new(f: &CnfFormula) -> Self {
        SatIds {
            n0: f.num_vars(),
            copy_size: 4 * f.num_vars() + 20 * f.clauses().len(),
        }
    }
    fn v(&self, c: usize, i: usize, r: usize) -> usize {
        c * self.copy_size + 4 * (i - 1) + r
    }
    /// Clause vertex: `base` is one of the block offsets above, `r` 1-based.
    fn g(&self, c: usize, j: usize, base: usize, r: usize) -> usize {
        c * self.copy_size + 4 * self.n0 + 20 * (j - 1) + base + r
    }
}

/// Variable-gadget vertex carrying a literal occurrence: first and second
/// unnegated occurrences sit at `v^1` and `v^3`, negated ones at `v^2` and
/// `v^4`.
fn occurrence_slot(lit: i32, occurrence: usize) -> usize {
    match (lit > 0, occurrence) {
        (true, 0) => 1,
        (false, 0) => 2,
        (true, _) => 3,
        (false, _) => 4,
    }
}

/// 3-SRTI instance on `4n₀ + 20m₀` agents that is solvable iff `f` is
/// satisfiable.
pub fn gen_srti_from_sat(f: &CnfFormula) -> ReductionBundle {
    build_sat(f, 1, false)
}

/// `copies` disjoint copies of [`gen_srti_from_sat`] plus a cyclic triangle:
/// one blocking edge suffices iff `f` is satisfiable.
pub fn gen_amplified(f: &CnfFormula, copies: usize) -> Result<ReductionBundle> {
    if copies == 0 {
        return Err(Error::MalformedFormula(
            "at least one copy is needed".into(),
        ));
    }
    Ok(build_sat(f, copies, true))
}

fn build_sat(f: &CnfFormula, copies: usize, triangle: bool) -> ReductionBundle {
    let id = SatIds::new(f);
    let total = copies * id.copy_size + if triangle { 3 } else { 0 };
    let mut tiers: Vec<Vec<Vec<usize>>> = vec![Vec::new(); total];
    let mut labels = vec![
        Role {
            copy: None,
            name: '?',
            index: 0,
            sub: 0
        };
        total
    ];
    let occ = f.occurrence_index();
    let tag = |c: usize| (copies > 1).then_some(c + 1);
    for c in 0..copies {
        let mut set = |a: usize, name: char, index: usize, sub: usize, list: Vec<Vec<usize>>| {
            tiers[a - 1] = list;
            labels[a - 1] = Role {
                copy: tag(c),
                name,
                index,
                sub,
            };
        };
        let one = |l: Vec<usize>| l.into_iter().map(|a| vec![a]).collect::<Vec<_>>();
        // interconnecting partner of each variable vertex
        let mut link = vec![[None; 4]; f.num_vars()];
        for (j, clause) in f.clauses().iter().enumerate() {
            for (r, &lit) in clause.iter().enumerate() {
                let i = lit.unsigned_abs() as usize;
                let slot = occurrence_slot(lit, occ[j][r]);
                link[i - 1][slot - 1] = Some((j + 1, r + 1));
            }
        }
        for i in 1..=f.num_vars() {
            let v = |r| id.v(c, i, r);
            for (r, next, prev) in [(1, 2, 4), (2, 3, 1), (3, 4, 2), (4, 1, 3)] {
                let mut list = vec![v(next)];
                if let Some((j, s)) = link[i - 1][r - 1] {
                    list.push(id.g(c, j, A, s));
                }
                list.push(v(prev));
                set(v(r), 'v', i, r, one(list));
            }
        }
        for (j0, clause) in f.clauses().iter().enumerate() {
            let j = j0 + 1;
            let y = |r| id.g(c, j, Y, r);
            let z = |r| id.g(c, j, ZC, r);
            let p = |r| id.g(c, j, P, r);
            let q = |r| id.g(c, j, Q, r);
            let b = |r| id.g(c, j, B, r);
            let a = |r| id.g(c, j, A, r);
            let var = |r: usize| {
                let lit = clause[r - 1];
                let i = lit.unsigned_abs() as usize;
                id.v(c, i, occurrence_slot(lit, occ[j0][r - 1]))
            };
            set(y(1), 'y', j, 1, one(vec![p(3), y(2)]));
            set(y(2), 'y', j, 2, one(vec![y(1), y(3), y(4)]));
            set(y(3), 'y', j, 3, one(vec![y(4), y(2)]));
            set(y(4), 'y', j, 4, one(vec![y(2), y(3)]));
            set(z(1), 'z', j, 1, one(vec![q(3), z(2)]));
            set(z(2), 'z', j, 2, one(vec![z(1), z(3), z(4)]));
            set(z(3), 'z', j, 3, one(vec![z(4), z(2)]));
            set(z(4), 'z', j, 4, one(vec![z(2), z(3)]));
            set(p(1), 'p', j, 1, one(vec![b(1), b(2), p(2)]));
            set(p(2), 'p', j, 2, one(vec![p(1), p(3)]));
            set(p(3), 'p', j, 3, one(vec![p(2), b(3), y(1)]));
            set(q(1), 'q', j, 1, one(vec![a(1), a(2), q(2)]));
            set(q(2), 'q', j, 2, one(vec![q(1), q(3)]));
            set(q(3), 'q', j, 3, one(vec![q(2), a(3), z(1)]));
            set(b(1), 'b', j, 1, vec![vec![p(1), a(1)]]);
            set(b(2), 'b', j, 2, vec![vec![p(1), a(2)]]);
            set(b(3), 'b', j, 3, vec![vec![p(3), a(3)]]);
            set(a(1), 'a', j, 1, one(vec![b(1), var(1), q(1)]));
            set(a(2), 'a', j, 2, one(vec![b(2), var(2), q(1)]));
            set(a(3), 'a', j, 3, one(vec![b(3), var(3), q(3)]));
        }
    }
    if triangle {
        let t = |r| copies * id.copy_size + r;
        for (r, x, y) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
            tiers[t(r) - 1] = vec![vec![t(x)], vec![t(y)]];
            labels[t(r) - 1] = Role {
                copy: None,
                name: 't',
                index: 1,
                sub: r,
            };
        }
    }
    let instance = Instance::new(tiers, Some(3)).expect("gadget lists are symmetric");
    ReductionBundle {
        instance,
        labels,
        source: Source::Sat {
            formula: f.clone(),
            copies,
            triangle,
        },
        target: if triangle {
            Target::OneBlockingEdgeIffSatisfiable
        } else {
            Target::SolvableIffSatisfiable
        },
    }
}

/// The perfect stable matching (per copy) encoding a satisfying assignment.
/// On an amplified bundle the triangle gets one pair and one blocking edge.
pub fn assignment_to_matching(bundle: &ReductionBundle, assignment: &[bool]) -> Result<Matching> {
    let (f, copies, triangle) = bundle.formula()?;
    if assignment.len() != f.num_vars() {
        return Err(Error::MalformedFormula(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            f.num_vars()
        )));
    }
    if let Some(j) = f.first_false(assignment) {
        return Err(Error::NotSatisfying(j));
    }
    let id = SatIds::new(f);
    let mut pairs = Vec::new();
    for c in 0..copies {
        for (i, &value) in assignment.iter().enumerate() {
            let v = |r| id.v(c, i + 1, r);
            if value {
                pairs.extend([Edge::of(v(1), v(2)), Edge::of(v(3), v(4))]);
            } else {
                pairs.extend([Edge::of(v(1), v(4)), Edge::of(v(2), v(3))]);
            }
        }
        for (j0, clause) in f.clauses().iter().enumerate() {
            let j = j0 + 1;
            let x = |base, r| id.g(c, j, base, r);
            let r = clause
                .iter()
                .position(|&l| literal_true(l, assignment))
                .expect("satisfied")
                + 1;
            let e = |b1, r1, b2, r2| Edge::of(x(b1, r1), x(b2, r2));
            pairs.extend([
                e(Y, 1, Y, 2),
                e(Y, 3, Y, 4),
                e(ZC, 1, ZC, 2),
                e(ZC, 3, ZC, 4),
            ]);
            pairs.extend(match r {
                1 => [
                    e(A, 1, Q, 1),
                    e(B, 1, P, 1),
                    e(A, 2, B, 2),
                    e(A, 3, B, 3),
                    e(Q, 2, Q, 3),
                    e(P, 2, P, 3),
                ],
                2 => [
                    e(A, 2, Q, 1),
                    e(B, 2, P, 1),
                    e(A, 1, B, 1),
                    e(A, 3, B, 3),
                    e(Q, 2, Q, 3),
                    e(P, 2, P, 3),
                ],
                _ => [
                    e(A, 3, Q, 3),
                    e(B, 3, P, 3),
                    e(A, 1, B, 1),
                    e(A, 2, B, 2),
                    e(Q, 1, Q, 2),
                    e(P, 1, P, 2),
                ],
            });
        }
    }
    if triangle {
        let t = copies * id.copy_size;
        pairs.push(Edge::of(t + 1, t + 2));
    }
    Matching::new(&bundle.instance, pairs)
}

/// Reads the assignment off the variable gadgets of the first copy. The
/// matching must have no blocking edge inside that copy.
pub fn matching_to_assignment(bundle: &ReductionBundle, m: &Matching) -> Result<Vec<bool>> {
    let (f, _, _) = bundle.formula()?;
    let id = SatIds::new(f);
    let report = blocking_edges(&bundle.instance, m)?;
    let inside = report
        .blocking
        .iter()
        .filter(|e| e.hi().get() <= id.copy_size)
        .count();
    if inside > 0 {
        return Err(Error::NotStable(inside));
    }
    (1..=f.num_vars())
        .map(|i| {
            let has = |a, b| m.contains(Edge::of(id.v(0, i, a), id.v(0, i, b)));
            if has(1, 2) && has(3, 4) {
                Ok(true)
            } else if has(1, 4) && has(2, 3) {
                Ok(false)
            } else {
                Err(Error::MalformedMatching(format!(
                    "variable gadget {i} is matched neither true nor false"
                )))
            }
        })
        .collect()
}

// ---- oracles ----

/// Minimum vertex cover by exhaustive search: its size and the first cover of
/// that size in subset order.
pub fn brute_vc(g: &CubicGraph) -> Result<(usize, BTreeSet<usize>)> {
    brute_vc_edges(g.num_vertices(), g.edges())
}

/// [`brute_vc`] for an arbitrary simple graph on `1..=n`.
pub fn brute_vc_edges(n: usize, edges: &[(usize, usize)]) -> Result<(usize, BTreeSet<usize>)> {
    if n > BRUTE_GUARD {
        return Err(Error::SizeGuardExceeded {
            size: n,
            guard: BRUTE_GUARD,
        });
    }
    let masks: Vec<u32> = edges
        .iter()
        .map(|&(u, v)| (1 << (u - 1)) | (1 << (v - 1)))
        .collect();
    let best = (0u32..1 << n)
        .filter(|&s| masks.iter().all(|&e| s & e != 0))
        .min_by_key(|&s| (s.count_ones(), s))
        .expect("the full vertex set is a cover");
    let cover = (1..=n).filter(|&i| best & (1 << (i - 1)) != 0).collect();
    Ok((best.count_ones() as usize, cover))
}

/// A satisfying assignment by exhaustive search, or `None`.
pub fn brute_sat(f: &CnfFormula) -> Result<Option<Vec<bool>>> {
    let n = f.num_vars();
    if n > BRUTE_GUARD {
        return Err(Error::SizeGuardExceeded {
            size: n,
            guard: BRUTE_GUARD,
        });
    }
    Ok((0u32..1 << n)
        .map(|s| (0..n).map(|i| s & (1 << i) != 0).collect::<Vec<bool>>())
        .find(|a| f.first_false(a).is_none()))
}
