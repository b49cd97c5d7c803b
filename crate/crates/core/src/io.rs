//! Text formats for instances, graphs, formulas and matchings, plus a seeded
//! random instance generator.
//!
//! Instance text:
//!
//! ```text
//! srti 3        # "sri" for strict instances; an optional third field is d
//! 1: (2 3)
//! 2: 3 1
//! 3: 1 2
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{validate, Edge, Instance, Matching};
use crate::reductions::{CnfFormula, CubicGraph, FormulaMode};

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines<'a>(
    text: &'a str,
    comment: &'a [&'a str],
) -> impl Iterator<Item = (usize, &'a str)> {
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() || comment.iter().any(|c| body.starts_with(c)) {
            None
        } else {
            Some((i + 1, body))
        }
    })
}

fn number(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a number, found {tok:?}")))
}

fn parse_tiers(line: usize, body: &str) -> Result<Vec<Vec<usize>>> {
    let mut tiers = Vec::new();
    let mut group: Option<Vec<usize>> = None;
    let spaced = body.replace('(', " ( ").replace(')', " ) ");
    for tok in spaced.split_whitespace() {
        match (tok, &mut group) {
            ("(", Some(_)) => return Err(parse_err(line, "nested tie")),
            ("(", None) => group = Some(Vec::new()),
            (")", None) => return Err(parse_err(line, "unmatched ')'")),
            (")", Some(g)) => {
                if g.is_empty() {
                    return Err(parse_err(line, "empty tie"));
                }
                tiers.push(std::mem::take(g));
                group = None;
            }
            (t, Some(g)) => g.push(number(line, t)?),
            (t, None) => tiers.push(vec![number(line, t)?]),
        }
    }
    if group.is_some() {
        return Err(parse_err(line, "unclosed '('"));
    }
    Ok(tiers)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text, &[]);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let strict = match fields.first() {
        Some(&"sri") => true,
        Some(&"srti") => false,
        _ => {
            return Err(parse_err(
                hline,
                "header must start with \"sri\" or \"srti\"",
            ))
        }
    };
    let n = number(
        hline,
        fields
            .get(1)
            .ok_or_else(|| parse_err(hline, "missing agent count"))?,
    )?;
    let d = fields.get(2).map(|t| number(hline, t)).transpose()?;
    if fields.len() > 3 {
        return Err(parse_err(hline, "unexpected fields after the header"));
    }
    let mut tiers = vec![Vec::new(); n];
    let mut line_of = vec![hline; n];
    let mut seen = vec![false; n];
    for (ln, body) in lines {
        let (id, rest) = body
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "expected \"<agent>: <list>\""))?;
        let id = number(ln, id.trim())?;
        if id == 0 || id > n {
            return Err(parse_err(ln, format!("agent {id} outside 1..={n}")));
        }
        if std::mem::replace(&mut seen[id - 1], true) {
            return Err(parse_err(ln, format!("agent {id} listed twice")));
        }
        let list = parse_tiers(ln, rest)?;
        if strict && list.iter().any(|t| t.len() > 1) {
            return Err(parse_err(ln, "ties are not allowed in an sri instance"));
        }
        tiers[id - 1] = list;
        line_of[id - 1] = ln;
    }
    let longest = tiers
        .iter()
        .map(|l| l.iter().map(Vec::len).sum::<usize>())
        .max()
        .unwrap_or(0);
    let bound = d.unwrap_or(longest.max(1));
    if let Err(vs) = validate(&tiers, bound) {
        let located = vs
            .into_iter()
            .map(|v| (v.agent().map_or(hline, |a| line_of[a - 1]), v))
            .collect();
        return Err(Error::ValidationAt(located));
    }
    Instance::new(tiers, Some(bound))
}

pub fn render_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let kind = if inst.is_strict() { "sri" } else { "srti" };
    let _ = write!(out, "{kind} {}", inst.num_agents());
    if inst.degree_bound() != inst.max_list_len().max(1) {
        let _ = write!(out, " {}", inst.degree_bound());
    }
    out.push('\n');
    for a in inst.agents() {
        let _ = write!(out, "{a}:");
        for tier in inst.tiers(a) {
            if tier.len() == 1 {
                let _ = write!(out, " {}", tier[0]);
            } else {
                let ids: Vec<String> = tier.iter().map(|b| b.to_string()).collect();
                let _ = write!(out, " ({})", ids.join(" "));
            }
        }
        out.push('\n');
    }
    out
}

/// `p <n> <m>` followed by `m` lines `u v`.
pub fn parse_graph(text: &str) -> Result<CubicGraph> {
    let mut lines = content_lines(text, &["c "]);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing \"p <n> <m>\" line"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (n, m) = match fields.as_slice() {
        ["p", n, m] => (number(hline, n)?, number(hline, m)?),
        _ => return Err(parse_err(hline, "expected \"p <n> <m>\"")),
    };
    let mut edges = Vec::with_capacity(m);
    for (ln, body) in lines {
        match body.split_whitespace().collect::<Vec<_>>().as_slice() {
            [u, v] => edges.push((number(ln, u)?, number(ln, v)?)),
            _ => return Err(parse_err(ln, "expected \"u v\"")),
        }
    }
    if edges.len() != m {
        return Err(parse_err(
            hline,
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    CubicGraph::new(n, edges)
}

pub fn render_graph(g: &CubicGraph) -> String {
    let mut out = format!("p {} {}\n", g.num_vertices(), g.num_edges());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// DIMACS CNF with exactly three literals per clause.
pub fn parse_dimacs(text: &str, mode: FormulaMode) -> Result<CnfFormula> {
    let mut header = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (ln, body) in content_lines(text, &["c", "%"]) {
        if body.starts_with('p') {
            match body.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["p", "cnf", n, m] if header.is_none() => {
                    header = Some((ln, number(ln, n)?, number(ln, m)?))
                }
                _ => {
                    return Err(parse_err(
                        ln,
                        "expected a single \"p cnf <vars> <clauses>\"",
                    ))
                }
            }
            continue;
        }
        if header.is_none() {
            return Err(parse_err(ln, "clause before the \"p cnf\" line"));
        }
        for tok in body.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| parse_err(ln, format!("expected a literal, found {tok:?}")))?;
            if lit != 0 {
                current.push(lit);
                continue;
            }
            let clause = <[i32; 3]>::try_from(current.as_slice()).map_err(|_| {
                Error::MalformedFormula(format!(
                    "clause {} has {} literals, expected 3",
                    clauses.len() + 1,
                    current.len()
                ))
            })?;
            clauses.push(clause);
            current.clear();
        }
    }
    let (hline, n, m) = header.ok_or_else(|| parse_err(1, "missing \"p cnf\" line"))?;
    if !current.is_empty() {
        return Err(Error::MalformedFormula(
            "last clause is not terminated by 0".into(),
        ));
    }
    if clauses.len() != m {
        return Err(parse_err(
            hline,
            format!("header announces {m} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(n, clauses, mode)
}

pub fn render_dimacs(f: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", f.num_vars(), f.clauses().len());
    for [a, b, c] in f.clauses() {
        let _ = writeln!(out, "{a} {b} {c} 0");
    }
    out
}

/// Reads `i j` pair lines. Lines that start with something other than a digit
/// (verdicts, summaries) are skipped, so solver reports can be fed back in.
pub fn parse_matching(text: &str, n: usize) -> Result<Matching> {
    let mut pairs = Vec::new();
    for (ln, body) in content_lines(text, &[]) {
        if !body.starts_with(|c: char| c.is_ascii_digit()) {
            continue;
        }
        match body.split_whitespace().collect::<Vec<_>>().as_slice() {
            [u, v] => {
                let (u, v) = (number(ln, u)?, number(ln, v)?);
                if u == 0 || v == 0 || u == v {
                    return Err(parse_err(ln, format!("invalid pair {u} {v}")));
                }
                pairs.push(Edge::of(u, v));
            }
            _ => return Err(parse_err(ln, "expected \"i j\"")),
        }
    }
    Matching::on_agents(n, pairs)
}

pub fn render_matching(m: &Matching) -> String {
    m.pairs().iter().map(|e| format!("{e}\n")).collect()
}

/// A random instance with lists of length at most `d`: `d` half-edges per
/// agent are paired at random (dropping loops and repeats), lists are
/// shuffled, and adjacent list positions are tied with probability
/// `tie_prob`. Runs in time linear in `n * d`.
pub fn random_instance(n: usize, d: usize, tie_prob: f64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|a| std::iter::repeat_n(a, d)).collect();
    stubs.shuffle(&mut rng);
    let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen = HashSet::with_capacity(stubs.len() / 2);
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && seen.insert((u.min(v), u.max(v))) {
            lists[u].push(v + 1);
            lists[v].push(u + 1);
        }
    }
    let tiers = lists
        .into_iter()
        .map(|mut l| {
            l.shuffle(&mut rng);
            let mut tiers: Vec<Vec<usize>> = Vec::new();
            for b in l {
                match tiers.last_mut() {
                    Some(t) if tie_prob > 0.0 && rng.gen_bool(tie_prob.min(1.0)) => t.push(b),
                    _ => tiers.push(vec![b]),
                }
            }
            tiers
        })
        .collect();
    Instance::new(tiers, Some(d.max(1))).expect("random lists are symmetric")
}
