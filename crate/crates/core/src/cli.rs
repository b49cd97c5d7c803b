//! Command-line front end. [`run`] takes argv and output sinks and returns the
//! exit code: 0 answered, 2 negative verdict (unsolvable, unsatisfiable,
//! rejected witness), 1 error or timeout, 64 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::egal::{egal_approx_with, egal_exact, MinWeightMode};
use crate::error::{Error, Result};
use crate::io::{
    parse_dimacs, parse_graph, parse_instance, parse_matching, random_instance, render_instance,
    render_matching,
};
use crate::model::{blocking_edges, cost, Instance, Matching};
use crate::reductions::{
    assignment_to_matching, cover_to_matching, gen_amplified, gen_egal_from_vc, gen_srti_from_sat,
    k_prime, matching_to_assignment, matching_to_cover, FormulaMode, ReductionBundle, Source,
};
use crate::solver::{enumerate, solve, DEFAULT_CAP};
use crate::srti::{
    min_bp_2srti, min_bp_brute, solvable, BruteOutcome, BRUTE_GUARD, DEFAULT_BUDGET,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "roommates",
    version,
    about = "Stable roommates with short preference lists"
)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Instance file.
    #[arg(required_unless_present = "batch")]
    file: Option<PathBuf>,
    /// Process every file of a directory in parallel, in file name order.
    #[arg(long, conflicts_with = "file")]
    batch: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// A stable matching of a strict instance.
    Solve {
        #[command(flatten)]
        input: Input,
    },
    /// All stable matchings.
    Enumerate {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Egalitarian stable matching.
    Egal {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        mode: EgalMode,
        /// Degree bound for the approximation (3, 4 or 5); defaults to the
        /// longest list, at least 3.
        #[arg(long)]
        d: Option<usize>,
        /// Also compute the optimum and report the achieved ratio.
        #[arg(long)]
        oracle: bool,
    },
    /// Matching with the fewest blocking edges.
    Minbp {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = MinbpMode::Auto)]
        mode: MinbpMode,
        /// Give up above this many blocking edges (brute force only).
        #[arg(long)]
        kmax: Option<usize>,
        /// Lift the size guard of the brute-force search.
        #[arg(long)]
        force: bool,
    },
    /// Weakly stable matching of an instance with ties.
    Solvable {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Generate a reduction instance.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Check a witness against a generated reduction.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Random instance with lists of length at most d.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.0)]
        ties: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum GenCmd {
    /// Egalitarian 3-SRI instance from a cubic graph.
    Vc {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// Output prefix; defaults to the graph path without extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// 3-SRTI instance from a DIMACS formula.
    Sat {
        #[arg(long)]
        cnf: PathBuf,
        /// Disjoint copies plus an unsolvable triangle.
        #[arg(long)]
        copies: Option<usize>,
        /// Allow variables with fewer than two occurrences per polarity.
        #[arg(long)]
        relaxed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// Round-trip a matching through a bundle's witness converters.
    Reduction {
        bundle: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum EgalMode {
    Exact,
    Approx,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MinbpMode {
    Auto,
    Brute,
}

/// Outcome of one command on one input.
struct Report {
    code: i32,
    text: String,
    json: Value,
}

impl Report {
    fn new(code: i32, text: String, json: Value) -> Self {
        Report { code, text, json }
    }

    fn error(e: &Error) -> Self {
        Report::new(
            EXIT_ERROR,
            format!("error: {e}\n"),
            json!({ "error": e.to_string() }),
        )
    }
}

fn matching_block(verdict: &str, m: &Matching, summary: &str) -> String {
    format!("verdict: {verdict}\n{}{summary}\n", render_matching(m))
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let json = cli.json;
    let (code, reports) = match &cli.cmd {
        Cmd::Solve { input } => over_input(input, cmd_solve),
        Cmd::Enumerate { input, cap } => over_input(input, |i| cmd_enumerate(i, *cap)),
        Cmd::Egal {
            input,
            mode,
            d,
            oracle,
        } => over_input(input, |i| cmd_egal(i, *mode, *d, *oracle)),
        Cmd::Minbp {
            input,
            mode,
            kmax,
            force,
        } => over_input(input, |i| cmd_minbp(i, *mode, *kmax, *force)),
        Cmd::Solvable { input, budget } => over_input(input, |i| cmd_solvable(i, *budget)),
        Cmd::Gen { what } => single(cmd_gen(what)),
        Cmd::Verify {
            what: VerifyCmd::Reduction { bundle, witness },
        } => single(cmd_verify(bundle, witness)),
        Cmd::Random { n, d, ties, seed } => single(cmd_random(*n, *d, *ties, *seed)),
    };
    for (name, r) in &reports {
        if r.code == EXIT_ERROR {
            let _ = write!(err, "{}", prefixed(name, &r.text));
        }
    }
    if json {
        let value = match reports.as_slice() {
            [(None, r)] => r.json.clone(),
            _ => Value::Array(
                reports
                    .iter()
                    .map(|(name, r)| json!({ "file": name, "exit": r.code, "result": r.json }))
                    .collect(),
            ),
        };
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&value).expect("json")
        );
    } else {
        for (name, r) in &reports {
            if r.code != EXIT_ERROR {
                let _ = write!(out, "{}", prefixed(name, &r.text));
            }
        }
    }
    code
}

fn prefixed(name: &Option<String>, text: &str) -> String {
    match name {
        Some(n) => format!("== {n}\n{text}"),
        None => text.to_string(),
    }
}

type Named = Vec<(Option<String>, Report)>;

fn single(r: Result<Report>) -> (i32, Named) {
    let r = r.unwrap_or_else(|e| Report::error(&e));
    (r.code, vec![(None, r)])
}

fn over_input(input: &Input, f: impl Fn(&Instance) -> Result<Report> + Sync) -> (i32, Named) {
    let load = |p: &Path| -> Report {
        std::fs::read_to_string(p)
            .map_err(|e| io_error(p, e))
            .and_then(|t| parse_instance(&t))
            .and_then(|inst| f(&inst))
            .unwrap_or_else(|e| Report::error(&e))
    };
    match (&input.file, &input.batch) {
        (Some(p), _) => {
            let r = load(p);
            (r.code, vec![(None, r)])
        }
        (None, Some(dir)) => {
            let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
                Ok(rd) => rd
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.is_file())
                    .collect(),
                Err(e) => {
                    return single(Err(io_error(dir, e)));
                }
            };
            files.sort();
            let reports: Named = files
                .par_iter()
                .map(|p| {
                    let name = p.file_name().map(|s| s.to_string_lossy().into_owned());
                    (name, load(p))
                })
                .collect();
            let code = reports
                .iter()
                .map(|(_, r)| r.code)
                .max_by_key(|&c| match c {
                    EXIT_ERROR => 2,
                    EXIT_NEGATIVE => 1,
                    _ => 0,
                })
                .unwrap_or(EXIT_OK);
            (code, reports)
        }
        (None, None) => unreachable!("clap requires one of file and batch"),
    }
}

fn pairs_json(m: &Matching) -> Value {
    serde_json::to_value(m).expect("json")
}

fn unsolvable() -> Report {
    Report::new(
        EXIT_NEGATIVE,
        "verdict: unsolvable\n".into(),
        json!({ "verdict": "unsolvable" }),
    )
}

fn cmd_solve(inst: &Instance) -> Result<Report> {
    let Some(m) = solve(inst)? else {
        return Ok(unsolvable());
    };
    let c = cost(inst, &m)?;
    Ok(Report::new(
        EXIT_OK,
        matching_block("stable", &m, &format!("cost={c}")),
        json!({ "verdict": "stable", "matching": pairs_json(&m), "cost": c }),
    ))
}

fn cmd_enumerate(inst: &Instance, cap: usize) -> Result<Report> {
    let all = enumerate(inst, cap)?;
    if all.is_empty() {
        return Ok(unsolvable());
    }
    let mut text = format!("count={}\n", all.len());
    for (i, m) in all.iter().enumerate() {
        text.push_str(&format!("# matching {}\n{}", i + 1, render_matching(m)));
    }
    let list: Vec<Value> = all.iter().map(pairs_json).collect();
    Ok(Report::new(
        EXIT_OK,
        text,
        json!({ "count": all.len(), "matchings": list }),
    ))
}

fn cmd_egal(inst: &Instance, mode: EgalMode, d: Option<usize>, oracle: bool) -> Result<Report> {
    let unsolvable_ok = |r: Result<Report>| match r {
        Err(Error::Unsolvable) => Ok(unsolvable()),
        other => other,
    };
    match mode {
        EgalMode::Exact => unsolvable_ok(egal_exact(inst).map(|(m, c)| {
            Report::new(
                EXIT_OK,
                matching_block("egalitarian", &m, &format!("cost={c}")),
                json!({ "verdict": "egalitarian", "matching": pairs_json(&m), "cost": c }),
            )
        })),
        EgalMode::Approx => {
            let d = d.unwrap_or_else(|| inst.max_list_len().max(3));
            unsolvable_ok(egal_approx_with(inst, d, MinWeightMode::Exact, oracle).map(|r| {
                let mut summary = format!("cost={} guarantee={}", r.output_cost, r.guarantee);
                if let (Some(opt), Some(ratio)) = (r.oracle_cost, r.ratio()) {
                    summary.push_str(&format!(
                        "\noptimum={opt} ratio={ratio} pairs12_output={} pairs12_egal={} pairs12_opt={}",
                        r.count_12_output,
                        r.count_12_egal.unwrap_or(0),
                        r.count_12_opt.unwrap_or(0)
                    ));
                }
                let text = matching_block("approximate", &r.output, &summary);
                Report::new(EXIT_OK, text, serde_json::to_value(&r).expect("json"))
            }))
        }
    }
}

fn cmd_minbp(inst: &Instance, mode: MinbpMode, kmax: Option<usize>, force: bool) -> Result<Report> {
    let found = |m: &Matching, bp: usize| {
        Report::new(
            EXIT_OK,
            format!("bp={bp}\n{}", render_matching(m)),
            json!({ "bp": bp, "matching": pairs_json(m) }),
        )
    };
    if mode == MinbpMode::Auto && inst.max_list_len() <= 2 {
        let r = min_bp_2srti(inst)?;
        return Ok(found(&r.matching, r.bp_count));
    }
    let k_max = kmax.unwrap_or_else(|| inst.num_edges());
    if inst.num_agents() > BRUTE_GUARD && !force {
        return Err(Error::SizeGuardExceeded {
            size: inst.num_agents(),
            guard: BRUTE_GUARD,
        });
    }
    Ok(match min_bp_brute(inst, k_max, force)? {
        BruteOutcome::Found(r) => found(&r.matching, r.bp_count),
        BruteOutcome::NoneWithin(k) => Report::new(
            EXIT_NEGATIVE,
            format!("verdict: every matching has more than {k} blocking edges\n"),
            json!({ "verdict": "none_within", "k_max": k }),
        ),
    })
}

fn cmd_solvable(inst: &Instance, budget: u64) -> Result<Report> {
    let Some(m) = solvable(inst, Some(budget))? else {
        return Ok(unsolvable());
    };
    Ok(Report::new(
        EXIT_OK,
        matching_block("stable", &m, &format!("size={}", m.len())),
        json!({ "verdict": "stable", "matching": pairs_json(&m) }),
    ))
}

fn cmd_random(n: usize, d: usize, ties: f64, seed: u64) -> Result<Report> {
    if n < 2 || d < 1 || !(0.0..=1.0).contains(&ties) {
        return Err(Error::InvalidArgument(
            "need n >= 2, d >= 1 and 0 <= ties <= 1".into(),
        ));
    }
    let inst = random_instance(n, d, ties, seed);
    let text = render_instance(&inst);
    Ok(Report::new(
        EXIT_OK,
        text.clone(),
        json!({ "instance": text }),
    ))
}

/// Everything needed to rebuild a generated instance.
#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    source: Source,
    instance: String,
    labels: String,
}

fn io_error(p: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: p.display().to_string(),
        reason: e.to_string(),
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| io_error(p, e))
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).map_err(|e| io_error(p, e))
}

fn write_bundle(b: &ReductionBundle, prefix: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let with = |e: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(e);
        PathBuf::from(s)
    };
    let (inst, labels, manifest) = (with(ext), with(".labels"), with(".bundle"));
    write_file(&inst, &render_instance(&b.instance))?;
    write_file(&labels, &b.labels_text())?;
    let m = Manifest {
        source: b.source.clone(),
        instance: file_name(&inst),
        labels: file_name(&labels),
    };
    write_file(&manifest, &serde_json::to_string_pretty(&m).expect("json"))?;
    Ok(vec![inst, labels, manifest])
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn cmd_gen(what: &GenCmd) -> Result<Report> {
    let (bundle, prefix, ext, summary) = match what {
        GenCmd::Vc { graph, k, out } => {
            let g = parse_graph(&read(graph)?)?;
            let b = gen_egal_from_vc(&g, *k);
            let kp = k_prime(&g, *k);
            (
                b,
                out.clone().unwrap_or_else(|| graph.with_extension("")),
                ".sri",
                format!("K'={kp}"),
            )
        }
        GenCmd::Sat {
            cnf,
            copies,
            relaxed,
            out,
        } => {
            let mode = if *relaxed {
                FormulaMode::Relaxed
            } else {
                FormulaMode::Strict
            };
            let f = parse_dimacs(&read(cnf)?, mode)?;
            let (b, target) = match copies {
                Some(c) => (gen_amplified(&f, *c)?, "one blocking edge iff satisfiable"),
                None => (gen_srti_from_sat(&f), "solvable iff satisfiable"),
            };
            (
                b,
                out.clone().unwrap_or_else(|| cnf.with_extension("")),
                ".srti",
                format!("target: {target}"),
            )
        }
    };
    let files = write_bundle(&bundle, &prefix, ext)?;
    let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    let text = format!(
        "agents={}\n{summary}\nwrote {}\n",
        bundle.instance.num_agents(),
        names.join(" ")
    );
    Ok(Report::new(
        EXIT_OK,
        text,
        json!({ "agents": bundle.instance.num_agents(), "target": bundle.target, "files": names }),
    ))
}

fn cmd_verify(bundle_path: &Path, witness: &Path) -> Result<Report> {
    let manifest: Manifest =
        serde_json::from_str(&read(bundle_path)?).map_err(|e| Error::Parse {
            line: e.line(),
            reason: e.to_string(),
        })?;
    let bundle = ReductionBundle::regenerate(&manifest.source)?;
    if let Some(dir) = bundle_path.parent() {
        let on_disk = dir.join(&manifest.instance);
        if on_disk.exists() && parse_instance(&read(&on_disk)?)? != bundle.instance {
            return Ok(rejected(format!(
                "{} does not match the bundle source",
                on_disk.display()
            )));
        }
    }
    let m = parse_matching(&read(witness)?, bundle.instance.num_agents())?;
    if let Err(e) = m.check_edges(&bundle.instance) {
        return Ok(rejected(e.to_string()));
    }
    let outcome = match &manifest.source {
        Source::VertexCover { graph, k } => {
            verify_vc(&bundle, graph.num_vertices(), graph.num_edges(), *k, &m)
        }
        Source::Sat { .. } => verify_sat(&bundle, &m),
    };
    Ok(match outcome {
        Ok(r) => r,
        Err(
            e @ (Error::NotStable(_)
            | Error::NotSatisfying(_)
            | Error::NotACover(..)
            | Error::MalformedMatching(_)),
        ) => rejected(e.to_string()),
        Err(e) => return Err(e),
    })
}

fn rejected(reason: String) -> Report {
    Report::new(
        EXIT_NEGATIVE,
        format!("verdict: rejected\nreason: {reason}\n"),
        json!({ "verdict": "rejected", "reason": reason }),
    )
}

fn verify_vc(b: &ReductionBundle, n: usize, e: usize, k: usize, m: &Matching) -> Result<Report> {
    let cover = matching_to_cover(b, m)?;
    let c = cost(&b.instance, m)?;
    let expected = (7 * e + 19 * n + cover.len()) as u64;
    if c != expected {
        return Ok(rejected(format!(
            "cost {c} differs from 7m+19n+|C| = {expected}"
        )));
    }
    let back = cover_to_matching(b, &cover)?;
    if !blocking_edges(&b.instance, &back)?.stable || matching_to_cover(b, &back)? != cover {
        return Ok(rejected("cover does not round-trip".into()));
    }
    let ids: Vec<String> = cover.iter().map(|v| v.to_string()).collect();
    let kp = (7 * e + 19 * n + k) as u64;
    Ok(Report::new(
        EXIT_OK,
        format!(
            "verdict: verified\ncover: {}\ncost={c} K'={kp} within_target={}\n",
            ids.join(" "),
            c <= kp
        ),
        json!({ "verdict": "verified", "cover": cover, "cost": c, "k_prime": kp, "within_target": c <= kp }),
    ))
}

fn verify_sat(b: &ReductionBundle, m: &Matching) -> Result<Report> {
    let assignment = matching_to_assignment(b, m)?;
    let back = assignment_to_matching(b, &assignment)?;
    if matching_to_assignment(b, &back)? != assignment {
        return Ok(rejected("assignment does not round-trip".into()));
    }
    let bp = blocking_edges(&b.instance, &back)?.blocking.len();
    let lits: Vec<String> = assignment
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v {
                format!("{}", i + 1)
            } else {
                format!("-{}", i + 1)
            }
        })
        .collect();
    Ok(Report::new(
        EXIT_OK,
        format!(
            "verdict: verified\nassignment: {}\nbp={bp}\n",
            lits.join(" ")
        ),
        json!({ "verdict": "verified", "assignment": assignment, "bp": bp }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("roommates").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&[]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["egal", "x.sri", "--mode", "fast"]).0, EXIT_USAGE);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn random_is_deterministic() {
        let a = call(&["random", "--n", "8", "--d", "3", "--seed", "4"]);
        let b = call(&["random", "--n", "8", "--d", "3", "--seed", "4"]);
        assert_eq!(a, b);
        assert_eq!(a.0, EXIT_OK);
        assert!(parse_instance(&a.1).is_ok());
    }

    #[test]
    fn missing_file_is_an_error() {
        let (code, _, err) = call(&["solve", "/nonexistent/x.sri"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.starts_with("error:"));
    }
}
