//! Command-line front end. `run` returns the exit code and both streams so
//! tests can drive it without spawning a process.

use crate::arith::format_rational;
use crate::chains::{hj_eval, hj_expand, wahl_generate, wahl_params, Chain, QeqStar};
use crate::config::BlowUpSpec;
use crate::contraction::{ample_certificate, check_contractible, nef_report, AmpleVerdict, Contractibility};
use crate::document::{parse_config, to_file, to_json, Problem};
use crate::fundgroup::{abelianization, link_order, mumford_presentation, trivialize, Pi1Verdict};
use crate::obstruction::{check_derivation, DerivationVerdict};
use crate::tables::{parse_tables, unexpected_failures, verify_tables, ErrataFile};
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};
use std::fmt::Write as _;

pub const OK: i32 = 0;
pub const FAILED: i32 = 1;
pub const USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ksbakit", about = "Exact checks for Wahl and QEq contractions")]
struct Cli {
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
    /// Prose report with per-curve detail
    #[arg(long, global = true)]
    report: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Continued fraction of p/q
    Hj { p: BigInt, q: BigInt },
    /// Evaluate a chain such as 3,5,2
    Eval { chain: String },
    /// Wahl parameters (n,a) of a chain
    Wahl { chain: String },
    /// Wahl chains up to a length
    WahlGen { max_length: usize },
    /// Classify a star such as 3,3,3;4
    Qeq { star: String },
    /// Blow up a point of a configuration and print the new file
    Blowup {
        file: String,
        #[arg(long)]
        name: String,
        /// Comma separated curve:multiplicity pairs; empty for a free point
        #[arg(long, default_value = "")]
        center: String,
    },
    /// Contractibility, K^2, discrepancies and the ample verdict
    Contract {
        file: String,
        #[arg(long)]
        fiber: Option<String>,
    },
    /// (f*K).C for every curve
    Nef { file: String },
    /// Ample certificate
    Ample {
        file: String,
        #[arg(long)]
        fiber: Option<String>,
    },
    /// Link groups and loop trivialization
    Pi1 { file: String },
    /// Check the derivation script
    Obstruction { file: String },
    /// Table tools
    Tables {
        #[command(subcommand)]
        cmd: TablesCmd,
    },
}

#[derive(Subcommand, Debug)]
enum TablesCmd {
    Verify {
        file: String,
        /// Allowlist of known failing rows
        #[arg(long)]
        expect_known_errata: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: OK, stdout, stderr: String::new() }
    }
    fn with(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }
    fn usage(msg: impl Into<String>) -> Self {
        Outcome { code: USAGE, stdout: String::new(), stderr: msg.into() }
    }
    fn failed(msg: impl Into<String>) -> Self {
        Outcome { code: FAILED, stdout: String::new(), stderr: msg.into() }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let text = e.render().to_string();
            return if code == OK { Outcome::ok(text) } else { Outcome::usage(text) };
        }
    };
    let fmt = Format { json: cli.json, report: cli.report };
    match cli.cmd {
        Cmd::Hj { p, q } => match hj_expand(&p, &q) {
            Ok(c) if fmt.json => {
                Outcome::ok(line(json!({"p": p.to_string(), "q": q.to_string(), "chain": c.entries()})))
            }
            Ok(c) => Outcome::ok(format!("{c}\n")),
            Err(e) => Outcome::usage(format!("{e}\n")),
        },
        Cmd::Eval { chain } => with_chain(&chain, |c| {
            let (p, q) = hj_eval(c);
            if fmt.json {
                Outcome::ok(line(json!({"chain": c.entries(), "p": p.to_string(), "q": q.to_string()})))
            } else {
                Outcome::ok(format!("{p}/{q}\n"))
            }
        }),
        Cmd::Wahl { chain } => with_chain(&chain, |c| match wahl_params(c) {
            Some(w) if fmt.json => Outcome::ok(line(json!({"n": w.n.to_string(), "a": w.a.to_string()}))),
            Some(w) => Outcome::ok(format!("n={} a={}\n", w.n, w.a)),
            None if fmt.json => Outcome::with(FAILED, line(Value::Null)),
            None => Outcome::with(FAILED, format!("{c} is not a Wahl chain\n")),
        }),
        Cmd::WahlGen { max_length } => {
            let chains = wahl_generate(max_length);
            if fmt.json {
                let v: Vec<&[u64]> = chains.iter().map(|c| c.entries()).collect();
                Outcome::ok(line(json!(v)))
            } else {
                Outcome::ok(chains.iter().map(|c| format!("{c}\n")).collect())
            }
        }
        Cmd::Qeq { star } => match star.parse::<QeqStar>() {
            Ok(s) => match crate::chains::qeq_classify(&s) {
                Some(t) if fmt.json => Outcome::ok(line(json!({"star": s.to_string(), "type": t.to_string()}))),
                Some(t) => Outcome::ok(format!("{t}\n")),
                None => Outcome::with(FAILED, format!("{s} is not a QEq star\n")),
            },
            Err(e) => Outcome::usage(format!("{e}\n")),
        },
        Cmd::Blowup { file, name, center } => with_problem(&file, |p| cmd_blowup(p, &name, &center)),
        Cmd::Contract { file, fiber } => with_problem(&file, |p| cmd_contract(p, fiber.as_deref(), fmt)),
        Cmd::Nef { file } => with_problem(&file, |p| cmd_nef(p, fmt)),
        Cmd::Ample { file, fiber } => with_problem(&file, |p| cmd_ample(p, fiber.as_deref(), fmt)),
        Cmd::Pi1 { file } => with_problem(&file, |p| cmd_pi1(p, fmt)),
        Cmd::Obstruction { file } => with_problem(&file, |p| cmd_obstruction(p, fmt)),
        Cmd::Tables { cmd: TablesCmd::Verify { file, expect_known_errata } } => {
            cmd_tables(&file, expect_known_errata.as_deref(), fmt)
        }
    }
}

#[derive(Clone, Copy)]
struct Format {
    json: bool,
    report: bool,
}

fn line(v: Value) -> String {
    serde_json::to_string(&v).expect("json") + "\n"
}

fn pretty(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("json") + "\n"
}

fn with_chain(s: &str, f: impl FnOnce(&Chain) -> Outcome) -> Outcome {
    match s.parse::<Chain>() {
        Ok(c) => f(&c),
        Err(e) => Outcome::usage(format!("{e}\n")),
    }
}

fn with_problem(path: &str, f: impl FnOnce(&Problem) -> Outcome) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(format!("{path}: {e}\n")),
    };
    match parse_config(&text) {
        Ok(p) => f(&p),
        Err(e) => Outcome::usage(format!("{path}: {e}\n")),
    }
}

/// Input document plus a "result" object.
fn document_with(p: &Problem, result: Value) -> String {
    let mut v = serde_json::to_value(to_file(p)).expect("json");
    v.as_object_mut().expect("object").insert("result".into(), result);
    pretty(v)
}

fn cmd_blowup(p: &Problem, name: &str, center: &str) -> Outcome {
    let mut pairs = Vec::new();
    for part in center.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (c, m) = part.split_once(':').unwrap_or((part, "1"));
        match m.trim().parse::<i64>() {
            Ok(m) => pairs.push((c.trim().to_string(), m)),
            Err(_) => return Outcome::usage(format!("bad center entry {part:?}\n")),
        }
    }
    let spec = BlowUpSpec { center: pairs, new_name: name.to_string() };
    match p.config.blow_up(&spec) {
        Ok(config) => Outcome::ok(to_json(&Problem { config, ..p.clone() }) + "\n"),
        Err(e) => Outcome::failed(format!("{e}\n")),
    }
}

fn default_fiber<'a>(p: &'a Problem, fiber: Option<&'a str>) -> Option<&'a str> {
    fiber.or_else(|| p.config.fibers.first().map(|f| f.name.as_str()))
}

fn verdict_json(v: &AmpleVerdict) -> Value {
    match v {
        AmpleVerdict::Ample => json!({"verdict": "ample"}),
        AmpleVerdict::NefNotAmple(z) => json!({"verdict": "nef_not_ample", "zero_curves": z}),
        AmpleVerdict::NotNef { witness, value } => {
            json!({"verdict": "not_nef", "witness": witness, "value": format_rational(value)})
        }
        AmpleVerdict::Inconclusive(r) => json!({"verdict": "inconclusive", "reason": r}),
    }
}

fn cmd_contract(p: &Problem, fiber: Option<&str>, fmt: Format) -> Outcome {
    let mut out = String::new();
    let mut sets_json = Vec::new();
    let mut failed = false;
    let _ = writeln!(out, "K_Z^2 = {}", p.config.kz_squared);
    for s in &p.sets {
        match check_contractible(&p.config, s) {
            Ok(Contractibility::Contractible { classification, weights }) => {
                let _ = writeln!(out, "{} = {}: {}", s, weights, classification);
                sets_json
                    .push(json!({"name": s.name, "weights": weights, "classification": classification.to_string()}));
            }
            Ok(Contractibility::NotContractible(r)) => {
                failed = true;
                let _ = writeln!(out, "{s}: not contractible ({r})");
                sets_json.push(json!({"name": s.name, "contractible": false, "reason": r}));
            }
            Err(e) => return Outcome::failed(format!("{e}\n")),
        }
    }
    if failed {
        return finish(p, fmt, FAILED, out, json!({"sets": sets_json}));
    }
    let report = match nef_report(&p.config, &p.sets) {
        Ok(r) => r,
        Err(e) => return Outcome::failed(format!("{e}\n")),
    };
    let _ = writeln!(out, "K_X^2 = {}", report.k_squared);
    let _ = writeln!(out, "(f*K)^2 = {}", format_rational(&report.class.square));
    let d: Vec<String> = report.class.coefficients.iter().map(|(c, q)| format!("{c} {}", format_rational(q))).collect();
    let _ = writeln!(out, "discrepancies: {}", d.join(", "));
    let zeros = if report.zeros.is_empty() { "none".to_string() } else { report.zeros.join(",") };
    let _ = writeln!(out, "zero curves: {zeros}");
    let mut result = json!({
        "sets": sets_json,
        "k_squared": report.k_squared,
        "pullback_square": format_rational(&report.class.square),
        "discrepancies": report.class.coefficients.iter()
            .map(|(c, q)| (c.clone(), Value::String(format_rational(q)))).collect::<serde_json::Map<_, _>>(),
        "zero_curves": report.zeros,
        "negative_curves": report.negatives,
    });
    let mut code = if report.negatives.is_empty() { OK } else { FAILED };
    if let Some(f) = default_fiber(p, fiber) {
        match ample_certificate(&p.config, &p.sets, f, p.pullback.as_deref()) {
            Ok(v) => {
                let _ = writeln!(out, "canonical class: {v}");
                result["ample"] = verdict_json(&v);
                if matches!(v, AmpleVerdict::NotNef { .. }) {
                    code = FAILED;
                }
            }
            Err(e) => return Outcome::failed(format!("{e}\n")),
        }
    }
    if fmt.report {
        out += &nef_lines(&report.values);
    }
    finish(p, fmt, code, out, result)
}

fn nef_lines(values: &[(String, crate::arith::Rational, bool)]) -> String {
    let mut out = String::new();
    for (c, v, inside) in values {
        let tag = if *inside { " (contracted)" } else { "" };
        let _ = writeln!(out, "  (f*K).{c} = {}{tag}", format_rational(v));
    }
    out
}

fn finish(p: &Problem, fmt: Format, code: i32, text: String, result: Value) -> Outcome {
    if fmt.json {
        Outcome::with(code, document_with(p, result))
    } else {
        Outcome::with(code, text)
    }
}

fn cmd_nef(p: &Problem, fmt: Format) -> Outcome {
    match nef_report(&p.config, &p.sets) {
        Ok(r) => {
            let code = if r.negatives.is_empty() { OK } else { FAILED };
            let mut out = nef_lines(&r.values);
            let zeros = if r.zeros.is_empty() { "none".to_string() } else { r.zeros.join(",") };
            let _ = writeln!(out, "zero curves: {zeros}");
            if !r.negatives.is_empty() {
                let _ = writeln!(out, "negative: {}", r.negatives.join(","));
            }
            let values: serde_json::Map<String, Value> =
                r.values.iter().map(|(c, v, _)| (c.clone(), Value::String(format_rational(v)))).collect();
            finish(p, fmt, code, out, json!({"values": values, "zero_curves": r.zeros, "negative_curves": r.negatives}))
        }
        Err(e) => Outcome::failed(format!("{e}\n")),
    }
}

fn cmd_ample(p: &Problem, fiber: Option<&str>, fmt: Format) -> Outcome {
    let Some(f) = default_fiber(p, fiber) else {
        return Outcome::usage("no fiber declared\n");
    };
    match ample_certificate(&p.config, &p.sets, f, p.pullback.as_deref()) {
        Ok(v) => {
            let code = if v == AmpleVerdict::Ample { OK } else { FAILED };
            finish(p, fmt, code, format!("{v}\n"), verdict_json(&v))
        }
        Err(crate::contraction::ContractionError::UnknownFiber(f)) => Outcome::usage(format!("no fiber named {f:?}\n")),
        Err(e) => Outcome::failed(format!("{e}\n")),
    }
}

fn cmd_pi1(p: &Problem, fmt: Format) -> Outcome {
    let mut out = String::new();
    let mut sets = Vec::new();
    for s in &p.sets {
        let order = link_order(&p.config, s).map(|o| o.to_string()).unwrap_or_else(|e| e.to_string());
        let ab = mumford_presentation(&p.config, s).map(|pr| abelianization(&pr).to_string());
        let ab = ab.unwrap_or_else(|e| e.to_string());
        let _ = writeln!(out, "{}: link order {order}, H1 = {ab}", s.name);
        sets.push(json!({"name": s.name, "link_order": order, "abelianization": ab}));
    }
    match trivialize(&p.config, &p.sets, &p.bridges) {
        Ok(t) => {
            let (code, verdict) = match &t.verdict {
                Pi1Verdict::Trivial => (OK, json!({"verdict": "trivial"})),
                Pi1Verdict::Inconclusive(rest) => {
                    let r: Vec<Value> = rest
                        .iter()
                        .map(|(g, k)| json!({"generator": g, "order_divides": k.as_ref().map(|x| x.to_string())}))
                        .collect();
                    (FAILED, json!({"verdict": "inconclusive", "remaining": r}))
                }
            };
            match &t.verdict {
                Pi1Verdict::Trivial => out += "loops around the contracted curves: trivial\n",
                Pi1Verdict::Inconclusive(rest) => {
                    let r: Vec<String> = rest
                        .iter()
                        .map(|(g, k)| match k {
                            Some(k) => format!("{g} (order divides {k})"),
                            None => g.clone(),
                        })
                        .collect();
                    let _ = writeln!(out, "inconclusive; not shown trivial: {}", r.join(", "));
                }
            }
            if fmt.report {
                for l in &t.log {
                    let _ = writeln!(out, "  {l}");
                }
            }
            finish(p, fmt, code, out, json!({"sets": sets, "pi1": verdict, "log": t.log}))
        }
        Err(e) => Outcome::failed(format!("{e}\n")),
    }
}

fn cmd_obstruction(p: &Problem, fmt: Format) -> Outcome {
    let Some(script) = &p.derivation else {
        return Outcome::usage("file has no derivation\n");
    };
    match check_derivation(&p.config, script, &p.sets) {
        Ok(v) => {
            let code = if v.is_valid() { OK } else { FAILED };
            let mut out = format!("{v}\n");
            let result = match &v {
                DerivationVerdict::Valid { log } => {
                    if fmt.report {
                        for l in log {
                            let _ = writeln!(out, "  {l}");
                        }
                    }
                    json!({"verdict": "valid", "log": log})
                }
                DerivationVerdict::Invalid { step, lemma, reason } => {
                    json!({"verdict": "invalid", "step": step, "lemma": lemma.to_string(), "reason": reason})
                }
            };
            finish(p, fmt, code, out, result)
        }
        Err(e) => Outcome::usage(format!("{e}\n")),
    }
}

fn cmd_tables(path: &str, errata: Option<&str>, fmt: Format) -> Outcome {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(format!("{path}: {e}\n")),
    };
    let file = match parse_tables(&text) {
        Ok(f) => f,
        Err(e) => return Outcome::usage(format!("{path}: {e}\n")),
    };
    let allow = match errata {
        None => vec![],
        Some(e) => match std::fs::read_to_string(e)
            .map_err(|x| x.to_string())
            .and_then(|t| serde_json::from_str::<ErrataFile>(&t).map_err(|x| x.to_string()))
        {
            Ok(f) => f.errata,
            Err(x) => return Outcome::usage(format!("{e}: {x}\n")),
        },
    };
    let report = verify_tables(&file);
    let unexpected = unexpected_failures(&report, &allow);
    let code = if unexpected.is_empty() { OK } else { FAILED };
    if fmt.json {
        let rows: Vec<Value> = report
            .rows
            .iter()
            .map(|r| {
                json!({"k_squared": r.k_squared, "row": r.row, "n": r.n, "a": r.a,
                       "chain": r.chain, "pass": r.pass, "reason": r.reason})
            })
            .collect();
        let failures = report.failures().count();
        return Outcome::with(
            code,
            pretty(json!({"rows": rows, "failures": failures, "unexpected": unexpected.len()})),
        );
    }
    let mut out = String::new();
    for r in &report.rows {
        if fmt.report || !r.pass {
            let _ = writeln!(out, "{r}");
        }
    }
    let total = report.rows.len();
    let failed = report.failures().count();
    let _ = writeln!(
        out,
        "{} rows, {} pass, {} fail ({} not in the errata list)",
        total,
        total - failed,
        failed,
        unexpected.len()
    );
    Outcome::with(code, out)
}
