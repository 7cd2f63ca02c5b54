//! `jtalg`: decide identities, check derivations and query the two algebras.
//!
//! Exit status is 0 for success, an `Entailed` verdict or a passed
//! verification, 1 for a `Collapsing` verdict or a failed check, and 2 for
//! usage and parse errors.

use std::fmt::Write as _;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jtalg::algebra::{check_axioms_with, closure, evaluate, Assignment, ClosureBudget, JtAlgebra};
use jtalg::corpus::Corpus;
use jtalg::jomega::{jw_descent, jw_table, jw_unpair, jw_verify, JOmega};
use jtalg::stage::{self, Ordinal, StageAlgebra, StageTable};
use jtalg::term::check::{check_derivation, check_verdict};
use jtalg::term::decide::{decide, Verdict};
use jtalg::term::derivation::Derivation;
use jtalg::term::normalize::normalize;
use jtalg::term::{mult_count, parse, parse_identity, Identity, ParseError, Term};
use jtalg::Exec;

#[derive(Parser)]
#[command(name = "jtalg", version, about = "Jónsson–Tarski algebra workbench")]
struct Cli {
    /// Output format; csv is only available for tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for random corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Element budget for closures and corpus size for `survey`.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Run verification sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether `s = t` follows from the axioms or collapses them.
    Decide {
        identity: String,
        /// Also print the certifying derivation.
        #[arg(long)]
        proof: bool,
    },
    /// Print the normal form of a term.
    Normalize {
        term: String,
        #[arg(long)]
        proof: bool,
    },
    /// Replay a derivation (bare, or as emitted by `decide --format json --proof`).
    CheckProof {
        /// Path to the JSON file, or `-` for stdin.
        file: PathBuf,
    },
    /// Evaluate a term in J_omega, or in a stage table with --stages.
    Eval {
        term: String,
        /// Variable bindings such as `x=3` or `y=w+2`.
        bindings: Vec<String>,
        #[arg(long)]
        stages: Option<u64>,
    },
    /// Probe the axioms on the first elements of an algebra.
    Axioms {
        #[arg(long, default_value_t = 100)]
        probe: usize,
        #[arg(long)]
        stages: Option<u64>,
        #[arg(long, default_value_t = 64)]
        window: u64,
    },
    /// Decide and check a seeded random corpus of identities.
    Survey {
        #[arg(long, default_value_t = 12)]
        max_size: usize,
    },
    /// The countable algebra on the naturals.
    #[command(subcommand)]
    Jw(Jw),
    /// Stage tables on ordinals below w*K.
    #[command(subcommand)]
    Jw1(Jw1),
}

#[derive(Subcommand)]
enum Jw {
    Mul {
        p: String,
        q: String,
    },
    Unpair {
        n: String,
    },
    /// The sequence n, l(n), l(l(n)), ... down to 0.
    Descent {
        n: String,
    },
    Verify {
        #[arg(long)]
        bound: u64,
        /// Largest p+q for the pair round trip; defaults to min(bound, 2000).
        #[arg(long)]
        pair_bound: Option<u64>,
    },
    Table {
        #[arg(long, default_value_t = 5)]
        rows: u64,
        #[arg(long, default_value_t = 5)]
        cols: u64,
    },
    /// Subalgebra generated by the given elements.
    Closure {
        generators: Vec<String>,
        /// Products above this value are not explored (l/r only if omitted).
        #[arg(long)]
        ceiling: Option<String>,
    },
}

#[derive(Subcommand)]
enum Jw1 {
    Left {
        o: String,
        #[arg(long)]
        stages: Option<u64>,
    },
    Right {
        o: String,
        #[arg(long)]
        stages: Option<u64>,
    },
    Mul {
        p: String,
        q: String,
        #[arg(long)]
        stages: Option<u64>,
    },
    /// Descent path from an element to its limit part.
    Descent {
        o: String,
    },
    Verify {
        #[arg(long, default_value_t = 4)]
        stages: u64,
        #[arg(long, default_value_t = 64)]
        window: u64,
    },
    Dump {
        #[arg(long, default_value_t = 2)]
        stages: u64,
        #[arg(long, default_value_t = 16)]
        window: u64,
    },
    Closure {
        generators: Vec<String>,
        #[arg(long)]
        stages: Option<u64>,
        #[arg(long)]
        ceiling: Option<String>,
    },
}

enum Status {
    Ok,
    Negative,
}

/// A usage or parse error, shown with the offending input.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn caret(input: &str, offset: usize, message: impl std::fmt::Display) -> anyhow::Error {
    let col = input.get(..offset).map_or(offset, |s| s.chars().count());
    anyhow!(Usage(format!("{message}\n  {input}\n  {}^", " ".repeat(col))))
}

fn parse_term(s: &str) -> Result<Term> {
    parse(s).map_err(|e: ParseError| caret(s, e.offset, e))
}

fn parse_id(s: &str) -> Result<Identity> {
    parse_identity(s).map_err(|e| caret(s, e.offset, e))
}

fn parse_ord(s: &str) -> Result<Ordinal> {
    s.parse::<Ordinal>().map_err(|e| caret(s, e.offset, e))
}

fn parse_nat(s: &str) -> Result<num_bigint::BigUint> {
    JOmega.parse_element(s).map_err(|e| anyhow!(Usage(e.to_string())))
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

struct Ctx {
    format: Format,
    seed: u64,
    budget: Option<usize>,
    exec: Exec,
}

impl Ctx {
    fn no_csv(&self) -> Result<()> {
        if self.format == Format::Csv {
            bail!(usage("csv output is only available for `jw table` and `jw1 dump`"));
        }
        Ok(())
    }

    fn emit(&self, text: impl std::fmt::Display, value: Value) {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json")),
            _ => println!("{text}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        format: cli.format,
        seed: cli.seed,
        budget: cli.budget,
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    match run(&ctx, cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Ok
    } else {
        Status::Negative
    }
}

fn run(ctx: &Ctx, command: Command) -> Result<Status> {
    match command {
        Command::Jw(Jw::Table { rows, cols }) => return jw_table_cmd(ctx, rows, cols),
        Command::Jw1(Jw1::Dump { stages, window }) => return dump_cmd(ctx, stages, window),
        _ => ctx.no_csv()?,
    }
    match command {
        Command::Decide { identity, proof } => decide_cmd(ctx, &identity, proof),
        Command::Normalize { term, proof } => {
            let t = parse_term(&term)?;
            let (n, d) = normalize(&t);
            let mut text = n.to_string();
            let mut value = json!({"term": t.to_string(), "normal_form": n.to_string(), "mult_count": mult_count(&n)});
            if proof {
                write!(text, "\n{}", d.to_json())?;
                value["proof"] = d.to_json_value();
            }
            ctx.emit(text, value);
            Ok(Status::Ok)
        }
        Command::CheckProof { file } => check_proof_cmd(ctx, &file),
        Command::Eval { term, bindings, stages } => eval_cmd(ctx, &term, &bindings, stages),
        Command::Axioms { probe, stages, window } => {
            if probe == 0 {
                bail!(usage("--probe must be at least 1"));
            }
            let report = match stages {
                None => check_axioms_with(&JOmega, probe, ctx.exec)?,
                Some(k) => {
                    let table = StageTable::new(k);
                    check_axioms_with(&StageAlgebra::new(&table, window), probe, ctx.exec)?
                }
            };
            let mut text = format!("checked {} instances, {} violations", report.checked, report.violations.len());
            for v in &report.violations {
                write!(text, "\n  {} at ({})", v.axiom, v.witness.join(", "))?;
            }
            ctx.emit(text, serde_json::to_value(&report)?);
            Ok(status(report.passed()))
        }
        Command::Survey { max_size } => survey_cmd(ctx, max_size),
        Command::Jw(cmd) => jw_cmd(ctx, cmd),
        Command::Jw1(cmd) => jw1_cmd(ctx, cmd),
    }
}

fn decide_cmd(ctx: &Ctx, identity: &str, proof: bool) -> Result<Status> {
    let id = parse_id(identity)?;
    let verdict = decide(&id);
    let mut value = verdict.to_json(&id);
    let mut text = verdict.name().to_string();
    if proof {
        write!(text, "\n{}", verdict.derivation().to_json())?;
    } else {
        value.as_object_mut().expect("object").remove("proof");
    }
    ctx.emit(text, value);
    Ok(status(verdict.is_entailed()))
}

fn read_input(file: &PathBuf) -> Result<String> {
    if file.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(file)
            .with_context(|| format!("reading {}", file.display()))
            .map_err(|e| usage(format!("{e:#}")))
    }
}

fn check_proof_cmd(ctx: &Ctx, file: &PathBuf) -> Result<Status> {
    let text = read_input(file)?;
    // text-mode `decide --proof` output starts with the verdict word
    let (claimed, body) = match text.trim_start().split_once('\n') {
        Some((first, rest)) if matches!(first.trim(), "Entailed" | "Collapsing") => (Some(first.trim()), rest),
        _ => (None, text.as_str()),
    };
    let v: Value = serde_json::from_str(body).map_err(|e| usage(format!("malformed JSON: {e}")))?;
    let wrapped = v.get("proof").is_some();
    let (identity, verdict_name, d) = if wrapped {
        let id = v["identity"].as_str().ok_or_else(|| usage("`identity` must be a string"))?;
        let name = v["verdict"].as_str().ok_or_else(|| usage("`verdict` must be a string"))?;
        let d = Derivation::from_json_value(v["proof"].clone()).map_err(|e| usage(e.to_string()))?;
        (Some(parse_id(id)?), Some(name.to_string()), d)
    } else {
        let d = Derivation::from_json_value(v).map_err(|e| usage(e.to_string()))?;
        (None, claimed.map(str::to_string), d)
    };
    let result = match (&identity, verdict_name.as_deref()) {
        (Some(id), Some(name)) => {
            let verdict = match name {
                "Entailed" => Verdict::Entailed(d.clone()),
                "Collapsing" => Verdict::Collapsing(d.clone()),
                other => bail!(usage(format!("unknown verdict `{other}`"))),
            };
            check_verdict(id, &verdict).and_then(|()| check_derivation(&d, d.hypothesis.as_ref()))
        }
        (_, name) => check_derivation(&d, d.hypothesis.as_ref()).and_then(|proved| {
            let collapse = matches!((&proved.lhs, &proved.rhs), (Term::Var(a), Term::Var(b)) if a != b)
                && d.hypothesis.is_some();
            match name {
                Some("Collapsing") if !collapse => Err(jtalg::term::check::CheckFailure {
                    step: None,
                    reason: format!("claimed a collapse but proves {proved}"),
                }),
                Some("Entailed") if d.hypothesis.is_some() => Err(jtalg::term::check::CheckFailure {
                    step: None,
                    reason: "claimed entailment but the derivation uses a hypothesis".into(),
                }),
                _ => Ok(proved),
            }
        }),
    };
    match result {
        Ok(proved) => {
            ctx.emit(
                format!("valid: {proved}"),
                json!({"valid": true, "proves": proved.to_string(), "hypothesis": d.hypothesis.as_ref().map(|h| h.to_string())}),
            );
            Ok(Status::Ok)
        }
        Err(f) => {
            ctx.emit(format!("invalid: {f}"), json!({"valid": false, "step": f.step, "reason": f.reason}));
            Ok(Status::Negative)
        }
    }
}

fn bindings<E>(raw: &[String], mut elem: impl FnMut(&str) -> Result<E>) -> Result<Assignment<E>> {
    let mut env = Assignment::new();
    for b in raw {
        let (k, v) = b.split_once('=').ok_or_else(|| usage(format!("binding `{b}` is not of the form VAR=VALUE")))?;
        env.insert(k.trim().to_string(), elem(v.trim())?);
    }
    Ok(env)
}

fn eval_cmd(ctx: &Ctx, term: &str, raw: &[String], stages: Option<u64>) -> Result<Status> {
    let t = parse_term(term)?;
    let value = match stages {
        None => {
            let env = bindings(raw, parse_nat)?;
            evaluate(&t, &JOmega, &env).map_err(|e| usage(e.to_string()))?.to_string()
        }
        Some(k) => {
            let table = StageTable::new(k);
            let alg = StageAlgebra::new(&table, 0);
            let env = bindings(raw, |s| alg.parse_element(s).map_err(|e| usage(e.to_string())))?;
            eval_stage(&t, &table, &env)?.to_string()
        }
    };
    ctx.emit(&value, json!({"term": t.to_string(), "value": value}));
    Ok(Status::Ok)
}

fn eval_stage(t: &Term, table: &StageTable, env: &Assignment<Ordinal>) -> Result<Ordinal> {
    Ok(match t {
        Term::Var(x) => *env.get(x).ok_or_else(|| usage(format!("variable `{x}` is not bound")))?,
        Term::Mul(a, b) => table.mul(eval_stage(a, table, env)?, eval_stage(b, table, env)?)?,
        Term::L(a) => table.left(eval_stage(a, table, env)?)?,
        Term::R(a) => table.right(eval_stage(a, table, env)?)?,
    })
}

fn survey_cmd(ctx: &Ctx, max_size: usize) -> Result<Status> {
    let count = ctx.budget.unwrap_or(1000);
    let ids: Vec<Identity> = Corpus::new(ctx.seed, max_size).take(count).collect();
    let results = ctx.exec.map_slice(&ids, |id| {
        let v = decide(id);
        (v.is_entailed(), check_verdict(id, &v).err().map(|f| format!("{id}: {f}")))
    });
    let entailed = results.iter().filter(|r| r.0).count();
    let failures: Vec<String> = results.into_iter().filter_map(|r| r.1).collect();
    let text = format!(
        "{count} identities (seed {}): {entailed} entailed, {} collapsing, {} certificate failures",
        ctx.seed,
        count - entailed,
        failures.len()
    );
    let value = json!({
        "seed": ctx.seed, "count": count, "max_size": max_size,
        "entailed": entailed, "collapsing": count - entailed, "failures": failures,
    });
    ctx.emit(text, value);
    Ok(status(failures.is_empty()))
}

fn jw_table_cmd(ctx: &Ctx, rows: u64, cols: u64) -> Result<Status> {
    let table = jw_table(rows, cols);
    let cells: Vec<Vec<String>> = table.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
    match ctx.format {
        Format::Json => ctx.emit("", json!(cells)),
        Format::Csv => {
            let header: Vec<String> = (0..cols).map(|c| c.to_string()).collect();
            println!("p,{}", header.join(","));
            for (p, r) in cells.iter().enumerate() {
                println!("{p},{}", r.join(","));
            }
        }
        Format::Text => {
            let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
            for r in &cells {
                let line: Vec<String> = r.iter().map(|v| format!("{v:>width$}")).collect();
                println!("{}", line.join(" "));
            }
        }
    }
    Ok(Status::Ok)
}

fn jw_cmd(ctx: &Ctx, cmd: Jw) -> Result<Status> {
    match cmd {
        Jw::Mul { p, q } => {
            let v = JOmega.mul(&parse_nat(&p)?, &parse_nat(&q)?);
            ctx.emit(&v, json!({"p": p, "q": q, "value": v.to_string()}));
        }
        Jw::Unpair { n } => {
            let (p, q) = jw_unpair(&parse_nat(&n)?);
            ctx.emit(format!("{p} {q}"), json!({"n": n, "left": p.to_string(), "right": q.to_string()}));
        }
        Jw::Descent { n } => {
            let path: Vec<String> = jw_descent(&parse_nat(&n)?).iter().map(|v| v.to_string()).collect();
            ctx.emit(path.join(" "), json!(path));
        }
        Jw::Verify { bound, pair_bound } => {
            if bound < 3 {
                bail!(usage("--bound must be at least 3"));
            }
            let report = jw_verify(bound, pair_bound.unwrap_or(bound.min(2000)), ctx.exec);
            let mut text = format!(
                "{}: {} values, {} pairs (p+q <= {}), {} failures",
                if report.passed() { "verified" } else { "FAILED" },
                report.values_checked,
                report.pairs_checked,
                report.pair_bound,
                report.failure_count
            );
            for f in &report.failures {
                write!(text, "\n  {} at {}", f.check, f.witness)?;
            }
            ctx.emit(text, serde_json::to_value(&report)?);
            return Ok(status(report.passed()));
        }
        Jw::Closure { generators, ceiling } => {
            let gens = generators.iter().map(|g| parse_nat(g)).collect::<Result<Vec<_>>>()?;
            let budget = ClosureBudget {
                max_elements: ctx.budget.unwrap_or(100_000),
                product_ceiling: ceiling.as_deref().map(parse_nat).transpose()?,
            };
            let c = closure(&JOmega, &gens, budget).map_err(|e| usage(e.to_string()))?;
            emit_closure(ctx, c.sorted(), c.truncated());
        }
        Jw::Table { .. } => unreachable!("handled before the csv check"),
    }
    Ok(Status::Ok)
}

fn emit_closure<E: std::fmt::Display>(ctx: &Ctx, elems: Vec<E>, truncated: bool) {
    let items: Vec<String> = elems.iter().map(|e| e.to_string()).collect();
    let text = format!("{}{}", items.join(" "), if truncated { "\n(truncated)" } else { "" });
    ctx.emit(text, json!({"elements": items, "truncated": truncated}));
}

fn stage_table_for(stages: Option<u64>, elems: &[Ordinal]) -> Result<StageTable> {
    let needed = elems.iter().map(|o| o.limit + 1).max().unwrap_or(1);
    let k = stages.unwrap_or(needed);
    if let Some(o) = elems.iter().find(|o| o.limit >= k) {
        bail!(usage(format!("{o} is not below w*{k}")));
    }
    Ok(StageTable::new(k))
}

fn check_size(stages: u64, window: u64) -> Result<()> {
    if stages == 0 {
        bail!(usage("--stages must be at least 1"));
    }
    if stages.saturating_mul(window) > 1 << 14 {
        bail!(usage("stages * window is limited to 16384"));
    }
    Ok(())
}

fn dump_cmd(ctx: &Ctx, stages: u64, window: u64) -> Result<Status> {
    check_size(stages, window)?;
    let rows = stage::dump(stages, window)?;
    match ctx.format {
        Format::Csv => print!("{}", stage::dump_csv(&rows)),
        Format::Json => ctx.emit("", json!({"stages": stages, "window": window, "cells": rows})),
        Format::Text => {
            for r in &rows {
                println!("{} * {} = {} ({}, region {})", r.row, r.col, r.value, r.kind, r.region);
            }
        }
    }
    Ok(Status::Ok)
}

fn jw1_cmd(ctx: &Ctx, cmd: Jw1) -> Result<Status> {
    match cmd {
        Jw1::Left { o, stages } => {
            let o = parse_ord(&o)?;
            let v = stage_table_for(stages, &[o])?.left(o)?;
            ctx.emit(v, json!({"element": o, "left": v}));
        }
        Jw1::Right { o, stages } => {
            let o = parse_ord(&o)?;
            let v = stage_table_for(stages, &[o])?.right(o)?;
            ctx.emit(v, json!({"element": o, "right": v}));
        }
        Jw1::Mul { p, q, stages } => {
            let (p, q) = (parse_ord(&p)?, parse_ord(&q)?);
            let v = stage_table_for(stages, &[p, q])?.mul(p, q)?;
            ctx.emit(v, json!({"p": p, "q": q, "value": v}));
        }
        Jw1::Descent { o } => {
            let o = parse_ord(&o)?;
            let path = stage::descent(o).map_err(|e| usage(e.to_string()))?;
            let items: Vec<String> = path.iter().map(|v| v.to_string()).collect();
            ctx.emit(items.join(" "), json!(items));
        }
        Jw1::Verify { stages, window } => {
            check_size(stages, window)?;
            let report = stage::verify_stage(stages, window, ctx.exec).map_err(|e| usage(e.to_string()))?;
            let mut text = format!(
                "{}: stages {stages}, window {window}",
                if report.passed() { "verified" } else { "FAILED" }
            );
            for c in &report.checks {
                write!(
                    text,
                    "\n  {:<17} {:>8} checked  {}",
                    c.name,
                    c.checked,
                    if c.passed() { "ok".to_string() } else { format!("{} failures", c.failure_count) }
                )?;
                for f in &c.failures {
                    write!(text, "\n    {f}")?;
                }
            }
            write!(
                text,
                "\n  most even cells in one region: {} (at most one: {})",
                report.max_even_per_region, report.at_most_one_even_per_region
            )?;
            ctx.emit(text, serde_json::to_value(&report)?);
            return Ok(status(report.passed()));
        }
        Jw1::Closure { generators, stages, ceiling } => {
            let gens = generators.iter().map(|g| parse_ord(g)).collect::<Result<Vec<_>>>()?;
            let ceiling = ceiling.as_deref().map(parse_ord).transpose()?;
            let mut all = gens.clone();
            all.extend(ceiling);
            let table = stage_table_for(stages, &all)?;
            if ceiling.is_some() && (table.stages() > 1 << 10 || all.iter().any(|o| o.offset >= 1 << 16)) {
                bail!(usage("closures with products need offsets below 2^16 and at most 1024 stages"));
            }
            let budget = ClosureBudget {
                max_elements: ctx.budget.unwrap_or(100_000),
                product_ceiling: ceiling,
            };
            let c = closure(&StageAlgebra::new(&table, 0), &gens, budget).map_err(|e| usage(e.to_string()))?;
            emit_closure(ctx, c.sorted(), c.truncated());
        }
        Jw1::Dump { .. } => unreachable!("handled before the csv check"),
    }
    Ok(Status::Ok)
}
