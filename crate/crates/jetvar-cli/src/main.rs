//! `jetvar`: batch driver for the jet-variational library.

mod commands;
mod decl;
mod render;

use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail};
use clap::{Parser, ValueEnum};
use jetvar_core::io::FormBasis;

use commands::{execute, Options, Report, Value};
use decl::{parse_json, parse_text, Raw, Workspace};
use render::{render, warnings, Format};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Basis {
    Theta,
    Dy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DeclFormat {
    Text,
    Json,
}

/// Symbolic calculus on jet manifolds: variational bicomplex, connections,
/// gauge theory and BRST.
///
/// The first positional argument is the command; a following argument that
/// names an existing file (or ends in `.decl` or `.json`) is the declaration
/// file, the rest are object names. `jetvar run FILE` executes the file's
/// `run` statements.
#[derive(Debug, Parser)]
#[command(name = "jetvar", version)]
struct Cli {
    /// el, trivial, helmholtz, legendre, poincare-cartan, first-variation, noether,
    /// d, dh, dv, delta, tau, antiderivative, curvature, torsion, levi-civita,
    /// riemann, ricci, ym, brst, check, run or convert.
    command: String,
    args: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Basis for contact factors in printed forms.
    #[arg(long, value_enum, default_value_t = Basis::Theta)]
    basis: Basis,
    /// Negate Christoffel symbols for comparison with physics references.
    #[arg(long)]
    physics_sign: bool,
    /// Warn on stderr when a result exceeds this jet order.
    #[arg(long)]
    max_order: Option<usize>,
    /// Exit with status 2 unless the named result vanishes.
    #[arg(long, value_name = "NAME")]
    assert_zero: Vec<String>,
    /// Gauge algebra when no gauge theory is declared: u1, su2, so3, or a declared algebra.
    #[arg(long)]
    algebra: Option<String>,
    /// Base dimension when no declaration file is given.
    #[arg(long)]
    dim: Option<usize>,
    /// Metric for gauge commands: lorentzian, euclidean, or a declared metric.
    #[arg(long)]
    metric: Option<String>,
    /// Coupling constant ε of the Yang-Mills Lagrangian.
    #[arg(long)]
    coupling: Option<String>,
    /// Restrict `brst` output to an identity check (nilpotency).
    #[arg(long)]
    check: Option<String>,
    /// Module for `check nilpotency`: all, bicomplex, variational or brst.
    #[arg(long)]
    module: Option<String>,
    /// Number of random samples per property in `check`.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    /// Target format for `convert`.
    #[arg(long, value_enum, default_value_t = DeclFormat::Json)]
    to: DeclFormat,
}

fn is_file_arg(s: &str) -> bool {
    s.ends_with(".decl") || s.ends_with(".json") || Path::new(s).is_file()
}

fn read_raw(path: &str) -> anyhow::Result<Raw> {
    let src = std::fs::read_to_string(path).map_err(|e| anyhow!("cannot read `{path}`: {e}"))?;
    let raw = if path.ends_with(".json") { parse_json(&src) } else { parse_text(&src) };
    raw.map_err(|e| e.context(path.to_string()))
}

fn load(path: &str) -> anyhow::Result<Workspace> {
    let raw = read_raw(path)?;
    Workspace::build(&raw).map_err(|e| e.context(path.to_string()))
}

/// Outcome of a run: rendered output and whether an identity failed.
struct Outcome {
    output: String,
    failures: Vec<String>,
}

fn is_zero(v: &Value) -> bool {
    match v {
        Value::Expr(e) | Value::Equation(e) => e.is_empty(),
        Value::Form(f) => f.is_zero_exact(),
        Value::Rational(q) => q.as_ref().is_some_and(|q| *q == jetvar_core::kernel::int(0)),
        Value::Bool(b) | Value::Check(b) => *b,
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    if cli.command == "convert" {
        let [path] = cli.args.as_slice() else { bail!("usage: jetvar convert FILE [--to json|text]") };
        let raw = read_raw(path)?;
        Workspace::build(&raw).map_err(|e| e.context(path.to_string()))?;
        let output = match cli.to {
            DeclFormat::Json => serde_json::to_string_pretty(&raw)? + "\n",
            DeclFormat::Text => raw.to_text(),
        };
        return Ok(Outcome { output, failures: vec![] });
    }
    let (file, names): (Option<&str>, Vec<String>) = match cli.args.iter().position(|a| is_file_arg(a)) {
        Some(k) => {
            let mut rest = cli.args.clone();
            rest.remove(k);
            (Some(cli.args[k].as_str()), rest)
        }
        None => (None, cli.args.clone()),
    };
    let mut ws = match file {
        Some(p) => load(p)?,
        None if cli.command == "run" => bail!("usage: jetvar run FILE"),
        None => Workspace::build(&Raw::default())?,
    };
    if let Some(k) = cli.max_order {
        ws.ctx.max_order = Some(k);
        if let Some(g) = &mut ws.gauge {
            g.gauge.ctx.max_order = Some(k);
        }
    }
    let opts = Options {
        physics_sign: cli.physics_sign,
        algebra: cli.algebra.clone(),
        dim: cli.dim,
        metric: cli.metric.clone(),
        coupling: cli.coupling.clone(),
        check: cli.check.clone(),
        module: cli.module.clone(),
        samples: cli.samples,
    };
    let batches: Vec<Vec<String>> = if cli.command == "run" {
        if !names.is_empty() {
            bail!("usage: jetvar run FILE");
        }
        if ws.commands.is_empty() {
            bail!("the declaration file has no `run` statements");
        }
        ws.commands.clone()
    } else {
        let mut words = vec![cli.command.clone()];
        words.extend(names);
        vec![words]
    };
    let reports: Vec<Report> = batches.iter().map(|w| execute(&ws, w, &opts)).collect::<anyhow::Result<_>>()?;
    for w in warnings(&reports) {
        eprintln!("warning: {w}");
    }
    let mut failures: Vec<String> =
        reports.iter().flat_map(|r| r.failed_checks().into_iter().map(|n| format!("identity `{n}` failed"))).collect();
    for name in &cli.assert_zero {
        let found: Vec<&Value> = reports.iter().flat_map(|r| r.items.iter()).filter(|i| &i.name == name).map(|i| &i.value).collect();
        if found.is_empty() {
            bail!("--assert-zero: no result named `{name}`");
        }
        if !found.into_iter().all(is_zero) {
            failures.push(format!("`{name}` is not zero"));
        }
    }
    let basis = match cli.basis {
        Basis::Theta => FormBasis::Theta,
        Basis::Dy => FormBasis::Dy,
    };
    Ok(Outcome { output: render(&reports, cli.format, basis), failures })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.output);
            for f in &out.failures {
                eprintln!("error: {f}");
            }
            if out.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {}", format_error(&e));
            ExitCode::from(1)
        }
    }
}

/// `path:line:col: msg` for parse errors, the full context chain otherwise.
fn format_error(e: &anyhow::Error) -> String {
    let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
    if chain.len() == 2 && e.downcast_ref::<jetvar_core::Error>().is_some() {
        return format!("{}:{}", chain[0], chain[1]);
    }
    chain.join(": ")
}
