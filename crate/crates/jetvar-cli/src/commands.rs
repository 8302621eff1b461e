//! Command dispatch: each command turns a workspace into a [`Report`].

use anyhow::{anyhow, bail, Context};
use jetvar_core::connections::{levi_civita, physics_sign, ricci, world_curvature, Connection, Metric};
use jetvar_core::corpus::Corpus;
use jetvar_core::forms::Form;
use jetvar_core::gauge::{GaugeContext, LieAlgebra};
use jetvar_core::graded::BrstContext;
use jetvar_core::kernel::Rational;
use jetvar_core::tangent::TangentValuedForm;
use jetvar_core::variational::{
    first_variational_formula, helmholtz_check, horizontal_antiderivative, is_variationally_trivial, legendre_map,
    noether_current, poincare_cartan, tau, variational_delta, variational_derivatives, Lagrangian,
};
use jetvar_core::{Expr, JetContext};

use crate::decl::{GaugeDecl, Workspace};

#[derive(Clone, Debug)]
pub enum Value {
    Expr(Expr),
    /// An expression printed as `… = 0`.
    Equation(Expr),
    Form(Form),
    Rational(Option<Rational>),
    Bool(bool),
    /// An identity that must hold; failures give exit code 2.
    Check(bool),
}

#[derive(Clone, Debug)]
pub struct Item {
    pub name: String,
    pub value: Value,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: Vec<String>,
    pub ctx: JetContext,
    pub items: Vec<Item>,
}

impl Report {
    fn new(command: &[String], ctx: &JetContext) -> Self {
        Report { command: command.to_vec(), ctx: ctx.clone(), items: Vec::new() }
    }

    fn push(&mut self, name: impl Into<String>, value: Value) {
        self.items.push(Item { name: name.into(), value });
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.items.iter().filter(|i| matches!(i.value, Value::Check(false))).map(|i| i.name.as_str()).collect()
    }
}

/// Settings that are not part of a declaration file.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub physics_sign: bool,
    pub algebra: Option<String>,
    pub dim: Option<usize>,
    pub metric: Option<String>,
    pub coupling: Option<String>,
    pub check: Option<String>,
    pub module: Option<String>,
    pub samples: usize,
}

pub const COMMANDS: &[&str] = &[
    "el",
    "trivial",
    "helmholtz",
    "legendre",
    "poincare-cartan",
    "first-variation",
    "noether",
    "d",
    "dh",
    "dv",
    "delta",
    "tau",
    "antiderivative",
    "curvature",
    "torsion",
    "levi-civita",
    "riemann",
    "ricci",
    "ym",
    "brst",
    "check",
];

fn arg(args: &[String], k: usize) -> Option<&str> {
    args.get(k).map(String::as_str)
}

fn max_args(cmd: &str, args: &[String], k: usize) -> anyhow::Result<()> {
    if args.len() > k {
        bail!("too many arguments for `{cmd}`");
    }
    Ok(())
}

pub fn execute(ws: &Workspace, words: &[String], opts: &Options) -> anyhow::Result<Report> {
    let (cmd, args) = words.split_first().ok_or_else(|| anyhow!("missing command"))?;
    let ctx = &ws.ctx;
    let n = ctx.n;
    let mut r = Report::new(words, ctx);
    match cmd.as_str() {
        "el" => {
            max_args(cmd, args, 1)?;
            let (_, l) = Workspace::pick(&ws.lagrangians, arg(args, 0), "lagrangian")?;
            for (i, e) in variational_derivatives(ctx, l).into_iter().enumerate() {
                r.push(format!("E[{}]", ctx.fields[i].name), Value::Equation(e));
            }
        }
        "trivial" => {
            max_args(cmd, args, 1)?;
            let (_, l) = Workspace::pick(&ws.lagrangians, arg(args, 0), "lagrangian")?;
            r.push("trivial", Value::Bool(is_variationally_trivial(ctx, &Lagrangian::new(l.clone(), n))));
        }
        "helmholtz" => {
            max_args(cmd, args, 1)?;
            let f = source_arg(ws, arg(args, 0))?;
            r.push("locally_variational", Value::Bool(helmholtz_check(n, &f)?));
        }
        "legendre" => {
            max_args(cmd, args, 1)?;
            let (_, l) = Workspace::pick(&ws.lagrangians, arg(args, 0), "lagrangian")?;
            let (p, frame) = legendre_map(ctx, &Lagrangian::new(l.clone(), n))?;
            for (lam, row) in p.into_iter().enumerate() {
                for (i, e) in row.into_iter().enumerate() {
                    r.push(format!("p[{},{}]", ctx.fields[i].name, ctx.coords[lam]), Value::Expr(e));
                }
            }
            r.push("H", Value::Expr(frame));
        }
        "poincare-cartan" => {
            max_args(cmd, args, 1)?;
            let (_, l) = Workspace::pick(&ws.lagrangians, arg(args, 0), "lagrangian")?;
            r.push("Theta", Value::Form(poincare_cartan(ctx, &Lagrangian::new(l.clone(), n))?));
        }
        "first-variation" => {
            max_args(cmd, args, 2)?;
            let (_, l) = Workspace::pick(&ws.lagrangians, arg(args, 0), "lagrangian")?;
            let (_, u) = Workspace::pick(&ws.vectors, arg(args, 1), "vector")?;
            let fv = first_variational_formula(ctx, &Lagrangian::new(l.clone(), n), u)?;
            r.push("lie", Value::Expr(fv.lie_term.clone()));
            r.push("el", Value::Expr(fv.el_term.clone()));
            r.push("boundary", Value::Expr(fv.boundary_term.clone()));
            for (lam, e) in fv.current.iter().enumerate() {
                r.push(format!("J[{}]", ctx.coords[lam]), Value::Expr(e.clone()));
            }
            r.push("residual", Value::Expr(fv.residual()));
            r.push("identity", Value::Check(fv.holds()));
        }
        "noether" => {
            max_args(cmd, args, 2)?;
            let (_, l) = Workspace::pick(&ws.lagrangians, arg(args, 0), "lagrangian")?;
            let (_, u) = Workspace::pick(&ws.vectors, arg(args, 1), "vector")?;
            let lag = Lagrangian::new(l.clone(), n);
            let nc = noether_current(ctx, &lag, u)?;
            for (lam, e) in nc.current.iter().enumerate() {
                r.push(format!("T[{}]", ctx.coords[lam]), Value::Expr(e.clone()));
            }
            r.push("divergence", Value::Expr(nc.divergence.clone()));
            r.push("lie", Value::Expr(nc.lie_term.clone()));
            r.push("weak_conservation", Value::Check(nc.weak_law_holds(ctx, &lag)));
        }
        "d" | "dh" | "dv" | "delta" | "tau" => {
            max_args(cmd, args, 1)?;
            let f = form_arg(ws, arg(args, 0))?;
            let out = match cmd.as_str() {
                "d" => f.d(n),
                "dh" => f.d_h(n),
                "dv" => f.d_v(),
                "delta" => variational_delta(n, &f)?,
                _ => tau(n, &f)?,
            };
            r.push(cmd.clone(), Value::Form(out));
        }
        "antiderivative" => {
            max_args(cmd, args, 1)?;
            let f = form_arg(ws, arg(args, 0))?;
            let a = horizontal_antiderivative(n, &f)?;
            let back = &a.xi.d_h(n) + &a.obstruction;
            r.push("xi", Value::Form(a.xi));
            r.push("obstruction", Value::Form(a.obstruction));
            r.push("reapplied", Value::Check(back == f));
        }
        "curvature" => {
            max_args(cmd, args, 1)?;
            let (_, g) = Workspace::pick(&ws.connections, arg(args, 0), "connection")?;
            let c = Connection::general(ctx, g.clone())?;
            tangent_items(&mut r, ctx, "R", &c.curvature(ctx));
        }
        "torsion" => {
            max_args(cmd, args, 2)?;
            let (_, g) = Workspace::pick(&ws.connections, arg(args, 0), "connection")?;
            let (_, s) = Workspace::pick(&ws.solderings, arg(args, 1), "soldering")?;
            let c = Connection::general(ctx, g.clone())?;
            tangent_items(&mut r, ctx, "T", &c.torsion(ctx, s));
        }
        "levi-civita" => {
            max_args(cmd, args, 1)?;
            let (_, m) = Workspace::pick(&ws.metrics, arg(args, 0), "metric")?;
            let mut k = levi_civita(m);
            if opts.physics_sign {
                k = physics_sign(&k);
            }
            let mut any = false;
            for nu in 0..n {
                for l in 0..n {
                    for mu in l..n {
                        let e = &k[l][nu][mu];
                        if !e.is_empty() {
                            any = true;
                            let name = format!("K[{};{},{}]", ctx.coords[nu], ctx.coords[l], ctx.coords[mu]);
                            r.push(name, Value::Expr(e.clone()));
                        }
                    }
                }
            }
            if !any {
                r.push("K", Value::Expr(Expr::zero()));
            }
        }
        "riemann" => {
            max_args(cmd, args, 1)?;
            let (_, m) = Workspace::pick(&ws.metrics, arg(args, 0), "metric")?;
            let rm = world_curvature(&levi_civita(m));
            let mut any = false;
            for (l, a) in rm.iter().enumerate() {
                for (mu, b) in a.iter().enumerate().skip(l + 1) {
                    for (i, row) in b.iter().enumerate() {
                        for (j, e) in row.iter().enumerate() {
                            if !e.is_empty() {
                                any = true;
                                let c = &ctx.coords;
                                r.push(format!("R[{},{};{},{}]", c[l], c[mu], c[i], c[j]), Value::Expr(e.clone()));
                            }
                        }
                    }
                }
            }
            if !any {
                r.push("R", Value::Expr(Expr::zero()));
            }
        }
        "ricci" => {
            max_args(cmd, args, 1)?;
            let (_, m) = Workspace::pick(&ws.metrics, arg(args, 0), "metric")?;
            let ric = ricci(&world_curvature(&levi_civita(m)));
            for (a, row) in ric.into_iter().enumerate() {
                for (b, e) in row.into_iter().enumerate().skip(a) {
                    r.push(format!("Ric[{},{}]", ctx.coords[a], ctx.coords[b]), Value::Expr(e));
                }
            }
        }
        "ym" => return yang_mills(ws, words, opts),
        "brst" => return brst(ws, words, opts),
        "check" => return check(ws, words, opts),
        _ => bail!("unknown command `{cmd}`; expected one of {}", COMMANDS.join(", ")),
    }
    Ok(r)
}

/// A form argument: a declared form, or a Lagrangian or expression as a
/// scalar times the volume form.
fn form_arg(ws: &Workspace, name: Option<&str>) -> anyhow::Result<Form> {
    if let Some(name) = name {
        if let Some(f) = ws.forms.get(name) {
            return Ok(f.clone());
        }
        if let Some(l) = ws.lagrangians.get(name) {
            return Ok(Lagrangian::new(l.clone(), ws.ctx.n).form());
        }
        if let Some(e) = ws.exprs.get(name) {
            return Ok(Form::scalar(e.clone()));
        }
        bail!("no form, lagrangian or expression named `{name}`");
    }
    Ok(Workspace::pick(&ws.forms, None, "form")?.1.clone())
}

/// A source form: a declared form, or the Euler–Lagrange form of a Lagrangian.
fn source_arg(ws: &Workspace, name: Option<&str>) -> anyhow::Result<Form> {
    if let Some(l) = name.and_then(|n| ws.lagrangians.get(n)) {
        let lag = Lagrangian::new(l.clone(), ws.ctx.n);
        return Ok(jetvar_core::variational::euler_lagrange(&ws.ctx, &lag));
    }
    match name {
        Some(n) => ws.forms.get(n).cloned().ok_or_else(|| anyhow!("no form or lagrangian named `{n}`")),
        None => Ok(Workspace::pick(&ws.forms, None, "form")?.1.clone()),
    }
}

fn tangent_items(r: &mut Report, ctx: &JetContext, head: &str, t: &TangentValuedForm) {
    let mut any = false;
    for (k, mu, e) in t.components() {
        if e.is_empty() {
            continue;
        }
        any = true;
        let target = if mu < ctx.n { ctx.coords[mu].clone() } else { ctx.fields[mu - ctx.n].name.clone() };
        let slots: Vec<String> = k
            .iter()
            .map(|&z| {
                let z = z as usize;
                if z < ctx.n {
                    format!("dx[{}]", ctx.coords[z])
                } else {
                    format!("dy[{}]", ctx.fields[z - ctx.n].name)
                }
            })
            .collect();
        r.push(format!("{head}[{target};{}]", slots.join(",")), Value::Expr(e.clone()));
    }
    if !any {
        r.push(head, Value::Expr(Expr::zero()));
    }
}

/// Gauge theory from the declaration file or, failing that, from flags.
fn gauge_setup(ws: &Workspace, opts: &Options) -> anyhow::Result<(GaugeDecl, Metric)> {
    let flags = opts.algebra.is_some() || opts.dim.is_some();
    if let Some(g) = &ws.gauge {
        if flags {
            bail!("the declaration file already declares a gauge theory; drop --algebra/--dim");
        }
        let metric = match &g.metric {
            Some(m) => ws.metrics[m].clone(),
            None => named_metric(opts.metric.as_deref(), ws.ctx.n)?,
        };
        return Ok((g.clone(), metric));
    }
    let name = opts.algebra.as_deref().ok_or_else(|| anyhow!("no gauge theory declared; pass --algebra"))?;
    let alg = ws
        .algebras
        .get(name)
        .cloned()
        .or_else(|| LieAlgebra::by_name(name))
        .ok_or_else(|| anyhow!("unknown algebra `{name}`"))?;
    let n = opts.dim.unwrap_or(if ws.ctx.n > 0 { ws.ctx.n } else { 4 });
    let mut gc = GaugeContext::new(alg, n)?;
    if ws.ctx.n == n {
        gc.ctx.coords = ws.ctx.coords.clone();
    }
    gc.ctx.max_order = ws.ctx.max_order;
    let coupling = match &opts.coupling {
        Some(c) => jetvar_core::io::parse_expr(&JetContext::new(0), c, 1)?
            .as_constant()
            .ok_or_else(|| anyhow!("--coupling must be a rational constant"))?,
        None => Rational::from_integer(1.into()),
    };
    let metric = match opts.metric.as_deref() {
        Some(m) if ws.metrics.contains_key(m) => ws.metrics[m].clone(),
        m => named_metric(m, n)?,
    };
    Ok((GaugeDecl { gauge: gc, metric: None, coupling }, metric))
}

/// `lorentzian` is diag(1, −1, …, −1); `euclidean` the identity.
fn named_metric(name: Option<&str>, n: usize) -> anyhow::Result<Metric> {
    match name.unwrap_or("lorentzian") {
        "euclidean" => Ok(Metric::euclidean(n)),
        "lorentzian" => {
            let d: Vec<i64> = (0..n).map(|i| if i == 0 { 1 } else { -1 }).collect();
            Ok(Metric::diagonal(&d))
        }
        other => bail!("unknown metric `{other}`; expected lorentzian, euclidean or a declared metric"),
    }
}

fn yang_mills(ws: &Workspace, words: &[String], opts: &Options) -> anyhow::Result<Report> {
    let args = &words[1..];
    max_args("ym", args, 1)?;
    let (g, metric) = gauge_setup(ws, opts)?;
    let gc = &g.gauge;
    let ctx = &gc.ctx;
    let n = ctx.n;
    let l = gc.yang_mills(&metric, &g.coupling).context("building the Yang-Mills Lagrangian")?;
    let mut r = Report::new(words, ctx);
    match arg(args, 0).unwrap_or("lagrangian") {
        "lagrangian" => r.push("L", Value::Expr(l.density)),
        "el" => {
            for (i, e) in variational_derivatives(ctx, &l.density).into_iter().enumerate() {
                if gc.matter.contains(&i) || i >= gc.dim() * n {
                    continue;
                }
                r.push(format!("E[{}]", ctx.fields[i].name), Value::Equation(e));
            }
        }
        "strength" => {
            for (p, f) in gc.strength().into_iter().enumerate() {
                for (a, row) in f.into_iter().enumerate() {
                    for (b, e) in row.into_iter().enumerate().skip(a + 1) {
                        r.push(format!("F[{};{},{}]", p + 1, ctx.coords[a], ctx.coords[b]), Value::Expr(e));
                    }
                }
            }
        }
        "bianchi" => r.push("bianchi", Value::Check(gc.bianchi_check())),
        "invariance" => {
            let inv = gc.invariance_equations(&l.density);
            for (tag, list) in [("a", &inv.a), ("b", &inv.b), ("c", &inv.c)] {
                let zero = list.iter().all(Expr::is_empty);
                r.push(format!("invariance_{tag}"), Value::Check(zero));
            }
        }
        "noether" => {
            let mut gc = gc.clone();
            let all: Vec<usize> = (0..n).collect();
            let mut xi = Vec::new();
            for p in 0..gc.dim() {
                let name = format!("xi{}", p + 1);
                gc.ctx.add_func(&name, &all)?;
                xi.push(gc.ctx.func(&name)?);
            }
            let out = gc.noether_identities(&l, &xi)?;
            let ctx = &gc.ctx;
            r.ctx = ctx.clone();
            for (lam, e) in out.current.iter().enumerate() {
                r.push(format!("J[{}]", ctx.coords[lam]), Value::Expr(e.clone()));
            }
            for mu in 0..n {
                for lam in mu + 1..n {
                    let name = format!("U[{},{}]", ctx.coords[mu], ctx.coords[lam]);
                    r.push(name, Value::Expr(out.superpotential[mu][lam].clone()));
                }
            }
            r.push("identities", Value::Check(out.identities.all_zero()));
            r.push("decomposition", Value::Check(out.decomposition_residual.iter().all(Expr::is_empty)));
            let antisym = (0..n).all(|a| (0..n).all(|b| (&out.superpotential[a][b] + &out.superpotential[b][a]).is_empty()));
            r.push("superpotential_antisymmetric", Value::Check(antisym));
        }
        other => bail!("unknown ym action `{other}`; expected lagrangian, el, strength, bianchi, invariance or noether"),
    }
    Ok(r)
}

fn brst(ws: &Workspace, words: &[String], opts: &Options) -> anyhow::Result<Report> {
    max_args("brst", &words[1..], 0)?;
    let (g, _) = gauge_setup(ws, opts)?;
    let b = BrstContext::new(g.gauge)?;
    let report = b.check()?;
    let mut r = Report::new(words, b.ctx());
    let only_checks = match opts.check.as_deref() {
        None => false,
        Some("nilpotency") => true,
        Some(other) => bail!("unknown BRST check `{other}`; expected nilpotency"),
    };
    if !only_checks {
        for (name, e) in &report.generators {
            r.push(format!("s({name})"), Value::Expr(e.clone()));
        }
        r.push("k", Value::Rational(report.ghost_coefficient.clone()));
    }
    for (name, e) in &report.nilpotency {
        r.push(format!("s^2({name})"), Value::Check(e.is_empty()));
    }
    for (name, f) in &report.anticommutator {
        r.push(format!("s.dh+dh.s({name})"), Value::Check(f.is_zero_exact()));
    }
    for (name, gh) in &report.ghost_shift {
        r.push(format!("ghost_shift({name})"), Value::Check(*gh == Some(1)));
    }
    Ok(r)
}

fn check(ws: &Workspace, words: &[String], opts: &Options) -> anyhow::Result<Report> {
    let args = &words[1..];
    max_args("check", args, 1)?;
    match arg(args, 0) {
        Some("nilpotency") => {}
        Some(other) => bail!("unknown check `{other}`; expected nilpotency"),
        None => bail!("`check` needs a property name (nilpotency)"),
    }
    let module = opts.module.as_deref().unwrap_or("all");
    let modules: &[&str] = match module {
        "all" => &["bicomplex", "variational", "brst"],
        "bicomplex" => &["bicomplex"],
        "variational" => &["variational"],
        "brst" => &["brst"],
        other => bail!("unknown module `{other}`; expected all, bicomplex, variational or brst"),
    };
    let ctx = &ws.ctx;
    let n = ctx.n;
    let mut r = Report::new(words, ctx);
    let sampled = n > 0 && ctx.m() > 0;
    let samples = if sampled { opts.samples } else { 0 };
    for m in modules {
        match *m {
            "bicomplex" => {
                let (mut dh, mut dv, mut anti, mut d) = (true, true, true, true);
                for seed in 0..samples as u64 {
                    let mut corpus = Corpus::new(seed);
                    corpus.terms = 2;
                    let f = corpus.form(ctx, (seed % 3) as usize, (seed / 3 % n as u64) as usize);
                    dh &= f.d_h(n).d_h(n).is_zero_exact();
                    dv &= f.d_v().d_v().is_zero_exact();
                    anti &= (&f.d_h(n).d_v() + &f.d_v().d_h(n)).is_zero_exact();
                    d &= f.d(n).d(n).is_zero_exact();
                }
                r.push("dh^2", Value::Check(dh));
                r.push("dv^2", Value::Check(dv));
                r.push("dh.dv+dv.dh", Value::Check(anti));
                r.push("d^2", Value::Check(d));
            }
            "variational" => {
                let (mut tau2, mut delta2, mut delta_dh) = (true, true, true);
                for seed in 0..samples as u64 {
                    let mut corpus = Corpus::new(seed);
                    corpus.terms = 2;
                    let top = corpus.form(ctx, 1 + (seed % 2) as usize, 0).wedge(&Form::volume(n));
                    let t = tau(n, &top)?;
                    tau2 &= tau(n, &t)? == t;
                    let l = Lagrangian::new(corpus.lagrangian(ctx, 2), n);
                    let dl = variational_delta(n, &l.form())?;
                    delta2 &= variational_delta(n, &dl)?.is_zero_exact();
                    let xi = corpus.form(ctx, (seed % 2) as usize, n - 1);
                    delta_dh &= variational_delta(n, &xi.d_h(n))?.is_zero_exact();
                }
                r.push("tau^2-tau", Value::Check(tau2));
                r.push("delta^2", Value::Check(delta2));
                r.push("delta.dh", Value::Check(delta_dh));
            }
            _ => {
                let Some(g) = &ws.gauge else { continue };
                let b = BrstContext::new(g.gauge.clone())?;
                let report = b.check()?;
                r.push("s^2", Value::Check(report.nilpotency.iter().all(|(_, e)| e.is_empty())));
                r.push("s.dh+dh.s", Value::Check(report.anticommutator.iter().all(|(_, f)| f.is_zero_exact())));
                r.push("ghost_shift", Value::Check(report.ghost_shift.iter().all(|(_, g)| *g == Some(1))));
            }
        }
    }
    Ok(r)
}

