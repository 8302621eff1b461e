use jetvar_core::io::{expr_to_json, form_to_json, FormBasis, Printer};
use serde_json::{json, Value as Json};

use crate::commands::{Report, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Rational(Some(q)) => Some(q.to_string()),
        Value::Rational(None) => Some("undetermined".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Check(true) => Some("ok".into()),
        Value::Check(false) => Some("FAILED".into()),
        _ => None,
    }
}

fn line(r: &Report, name: &str, v: &Value, format: Format, basis: FormBasis) -> String {
    if let Some(s) = scalar(v) {
        return format!("{name}: {s}");
    }
    let p = match format {
        Format::Latex => Printer::latex(&r.ctx),
        _ => Printer::text(&r.ctx),
    };
    let body = match v {
        Value::Expr(e) => p.expr(e),
        Value::Equation(e) => format!("{} = 0", p.expr(e)),
        Value::Form(f) => p.form(f, basis),
        _ => unreachable!(),
    };
    match format {
        Format::Latex => format!("{name}: ${body}$"),
        _ => format!("{name}: {body}"),
    }
}

fn report_json(r: &Report, basis: FormBasis) -> Json {
    let items: Vec<Json> = r
        .items
        .iter()
        .map(|i| {
            let (kind, value) = match &i.value {
                Value::Expr(e) => ("expr", expr_to_json(&r.ctx, e)),
                Value::Equation(e) => ("equation", expr_to_json(&r.ctx, e)),
                Value::Form(f) => ("form", form_to_json(&r.ctx, f, basis)),
                Value::Rational(q) => ("rational", q.as_ref().map_or(Json::Null, |q| Json::String(q.to_string()))),
                Value::Bool(b) => ("bool", Json::Bool(*b)),
                Value::Check(b) => ("check", Json::Bool(*b)),
            };
            json!({ "name": i.name, "kind": kind, "value": value })
        })
        .collect();
    json!({ "command": r.command, "results": items })
}

/// Renders reports; headers are written when there is more than one.
pub fn render(reports: &[Report], format: Format, basis: FormBasis) -> String {
    if format == Format::Json {
        let all: Vec<Json> = reports.iter().map(|r| report_json(r, basis)).collect();
        let mut s = serde_json::to_string_pretty(&Json::Array(all)).expect("JSON values serialize");
        s.push('\n');
        return s;
    }
    let comment = if format == Format::Latex { "%" } else { "#" };
    let mut out = String::new();
    for (k, r) in reports.iter().enumerate() {
        if reports.len() > 1 {
            if k > 0 {
                out.push('\n');
            }
            out += &format!("{comment} {}\n", r.command.join(" "));
        }
        for i in &r.items {
            out += &line(r, &i.name, &i.value, format, basis);
            out.push('\n');
        }
    }
    out
}

/// Jet-order warnings for every expression in the reports.
pub fn warnings(reports: &[Report]) -> Vec<String> {
    let mut out = Vec::new();
    for r in reports {
        for i in &r.items {
            let exprs: Vec<&jetvar_core::Expr> = match &i.value {
                Value::Expr(e) | Value::Equation(e) => vec![e],
                Value::Form(f) => f.terms().map(|(_, c)| c).collect(),
                _ => vec![],
            };
            if let Some(w) = exprs.into_iter().find_map(|e| r.ctx.order_warning(e)) {
                out.push(format!("{}: {w}", i.name));
            }
        }
    }
    out
}
