//! Text parsing and printing of expressions and forms; LaTeX and JSON output.
//!
//! Text syntax: coordinates and fields by name, jets as `y[x1,x2]`, opaque
//! function derivatives as `f[x1]`, `sin cos exp ln sqrt`, `^` for rational
//! powers, `dx[x1]`, `th[y[x1]]` (contact form), `dy[y]` and `vol` for basis
//! forms, and `/\` or `*` for the wedge product.

mod lexer;
mod parse;
mod print;

pub use parse::{parse_expr, parse_form, RESERVED};
pub use print::{latex_ident, FormBasis, Printer, Style};

use serde_json::{json, Value};

use crate::forms::Form;
use crate::kernel::{Expr, JetContext, Var};

pub fn expr_to_text(ctx: &JetContext, e: &Expr) -> String {
    Printer::text(ctx).expr(e)
}

pub fn form_to_text(ctx: &JetContext, f: &Form, basis: FormBasis) -> String {
    Printer::text(ctx).form(f, basis)
}

pub fn expr_to_latex(ctx: &JetContext, e: &Expr) -> String {
    Printer::latex(ctx).expr(e)
}

pub fn form_to_latex(ctx: &JetContext, f: &Form, basis: FormBasis) -> String {
    Printer::latex(ctx).form(f, basis)
}

/// Expressions are carried as their canonical text.
pub fn expr_to_json(ctx: &JetContext, e: &Expr) -> Value {
    Value::String(expr_to_text(ctx, e))
}

/// A form as a list of terms with text coefficients and named basis factors.
pub fn form_to_json(ctx: &JetContext, f: &Form, basis: FormBasis) -> Value {
    let p = Printer::text(ctx);
    let items: Vec<(Expr, Vec<u8>, Vec<Var>)> = match basis {
        FormBasis::Theta => f.terms().map(|(b, c)| (c.clone(), b.dx.clone(), b.theta.clone())).collect(),
        FormBasis::Dy => f.to_dy_basis(ctx.n),
    };
    let key = match basis {
        FormBasis::Theta => "theta",
        FormBasis::Dy => "dy",
    };
    Value::Array(
        items
            .iter()
            .map(|(c, dx, vs)| {
                let dx: Vec<&str> = dx.iter().map(|&d| ctx.coords[d as usize].as_str()).collect();
                let vs: Vec<String> = vs.iter().map(|v| p.var(v)).collect();
                json!({ "coefficient": p.expr(c), "dx": dx, key: vs })
            })
            .collect(),
    )
}
