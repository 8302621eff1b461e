use num_traits::{One, Signed};

use crate::forms::Form;
use crate::kernel::{Atom, Expr, JetContext, Monomial, MultiIndex, Rational, Sym, Var};

/// Output notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// Re-parseable plain text.
    Text,
    /// LaTeX, output only.
    Latex,
}

/// Basis used to print contact factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FormBasis {
    #[default]
    Theta,
    Dy,
}

pub struct Printer<'a> {
    pub ctx: &'a JetContext,
    pub style: Style,
}

const GREEK: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu", "nu", "xi",
    "pi", "rho", "sigma", "tau", "phi", "chi", "psi", "omega", "Gamma", "Delta", "Theta", "Lambda", "Xi", "Pi",
    "Sigma", "Phi", "Psi", "Omega",
];

/// LaTeX rendering of an identifier: `x12` becomes `x_{12}`, Greek names
/// become commands, anything else is set upright.
pub fn latex_ident(s: &str) -> String {
    let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
    let (head, digits) = s.split_at(split);
    if !head.is_empty() && head.chars().all(|c| c.is_ascii_alphabetic()) && digits.chars().all(|c| c.is_ascii_digit()) {
        let head = if GREEK.contains(&head) {
            format!("\\{head}")
        } else if head.len() == 1 {
            head.to_string()
        } else {
            format!("\\mathrm{{{head}}}")
        };
        return if digits.is_empty() { head } else { format!("{head}_{{{digits}}}") };
    }
    format!("\\mathrm{{{}}}", s.replace('_', "\\_"))
}

impl<'a> Printer<'a> {
    pub fn text(ctx: &'a JetContext) -> Self {
        Printer { ctx, style: Style::Text }
    }

    pub fn latex(ctx: &'a JetContext) -> Self {
        Printer { ctx, style: Style::Latex }
    }

    fn ident(&self, s: &str) -> String {
        match self.style {
            Style::Text => s.to_string(),
            Style::Latex => latex_ident(s),
        }
    }

    fn coord(&self, d: usize) -> String {
        let name = self.ctx.coords.get(d).cloned().unwrap_or_else(|| format!("x{}", d + 1));
        self.ident(&name)
    }

    fn indexed(&self, name: &str, index: &MultiIndex) -> String {
        if index.is_empty() {
            return self.ident(name);
        }
        let dirs: Vec<String> = index.directions().into_iter().map(|d| self.coord(d)).collect();
        match self.style {
            Style::Text => format!("{name}[{}]", dirs.join(",")),
            Style::Latex => format!("{{{}}}_{{{}}}", self.ident(name), dirs.join("")),
        }
    }

    pub fn var(&self, v: &Var) -> String {
        let name = self.ctx.fields.get(v.field as usize).map_or_else(|| format!("y{}", v.field + 1), |f| f.name.clone());
        self.indexed(&name, &v.index)
    }

    fn rational(&self, q: &Rational) -> String {
        match self.style {
            Style::Text => q.to_string(),
            Style::Latex if q.is_integer() => q.to_string(),
            Style::Latex => format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom()),
        }
    }

    fn power(&self, base: String, p: &Rational) -> String {
        if p.is_one() {
            return base;
        }
        match self.style {
            Style::Text if p.is_integer() && p.is_positive() => format!("{base}^{p}"),
            Style::Text => format!("{base}^({p})"),
            Style::Latex if p.is_integer() => format!("{base}^{{{p}}}"),
            Style::Latex => format!("{base}^{{{}/{}}}", p.numer(), p.denom()),
        }
    }

    fn paren(&self, s: String) -> String {
        match self.style {
            Style::Text => format!("({s})"),
            Style::Latex => format!("\\left({s}\\right)"),
        }
    }

    fn factor(&self, s: &Sym, p: i32) -> String {
        let q = Rational::from_integer(p.into());
        match s {
            Sym::Base(d) => self.power(self.coord(*d as usize), &q),
            Sym::Jet(v) => self.power(self.var(v), &q),
            Sym::Atom(Atom::Func(f)) => self.power(self.indexed(&f.name, &f.derivs), &q),
            Sym::Atom(Atom::Elem(kind, arg)) => {
                let head = match self.style {
                    Style::Text => kind.name().to_string(),
                    Style::Latex => format!("\\{}", kind.name()),
                };
                let inner = self.paren(self.expr(arg));
                let applied = format!("{head}{inner}");
                if p == 1 {
                    applied
                } else if self.style == Style::Latex && p > 0 {
                    format!("{head}^{{{p}}}{inner}")
                } else if self.style == Style::Latex {
                    format!("{}^{{{p}}}", self.paren(applied))
                } else {
                    self.power(applied, &q)
                }
            }
            Sym::Atom(Atom::Root(b, den)) => {
                let e = Rational::new(p.into(), (*den as i64).into());
                let base = self.paren(self.expr(b));
                match self.style {
                    Style::Text => format!("{base}^({e})"),
                    Style::Latex if e.is_integer() => format!("{base}^{{{e}}}"),
                    Style::Latex => format!("{base}^{{{}/{}}}", e.numer(), e.denom()),
                }
            }
        }
    }

    fn monomial(&self, m: &Monomial) -> Vec<String> {
        let mut parts: Vec<String> = m.even_factors().iter().map(|(s, p)| self.factor(s, *p)).collect();
        parts.extend(m.odd_factors().iter().map(|v| self.var(v)));
        parts
    }

    fn join(&self, parts: &[String]) -> String {
        match self.style {
            Style::Text => parts.join("*"),
            Style::Latex => parts.join(" "),
        }
    }

    /// `|c|·m` and whether the term is negative.
    fn term(&self, m: &Monomial, c: &Rational, tail: &[String]) -> (String, bool) {
        let mut parts = self.monomial(m);
        parts.extend_from_slice(tail);
        let neg = c.is_negative();
        let a = c.abs();
        if parts.is_empty() {
            return (self.rational(&a), neg);
        }
        if !a.is_one() {
            parts.insert(0, self.rational(&a));
        }
        (self.join(&parts), neg)
    }

    fn sum(terms: Vec<(String, bool)>) -> String {
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (t, neg)) in terms.into_iter().enumerate() {
            match (i, neg) {
                (0, false) => out.push_str(&t),
                (0, true) => {
                    out.push('-');
                    out.push_str(&t);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&t);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&t);
                }
            }
        }
        out
    }

    pub fn expr(&self, e: &Expr) -> String {
        Printer::sum(e.terms().map(|(m, c)| self.term(m, c, &[])).collect())
    }

    fn basis(&self, dx: &[u8], theta: &[Var], basis: FormBasis) -> Vec<String> {
        let mut out: Vec<String> = dx
            .iter()
            .map(|&d| match self.style {
                Style::Text => format!("dx[{}]", self.coord(d as usize)),
                Style::Latex => format!("d{}", self.coord(d as usize)),
            })
            .collect();
        out.extend(theta.iter().map(|v| match (self.style, basis) {
            (Style::Text, FormBasis::Theta) => format!("th[{}]", self.var(v)),
            (Style::Text, FormBasis::Dy) => format!("dy[{}]", self.var(v)),
            (Style::Latex, FormBasis::Theta) => format!("\\theta_{{{}}}", self.var(v)),
            (Style::Latex, FormBasis::Dy) => format!("d{}", self.var(v)),
        }));
        out
    }

    pub fn form(&self, f: &Form, basis: FormBasis) -> String {
        let items: Vec<(Expr, Vec<u8>, Vec<Var>)> = match basis {
            FormBasis::Theta => f.terms().map(|(b, c)| (c.clone(), b.dx.clone(), b.theta.clone())).collect(),
            FormBasis::Dy => f.to_dy_basis(self.ctx.n),
        };
        let wedge = match self.style {
            Style::Text => " /\\ ",
            Style::Latex => " \\wedge ",
        };
        let terms = items
            .iter()
            .map(|(c, dx, theta)| {
                let b = self.basis(dx, theta, basis).join(wedge);
                if c.len() == 1 {
                    let (m, q) = c.terms().next().unwrap();
                    return self.term(m, q, &[b]);
                }
                if b.is_empty() {
                    return (self.expr(c), false);
                }
                (self.join(&[self.paren(self.expr(c)), b]), false)
            })
            .collect();
        Printer::sum(terms)
    }
}
