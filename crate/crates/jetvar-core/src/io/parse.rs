use num_traits::Zero;

use super::lexer::{tokenize, Spanned, Tok};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::kernel::{partial_base, ElemKind, Expr, JetContext, MultiIndex, Rational, Var};

/// Names with a fixed meaning in the expression language.
pub const RESERVED: &[&str] = &["dx", "dy", "th", "vol", "sin", "cos", "exp", "ln", "sqrt"];

/// Parses a form. Scalars are forms of degree zero.
pub fn parse_form(ctx: &JetContext, src: &str, line: usize) -> Result<Form> {
    let toks = tokenize(src, line)?;
    let mut p = Parser { ctx, toks, pos: 0, line, end: src.chars().count() + 1 };
    let f = p.sum()?;
    if let Some((t, col)) = p.toks.get(p.pos) {
        return Err(Error::Parse { line, col: *col, msg: format!("unexpected {}", t.describe()) });
    }
    Ok(f)
}

/// Parses a scalar expression.
pub fn parse_expr(ctx: &JetContext, src: &str, line: usize) -> Result<Expr> {
    let f = parse_form(ctx, src, line)?;
    if f.is_empty() {
        return Ok(Expr::zero());
    }
    f.as_scalar().ok_or_else(|| Error::Parse { line, col: 1, msg: "expected a scalar expression, found a form".into() })
}

struct Parser<'a> {
    ctx: &'a JetContext,
    toks: Vec<Spanned>,
    pos: usize,
    line: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: self.line, col: self.col(), msg: msg.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                let d = t.describe();
                self.err(format!("expected {}, found {d}", want.describe()))
            }
            None => self.err(format!("expected {}, found end of input", want.describe())),
        }
    }

    fn sum(&mut self) -> Result<Form> {
        let mut acc = self.wedge()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc += self.wedge()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc -= self.wedge()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn wedge(&mut self) -> Result<Form> {
        let mut acc = self.product()?;
        while self.peek() == Some(&Tok::Wedge) {
            self.pos += 1;
            acc = acc.wedge(&self.product()?);
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Form> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.wedge(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let col = self.col();
                    let d = self.unary()?;
                    let d = self.scalar(d, col, "divisor")?;
                    let inv = match d.as_constant() {
                        Some(q) if q.is_zero() => return Err(self.at(col, "division by zero")),
                        Some(q) => Expr::constant(q.recip()),
                        None => d.recip().map_err(|e| self.at(col, &e.to_string()))?,
                    };
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn at(&self, col: usize, msg: &str) -> Error {
        Error::Parse { line: self.line, col, msg: msg.to_string() }
    }

    fn scalar(&self, f: Form, col: usize, what: &str) -> Result<Expr> {
        if f.is_empty() {
            return Ok(Expr::zero());
        }
        f.as_scalar().ok_or_else(|| self.at(col, &format!("{what} must be a scalar")))
    }

    fn unary(&mut self) -> Result<Form> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Form> {
        let col = self.col();
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let ecol = self.col();
        let exp = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -self.primary()?
            }
            _ => self.primary()?,
        };
        let q = self
            .scalar(exp, ecol, "exponent")?
            .as_constant()
            .ok_or_else(|| self.at(ecol, "exponent must be a rational constant"))?;
        let b = self.scalar(base, col, "base of a power")?;
        b.pow_rational(&q).map(Form::scalar).map_err(|e| self.at(col, &e.to_string()))
    }

    fn index_list(&mut self) -> Result<Vec<usize>> {
        let mut dirs = Vec::new();
        if self.peek() != Some(&Tok::LBracket) {
            return Ok(dirs);
        }
        self.pos += 1;
        loop {
            let col = self.col();
            match self.next() {
                Some(Tok::Ident(name)) => match self.ctx.coord_index(&name) {
                    Some(d) => dirs.push(d),
                    None => return Err(self.at(col, &format!("`{name}` is not a base coordinate"))),
                },
                _ => return Err(self.at(col, "expected a base coordinate")),
            }
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RBracket) => return Ok(dirs),
                _ => return Err(self.at(col, "expected `,` or `]`")),
            }
        }
    }

    /// `name` or `name[x, …]` naming a jet variable.
    fn jet_var(&mut self) -> Result<Var> {
        let col = self.col();
        match self.next() {
            Some(Tok::Ident(name)) => {
                let i = self.ctx.field_index(&name).ok_or_else(|| self.at(col, &format!("`{name}` is not a field")))?;
                let dirs = self.index_list()?;
                Ok(self.ctx.var(i, MultiIndex::from_directions(dirs)))
            }
            _ => Err(self.at(col, "expected a field")),
        }
    }

    fn bracketed<T>(&mut self, inner: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.expect(Tok::LBracket)?;
        let v = inner(self)?;
        self.expect(Tok::RBracket)?;
        Ok(v)
    }

    fn primary(&mut self) -> Result<Form> {
        let col = self.col();
        match self.next() {
            Some(Tok::Num(n)) => Ok(Form::scalar(Expr::constant(Rational::from_integer(n)))),
            Some(Tok::LParen) => {
                let f = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => self.identifier(&name, col),
            Some(t) => Err(self.at(col, &format!("unexpected {}", t.describe()))),
            None => Err(self.at(col, "unexpected end of input")),
        }
    }

    fn identifier(&mut self, name: &str, col: usize) -> Result<Form> {
        let n = self.ctx.n;
        match name {
            "dx" => {
                let d = self.bracketed(|p| {
                    let c = p.col();
                    match p.next() {
                        Some(Tok::Ident(x)) => p.ctx.coord_index(&x).ok_or_else(|| p.at(c, &format!("`{x}` is not a base coordinate"))),
                        _ => Err(p.at(c, "expected a base coordinate")),
                    }
                })?;
                return Ok(Form::dx(d));
            }
            "th" => return Ok(Form::theta(self.bracketed(|p| p.jet_var())?)),
            "dy" => return Ok(Form::dy(self.bracketed(|p| p.jet_var())?, n)),
            "vol" => return Ok(Form::volume(n)),
            _ => {}
        }
        if let Some(kind) = ElemKind::from_name(name).map(Some).or((name == "sqrt").then_some(None)) {
            self.expect(Tok::LParen)?;
            let acol = self.col();
            let arg = self.sum()?;
            self.expect(Tok::RParen)?;
            let arg = self.scalar(arg, acol, "argument")?;
            let r = match kind {
                Some(k) => Expr::elem(k, &arg),
                None => arg.pow_rational(&Rational::new(1.into(), 2.into())),
            };
            return r.map(Form::scalar).map_err(|e| self.at(col, &e.to_string()));
        }
        if let Some(d) = self.ctx.coord_index(name) {
            return Ok(Form::scalar(Expr::base(d)));
        }
        if let Some(i) = self.ctx.field_index(name) {
            let dirs = self.index_list()?;
            return Ok(Form::scalar(self.ctx.jet(i, &dirs)));
        }
        if self.ctx.func_decl(name).is_some() {
            let mut e = self.ctx.func(name)?;
            for d in self.index_list()? {
                e = partial_base(&e, d);
            }
            return Ok(Form::scalar(e));
        }
        Err(Error::Parse { line: self.line, col, msg: format!("unknown symbol `{name}`") })
    }
}
