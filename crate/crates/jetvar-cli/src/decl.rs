//! Declaration files: a line-oriented text grammar and its JSON mirror, both
//! read into [`Raw`] and then built into a [`Workspace`].

use std::collections::BTreeMap;

use anyhow::{anyhow, bail};
use jetvar_core::connections::Metric;
use jetvar_core::error::Error;
use jetvar_core::forms::{Form, VectorField};
use jetvar_core::gauge::{GaugeContext, LieAlgebra};
use jetvar_core::io::{parse_expr, parse_form, RESERVED};
use jetvar_core::kernel::Rational;
use jetvar_core::{Expr, JetContext};
use serde::{Deserialize, Serialize};

/// Source position of a value; line 0 marks JSON input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawField {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ghost: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antifield_of: Option<String>,
    #[serde(skip)]
    pub pos: Pos,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFunc {
    pub name: String,
    pub args: Vec<String>,
    #[serde(skip)]
    pub pos: Pos,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAlgebra {
    pub name: String,
    /// A built-in algebra: `u1`, `abelian`, `su2` or `so3`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Entries `[r, p, q, value]` for c^r_{pq}, 1-based.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub structure_constants: Vec<(usize, usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bilinear_form: Option<Vec<Vec<String>>>,
    #[serde(skip)]
    pub pos: Pos,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMetric {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
    #[serde(skip)]
    pub pos: Pos,
    #[serde(skip)]
    pub entry_pos: Vec<Pos>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGauge {
    pub algebra: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<String>,
    #[serde(skip)]
    pub pos: Pos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Lagrangian,
    Expr,
    Form,
    Vector,
    Connection,
    Soldering,
}

impl Kind {
    pub fn keyword(self) -> &'static str {
        match self {
            Kind::Lagrangian => "lagrangian",
            Kind::Expr => "expr",
            Kind::Form => "form",
            Kind::Vector => "vector",
            Kind::Connection => "connection",
            Kind::Soldering => "soldering",
        }
    }

    fn has_components(self) -> bool {
        matches!(self, Kind::Vector | Kind::Connection | Kind::Soldering)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawObject {
    pub kind: Kind,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<BTreeMap<String, String>>,
    #[serde(skip)]
    pub pos: Pos,
    #[serde(skip)]
    pub component_pos: BTreeMap<String, Pos>,
}

/// A declaration file before symbol resolution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Raw {
    pub base: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<RawField>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub funcs: Vec<RawFunc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub algebras: Vec<RawAlgebra>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<RawMetric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<RawGauge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<RawObject>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub run: Vec<Vec<String>>,
}

fn perr(pos: Pos, msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Error::Parse { line: pos.line, col: pos.col, msg: msg.into() })
}

/// Character cursor over one line with 1-based columns.
struct Cursor {
    chars: Vec<char>,
    i: usize,
    line: usize,
}

impl Cursor {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.i + 1 }
    }

    fn skip_ws(&mut self) {
        while self.i < self.chars.len() && self.chars[self.i].is_whitespace() {
            self.i += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.i >= self.chars.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.i).copied()
    }

    fn word(&mut self) -> anyhow::Result<(String, Pos)> {
        self.skip_ws();
        let p = self.pos();
        let start = self.i;
        while self.i < self.chars.len() && (self.chars[self.i].is_alphanumeric() || "_-".contains(self.chars[self.i])) {
            self.i += 1;
        }
        if start == self.i {
            return Err(perr(p, "expected a name"));
        }
        Ok((self.chars[start..self.i].iter().collect(), p))
    }

    fn keyword(&mut self, kw: &str) -> anyhow::Result<()> {
        let (w, p) = self.word()?;
        if w != kw {
            return Err(perr(p, format!("expected `{kw}`, found `{w}`")));
        }
        Ok(())
    }

    fn expect(&mut self, c: char) -> anyhow::Result<()> {
        let p = {
            self.skip_ws();
            self.pos()
        };
        match self.chars.get(self.i) {
            Some(&d) if d == c => {
                self.i += 1;
                Ok(())
            }
            Some(&d) => Err(perr(p, format!("expected `{c}`, found `{d}`"))),
            None => Err(perr(p, format!("expected `{c}`, found end of line"))),
        }
    }

    /// Text up to the next top-level character in `stops`, or to the end.
    fn until(&mut self, stops: &str) -> (String, Pos) {
        self.skip_ws();
        let p = self.pos();
        let start = self.i;
        let mut depth = 0i32;
        while self.i < self.chars.len() {
            let c = self.chars[self.i];
            if depth == 0 && stops.contains(c) {
                break;
            }
            match c {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => depth -= 1,
                _ => {}
            }
            self.i += 1;
        }
        let s: String = self.chars[start..self.i].iter().collect();
        (s.trim_end().to_string(), p)
    }

    fn finish(&mut self) -> anyhow::Result<()> {
        if !self.at_end() {
            return Err(perr(self.pos(), "unexpected trailing text"));
        }
        Ok(())
    }

    /// `{ item, item, … }` with items read by `item`.
    fn block(&mut self, sep: char, mut item: impl FnMut(&mut Cursor) -> anyhow::Result<()>) -> anyhow::Result<()> {
        self.expect('{')?;
        if self.peek() == Some('}') {
            self.i += 1;
            return Ok(());
        }
        loop {
            item(self)?;
            match self.peek() {
                Some(c) if c == sep => self.i += 1,
                Some('}') => {
                    self.i += 1;
                    return Ok(());
                }
                _ => return Err(perr(self.pos(), format!("expected `{sep}` or `}}`"))),
            }
        }
    }

    /// `( a, b, … )` or `[ a, b, … ]` of raw strings.
    fn list(&mut self, open: char, close: char) -> anyhow::Result<Vec<(String, Pos)>> {
        self.expect(open)?;
        let mut out = Vec::new();
        if self.peek() == Some(close) {
            self.i += 1;
            return Ok(out);
        }
        loop {
            let stops: String = [',', close].iter().collect();
            let (s, p) = self.until(&stops);
            if s.is_empty() {
                return Err(perr(p, "empty list entry"));
            }
            out.push((s, p));
            match self.peek() {
                Some(',') => self.i += 1,
                Some(c) if c == close => {
                    self.i += 1;
                    return Ok(out);
                }
                _ => return Err(perr(self.pos(), format!("expected `,` or `{close}`"))),
            }
        }
    }

    fn integer(&mut self) -> anyhow::Result<i64> {
        self.skip_ws();
        let p = self.pos();
        let start = self.i;
        if self.chars.get(self.i) == Some(&'-') {
            self.i += 1;
        }
        while self.i < self.chars.len() && self.chars[self.i].is_ascii_digit() {
            self.i += 1;
        }
        let s: String = self.chars[start..self.i].iter().collect();
        s.parse().map_err(|_| perr(p, "expected an integer"))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_text(src: &str) -> anyhow::Result<Raw> {
    let mut raw = Raw::default();
    let mut seen_base = false;
    for (k, line) in src.lines().enumerate() {
        let text = strip_comment(line);
        let mut cur = Cursor { chars: text.chars().collect(), i: 0, line: k + 1 };
        if cur.at_end() {
            continue;
        }
        let (kw, kpos) = cur.word()?;
        if !seen_base && kw != "base" {
            return Err(perr(kpos, "the first statement must be `base`"));
        }
        match kw.as_str() {
            "base" => {
                if seen_base {
                    return Err(perr(kpos, "`base` given twice"));
                }
                seen_base = true;
                while !cur.at_end() {
                    raw.base.push(cur.word()?.0);
                }
                if raw.base.is_empty() {
                    return Err(perr(cur.pos(), "at least one base coordinate required"));
                }
            }
            "field" => {
                let (name, pos) = cur.word()?;
                let mut f = RawField { name, pos, ..RawField::default() };
                while !cur.at_end() {
                    let (w, p) = cur.word()?;
                    match w.as_str() {
                        "odd" | "even" => f.parity = Some(w),
                        "ghost" => f.ghost = Some(cur.integer()? as i32),
                        _ => return Err(perr(p, format!("unknown field attribute `{w}`"))),
                    }
                }
                raw.fields.push(f);
            }
            "antifield" => {
                let (name, pos) = cur.word()?;
                cur.keyword("of")?;
                let partner = cur.word()?.0;
                cur.finish()?;
                raw.fields.push(RawField { name, pos, antifield_of: Some(partner), ..RawField::default() });
            }
            "func" => {
                let (name, pos) = cur.word()?;
                let args = cur.list('(', ')')?.into_iter().map(|(s, _)| s).collect();
                cur.finish()?;
                raw.funcs.push(RawFunc { name, args, pos });
            }
            "max_order" => {
                let k = cur.integer()?;
                cur.finish()?;
                raw.max_order = Some(usize::try_from(k).map_err(|_| perr(kpos, "max_order must be non-negative"))?);
            }
            "algebra" => raw.algebras.push(algebra_statement(&mut cur)?),
            "metric" => raw.metrics.push(metric_statement(&mut cur)?),
            "gauge" => {
                if raw.gauge.is_some() {
                    return Err(perr(kpos, "`gauge` given twice"));
                }
                let (algebra, pos) = cur.word()?;
                let mut g = RawGauge { algebra, pos, ..RawGauge::default() };
                while !cur.at_end() {
                    let (w, p) = cur.word()?;
                    match w.as_str() {
                        "metric" => g.metric = Some(cur.word()?.0),
                        "coupling" => g.coupling = Some(cur.until(" \t").0),
                        _ => return Err(perr(p, format!("unknown gauge attribute `{w}`"))),
                    }
                }
                raw.gauge = Some(g);
            }
            "lagrangian" | "expr" | "form" | "vector" | "connection" | "soldering" => {
                let kind = match kw.as_str() {
                    "lagrangian" => Kind::Lagrangian,
                    "expr" => Kind::Expr,
                    "form" => Kind::Form,
                    "vector" => Kind::Vector,
                    "connection" => Kind::Connection,
                    _ => Kind::Soldering,
                };
                raw.objects.push(object_statement(&mut cur, kind)?);
            }
            "run" => {
                let mut words = Vec::new();
                while !cur.at_end() {
                    words.push(cur.word()?.0);
                }
                if words.is_empty() {
                    return Err(perr(cur.pos(), "`run` needs a command"));
                }
                raw.run.push(words);
            }
            _ => return Err(perr(kpos, format!("unknown statement `{kw}`"))),
        }
    }
    if !seen_base {
        return Err(perr(Pos { line: 1, col: 1 }, "missing `base` statement"));
    }
    Ok(raw)
}

fn algebra_statement(cur: &mut Cursor) -> anyhow::Result<RawAlgebra> {
    let (name, pos) = cur.word()?;
    cur.expect('=')?;
    let mut a = RawAlgebra { name, pos, ..RawAlgebra::default() };
    if cur.peek() != Some('{') {
        a.builtin = Some(cur.word()?.0);
        cur.finish()?;
        return Ok(a);
    }
    let mut bilinear: BTreeMap<(usize, usize), String> = BTreeMap::new();
    cur.block(';', |c| {
        let (w, p) = c.word()?;
        match w.as_str() {
            "dim" => a.dim = Some(usize::try_from(c.integer()?).map_err(|_| perr(p, "negative dimension"))?),
            "c" | "k" => {
                let idx = c.list('[', ']')?;
                let idx: Vec<usize> = idx
                    .iter()
                    .map(|(s, q)| s.trim().parse::<usize>().map_err(|_| perr(*q, "expected a 1-based index")))
                    .collect::<anyhow::Result<_>>()?;
                c.expect('=')?;
                let (v, _) = c.until(";}");
                match (w.as_str(), idx.as_slice()) {
                    ("c", [r, p2, q]) => a.structure_constants.push((*r, *p2, *q, v)),
                    ("k", [i, j]) => {
                        bilinear.insert((*i, *j), v);
                    }
                    _ => return Err(perr(p, format!("wrong number of indices for `{w}`"))),
                }
            }
            _ => return Err(perr(p, format!("unknown algebra entry `{w}`"))),
        }
        Ok(())
    })?;
    cur.finish()?;
    if !bilinear.is_empty() {
        let d = a.dim.ok_or_else(|| perr(pos, "`dim` required with a bilinear form"))?;
        let mut k = vec![vec!["0".to_string(); d]; d];
        for ((i, j), v) in bilinear {
            if i == 0 || j == 0 || i > d || j > d {
                return Err(perr(pos, format!("bilinear form index ({i}, {j}) out of range")));
            }
            k[i - 1][j - 1] = v;
        }
        a.bilinear_form = Some(k);
    }
    Ok(a)
}

fn metric_statement(cur: &mut Cursor) -> anyhow::Result<RawMetric> {
    let (name, pos) = cur.word()?;
    cur.expect('=')?;
    let mut m = RawMetric { name, pos, ..RawMetric::default() };
    if cur.peek() == Some('[') {
        let rows = cur.list('[', ']')?;
        let mut matrix = Vec::new();
        for (row, p) in rows {
            let mut sub = Cursor { chars: row.chars().collect(), i: 0, line: p.line };
            let entries = sub.list('[', ']').map_err(|_| perr(p, "expected a row `[a, b, …]`"))?;
            sub.finish()?;
            m.entry_pos.extend(entries.iter().map(|(_, q)| Pos { line: p.line, col: p.col + q.col - 1 }));
            matrix.push(entries.into_iter().map(|(s, _)| s).collect());
        }
        m.matrix = Some(matrix);
    } else {
        cur.keyword("diag")?;
        let entries = cur.list('(', ')')?;
        m.entry_pos = entries.iter().map(|(_, p)| *p).collect();
        m.diag = Some(entries.into_iter().map(|(s, _)| s).collect());
    }
    cur.finish()?;
    Ok(m)
}

fn object_statement(cur: &mut Cursor, kind: Kind) -> anyhow::Result<RawObject> {
    let (name, pos) = cur.word()?;
    cur.expect('=')?;
    let mut obj = RawObject { kind, name, value: None, components: None, pos, component_pos: BTreeMap::new() };
    if kind.has_components() {
        let mut comps = BTreeMap::new();
        cur.block(',', |c| {
            let (key, kp) = c.until(":,}");
            c.expect(':')?;
            let (v, vp) = c.until(",}");
            if v.is_empty() {
                return Err(perr(vp, "missing component value"));
            }
            let key: String = key.chars().filter(|c| !c.is_whitespace()).collect();
            if comps.insert(key.clone(), v).is_some() {
                return Err(perr(kp, format!("component `{key}` given twice")));
            }
            obj.component_pos.insert(key, vp);
            Ok(())
        })?;
        cur.finish()?;
        obj.components = Some(comps);
    } else {
        let (v, vp) = cur.until("");
        if v.is_empty() {
            return Err(perr(vp, "missing value"));
        }
        obj.value = Some(v);
        obj.pos = vp;
    }
    Ok(obj)
}

pub fn parse_json(src: &str) -> anyhow::Result<Raw> {
    serde_json::from_str(src).map_err(|e| {
        anyhow::Error::new(Error::Parse { line: e.line(), col: e.column(), msg: format!("invalid declaration JSON: {e}") })
    })
}

impl Raw {
    /// Text form of the declaration; parses back to an equal value.
    pub fn to_text(&self) -> String {
        let mut out = format!("base {}\n", self.base.join(" "));
        if let Some(g) = &self.gauge {
            out += &format!("gauge {}", g.algebra);
            if let Some(m) = &g.metric {
                out += &format!(" metric {m}");
            }
            if let Some(c) = &g.coupling {
                out += &format!(" coupling {c}");
            }
            out.push('\n');
        }
        for f in &self.fields {
            match &f.antifield_of {
                Some(p) => out += &format!("antifield {} of {p}\n", f.name),
                None => {
                    out += &format!("field {}", f.name);
                    if let Some(p) = &f.parity {
                        out += &format!(" {p}");
                    }
                    if let Some(g) = f.ghost {
                        out += &format!(" ghost {g}");
                    }
                    out.push('\n');
                }
            }
        }
        for f in &self.funcs {
            out += &format!("func {}({})\n", f.name, f.args.join(", "));
        }
        if let Some(k) = self.max_order {
            out += &format!("max_order {k}\n");
        }
        for a in &self.algebras {
            match &a.builtin {
                Some(b) => out += &format!("algebra {} = {b}\n", a.name),
                None => {
                    let mut items = Vec::new();
                    if let Some(d) = a.dim {
                        items.push(format!("dim {d}"));
                    }
                    for (r, p, q, v) in &a.structure_constants {
                        items.push(format!("c[{r},{p},{q}] = {v}"));
                    }
                    if let Some(k) = &a.bilinear_form {
                        for (i, row) in k.iter().enumerate() {
                            for (j, v) in row.iter().enumerate() {
                                items.push(format!("k[{},{}] = {v}", i + 1, j + 1));
                            }
                        }
                    }
                    out += &format!("algebra {} = {{ {} }}\n", a.name, items.join("; "));
                }
            }
        }
        for m in &self.metrics {
            if let Some(d) = &m.diag {
                out += &format!("metric {} = diag({})\n", m.name, d.join(", "));
            } else if let Some(rows) = &m.matrix {
                let rows: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(", "))).collect();
                out += &format!("metric {} = [{}]\n", m.name, rows.join(", "));
            }
        }
        for o in &self.objects {
            match (&o.value, &o.components) {
                (Some(v), _) => out += &format!("{} {} = {v}\n", o.kind.keyword(), o.name),
                (None, Some(c)) => {
                    let items: Vec<String> = c.iter().map(|(k, v)| format!("{k}: {v}")).collect();
                    out += &format!("{} {} = {{ {} }}\n", o.kind.keyword(), o.name, items.join(", "));
                }
                (None, None) => {}
            }
        }
        for r in &self.run {
            out += &format!("run {}\n", r.join(" "));
        }
        out
    }
}

/// Gauge theory declared in a file.
#[derive(Clone, Debug)]
pub struct GaugeDecl {
    pub gauge: GaugeContext,
    pub metric: Option<String>,
    pub coupling: Rational,
}

/// Validated context with named objects.
#[derive(Clone, Debug)]
pub struct Workspace {
    pub ctx: JetContext,
    pub algebras: BTreeMap<String, LieAlgebra>,
    pub metrics: BTreeMap<String, Metric>,
    pub gauge: Option<GaugeDecl>,
    pub lagrangians: BTreeMap<String, Expr>,
    pub exprs: BTreeMap<String, Expr>,
    pub forms: BTreeMap<String, Form>,
    pub vectors: BTreeMap<String, VectorField>,
    /// Γ^i_λ indexed `[i][λ]`.
    pub connections: BTreeMap<String, Vec<Vec<Expr>>>,
    pub solderings: BTreeMap<String, Vec<Vec<Expr>>>,
    pub commands: Vec<Vec<String>>,
}

fn shift(e: anyhow::Error, pos: Pos) -> anyhow::Error {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse { line, col, msg }) if pos.line > 0 => {
            let _ = line;
            perr(Pos { line: pos.line, col: pos.col + col - 1 }, msg.clone())
        }
        _ => e,
    }
}

fn expr_at(ctx: &JetContext, src: &str, pos: Pos) -> anyhow::Result<Expr> {
    parse_expr(ctx, src, pos.line).map_err(|e| shift(e.into(), pos))
}

fn form_at(ctx: &JetContext, src: &str, pos: Pos) -> anyhow::Result<Form> {
    parse_form(ctx, src, pos.line).map_err(|e| shift(e.into(), pos))
}

fn rational_at(src: &str, pos: Pos) -> anyhow::Result<Rational> {
    let empty = JetContext::new(0);
    expr_at(&empty, src, pos)?.as_constant().ok_or_else(|| perr(pos, format!("`{src}` is not a rational constant")))
}

fn algebra(a: &RawAlgebra) -> anyhow::Result<LieAlgebra> {
    if let Some(b) = &a.builtin {
        return LieAlgebra::by_name(b).ok_or_else(|| perr(a.pos, format!("unknown algebra `{b}`")));
    }
    let d = a.dim.ok_or_else(|| perr(a.pos, "algebra needs `dim`"))?;
    let zero = Rational::from_integer(0.into());
    let mut c = vec![vec![vec![zero.clone(); d]; d]; d];
    for (r, p, q, v) in &a.structure_constants {
        if [*r, *p, *q].iter().any(|&i| i == 0 || i > d) {
            return Err(perr(a.pos, format!("structure constant index ({r}, {p}, {q}) out of range")));
        }
        let v = rational_at(v, a.pos)?;
        c[r - 1][q - 1][p - 1] = -v.clone();
        c[r - 1][p - 1][q - 1] = v;
    }
    let k = match &a.bilinear_form {
        Some(rows) => {
            if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                return Err(perr(a.pos, "bilinear form must be dim × dim"));
            }
            Some(rows.iter().map(|r| r.iter().map(|v| rational_at(v, a.pos)).collect()).collect::<anyhow::Result<_>>()?)
        }
        None => None,
    };
    LieAlgebra::new(c, k).map_err(|e| perr(a.pos, e.to_string()))
}

impl Workspace {
    pub fn build(raw: &Raw) -> anyhow::Result<Workspace> {
        let names: Vec<&str> = raw.base.iter().map(String::as_str).collect();
        for n in &names {
            if RESERVED.contains(n) {
                bail!("`{n}` is reserved");
            }
        }
        let mut ctx = JetContext::with_coords(&names)?;
        let mut algebras = BTreeMap::new();
        for a in &raw.algebras {
            if algebras.insert(a.name.clone(), algebra(a)?).is_some() {
                return Err(perr(a.pos, format!("algebra `{}` declared twice", a.name)));
            }
        }
        let mut gauge = None;
        if let Some(g) = &raw.gauge {
            let alg = algebras
                .get(&g.algebra)
                .cloned()
                .or_else(|| LieAlgebra::by_name(&g.algebra))
                .ok_or_else(|| perr(g.pos, format!("unknown algebra `{}`", g.algebra)))?;
            let mut gc = GaugeContext::new(alg, ctx.n)?;
            gc.ctx.coords = ctx.coords.clone();
            ctx = gc.ctx.clone();
            let coupling = match &g.coupling {
                Some(c) => rational_at(c, g.pos)?,
                None => Rational::from_integer(1.into()),
            };
            gauge = Some(GaugeDecl { gauge: gc, metric: g.metric.clone(), coupling });
        }
        for f in &raw.fields {
            if RESERVED.contains(&f.name.as_str()) {
                return Err(perr(f.pos, format!("`{}` is reserved", f.name)));
            }
            let r = match &f.antifield_of {
                Some(p) => {
                    if f.parity.is_some() || f.ghost.is_some() {
                        return Err(perr(f.pos, "an antifield takes parity and ghost number from its partner"));
                    }
                    let i = ctx.field_index(p).ok_or_else(|| perr(f.pos, format!("unknown field `{p}`")))?;
                    ctx.add_antifield(&f.name, i)
                }
                None => ctx.add_field(&f.name, f.parity.as_deref() == Some("odd"), f.ghost.unwrap_or(0)),
            };
            r.map_err(|e| perr(f.pos, e.to_string()))?;
        }
        for f in &raw.funcs {
            if RESERVED.contains(&f.name.as_str()) {
                return Err(perr(f.pos, format!("`{}` is reserved", f.name)));
            }
            let deps: Vec<usize> = f
                .args
                .iter()
                .map(|a| ctx.coord_index(a.trim()).ok_or_else(|| perr(f.pos, format!("`{a}` is not a base coordinate"))))
                .collect::<anyhow::Result<_>>()?;
            ctx.add_func(&f.name, &deps).map_err(|e| perr(f.pos, e.to_string()))?;
        }
        ctx.max_order = raw.max_order;
        if let Some(g) = &mut gauge {
            g.gauge.ctx = ctx.clone();
        }

        let mut metrics = BTreeMap::new();
        for m in &raw.metrics {
            let n = ctx.n;
            let at = |k: usize| m.entry_pos.get(k).copied().unwrap_or(m.pos);
            let g = if let Some(d) = &m.diag {
                if d.len() != n {
                    return Err(perr(m.pos, format!("metric needs {n} diagonal entries")));
                }
                let mut g = vec![vec![Expr::zero(); n]; n];
                for (i, s) in d.iter().enumerate() {
                    g[i][i] = expr_at(&ctx, s, at(i))?;
                }
                g
            } else if let Some(rows) = &m.matrix {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(perr(m.pos, format!("metric must be {n} × {n}")));
                }
                let mut k = 0;
                let mut g = Vec::new();
                for r in rows {
                    let mut row = Vec::new();
                    for s in r {
                        row.push(expr_at(&ctx, s, at(k))?);
                        k += 1;
                    }
                    g.push(row);
                }
                g
            } else {
                return Err(perr(m.pos, "metric needs `diag` or `matrix`"));
            };
            let metric = Metric::new(g).map_err(|e| perr(m.pos, e.to_string()))?;
            if metrics.insert(m.name.clone(), metric).is_some() {
                return Err(perr(m.pos, format!("metric `{}` declared twice", m.name)));
            }
        }
        if let Some(g) = &gauge {
            if let Some(m) = &g.metric {
                if !metrics.contains_key(m) {
                    bail!("unknown metric `{m}` in gauge declaration");
                }
            }
        }

        let mut ws = Workspace {
            ctx,
            algebras,
            metrics,
            gauge,
            lagrangians: BTreeMap::new(),
            exprs: BTreeMap::new(),
            forms: BTreeMap::new(),
            vectors: BTreeMap::new(),
            connections: BTreeMap::new(),
            solderings: BTreeMap::new(),
            commands: raw.run.clone(),
        };
        let mut taken: Vec<String> = ws.algebras.keys().chain(ws.metrics.keys()).cloned().collect();
        for o in &raw.objects {
            if taken.contains(&o.name) {
                return Err(perr(o.pos, format!("name `{}` already used", o.name)));
            }
            taken.push(o.name.clone());
            ws.add_object(o)?;
        }
        Ok(ws)
    }

    fn add_object(&mut self, o: &RawObject) -> anyhow::Result<()> {
        let ctx = &self.ctx;
        let value = || o.value.as_deref().ok_or_else(|| perr(o.pos, format!("{} `{}` needs a value", o.kind.keyword(), o.name)));
        let comps = || o.components.as_ref().ok_or_else(|| perr(o.pos, format!("{} `{}` needs components", o.kind.keyword(), o.name)));
        match o.kind {
            Kind::Lagrangian => {
                let e = expr_at(ctx, value()?, o.pos)?;
                if !e.is_even() {
                    return Err(perr(o.pos, "a Lagrangian density must be even"));
                }
                self.lagrangians.insert(o.name.clone(), e);
            }
            Kind::Expr => {
                self.exprs.insert(o.name.clone(), expr_at(ctx, value()?, o.pos)?);
            }
            Kind::Form => {
                self.forms.insert(o.name.clone(), form_at(ctx, value()?, o.pos)?);
            }
            Kind::Vector => {
                let mut u = VectorField::zero(ctx.n);
                for (k, v) in comps()? {
                    let p = o.component_pos.get(k).copied().unwrap_or(o.pos);
                    let e = expr_at(ctx, v, p)?;
                    if let Some(d) = ctx.coord_index(k) {
                        u = u.with_base(d, e);
                    } else if let Some(i) = ctx.field_index(k) {
                        u = u.with_fibre(ctx.var0(i), e);
                    } else {
                        return Err(perr(p, format!("`{k}` is neither a coordinate nor a field")));
                    }
                }
                self.vectors.insert(o.name.clone(), u);
            }
            Kind::Connection | Kind::Soldering => {
                let mut g = vec![vec![Expr::zero(); ctx.n]; ctx.m()];
                for (k, v) in comps()? {
                    let p = o.component_pos.get(k).copied().unwrap_or(o.pos);
                    let (i, l) = component_key(ctx, k).ok_or_else(|| perr(p, format!("expected `field[coordinate]`, found `{k}`")))?;
                    g[i][l] = expr_at(ctx, v, p)?;
                }
                let map = if o.kind == Kind::Connection { &mut self.connections } else { &mut self.solderings };
                map.insert(o.name.clone(), g);
            }
        }
        Ok(())
    }

    /// The unique object of a kind when no name is given.
    pub fn pick<'a, T>(map: &'a BTreeMap<String, T>, name: Option<&str>, what: &str) -> anyhow::Result<(&'a str, &'a T)> {
        match name {
            Some(n) => map.get_key_value(n).map(|(k, v)| (k.as_str(), v)).ok_or_else(|| anyhow!("no {what} named `{n}`")),
            None => {
                let mut it = map.iter();
                match (it.next(), it.next()) {
                    (Some((k, v)), None) => Ok((k.as_str(), v)),
                    (None, _) => Err(anyhow!("no {what} declared")),
                    _ => Err(anyhow!("several {what}s declared; name one")),
                }
            }
        }
    }
}

/// `y[x1]` as (field, direction).
fn component_key(ctx: &JetContext, key: &str) -> Option<(usize, usize)> {
    let (f, rest) = key.split_once('[')?;
    let c = rest.strip_suffix(']')?;
    Some((ctx.field_index(f)?, ctx.coord_index(c)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# sample\nbase t x\nfield y\nfield c odd ghost 1\nantifield cs of c\nfunc f(t)\n\
        algebra g = { dim 2; c[1,1,2] = 1; k[1,1] = 0 }\nmetric eta = diag(1, -1)\n\
        lagrangian L = 1/2*y[t]^2 - 1/2*y[x]^2 + f*y\nform F = y*dx[t] /\\ th[y]\n\
        vector u = { t: 1, y: x }\nconnection G = { y[t]: y, y[x]: t }\nrun el L\n";

    #[test]
    fn text_declarations() {
        let raw = parse_text(SAMPLE).unwrap();
        let ws = Workspace::build(&raw).unwrap();
        assert_eq!(ws.ctx.n, 2);
        assert_eq!(ws.ctx.m(), 3);
        assert_eq!(ws.ctx.ghost(2), -2);
        assert_eq!(ws.lagrangians.len(), 1);
        assert_eq!(ws.connections["G"][0][0], ws.ctx.jet(0, &[]));
        assert_eq!(ws.commands, vec![vec!["el".to_string(), "L".to_string()]]);
    }

    #[test]
    fn json_mirror_round_trip() {
        let raw = parse_text(SAMPLE).unwrap();
        let json = serde_json::to_string_pretty(&raw).unwrap();
        let back = parse_json(&json).unwrap();
        assert_eq!(Workspace::build(&back).unwrap().lagrangians, Workspace::build(&raw).unwrap().lagrangians);
        let text = back.to_text();
        let again = parse_text(&text).unwrap();
        assert_eq!(serde_json::to_value(&again).unwrap(), serde_json::to_value(&raw).unwrap());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_json(r#"{"base": ["t"], "colour": 1}"#).is_err());
        let e = parse_text("base t\nfeld y\n").unwrap_err();
        assert_eq!(e.downcast_ref::<Error>(), Some(&Error::Parse { line: 2, col: 1, msg: "unknown statement `feld`".into() }));
    }

    #[test]
    fn expression_errors_point_into_the_line() {
        let raw = parse_text("base t\nfield y\nlagrangian L = y[t]^2 + z\n").unwrap();
        let e = Workspace::build(&raw).unwrap_err();
        assert_eq!(e.downcast_ref::<Error>(), Some(&Error::Parse { line: 3, col: 25, msg: "unknown symbol `z`".into() }));
    }

    #[test]
    fn gauge_fields_come_first() {
        let raw = parse_text("base t x\nalgebra g = su2\nmetric m = diag(1, 1)\ngauge g metric m\nfield y\n").unwrap();
        let ws = Workspace::build(&raw).unwrap();
        assert_eq!(ws.ctx.fields[0].name, "a1_1");
        assert_eq!(ws.ctx.field_index("y"), Some(6));
        assert_eq!(ws.gauge.unwrap().gauge.ctx.coords, vec!["t", "x"]);
    }

    #[test]
    fn invalid_algebra() {
        let raw = parse_text("base t\nalgebra g = { dim 3; c[3,1,2] = 1; c[1,1,3] = 1 }\n").unwrap();
        assert!(Workspace::build(&raw).is_err());
    }
}
