use std::collections::BTreeSet;

use super::expr::{Atom, Expr, Func, Sym, Var};
use super::multi_index::{MultiIndex, MAX_DIM};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: String,
    pub odd: bool,
    pub ghost: i32,
    pub antifield_of: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuncDecl {
    pub name: String,
    pub deps: u8,
}

/// Declarations of base coordinates, fields and opaque functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetContext {
    pub n: usize,
    pub coords: Vec<String>,
    pub fields: Vec<FieldDecl>,
    pub funcs: Vec<FuncDecl>,
    /// Soft threshold: exceeding it produces a warning, never a truncation.
    pub max_order: Option<usize>,
}

impl JetContext {
    /// Base coordinates named x1..xn.
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_DIM, "base dimension {n} exceeds {MAX_DIM}");
        JetContext {
            n,
            coords: (1..=n).map(|i| format!("x{i}")).collect(),
            fields: Vec::new(),
            funcs: Vec::new(),
            max_order: None,
        }
    }

    pub fn with_coords(names: &[&str]) -> Result<Self> {
        if names.len() > MAX_DIM {
            return Err(Error::DegreeError(format!("at most {MAX_DIM} base coordinates")));
        }
        let mut ctx = JetContext::new(0);
        for name in names {
            ctx.check_fresh(name)?;
            ctx.coords.push(name.to_string());
        }
        ctx.n = names.len();
        Ok(ctx)
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if self.coords.iter().any(|c| c == name)
            || self.fields.iter().any(|f| f.name == name)
            || self.funcs.iter().any(|f| f.name == name)
        {
            return Err(Error::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    pub fn add_field(&mut self, name: &str, odd: bool, ghost: i32) -> Result<usize> {
        self.check_fresh(name)?;
        self.fields.push(FieldDecl { name: name.to_string(), odd, ghost, antifield_of: None });
        Ok(self.fields.len() - 1)
    }

    pub fn even_field(&mut self, name: &str) -> Result<usize> {
        self.add_field(name, false, 0)
    }

    pub fn odd_field(&mut self, name: &str, ghost: i32) -> Result<usize> {
        self.add_field(name, true, ghost)
    }

    /// Antifield Φ* of a field Φ: opposite parity, gh Φ* = −gh Φ − 1.
    pub fn add_antifield(&mut self, name: &str, partner: usize) -> Result<usize> {
        let p = self.fields.get(partner).ok_or_else(|| Error::UnknownSymbol(format!("field #{partner}")))?.clone();
        self.check_fresh(name)?;
        self.fields.push(FieldDecl { name: name.to_string(), odd: !p.odd, ghost: -p.ghost - 1, antifield_of: Some(partner) });
        Ok(self.fields.len() - 1)
    }

    pub fn add_func(&mut self, name: &str, deps: &[usize]) -> Result<()> {
        self.check_fresh(name)?;
        let mut mask = 0u8;
        for &d in deps {
            if d >= self.n {
                return Err(Error::UnknownSymbol(format!("direction {d}")));
            }
            mask |= 1 << d;
        }
        self.funcs.push(FuncDecl { name: name.to_string(), deps: mask });
        Ok(())
    }

    pub fn field_index(&self, name: &str) -> Option<usize> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn func_decl(&self, name: &str) -> Option<&FuncDecl> {
        self.funcs.iter().find(|f| f.name == name)
    }

    pub fn m(&self) -> usize {
        self.fields.len()
    }

    pub fn ghost(&self, field: usize) -> i32 {
        self.fields[field].ghost
    }

    pub fn var(&self, field: usize, index: MultiIndex) -> Var {
        Var::new(field, self.fields[field].odd, index)
    }

    pub fn var0(&self, field: usize) -> Var {
        self.var(field, MultiIndex::EMPTY)
    }

    /// y^i_Λ as an expression.
    pub fn jet(&self, field: usize, dirs: &[usize]) -> Expr {
        Expr::var(self.var(field, MultiIndex::from_directions(dirs.iter().copied())))
    }

    pub fn jet_named(&self, name: &str, dirs: &[usize]) -> Result<Expr> {
        let i = self.field_index(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        Ok(self.jet(i, dirs))
    }

    pub fn func(&self, name: &str) -> Result<Expr> {
        let d = self.func_decl(name).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        Ok(Expr::func(Func::new(name, d.deps)))
    }

    /// Checks that every symbol of `e` is declared here.
    pub fn validate(&self, e: &Expr) -> Result<()> {
        let mut err = None;
        e.visit_syms(&mut |s| {
            if err.is_some() {
                return;
            }
            match s {
                Sym::Base(l) if *l as usize >= self.n => err = Some(format!("x#{}", l + 1)),
                Sym::Jet(v) => {
                    if let Some(msg) = self.check_var(v) {
                        err = Some(msg);
                    }
                }
                Sym::Atom(Atom::Func(f)) => match self.func_decl(&f.name) {
                    None => err = Some(f.name.to_string()),
                    Some(d) if d.deps != f.deps => err = Some(f.name.to_string()),
                    _ => {}
                },
                _ => {}
            }
        });
        if err.is_none() {
            for v in e.vars() {
                if let Some(msg) = self.check_var(&v) {
                    err = Some(msg);
                    break;
                }
            }
        }
        match err {
            Some(s) => Err(Error::UnknownSymbol(s)),
            None => Ok(()),
        }
    }

    fn check_var(&self, v: &Var) -> Option<String> {
        let f = match self.fields.get(v.field as usize) {
            Some(f) => f,
            None => return Some(format!("field #{}", v.field)),
        };
        if f.odd != v.odd {
            return Some(format!("{} with wrong parity", f.name));
        }
        if v.index.max_direction().is_some_and(|d| d >= self.n) {
            return Some(format!("{} with direction beyond dimension {}", f.name, self.n));
        }
        None
    }

    /// Warning text when `e` uses jets above the soft order threshold.
    pub fn order_warning(&self, e: &Expr) -> Option<String> {
        let k = self.max_order?;
        let o = e.jet_order();
        (o > k).then(|| format!("jet order {o} exceeds the declared threshold {k}"))
    }

    pub fn ghost_number(&self, e: &Expr) -> Option<i32> {
        e.ghost_number(&|f| self.fields[f].ghost)
    }

    /// Names in use, for fresh-name generation.
    pub fn names(&self) -> BTreeSet<String> {
        self.coords
            .iter()
            .cloned()
            .chain(self.fields.iter().map(|f| f.name.clone()))
            .chain(self.funcs.iter().map(|f| f.name.clone()))
            .collect()
    }
}
