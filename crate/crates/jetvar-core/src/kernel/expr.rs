use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::multi_index::MultiIndex;
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// A jet coordinate y^i_Λ. Parity is carried with the variable so that
/// Grassmann signs never need a context lookup.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var {
    pub field: u16,
    pub odd: bool,
    pub index: MultiIndex,
}

impl Var {
    pub fn new(field: usize, odd: bool, index: MultiIndex) -> Self {
        Var { field: field as u16, odd, index }
    }

    pub fn plus(&self, direction: usize) -> Self {
        Var { index: self.index.plus(direction), ..*self }
    }

    pub fn with_index(&self, index: MultiIndex) -> Self {
        Var { index, ..*self }
    }

    pub fn order(&self) -> usize {
        self.index.order()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ElemKind {
    Sin,
    Cos,
    Exp,
    Ln,
}

impl ElemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ElemKind::Sin => "sin",
            ElemKind::Cos => "cos",
            ElemKind::Exp => "exp",
            ElemKind::Ln => "ln",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "sin" => ElemKind::Sin,
            "cos" => ElemKind::Cos,
            "exp" => ElemKind::Exp,
            "ln" => ElemKind::Ln,
            _ => return None,
        })
    }
}

/// An opaque smooth function of the base coordinates, possibly differentiated.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Func {
    pub name: Arc<str>,
    pub derivs: MultiIndex,
    /// Bit mask of the base directions the function depends on.
    pub deps: u8,
}

impl Func {
    pub fn new(name: &str, deps: u8) -> Self {
        Func { name: Arc::from(name), derivs: MultiIndex::EMPTY, deps }
    }

    pub fn depends_on(&self, direction: usize) -> bool {
        direction < 8 && self.deps & (1 << direction) != 0
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Func(Func),
    Elem(ElemKind, Arc<Expr>),
    /// base^(1/den); with den = 1 it only occurs with negative powers.
    Root(Arc<Expr>, u32),
}

/// Even factor of a monomial. Variant order gives base < jet < atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sym {
    Base(u8),
    Jet(Var),
    Atom(Atom),
}

impl Sym {
    fn allows_negative_power(&self) -> bool {
        !matches!(self, Sym::Jet(_))
    }
}

/// Product of even factors with integer powers followed by a strictly
/// increasing word of odd variables.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial {
    even: Vec<(Sym, i32)>,
    odd: Vec<Var>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn even_factors(&self) -> &[(Sym, i32)] {
        &self.even
    }

    pub fn odd_factors(&self) -> &[Var] {
        &self.odd
    }

    pub fn is_one(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.odd.len() % 2 == 1
    }

    /// Builds a monomial from unsorted parts. Returns the sign produced by
    /// sorting the odd word, or None when an odd factor repeats.
    pub fn from_parts(even: Vec<(Sym, i32)>, odd: Vec<Var>) -> Option<(Monomial, bool)> {
        let mut acc: BTreeMap<Sym, i32> = BTreeMap::new();
        for (s, p) in even {
            *acc.entry(s).or_insert(0) += p;
        }
        let even: Vec<(Sym, i32)> = acc.into_iter().filter(|(_, p)| *p != 0).collect();
        let (odd, neg) = sort_odd(odd)?;
        Some((Monomial { even, odd }, neg))
    }

    pub(crate) fn from_even(even: Vec<(Sym, i32)>) -> Monomial {
        Monomial { even, odd: Vec::new() }
    }

    /// The even part alone.
    pub fn even_part(&self) -> Monomial {
        Monomial { even: self.even.clone(), odd: Vec::new() }
    }

    /// The odd word alone.
    pub fn odd_part(&self) -> Monomial {
        Monomial { even: Vec::new(), odd: self.odd.clone() }
    }

    pub(crate) fn with_parts(even: Vec<(Sym, i32)>, odd: Vec<Var>) -> Monomial {
        Monomial { even, odd }
    }
}

/// Sorts an odd word; returns the sorted word and whether the permutation
/// was odd, or None when a factor repeats.
fn sort_odd(mut word: Vec<Var>) -> Option<(Vec<Var>, bool)> {
    let mut neg = false;
    // insertion sort counting transpositions
    for i in 1..word.len() {
        let mut j = i;
        while j > 0 && word[j - 1] > word[j] {
            word.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
        if j > 0 && word[j - 1] == word[j] {
            return None;
        }
    }
    for w in word.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((word, neg))
}

fn merge_even(a: &[(Sym, i32)], b: &[(Sym, i32)]) -> Vec<(Sym, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let p = a[i].1 + b[j].1;
                if p != 0 {
                    out.push((a[i].0.clone(), p));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn merge_odd(a: &[Var], b: &[Var]) -> Option<(Vec<Var>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut neg = false;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // b[j] jumps over the remaining a's
                if (a.len() - i) % 2 == 1 {
                    neg = !neg;
                }
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, neg))
}

/// Canonical scalar expression: a sum of monomials with nonzero rational
/// coefficients, keyed by the fixed monomial order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn constant(q: Rational) -> Self {
        Expr::term(Monomial::one(), q)
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Expr::constant(rat(n, d))
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    /// Base coordinate x^λ.
    pub fn base(direction: usize) -> Self {
        Expr::term(Monomial::from_even(vec![(Sym::Base(direction as u8), 1)]), Rational::one())
    }

    /// Jet coordinate y^i_Λ of either parity.
    pub fn var(v: Var) -> Self {
        let m = if v.odd {
            Monomial::with_parts(Vec::new(), vec![v])
        } else {
            Monomial::from_even(vec![(Sym::Jet(v), 1)])
        };
        Expr::term(m, Rational::one())
    }

    pub fn func(f: Func) -> Self {
        Expr::atom(Atom::Func(f))
    }

    pub(crate) fn atom(a: Atom) -> Self {
        Expr::term(Monomial::from_even(vec![(Sym::Atom(a), 1)]), Rational::one())
    }

    pub(crate) fn sym_power(s: Sym, p: i32) -> Self {
        if p == 0 {
            return Expr::one();
        }
        Expr::term(Monomial::from_even(vec![(s, p)]), Rational::one())
    }

    pub fn from_monomial(m: &Monomial) -> Self {
        Expr::term(m.clone(), Rational::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact structural zero.
    pub fn is_zero_exact(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Single-monomial view.
    pub fn as_monomial(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Identity on canonical values; kept as the explicit normalization entry point.
    pub fn normalize(&self) -> Expr {
        self.clone()
    }

    pub fn scale(&self, q: &Rational) -> Expr {
        if q.is_zero() {
            return Expr::zero();
        }
        Expr { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn add_ref(&self, other: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn mul_ref(&self, other: &Expr) -> Expr {
        let mut out = Expr::zero();
        let mut pending: Vec<(Monomial, Rational)> = Vec::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let Some((odd, neg)) = merge_odd(&ma.odd, &mb.odd) else { continue };
                let even = merge_even(&ma.even, &mb.even);
                let mut c = ca * cb;
                if neg {
                    c = -c;
                }
                let m = Monomial { even, odd };
                if needs_root_fixup(&m) {
                    pending.push((m, c));
                } else {
                    out.add_term(m, c);
                }
            }
        }
        for (m, c) in pending {
            out = out.add_ref(&root_fixup(m, c));
        }
        out
    }

    /// Non-negative integer power by repeated multiplication; negative
    /// powers go through `pow_rational`.
    pub fn pow_int(&self, k: i64) -> Result<Expr> {
        if k < 0 {
            return self.pow_rational(&int(k));
        }
        let mut out = Expr::one();
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(out)
    }

    /// Rational power. Exact when the base is a constant with a rational
    /// root or a monomial without jet factors; otherwise a root atom.
    pub fn pow_rational(&self, q: &Rational) -> Result<Expr> {
        if !self.is_even() {
            return Err(Error::OddArgument("power".into()));
        }
        if q.is_integer() && !q.is_negative() {
            return self.pow_int(q.to_integer().to_i64().ok_or(Error::Overflow)?);
        }
        if self.is_zero_exact() {
            return Err(Error::DivisionByZero);
        }
        let num = q.numer().to_i64().ok_or(Error::Overflow)?;
        let den = q.denom().to_u32().ok_or(Error::Overflow)?;
        if let Some((m, c)) = self.as_monomial() {
            let jet_free = m.even.iter().all(|(s, _)| s.allows_negative_power());
            let divisible = m.even.iter().all(|(_, p)| (*p as i64 * num) % den as i64 == 0);
            if jet_free && divisible {
                if let Some(cq) = rational_power(c, num, den) {
                    let even = m
                        .even
                        .iter()
                        .map(|(s, p)| (s.clone(), ((*p as i64 * num) / den as i64) as i32))
                        .collect();
                    return Ok(Expr::term(Monomial::from_even(even), cq));
                }
            }
        }
        // Pull out a rational content so that the atom base is primitive.
        let lead = self.terms.values().next().unwrap().clone();
        let (base, content) = if den == 1 && !lead.is_one() {
            (self.scale(&lead.recip()), rational_power(&lead, num, 1))
        } else {
            (self.clone(), Some(Rational::one()))
        };
        let content = content.ok_or(Error::Overflow)?;
        let atom = Sym::Atom(Atom::Root(Arc::new(base), den));
        let num32 = i32::try_from(num).map_err(|_| Error::Overflow)?;
        let m = Monomial::from_even(vec![(atom, num32)]);
        let e = if needs_root_fixup(&m) { root_fixup(m, content) } else { Expr::term(m, content) };
        Ok(e)
    }

    pub fn recip(&self) -> Result<Expr> {
        self.pow_rational(&int(-1))
    }

    /// sin, cos, exp or ln applied to an even argument.
    pub fn elem(kind: ElemKind, arg: &Expr) -> Result<Expr> {
        if !arg.is_even() {
            return Err(Error::OddArgument(kind.name().into()));
        }
        if let Some(c) = arg.as_constant() {
            if c.is_zero() {
                return match kind {
                    ElemKind::Sin => Ok(Expr::zero()),
                    ElemKind::Cos | ElemKind::Exp => Ok(Expr::one()),
                    ElemKind::Ln => Err(Error::DivisionByZero),
                };
            }
            if kind == ElemKind::Ln && c.is_one() {
                return Ok(Expr::zero());
            }
        }
        Ok(Expr::atom(Atom::Elem(kind, Arc::new(arg.clone()))))
    }

    pub fn sin(&self) -> Expr {
        Expr::elem(ElemKind::Sin, self).expect("sin of an odd expression")
    }

    pub fn cos(&self) -> Expr {
        Expr::elem(ElemKind::Cos, self).expect("cos of an odd expression")
    }

    pub fn exp(&self) -> Expr {
        Expr::elem(ElemKind::Exp, self).expect("exp of an odd expression")
    }

    pub fn ln(&self) -> Expr {
        Expr::elem(ElemKind::Ln, self).expect("ln of an odd or zero expression")
    }

    /// True when every monomial has an even number of odd factors.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| !m.is_odd())
    }

    pub fn is_odd(&self) -> bool {
        !self.is_empty() && self.terms.keys().all(|m| m.is_odd())
    }

    /// Splits into Grassmann-even and Grassmann-odd parts.
    pub fn split_parity(&self) -> (Expr, Expr) {
        let mut even = Expr::zero();
        let mut odd = Expr::zero();
        for (m, c) in &self.terms {
            if m.is_odd() {
                odd.terms.insert(m.clone(), c.clone());
            } else {
                even.terms.insert(m.clone(), c.clone());
            }
        }
        (even, odd)
    }

    /// Groups monomials by the part selected by `pick` (plus the odd word
    /// when `with_odd`), returning key → cofactor.
    pub fn collect_by<F: Fn(&Sym) -> bool>(&self, pick: F, with_odd: bool) -> BTreeMap<Monomial, Expr> {
        let mut out: BTreeMap<Monomial, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (sel, rest): (Vec<_>, Vec<_>) = m.even.iter().cloned().partition(|(s, _)| pick(s));
            let (kodd, rodd) = if with_odd { (m.odd.clone(), Vec::new()) } else { (Vec::new(), m.odd.clone()) };
            let key = Monomial { even: sel, odd: kodd };
            let val = Monomial { even: rest, odd: rodd };
            out.entry(key).or_default().add_term(val, c.clone());
        }
        out.retain(|_, v| !v.is_empty());
        out
    }

    /// Every jet variable occurring anywhere, including inside atoms.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_syms(&mut |s| {
            if let Sym::Jet(v) = s {
                out.insert(*v);
            }
        });
        for m in self.terms.keys() {
            out.extend(m.odd.iter().copied());
        }
        out
    }

    /// Calls `f` on every even factor symbol, recursing into atoms.
    pub fn visit_syms(&self, f: &mut dyn FnMut(&Sym)) {
        for m in self.terms.keys() {
            for (s, _) in &m.even {
                f(s);
                if let Sym::Atom(a) = s {
                    match a {
                        Atom::Func(_) => {}
                        Atom::Elem(_, arg) => arg.visit_syms(f),
                        Atom::Root(b, _) => b.visit_syms(f),
                    }
                }
            }
        }
        // even atom arguments may still contain pairs of odd factors
        for m in self.terms.keys() {
            for (s, _) in &m.even {
                if let Sym::Atom(Atom::Elem(_, arg)) | Sym::Atom(Atom::Root(arg, _)) = s {
                    for inner in arg.terms.keys() {
                        for v in &inner.odd {
                            f(&Sym::Jet(*v));
                        }
                    }
                }
            }
        }
    }

    /// Highest jet order present, 0 for an expression without jets.
    pub fn jet_order(&self) -> usize {
        self.vars().iter().map(|v| v.order()).max().unwrap_or(0)
    }

    pub fn has_atoms(&self) -> bool {
        let mut found = false;
        self.visit_syms(&mut |s| {
            if matches!(s, Sym::Atom(_)) {
                found = true;
            }
        });
        found
    }

    /// True when elementary or root atoms occur, so that exact cancellation
    /// is not guaranteed.
    pub fn has_transcendental(&self) -> bool {
        let mut found = false;
        self.visit_syms(&mut |s| {
            if matches!(s, Sym::Atom(Atom::Elem(..)) | Sym::Atom(Atom::Root(..))) {
                found = true;
            }
        });
        found
    }

    /// Polynomial in base coordinates and jets with no atoms and no negative powers.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.even.iter().all(|(s, p)| *p > 0 && !matches!(s, Sym::Atom(_))))
    }

    /// Replaces symbols. `f` sees base coordinates, jets (of both parities)
    /// and function atoms; elementary and root atoms are rebuilt from their
    /// substituted arguments.
    pub fn substitute(&self, f: &dyn Fn(&Sym) -> Option<Expr>) -> Result<Expr> {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut prod = Expr::constant(c.clone());
            for (s, p) in &m.even {
                let base = match s {
                    Sym::Atom(Atom::Elem(k, arg)) => match f(s) {
                        Some(e) => e,
                        None => Expr::elem(*k, &arg.substitute(f)?)?,
                    },
                    Sym::Atom(Atom::Root(b, den)) => match f(s) {
                        Some(e) => e,
                        None => b.substitute(f)?.pow_rational(&rat(1, *den as i64))?,
                    },
                    _ => match f(s) {
                        Some(e) => e,
                        None => Expr::sym_power(s.clone(), 1),
                    },
                };
                let powered = if *p >= 0 { base.pow_int(*p as i64)? } else { base.pow_rational(&int(*p as i64))? };
                prod = &prod * &powered;
            }
            for v in &m.odd {
                let e = f(&Sym::Jet(*v)).unwrap_or_else(|| Expr::var(*v));
                prod = &prod * &e;
            }
            out += prod;
        }
        Ok(out)
    }

    /// Substitutes jet variables only.
    pub fn substitute_vars(&self, f: &dyn Fn(&Var) -> Option<Expr>) -> Expr {
        self.substitute(&|s| match s {
            Sym::Jet(v) => f(v),
            _ => None,
        })
        .expect("substituting jets never divides")
    }

    /// Ghost number if homogeneous, given the ghost number of each field.
    pub fn ghost_number(&self, gh: &dyn Fn(usize) -> i32) -> Option<i32> {
        let mut found: Option<i32> = None;
        for m in self.terms.keys() {
            let mut g = 0;
            for (s, p) in &m.even {
                if let Sym::Jet(v) = s {
                    g += gh(v.field as usize) * p;
                }
            }
            for v in &m.odd {
                g += gh(v.field as usize);
            }
            match found {
                None => found = Some(g),
                Some(h) if h != g => return None,
                _ => {}
            }
        }
        Some(found.unwrap_or(0))
    }
}

fn rational_power(c: &Rational, num: i64, den: u32) -> Option<Rational> {
    let root = |x: &BigInt| -> Option<BigInt> {
        if den == 1 {
            return Some(x.clone());
        }
        if x.is_negative() {
            if den % 2 == 0 {
                return None;
            }
            let r = (-x).nth_root(den);
            return (r.pow(den) == -x).then(|| -r);
        }
        let r = x.nth_root(den);
        (r.pow(den) == *x).then_some(r)
    };
    let rn = root(c.numer())?;
    let rd = root(c.denom())?;
    let base = BigRational::new(rn, rd);
    if num >= 0 {
        Some(num_traits::pow(base, num as usize))
    } else {
        if base.is_zero() {
            return None;
        }
        Some(num_traits::pow(base.recip(), (-num) as usize))
    }
}

fn needs_root_fixup(m: &Monomial) -> bool {
    m.even.iter().any(|(s, p)| matches!(s, Sym::Atom(Atom::Root(_, den)) if *p >= *den as i32))
}

/// Moves whole powers out of root atoms: (b^(1/d))^p = b^k (b^(1/d))^r.
fn root_fixup(m: Monomial, c: Rational) -> Expr {
    let mut keep = Vec::new();
    let mut extra = Expr::constant(c);
    for (s, p) in m.even {
        match &s {
            Sym::Atom(Atom::Root(b, den)) if p >= *den as i32 => {
                let d = *den as i32;
                let (k, r) = (p.div_euclid(d), p.rem_euclid(d));
                extra = &extra * &b.pow_int(k as i64).expect("non-negative power");
                if r != 0 {
                    keep.push((s, r));
                }
            }
            _ => keep.push((s, p)),
        }
    }
    let rest = Expr::term(Monomial { even: keep, odd: m.odd }, Rational::one());
    &extra * &rest
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        self.add_ref(&rhs)
    }
}

impl Add<&Expr> for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        self.add_ref(rhs)
    }
}

impl Add<&Expr> for Expr {
    type Output = Expr;
    fn add(mut self, rhs: &Expr) -> Expr {
        self += rhs.clone();
        self
    }
}

impl AddAssign for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: Expr) -> Expr {
        self -= rhs;
        self
    }
}

impl Sub<&Expr> for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub<&Expr> for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: &Expr) -> Expr {
        self -= rhs;
        self
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        self.mul_ref(&rhs)
    }
}

impl Mul<&Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        self.mul_ref(rhs)
    }
}

impl Mul<&Expr> for Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        self.mul_ref(rhs)
    }
}

impl Mul<Expr> for &Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        self.mul_ref(&rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.clone().neg()
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Expr {
        Expr::constant(q)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut out = Expr::zero();
        for e in iter {
            out += e;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(k: &[usize]) -> Expr {
        Expr::var(Var::new(0, false, MultiIndex::from_directions(k.iter().copied())))
    }

    fn c(field: usize) -> Expr {
        Expr::var(Var::new(field, true, MultiIndex::EMPTY))
    }

    #[test]
    fn even_commutativity() {
        let e = &(&y(&[]) * &y(&[0])) - &(&y(&[0]) * &y(&[]));
        assert!(e.is_zero_exact());
    }

    #[test]
    fn grassmann_antisymmetry() {
        let e = &(&c(1) * &c(2)) + &(&c(2) * &c(1));
        assert!(e.is_zero_exact());
        assert!((&c(1) * &c(1)).is_zero_exact());
    }

    #[test]
    fn like_terms_merge() {
        let e = &y(&[]).scale(&int(2)) + &y(&[]).scale(&int(3));
        assert_eq!(e, y(&[]).scale(&int(5)));
    }

    #[test]
    fn odd_sign_tracking() {
        // c2 c1 c3 = - c1 c2 c3
        let a = &(&c(2) * &c(1)) * &c(3);
        let b = &(&c(1) * &c(2)) * &c(3);
        assert_eq!(a, -b);
        // (c1 c2)(c3 c0) = c0 c1 c2 c3 with two jumps
        let l = &c(1) * &c(2);
        let r = &c(3) * &c(0);
        let full = &(&(&c(0) * &c(1)) * &c(2)) * &c(3);
        assert_eq!(&l * &r, -full);
    }

    #[test]
    fn negative_powers_of_base() {
        let x = Expr::base(0);
        let inv = x.recip().unwrap();
        assert_eq!(&x * &inv, Expr::one());
    }

    #[test]
    fn root_atoms_combine() {
        let b = &Expr::base(0) + &Expr::one();
        let s = b.pow_rational(&rat(1, 2)).unwrap();
        let si = b.pow_rational(&rat(-1, 2)).unwrap();
        assert_eq!(&s * &si, Expr::one());
        assert_eq!(&s * &s, b);
    }

    #[test]
    fn constant_roots() {
        assert_eq!(Expr::rational(4, 9).pow_rational(&rat(1, 2)).unwrap(), Expr::rational(2, 3));
        assert!(!Expr::int(2).pow_rational(&rat(1, 2)).unwrap().is_constant());
    }

    #[test]
    fn elementary_constants() {
        assert!(Expr::zero().sin().is_zero_exact());
        assert_eq!(Expr::zero().cos(), Expr::one());
        assert!(Expr::elem(ElemKind::Sin, &c(0)).is_err());
    }

    #[test]
    fn ghost_numbers() {
        let gh = |f: usize| if f == 0 { 0 } else { 1 };
        assert_eq!((&y(&[]) * &c(1)).ghost_number(&gh), Some(1));
        assert_eq!((&y(&[]) + &c(1)).ghost_number(&gh), None);
    }
}
