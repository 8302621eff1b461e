use std::collections::BTreeMap;

use super::expr::{int, rat, Atom, ElemKind, Expr, Func, Monomial, Sym, Var};
use super::multi_index::MultiIndex;

/// A graded derivation of the expression algebra, fixed by its values on
/// generators. Odd derivations act from the left.
pub trait Derivation {
    fn is_odd(&self) -> bool;
    fn on_base(&self, direction: usize) -> Expr;
    fn on_var(&self, v: &Var) -> Expr;
    fn on_func(&self, f: &Func) -> Expr;

    fn apply(&self, e: &Expr) -> Expr {
        apply(self, e)
    }
}

fn on_sym<D: Derivation + ?Sized>(d: &D, s: &Sym) -> Expr {
    match s {
        Sym::Base(l) => d.on_base(*l as usize),
        Sym::Jet(v) => d.on_var(v),
        Sym::Atom(Atom::Func(f)) => d.on_func(f),
        Sym::Atom(Atom::Elem(kind, arg)) => {
            let inner = apply(d, arg);
            if inner.is_empty() {
                return inner;
            }
            let outer = match kind {
                ElemKind::Sin => arg.cos(),
                ElemKind::Cos => -arg.sin(),
                ElemKind::Exp => arg.exp(),
                ElemKind::Ln => arg.recip().expect("ln of zero"),
            };
            &outer * &inner
        }
        Sym::Atom(Atom::Root(b, den)) => {
            let inner = apply(d, b);
            if inner.is_empty() {
                return inner;
            }
            let outer = Expr::sym_power(s.clone(), 1 - *den as i32).scale(&rat(1, *den as i64));
            &outer * &inner
        }
    }
}

/// Graded Leibniz expansion of `d` over a canonical expression.
pub fn apply<D: Derivation + ?Sized>(d: &D, e: &Expr) -> Expr {
    let mut out = Expr::zero();
    let odd_d = d.is_odd();
    for (m, c) in e.terms() {
        let even = m.even_factors();
        let odd = m.odd_factors();
        let odd_word = Expr::from_monomial(&Monomial::with_parts(Vec::new(), odd.to_vec()));
        for (i, (s, p)) in even.iter().enumerate() {
            let ds = on_sym(d, s);
            if ds.is_empty() {
                continue;
            }
            let mut rest = even.to_vec();
            if *p == 1 {
                rest.remove(i);
            } else {
                rest[i].1 = p - 1;
            }
            let left = Expr::term(Monomial::with_parts(rest, Vec::new()), c * int(*p as i64));
            out += &(&left * &ds) * &odd_word;
        }
        for (k, v) in odd.iter().enumerate() {
            let dv = d.on_var(v);
            if dv.is_empty() {
                continue;
            }
            let sign = if odd_d && k % 2 == 1 { -c.clone() } else { c.clone() };
            let left = Expr::term(Monomial::with_parts(even.to_vec(), odd[..k].to_vec()), sign);
            let right = Expr::from_monomial(&Monomial::with_parts(Vec::new(), odd[k + 1..].to_vec()));
            out += &(&left * &dv) * &right;
        }
    }
    out
}

/// Partial derivative ∂_λ along a base coordinate.
pub struct PartialBase(pub usize);

impl Derivation for PartialBase {
    fn is_odd(&self) -> bool {
        false
    }
    fn on_base(&self, direction: usize) -> Expr {
        if direction == self.0 { Expr::one() } else { Expr::zero() }
    }
    fn on_var(&self, _: &Var) -> Expr {
        Expr::zero()
    }
    fn on_func(&self, f: &Func) -> Expr {
        if f.depends_on(self.0) {
            Expr::func(Func { derivs: f.derivs.plus(self.0), ..f.clone() })
        } else {
            Expr::zero()
        }
    }
}

/// Partial derivative along a jet coordinate; a left derivative for odd ones.
pub struct PartialVar(pub Var);

impl Derivation for PartialVar {
    fn is_odd(&self) -> bool {
        self.0.odd
    }
    fn on_base(&self, _: usize) -> Expr {
        Expr::zero()
    }
    fn on_var(&self, v: &Var) -> Expr {
        if *v == self.0 { Expr::one() } else { Expr::zero() }
    }
    fn on_func(&self, _: &Func) -> Expr {
        Expr::zero()
    }
}

/// Total derivative d_λ = ∂_λ + y^i_{λ+Λ} ∂_i^Λ.
pub struct TotalDerivative(pub usize);

impl Derivation for TotalDerivative {
    fn is_odd(&self) -> bool {
        false
    }
    fn on_base(&self, direction: usize) -> Expr {
        PartialBase(self.0).on_base(direction)
    }
    fn on_var(&self, v: &Var) -> Expr {
        Expr::var(v.plus(self.0))
    }
    fn on_func(&self, f: &Func) -> Expr {
        PartialBase(self.0).on_func(f)
    }
}

/// Evolutionary derivation fixed by its values on the order-zero fields and
/// prolonged by total derivatives: v_Λ ↦ d_Λ(s v).
pub struct Evolutionary {
    pub odd: bool,
    pub generators: BTreeMap<u16, Expr>,
}

impl Evolutionary {
    pub fn new(odd: bool) -> Self {
        Evolutionary { odd, generators: BTreeMap::new() }
    }

    pub fn with(mut self, field: usize, value: Expr) -> Self {
        self.generators.insert(field as u16, value);
        self
    }
}

impl Derivation for Evolutionary {
    fn is_odd(&self) -> bool {
        self.odd
    }
    fn on_base(&self, _: usize) -> Expr {
        Expr::zero()
    }
    fn on_var(&self, v: &Var) -> Expr {
        match self.generators.get(&v.field) {
            Some(g) => total_derivative_multi(g, &v.index),
            None => Expr::zero(),
        }
    }
    fn on_func(&self, _: &Func) -> Expr {
        Expr::zero()
    }
}

/// Coordinate selector for `partial`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coord {
    Base(usize),
    Jet(Var),
}

pub fn partial(e: &Expr, coord: &Coord) -> Expr {
    match coord {
        Coord::Base(l) => partial_base(e, *l),
        Coord::Jet(v) => partial_var(e, v),
    }
}

pub fn partial_base(e: &Expr, direction: usize) -> Expr {
    apply(&PartialBase(direction), e)
}

pub fn partial_var(e: &Expr, v: &Var) -> Expr {
    apply(&PartialVar(*v), e)
}

pub fn total_derivative(e: &Expr, direction: usize) -> Expr {
    apply(&TotalDerivative(direction), e)
}

/// d_Λ as an iterated total derivative.
pub fn total_derivative_multi(e: &Expr, index: &MultiIndex) -> Expr {
    let mut out = e.clone();
    for d in index.directions() {
        if out.is_empty() {
            break;
        }
        out = total_derivative(&out, d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::expr::rat;

    fn y(idx: &[usize]) -> Var {
        Var::new(0, false, MultiIndex::from_directions(idx.iter().copied()))
    }

    fn c(field: usize, idx: &[usize]) -> Var {
        Var::new(field, true, MultiIndex::from_directions(idx.iter().copied()))
    }

    #[test]
    fn partial_of_square() {
        let y1 = Expr::var(y(&[0]));
        let e = (&y1 * &y1).scale(&rat(1, 2));
        assert_eq!(partial_var(&e, &y(&[0])), y1);
    }

    #[test]
    fn left_derivative_of_odd_pair() {
        let e = &Expr::var(c(1, &[])) * &Expr::var(c(2, &[]));
        assert_eq!(partial_var(&e, &c(1, &[])), Expr::var(c(2, &[])));
        assert_eq!(partial_var(&e, &c(2, &[])), -Expr::var(c(1, &[])));
    }

    #[test]
    fn function_atom_rule() {
        let f = Expr::func(Func::new("f", 0b1));
        let e = &f * &Expr::var(y(&[]));
        let fx = Expr::func(Func { derivs: MultiIndex::single(0), ..Func::new("f", 0b1) });
        assert_eq!(partial_base(&e, 0), &fx * &Expr::var(y(&[])));
        assert!(partial_base(&e, 1).is_empty());
    }

    #[test]
    fn total_derivative_examples() {
        assert_eq!(total_derivative(&Expr::base(0), 0), Expr::one());
        let e = &Expr::var(y(&[])) * &Expr::var(y(&[0]));
        let expected = &(&Expr::var(y(&[0])) * &Expr::var(y(&[0]))) + &(&Expr::var(y(&[])) * &Expr::var(y(&[0, 0])));
        assert_eq!(total_derivative(&e, 0), expected);
    }

    #[test]
    fn graded_total_derivative() {
        let e = &Expr::var(c(1, &[])) * &Expr::var(c(1, &[0]));
        let expected = &Expr::var(c(1, &[])) * &Expr::var(c(1, &[0, 0]));
        assert_eq!(total_derivative(&e, 0), expected);
    }

    #[test]
    fn chain_rule_through_elementary() {
        let x = Expr::base(0);
        let e = x.sin();
        assert_eq!(partial_base(&e, 0), x.cos());
        let r = (&x + &Expr::one()).pow_rational(&rat(1, 2)).unwrap();
        let dr = partial_base(&r, 0);
        let expected = (&x + &Expr::one()).pow_rational(&rat(-1, 2)).unwrap().scale(&rat(1, 2));
        assert_eq!(dr, expected);
    }
}
