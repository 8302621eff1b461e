use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use crate::kernel::{partial_var, total_derivative, Expr, Var};

/// Wedge monomial dx^{λ₁}∧…∧dx^{λ_s}∧θ_{v₁}∧…∧θ_{v_k} with strictly
/// increasing λ's and non-decreasing θ's (repeats only for odd fields).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Basis {
    pub dx: Vec<u8>,
    pub theta: Vec<Var>,
}

impl Basis {
    pub fn new() -> Self {
        Basis::default()
    }

    pub fn contact_degree(&self) -> usize {
        self.theta.len()
    }

    pub fn horizontal_degree(&self) -> usize {
        self.dx.len()
    }

    pub fn degree(&self) -> usize {
        self.dx.len() + self.theta.len()
    }

    /// Grassmann parity: number of odd contact factors mod 2.
    pub fn parity(&self) -> bool {
        self.theta.iter().filter(|v| v.odd).count() % 2 == 1
    }

    /// Sorts unsorted factor lists. Returns None when the monomial vanishes,
    /// otherwise the basis and whether the sign flipped.
    pub fn normalize(dx: Vec<u8>, theta: Vec<Var>) -> Option<(Basis, bool)> {
        let mut neg = false;
        let mut dx = dx;
        for i in 1..dx.len() {
            let mut j = i;
            while j > 0 && dx[j - 1] > dx[j] {
                dx.swap(j - 1, j);
                neg = !neg;
                j -= 1;
            }
        }
        if dx.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        let mut theta = theta;
        for i in 1..theta.len() {
            let mut j = i;
            while j > 0 && theta[j - 1] > theta[j] {
                let (a, b) = (theta[j - 1], theta[j]);
                // θ_a∧θ_b = (−1)^{1+[a][b]} θ_b∧θ_a
                if !(a.odd && b.odd) {
                    neg = !neg;
                }
                theta.swap(j - 1, j);
                j -= 1;
            }
        }
        if theta.windows(2).any(|w| w[0] == w[1] && !w[0].odd) {
            return None;
        }
        Some((Basis { dx, theta }, neg))
    }
}

/// Exterior form in the contact basis: Σ c · dx^H ∧ θ^C with the
/// coefficient on the left.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Form {
    terms: BTreeMap<Basis, Expr>,
}

impl Form {
    pub fn zero() -> Self {
        Form::default()
    }

    pub fn scalar(c: Expr) -> Self {
        Form::term(c, Basis::new())
    }

    pub fn term(c: Expr, basis: Basis) -> Self {
        let mut f = Form::zero();
        f.add_term(basis, c);
        f
    }

    /// Builds c·dx^{dx}∧θ^{theta} from unsorted factor lists.
    pub fn from_parts(c: Expr, dx: Vec<u8>, theta: Vec<Var>) -> Self {
        match Basis::normalize(dx, theta) {
            None => Form::zero(),
            Some((b, neg)) => Form::term(if neg { -c } else { c }, b),
        }
    }

    pub fn dx(direction: usize) -> Self {
        Form::term(Expr::one(), Basis { dx: vec![direction as u8], theta: vec![] })
    }

    pub fn theta(v: Var) -> Self {
        Form::term(Expr::one(), Basis { dx: vec![], theta: vec![v] })
    }

    /// dy_v = θ_v + y_{v+λ} dx^λ.
    pub fn dy(v: Var, n: usize) -> Self {
        let mut f = Form::theta(v);
        for l in 0..n {
            f += Form::scalar(Expr::var(v.plus(l))).wedge(&Form::dx(l));
        }
        f
    }

    /// Volume form dx¹∧…∧dxⁿ.
    pub fn volume(n: usize) -> Self {
        Form::term(Expr::one(), Basis { dx: (0..n as u8).collect(), theta: vec![] })
    }

    /// ω_λ = ∂_λ ⌋ ω.
    pub fn volume_minus(n: usize, direction: usize) -> Self {
        let sign = if direction % 2 == 0 { 1 } else { -1 };
        let dx = (0..n as u8).filter(|&d| d as usize != direction).collect();
        Form::term(Expr::int(sign), Basis { dx, theta: vec![] })
    }

    pub fn add_term(&mut self, basis: Basis, c: Expr) {
        if c.is_empty() {
            return;
        }
        match self.terms.get_mut(&basis) {
            Some(e) => {
                *e += c;
                if e.is_empty() {
                    self.terms.remove(&basis);
                }
            }
            None => {
                self.terms.insert(basis, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &Expr)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, basis: &Basis) -> Expr {
        self.terms.get(basis).cloned().unwrap_or_default()
    }

    pub fn is_zero_exact(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(crate::kernel::is_zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// (contact, horizontal) degree if homogeneous.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(|b| (b.contact_degree(), b.horizontal_degree()));
        let first = it.next().unwrap_or((0, 0));
        it.all(|d| d == first).then_some(first)
    }

    /// The scalar part when the form has degree 0.
    pub fn as_scalar(&self) -> Option<Expr> {
        if self.terms.keys().all(|b| b.degree() == 0) {
            Some(self.coefficient(&Basis::new()))
        } else {
            None
        }
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> Form {
        let mut out = Form::zero();
        for (b, c) in &self.terms {
            out.add_term(b.clone(), f(c));
        }
        out
    }

    /// Left multiplication by a scalar expression.
    pub fn scale(&self, e: &Expr) -> Form {
        self.map_coefficients(|c| e * c)
    }

    /// Homogeneous (k, s) component.
    pub fn h_projection(&self, k: usize, s: usize) -> Form {
        self.filter(|b| b.contact_degree() == k && b.horizontal_degree() == s)
    }

    /// h_k: all terms with k contact factors.
    pub fn contact_part(&self, k: usize) -> Form {
        self.filter(|b| b.contact_degree() == k)
    }

    /// h^s: all terms with s horizontal factors.
    pub fn horizontal_part(&self, s: usize) -> Form {
        self.filter(|b| b.horizontal_degree() == s)
    }

    /// h₀: kills every term containing a contact factor.
    pub fn h0(&self) -> Form {
        self.contact_part(0)
    }

    pub fn filter(&self, keep: impl Fn(&Basis) -> bool) -> Form {
        Form { terms: self.terms.iter().filter(|(b, _)| keep(b)).map(|(b, c)| (b.clone(), c.clone())).collect() }
    }

    /// Graded wedge product per the rule φ∧σ = (−1)^{|φ||σ|+[φ][σ]} σ∧φ.
    pub fn wedge(&self, other: &Form) -> Form {
        let mut out = Form::zero();
        for (b1, c1) in &self.terms {
            let p1 = b1.parity();
            let h1 = b1.contact_degree();
            for (b2, c2) in &other.terms {
                // move c2 past C1, then H2 past C1
                let (even2, odd2) = c2.split_parity();
                let c2s = if p1 { &even2 - &odd2 } else { c2.clone() };
                let mut coeff = c1 * &c2s;
                if coeff.is_empty() {
                    continue;
                }
                if (b2.horizontal_degree() * h1) % 2 == 1 {
                    coeff = -coeff;
                }
                let mut dx = b1.dx.clone();
                dx.extend_from_slice(&b2.dx);
                let mut theta = b1.theta.clone();
                theta.extend_from_slice(&b2.theta);
                out += Form::from_parts(coeff, dx, theta);
            }
        }
        out
    }

    /// Total derivative D_λ acting on coefficients and on contact factors
    /// θ_v ↦ θ_{v+λ}, leaving dx fixed.
    pub fn total_derivative(&self, direction: usize) -> Form {
        let mut out = Form::zero();
        for (b, c) in &self.terms {
            out.add_term(b.clone(), total_derivative(c, direction));
            for j in 0..b.theta.len() {
                let mut theta = b.theta.clone();
                theta[j] = theta[j].plus(direction);
                out += Form::from_parts(c.clone(), b.dx.clone(), theta);
            }
        }
        out
    }

    /// Horizontal differential d_H = dx^λ∧D_λ.
    pub fn d_h(&self, n: usize) -> Form {
        let mut out = Form::zero();
        for l in 0..n {
            out += Form::dx(l).wedge(&self.total_derivative(l));
        }
        out
    }

    /// Vertical differential: d_V(c H C) = θ_v∧∂_v c∧H∧C.
    pub fn d_v(&self) -> Form {
        let mut out = Form::zero();
        for (b, c) in &self.terms {
            for v in c.vars() {
                let dc = partial_var(c, &v);
                if dc.is_empty() {
                    continue;
                }
                out += Form::theta(v).wedge(&Form::term(dc, b.clone()));
            }
        }
        out
    }

    /// Exterior differential d = d_H + d_V.
    pub fn d(&self, n: usize) -> Form {
        self.d_h(n) + self.d_v()
    }

    /// Jet order of the coefficients and contact factors.
    pub fn jet_order(&self) -> usize {
        self.terms
            .iter()
            .map(|(b, c)| c.jet_order().max(b.theta.iter().map(|v| v.order()).max().unwrap_or(0)))
            .max()
            .unwrap_or(0)
    }

    /// Rewrites the form in the (dx, dy) basis: returns pairs of
    /// (coefficient, dx list, dy list), the inverse of `Form::dy`.
    pub fn to_dy_basis(&self, n: usize) -> Vec<(Expr, Vec<u8>, Vec<Var>)> {
        // θ_v = dy_v − y_{v+λ}dx^λ; expand and collect on symbolic dy keys.
        let mut acc: BTreeMap<(Vec<u8>, Vec<Var>), Expr> = BTreeMap::new();
        for (b, c) in &self.terms {
            // expand the product of θ's from the right
            let mut partial: Vec<(Expr, Vec<u8>, Vec<Var>)> = vec![(c.clone(), b.dx.clone(), Vec::new())];
            for v in &b.theta {
                let mut next = Vec::new();
                for (pc, pdx, pdy) in &partial {
                    let mut dy = pdy.clone();
                    dy.push(*v);
                    next.push((pc.clone(), pdx.clone(), dy));
                    for l in 0..n {
                        // pc dx^H dy^D ∧ (−y_{v+l} dx^l): move the scalar left past the dy's
                        // and dx^l past the dy's
                        let y = Expr::var(v.plus(l));
                        let odd_dy = pdy.iter().filter(|w| w.odd).count() % 2 == 1;
                        let (ye, yo) = y.split_parity();
                        let ys = if odd_dy { &ye - &yo } else { y };
                        let mut coeff = -(pc * &ys);
                        if pdy.len() % 2 == 1 {
                            coeff = -coeff;
                        }
                        let mut dx = pdx.clone();
                        dx.push(l as u8);
                        next.push((coeff, dx, pdy.clone()));
                    }
                }
                partial = next;
            }
            for (pc, pdx, pdy) in partial {
                if let Some((basis, neg)) = Basis::normalize(pdx, pdy) {
                    let e = acc.entry((basis.dx, basis.theta)).or_default();
                    if neg {
                        *e -= pc;
                    } else {
                        *e += pc;
                    }
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_empty()).map(|((dx, dy), c)| (c, dx, dy)).collect()
    }
}

impl AddAssign for Form {
    fn add_assign(&mut self, rhs: Form) {
        for (b, c) in rhs.terms {
            self.add_term(b, c);
        }
    }
}

impl AddAssign<&Form> for Form {
    fn add_assign(&mut self, rhs: &Form) {
        for (b, c) in &rhs.terms {
            self.add_term(b.clone(), c.clone());
        }
    }
}

impl SubAssign for Form {
    fn sub_assign(&mut self, rhs: Form) {
        for (b, c) in rhs.terms {
            self.add_term(b, -c);
        }
    }
}

impl SubAssign<&Form> for Form {
    fn sub_assign(&mut self, rhs: &Form) {
        for (b, c) in &rhs.terms {
            self.add_term(b.clone(), -c);
        }
    }
}

impl Add for Form {
    type Output = Form;
    fn add(mut self, rhs: Form) -> Form {
        self += rhs;
        self
    }
}

impl Add<&Form> for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(mut self, rhs: Form) -> Form {
        self -= rhs;
        self
    }
}

impl Sub<&Form> for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form { terms: self.terms.into_iter().map(|(b, c)| (b, -c)).collect() }
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.clone().neg()
    }
}

impl From<Expr> for Form {
    fn from(e: Expr) -> Form {
        Form::scalar(e)
    }
}

impl std::iter::Sum for Form {
    fn sum<I: Iterator<Item = Form>>(iter: I) -> Form {
        let mut out = Form::zero();
        for f in iter {
            out += f;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Func, MultiIndex};

    fn y(idx: &[usize]) -> Var {
        Var::new(0, false, MultiIndex::from_directions(idx.iter().copied()))
    }

    fn c(idx: &[usize]) -> Var {
        Var::new(1, true, MultiIndex::from_directions(idx.iter().copied()))
    }

    #[test]
    fn dx_squares_vanish() {
        assert!(Form::dx(0).wedge(&Form::dx(0)).is_zero_exact());
        assert_eq!(Form::dx(1).wedge(&Form::dx(0)), -Form::dx(0).wedge(&Form::dx(1)));
    }

    #[test]
    fn odd_theta_is_symmetric() {
        let t = Form::theta(c(&[]));
        let tt = t.wedge(&t);
        assert!(!tt.is_zero_exact());
        let t2 = Form::theta(c(&[0]));
        assert_eq!(t.wedge(&t2), t2.wedge(&t));
        let e = Form::theta(y(&[]));
        assert!(e.wedge(&e).is_zero_exact());
    }

    #[test]
    fn dx_and_odd_theta_anticommute() {
        let a = Form::dx(0).wedge(&Form::theta(c(&[])));
        let b = Form::theta(c(&[])).wedge(&Form::dx(0));
        assert_eq!(a, -b);
    }

    #[test]
    fn odd_coefficient_passes_odd_theta() {
        // θ_c ∧ c = −c θ_c
        let lhs = Form::theta(c(&[])).wedge(&Form::scalar(Expr::var(c(&[]))));
        assert_eq!(lhs, -Form::term(Expr::var(c(&[])), Basis { dx: vec![], theta: vec![c(&[])] }));
    }

    #[test]
    fn d_h_table() {
        let n = 2;
        assert!(Form::dx(0).d_h(n).is_zero_exact());
        let expected = Form::dx(0).wedge(&Form::theta(y(&[0]))) + Form::dx(1).wedge(&Form::theta(y(&[1])));
        assert_eq!(Form::theta(y(&[])).d_h(n), expected);
        let f = Expr::func(Func::new("f", 0b11));
        let fy = &f * &Expr::var(y(&[]));
        let dh = Form::scalar(fy.clone()).d_h(n);
        for l in 0..n {
            assert_eq!(dh.coefficient(&Basis { dx: vec![l as u8], theta: vec![] }), total_derivative(&fy, l));
        }
    }

    #[test]
    fn d_v_table() {
        assert_eq!(Form::scalar(Expr::var(y(&[0]))).d_v(), Form::theta(y(&[0])));
        let e = &Expr::var(y(&[])) * &Expr::var(y(&[0]));
        let expected = Form::theta(y(&[])).scale(&Expr::var(y(&[0]))) + Form::theta(y(&[0])).scale(&Expr::var(y(&[])));
        assert_eq!(Form::scalar(e.clone()).d_v(), expected);
        let f = Form::scalar(e);
        assert_eq!(f.d_v(), f.d(1) - f.d_h(1));
    }

    #[test]
    fn d_of_y() {
        let d = Form::scalar(Expr::var(y(&[]))).d(2);
        let expected =
            Form::theta(y(&[])) + Form::scalar(Expr::var(y(&[0]))).wedge(&Form::dx(0)) + Form::scalar(Expr::var(y(&[1]))).wedge(&Form::dx(1));
        assert_eq!(d, expected);
        assert_eq!(Form::dy(y(&[]), 2), expected);
    }

    #[test]
    fn h0_of_dy() {
        let h = Form::dy(y(&[]), 1).h0();
        assert_eq!(h, Form::scalar(Expr::var(y(&[0]))).wedge(&Form::dx(0)));
        assert!(Form::theta(y(&[])).h0().is_zero_exact());
    }

    #[test]
    fn dy_basis_round_trip() {
        let n = 2;
        let f = Form::theta(c(&[])).wedge(&Form::theta(y(&[1]))).scale(&Expr::var(c(&[0])))
            + Form::dx(1).wedge(&Form::theta(y(&[]))).scale(&Expr::var(y(&[0])));
        let mut back = Form::zero();
        for (coef, dx, dy) in f.to_dy_basis(n) {
            let mut t = Form::scalar(coef);
            for d in dx {
                t = t.wedge(&Form::dx(d as usize));
            }
            for v in dy {
                t = t.wedge(&Form::dy(v, n));
            }
            back += t;
        }
        assert_eq!(back, f);
    }
}
