//! Variational operators on horizontal-top-degree forms: τ, δ, Euler–Lagrange,
//! the first variational formula, Poincaré–Cartan form, Legendre map,
//! Noether currents and chart-level inverse-problem tools.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::forms::{interior, Basis, Form, VectorField};
use crate::kernel::{
    is_zero, partial_base, partial_var, rat, total_derivative, total_derivative_multi, Expr, JetContext, Monomial,
    Rational, Sym, Var,
};
use crate::linalg;

/// Lagrangian density ℒ on a base of dimension n; the form is ℒω.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lagrangian {
    pub density: Expr,
    pub n: usize,
}

impl Lagrangian {
    pub fn new(density: Expr, n: usize) -> Self {
        Lagrangian { density, n }
    }

    pub fn form(&self) -> Form {
        Form::scalar(self.density.clone()).wedge(&Form::volume(self.n))
    }

    pub fn order(&self) -> usize {
        self.density.jet_order()
    }

    fn require_first_order(&self) -> Result<()> {
        if self.order() > 1 {
            return Err(Error::OrderError(format!("first order Lagrangian required, got order {}", self.order())));
        }
        Ok(())
    }
}

fn flip_odd(e: &Expr) -> Expr {
    let (even, odd) = e.split_parity();
    &even - &odd
}

/// θ^i ∧ (E_i ω) summed over fields.
pub fn source_form(ctx: &JetContext, coeffs: &[Expr]) -> Form {
    let vol = Form::volume(ctx.n);
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_empty())
        .map(|(i, e)| Form::theta(ctx.var0(i)).wedge(&Form::scalar(e.clone()).wedge(&vol)))
        .sum()
}

/// Reads back the coefficients E_i of a source form θ^i ∧ (E_i ω).
pub fn source_coefficients(ctx: &JetContext, form: &Form) -> Result<Vec<Expr>> {
    let mut out = vec![Expr::zero(); ctx.m()];
    let sign = if ctx.n % 2 == 0 { 1 } else { -1 };
    for (b, c) in form.terms() {
        if b.dx.len() != ctx.n || b.theta.len() != 1 || !b.theta[0].index.is_empty() {
            return Err(Error::DegreeError("not a source form".into()));
        }
        let v = b.theta[0];
        let e = if v.odd { flip_odd(c) } else { c.clone() };
        out[v.field as usize] += e.scale(&rat(sign, 1));
    }
    Ok(out)
}

fn contract_var(v: Var, phi: &Form, n: usize) -> Result<Form> {
    let mut u = VectorField::vertical_coordinate(n, v);
    u.order = u.order.max(phi.jet_order());
    interior(&u, phi)
}

fn total_derivative_form(phi: &Form, v: &Var) -> Form {
    v.index.directions().into_iter().fold(phi.clone(), |f, l| f.total_derivative(l))
}

/// τ = Σ_k (1/k) τ̄∘h_k on forms of horizontal degree n, with
/// τ̄(φ) = Σ (−1)^{|Λ|} θ^i ∧ d_Λ(∂_i^Λ ⌋ φ).
pub fn tau(n: usize, phi: &Form) -> Result<Form> {
    if phi.terms().any(|(b, _)| b.dx.len() != n) {
        return Err(Error::DegreeError(format!("τ needs horizontal degree {n}")));
    }
    let mut by_degree: BTreeMap<usize, Form> = BTreeMap::new();
    for (b, c) in phi.terms() {
        if b.theta.is_empty() {
            continue;
        }
        by_degree.entry(b.theta.len()).or_default().add_term(b.clone(), c.clone());
    }
    let mut out = Form::zero();
    for (k, part) in by_degree {
        let vars: BTreeSet<Var> = part.terms().flat_map(|(b, _)| b.theta.iter().copied()).collect();
        let mut bar = Form::zero();
        for v in vars {
            let inner = total_derivative_form(&contract_var(v, &part, n)?, &v);
            let term = Form::theta(v.with_index(Default::default())).wedge(&inner);
            if v.order() % 2 == 1 {
                bar -= term;
            } else {
                bar += term;
            }
        }
        out += bar.map_coefficients(|c| c.scale(&rat(1, k as i64)));
    }
    Ok(out)
}

/// δ = τ∘d.
pub fn variational_delta(n: usize, phi: &Form) -> Result<Form> {
    if phi.terms().any(|(b, _)| b.dx.len() != n) {
        return Err(Error::DegreeError(format!("δ needs horizontal degree {n}")));
    }
    tau(n, &phi.d(n))
}

/// Variational derivatives δ_iℒ = Σ_Λ (−1)^{|Λ|} d_Λ ∂_i^Λ ℒ.
pub fn variational_derivatives(ctx: &JetContext, density: &Expr) -> Vec<Expr> {
    let mut out = vec![Expr::zero(); ctx.m()];
    for v in density.vars() {
        let d = total_derivative_multi(&partial_var(density, &v), &v.index);
        if v.order() % 2 == 1 {
            out[v.field as usize] -= d;
        } else {
            out[v.field as usize] += d;
        }
    }
    out
}

/// Euler–Lagrange source form.
pub fn euler_lagrange(ctx: &JetContext, l: &Lagrangian) -> Form {
    source_form(ctx, &variational_derivatives(ctx, &l.density))
}

pub fn is_variationally_trivial(ctx: &JetContext, l: &Lagrangian) -> bool {
    variational_derivatives(ctx, &l.density).iter().all(is_zero)
}

/// Helmholtz condition δℰ = 0.
pub fn helmholtz_check(n: usize, source: &Form) -> Result<bool> {
    Ok(variational_delta(n, source)?.is_zero())
}

/// Momenta π^λ_i = ∂^λ_iℒ, indexed `[λ][i]`.
pub fn momenta(ctx: &JetContext, l: &Lagrangian) -> Vec<Vec<Expr>> {
    (0..ctx.n)
        .map(|lam| (0..ctx.m()).map(|i| partial_var(&l.density, &ctx.var0(i).plus(lam))).collect())
        .collect()
}

/// Legendre map: momenta p^λ_i and the frame coefficient ℒ − π^λ_i y^i_λ.
pub fn legendre_map(ctx: &JetContext, l: &Lagrangian) -> Result<(Vec<Vec<Expr>>, Expr)> {
    l.require_first_order()?;
    let p = momenta(ctx, l);
    let mut frame = l.density.clone();
    for (lam, row) in p.iter().enumerate() {
        for (i, pi) in row.iter().enumerate() {
            frame -= pi * &ctx.jet(i, &[lam]);
        }
    }
    Ok((p, frame))
}

/// H_L = L + π^λ_i θ^i ∧ ω_λ.
pub fn poincare_cartan(ctx: &JetContext, l: &Lagrangian) -> Result<Form> {
    l.require_first_order()?;
    let mut h = l.form();
    for (lam, row) in momenta(ctx, l).iter().enumerate() {
        for (i, pi) in row.iter().enumerate() {
            if pi.is_empty() {
                continue;
            }
            h += Form::scalar(pi.clone()).wedge(&Form::theta(ctx.var0(i)).wedge(&Form::volume_minus(ctx.n, lam)));
        }
    }
    Ok(h)
}

/// Coefficient of 𝐋_{J¹u}L: ∂_λu^λℒ + J¹u(ℒ).
pub fn lie_derivative_density(l: &Lagrangian, u: &VectorField) -> Result<Expr> {
    let mut out = u.apply(&l.density)?;
    for (lam, ul) in u.base.iter().enumerate() {
        out += &partial_base(ul, lam) * &l.density;
    }
    Ok(out)
}

fn vertical_part(ctx: &JetContext, u: &VectorField) -> Result<Vec<Expr>> {
    (0..ctx.m())
        .map(|i| {
            let mut c = u.component(&ctx.var0(i))?;
            for (mu, um) in u.base.iter().enumerate() {
                c -= um * &ctx.jet(i, &[mu]);
            }
            Ok(c)
        })
        .collect()
}

/// The pieces of 𝐋_{J¹u}L = u_V⌋ℰ_L + d_H h₀(u⌋H_L) as coefficients of ω.
#[derive(Clone, Debug)]
pub struct FirstVariation {
    pub lie_term: Expr,
    pub el_term: Expr,
    pub boundary_term: Expr,
    /// Symmetry current 𝔗^λ.
    pub current: Vec<Expr>,
}

impl FirstVariation {
    pub fn residual(&self) -> Expr {
        &(&self.lie_term - &self.el_term) - &self.boundary_term
    }

    pub fn holds(&self) -> bool {
        is_zero(&self.residual())
    }
}

fn check_projectable(u: &VectorField) -> Result<()> {
    if !u.is_projectable() || u.order != 0 {
        return Err(Error::NotProjectable);
    }
    Ok(())
}

/// 𝔗^λ = π^λ_i(u^μ y^i_μ − u^i) − u^λℒ.
pub fn symmetry_current(ctx: &JetContext, l: &Lagrangian, u: &VectorField) -> Result<Vec<Expr>> {
    l.require_first_order()?;
    let uv = vertical_part(ctx, u)?;
    let p = momenta(ctx, l);
    Ok((0..ctx.n)
        .map(|lam| {
            let mut t = -(&u.base[lam] * &l.density);
            for i in 0..ctx.m() {
                t -= &p[lam][i] * &uv[i];
            }
            t
        })
        .collect())
}

pub fn first_variational_formula(ctx: &JetContext, l: &Lagrangian, u: &VectorField) -> Result<FirstVariation> {
    l.require_first_order()?;
    check_projectable(u)?;
    let lie_term = lie_derivative_density(l, u)?;
    let uv = vertical_part(ctx, u)?;
    let el = variational_derivatives(ctx, &l.density);
    let el_term = uv.iter().zip(&el).map(|(a, b)| a * b).sum();
    let current = symmetry_current(ctx, l, u)?;
    let boundary_term = -current.iter().enumerate().map(|(lam, t)| total_derivative(t, lam)).sum::<Expr>();
    let fv = FirstVariation { lie_term, el_term, boundary_term, current };
    if !fv.holds() {
        return Err(Error::KindError("first variational formula failed to close".into()));
    }
    Ok(fv)
}

/// Noether current with the weak-law data: d_λ𝔗^λ + 𝐋_{J¹u}ℒ = Σ c^i δ_iℒ.
#[derive(Clone, Debug)]
pub struct NoetherCurrent {
    pub current: Vec<Expr>,
    pub divergence: Expr,
    /// Coefficients c^i multiplying the variational derivatives.
    pub coefficients: Vec<Expr>,
    pub lie_term: Expr,
}

impl NoetherCurrent {
    /// Checks d_λ𝔗^λ + 𝐋ℒ − Σ c^i δ_iℒ = 0.
    pub fn weak_law_holds(&self, ctx: &JetContext, l: &Lagrangian) -> bool {
        let el = variational_derivatives(ctx, &l.density);
        let combo: Expr = self.coefficients.iter().zip(&el).map(|(c, e)| c * e).sum();
        is_zero(&(&(&self.divergence + &self.lie_term) - &combo))
    }
}

pub fn noether_current(ctx: &JetContext, l: &Lagrangian, u: &VectorField) -> Result<NoetherCurrent> {
    let fv = first_variational_formula(ctx, l, u)?;
    let divergence = fv.current.iter().enumerate().map(|(lam, t)| total_derivative(t, lam)).sum();
    Ok(NoetherCurrent { current: fv.current, divergence, coefficients: vertical_part(ctx, u)?, lie_term: fv.lie_term })
}

/// Both sides of 𝐋_{J²u}ℰ_L = ℰ_{𝐋_{J¹u}L}.
pub fn lie_derivative_el(ctx: &JetContext, l: &Lagrangian, u: &VectorField) -> Result<(Form, Form)> {
    l.require_first_order()?;
    check_projectable(u)?;
    let el = euler_lagrange(ctx, l);
    let lhs = crate::forms::lie_derivative(u, &el)?;
    let rhs = euler_lagrange(ctx, &Lagrangian::new(lie_derivative_density(l, u)?, ctx.n));
    Ok((lhs, rhs))
}

/// ξ of bidegree (0, s−1) with d_Hξ = σ − σ₀, where σ₀ is the constant
/// coefficient part of σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Antiderivative {
    pub xi: Form,
    pub obstruction: Form,
}

const MAX_UNKNOWNS: usize = 4000;

fn monomial_expr(m: &Monomial) -> Expr {
    Expr::from_monomial(m)
}

fn x_degree(m: &Monomial) -> i32 {
    m.even_factors().iter().filter(|(s, _)| matches!(s, Sym::Base(_))).map(|(_, p)| *p).sum()
}

/// Candidate monomials whose total derivative along λ can produce `m`.
fn lift_candidates(m: &Monomial, lam: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let e = monomial_expr(m);
    let with_x = &e * &Expr::base(lam);
    if let Some((mm, _)) = with_x.as_monomial() {
        out.push(mm.clone());
    }
    let lowered = |v: &Var| -> Option<Monomial> {
        let lower = v.with_index(v.index.minus(lam)?);
        let d = partial_var(&e, v);
        let t = &d * &Expr::var(lower);
        let out = t.terms().next().map(|(mm, _)| mm.clone());
        out
    };
    for (s, _) in m.even_factors() {
        if let Sym::Jet(v) = s {
            if let Some(mm) = lowered(v) {
                out.push(mm);
            }
        }
    }
    for v in m.odd_factors() {
        if let Some(mm) = lowered(v) {
            out.push(mm);
        }
    }
    out
}

/// Chart-level horizontal antiderivative by an exact linear solve over
/// polynomial candidates; the output is checked by re-application.
pub fn horizontal_antiderivative(n: usize, sigma: &Form) -> Result<Antiderivative> {
    let s = match sigma.bidegree() {
        None => return Ok(Antiderivative { xi: Form::zero(), obstruction: Form::zero() }),
        Some((0, s)) if s < n => s,
        Some(_) => return Err(Error::DegreeError("expected a horizontal form of degree < n".into())),
    };
    if sigma.terms().any(|(_, c)| !c.is_polynomial()) {
        return Err(Error::NonPolynomial);
    }
    if !sigma.d_h(n).is_zero_exact() {
        return Err(Error::NotClosed);
    }
    let obstruction = sigma.map_coefficients(|c| c.terms().filter(|(m, _)| m.is_one()).map(|(_, q)| Expr::constant(q.clone())).sum());
    let target = sigma - &obstruction;
    if target.is_zero_exact() || s == 0 {
        if !target.is_zero_exact() {
            return Err(Error::NoAntiderivative(s));
        }
        return Ok(Antiderivative { xi: Form::zero(), obstruction });
    }
    let order_bound = target.jet_order();
    let x_bound = target.terms().flat_map(|(_, c)| c.terms().map(|(m, _)| x_degree(m))).max().unwrap_or(0) + 1;
    let mut unknowns: Vec<(Vec<u8>, Monomial)> = Vec::new();
    let mut seen_unknown: BTreeSet<(Vec<u8>, Monomial)> = BTreeSet::new();
    let mut covered: BTreeSet<(Vec<u8>, Monomial)> = BTreeSet::new();
    let mut queue: Vec<(Vec<u8>, Monomial)> =
        target.terms().flat_map(|(b, c)| c.terms().map(move |(m, _)| (b.dx.clone(), m.clone()))).collect();
    let mut columns: Vec<Form> = Vec::new();
    while let Some((dx, m)) = queue.pop() {
        if !covered.insert((dx.clone(), m.clone())) {
            continue;
        }
        for (pos, &lam) in dx.iter().enumerate() {
            let mut h = dx.clone();
            h.remove(pos);
            for cand in lift_candidates(&m, lam as usize) {
                let e = monomial_expr(&cand);
                if e.jet_order() > order_bound || x_degree(&cand) > x_bound {
                    continue;
                }
                let key = (h.clone(), cand);
                if !seen_unknown.insert(key.clone()) {
                    continue;
                }
                if unknowns.len() >= MAX_UNKNOWNS {
                    return Err(Error::NoAntiderivative(s));
                }
                let image = Form::term(e, Basis { dx: h.clone(), theta: vec![] }).d_h(n);
                for (b, c) in image.terms() {
                    for (mm, _) in c.terms() {
                        let k = (b.dx.clone(), mm.clone());
                        if !covered.contains(&k) {
                            queue.push(k);
                        }
                    }
                }
                unknowns.push(key);
                columns.push(image);
            }
        }
    }
    let mut rows: BTreeMap<(Vec<u8>, Monomial), usize> = BTreeMap::new();
    let index_of = |k: (Vec<u8>, Monomial), rows: &mut BTreeMap<_, usize>| {
        let len = rows.len();
        *rows.entry(k).or_insert(len)
    };
    let mut entries: Vec<Vec<(usize, Rational)>> = Vec::new();
    for col in &columns {
        let mut e = Vec::new();
        for (b, c) in col.terms() {
            for (m, q) in c.terms() {
                e.push((index_of((b.dx.clone(), m.clone()), &mut rows), q.clone()));
            }
        }
        entries.push(e);
    }
    let mut rhs_entries = Vec::new();
    for (b, c) in target.terms() {
        for (m, q) in c.terms() {
            rhs_entries.push((index_of((b.dx.clone(), m.clone()), &mut rows), q.clone()));
        }
    }
    let zero = Rational::from_integer(0.into());
    let mut a = vec![vec![zero.clone(); columns.len()]; rows.len()];
    for (j, col) in entries.iter().enumerate() {
        for (r, q) in col {
            a[*r][j] += q;
        }
    }
    let mut b = vec![zero; rows.len()];
    for (r, q) in rhs_entries {
        b[r] += q;
    }
    let x = linalg::solve(&a, &b).ok_or(Error::NoAntiderivative(s))?;
    let mut xi = Form::zero();
    for ((h, m), q) in unknowns.iter().zip(&x) {
        if q != &Rational::from_integer(0.into()) {
            xi += Form::term(Expr::term(m.clone(), q.clone()), Basis { dx: h.clone(), theta: vec![] });
        }
    }
    if !(&xi.d_h(n) - &target).is_zero_exact() {
        return Err(Error::NoAntiderivative(s));
    }
    Ok(Antiderivative { xi, obstruction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::MultiIndex;

    fn scalar(n: usize) -> JetContext {
        let mut c = JetContext::new(n);
        c.even_field("y").unwrap();
        c
    }

    #[test]
    fn tau_fixes_source_forms() {
        let c = scalar(2);
        let f = &Expr::base(0) * &c.jet(0, &[]);
        let phi = source_form(&c, &[f.clone()]);
        assert_eq!(tau(2, &phi).unwrap(), phi);
    }

    #[test]
    fn tau_of_first_order_contact() {
        let c = scalar(1);
        let g = c.jet(0, &[0]);
        let v1 = c.var(0, MultiIndex::single(0));
        let phi = Form::scalar(g.clone()).wedge(&Form::theta(v1)).wedge(&Form::volume(1));
        let expected = source_form(&c, &[-total_derivative(&g, 0)]);
        assert_eq!(tau(1, &phi).unwrap(), expected);
    }

    #[test]
    fn tau_rejects_wrong_degree() {
        let c = scalar(2);
        assert!(tau(2, &Form::theta(c.var0(0)).wedge(&Form::dx(0))).is_err());
    }

    #[test]
    fn delta_examples() {
        let c = scalar(1);
        let y1 = c.jet(0, &[0]);
        let l = Lagrangian::new(y1.clone(), 1);
        assert!(variational_delta(1, &l.form()).unwrap().is_zero_exact());
        let l = Lagrangian::new((&y1 * &y1).scale(&rat(1, 2)), 1);
        let d = variational_delta(1, &l.form()).unwrap();
        assert_eq!(d, source_form(&c, &[-c.jet(0, &[0, 0])]));
        assert_eq!(d, euler_lagrange(&c, &l));
    }

    #[test]
    fn el_examples() {
        let c = scalar(2);
        let l = Lagrangian::new(c.jet(0, &[]), 2);
        assert_eq!(source_coefficients(&c, &euler_lagrange(&c, &l)).unwrap(), vec![Expr::one()]);
        // free scalar with g = diag(1, −1)
        let free = (&(&c.jet(0, &[0]) * &c.jet(0, &[0])) - &(&c.jet(0, &[1]) * &c.jet(0, &[1]))).scale(&rat(1, 2));
        let e = variational_derivatives(&c, &free);
        assert_eq!(e[0], &c.jet(0, &[1, 1]) - &c.jet(0, &[0, 0]));
        let c1 = scalar(1);
        let y11 = c1.jet(0, &[0, 0]);
        let l2 = Lagrangian::new((&y11 * &y11).scale(&rat(1, 2)), 1);
        assert_eq!(variational_derivatives(&c1, &l2.density)[0], c1.jet(0, &[0, 0, 0, 0]));
    }

    #[test]
    fn poincare_cartan_in_one_dimension() {
        let c = scalar(1);
        let y1 = c.jet(0, &[0]);
        let l = Lagrangian::new((&y1 * &y1).scale(&rat(1, 2)), 1);
        let h = poincare_cartan(&c, &l).unwrap();
        let expected = Form::scalar(y1.clone()).wedge(&Form::dy(c.var0(0), 1))
            - Form::scalar((&y1 * &y1).scale(&rat(1, 2))).wedge(&Form::dx(0));
        assert_eq!(h, expected);
        assert_eq!(h.h0(), l.form());
    }

    #[test]
    fn legendre_examples() {
        let c = scalar(2);
        let a = &Expr::base(0) * &c.jet(0, &[]);
        let l = Lagrangian::new(&a * &c.jet(0, &[1]), 2);
        let (p, frame) = legendre_map(&c, &l).unwrap();
        assert_eq!(p[1][0], a);
        assert!(p[0][0].is_empty());
        assert!(frame.is_empty());
    }

    #[test]
    fn energy_current() {
        let c = scalar(1);
        let y1 = c.jet(0, &[0]);
        let l = Lagrangian::new((&y1 * &y1).scale(&rat(1, 2)), 1);
        let u = VectorField::coordinate(1, 0);
        let nc = noether_current(&c, &l, &u).unwrap();
        assert_eq!(nc.current[0], (&y1 * &y1).scale(&rat(1, 2)));
        assert!(nc.lie_term.is_empty());
        assert_eq!(nc.coefficients[0], -y1.clone());
        assert!(nc.weak_law_holds(&c, &l));
    }

    #[test]
    fn zero_field_variation() {
        let c = scalar(2);
        let l = Lagrangian::new(&c.jet(0, &[0]) * &c.jet(0, &[1]), 2);
        let fv = first_variational_formula(&c, &l, &VectorField::zero(2)).unwrap();
        assert!(fv.lie_term.is_empty() && fv.el_term.is_empty() && fv.boundary_term.is_empty());
    }

    #[test]
    fn second_order_rejected() {
        let c = scalar(1);
        let l = Lagrangian::new(c.jet(0, &[0, 0]), 1);
        assert!(matches!(poincare_cartan(&c, &l), Err(Error::OrderError(_))));
    }

    #[test]
    fn helmholtz_examples() {
        let c = scalar(1);
        assert!(!helmholtz_check(1, &source_form(&c, &[c.jet(0, &[0])])).unwrap());
        assert!(helmholtz_check(1, &Form::zero()).unwrap());
        assert!(helmholtz_check(1, &source_form(&c, &[c.jet(0, &[0, 0])])).unwrap());
    }

    #[test]
    fn trivial_lagrangians() {
        let c = scalar(1);
        let y = c.jet(0, &[]);
        assert!(is_variationally_trivial(&c, &Lagrangian::new(total_derivative(&(&y * &y), 0), 1)));
        let y1 = c.jet(0, &[0]);
        assert!(!is_variationally_trivial(&c, &Lagrangian::new(&y1 * &y1, 1)));
    }

    #[test]
    fn antiderivative_examples() {
        let c = scalar(2);
        let zeta = Form::scalar(&c.jet(0, &[]) * &c.jet(0, &[1]));
        let sigma = zeta.d_h(2);
        let a = horizontal_antiderivative(2, &sigma).unwrap();
        assert_eq!(a.xi.d_h(2), sigma);
        let a = horizontal_antiderivative(2, &Form::dx(0)).unwrap();
        assert!(a.xi.is_zero_exact());
        assert_eq!(a.obstruction, Form::dx(0));
        assert!(horizontal_antiderivative(2, &Form::zero()).unwrap().xi.is_zero_exact());
        assert_eq!(horizontal_antiderivative(2, &Form::scalar(c.jet(0, &[])).wedge(&Form::dx(0))), Err(Error::NotClosed));
        let f = Expr::func(crate::kernel::Func::new("f", 1));
        assert_eq!(horizontal_antiderivative(2, &Form::scalar(f).wedge(&Form::dx(1))), Err(Error::NonPolynomial));
    }

    #[test]
    fn antiderivative_of_one_form() {
        let c = scalar(3);
        let y = c.jet(0, &[]);
        let xi = Form::scalar(&(&y * &y) * &c.jet(0, &[0, 1]) + &Expr::base(2)).wedge(&Form::dx(1));
        let sigma = xi.d_h(3);
        let a = horizontal_antiderivative(3, &sigma).unwrap();
        assert_eq!(a.xi.d_h(3), &sigma - &a.obstruction);
        assert_eq!(a.obstruction, Form::zero() - Form::dx(1).wedge(&Form::dx(2)));
    }

    #[test]
    fn mos12_with_translation() {
        let c = scalar(1);
        let y = c.jet(0, &[]);
        let l = Lagrangian::new((&y * &y).scale(&rat(1, 2)), 1);
        let u = VectorField::zero(1).with_fibre(c.var0(0), Expr::one());
        let (lhs, rhs) = lie_derivative_el(&c, &l, &u).unwrap();
        assert!((&lhs - &rhs).is_zero());
        assert_eq!(rhs, source_form(&c, &[Expr::one()]));
    }
}
