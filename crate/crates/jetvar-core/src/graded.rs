//! Odd jet variables, graded connections and the Yang–Mills BRST operator.
//!
//! Ghosts and antifields are ordinary fields of a [`JetContext`] with a parity
//! flag and a ghost number; their jets inherit both.

use num_traits::Zero;

use crate::connections::{linear_curvature, Array3};
use crate::error::{Error, Result};
use crate::forms::{interior, lie_derivative, Form, VectorField};
use crate::gauge::GaugeContext;
use crate::kernel::{
    partial_base, partial_var, rat, total_derivative, Derivation, Evolutionary, Expr, JetContext, Rational, Var,
};
use crate::variational::variational_delta;

/// Graded total derivative d_λ; parity signs are handled by the kernel.
pub fn graded_total_derivative(e: &Expr, lambda: usize) -> Expr {
    total_derivative(e, lambda)
}

pub fn graded_d_h(n: usize, phi: &Form) -> Form {
    phi.d_h(n)
}

pub fn graded_delta(n: usize, phi: &Form) -> Result<Form> {
    variational_delta(n, phi)
}

pub fn graded_interior(u: &VectorField, phi: &Form) -> Result<Form> {
    interior(u, phi)
}

pub fn graded_lie(u: &VectorField, phi: &Form) -> Result<Form> {
    lie_derivative(u, phi)
}

/// Ghost number of a form; differentials dc^a carry the ghost number of c^a.
pub fn form_ghost_number(ctx: &JetContext, phi: &Form) -> Option<i32> {
    let mut found = None;
    for (b, c) in phi.terms() {
        let g = ctx.ghost_number(c)? + b.theta.iter().map(|v| ctx.ghost(v.field as usize)).sum::<i32>();
        match found {
            None => found = Some(g),
            Some(h) if h != g => return None,
            _ => {}
        }
    }
    Some(found.unwrap_or(0))
}

/// Graded connection γ̃ = dz^A ⊗ (∂_A + γ̃^a_A ∂/∂c^a) on base coordinates z^A
/// and odd fibre coordinates c^a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedConnection {
    /// Odd coordinates c^a as order-zero variables.
    pub odd: Vec<Var>,
    /// γ̃^a_A indexed `[a][A]`.
    pub gamma: Vec<Vec<Expr>>,
}

impl GradedConnection {
    pub fn new(odd: Vec<Var>, gamma: Vec<Vec<Expr>>) -> Result<Self> {
        if gamma.len() != odd.len() {
            return Err(Error::KindError("one row of components per odd coordinate".into()));
        }
        if odd.iter().any(|v| !v.odd || v.order() > 0) {
            return Err(Error::KindError("graded connections act on odd order-zero coordinates".into()));
        }
        Ok(GradedConnection { odd, gamma })
    }

    /// γ̃^a_A = γ_A^a_b c^b from a linear connection indexed `[A][a][b]`.
    pub fn from_linear(odd: Vec<Var>, c: &Array3) -> Result<Self> {
        let n = c.len();
        let gamma = (0..odd.len())
            .map(|a| {
                (0..n)
                    .map(|l| odd.iter().enumerate().map(|(b, v)| &c[l][a][b] * &Expr::var(*v)).sum())
                    .collect()
            })
            .collect();
        GradedConnection::new(odd, gamma)
    }

    pub fn n(&self) -> usize {
        self.gamma.first().map_or(0, Vec::len)
    }

    /// R^a_{AB} = ∂_Aγ̃^a_B − ∂_Bγ̃^a_A + γ̃^k_A∂_kγ̃^a_B − γ̃^k_B∂_kγ̃^a_A,
    /// indexed `[a][A][B]`.
    pub fn curvature(&self) -> Vec<Vec<Vec<Expr>>> {
        let n = self.n();
        let g = &self.gamma;
        let half = |a: usize, l: usize, mu: usize| -> Expr {
            let mut e = partial_base(&g[a][mu], l);
            for (k, v) in self.odd.iter().enumerate() {
                e += &g[k][l] * &partial_var(&g[a][mu], v);
            }
            e
        };
        (0..self.odd.len())
            .map(|a| (0..n).map(|l| (0..n).map(|mu| &half(a, l, mu) - &half(a, mu, l)).collect()).collect())
            .collect()
    }

    /// Covariant differentials D_λζ^a = ζ^a_λ − γ̃^a_λ for fields ζ^a whose
    /// order-zero jets are the odd coordinates.
    pub fn covariant_differential(&self) -> Vec<Vec<Expr>> {
        self.odd
            .iter()
            .zip(&self.gamma)
            .map(|(v, row)| row.iter().enumerate().map(|(l, g)| &Expr::var(v.plus(l)) - g).collect())
            .collect()
    }
}

/// Linear curvature R_{AB}^a_b contracted with c^b, indexed `[a][A][B]`.
pub fn contracted_linear_curvature(odd: &[Var], c: &Array3) -> Vec<Vec<Vec<Expr>>> {
    let r = linear_curvature(c);
    let n = c.len();
    (0..odd.len())
        .map(|a| {
            (0..n)
                .map(|l| {
                    (0..n).map(|mu| odd.iter().enumerate().map(|(b, v)| &r[l][mu][a][b] * &Expr::var(*v)).sum()).collect()
                })
                .collect()
        })
        .collect()
}

/// Gauge context extended by odd ghosts C^r of ghost number one.
#[derive(Clone, Debug)]
pub struct BrstContext {
    pub gauge: GaugeContext,
    pub ghosts: Vec<usize>,
}

/// The BRST operator together with the ghost-law coefficient that makes it
/// nilpotent.
pub struct Brst {
    pub derivation: Evolutionary,
    /// k in 𝐬C^r = k c^r_{pq} C^p C^q; None when nilpotency leaves it free.
    pub ghost_coefficient: Option<Rational>,
}

/// Residuals reported by [`BrstContext::check`].
#[derive(Clone, Debug)]
pub struct BrstReport {
    pub generators: Vec<(String, Expr)>,
    pub nilpotency: Vec<(String, Expr)>,
    pub anticommutator: Vec<(String, Form)>,
    pub ghost_shift: Vec<(String, Option<i32>)>,
    pub ghost_coefficient: Option<Rational>,
}

impl BrstReport {
    pub fn holds(&self) -> bool {
        self.nilpotency.iter().all(|(_, e)| e.is_empty())
            && self.anticommutator.iter().all(|(_, f)| f.is_zero_exact())
            && self.ghost_shift.iter().all(|(_, g)| *g == Some(1))
    }
}

impl BrstContext {
    pub fn new(gauge: GaugeContext) -> Result<Self> {
        let mut gauge = gauge;
        let ghosts = (0..gauge.dim()).map(|r| gauge.ctx.odd_field(&format!("C{}", r + 1), 1)).collect::<Result<_>>()?;
        Ok(BrstContext { gauge, ghosts })
    }

    pub fn ctx(&self) -> &JetContext {
        &self.gauge.ctx
    }

    /// C^r differentiated along `dirs`.
    pub fn ghost(&self, r: usize, dirs: &[usize]) -> Expr {
        self.ctx().jet(self.ghosts[r], dirs)
    }

    /// c^r_{pq} C^p C^q.
    fn ghost_square(&self, r: usize) -> Expr {
        let c = &self.gauge.algebra.c;
        let d = self.gauge.dim();
        let mut e = Expr::zero();
        for p in 0..d {
            for q in 0..d {
                if !c[r][p][q].is_zero() {
                    e += (&self.ghost(p, &[]) * &self.ghost(q, &[])).scale(&c[r][p][q]);
                }
            }
        }
        e
    }

    /// 𝐬 with the ghost law 𝐬C^r = k c^r_{pq} C^p C^q.
    pub fn operator_with(&self, k: &Rational) -> Evolutionary {
        let g = &self.gauge;
        let c = &g.algebra.c;
        let d = g.dim();
        let mut s = Evolutionary::new(true);
        for r in 0..d {
            for l in 0..g.n() {
                let mut e = self.ghost(r, &[l]);
                for p in 0..d {
                    for q in 0..d {
                        if !c[r][p][q].is_zero() {
                            e += (&g.potential(p, l) * &self.ghost(q, &[])).scale(&c[r][p][q]);
                        }
                    }
                }
                s = s.with(g.field(r, l), e);
            }
            s = s.with(self.ghosts[r], self.ghost_square(r).scale(k));
        }
        s
    }

    /// Solves 𝐬²a^r_λ = 0 for k, which enters linearly.
    pub fn solve_ghost_coefficient(&self) -> Result<Option<Rational>> {
        let s0 = self.operator_with(&Rational::zero());
        let s1 = self.operator_with(&rat(1, 1));
        let mut k: Option<Rational> = None;
        for r in 0..self.gauge.dim() {
            for l in 0..self.gauge.n() {
                let a = self.gauge.potential(r, l);
                let base = s0.apply(&s0.apply(&a));
                let slope = &s1.apply(&s1.apply(&a)) - &base;
                for (m, b) in slope.terms() {
                    let candidate = -base.terms().find(|(m2, _)| *m2 == m).map_or(Rational::zero(), |(_, v)| v.clone()) / b;
                    match &k {
                        None => k = Some(candidate),
                        Some(v) if *v != candidate => {
                            return Err(Error::InvalidAlgebra("no ghost law makes the operator nilpotent".into()))
                        }
                        _ => {}
                    }
                }
            }
        }
        let s = self.operator_with(&k.clone().unwrap_or_else(Rational::zero));
        for r in 0..self.gauge.dim() {
            for l in 0..self.gauge.n() {
                let a = self.gauge.potential(r, l);
                if !s.apply(&s.apply(&a)).is_empty() {
                    return Err(Error::InvalidAlgebra("no ghost law makes the operator nilpotent".into()));
                }
            }
        }
        Ok(k)
    }

    pub fn operator(&self) -> Result<Brst> {
        let k = self.solve_ghost_coefficient()?;
        let derivation = self.operator_with(&k.clone().unwrap_or_else(Rational::zero));
        Ok(Brst { derivation, ghost_coefficient: k })
    }

    /// 𝐬 on horizontal forms with 𝐬(f dx^H) = (−1)^{|H|} 𝐬(f) dx^H, so that
    /// 𝐬 anticommutes with d_H.
    pub fn on_form(s: &Evolutionary, phi: &Form) -> Result<Form> {
        let mut out = Form::zero();
        for (b, c) in phi.terms() {
            if b.contact_degree() > 0 {
                return Err(Error::DegreeError("BRST operator acts on horizontal forms".into()));
            }
            let sc = s.apply(c);
            let sc = if b.horizontal_degree() % 2 == 1 { -sc } else { sc };
            out += Form::term(sc, b.clone());
        }
        Ok(out)
    }

    /// 𝐬 on every generator, with 𝐬², 𝐬d_H + d_H𝐬 and ghost-number residuals.
    pub fn check(&self) -> Result<BrstReport> {
        let brst = self.operator()?;
        let s = &brst.derivation;
        let ctx = self.ctx();
        let n = ctx.n;
        let mut gens: Vec<(String, Expr)> = Vec::new();
        for r in 0..self.gauge.dim() {
            for l in 0..n {
                gens.push((ctx.fields[self.gauge.field(r, l)].name.clone(), self.gauge.potential(r, l)));
            }
        }
        for r in 0..self.gauge.dim() {
            gens.push((ctx.fields[self.ghosts[r]].name.clone(), self.ghost(r, &[])));
        }
        let mut report = BrstReport {
            generators: Vec::new(),
            nilpotency: Vec::new(),
            anticommutator: Vec::new(),
            ghost_shift: Vec::new(),
            ghost_coefficient: brst.ghost_coefficient.clone(),
        };
        for (name, g) in gens {
            let sg = s.apply(&g);
            report.nilpotency.push((name.clone(), s.apply(&sg)));
            let shift = match (ctx.ghost_number(&sg), ctx.ghost_number(&g)) {
                _ if sg.is_empty() => Some(1),
                (Some(a), Some(b)) => Some(a - b),
                _ => None,
            };
            report.ghost_shift.push((name.clone(), shift));
            let f = Form::scalar(g);
            let anti = &BrstContext::on_form(s, &f.d_h(n))? + &BrstContext::on_form(s, &f)?.d_h(n);
            report.anticommutator.push((name.clone(), anti));
            report.generators.push((name, sg));
        }
        Ok(report)
    }

    /// 𝐬ℱ^r_{λμ} − c^r_{pq}ℱ^p_{λμ}C^q, indexed `[r][λ][μ]`.
    pub fn strength_rotation_residuals(&self) -> Result<Vec<Vec<Vec<Expr>>>> {
        let s = self.operator()?.derivation;
        let f = self.gauge.strength();
        let c = &self.gauge.algebra.c;
        let d = self.gauge.dim();
        Ok((0..d)
            .map(|r| {
                f[r].iter()
                    .enumerate()
                    .map(|(l, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(mu, frm)| {
                                let mut e = s.apply(frm);
                                for p in 0..d {
                                    for q in 0..d {
                                        if !c[r][p][q].is_zero() {
                                            e -= (&f[p][l][mu] * &self.ghost(q, &[])).scale(&c[r][p][q]);
                                        }
                                    }
                                }
                                e
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect())
    }
}
