use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::{partial_base, partial_var, total_derivative, Expr, JetContext, MultiIndex, Var};

/// Vector field u^λ∂_λ + Σ u_v ∂_v on J^kY, with components stored up to
/// the declared order. A field on Y without jet dependence prolongs itself
/// on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub base: Vec<Expr>,
    pub fibre: BTreeMap<Var, Expr>,
    pub order: usize,
    /// Grassmann parity of the field.
    pub odd: bool,
}

impl VectorField {
    pub fn zero(n: usize) -> Self {
        VectorField { base: vec![Expr::zero(); n], fibre: BTreeMap::new(), order: 0, odd: false }
    }

    /// ∂_λ.
    pub fn coordinate(n: usize, direction: usize) -> Self {
        let mut u = VectorField::zero(n);
        u.base[direction] = Expr::one();
        u
    }

    /// ∂_v.
    pub fn vertical_coordinate(n: usize, v: Var) -> Self {
        let mut u = VectorField::zero(n);
        u.order = v.order();
        u.odd = v.odd;
        u.fibre.insert(v, Expr::one());
        u
    }

    pub fn with_base(mut self, direction: usize, e: Expr) -> Self {
        self.base[direction] = e;
        self
    }

    pub fn with_fibre(mut self, v: Var, e: Expr) -> Self {
        self.order = self.order.max(v.order());
        self.fibre.insert(v, e);
        self
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn is_vertical(&self) -> bool {
        self.base.iter().all(Expr::is_empty)
    }

    /// Base components depend on base coordinates only.
    pub fn is_projectable(&self) -> bool {
        self.base.iter().all(|e| e.vars().is_empty())
            && self.fibre.iter().all(|(v, e)| e.vars().iter().all(|w| w.order() <= v.order()))
    }

    fn auto_prolongs(&self) -> bool {
        self.order == 0 && self.base.iter().chain(self.fibre.values()).all(|e| e.vars().is_empty() || e.jet_order() == 0)
    }

    /// u_v, prolonging a field on Y when v is above the declared order.
    pub fn component(&self, v: &Var) -> Result<Expr> {
        if v.order() <= self.order {
            return Ok(self.fibre.get(v).cloned().unwrap_or_default());
        }
        if !self.auto_prolongs() {
            return Err(Error::OrderExceeded { needed: v.order(), declared: self.order });
        }
        Ok(self.prolonged_component(v))
    }

    /// u^i_{λ+Λ} = d_λ u^i_Λ − y^i_{μ+Λ} d_λ u^μ, splitting off the first direction.
    fn prolonged_component(&self, v: &Var) -> Expr {
        let Some(l) = v.index.first() else {
            return self.fibre.get(v).cloned().unwrap_or_default();
        };
        let lower = v.with_index(v.index.minus(l).unwrap());
        let mut out = total_derivative(&self.prolonged_component(&lower), l);
        for (mu, um) in self.base.iter().enumerate() {
            if um.is_empty() {
                continue;
            }
            out -= &Expr::var(lower.plus(mu)) * &total_derivative(um, l);
        }
        out
    }

    /// Applies the field to a function: u^λ∂_λf + u_v∂_v f.
    pub fn apply(&self, f: &Expr) -> Result<Expr> {
        let mut out = Expr::zero();
        for (l, ul) in self.base.iter().enumerate() {
            if !ul.is_empty() {
                out += ul * &partial_base(f, l);
            }
        }
        for v in f.vars() {
            let df = partial_var(f, &v);
            if df.is_empty() {
                continue;
            }
            let uv = self.component(&v)?;
            out += &uv * &df;
        }
        Ok(out)
    }

    /// Graded Lie bracket [u, w] = u∘w − (−1)^{[u][w]} w∘u, componentwise.
    pub fn bracket(&self, w: &VectorField) -> Result<VectorField> {
        let n = self.n();
        let sign = if self.odd && w.odd { -1 } else { 1 };
        let mut out = VectorField::zero(n);
        out.odd = self.odd ^ w.odd;
        for l in 0..n {
            let c = self.apply(&w.base[l])? - w.apply(&self.base[l])?.scale(&crate::kernel::int(sign));
            out.base[l] = c;
        }
        let order = self.order.max(w.order);
        let keys: Vec<Var> = self.fibre.keys().chain(w.fibre.keys()).copied().collect();
        for v in keys {
            let c = self.apply(&w.component(&v)?)? - w.apply(&self.component(&v)?)?.scale(&crate::kernel::int(sign));
            if !c.is_empty() {
                out.fibre.insert(v, c);
            }
        }
        out.order = order;
        Ok(out)
    }

    /// k-th order jet prolongation of a projectable field on Y.
    pub fn prolong(&self, ctx: &JetContext, k: usize) -> Result<VectorField> {
        if !self.is_projectable() || self.order != 0 || self.fibre.values().any(|e| e.jet_order() > 0 && !e.vars().is_empty()) {
            return Err(Error::NotProjectable);
        }
        let mut out = self.clone();
        out.order = k;
        for i in 0..ctx.m() {
            for idx in MultiIndex::all_up_to(ctx.n, k) {
                if idx.is_empty() {
                    continue;
                }
                let v = ctx.var(i, idx);
                let c = self.prolonged_component(&v);
                if !c.is_empty() {
                    out.fibre.insert(v, c);
                }
            }
        }
        Ok(out)
    }

    /// Canonical splitting u = u_H + u_V on J^kY: u_H = u^λ d_λ truncated,
    /// u_V = (u_v − u^λ y_{v+λ})∂_v.
    pub fn split(&self, ctx: &JetContext) -> Result<(VectorField, VectorField)> {
        let n = self.n();
        let mut h = VectorField::zero(n);
        h.base = self.base.clone();
        h.order = self.order;
        let mut vert = VectorField::zero(n);
        vert.order = self.order;
        vert.odd = self.odd;
        for i in 0..ctx.m() {
            for idx in MultiIndex::all_up_to(ctx.n, self.order) {
                let v = ctx.var(i, idx);
                let mut hc = Expr::zero();
                for (l, ul) in self.base.iter().enumerate() {
                    hc += ul * &Expr::var(v.plus(l));
                }
                let vc = &self.component(&v)? - &hc;
                if !hc.is_empty() {
                    h.fibre.insert(v, hc);
                }
                if !vc.is_empty() {
                    vert.fibre.insert(v, vc);
                }
            }
        }
        Ok((h, vert))
    }

    pub fn is_zero(&self) -> bool {
        self.base.iter().chain(self.fibre.values()).all(crate::kernel::is_zero)
    }
}

/// Canonical lift of a base vector field τ to the tensor bundle of valence
/// (m, k). Returns the context with fibre coordinates ẋ^{α…}_{β…} and the lift.
pub fn canonical_lift_tensor(n: usize, tau: &[Expr], upper: usize, lower: usize) -> Result<(JetContext, VectorField)> {
    if tau.len() != n {
        return Err(Error::DegreeError(format!("expected {n} components, got {}", tau.len())));
    }
    if tau.iter().any(|t| !t.vars().is_empty()) {
        return Err(Error::NotProjectable);
    }
    let mut ctx = JetContext::new(n);
    let tuples = index_tuples(n, upper + lower);
    let name = |t: &[usize]| {
        let up: String = t[..upper].iter().map(|a| (a + 1).to_string()).collect();
        let lo: String = t[upper..].iter().map(|a| (a + 1).to_string()).collect();
        if lower == 0 {
            format!("v{up}")
        } else {
            format!("v{up}_{lo}")
        }
    };
    for t in &tuples {
        ctx.even_field(&name(t))?;
    }
    let pos = |t: &[usize]| tuples.iter().position(|s| s.as_slice() == t).unwrap();
    let mut u = VectorField::zero(n);
    u.base = tau.to_vec();
    for t in &tuples {
        let mut comp = Expr::zero();
        for slot in 0..upper + lower {
            for nu in 0..n {
                let mut s = t.clone();
                s[slot] = nu;
                let other = ctx.jet(pos(&s), &[]);
                if slot < upper {
                    // ∂_ν τ^α ẋ^{…ν…}
                    comp += &partial_base(&tau[t[slot]], nu) * &other;
                } else {
                    // −∂_β τ^ν ẋ_{…ν…}
                    comp -= &partial_base(&tau[nu], t[slot]) * &other;
                }
            }
        }
        if !comp.is_empty() {
            u.fibre.insert(ctx.var0(pos(t)), comp);
        }
    }
    Ok((ctx, u))
}

fn index_tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |a| {
                    let mut s = t.clone();
                    s.push(a);
                    s
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_ctx(n: usize) -> JetContext {
        let mut ctx = JetContext::new(n);
        ctx.even_field("y").unwrap();
        ctx
    }

    #[test]
    fn prolong_base_shift() {
        let ctx = scalar_ctx(1);
        let u = VectorField::coordinate(1, 0).prolong(&ctx, 1).unwrap();
        assert!(u.fibre.is_empty());
    }

    #[test]
    fn prolong_scaling() {
        let ctx = scalar_ctx(1);
        let u = VectorField::zero(1).with_fibre(ctx.var0(0), ctx.jet(0, &[]));
        let j = u.prolong(&ctx, 1).unwrap();
        assert_eq!(j.fibre[&ctx.var(0, MultiIndex::single(0))], ctx.jet(0, &[0]));
    }

    #[test]
    fn prolong_dilation() {
        let ctx = scalar_ctx(1);
        let u = VectorField::coordinate(1, 0).with_base(0, Expr::base(0));
        let j = u.prolong(&ctx, 1).unwrap();
        assert_eq!(j.fibre[&ctx.var(0, MultiIndex::single(0))], -ctx.jet(0, &[0]));
    }

    #[test]
    fn non_projectable_rejected() {
        let ctx = scalar_ctx(1);
        let u = VectorField::zero(1).with_base(0, ctx.jet(0, &[]));
        assert_eq!(u.prolong(&ctx, 1), Err(Error::NotProjectable));
    }

    #[test]
    fn split_of_coordinate_field() {
        let ctx = scalar_ctx(1);
        let u = VectorField::coordinate(1, 0).prolong(&ctx, 1).unwrap();
        let (_, v) = u.split(&ctx).unwrap();
        assert_eq!(v.fibre[&ctx.var0(0)], -ctx.jet(0, &[0]));
        assert_eq!(v.fibre[&ctx.var(0, MultiIndex::single(0))], -ctx.jet(0, &[0, 0]));
    }

    #[test]
    fn split_of_vertical_field() {
        let ctx = scalar_ctx(2);
        let u = VectorField::zero(2).with_fibre(ctx.var0(0), Expr::base(1));
        let (h, v) = u.split(&ctx).unwrap();
        assert!(h.is_zero());
        assert_eq!(v, u);
    }

    #[test]
    fn tangent_and_cotangent_lifts() {
        let tau = vec![Expr::base(1), Expr::zero()];
        let (ctx, u) = canonical_lift_tensor(2, &tau, 1, 0).unwrap();
        assert_eq!(ctx.fields[0].name, "v1");
        assert_eq!(u.fibre.len(), 1);
        assert_eq!(u.fibre[&ctx.var0(0)], ctx.jet(1, &[]));
        let (ctx, u) = canonical_lift_tensor(2, &tau, 0, 1).unwrap();
        assert_eq!(ctx.fields[1].name, "v_2");
        assert_eq!(u.fibre[&ctx.var0(1)], -ctx.jet(0, &[]));
        let (_, u) = canonical_lift_tensor(2, &[Expr::one(), Expr::zero()], 1, 0).unwrap();
        assert!(u.fibre.is_empty());
    }
}
