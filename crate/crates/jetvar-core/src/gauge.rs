//! Gauge theory at the level of structure constants: strength, Bianchi
//! identity, canonical splitting of J¹C, gauge vector fields, invariance
//! equations, the Yang–Mills Lagrangian and Noether identities.

use num_traits::{One, Zero};

use crate::connections::Metric;
use crate::error::{Error, Result};
use crate::forms::VectorField;
use crate::kernel::{is_zero, partial_base, partial_var, rat, total_derivative, Expr, JetContext, Rational, Var};
use crate::variational::{variational_derivatives, Lagrangian};

/// Lie algebra given by structure constants `c[r][p][q]` = c^r_{pq} and an
/// optional invariant bilinear form a^G.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    pub dim: usize,
    pub c: Vec<Vec<Vec<Rational>>>,
    pub bilinear: Option<Vec<Vec<Rational>>>,
}

fn zero_table(d: usize) -> Vec<Vec<Vec<Rational>>> {
    vec![vec![vec![Rational::zero(); d]; d]; d]
}

impl LieAlgebra {
    pub fn new(c: Vec<Vec<Vec<Rational>>>, bilinear: Option<Vec<Vec<Rational>>>) -> Result<Self> {
        let alg = LieAlgebra::new_unchecked(c, bilinear);
        alg.validate()?;
        Ok(alg)
    }

    /// Skips validation; used to exercise failure paths.
    pub fn new_unchecked(c: Vec<Vec<Vec<Rational>>>, bilinear: Option<Vec<Vec<Rational>>>) -> Self {
        LieAlgebra { dim: c.len(), c, bilinear }
    }

    pub fn abelian(d: usize) -> Self {
        let mut id = vec![vec![Rational::zero(); d]; d];
        for (i, row) in id.iter_mut().enumerate() {
            row[i] = Rational::one();
        }
        LieAlgebra { dim: d, c: zero_table(d), bilinear: Some(id) }
    }

    /// su(2) with c^r_{pq} = ε_{rpq} and a^G = δ.
    pub fn su2() -> Self {
        let mut c = zero_table(3);
        for (r, p, q) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[r][p][q] = Rational::one();
            c[r][q][p] = -Rational::one();
        }
        let mut alg = LieAlgebra::abelian(3);
        alg.c = c;
        alg
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "u1" | "abelian" => Some(LieAlgebra::abelian(1)),
            "su2" | "so3" => Some(LieAlgebra::su2()),
            _ => None,
        }
    }

    /// Reads `{"dim": d, "structure_constants": [[r, p, q, "num/den"], …],
    /// "bilinear_form": [[…], …]}` with 1-based indices; antisymmetric
    /// partners are filled in.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidAlgebra(m.to_string());
        let dim = v.get("dim").and_then(|d| d.as_u64()).ok_or_else(|| bad("missing dim"))? as usize;
        let mut c = zero_table(dim);
        for entry in v.get("structure_constants").and_then(|s| s.as_array()).into_iter().flatten() {
            let e = entry.as_array().filter(|e| e.len() == 4).ok_or_else(|| bad("entries are [r, p, q, value]"))?;
            let idx = |k: usize| -> Result<usize> {
                let i = e[k].as_u64().ok_or_else(|| bad("index must be a positive integer"))? as usize;
                if i == 0 || i > dim {
                    return Err(bad("index out of range"));
                }
                Ok(i - 1)
            };
            let (r, p, q) = (idx(0)?, idx(1)?, idx(2)?);
            let val = json_rational(&e[3]).ok_or_else(|| bad("value must be a number or \"p/q\""))?;
            c[r][p][q] = val.clone();
            c[r][q][p] = -val;
        }
        let bilinear = match v.get("bilinear_form") {
            None | Some(serde_json::Value::Null) => None,
            Some(b) => {
                let rows = b.as_array().ok_or_else(|| bad("bilinear_form must be a matrix"))?;
                let m: Option<Vec<Vec<Rational>>> = rows
                    .iter()
                    .map(|r| r.as_array().and_then(|r| r.iter().map(json_rational).collect()))
                    .collect();
                let m = m.ok_or_else(|| bad("bilinear_form entries must be numbers"))?;
                if m.len() != dim || m.iter().any(|r| r.len() != dim) {
                    return Err(bad("bilinear_form has the wrong size"));
                }
                Some(m)
            }
        };
        LieAlgebra::new(c, bilinear)
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().flatten().flatten().all(Zero::is_zero)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if self.c.iter().any(|r| r.len() != d || r.iter().any(|s| s.len() != d)) {
            return Err(Error::InvalidAlgebra("structure constants must be d×d×d".into()));
        }
        for r in 0..d {
            for p in 0..d {
                for q in 0..d {
                    if self.c[r][p][q] != -self.c[r][q][p].clone() {
                        return Err(Error::InvalidAlgebra(format!("c^{}_{}{} is not antisymmetric", r + 1, p + 1, q + 1)));
                    }
                }
            }
        }
        if !self.jacobi_holds() {
            return Err(Error::InvalidAlgebra("Jacobi identity fails".into()));
        }
        if let Some(a) = &self.bilinear {
            if a.len() != d || a.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidAlgebra("bilinear form has the wrong size".into()));
            }
            for p in 0..d {
                for q in 0..d {
                    if a[p][q] != a[q][p] {
                        return Err(Error::InvalidAlgebra("bilinear form is not symmetric".into()));
                    }
                    for r in 0..d {
                        let mut s = Rational::zero();
                        for t in 0..d {
                            s += &self.c[t][p][q] * &a[t][r] + &self.c[t][p][r] * &a[q][t];
                        }
                        if !s.is_zero() {
                            return Err(Error::InvalidAlgebra("bilinear form is not ad-invariant".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// c^s_{pq}c^t_{sr} + c^s_{qr}c^t_{sp} + c^s_{rp}c^t_{sq} = 0.
    pub fn jacobi_holds(&self) -> bool {
        let d = self.dim;
        for p in 0..d {
            for q in 0..d {
                for r in 0..d {
                    for t in 0..d {
                        let mut s = Rational::zero();
                        for k in 0..d {
                            s += &self.c[k][p][q] * &self.c[t][k][r];
                            s += &self.c[k][q][r] * &self.c[t][k][p];
                            s += &self.c[k][r][p] * &self.c[t][k][q];
                        }
                        if !s.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// [ξ, η]^r = c^r_{pq}ξ^pη^q.
    pub fn bracket(&self, xi: &[Expr], eta: &[Expr]) -> Vec<Expr> {
        (0..self.dim)
            .map(|r| {
                let mut out = Expr::zero();
                for p in 0..self.dim {
                    for q in 0..self.dim {
                        if !self.c[r][p][q].is_zero() {
                            out += (&xi[p] * &eta[q]).scale(&self.c[r][p][q]);
                        }
                    }
                }
                out
            })
            .collect()
    }
}

fn json_rational(v: &serde_json::Value) -> Option<Rational> {
    if let Some(i) = v.as_i64() {
        return Some(Rational::from_integer(i.into()));
    }
    if let Some(s) = v.as_str() {
        return s.trim().parse().ok();
    }
    None
}

/// Jet context of the connection bundle: fields a^r_μ at index r·n + μ,
/// followed by matter fields with representation generators I_p.
#[derive(Clone, Debug)]
pub struct GaugeContext {
    pub algebra: LieAlgebra,
    pub ctx: JetContext,
    pub matter: Vec<usize>,
    /// I_p{}^i{}_j indexed `[p][i][j]`.
    pub generators: Vec<Vec<Vec<Rational>>>,
}

/// Residual families of the gauge-invariance equations.
#[derive(Clone, Debug)]
pub struct InvarianceResiduals {
    pub a: Vec<Expr>,
    pub b: Vec<Expr>,
    pub c: Vec<Expr>,
}

impl InvarianceResiduals {
    pub fn all_zero(&self) -> bool {
        self.a.iter().chain(&self.b).chain(&self.c).all(is_zero)
    }
}

/// Noether data of a gauge-invariant Lagrangian.
#[derive(Clone, Debug)]
pub struct GaugeNoether {
    pub current: Vec<Expr>,
    pub identities: InvarianceResiduals,
    /// U^{μλ} indexed `[μ][λ]`.
    pub superpotential: Vec<Vec<Expr>>,
    pub w: Vec<Expr>,
    /// 𝔗^λ − (W^λ + d_μU^{μλ}).
    pub decomposition_residual: Vec<Expr>,
}

type Generator = Vec<(usize, Expr)>;

impl GaugeContext {
    pub fn new(algebra: LieAlgebra, n: usize) -> Result<Self> {
        GaugeContext::with_matter(algebra, n, &[], Vec::new())
    }

    pub fn with_matter(
        algebra: LieAlgebra,
        n: usize,
        matter: &[&str],
        generators: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self> {
        let mut ctx = JetContext::new(n);
        for r in 0..algebra.dim {
            for mu in 0..n {
                ctx.even_field(&format!("a{}_{}", r + 1, mu + 1))?;
            }
        }
        let matter: Vec<usize> = matter.iter().map(|m| ctx.even_field(m)).collect::<Result<_>>()?;
        let gc = GaugeContext { algebra, ctx, matter, generators };
        gc.validate_representation()?;
        Ok(gc)
    }

    fn validate_representation(&self) -> Result<()> {
        let k = self.matter.len();
        if k == 0 {
            return Ok(());
        }
        let d = self.algebra.dim;
        let g = &self.generators;
        if g.len() != d || g.iter().any(|m| m.len() != k || m.iter().any(|r| r.len() != k)) {
            return Err(Error::InvalidAlgebra("one k×k generator per algebra element required".into()));
        }
        for p in 0..d {
            for q in 0..d {
                for i in 0..k {
                    for j in 0..k {
                        let mut s = Rational::zero();
                        for h in 0..k {
                            s += &g[p][i][h] * &g[q][h][j] - &g[q][i][h] * &g[p][h][j];
                        }
                        for r in 0..d {
                            s -= &self.algebra.c[r][p][q] * &g[r][i][j];
                        }
                        if !s.is_zero() {
                            return Err(Error::InvalidAlgebra("generators do not represent the algebra".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.ctx.n
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim
    }

    pub fn field(&self, r: usize, mu: usize) -> usize {
        r * self.n() + mu
    }

    /// a^r_μ.
    pub fn potential(&self, r: usize, mu: usize) -> Expr {
        self.ctx.jet(self.field(r, mu), &[])
    }

    /// a^r_{λμ}, the λ-derivative of a^r_μ.
    pub fn potential_jet(&self, r: usize, lambda: usize, mu: usize) -> Expr {
        self.ctx.jet(self.field(r, mu), &[lambda])
    }

    fn jet_var(&self, r: usize, lambda: usize, mu: usize) -> Var {
        self.ctx.var0(self.field(r, mu)).plus(lambda)
    }

    fn quadratic(&self, r: usize, lambda: usize, mu: usize) -> Expr {
        let mut out = Expr::zero();
        for p in 0..self.dim() {
            for q in 0..self.dim() {
                let c = &self.algebra.c[r][p][q];
                if !c.is_zero() {
                    out += (&self.potential(p, lambda) * &self.potential(q, mu)).scale(c);
                }
            }
        }
        out
    }

    /// ℱ^r_{λμ} = a^r_{λμ} − a^r_{μλ} + c^r_{pq}a^p_λa^q_μ, indexed `[r][λ][μ]`.
    pub fn strength(&self) -> Vec<Vec<Vec<Expr>>> {
        let n = self.n();
        (0..self.dim())
            .map(|r| {
                (0..n)
                    .map(|l| {
                        (0..n)
                            .map(|mu| {
                                if l == mu {
                                    return Expr::zero();
                                }
                                &(&self.potential_jet(r, l, mu) - &self.potential_jet(r, mu, l)) + &self.quadratic(r, l, mu)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// (𝒮, ℱ) with 𝒮^r_{λμ} = ½(a^r_{λμ} + a^r_{μλ} − c^r_{pq}a^p_λa^q_μ).
    pub fn canonical_splitting(&self) -> (Vec<Vec<Vec<Expr>>>, Vec<Vec<Vec<Expr>>>) {
        let n = self.n();
        let s = (0..self.dim())
            .map(|r| {
                (0..n)
                    .map(|l| {
                        (0..n)
                            .map(|mu| {
                                (&(&self.potential_jet(r, l, mu) + &self.potential_jet(r, mu, l)) - &self.quadratic(r, l, mu))
                                    .scale(&rat(1, 2))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        (s, self.strength())
    }

    /// Σ_cyc(λμν) (d_λℱ^r_{μν} + c^r_{pq}a^p_λℱ^q_{μν}) for each r and λ<μ<ν.
    pub fn bianchi_residuals(&self) -> Vec<Expr> {
        let f = self.strength();
        let n = self.n();
        let d = self.dim();
        let mut out = Vec::new();
        for r in 0..d {
            for l in 0..n {
                for mu in l + 1..n {
                    for nu in mu + 1..n {
                        let mut total = Expr::zero();
                        for (a, b, c) in [(l, mu, nu), (mu, nu, l), (nu, l, mu)] {
                            total += total_derivative(&f[r][b][c], a);
                            for p in 0..d {
                                for q in 0..d {
                                    let k = &self.algebra.c[r][p][q];
                                    if !k.is_zero() {
                                        total += (&self.potential(p, a) * &f[q][b][c]).scale(k);
                                    }
                                }
                            }
                        }
                        out.push(total);
                    }
                }
            }
        }
        out
    }

    pub fn bianchi_check(&self) -> bool {
        self.bianchi_residuals().iter().all(Expr::is_empty)
    }

    /// u^A_p as (field, coefficient) pairs: c^r_{pq}a^q_λ on a^r_λ and
    /// I_p{}^i{}_j y^j on matter.
    fn u0(&self, p: usize) -> Generator {
        let mut out = Vec::new();
        for r in 0..self.dim() {
            for l in 0..self.n() {
                let mut e = Expr::zero();
                for q in 0..self.dim() {
                    let c = &self.algebra.c[r][p][q];
                    if !c.is_zero() {
                        e += self.potential(q, l).scale(c);
                    }
                }
                if !e.is_empty() {
                    out.push((self.field(r, l), e));
                }
            }
        }
        for (i, &fi) in self.matter.iter().enumerate() {
            let mut e = Expr::zero();
            for (j, &fj) in self.matter.iter().enumerate() {
                let g = &self.generators[p][i][j];
                if !g.is_zero() {
                    e += self.ctx.jet(fj, &[]).scale(g);
                }
            }
            if !e.is_empty() {
                out.push((fi, e));
            }
        }
        out
    }

    /// u^{Aμ}_p: −1 on a^p_μ.
    fn u1(&self, p: usize, mu: usize) -> Generator {
        vec![(self.field(p, mu), Expr::int(-1))]
    }

    /// ξ_C = (−∂_λξ^r + c^r_{pq}ξ^pa^q_λ)∂^λ_r + ξ^pI_p{}^i{}_j y^j ∂_i.
    pub fn gauge_vector_field(&self, xi: &[Expr]) -> Result<VectorField> {
        if xi.len() != self.dim() {
            return Err(Error::DegreeError(format!("expected {} gauge parameters", self.dim())));
        }
        if xi.iter().any(|e| !e.vars().is_empty()) {
            return Err(Error::KindError("gauge parameters depend on base coordinates only".into()));
        }
        let mut comps = vec![Expr::zero(); self.ctx.m()];
        for (p, x) in xi.iter().enumerate() {
            for l in 0..self.n() {
                comps[self.field(p, l)] -= partial_base(x, l);
            }
            for (f, e) in self.u0(p) {
                comps[f] += x * &e;
            }
        }
        let mut u = VectorField::zero(self.n());
        for (f, e) in comps.into_iter().enumerate() {
            if !e.is_empty() {
                u.fibre.insert(self.ctx.var0(f), e);
            }
        }
        Ok(u)
    }

    fn momentum(&self, l: &Expr, field: usize, lambda: usize) -> Expr {
        partial_var(l, &self.ctx.var0(field).plus(lambda))
    }

    fn contract(&self, g: &Generator, values: &[Expr]) -> Expr {
        g.iter().map(|(f, e)| e * &values[*f]).sum()
    }

    fn momenta_along(&self, l: &Expr, lambda: usize) -> Vec<Expr> {
        (0..self.ctx.m()).map(|f| self.momentum(l, f, lambda)).collect()
    }

    /// The strong equalities: a_p, b_{p,μ}, c_{p,λ,μ} (λ < μ and λ = μ).
    pub fn strong_equations(&self, l: &Expr) -> InvarianceResiduals {
        let n = self.n();
        let el = variational_derivatives(&self.ctx, l);
        let pis: Vec<Vec<Expr>> = (0..n).map(|lam| self.momenta_along(l, lam)).collect();
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut c = Vec::new();
        for p in 0..self.dim() {
            let u0 = self.u0(p);
            let mut ea = self.contract(&u0, &el);
            for mu in 0..n {
                ea += total_derivative(&self.contract(&u0, &pis[mu]), mu);
            }
            a.push(ea);
            for mu in 0..n {
                let u1 = self.u1(p, mu);
                let mut eb = self.contract(&u1, &el) + self.contract(&u0, &pis[mu]);
                for lam in 0..n {
                    eb += total_derivative(&self.contract(&u1, &pis[lam]), lam);
                }
                b.push(eb);
                for lam in 0..=mu {
                    c.push(&self.contract(&self.u1(p, lam), &pis[mu]) + &self.contract(&u1, &pis[lam]));
                }
            }
        }
        InvarianceResiduals { a, b, c }
    }

    /// Invariance equations for a Lagrangian of the potentials alone, in the
    /// form c^r_{pq}(a^p_μ∂^μ_r + a^p_{λμ}∂^{λμ}_r)ℒ, ∂^μ_qℒ + c^r_{pq}a^p_λ∂^{μλ}_rℒ,
    /// ∂^{μλ}_pℒ + ∂^{λμ}_pℒ.
    pub fn invariance_equations(&self, l: &Expr) -> InvarianceResiduals {
        if !self.matter.is_empty() {
            return self.strong_equations(l);
        }
        let n = self.n();
        let d = self.dim();
        let dpot = |r: usize, mu: usize| partial_var(l, &self.ctx.var0(self.field(r, mu)));
        let djet = |r: usize, lam: usize, mu: usize| partial_var(l, &self.jet_var(r, lam, mu));
        let mut a = Vec::new();
        for q in 0..d {
            let mut e = Expr::zero();
            for p in 0..d {
                for r in 0..d {
                    let k = &self.algebra.c[r][p][q];
                    if k.is_zero() {
                        continue;
                    }
                    for mu in 0..n {
                        e += (&self.potential(p, mu) * &dpot(r, mu)).scale(k);
                        for lam in 0..n {
                            e += (&self.potential_jet(p, lam, mu) * &djet(r, lam, mu)).scale(k);
                        }
                    }
                }
            }
            a.push(e);
        }
        let mut b = Vec::new();
        for q in 0..d {
            for mu in 0..n {
                let mut e = dpot(q, mu);
                for p in 0..d {
                    for r in 0..d {
                        let k = &self.algebra.c[r][p][q];
                        if k.is_zero() {
                            continue;
                        }
                        for lam in 0..n {
                            e += (&self.potential(p, lam) * &djet(r, mu, lam)).scale(k);
                        }
                    }
                }
                b.push(e);
            }
        }
        let mut c = Vec::new();
        for p in 0..d {
            for mu in 0..n {
                for lam in 0..=mu {
                    c.push(&djet(p, mu, lam) + &djet(p, lam, mu));
                }
            }
        }
        InvarianceResiduals { a, b, c }
    }

    /// (b3109) for concrete gauge parameters.
    pub fn strong_equality(&self, l: &Expr, xi: &[Expr]) -> Expr {
        let n = self.n();
        let el = variational_derivatives(&self.ctx, l);
        let coeff = self.parameter_coefficients(xi);
        let mut out: Expr = coeff.iter().zip(&el).map(|(a, b)| a * b).sum();
        for lam in 0..n {
            let pi = self.momenta_along(l, lam);
            out += total_derivative(&coeff.iter().zip(&pi).map(|(a, b)| a * b).sum(), lam);
        }
        out
    }

    /// u^A_pξ^p + u^{Aμ}_p∂_μξ^p per field A.
    fn parameter_coefficients(&self, xi: &[Expr]) -> Vec<Expr> {
        let mut coeff = vec![Expr::zero(); self.ctx.m()];
        for (p, x) in xi.iter().enumerate() {
            for (f, e) in self.u0(p) {
                coeff[f] += x * &e;
            }
            for mu in 0..self.n() {
                for (f, e) in self.u1(p, mu) {
                    coeff[f] += &partial_base(x, mu) * &e;
                }
            }
        }
        coeff
    }

    /// L_YM = (1/4ε²) a^G_{pq} g^{λμ} g^{βν} ℱ^p_{λβ} ℱ^q_{μν} √|g|.
    pub fn yang_mills(&self, metric: &Metric, epsilon: &Rational) -> Result<Lagrangian> {
        let ag = self.algebra.bilinear.as_ref().ok_or(Error::MissingBilinearForm)?;
        let n = self.n();
        if metric.n() != n {
            return Err(Error::DegreeError("metric dimension differs from the base".into()));
        }
        if epsilon.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let f = self.strength();
        let gi = &metric.inverse;
        // raised[q][λ][β] = g^{λμ} g^{βν} ℱ^q_{μν}
        let mut raised = vec![vec![vec![Expr::zero(); n]; n]; self.dim()];
        for q in 0..self.dim() {
            for l in 0..n {
                for b in 0..n {
                    let mut e = Expr::zero();
                    for mu in 0..n {
                        if gi[l][mu].is_empty() {
                            continue;
                        }
                        for nu in 0..n {
                            if gi[b][nu].is_empty() || f[q][mu][nu].is_empty() {
                                continue;
                            }
                            e += &(&gi[l][mu] * &gi[b][nu]) * &f[q][mu][nu];
                        }
                    }
                    raised[q][l][b] = e;
                }
            }
        }
        let mut density = Expr::zero();
        for p in 0..self.dim() {
            for q in 0..self.dim() {
                if ag[p][q].is_zero() {
                    continue;
                }
                let mut s = Expr::zero();
                for l in 0..n {
                    for b in 0..n {
                        s += &f[p][l][b] * &raised[q][l][b];
                    }
                }
                density += s.scale(&ag[p][q]);
            }
        }
        let scale = Rational::one() / (Rational::from_integer(4.into()) * epsilon * epsilon);
        let density = &density.scale(&scale) * &metric.sqrt_abs_det()?;
        Ok(Lagrangian::new(density, n))
    }

    /// Noether current 𝔗^λ = −(u^A_pξ^p + u^{Aμ}_p∂_μξ^p)π^λ_A with the
    /// Noether identities and the superpotential U^{μλ} = −ξ^pu^{Aμ}_pπ^λ_A.
    pub fn noether_identities(&self, l: &Lagrangian, xi: &[Expr]) -> Result<GaugeNoether> {
        if xi.len() != self.dim() {
            return Err(Error::DegreeError(format!("expected {} gauge parameters", self.dim())));
        }
        let identities = self.strong_equations(&l.density);
        if !identities.all_zero() {
            return Err(Error::NotInvariant("the gauge-invariance equations have nonzero residuals".into()));
        }
        let n = self.n();
        let el = variational_derivatives(&self.ctx, &l.density);
        let coeff = self.parameter_coefficients(xi);
        let pis: Vec<Vec<Expr>> = (0..n).map(|lam| self.momenta_along(&l.density, lam)).collect();
        let current: Vec<Expr> = (0..n).map(|lam| -coeff.iter().zip(&pis[lam]).map(|(a, b)| a * b).sum::<Expr>()).collect();
        let mut superpotential = vec![vec![Expr::zero(); n]; n];
        let mut w = vec![Expr::zero(); n];
        for (p, x) in xi.iter().enumerate() {
            for mu in 0..n {
                let u1 = self.u1(p, mu);
                w[mu] += x * &self.contract(&u1, &el);
                for lam in 0..n {
                    superpotential[mu][lam] -= x * &self.contract(&u1, &pis[lam]);
                }
            }
        }
        let decomposition_residual = (0..n)
            .map(|lam| {
                let mut r = &current[lam] - &w[lam];
                for (mu, row) in superpotential.iter().enumerate() {
                    r -= total_derivative(&row[lam], mu);
                }
                r
            })
            .collect();
        Ok(GaugeNoether { current, identities, superpotential, w, decomposition_residual })
    }
}
