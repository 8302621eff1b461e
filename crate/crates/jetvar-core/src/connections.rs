//! Connections on fibre bundles in a single chart: curvature, torsion,
//! covariant differentials and the standard constructions.

use crate::error::{Error, Result};
use crate::kernel::{int, is_zero, partial_base, partial_var, rat, Expr, JetContext, Rational, Var};
use crate::tangent::TangentValuedForm;

/// Γ^i_λ(x, y) indexed as `gamma[i][λ]`, with the linear coefficients
/// Γ_λ^i_j (indexed `[λ][i][j]`) kept when the connection is linear or affine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    pub n: usize,
    pub gamma: Vec<Vec<Expr>>,
    pub linear: Option<Vec<Vec<Vec<Expr>>>>,
    /// Basic soldering part σ^i_λ of an affine connection.
    pub soldering: Option<Vec<Vec<Expr>>>,
}

/// 3-index array of expressions.
pub type Array3 = Vec<Vec<Vec<Expr>>>;
/// 4-index array of expressions.
pub type Array4 = Vec<Vec<Vec<Vec<Expr>>>>;

fn zeros3(a: usize, b: usize, c: usize) -> Array3 {
    vec![vec![vec![Expr::zero(); c]; b]; a]
}

fn zeros4(a: usize, b: usize, c: usize, d: usize) -> Array4 {
    vec![zeros3(b, c, d); a]
}

fn y0(ctx: &JetContext, i: usize) -> Var {
    ctx.var0(i)
}

impl Connection {
    pub fn general(ctx: &JetContext, gamma: Vec<Vec<Expr>>) -> Result<Self> {
        if gamma.len() != ctx.m() || gamma.iter().any(|r| r.len() != ctx.n) {
            return Err(Error::DegreeError("connection components must be m × n".into()));
        }
        if gamma.iter().flatten().any(|e| e.jet_order() > 0) {
            return Err(Error::OrderError("connection components must not depend on jets".into()));
        }
        Ok(Connection { n: ctx.n, gamma, linear: None, soldering: None })
    }

    /// Γ^i_λ = Γ_λ^i_j y^j.
    pub fn linear(ctx: &JetContext, coeffs: Array3) -> Result<Self> {
        let m = ctx.m();
        let mut gamma = vec![vec![Expr::zero(); ctx.n]; m];
        for (l, row) in coeffs.iter().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    gamma[i][l] += &row[i][j] * &ctx.jet(j, &[]);
                }
            }
        }
        let mut c = Connection::general(ctx, gamma)?;
        c.linear = Some(coeffs);
        Ok(c)
    }

    /// Γ^i_λ = Γ_λ^i_j y^j + σ^i_λ.
    pub fn affine(ctx: &JetContext, coeffs: Array3, sigma: Vec<Vec<Expr>>) -> Result<Self> {
        let mut c = Connection::linear(ctx, coeffs)?;
        for (i, row) in sigma.iter().enumerate() {
            for (l, s) in row.iter().enumerate() {
                c.gamma[i][l] += s;
            }
        }
        c.soldering = Some(sigma);
        Ok(c)
    }

    /// World connection on TX with fibre coordinates ẋ^μ, `k[λ][μ][ν]` = K_λ^μ_ν.
    pub fn world(ctx: &JetContext, k: Array3) -> Result<Self> {
        if ctx.m() != ctx.n {
            return Err(Error::KindError("world connection needs fibre dimension n".into()));
        }
        Connection::linear(ctx, k)
    }

    pub fn m(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_linear(&self) -> bool {
        self.linear.is_some() && self.soldering.is_none()
    }

    /// Covariant differential of a section s^i(x): ∇_λ s^i = ∂_λ s^i − Γ^i_λ∘s.
    pub fn covariant_differential(&self, ctx: &JetContext, s: &[Expr]) -> Vec<Vec<Expr>> {
        let subst = |e: &Expr| -> Expr {
            e.substitute_vars(&|v| if v.index.is_empty() { s.get(v.field as usize).cloned() } else { None })
        };
        (0..self.m())
            .map(|i| (0..ctx.n).map(|l| &partial_base(&s[i], l) - &subst(&self.gamma[i][l])).collect())
            .collect()
    }

    /// Covariant derivative along τ: τ⌋∇s.
    pub fn covariant_derivative(&self, ctx: &JetContext, tau: &[Expr], s: &[Expr]) -> Vec<Expr> {
        let d = self.covariant_differential(ctx, s);
        d.iter().map(|row| row.iter().zip(tau).map(|(a, t)| t * a).sum()).collect()
    }

    /// R^i_{λμ} = ∂_λΓ^i_μ − ∂_μΓ^i_λ + Γ^j_λ∂_jΓ^i_μ − Γ^j_μ∂_jΓ^i_λ, as a
    /// vertical-valued two-form.
    pub fn curvature(&self, ctx: &JetContext) -> TangentValuedForm {
        let mut out = TangentValuedForm::zero(ctx, 2);
        let m = self.m();
        for i in 0..m {
            for l in 0..ctx.n {
                for mu in l + 1..ctx.n {
                    let mut r = &partial_base(&self.gamma[i][mu], l) - &partial_base(&self.gamma[i][l], mu);
                    for j in 0..m {
                        let yj = y0(ctx, j);
                        r += &self.gamma[j][l] * &partial_var(&self.gamma[i][mu], &yj);
                        r -= &self.gamma[j][mu] * &partial_var(&self.gamma[i][l], &yj);
                    }
                    out.set(&[l, mu], ctx.n + i, r);
                }
            }
        }
        out
    }

    pub fn as_tangent_form(&self, ctx: &JetContext) -> TangentValuedForm {
        TangentValuedForm::connection(ctx, &self.gamma)
    }

    /// ½[Γ, Γ]_FN.
    pub fn fn_curvature(&self, ctx: &JetContext) -> Result<TangentValuedForm> {
        let g = self.as_tangent_form(ctx);
        Ok(g.fn_bracket(ctx, &g)?.scale(&rat(1, 2)))
    }

    /// R_λμ^i_j of a linear connection.
    pub fn linear_curvature(&self) -> Result<Array4> {
        let c = self.linear.as_ref().ok_or_else(|| Error::KindError("linear connection required".into()))?;
        Ok(linear_curvature(c))
    }

    /// Torsion with respect to a soldering form `sigma[i][λ]`:
    /// T = (∂_λσ^i_μ + Γ^j_λ∂_jσ^i_μ − ∂_jΓ^i_λσ^j_μ) dx^λ∧dx^μ⊗∂_i.
    pub fn torsion(&self, ctx: &JetContext, sigma: &[Vec<Expr>]) -> TangentValuedForm {
        let m = self.m();
        let b = |i: usize, l: usize, mu: usize| -> Expr {
            let mut e = partial_base(&sigma[i][mu], l);
            for j in 0..m {
                let yj = y0(ctx, j);
                e += &self.gamma[j][l] * &partial_var(&sigma[i][mu], &yj);
                e -= &partial_var(&self.gamma[i][l], &yj) * &sigma[j][mu];
            }
            e
        };
        let mut out = TangentValuedForm::zero(ctx, 2);
        for i in 0..m {
            for l in 0..ctx.n {
                for mu in l + 1..ctx.n {
                    out.set(&[l, mu], ctx.n + i, &b(i, l, mu) - &b(i, mu, l));
                }
            }
        }
        out
    }

    /// Γ + σ.
    pub fn shifted(&self, sigma: &[Vec<Expr>]) -> Connection {
        let mut out = self.clone();
        for (i, row) in sigma.iter().enumerate() {
            for (l, s) in row.iter().enumerate() {
                out.gamma[i][l] += s;
            }
        }
        out.linear = None;
        out.soldering = None;
        out
    }

    /// Torsion and curvature of Γ + σ together with the residuals of
    /// T' = T + 2ρ and R' = R + ρ + T.
    pub fn shifted_relations(&self, ctx: &JetContext, sigma: &[Vec<Expr>]) -> ShiftReport {
        let shifted = self.shifted(sigma);
        let t = self.torsion(ctx, sigma);
        let r = self.curvature(ctx);
        let rho = soldered_curvature(ctx, sigma);
        let t_shift = shifted.torsion(ctx, sigma);
        let r_shift = shifted.curvature(ctx);
        let torsion_residual = t_shift.sub(&t).sub(&rho.scale(&int(2)));
        let curvature_residual = r_shift.sub(&r).sub(&rho).sub(&t);
        ShiftReport { torsion: t_shift, curvature: r_shift, torsion_residual, curvature_residual }
    }

    /// Dual linear connection: coefficients −Γ_λ^j_i on the dual fibre.
    pub fn dual(&self, dual_ctx: &JetContext) -> Result<Connection> {
        if !self.is_linear() {
            return Err(Error::KindError("dual connection needs a linear connection".into()));
        }
        let c = self.linear.as_ref().unwrap();
        Connection::linear(dual_ctx, dual_coefficients(c))
    }
}

pub struct ShiftReport {
    pub torsion: TangentValuedForm,
    pub curvature: TangentValuedForm,
    pub torsion_residual: TangentValuedForm,
    pub curvature_residual: TangentValuedForm,
}

impl ShiftReport {
    pub fn holds(&self) -> bool {
        self.torsion_residual.is_zero() && self.curvature_residual.is_zero()
    }
}

/// ρ^i_{λμ} = σ^j_λ∂_jσ^i_μ − σ^j_μ∂_jσ^i_λ.
pub fn soldered_curvature(ctx: &JetContext, sigma: &[Vec<Expr>]) -> TangentValuedForm {
    let m = sigma.len();
    let mut out = TangentValuedForm::zero(ctx, 2);
    for i in 0..m {
        for l in 0..ctx.n {
            for mu in l + 1..ctx.n {
                let mut r = Expr::zero();
                for j in 0..m {
                    let yj = y0(ctx, j);
                    r += &sigma[j][l] * &partial_var(&sigma[i][mu], &yj);
                    r -= &sigma[j][mu] * &partial_var(&sigma[i][l], &yj);
                }
                out.set(&[l, mu], ctx.n + i, r);
            }
        }
    }
    out
}

/// R_λμ^i_j = ∂_λΓ_μ^i_j − ∂_μΓ_λ^i_j + Γ_λ^h_jΓ_μ^i_h − Γ_μ^h_jΓ_λ^i_h.
pub fn linear_curvature(c: &Array3) -> Array4 {
    let n = c.len();
    let m = if n > 0 { c[0].len() } else { 0 };
    let mut out = zeros4(n, n, m, m);
    for l in 0..n {
        for mu in 0..n {
            for i in 0..m {
                for j in 0..m {
                    let mut r = &partial_base(&c[mu][i][j], l) - &partial_base(&c[l][i][j], mu);
                    for h in 0..m {
                        r += &c[l][h][j] * &c[mu][i][h];
                        r -= &c[mu][h][j] * &c[l][i][h];
                    }
                    out[l][mu][i][j] = r;
                }
            }
        }
    }
    out
}

/// Coefficients of the dual connection: (Γ*)_λ^i_j = −Γ_λ^j_i.
pub fn dual_coefficients(c: &Array3) -> Array3 {
    c.iter()
        .map(|row| {
            let m = row.len();
            (0..m).map(|i| (0..m).map(|j| -&row[j][i]).collect()).collect()
        })
        .collect()
}

/// Tensor product coefficients on fibre index (i, a) ↦ i·m' + a:
/// Γ_λ^i_j δ^a_b + δ^i_j Γ'_λ^a_b.
pub fn tensor_product_coefficients(c: &Array3, d: &Array3) -> Array3 {
    let n = c.len();
    let m = if n > 0 { c[0].len() } else { 0 };
    let mp = if n > 0 { d[0].len() } else { 0 };
    let mut out = zeros3(n, m * mp, m * mp);
    for l in 0..n {
        for i in 0..m {
            for a in 0..mp {
                for j in 0..m {
                    for b in 0..mp {
                        let mut e = Expr::zero();
                        if a == b {
                            e += &c[l][i][j];
                        }
                        if i == j {
                            e += &d[l][a][b];
                        }
                        out[l][i * mp + a][j * mp + b] = e;
                    }
                }
            }
        }
    }
    out
}

/// Linear tensor product connection on a context with m·m' fibre fields.
pub fn tensor_product_connection(ctx: &JetContext, a: &Connection, b: &Connection) -> Result<Connection> {
    let (Some(c), Some(d)) = (&a.linear, &b.linear) else {
        return Err(Error::KindError("tensor product needs linear connections".into()));
    };
    if !a.is_linear() || !b.is_linear() {
        return Err(Error::KindError("tensor product needs linear connections".into()));
    }
    Connection::linear(ctx, tensor_product_coefficients(c, d))
}

/// World metric g_λμ with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    pub g: Vec<Vec<Expr>>,
    pub inverse: Vec<Vec<Expr>>,
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(a: &[Vec<Expr>]) -> Expr {
    let n = a.len();
    match n {
        0 => Expr::one(),
        1 => a[0][0].clone(),
        _ => {
            let mut det = Expr::zero();
            for j in 0..n {
                if a[0][j].is_empty() {
                    continue;
                }
                let minor = minor(a, 0, j);
                let t = &a[0][j] * &determinant(&minor);
                if j % 2 == 0 {
                    det += t;
                } else {
                    det -= t;
                }
            }
            det
        }
    }
}

fn minor(a: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

impl Metric {
    /// Symmetric metric; the inverse is computed for diagonal metrics of any
    /// dimension and by cofactors for n ≤ 3.
    pub fn new(g: Vec<Vec<Expr>>) -> Result<Self> {
        let n = g.len();
        if g.iter().any(|r| r.len() != n) {
            return Err(Error::DegreeError("metric must be square".into()));
        }
        for a in 0..n {
            for b in 0..a {
                if !is_zero(&(&g[a][b] - &g[b][a])) {
                    return Err(Error::KindError("metric must be symmetric".into()));
                }
            }
        }
        let diagonal = (0..n).all(|a| (0..n).all(|b| a == b || g[a][b].is_empty()));
        let det = determinant(&g);
        if is_zero(&det) {
            return Err(Error::SingularMetric);
        }
        let inverse = if diagonal {
            let mut inv = vec![vec![Expr::zero(); n]; n];
            for a in 0..n {
                inv[a][a] = g[a][a].recip().map_err(|_| Error::SingularMetric)?;
            }
            inv
        } else {
            if n > 3 {
                return Err(Error::KindError("supply the inverse metric for n > 3".into()));
            }
            let inv_det = det.recip().map_err(|_| Error::SingularMetric)?;
            let mut inv = vec![vec![Expr::zero(); n]; n];
            for a in 0..n {
                for b in 0..n {
                    let c = determinant(&minor(&g, b, a));
                    let c = if (a + b) % 2 == 0 { c } else { -c };
                    inv[a][b] = &c * &inv_det;
                }
            }
            inv
        };
        Ok(Metric { g, inverse })
    }

    pub fn with_inverse(g: Vec<Vec<Expr>>, inverse: Vec<Vec<Expr>>) -> Self {
        Metric { g, inverse }
    }

    pub fn euclidean(n: usize) -> Self {
        Metric::diagonal(&vec![1; n])
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let mut g = vec![vec![Expr::zero(); n]; n];
        let mut inv = vec![vec![Expr::zero(); n]; n];
        for (a, &e) in entries.iter().enumerate() {
            g[a][a] = Expr::int(e);
            inv[a][a] = Expr::constant(Rational::new(1.into(), e.into()));
        }
        Metric { g, inverse: inv }
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn determinant(&self) -> Expr {
        determinant(&self.g)
    }

    /// √|det g| with the sign of the determinant fixed by sampling.
    pub fn sqrt_abs_det(&self) -> Result<Expr> {
        let det = self.determinant();
        let positive = match det.as_constant() {
            Some(c) => c > Rational::from_integer(0.into()),
            None => sample_sign(&det),
        };
        let d = if positive { det } else { -det };
        d.pow_rational(&rat(1, 2))
    }
}

fn sample_sign(e: &Expr) -> bool {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut p = crate::kernel::numeric::Point::new(&mut rng);
    p.eval(e).map(|v| v >= 0.0).unwrap_or(true)
}

/// Levi-Civita connection K_λ^ν_μ = −½ g^{νρ}(∂_λg_ρμ + ∂_μg_ρλ − ∂_ρg_λμ),
/// indexed `[λ][ν][μ]`.
pub fn levi_civita(metric: &Metric) -> Array3 {
    let n = metric.n();
    let g = &metric.g;
    let mut out = zeros3(n, n, n);
    for l in 0..n {
        for nu in 0..n {
            for mu in 0..n {
                let mut e = Expr::zero();
                for rho in 0..n {
                    if metric.inverse[nu][rho].is_empty() {
                        continue;
                    }
                    let s = &(&partial_base(&g[rho][mu], l) + &partial_base(&g[rho][l], mu)) - &partial_base(&g[l][mu], rho);
                    e += &metric.inverse[nu][rho] * &s;
                }
                out[l][nu][mu] = e.scale(&rat(-1, 2));
            }
        }
    }
    out
}

/// ∇_λ g^{αβ} = ∂_λg^{αβ} − g^{αγ}K_λ^β_γ − g^{βγ}K_λ^α_γ, indexed `[λ][α][β]`.
pub fn metric_compatibility(metric: &Metric, k: &Array3) -> Array3 {
    let n = metric.n();
    let gi = &metric.inverse;
    let mut out = zeros3(n, n, n);
    for l in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut e = partial_base(&gi[a][b], l);
                for c in 0..n {
                    e -= &gi[a][c] * &k[l][b][c];
                    e -= &gi[b][c] * &k[l][a][c];
                }
                out[l][a][b] = e;
            }
        }
    }
    out
}

/// World curvature R_λμ^α_β, indexed `[λ][μ][α][β]`.
pub fn world_curvature(k: &Array3) -> Array4 {
    linear_curvature(k)
}

/// Ricci tensor R_λβ = R_λμ^μ_β.
pub fn ricci(r: &Array4) -> Vec<Vec<Expr>> {
    let n = r.len();
    (0..n).map(|l| (0..n).map(|b| (0..n).map(|mu| r[l][mu][mu][b].clone()).sum()).collect()).collect()
}

/// World torsion T_μ^ν_λ = K_μ^ν_λ − K_λ^ν_μ, indexed `[μ][ν][λ]`.
pub fn world_torsion(k: &Array3) -> Array3 {
    let n = k.len();
    let mut out = zeros3(n, n, n);
    for mu in 0..n {
        for nu in 0..n {
            for l in 0..n {
                out[mu][nu][l] = &k[mu][nu][l] - &k[l][nu][mu];
            }
        }
    }
    out
}

/// K_r: r K_λ^μ_ν + (1 − r) K_ν^μ_λ.
pub fn k_r(k: &Array3, r: &Rational) -> Array3 {
    let n = k.len();
    let one_minus = Rational::from_integer(1.into()) - r;
    let mut out = zeros3(n, n, n);
    for l in 0..n {
        for mu in 0..n {
            for nu in 0..n {
                out[l][mu][nu] = &k[l][mu][nu].scale(r) + &k[nu][mu][l].scale(&one_minus);
            }
        }
    }
    out
}

/// Negates Christoffel symbols for comparison with the physics sign convention.
pub fn physics_sign(k: &Array3) -> Array3 {
    k.iter().map(|a| a.iter().map(|b| b.iter().map(|e| -e).collect()).collect()).collect()
}

/// The canonical soldering form θ̇_X = dx^λ⊗∂/∂ẋ^λ as `sigma[μ][λ]` = δ^μ_λ.
pub fn canonical_soldering(n: usize) -> Vec<Vec<Expr>> {
    (0..n).map(|mu| (0..n).map(|l| if mu == l { Expr::one() } else { Expr::zero() }).collect()).collect()
}

/// Cartan connection A = K + θ_X on TX.
pub fn cartan_connection(ctx: &JetContext, k: Array3) -> Result<Connection> {
    Connection::affine(ctx, k, canonical_soldering(ctx.n))
}

/// Composite connection γ = A_Σ∘Γ on Y → Σ → X. `a_lambda[i][λ]`,
/// `a_m[i][m]` are the components of A_Σ and `gamma[m][λ]` those of Γ;
/// the result is indexed by the context's fields.
pub fn composite_connection(
    ctx: &JetContext,
    sigma_fields: &[usize],
    y_fields: &[usize],
    a_lambda: &[Vec<Expr>],
    a_m: &[Vec<Expr>],
    gamma: &[Vec<Expr>],
) -> Result<Connection> {
    let mut comps = vec![vec![Expr::zero(); ctx.n]; ctx.m()];
    for (m, &f) in sigma_fields.iter().enumerate() {
        comps[f] = gamma[m].clone();
    }
    for (i, &f) in y_fields.iter().enumerate() {
        for l in 0..ctx.n {
            let mut e = a_lambda[i][l].clone();
            for m in 0..sigma_fields.len() {
                e += &a_m[i][m] * &gamma[m][l];
            }
            comps[f][l] = e;
        }
    }
    Connection::general(ctx, comps)
}

/// Vertical covariant differential D̃^i_λ = y^i_λ − A^i_λ − A^i_m σ^m_λ.
pub fn vertical_covariant_differential(
    ctx: &JetContext,
    sigma_fields: &[usize],
    y_fields: &[usize],
    a_lambda: &[Vec<Expr>],
    a_m: &[Vec<Expr>],
) -> Vec<Vec<Expr>> {
    y_fields
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            (0..ctx.n)
                .map(|l| {
                    let mut e = &ctx.jet(f, &[l]) - &a_lambda[i][l];
                    for (m, &s) in sigma_fields.iter().enumerate() {
                        e -= &a_m[i][m] * &ctx.jet(s, &[l]);
                    }
                    e
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize, m: usize) -> JetContext {
        let mut c = JetContext::new(n);
        for i in 0..m {
            c.even_field(&format!("y{}", i + 1)).unwrap();
        }
        c
    }

    #[test]
    fn curvature_example() {
        let c = ctx(2, 1);
        let y = c.jet(0, &[]);
        let g = Connection::general(&c, vec![vec![y.clone(), Expr::zero()]]).unwrap();
        let r = g.curvature(&c);
        // R_12 = ∂_1Γ_2 − ∂_2Γ_1 + Γ_1∂_yΓ_2 − Γ_2∂_yΓ_1 = 0
        assert!(r.get(&[0, 1], 2).is_empty());
        let h = Connection::general(&c, vec![vec![Expr::zero(), y.clone()]]).unwrap();
        // R_12 = 0 − 0 + 0 − y·0 ... Γ_2 = y: Γ_1∂Γ_2 − Γ_2∂Γ_1 = 0, ∂_1Γ_2 = 0
        assert!(h.curvature(&c).is_zero());
        let k = Connection::general(&c, vec![vec![y.clone(), Expr::base(0)]]).unwrap();
        // R_12 = ∂_1(x1) − 0 + y·0 − x1·1 = 1 − x1
        assert_eq!(k.curvature(&c).get(&[0, 1], 2), &Expr::one() - &Expr::base(0));
    }

    #[test]
    fn curvature_matches_fn_bracket() {
        let c = ctx(2, 2);
        let y1 = c.jet(0, &[]);
        let y2 = c.jet(1, &[]);
        let x1 = Expr::base(0);
        let g = Connection::general(
            &c,
            vec![vec![&y1 * &y2, &x1 * &y1], vec![y2.clone(), &(&y1 * &y1) + &x1]],
        )
        .unwrap();
        assert_eq!(g.curvature(&c), g.fn_curvature(&c).unwrap());
    }

    #[test]
    fn covariant_differential_examples() {
        let c = ctx(2, 1);
        let flat = Connection::general(&c, vec![vec![Expr::zero(), Expr::zero()]]).unwrap();
        let d = flat.covariant_differential(&c, &[Expr::base(0)]);
        assert_eq!(d[0], vec![Expr::one(), Expr::zero()]);
        let a = Expr::func(crate::kernel::Func::new("a", 0b11));
        let lin = Connection::linear(&c, vec![vec![vec![a.clone()]], vec![vec![Expr::zero()]]]).unwrap();
        let d = lin.covariant_differential(&c, &[Expr::one()]);
        assert_eq!(d[0][0], -a);
    }

    #[test]
    fn world_torsion_of_antisymmetric_k() {
        let n = 2;
        let mut k = zeros3(n, n, n);
        k[0][0][1] = Expr::int(3);
        k[1][0][0] = Expr::int(-3);
        let t = world_torsion(&k);
        assert_eq!(t[0][0][1], Expr::int(6));
        let sym = k_r(&k, &rat(1, 2));
        assert!(world_torsion(&sym).iter().flatten().flatten().all(|e| e.is_empty()));
    }

    #[test]
    fn torsion_of_world_connection_matches_formula() {
        let c = ctx(2, 2);
        let mut k = zeros3(2, 2, 2);
        k[0][1][1] = Expr::base(1);
        k[1][0][0] = Expr::int(2);
        k[0][0][1] = &Expr::base(0) * &Expr::base(1);
        let conn = Connection::world(&c, k.clone()).unwrap();
        let t = conn.torsion(&c, &canonical_soldering(2));
        let w = world_torsion(&k);
        for nu in 0..2 {
            // component (λ, μ) = (0, 1) equals T_μ^ν_λ = T_1^ν_0
            assert_eq!(t.get(&[0, 1], 2 + nu), w[1][nu][0]);
        }
    }

    #[test]
    fn dual_of_dual() {
        let c = ctx(1, 2);
        let k = vec![vec![vec![Expr::base(0), Expr::int(2)], vec![Expr::zero(), Expr::int(-1)]]];
        let g = Connection::linear(&c, k).unwrap();
        assert_eq!(g.dual(&c).unwrap().dual(&c).unwrap(), g);
    }

    #[test]
    fn rank_one_tensor_product() {
        let c = ctx(2, 1);
        let a = vec![vec![vec![Expr::base(0)]], vec![vec![Expr::int(1)]]];
        let b = vec![vec![vec![Expr::int(2)]], vec![vec![Expr::base(1)]]];
        let t = tensor_product_coefficients(&a, &b);
        assert_eq!(t[0][0][0], &Expr::base(0) + &Expr::int(2));
        assert_eq!(t[1][0][0], &Expr::int(1) + &Expr::base(1));
        let ga = Connection::linear(&c, a).unwrap();
        let gb = Connection::linear(&c, b).unwrap();
        let p = tensor_product_connection(&c, &ga, &gb).unwrap();
        assert_eq!(p.gamma[0][0], &(&Expr::base(0) + &Expr::int(2)) * &c.jet(0, &[]));
    }

    #[test]
    fn one_dimensional_levi_civita() {
        let f = Expr::func(crate::kernel::Func::new("f", 1));
        let m = Metric::new(vec![vec![f.clone()]]).unwrap();
        let k = levi_civita(&m);
        let expected = (&f.recip().unwrap() * &partial_base(&f, 0)).scale(&rat(-1, 2));
        assert_eq!(k[0][0][0], expected);
    }

    #[test]
    fn euclidean_is_flat() {
        let m = Metric::euclidean(3);
        let k = levi_civita(&m);
        assert!(k.iter().flatten().flatten().all(Expr::is_empty));
        assert!(world_curvature(&k).iter().flatten().flatten().flatten().all(Expr::is_empty));
    }

    #[test]
    fn sphere() {
        let x = Expr::base(0);
        let s2 = x.sin().pow_int(2).unwrap();
        let m = Metric::new(vec![vec![Expr::one(), Expr::zero()], vec![Expr::zero(), s2.clone()]]).unwrap();
        let k = levi_civita(&m);
        assert!(is_zero(&(&k[1][0][1] - &(&x.sin() * &x.cos()))));
        assert!(metric_compatibility(&m, &k).iter().flatten().flatten().all(is_zero));
        let r = world_curvature(&k);
        assert!(is_zero(&(&r[0][1][0][1] + &s2)));
        let ric = ricci(&r);
        assert!(is_zero(&(&ric[0][0] - &Expr::one())));
        assert!(is_zero(&(&ric[1][1] - &s2)));
        assert!(world_torsion(&k).iter().flatten().flatten().all(is_zero));
        assert!(is_zero(&(&physics_sign(&k)[1][0][1] + &k[1][0][1])));
    }

    #[test]
    fn singular_metric_rejected() {
        let g = vec![vec![Expr::one(), Expr::one()], vec![Expr::one(), Expr::one()]];
        assert_eq!(Metric::new(g), Err(Error::SingularMetric));
    }

    #[test]
    fn composite_examples() {
        let mut c = JetContext::new(1);
        c.even_field("s").unwrap();
        c.even_field("y").unwrap();
        let al = vec![vec![Expr::base(0)]];
        let am = vec![vec![c.jet(1, &[])]];
        let gm = vec![vec![c.jet(0, &[])]];
        let g = composite_connection(&c, &[0], &[1], &al, &am, &gm).unwrap();
        assert_eq!(g.gamma[0][0], c.jet(0, &[]));
        assert_eq!(g.gamma[1][0], &Expr::base(0) + &(&c.jet(1, &[]) * &c.jet(0, &[])));
        let d = vertical_covariant_differential(&c, &[0], &[1], &al, &am);
        assert_eq!(d[0][0], &(&c.jet(1, &[0]) - &Expr::base(0)) - &(&c.jet(1, &[]) * &c.jet(0, &[0])));
    }
}
