//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use jetvar_core::connections::{
    levi_civita, metric_compatibility, world_curvature, Connection, Metric,
};
use jetvar_core::corpus::Corpus;
use jetvar_core::forms::{Form, VectorField};
use jetvar_core::gauge::{GaugeContext, LieAlgebra};
use jetvar_core::graded::{form_ghost_number, BrstContext};
use jetvar_core::io::{expr_to_text, form_to_text, parse_expr, parse_form, FormBasis};
use jetvar_core::kernel::numeric::Point;
use jetvar_core::kernel::{int, partial_base, rat, total_derivative, Expr, Rational};
use jetvar_core::tangent::TangentValuedForm;
use jetvar_core::variational::{
    first_variational_formula, horizontal_antiderivative, noether_current, tau, variational_delta,
    variational_derivatives, Lagrangian,
};
use jetvar_core::JetContext;
use rand::Rng;

/// Randomized expressions or forms drawn per corpus-based suite.
const CORPUS_SIZE: u64 = 200;
/// First-variational-formula pairs.
const FIRST_VARIATION_PAIRS: u64 = 100;
/// Exact forms handed to the antiderivative.
const ANTIDERIVATIVES: u64 = 50;
/// Sample points and absolute tolerance of numeric checks.
const NUMERIC_POINTS: u64 = 16;
const NUMERIC_TOLERANCE: f64 = 1e-9;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome { ok: true, detail: summary }
    } else {
        let shown: Vec<String> = failures.iter().take(3).cloned().collect();
        Outcome { ok: false, detail: format!("{} failure(s): {}", failures.len(), shown.join("; ")) }
    }
}

fn graded_ctx(n: usize) -> JetContext {
    let mut ctx = JetContext::new(n);
    ctx.even_field("y").unwrap();
    ctx.even_field("u").unwrap();
    ctx.odd_field("c", 1).unwrap();
    ctx.add_func("f", &[0]).unwrap();
    ctx
}

fn even_ctx(n: usize, m: usize) -> JetContext {
    let mut ctx = JetContext::new(n);
    for i in 0..m {
        ctx.even_field(&format!("y{}", i + 1)).unwrap();
    }
    ctx
}

fn bicomplex() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..CORPUS_SIZE {
        let n = 1 + (seed % 3) as usize;
        let ctx = graded_ctx(n);
        let mut corpus = Corpus::new(seed);
        corpus.terms = 2;
        let f = corpus.form(&ctx, (seed / 3 % 3) as usize, (seed / 9 % n as u64) as usize);
        let checks = [
            ("d_H^2", f.d_h(n).d_h(n).is_zero_exact()),
            ("d_V^2", f.d_v().d_v().is_zero_exact()),
            ("d_H d_V + d_V d_H", (&f.d_h(n).d_v() + &f.d_v().d_h(n)).is_zero_exact()),
            ("d^2", f.d(n).d(n).is_zero_exact()),
            ("h0 d = d_H h0", f.d(n).h0() == f.h0().d_h(n)),
        ];
        failures.extend(checks.iter().filter(|(_, ok)| !ok).map(|(name, _)| format!("{name} (seed {seed})")));
    }
    outcome(failures, format!("{CORPUS_SIZE} forms with odd fields, 5 identities exact"))
}

fn variational() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..CORPUS_SIZE {
        let n = 1 + (seed % 2) as usize;
        let ctx = graded_ctx(n);
        let mut corpus = Corpus::new(seed);
        corpus.terms = 2;
        let k = 1 + (seed / 2 % 2) as usize;
        let top = corpus.form(&ctx, k, 0).wedge(&Form::volume(n));
        let t = tau(n, &top).unwrap();
        if tau(n, &t).unwrap() != t {
            failures.push(format!("tau^2 = tau (seed {seed})"));
        }
        let xi = corpus.form(&ctx, k, n - 1);
        if !tau(n, &xi.d_h(n)).unwrap().is_zero_exact() {
            failures.push(format!("tau d_H = 0 (seed {seed})"));
        }
        let l = Lagrangian::new(corpus.lagrangian(&ctx, 2), n);
        let dl = variational_delta(n, &l.form()).unwrap();
        if !variational_delta(n, &dl).unwrap().is_zero_exact() {
            failures.push(format!("delta^2 = 0 (seed {seed})"));
        }
        let eta = corpus.form(&ctx, (seed % 2) as usize, n - 1);
        if !variational_delta(n, &eta.d_h(n)).unwrap().is_zero_exact() {
            failures.push(format!("delta d_H = 0 (seed {seed})"));
        }
        let h = corpus.lagrangian(&ctx, 1);
        let exact = total_derivative(&h, (seed as usize) % n);
        if !variational_derivatives(&ctx, &exact).iter().all(Expr::is_empty) {
            failures.push(format!("EL of d_H-exact Lagrangian (seed {seed})"));
        }
        let closed = eta.d(n).h0();
        let shifted = &l.density + &closed.terms().map(|(_, c)| c.clone()).sum::<Expr>();
        let h0_is_top = closed.terms().all(|(b, _)| b.dx.len() == n);
        if !h0_is_top || variational_derivatives(&ctx, &l.density) != variational_derivatives(&ctx, &shifted) {
            failures.push(format!("EL invariant under closed forms (seed {seed})"));
        }
    }
    outcome(failures, format!("{CORPUS_SIZE} samples, 6 identities exact"))
}

/// Random first-order polynomial in the first jets only, so translations
/// and constant vertical shifts are symmetries.
fn translation_invariant(corpus: &mut Corpus, ctx: &JetContext) -> Expr {
    let mut l = Expr::zero();
    for _ in 0..3 {
        let mut m = Expr::constant(int(corpus.coeff()));
        for _ in 0..corpus.rng().gen_range(1..4) {
            let i = corpus.rng().gen_range(0..ctx.m());
            let lam = corpus.rng().gen_range(0..ctx.n);
            m = &m * &ctx.jet(i, &[lam]);
        }
        l += m;
    }
    l
}

fn first_variation() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..FIRST_VARIATION_PAIRS {
        let n = 1 + (seed % 2) as usize;
        let ctx = even_ctx(n, 2);
        let mut corpus = Corpus::new(seed);
        corpus.terms = 2;
        let l = Lagrangian::new(corpus.lagrangian(&ctx, 1), n);
        let u = corpus.projectable_field(&ctx);
        if !first_variational_formula(&ctx, &l, &u).unwrap().residual().is_empty() {
            failures.push(format!("first variational formula (seed {seed})"));
        }
        let sym = Lagrangian::new(translation_invariant(&mut corpus, &ctx), n);
        let dir = (seed as usize) % (n + ctx.m());
        let u = if dir < n {
            VectorField::coordinate(n, dir)
        } else {
            VectorField::vertical_coordinate(n, ctx.var0(dir - n))
        };
        let nc = noether_current(&ctx, &sym, &u).unwrap();
        let el = variational_derivatives(&ctx, &sym.density);
        // d_λ𝔗^λ = Σ_i (u^i − y^i_μu^μ) E_i for a symmetry.
        let mut on_shell = Expr::zero();
        for (i, e) in el.iter().enumerate() {
            let mut c = u.component(&ctx.var0(i)).unwrap();
            for (mu, um) in u.base.iter().enumerate() {
                c -= um * &ctx.jet(i, &[mu]);
            }
            on_shell += &c * e;
        }
        let div: Expr = (0..n).map(|lam| total_derivative(&nc.current[lam], lam)).sum();
        if !nc.lie_term.is_empty() || div != on_shell || nc.divergence != div {
            failures.push(format!("Noether divergence for a symmetric pair (seed {seed})"));
        }
    }
    outcome(failures, format!("{FIRST_VARIATION_PAIRS} pairs closed; {FIRST_VARIATION_PAIRS} symmetric Noether divergences exact"))
}

fn free_scalar() -> Outcome {
    let mut failures = Vec::new();
    for n in 1..=3 {
        let ctx = even_ctx(n, 1);
        let half = rat(1, 2);
        let density: Expr = (0..n).map(|l| (&ctx.jet(0, &[l]) * &ctx.jet(0, &[l])).scale(&half)).sum();
        let l = Lagrangian::new(density.clone(), n);
        let oracle: Expr = (0..n).map(|l| -ctx.jet(0, &[l, l])).sum();
        if variational_derivatives(&ctx, &density)[0] != oracle {
            failures.push(format!("EL coefficient, n = {n}"));
        }
        // Canonical stress 𝔗^λ_0 = y_λ y_0 − δ^λ_0 ℒ.
        let nc = noether_current(&ctx, &l, &VectorField::coordinate(n, 0)).unwrap();
        for lam in 0..n {
            let mut t = &ctx.jet(0, &[lam]) * &ctx.jet(0, &[0]);
            if lam == 0 {
                t -= &density;
            }
            if nc.current[lam] != t {
                failures.push(format!("energy current component {lam}, n = {n}"));
            }
        }
    }
    outcome(failures, "n = 1, 2, 3: EL and time-translation current match".into())
}

fn combinations(dim: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..dim {
        for mut rest in combinations(dim, k - 1) {
            if rest.first().map_or(true, |&r| r > first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

fn random_tangent(corpus: &mut Corpus, c: &JetContext, degree: usize) -> TangentValuedForm {
    let mut out = TangentValuedForm::zero(c, degree);
    let dim = c.n + c.m();
    for k in combinations(dim, degree) {
        for mu in 0..dim {
            if corpus.rng().gen_bool(0.4) {
                out.set(&k, mu, corpus.y_expr(c));
            }
        }
    }
    out
}

fn signed(neg: bool, f: TangentValuedForm) -> TangentValuedForm {
    if neg {
        f.scale(&int(-1))
    } else {
        f
    }
}

fn fn_bracket() -> Outcome {
    let mut failures = Vec::new();
    let c = even_ctx(2, 1);
    for seed in 0..CORPUS_SIZE / 4 {
        let mut corpus = Corpus::new(seed);
        corpus.terms = 2;
        corpus.degree = 2;
        let (r, s, t) = ((seed % 3) as usize, (seed / 3 % 2) as usize, (seed / 6 % 2) as usize);
        let phi = random_tangent(&mut corpus, &c, r);
        let sigma = random_tangent(&mut corpus, &c, s);
        let psi = random_tangent(&mut corpus, &c, t.min(1));
        let ps = phi.fn_bracket(&c, &sigma).unwrap();
        if ps != signed((r * s) % 2 == 0, sigma.fn_bracket(&c, &phi).unwrap()) {
            failures.push(format!("graded antisymmetry (seed {seed})"));
        }
        if r < 2 {
            let lhs = phi.fn_bracket(&c, &sigma.fn_bracket(&c, &psi).unwrap()).unwrap();
            let a = ps.fn_bracket(&c, &psi).unwrap();
            let b = signed((r * s) % 2 == 1, sigma.fn_bracket(&c, &phi.fn_bracket(&c, &psi).unwrap()).unwrap());
            if lhs != a.add(&b) {
                failures.push(format!("graded Jacobi (seed {seed})"));
            }
        }
    }
    for seed in 0..CORPUS_SIZE / 4 {
        let n = 1 + (seed % 2) as usize;
        let m = 1 + (seed / 2 % 2) as usize;
        let c = even_ctx(n.max(2), m);
        let mut corpus = Corpus::new(seed);
        corpus.terms = 2;
        let gamma: Vec<Vec<Expr>> = (0..m).map(|_| (0..c.n).map(|_| corpus.y_expr(&c)).collect()).collect();
        let g = Connection::general(&c, gamma).unwrap();
        let r = g.curvature(&c);
        if r != g.fn_curvature(&c).unwrap() {
            failures.push(format!("curvature = 1/2 [G, G] (seed {seed})"));
        }
        if m == 2 {
            if !r.fn_bracket(&c, &r).unwrap().is_zero() {
                failures.push(format!("[R, R] = 0 (seed {seed})"));
            }
            if !g.as_tangent_form(&c).nijenhuis_differential(&c, &r).unwrap().is_zero() {
                failures.push(format!("d_G R = 0 (seed {seed})"));
            }
        }
    }
    outcome(failures, format!("{} bracket samples, {} connections", CORPUS_SIZE / 4, CORPUS_SIZE / 4))
}

fn riemannian() -> Outcome {
    let mut failures = Vec::new();
    let theta = Expr::base(0);
    let (s, co) = (theta.sin(), theta.cos());
    let metric = Metric::new(vec![vec![Expr::one(), Expr::zero()], vec![Expr::zero(), &s * &s]]).unwrap();
    let k = levi_civita(&metric);
    // Sign convention K = −Γ, where Γ^θ_φφ = −sin θ cos θ and Γ^φ_θφ = cot θ.
    let cot = &co * &s.recip().unwrap();
    let mut oracle = vec![vec![vec![Expr::zero(); 2]; 2]; 2];
    oracle[1][0][1] = &s * &co;
    oracle[0][1][1] = -cot.clone();
    oracle[1][1][0] = -cot;
    for l in 0..2 {
        for nu in 0..2 {
            for mu in 0..2 {
                if k[l][nu][mu] != oracle[l][nu][mu] {
                    failures.push(format!("K[{l}][{nu}][{mu}] = {}", expr_to_text(&JetContext::new(2), &k[l][nu][mu])));
                }
            }
        }
    }
    let nabla = metric_compatibility(&metric, &k);
    for seed in 0..NUMERIC_POINTS {
        let mut corpus = Corpus::new(1000 + seed);
        let mut p = Point::new(corpus.rng());
        for e in nabla.iter().flatten().flatten() {
            match p.eval(e) {
                Some(v) if v.abs() <= NUMERIC_TOLERANCE => {}
                v => failures.push(format!("nabla g = {v:?} at sample {seed}")),
            }
        }
    }
    for n in 1..=3 {
        let flat = world_curvature(&levi_civita(&Metric::euclidean(n)));
        if !flat.iter().flatten().flatten().flatten().all(Expr::is_empty) {
            failures.push(format!("Euclidean curvature, n = {n}"));
        }
    }
    outcome(
        failures,
        format!("2-sphere symbols exact; nabla g within {NUMERIC_TOLERANCE:e} at {NUMERIC_POINTS} points; flat curvature zero"),
    )
}

/// Validated 3-dimensional algebra with [e_i, e_j] = α_k e_k on cyclic triples.
fn random_algebra(seed: u64) -> LieAlgebra {
    let mut corpus = Corpus::new(seed);
    let zero = Rational::from_integer(0.into());
    let mut t = vec![vec![vec![zero; 3]; 3]; 3];
    for (r, p, q) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let a = int(corpus.rng().gen_range(-2..3));
        t[r][q][p] = -a.clone();
        t[r][p][q] = a;
    }
    LieAlgebra::new(t, None).unwrap()
}

fn gauge() -> Outcome {
    let mut failures = Vec::new();
    let algebras = [("u1", LieAlgebra::abelian(1)), ("su2", LieAlgebra::su2()), ("random", random_algebra(7))];
    for (name, alg) in &algebras {
        let g = GaugeContext::new(alg.clone(), 3).unwrap();
        let (s, f) = g.canonical_splitting();
        for r in 0..g.dim() {
            for l in 0..3 {
                for mu in 0..3 {
                    if &s[r][l][mu] + &f[r][l][mu].scale(&rat(1, 2)) != g.potential_jet(r, l, mu) {
                        failures.push(format!("{name}: reconstruction [{r}][{l}][{mu}]"));
                    }
                }
            }
        }
        if !g.bianchi_check() {
            failures.push(format!("{name}: second Bianchi identity"));
        }
    }
    for (name, alg) in algebras.iter().take(2) {
        for (n, diag) in [(2, vec![1, 1]), (3, vec![1, -1, -1])] {
            let g = GaugeContext::new(alg.clone(), n).unwrap();
            let ym = g.yang_mills(&Metric::diagonal(&diag), &rat(1, 2)).unwrap();
            if !g.invariance_equations(&ym.density).all_zero() {
                failures.push(format!("{name}, n = {n}: invariance equations"));
            }
            let mut corpus = Corpus::new(n as u64);
            corpus.terms = 2;
            let xi: Vec<Expr> = (0..g.dim()).map(|_| corpus.base_expr(n)).collect();
            let nd = g.noether_identities(&ym, &xi).unwrap();
            if !nd.identities.all_zero() {
                failures.push(format!("{name}, n = {n}: Noether identities"));
            }
            if !nd.decomposition_residual.iter().all(Expr::is_empty) {
                failures.push(format!("{name}, n = {n}: current = W + d U"));
            }
            let antisym = (0..n).all(|a| (0..n).all(|b| (&nd.superpotential[a][b] + &nd.superpotential[b][a]).is_empty()));
            if !antisym {
                failures.push(format!("{name}, n = {n}: superpotential antisymmetry"));
            }
        }
    }
    outcome(failures, "u(1), su(2), random 3-dimensional algebra; Yang-Mills identities exact".into())
}

fn brst() -> Outcome {
    let mut failures = Vec::new();
    for (name, alg, want) in [("u1", LieAlgebra::abelian(1), None), ("su2", LieAlgebra::su2(), Some(rat(-1, 2)))] {
        for n in 1..=3 {
            let b = BrstContext::new(GaugeContext::new(alg.clone(), n).unwrap()).unwrap();
            let report = b.check().unwrap();
            if !report.holds() {
                failures.push(format!("{name}, n = {n}: s^2, s d_H + d_H s or ghost shift"));
            }
            if report.ghost_coefficient != want {
                failures.push(format!("{name}, n = {n}: ghost coefficient {:?}", report.ghost_coefficient));
            }
            let s = b.operator().unwrap().derivation;
            let ctx = b.ctx();
            let mut corpus = Corpus::new(n as u64);
            corpus.terms = 2;
            corpus.use_funcs = false;
            for seed in 0..CORPUS_SIZE / 10 {
                let f = corpus.form(ctx, (seed % 2) as usize, (seed as usize) % n);
                for (basis, c) in f.terms() {
                    for (m, q) in c.terms() {
                        let phi = Form::term(Expr::from_monomial(m).scale(q), basis.clone());
                        let gh = form_ghost_number(ctx, &phi);
                        for (op, out) in [("d_H", phi.d_h(n)), ("d_V", phi.d_v())] {
                            if !out.is_zero_exact() && form_ghost_number(ctx, &out) != gh {
                                failures.push(format!("{name}: {op} changes ghost number"));
                            }
                        }
                        if basis.theta.is_empty() {
                            let sphi = BrstContext::on_form(&s, &phi).unwrap();
                            if !sphi.is_zero_exact() && form_ghost_number(ctx, &sphi) != gh.map(|g| g + 1) {
                                failures.push(format!("{name}: s does not raise ghost number by one"));
                            }
                        }
                    }
                }
            }
        }
    }
    outcome(failures, "u(1) and su(2), n = 1..3; k = -1/2 solved for su(2); ghost numbers conserved".into())
}

fn antiderivative() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..ANTIDERIVATIVES {
        let n = 2 + (seed % 2) as usize;
        let ctx = graded_ctx(n);
        let mut corpus = Corpus::new(seed);
        corpus.terms = 2;
        corpus.use_funcs = false;
        let s = (seed / 2 % (n as u64 - 1)) as usize;
        let sigma = corpus.form(&ctx, 0, s).d_h(n);
        match horizontal_antiderivative(n, &sigma) {
            Ok(a) => {
                let constant = a.obstruction.terms().all(|(_, c)| c.as_constant().is_some());
                if &a.xi.d_h(n) + &a.obstruction != sigma || !constant {
                    failures.push(format!("re-application (seed {seed})"));
                }
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    for n in 2..=3 {
        let dx1 = Form::dx(0);
        match horizontal_antiderivative(n, &dx1) {
            Ok(a) if a.xi.is_zero_exact() && a.obstruction == dx1 => {}
            other => failures.push(format!("dx1 in dimension {n}: {other:?}")),
        }
    }
    outcome(failures, format!("{ANTIDERIVATIVES} exact forms recovered; dx1 is pure obstruction"))
}

fn decls_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("decls")
}

fn jetvar(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_jetvar")).args(args).output().expect("jetvar runs")
}

fn cli() -> Outcome {
    let mut failures = Vec::new();
    let names = ["maxwell", "su2_ym", "free_scalar", "sphere2"];
    for name in names {
        let decl = decls_dir().join(format!("{name}.decl"));
        let golden = std::fs::read(decls_dir().join(format!("{name}.out"))).unwrap_or_default();
        let decl = decl.to_str().unwrap();
        let first = jetvar(&["run", decl]);
        let second = jetvar(&["run", decl]);
        if !first.status.success() || first.stdout != golden {
            failures.push(format!("{name}: output differs from golden file"));
        }
        if first.stdout != second.stdout {
            failures.push(format!("{name}: output not deterministic"));
        }
        let json = jetvar(&["convert", decl, "--to", "json"]);
        let path = std::env::temp_dir().join(format!("jetvar-acceptance-{}-{name}.json", std::process::id()));
        std::fs::write(&path, &json.stdout).unwrap();
        let mirrored = jetvar(&["run", path.to_str().unwrap()]);
        let _ = std::fs::remove_file(&path);
        if mirrored.stdout != golden {
            failures.push(format!("{name}: JSON mirror output differs"));
        }
    }
    let mut count = 0;
    for seed in 0..CORPUS_SIZE {
        let n = 1 + (seed % 3) as usize;
        let ctx = graded_ctx(n);
        let mut corpus = Corpus::new(seed);
        let e = corpus.expr(&ctx, false);
        let e = match seed % 4 {
            0 => &e + &corpus.base_expr(n).sin(),
            1 => &e * &(&(&Expr::base(0) * &Expr::base(0)) + &Expr::one()).pow_rational(&rat(1, 2)).unwrap(),
            2 => &e + &partial_base(&ctx.func("f").unwrap(), 0),
            _ => e,
        };
        let text = expr_to_text(&ctx, &e);
        match parse_expr(&ctx, &text, 1) {
            Ok(back) if back == e && expr_to_text(&ctx, &back) == text => {}
            _ => failures.push(format!("expression round trip: {text}")),
        }
        corpus.terms = 2;
        let f = corpus.form(&ctx, (seed % 3) as usize, (seed / 3 % (n as u64 + 1)) as usize);
        for basis in [FormBasis::Theta, FormBasis::Dy] {
            let text = form_to_text(&ctx, &f, basis);
            match parse_form(&ctx, &text, 1) {
                Ok(back) if back == f && form_to_text(&ctx, &back, basis) == text => {}
                _ => failures.push(format!("form round trip: {text}")),
            }
        }
        count += 1;
    }
    outcome(failures, format!("4 golden files byte-equal, JSON mirror agrees; {count} expressions and forms round-trip"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("bicomplex", bicomplex),
        ("variational", variational),
        ("first variational formula", first_variation),
        ("free scalar", free_scalar),
        ("Frolicher-Nijenhuis and curvature", fn_bracket),
        ("Riemannian", riemannian),
        ("gauge", gauge),
        ("BRST", brst),
        ("inverse problem", antiderivative),
        ("CLI", cli),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let status = if out.ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {status} {name}: {} ({:.1?})", k + 1, out.detail, start.elapsed());
        if !out.ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
