//! Seeded random expressions and forms for property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forms::{Form, VectorField};
use crate::kernel::{Expr, Func, JetContext, MultiIndex, Var};

pub struct Corpus {
    rng: ChaCha8Rng,
    /// Highest jet order used for generated variables.
    pub order: usize,
    /// Number of terms in generated expressions.
    pub terms: usize,
    /// Highest number of factors per generated monomial.
    pub degree: usize,
    pub use_funcs: bool,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Corpus { rng: ChaCha8Rng::seed_from_u64(seed), order: 2, terms: 3, degree: 3, use_funcs: true }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn coeff(&mut self) -> i64 {
        let c = self.rng.gen_range(1..=3);
        if self.rng.gen_bool(0.5) {
            c
        } else {
            -c
        }
    }

    pub fn index(&mut self, n: usize, max_order: usize) -> MultiIndex {
        let k = self.rng.gen_range(0..=max_order);
        MultiIndex::from_directions((0..k).map(|_| self.rng.gen_range(0..n)))
    }

    pub fn var(&mut self, ctx: &JetContext, max_order: usize) -> Var {
        let i = self.rng.gen_range(0..ctx.m());
        let idx = self.index(ctx.n, max_order);
        ctx.var(i, idx)
    }

    fn factor(&mut self, ctx: &JetContext, even_only: bool) -> Expr {
        let roll = self.rng.gen_range(0..10);
        if roll < 2 && ctx.n > 0 {
            return Expr::base(self.rng.gen_range(0..ctx.n));
        }
        if roll < 3 && self.use_funcs && !ctx.funcs.is_empty() {
            let f = ctx.funcs.choose(&mut self.rng).unwrap();
            return Expr::func(Func::new(&f.name, f.deps));
        }
        if ctx.m() == 0 {
            return Expr::int(self.coeff());
        }
        for _ in 0..20 {
            let v = self.var(ctx, self.order);
            if !(even_only && v.odd) {
                return Expr::var(v);
            }
        }
        Expr::one()
    }

    /// Random polynomial expression; odd factors allowed unless `even_only`.
    pub fn expr(&mut self, ctx: &JetContext, even_only: bool) -> Expr {
        let mut out = Expr::zero();
        for _ in 0..self.terms {
            let mut t = Expr::int(self.coeff());
            let k = self.rng.gen_range(0..=self.degree);
            for _ in 0..k {
                t = &t * &self.factor(ctx, even_only);
            }
            out += t;
        }
        out
    }

    /// Random even polynomial in base coordinates only.
    pub fn base_expr(&mut self, n: usize) -> Expr {
        let mut out = Expr::zero();
        for _ in 0..self.terms {
            let mut t = Expr::int(self.coeff());
            for _ in 0..self.rng.gen_range(0..=2) {
                t = &t * &Expr::base(self.rng.gen_range(0..n));
            }
            out += t;
        }
        out
    }

    /// Random even polynomial in base coordinates and order-zero fields.
    pub fn y_expr(&mut self, ctx: &JetContext) -> Expr {
        let mut out = Expr::zero();
        for _ in 0..self.terms {
            let mut t = Expr::int(self.coeff());
            for _ in 0..self.rng.gen_range(0..=2) {
                let f = if ctx.m() > 0 && self.rng.gen_bool(0.6) {
                    let i = self.rng.gen_range(0..ctx.m());
                    if ctx.fields[i].odd {
                        Expr::one()
                    } else {
                        ctx.jet(i, &[])
                    }
                } else {
                    Expr::base(self.rng.gen_range(0..ctx.n))
                };
                t = &t * &f;
            }
            out += t;
        }
        out
    }

    /// Random form of bidegree (k, s).
    pub fn form(&mut self, ctx: &JetContext, k: usize, s: usize) -> Form {
        let mut out = Form::zero();
        for _ in 0..self.terms.max(1) {
            let c = self.expr(ctx, false);
            let mut dirs: Vec<usize> = (0..ctx.n).collect();
            dirs.shuffle(&mut self.rng);
            let dx: Vec<u8> = dirs[..s.min(ctx.n)].iter().map(|&d| d as u8).collect();
            let theta: Vec<Var> = (0..k).map(|_| self.var(ctx, self.order)).collect();
            out += Form::from_parts(c, dx, theta);
        }
        out
    }

    /// Random Lagrangian density of the given jet order.
    pub fn lagrangian(&mut self, ctx: &JetContext, order: usize) -> Expr {
        let saved = self.order;
        self.order = order;
        let e = self.expr(ctx, true);
        self.order = saved;
        e
    }

    /// Random projectable vector field on Y with polynomial components.
    pub fn projectable_field(&mut self, ctx: &JetContext) -> VectorField {
        let mut u = VectorField::zero(ctx.n);
        for l in 0..ctx.n {
            if self.rng.gen_bool(0.6) {
                u.base[l] = self.base_expr(ctx.n);
            }
        }
        for i in 0..ctx.m() {
            if !ctx.fields[i].odd && self.rng.gen_bool(0.7) {
                u.fibre.insert(ctx.var0(i), self.y_expr(ctx));
            }
        }
        u
    }
}
