use jetvar_core::corpus::Corpus;
use jetvar_core::forms::Form;
use jetvar_core::gauge::{GaugeContext, LieAlgebra};
use jetvar_core::graded::{form_ghost_number, BrstContext};
use jetvar_core::kernel::{int, Derivation, Rational};
use jetvar_core::variational::variational_delta;
use jetvar_core::{Expr, JetContext};
use proptest::prelude::*;

fn mixed_ctx(n: usize) -> JetContext {
    let mut ctx = JetContext::new(n);
    ctx.even_field("y").unwrap();
    let c = ctx.odd_field("c", 1).unwrap();
    ctx.odd_field("b", -1).unwrap();
    ctx.add_antifield("cstar", c).unwrap();
    ctx
}

fn corpus(seed: u64) -> Corpus {
    let mut c = Corpus::new(seed);
    c.terms = 2;
    c.use_funcs = false;
    c
}

fn random_algebra(kind: u8, a: i64, b: i64, c: i64) -> LieAlgebra {
    match kind {
        0 => LieAlgebra::abelian(1),
        1 => LieAlgebra::su2(),
        2 => {
            let mut t = vec![vec![vec![Rational::from_integer(0.into()); 2]; 2]; 2];
            t[0][0][1] = int(a);
            t[0][1][0] = int(-a);
            t[1][0][1] = int(b);
            t[1][1][0] = int(-b);
            LieAlgebra::new(t, None).unwrap()
        }
        _ => {
            let mut t = vec![vec![vec![Rational::from_integer(0.into()); 3]; 3]; 3];
            for ((r, p, q), s) in [((0, 1, 2), a), ((1, 2, 0), b), ((2, 0, 1), c)] {
                t[r][p][q] = int(s);
                t[r][q][p] = int(-s);
            }
            LieAlgebra::new(t, None).unwrap()
        }
    }
}

fn homogeneous_parts(ctx: &JetContext, e: &Expr) -> Vec<(i32, Expr)> {
    let mut parts: Vec<(i32, Expr)> = Vec::new();
    for (m, c) in e.terms() {
        let t = Expr::term(m.clone(), c.clone());
        let g = ctx.ghost_number(&t).unwrap();
        match parts.iter_mut().find(|(h, _)| *h == g) {
            Some((_, p)) => *p += t,
            None => parts.push((g, t)),
        }
    }
    parts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graded_bicomplex_identities(seed in 0u64..10_000, n in 1usize..3) {
        let ctx = mixed_ctx(n);
        let mut cp = corpus(seed);
        let f = cp.form(&ctx, (seed % 2) as usize, n - 1);
        prop_assert!(f.d_h(n).d_h(n).is_zero_exact());
        let top = cp.form(&ctx, 0, n);
        prop_assert!(variational_delta(n, &f.h_projection(0, n - 1).d_h(n)).unwrap().is_zero_exact());
        let once = variational_delta(n, &top).unwrap();
        prop_assert!(variational_delta(n, &once).unwrap().is_zero_exact());
    }

    #[test]
    fn horizontal_differential_keeps_ghost_number(seed in 0u64..10_000, n in 1usize..4) {
        let ctx = mixed_ctx(n);
        let e = corpus(seed).expr(&ctx, false);
        for (g, part) in homogeneous_parts(&ctx, &e) {
            let f = Form::scalar(part).wedge(&Form::theta(ctx.var0(1)));
            let dh = f.d_h(n);
            if !dh.is_zero_exact() {
                prop_assert_eq!(form_ghost_number(&ctx, &dh), Some(g + 1));
            }
        }
    }

    #[test]
    fn wedge_exchange_law(seed in 0u64..10_000, n in 1usize..4) {
        let ctx = mixed_ctx(n);
        let mut cp = corpus(seed);
        let mut pick = |k: u64| -> (Form, usize, bool) {
            match k % 3 {
                0 => (Form::dx((k / 3) as usize % n), 1, false),
                _ => {
                    let v = cp.var(&ctx, 1);
                    (Form::theta(v), 1, v.odd)
                }
            }
        };
        let (a, da, pa) = pick(seed);
        let (b, db, pb) = pick(seed / 7);
        let sign = (da * db) % 2 == 1;
        let sign = sign ^ (pa && pb);
        let lhs = a.wedge(&b);
        let rhs = b.wedge(&a);
        prop_assert_eq!(lhs, if sign { -rhs } else { rhs });
    }

    #[test]
    fn brst_is_nilpotent(kind in 0u8..4, a in -2i64..3, b in -2i64..3, c in -2i64..3, n in 1usize..3, seed in 0u64..10_000) {
        let bc = BrstContext::new(GaugeContext::new(random_algebra(kind, a, b, c), n).unwrap()).unwrap();
        let brst = bc.operator().unwrap();
        if !bc.gauge.algebra.is_abelian() {
            prop_assert_eq!(brst.ghost_coefficient.clone(), Some(Rational::new((-1).into(), 2.into())));
        }
        let s = &brst.derivation;
        let mut cp = corpus(seed);
        cp.order = 1;
        cp.degree = 2;
        let e = cp.expr(bc.ctx(), false);
        prop_assert!(s.apply(&s.apply(&e)).is_empty());
        for (g, part) in homogeneous_parts(bc.ctx(), &e) {
            let sp = s.apply(&part);
            if !sp.is_empty() {
                prop_assert_eq!(bc.ctx().ghost_number(&sp), Some(g + 1));
            }
        }
    }

    #[test]
    fn brst_anticommutes_with_horizontal_differential(kind in 0u8..4, a in -2i64..3, b in -2i64..3, c in -2i64..3, n in 1usize..4, seed in 0u64..10_000) {
        let bc = BrstContext::new(GaugeContext::new(random_algebra(kind, a, b, c), n).unwrap()).unwrap();
        let s = bc.operator().unwrap().derivation;
        let mut cp = corpus(seed);
        cp.order = 1;
        cp.degree = 2;
        let f = cp.form(bc.ctx(), 0, (seed as usize) % n);
        let lhs = BrstContext::on_form(&s, &f.d_h(n)).unwrap() + BrstContext::on_form(&s, &f).unwrap().d_h(n);
        prop_assert!(lhs.is_zero_exact());
        prop_assert!(bc.check().unwrap().holds());
    }
}
