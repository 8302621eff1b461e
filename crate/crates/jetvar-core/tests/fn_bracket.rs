use jetvar_core::connections::Connection;
use jetvar_core::corpus::Corpus;
use jetvar_core::kernel::int;
use jetvar_core::tangent::TangentValuedForm;
use jetvar_core::{Expr, JetContext};
use proptest::prelude::*;
use rand::Rng;

fn ctx(n: usize, m: usize) -> JetContext {
    let mut c = JetContext::new(n);
    for i in 0..m {
        c.even_field(&format!("y{}", i + 1)).unwrap();
    }
    c
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

fn random_form(corpus: &mut Corpus, c: &JetContext, degree: usize) -> TangentValuedForm {
    corpus.terms = 2;
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

fn sign(neg: bool, f: TangentValuedForm) -> TangentValuedForm {
    if neg {
        f.scale(&int(-1))
    } else {
        f
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_is_graded_antisymmetric(seed in 0u64..10_000, r in 0usize..3, s in 0usize..2) {
        let c = ctx(2, 1);
        let mut corpus = Corpus::new(seed);
        let phi = random_form(&mut corpus, &c, r);
        let sigma = random_form(&mut corpus, &c, s);
        let lhs = phi.fn_bracket(&c, &sigma).unwrap();
        let rhs = sign((r * s) % 2 == 0, sigma.fn_bracket(&c, &phi).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_satisfies_graded_jacobi(seed in 0u64..10_000, r in 0usize..2, s in 0usize..2, t in 0usize..2) {
        let c = ctx(2, 1);
        let mut corpus = Corpus::new(seed);
        corpus.degree = 2;
        let phi = random_form(&mut corpus, &c, r);
        let sigma = random_form(&mut corpus, &c, s);
        let psi = random_form(&mut corpus, &c, t);
        let lhs = phi.fn_bracket(&c, &sigma.fn_bracket(&c, &psi).unwrap()).unwrap();
        let a = phi.fn_bracket(&c, &sigma).unwrap().fn_bracket(&c, &psi).unwrap();
        let b = sign((r * s) % 2 == 1, sigma.fn_bracket(&c, &phi.fn_bracket(&c, &psi).unwrap()).unwrap());
        prop_assert_eq!(lhs, a.add(&b));
    }

    #[test]
    fn curvature_bianchi_identities(seed in 0u64..10_000) {
        let c = ctx(2, 2);
        let mut corpus = Corpus::new(seed);
        corpus.terms = 2;
        let gamma: Vec<Vec<Expr>> = (0..2).map(|_| (0..2).map(|_| corpus.y_expr(&c)).collect()).collect();
        let g = Connection::general(&c, gamma).unwrap();
        let r = g.curvature(&c);
        prop_assert!(r.fn_bracket(&c, &r).unwrap().is_zero());
        prop_assert!(g.as_tangent_form(&c).nijenhuis_differential(&c, &r).unwrap().is_zero());
    }
}
