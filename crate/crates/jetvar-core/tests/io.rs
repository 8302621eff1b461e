use jetvar_core::corpus::Corpus;
use jetvar_core::io::{expr_to_text, form_to_text, parse_expr, parse_form, FormBasis};
use jetvar_core::kernel::rat;
use jetvar_core::{Expr, JetContext};
use proptest::prelude::*;

fn ctx(n: usize) -> JetContext {
    let names = ["t", "x", "z"];
    let mut c = JetContext::with_coords(&names[..n]).unwrap();
    c.even_field("y").unwrap();
    c.even_field("u").unwrap();
    c.odd_field("c", 1).unwrap();
    c.add_func("f", &[0]).unwrap();
    c
}

fn decorate(corpus: &mut Corpus, c: &JetContext, e: Expr, seed: u64) -> Expr {
    let b = corpus.base_expr(c.n);
    match seed % 5 {
        0 => &e + &b.sin(),
        1 => &e * &(&(&b * &b) + &Expr::one()).pow_rational(&rat(1, 2)).unwrap(),
        2 => &e + &(&Expr::base(0) + &Expr::int(2)).recip().unwrap(),
        3 => e.scale(&rat(3, 7)),
        _ => &e + &b.exp().ln(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn expressions_round_trip(seed in 0u64..100_000, n in 1usize..4) {
        let c = ctx(n);
        let mut corpus = Corpus::new(seed);
        let e = corpus.expr(&c, false);
        let e = decorate(&mut corpus, &c, e, seed);
        let text = expr_to_text(&c, &e);
        let back = parse_expr(&c, &text, 1).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(expr_to_text(&c, &back), text);
    }

    #[test]
    fn forms_round_trip(seed in 0u64..100_000, n in 1usize..4, k in 0usize..3) {
        let c = ctx(n);
        let mut corpus = Corpus::new(seed);
        corpus.terms = 2;
        let f = corpus.form(&c, k, (seed as usize) % (n + 1));
        for basis in [FormBasis::Theta, FormBasis::Dy] {
            let text = form_to_text(&c, &f, basis);
            let back = parse_form(&c, &text, 1).unwrap();
            prop_assert_eq!(&back, &f, "{}", text);
        }
    }
}
