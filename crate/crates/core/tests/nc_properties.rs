use proptest::prelude::*;
use subord_core::exact::rat;
use subord_core::nc::{all_words, fdq, Alphabet, CompressionParams, Derivation, Gen, NCPoly, Word};
use subord_core::GaussRat;

struct Letters {
    x: Gen,
    p: Gen,
    xp: Gen,
}

fn letters() -> Letters {
    let mut a = Alphabet::new();
    let x = a.variable("X").unwrap();
    let p = a.projection("p").unwrap();
    let xp = a.variable("X_p").unwrap();
    Letters { x, p, xp }
}

/// Terms as (letter choices, real numerator, imaginary numerator, denominator).
fn terms(max_len: usize) -> impl Strategy<Value = Vec<(Vec<bool>, i64, i64, i64)>> {
    prop::collection::vec((prop::collection::vec(any::<bool>(), 0..=max_len), -6i64..=6, -3i64..=3, 1i64..=5), 0..5)
}

fn build(spec: &[(Vec<bool>, i64, i64, i64)], a: Gen, b: Gen) -> NCPoly {
    let mut out = NCPoly::zero();
    for (w, re, im, d) in spec {
        let word = Word::from_letters(w.iter().map(|&l| if l { a } else { b }));
        out.add_term(word, GaussRat::new(rat(*re, *d), rat(*im, *d)));
    }
    out
}

proptest! {
    #[test]
    fn leibniz_rule_holds(sa in terms(5), sb in terms(5)) {
        let l = letters();
        let a = build(&sa, l.x, l.p);
        let b = build(&sb, l.x, l.p);
        let d = Derivation::new(l.x, [l.p]).unwrap();
        prop_assert!(d.leibniz_residual(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn coassociative_on_random_polynomials(s in terms(6)) {
        let l = letters();
        let d = Derivation::new(l.x, [l.p]).unwrap();
        prop_assert!(d.coassociativity_residual(&build(&s, l.x, l.p)).unwrap().is_zero());
    }

    #[test]
    fn derivation_commutes_with_star(s in terms(6)) {
        let l = letters();
        let d = Derivation::new(l.x, [l.p]).unwrap();
        prop_assert!(d.star_residual(&build(&s, l.x, l.p)).unwrap().is_zero());
    }

    #[test]
    fn compression_is_a_coalgebra_morphism(s in terms(6), which in 0usize..3) {
        let l = letters();
        let alpha = [rat(1, 2), rat(1, 3), rat(2, 3)][which].clone();
        let params = CompressionParams::new(alpha, l.xp, l.x, l.p).unwrap();
        let poly = build(&s, l.xp, l.p);
        prop_assert!(params.check_coalgebra_morphism(&poly).unwrap().is_zero());
    }

    #[test]
    fn kernel_on_one_variable_is_the_constants(coeffs in prop::collection::vec(-4i64..=4, 1..7)) {
        let l = letters();
        let mut poly = NCPoly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            poly.add_term(Word::from_letters(core::iter::repeat_n(l.x, k)), GaussRat::from_int(*c));
        }
        let d = fdq(&poly, l.x, &[]).unwrap();
        prop_assert_eq!(d.is_zero(), poly.degree() == 0);
    }
}

#[test]
fn every_short_word_is_coassociative_and_star_compatible() {
    let l = letters();
    let d = Derivation::new(l.x, [l.p]).unwrap();
    for w in all_words(&[l.x, l.p], 6) {
        let poly = NCPoly::term(w, GaussRat::from_int(1));
        assert!(d.coassociativity_residual(&poly).unwrap().is_zero());
        assert!(d.star_residual(&poly).unwrap().is_zero());
    }
}

#[test]
fn doubled_unit_rule_breaks_the_morphism() {
    let l = letters();
    let params = CompressionParams::new(rat(1, 2), l.xp, l.x, l.p).unwrap();
    let broken = Derivation::new(l.x, [l.p]).unwrap().with_scale(GaussRat::from_int(2));
    let r = params.check_coalgebra_morphism_with(&NCPoly::gen(l.xp), &broken).unwrap();
    assert!(!r.is_zero());
}
