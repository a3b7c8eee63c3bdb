use proptest::prelude::*;
use subord_core::exact::{int, rat};
use subord_core::freeness::standard::{atomic_moments, semicircle_moments};
use subord_core::freeness::{
    catalan, compressed_moments, cumulants_to_moments, enumerate_nc, expect_onto, moments_to_cumulants, FreenessModel, Subalgebra,
};
use subord_core::nc::{Alphabet, CompressionParams, Gen, NCPoly, Word};
use subord_core::{GaussRat, Rational};

fn atoms_strategy() -> impl Strategy<Value = Vec<(Rational, Rational)>> {
    prop::collection::vec((-3i64..=3, 1i64..=4, 1i64..=3), 1..4).prop_map(|raw| {
        let total: i64 = raw.iter().map(|r| r.2).sum();
        raw.iter().map(|&(n, d, w)| (rat(n, d), rat(w, total))).collect()
    })
}

struct Setup {
    model: FreenessModel,
    x: Gen,
    p: Gen,
    xp: Gen,
}

fn setup(moments: &[Rational], alpha: &Rational, degree: usize) -> Setup {
    let mut a = Alphabet::new();
    let x = a.variable("X").unwrap();
    let p = a.projection("p").unwrap();
    let xp = a.variable("X_p").unwrap();
    let mut model = FreenessModel::new(degree);
    model.add_variable(x, moments).unwrap();
    model.add_projection(p, alpha).unwrap();
    Setup { model, x, p, xp }
}

#[test]
fn catalan_counts() {
    for n in 1..=10 {
        assert_eq!(enumerate_nc(n).unwrap().len() as u64, catalan(n), "n = {n}");
    }
}

proptest! {
    #[test]
    fn moment_cumulant_round_trip(raw in prop::collection::vec((-9i64..=9, 1i64..=7), 1..=10)) {
        let mut m = vec![int(1)];
        m.extend(raw.iter().map(|&(n, d)| rat(n, d)));
        prop_assert_eq!(cumulants_to_moments(&moments_to_cumulants(&m)), m.clone());
        prop_assert_eq!(moments_to_cumulants(&cumulants_to_moments(&m)), m);
    }

    #[test]
    fn trace_is_cyclic(word in prop::collection::vec(any::<bool>(), 1..=10), shift in 0usize..10, atoms in atoms_strategy()) {
        let s = setup(&atomic_moments(&atoms, 10), &rat(1, 3), 10);
        let letters: Vec<Gen> = word.iter().map(|&b| if b { s.x } else { s.p }).collect();
        let mut rotated = letters.clone();
        rotated.rotate_left(shift % letters.len());
        prop_assert_eq!(s.model.mixed_moment(&letters).unwrap(), s.model.mixed_moment(&rotated).unwrap());
    }

    #[test]
    fn compressed_trace_is_cyclic(v in prop::collection::vec(any::<bool>(), 0..=3), w in prop::collection::vec(any::<bool>(), 0..=3)) {
        // τ_p(vw) = τ_p(wv) for v, w words in pXp.
        let s = setup(&semicircle_moments(20), &rat(1, 2), 20);
        let pxp = |bits: &[bool]| -> Vec<Gen> {
            let mut out = vec![s.p];
            for &b in bits {
                out.extend(if b { [s.x, s.p] } else { [s.x, s.x] });
                out.push(s.p);
            }
            out
        };
        let (a, b) = (pxp(&v), pxp(&w));
        let vw: Vec<Gen> = a.iter().chain(&b).copied().collect();
        let wv: Vec<Gen> = b.iter().chain(&a).copied().collect();
        prop_assert_eq!(s.model.mixed_moment(&vw).unwrap(), s.model.mixed_moment(&wv).unwrap());
    }

    #[test]
    fn cumulants_scale_under_compression(atoms in atoms_strategy(), which in 0usize..3) {
        let alpha = [rat(1, 2), rat(1, 3), rat(2, 3)][which].clone();
        let moments = atomic_moments(&atoms, 13);
        let s = setup(&moments, &alpha, 13);
        let params = CompressionParams::new(alpha.clone(), s.xp, s.x, s.p).unwrap();
        let compressed = compressed_moments(&s.model, &params, 6).unwrap();
        let k = moments_to_cumulants(&compressed);
        let k0 = moments_to_cumulants(&moments[..7]);
        prop_assert_eq!(k.len(), 6);
        for (a, b) in k.iter().zip(&k0) {
            prop_assert_eq!(a, &(b / &alpha));
        }
    }

    #[test]
    fn expectation_preserves_trace_and_is_idempotent(word in prop::collection::vec(any::<bool>(), 0..=6)) {
        let s = setup(&semicircle_moments(14), &rat(1, 2), 14);
        let sub = Subalgebra::new(NCPoly::gen(s.x), vec![s.x]);
        let poly = NCPoly::term(Word::from_letters(word.iter().map(|&b| if b { s.x } else { s.p })), GaussRat::from_int(1));
        let e = expect_onto(&s.model, &poly, &sub).unwrap();
        prop_assert_eq!(s.model.trace(&e).unwrap(), s.model.trace(&poly).unwrap());
        prop_assert_eq!(expect_onto(&s.model, &e, &sub).unwrap(), e);
    }

    #[test]
    fn centred_free_singleton_kills_the_trace(a in prop::collection::vec(any::<bool>(), 0..=4), b in prop::collection::vec(any::<bool>(), 0..=4)) {
        // τ(A q B) = 0 with q = p − α centred and free from A, B ∈ C⟨X⟩.
        let s = setup(&semicircle_moments(9), &rat(1, 2), 9);
        let xs = |bits: &[bool]| NCPoly::word(core::iter::repeat_n(s.x, bits.len()));
        let q = &NCPoly::gen(s.p) - &NCPoly::constant(GaussRat::real(rat(1, 2)));
        let poly = &(&xs(&a) * &q) * &xs(&b);
        prop_assert_eq!(s.model.trace(&poly).unwrap(), GaussRat::from_int(0));
    }
}
