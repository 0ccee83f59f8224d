use proptest::prelude::*;
use rootcert_core::certify;
use rootcert_core::diophantine;
use rootcert_core::rational::{self, frac, int};
use rootcert_core::slprobe::{self, LatticeState};
use rootcert_core::torus::SubtorusSubspace;
use rootcert_core::weyl;
use rootcert_core::{Rational, RootSystem, TorusVector, Weight};

const KINDS: [&str; 5] = ["A2", "B2", "G2", "A3", "A1xA2"];

fn system() -> impl Strategy<Value = RootSystem> {
    (0..KINDS.len()).prop_map(|i| RootSystem::from_kind(KINDS[i]).unwrap())
}

fn ints(n: usize, r: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-r..=r, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_text_round_trips(n in -10_000i64..10_000, d in 1i64..500) {
        let x = frac(n, d);
        prop_assert_eq!(rational::parse(&rational::format(&x)).unwrap(), x);
    }

    #[test]
    fn dominate_lands_in_dominant_chamber((s, c) in system().prop_flat_map(|s| { let n = s.rank(); (Just(s), ints(n, 6)) })) {
        let chi = Weight::from_ints(&c);
        let (dom, w) = weyl::dominate(&s, &chi).unwrap();
        prop_assert!(dom.is_dominant());
        prop_assert_eq!(w.apply(&chi), dom.clone());
        prop_assert_eq!(weyl::WeylElement::from_word(&s, &w.word).unwrap(), w);
        prop_assert!(weyl::orbit(&s, &chi).unwrap().contains(&dom));
    }

    #[test]
    fn weyl_preserves_form_and_evaluation(
        (s, a, b, t, k) in system().prop_flat_map(|s| {
            let n = s.rank();
            (Just(s), ints(n, 5), ints(n, 5), ints(n, 5), 0usize..1000)
        })
    ) {
        let group = weyl::enumerate_weyl(&s).unwrap();
        let w = &group.elements()[k % group.order()];
        let (a, b, t) = (Weight::from_ints(&a), Weight::from_ints(&b), TorusVector::from_ints(&t));
        prop_assert_eq!(s.inner(&w.apply(&a), &w.apply(&b)), s.inner(&a, &b));
        prop_assert_eq!(s.evaluate(&w.apply(&a), &w.act(&s, &t)), s.evaluate(&a, &t));
    }

    #[test]
    fn dirichlet_bound_holds(x in prop::collection::vec((-50i64..50, 1i64..40), 1..=3), q_cap in 2u64..10) {
        let x: Vec<Rational> = x.into_iter().map(|(n, d)| frac(n, d)).collect();
        let res = diophantine::dirichlet(&x, q_cap).unwrap();
        for (xi, pi) in x.iter().zip(&res.p) {
            let err = rational::abs(&(xi * int(res.q as i64) - Rational::from_integer(pi.clone())));
            prop_assert!(err <= frac(1, q_cap as i64));
        }
    }

    #[test]
    fn certificates_verify_on_kernel_lines(kind in 0usize..3, c in ints(2, 4)) {
        // A = ker χ for a rank-two χ, so dim A = 1 < 2
        let s = RootSystem::from_kind(["A2", "B2", "G2"][kind]).unwrap();
        let chi = Weight::from_ints(&c);
        prop_assume!(!chi.is_zero());
        let d = s.weight_to_root(&chi);
        let t = TorusVector::new(vec![d.coords()[1].clone(), -d.coords()[0].clone()]);
        let a = SubtorusSubspace::new(vec![t]).unwrap();
        let cert = certify::build_certificate_in(&s, &a).unwrap();
        let report = certify::verify_hypotheses(&cert, &a, 64, 3).unwrap();
        prop_assert!(report.passed, "{:?}", report.failed_checks().collect::<Vec<_>>());
    }

    #[test]
    fn systole_is_at_most_every_basis_vector(x in 0.0f64..2.0, time in 0.0f64..2.5, seed in 0u64..1000) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let basis = slprobe::random_unimodular(&mut rng, 3, 3);
        let state = LatticeState::new(basis, vec![x, -x / 2.0], time).unwrap();
        let lat = state.lattice();
        let sv = slprobe::shortest_vector(&state, 1).unwrap();
        for j in 0..3 {
            let col: f64 = lat.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
            prop_assert!(sv.norm <= col * (1.0 + 1e-12));
        }
        prop_assert!((state.determinant().abs() - 1.0).abs() < 1e-6);
    }
}
