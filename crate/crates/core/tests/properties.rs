use approxhom::derived::{condition_p_probe, derive, long_exact_sequence, ConditionP};
use approxhom::diff::Engine;
use approxhom::functor::{functor_property_report, sample_rng, sample_split_ses, Functor, Tensor};
use approxhom::resolution::{build_resolution, validate_resolution};
use approxhom::suites::{subtraction_laws, SuiteConfig};
use approxhom::*;
use proptest::prelude::*;

fn moduli() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 4, 6, 8, 9, 12])
}

fn engine(m: u64) -> Engine<ModBackend<ResidueRing>> {
    Engine::new(ModBackend::new(ResidueRing::new(m).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn bezout_coefficients(m in 2u64..60, a in 0u64..60, b in 0u64..60) {
        let r = ResidueRing::new(m).unwrap();
        let (a, b) = (r.from_i64(a as i64), r.from_i64(b as i64));
        let g = r.gcdex(&a, &b);
        prop_assert_eq!(r.add(&r.mul(&g.s, &a), &r.mul(&g.t, &b)), g.g);
        prop_assert!(r.is_zero(&r.add(&r.mul(&g.u, &a), &r.mul(&g.v, &b))));
        let (n, unit) = r.normalize(&a);
        prop_assert!(r.is_unit(&unit));
        prop_assert_eq!(r.mul(&unit, &a), n);
    }

    #[test]
    fn presentation_ignores_summand_order(m in moduli(), seed in any::<u64>()) {
        let e = engine(m);
        let mut rng = sample_rng(seed, 0, 0);
        let x = e.sample_object(&mut rng, 4);
        let mut t = x.torsion().to_vec();
        t.reverse();
        prop_assert_eq!(e.fingerprint(&e.cyclic_sum(&t)), e.fingerprint(&x));
    }

    #[test]
    fn kernels_and_cokernels(m in moduli(), seed in any::<u64>()) {
        let e = engine(m);
        let mut rng = sample_rng(seed, 1, 0);
        let x = e.sample_object(&mut rng, 3);
        let y = e.sample_object(&mut rng, 3);
        let f = e.sample_morphism(&mut rng, &x, &y);
        let k = e.kernel(&f);
        let q = e.cokernel(&f);
        prop_assert!(e.is_zero_morphism(&e.compose(&f, &k.inclusion)));
        prop_assert!(e.is_zero_morphism(&e.compose(&q, &f)));
        prop_assert!(e.is_mono(&k.inclusion) && e.is_regular_epi(&q));
        let (epi, img) = e.image_factorization(&f);
        prop_assert_eq!(&e.compose(&img.inclusion, &epi), &f);
        prop_assert!(e.is_regular_epi(&epi) && e.is_mono(&img.inclusion));
    }

    #[test]
    fn resolutions_validate_and_resolve(m in moduli(), seed in any::<u64>(), rseed in 0u64..50) {
        let e = engine(m);
        let mut rng = sample_rng(seed, 2, 0);
        let x = e.sample_object(&mut rng, 3);
        let r = build_resolution(&e, &x, 3, rseed).unwrap();
        prop_assert!(validate_resolution(&*e, &r).ok());
        prop_assert_eq!(&build_resolution(&e, &x, 3, rseed).unwrap().complex, &r.complex);
    }

    #[test]
    fn subtraction_laws_hold(m in moduli(), seed in any::<u64>()) {
        let e = engine(m);
        let r = subtraction_laws(&e, &SuiteConfig { samples: 4, seed, max_degree: 2, size: 3 });
        prop_assert!(r.ok(), "{:?}", r);
    }

    #[test]
    fn derived_on_projectives_vanishes(m in moduli(), rank in 0usize..4, t in 2i64..6) {
        let e = engine(m);
        let f = Tensor::new(e.backend().clone(), e.ring().from_i64(t));
        let p = e.free_module(rank);
        let r = derive(&f, &e, &p, 3, 0, None).unwrap();
        prop_assert_eq!(&r.values[0], &e.fingerprint(&f.object(&p)));
        prop_assert!(r.values[1..].iter().all(Fingerprint::is_zero));
    }

    #[test]
    fn zeroth_derived_is_the_functor(m in moduli(), seed in any::<u64>(), t in 2i64..6) {
        let e = engine(m);
        let f = Tensor::new(e.backend().clone(), e.ring().from_i64(t));
        let mut rng = sample_rng(seed, 3, 0);
        let x = e.sample_object(&mut rng, 3);
        let r = derive(&f, &e, &x, 2, 0, None).unwrap();
        prop_assert_eq!(&r.values[0], &e.fingerprint(&f.object(&x)));
    }

    #[test]
    fn split_sequences_split_derived_values(m in prop::sample::select(vec![4u64, 6, 8]), seed in any::<u64>()) {
        let e = engine(m);
        let f = Tensor::new(e.backend().clone(), 2);
        let report = functor_property_report(&f, &e, 10, 0);
        let mut rng = sample_rng(seed, 4, 0);
        let ses = sample_split_ses(&*e, &mut rng, 2);
        let les = long_exact_sequence(&f, &e, &ses, 2, &report).unwrap();
        prop_assert!(les.exact());
        prop_assert_eq!(les.split_pieces, Some(true));
        for n in 0..2 {
            let lk = derive(&f, &e, &ses.k.dom, 3, 0, None).unwrap();
            let lx = derive(&f, &e, &ses.f.dom, 3, 0, None).unwrap();
            let ly = derive(&f, &e, &ses.f.cod, 3, 0, None).unwrap();
            let sum = e.coproduct_of(lk.value(n), ly.value(n)).object;
            prop_assert_eq!(&e.fingerprint(&sum), &lx.values[n]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn condition_p_holds_for_modules(m in moduli(), seed in any::<u64>()) {
        let r = condition_p_probe(&engine(m), 10, seed, 100_000);
        prop_assert_eq!(r.verdict, ConditionP::HoldsOnSamples { samples: 10 });
    }
}
