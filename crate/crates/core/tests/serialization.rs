use sympack_core::document::parse_domain_document;
use sympack_core::packing::packing_capacity;
use sympack_core::random::{ball_config, concave_domain, convex_domain, seeded};
use sympack_core::scalar::ratio;
use sympack_core::toric::ToricDomain;
use sympack_core::{CapacityResult, Engine, ObstructionTuple, QuadraticValue};

#[test]
fn capacity_results_round_trip() {
    let mut rng = seeded(11);
    for _ in 0..60 {
        let c = ball_config(&mut rng, 6, &ratio(1, 5), &ratio(3, 1), 9);
        for budget in [2, 25] {
            let r = packing_capacity(&c, budget, Engine::Combined).unwrap();
            let text = serde_json::to_string(&r).unwrap();
            let back: CapacityResult = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r, "{text}");
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
    }
}

#[test]
fn domains_round_trip() {
    let mut rng = seeded(12);
    for _ in 0..100 {
        for d in [
            ToricDomain::Concave(concave_domain(&mut rng, 5)),
            ToricDomain::Convex(convex_domain(&mut rng, 5)),
        ] {
            let text = serde_json::to_string(&d).unwrap();
            assert_eq!(parse_domain_document(&text).unwrap(), d, "{text}");
        }
    }
}

#[test]
fn scalars_and_tuples_round_trip() {
    for v in [
        QuadraticValue::rational(ratio(-7, 3)),
        QuadraticValue::sqrt(ratio(10, 9)).unwrap(),
    ] {
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<QuadraticValue>(&text).unwrap(), v);
    }
    let t = ObstructionTuple::new(6, vec![3, 2, 2, 2, 2, 2, 2, 1]);
    let text = serde_json::to_string(&t).unwrap();
    assert_eq!(serde_json::from_str::<ObstructionTuple>(&text).unwrap(), t);
    assert!(serde_json::from_str::<ObstructionTuple>(r#"{"d":1,"m":[1],"x":0}"#).is_err());
}

#[test]
fn deterministic_across_thread_counts() {
    let c = ball_config(&mut seeded(13), 6, &ratio(1, 4), &ratio(2, 1), 6);
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one.install(|| {
        serde_json::to_string(&packing_capacity(&c, 30, Engine::Combined).unwrap()).unwrap()
    });
    let b = many.install(|| {
        serde_json::to_string(&packing_capacity(&c, 30, Engine::Combined).unwrap()).unwrap()
    });
    assert_eq!(a, b);
}
