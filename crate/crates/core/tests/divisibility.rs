use sha_nondiv::arith::{jacobi_i64, primes_up_to};
use sha_nondiv::config::RunConfig;
use sha_nondiv::descent::{selmer2, sha2_classes, torsion_image_set, CurveE2, GlobalClass};
use sha_nondiv::divisibility::{
    certify_nondivisibility, classify_with, e4_kernel_match, e4_locally_trivial_classes, locally_in_e4_kernel,
    verify_everywhere, E4KernelSet,
};
use sha_nondiv::local::Place;
use sha_nondiv::Error;

fn e80() -> CurveE2 {
    CurveE2::parse("80 205").unwrap()
}

fn quick() -> RunConfig {
    RunConfig {
        point_height: 300,
        point_denominator: 10,
        ..RunConfig::default()
    }
}

fn c(a: i64, b: i64) -> GlobalClass {
    GlobalClass::from_i64(a, b)
}

#[test]
fn kernel_match_at_three() {
    let e = e80();
    // (-5|3) = (1|3) and (5|3) = (-1|3) = -1
    assert_eq!(e4_kernel_match(&e, &c(1, 5), Place::Finite(3)), Some(c(-5, -1)));
    for v in [Place::Finite(2), Place::Finite(3), Place::Finite(7), Place::Real] {
        assert!(locally_in_e4_kernel(&e, &c(1, 1), v));
    }
}

#[test]
fn kernel_set_is_a_group() {
    let k = E4KernelSet::new(&e80());
    for a in &k.classes {
        for b in &k.classes {
            assert!(k.classes.contains(&a.mul(b)));
        }
    }
    assert!(k.classes.contains(&c(1, 1)));
}

#[test]
fn example_class_verifies_with_four_cases() {
    let e = e80();
    let r = verify_everywhere(&e, &c(1, 5), &RunConfig::default()).unwrap();
    assert!(r.verified);
    assert!(!r.witness_search_exhausted);
    let gens: Vec<String> = r.table.generators.iter().map(|g| g.to_string()).collect();
    assert_eq!(gens, ["-1", "5", "41"]);
    assert_eq!(r.table.patterns.len(), 8);
    let places: Vec<Place> = r.bad_places.iter().map(|p| p.place).collect();
    assert_eq!(places, [Place::Finite(2), Place::Finite(5), Place::Finite(41), Place::Real]);
    assert!(r.bad_places.iter().all(|p| p.matched.is_some()));
    let cases: Vec<&str> = r.table.patterns.iter().map(|p| p.case.as_str()).collect();
    assert!(cases.contains(&"5 square"));
    assert!(cases.iter().any(|s| s.starts_with("41 square")));
    assert!(cases.iter().any(|s| s.starts_with("-5 square")));
    assert!(cases.iter().any(|s| s.contains("not: 5 square, 41 square, -5 square")));
    for p in &r.table.patterns {
        let w = p.witness_prime.unwrap();
        assert!(w <= 10_000);
        // the realized pattern is the recorded one
        for (g, s) in r.table.generators.iter().zip(&p.signs) {
            assert_eq!(jacobi_i64(g.try_into().unwrap(), w), *s);
        }
    }
}

#[test]
fn same_torsion_coset_verifies_too() {
    // (41, 1) and (-5, -5) differ from (1, 5) by delta of a 2-torsion point
    let e = e80();
    for xi in [c(41, 1), c(-5, -5), c(-205, -1)] {
        assert!(verify_everywhere(&e, &xi, &RunConfig::default()).unwrap().verified, "{xi}");
    }
}

#[test]
fn lift_set_invariance() {
    let e = e80();
    let sel = selmer2(&e, &quick()).unwrap();
    for xi in sel.elements.iter().take(16) {
        let base = verify_everywhere(&e, xi, &RunConfig::default()).unwrap().verified;
        for t in torsion_image_set(&e) {
            let other = verify_everywhere(&e, &xi.mul(&t), &RunConfig::default()).unwrap();
            assert_eq!(other.verified, base, "{xi} * {t}");
        }
    }
}

#[test]
fn pattern_verdicts_agree_with_direct_checks() {
    let e = e80();
    let sel = selmer2(&e, &quick()).unwrap();
    let primes: Vec<u64> = primes_up_to(100_000)
        .into_iter()
        .filter(|p| ![2, 5, 41].contains(p))
        .step_by(97)
        .collect();
    for xi in &sel.elements {
        let r = verify_everywhere(&e, xi, &RunConfig::default()).unwrap();
        for &p in &primes {
            let sigma: Vec<i8> = r
                .table
                .generators
                .iter()
                .map(|g| jacobi_i64(g.try_into().unwrap(), p))
                .collect();
            let pat = r.table.patterns.iter().find(|x| x.signs == sigma).unwrap();
            assert_eq!(locally_in_e4_kernel(&e, xi, Place::Finite(p)), pat.matched.is_some(), "{xi} at {p}");
        }
    }
}

#[test]
fn classification_marks_exactly_one_coset() {
    let e = e80();
    let sel = selmer2(&e, &quick()).unwrap();
    let cl = classify_with(&sel, &RunConfig::default()).unwrap();
    assert_eq!(cl.cosets.len(), 3);
    let with: Vec<_> = cl.cosets.iter().filter(|k| k.has_lift).collect();
    assert_eq!(with.len(), 1);
    assert!(with[0].lifts.iter().any(|l| l.lift == c(1, 5)));
    assert!(with[0].lifts.iter().all(|l| l.verified));
    for k in cl.cosets.iter().filter(|k| !k.has_lift) {
        assert_eq!(k.lifts.len(), 4);
        for l in &k.lifts {
            let v = l.refutation.expect("explicit witness place");
            assert!(!locally_in_e4_kernel(&e, &l.lift, v));
        }
    }
    // the verified classes form the coset of (1, 5) and lie in the linear search set
    let k = e4_locally_trivial_classes(&e).unwrap();
    assert_eq!(k.len(), 8);
    assert!(k.contains(&c(1, 5)));
    let _ = sha2_classes(&sel);
}

#[test]
fn control_curves() {
    let e = CurveE2::parse("1 2").unwrap();
    assert!(matches!(certify_nondivisibility(&e, &quick()), Err(Error::NoWitnessClass(_))));
    let sel = selmer2(&e, &quick()).unwrap();
    assert!(classify_with(&sel, &RunConfig::default()).unwrap().cosets.is_empty());
    assert!(verify_everywhere(&e, &c(1, 1), &RunConfig::default()).unwrap().verified);
}

#[test]
fn certificate_for_the_example() {
    let cert = certify_nondivisibility(&e80(), &quick()).unwrap();
    assert_eq!(cert.verdict, sha_nondiv::cert::Verdict::Verified);
    assert_eq!(cert.details["xi"], serde_json::json!(["1", "5"]));
    let replay = cert.replay();
    assert!(replay.ok, "{:?}", replay.failed_steps);
}
