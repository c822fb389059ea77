use proptest::prelude::*;
use treepin_core::oracle::cross_check;
use treepin_core::scheme::DEFAULT_MAX_ATTEMPTS;
use treepin_core::{
    analyze, is_irreducible, load_instance, load_scheme, random_instance, reduce_full, run_protocol, save_instance,
    save_scheme, synth_random, verify, Error,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // any generated instance, once reduced, gets a scheme meeting both rates
    #[test]
    fn reduce_then_synthesize(seed in 0u64..10_000, vertices in 2usize..7, q in prop::sample::select(vec![2u64, 3, 5]), nw in 0usize..4) {
        let Ok(inst) = random_instance(seed, vertices, 3, q, nw) else { return Ok(()) };
        let before = analyze(&inst);
        let trace = match reduce_full(&inst) {
            Ok(t) => t,
            Err(Error::EdgeAbsorbed(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let red = &trace.reduced;
        prop_assert!(is_irreducible(red));
        let after = analyze(red);
        prop_assert_eq!(before.cw, after.cw);
        prop_assert_eq!(before.rl, after.rl);

        let sch = synth_random(red, seed, DEFAULT_MAX_ATTEMPTS).unwrap();
        let rep = verify(&sch, red).unwrap();
        prop_assert!(rep.passed());
        prop_assert_eq!(rep.leakage_symbols, after.rl.symbols);
        prop_assert_eq!(rep.key_symbols, after.cw.symbols);

        let sim = run_protocol(&sch, red, seed, 4).unwrap();
        prop_assert!(sim.passed());
    }

    #[test]
    fn files_round_trip(seed in 0u64..10_000, vertices in 2usize..7, nw in 0usize..3) {
        let Ok(inst) = random_instance(seed, vertices, 3, 3, nw) else { return Ok(()) };
        prop_assert_eq!(&load_instance(&save_instance(&inst)).unwrap(), &inst);
        if is_irreducible(&inst) {
            let sch = synth_random(&inst, seed, DEFAULT_MAX_ATTEMPTS).unwrap();
            prop_assert_eq!(load_scheme(&save_scheme(&sch)).unwrap(), sch);
        }
    }
}

#[test]
fn small_schemes_agree_with_enumeration() {
    let mut checked = 0;
    for seed in 0..200u64 {
        let Ok(inst) = random_instance(seed, 2 + seed as usize % 3, 2, 2, seed as usize % 2) else { continue };
        if !is_irreducible(&inst) {
            continue;
        }
        let sch = synth_random(&inst, seed, DEFAULT_MAX_ATTEMPTS).unwrap();
        if inst.source.dim() * sch.n() > 14 {
            continue;
        }
        let out = cross_check(&inst, Some(&sch), 14).unwrap();
        assert!(out.agree, "{}", out.report);
        checked += 1;
    }
    assert!(checked >= 20, "{checked}");
}
