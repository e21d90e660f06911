mod common;

use common::{fig2, run_network};
use polysched_core::io::emit_dps;
use polysched_core::rational::Rational;
use polysched_satred::cnf::{max3sat_oracle, random_formula, CnfFormula};
use polysched_satred::compile::{compile, emit_provenance, gap_factor, load_artifact, ArtifactError};
use polysched_satred::gadgets::{sorting_network, GadgetKind, TENSION_WIDTH};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

#[test]
fn fig2_formula_and_size() {
    let f = fig2();
    // x1 = false is forced by !x1, then x2 must be true and x3 false, which breaks the third clause.
    assert_eq!(max3sat_oracle(&f), Ok(3));
    let a = compile(&f);
    let graph = a.dps.graph();
    assert_eq!((graph.num_persons(), graph.num_edges()), (1411, 2223));
    assert_eq!(a.count_kind(GadgetKind::Variable), 4);
    assert_eq!(a.count_kind(GadgetKind::Or), 4);
    assert_eq!(a.count_kind(GadgetKind::Swap), 6);
    // one blue and one green 12-splitter per swap
    assert_eq!(a.count_kind(GadgetKind::SB12), 6);
    assert_eq!(a.count_kind(GadgetKind::SG12), 6);
    assert_eq!(a.count_kind(GadgetKind::Tension), 1);
    assert_eq!(a.count_kind(GadgetKind::TrueClock), 1);
}

fn suite() -> Vec<CnfFormula> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..24)
        .map(|i| random_formula(&mut rng, 1 + i % 3, 1 + i % 4))
        .chain(std::iter::once(fig2()))
        .collect()
}

#[test]
fn structure_of_compiled_instances() {
    for f in suite() {
        for k in 0..=f.num_clauses() {
            let a = compile(&f.with_threshold(k).unwrap());
            let freqs = a.frequencies();
            assert!(freqs.is_subset(&BTreeSet::from([3, 6, 9, 12])), "{freqs:?}");
            assert_eq!(a.max_frequency(), 12);
            assert!(a.density_violations().is_empty());
            assert!(a.layer_order_violations().is_empty());
            let tight: BTreeSet<usize> = a.tight_nodes.iter().copied().collect();
            for e in a.dps.graph().edges() {
                assert!(tight.contains(&e.a()) || tight.contains(&e.b()), "edge {e:?} has no tight end");
            }
            assert_eq!(a.count_kind(GadgetKind::Tension), k.div_ceil(TENSION_WIDTH));
        }
    }
}

#[test]
fn size_is_quadratic_in_clauses() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, m) in [(3, 4), (5, 8), (8, 16), (10, 24)] {
        let f = random_formula(&mut rng, n, m).with_threshold(m / 2).unwrap();
        let a = compile(&f);
        assert_eq!(a.count_kind(GadgetKind::Swap), m * (m - 1) / 2);
        let budget = 400 * (1 + n + 3 * m + m * (m - 1) / 2);
        assert!(a.dps.graph().num_edges() <= budget, "n={n} m={m}: {} edges", a.dps.graph().num_edges());
    }
}

#[test]
fn sorting_network_sorts_all_bit_vectors() {
    for m in 1..=8 {
        let network = sorting_network(m);
        for bits in 0u32..1 << m {
            let mut v: Vec<bool> = (0..m).map(|i| bits >> i & 1 == 1).collect();
            let ones = v.iter().filter(|&&b| b).count();
            run_network(&network, &mut v);
            let expected: Vec<bool> = (0..m).map(|i| i < ones).collect();
            assert_eq!(v, expected, "m={m} bits={bits:b}");
        }
    }
}

#[test]
fn compile_is_deterministic() {
    let f = fig2();
    assert_eq!(emit_dps(&compile(&f).dps), emit_dps(&compile(&f).dps));
}

#[test]
fn sidecar_round_trip_and_tampering() {
    let a = compile(&fig2());
    let instance = emit_dps(&a.dps);
    let sidecar = emit_provenance(&a);
    assert!(sidecar.starts_with("# p cnf 3 4\n"));
    assert!(sidecar.contains("\n# k 3\n"));
    assert_eq!(sidecar.lines().filter(|l| !l.starts_with('#')).count(), a.dps.graph().num_edges());
    let first = sidecar.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(first.ends_with(" variable"), "{first}");
    let loaded = load_artifact(&instance, &sidecar).unwrap();
    assert_eq!(emit_dps(&loaded.dps), instance);
    assert_eq!(loaded.formula, a.formula);

    let tampered = instance.replacen(" 12\n", " 6\n", 1);
    assert!(matches!(load_artifact(&tampered, &sidecar), Err(ArtifactError::Mismatch(_))));
    let no_k = sidecar.replace("# k 3\n", "");
    assert!(matches!(load_artifact(&instance, &no_k), Err(ArtifactError::MissingThreshold)));
}

#[test]
fn gap_factor_identity() {
    assert_eq!(gap_factor(12), Rational::new(13.into(), 12.into()));
    assert_eq!(gap_factor(compile(&fig2()).max_frequency()), Rational::new(13.into(), 12.into()));
}
