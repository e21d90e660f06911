mod common;

use common::{arb_dps, arb_ops, brute_force_dps, lcm_all};
use polysched_core::exact::*;
use polysched_core::generate::{cycle, figure1, pentagon, pinwheel_star, triangle_f2};
use polysched_core::model::{heat, ops_to_dps, verify_dps, Heat, OpsInstance};
use polysched_core::rational::int;
use proptest::prelude::*;

fn no_dominance() -> ExactLimits {
    ExactLimits { dominance: false, ..ExactLimits::default() }
}

#[test]
fn figure1_optimum_is_160() {
    let inst = figure1();
    let best = ops_optimal_heat(&inst, ExactLimits::default()).unwrap();
    assert_eq!(best.heat, int(160));
    assert_eq!(heat(&inst, &best.witness), Heat::Finite(int(160)));
    assert_eq!(best.predecessor, Some(int(144)));
    // The predecessor verdict must not depend on pruning.
    let dps = ops_to_dps(&inst, &int(144)).unwrap();
    assert_eq!(dps_feasible(&dps, no_dominance()).verdict, Verdict::Infeasible);
}

#[test]
fn triangle_unit_optimum_is_three() {
    let inst = OpsInstance::unweighted(cycle(3));
    assert_eq!(ops_optimal_heat(&inst, ExactLimits::default()).unwrap().heat, int(3));
}

#[test]
fn pinwheel_stars() {
    for m in 4..=12 {
        let r = dps_feasible(&pinwheel_star(&[2, 3, m]), no_dominance());
        assert_eq!(r.verdict, Verdict::Infeasible, "M = {m}");
    }
    assert!(matches!(
        dps_feasible(&pinwheel_star(&[2, 4, 4]), ExactLimits::default()).verdict,
        Verdict::Feasible(_)
    ));
    assert_eq!(dps_feasible(&triangle_f2(), no_dominance()).verdict, Verdict::Infeasible);
}

#[test]
fn pentagon_needs_cd_in_two_classes() {
    let inst = pentagon();
    let Verdict::Feasible(w) = dps_feasible(&inst, ExactLimits::default()).verdict else {
        panic!("pentagon is feasible");
    };
    assert_eq!(verify_dps(&inst, &w), Ok(()));
    let cd = inst.graph().find_edge(2, 3).unwrap();
    let unrolled = w.unrolled(3);
    let classes: std::collections::BTreeSet<usize> = (0..unrolled.period())
        .filter(|&t| unrolled.day(t).contains(&cd))
        .map(|t| t % 3)
        .collect();
    assert!(classes.len() >= 2, "{classes:?}");
}

#[test]
fn parallel_mode_agrees() {
    let limits = ExactLimits { threads: 4, ..ExactLimits::default() };
    for inst in [pinwheel_star(&[2, 3, 8]), triangle_f2()] {
        assert_eq!(dps_feasible(&inst, limits).verdict, Verdict::Infeasible);
    }
    let Verdict::Feasible(w) = dps_feasible(&pentagon(), limits).verdict else { panic!() };
    assert_eq!(verify_dps(&pentagon(), &w), Ok(()));
}

#[test]
fn time_budget_is_inconclusive() {
    let limits = ExactLimits { time_limit: Some(std::time::Duration::ZERO), max_states: u64::MAX, ..no_dominance() };
    let inst = ops_to_dps(&figure1(), &int(144)).unwrap();
    let r = dps_feasible(&inst, limits);
    assert!(matches!(r.verdict, Verdict::Inconclusive(_) | Verdict::Infeasible));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn verdicts_agree_with_day_level_search(inst in arb_dps(5, 6, 4)) {
        let r = dps_feasible(&inst, ExactLimits::default());
        let plain = dps_feasible(&inst, no_dominance());
        let par = dps_feasible(&inst, ExactLimits { threads: 3, ..ExactLimits::default() });
        let bound: u64 = inst.freq().iter().product();
        prop_assert!(plain.explored <= bound);
        match (&r.verdict, &plain.verdict, &par.verdict) {
            (Verdict::Feasible(w), Verdict::Feasible(w2), Verdict::Feasible(w3)) => {
                prop_assert_eq!(verify_dps(&inst, w), Ok(()));
                prop_assert_eq!(verify_dps(&inst, w2), Ok(()));
                prop_assert_eq!(verify_dps(&inst, w3), Ok(()));
            }
            (Verdict::Infeasible, Verdict::Infeasible, Verdict::Infeasible) => {
                let period = lcm_all(inst.freq()) as usize;
                prop_assert!(brute_force_dps(&inst, period).is_none());
            }
            other => prop_assert!(false, "verdicts differ: {:?}", other),
        }
    }

    #[test]
    fn dominance_is_sound(inst in arb_dps(4, 5, 4), seed in any::<u64>()) {
        // Pick a random valid state and one that dominates it.
        let f = inst.freq();
        let low: Vec<u64> = f.iter().enumerate().map(|(i, &fi)| 1 + (seed >> (i * 3)) % fi).collect();
        let high: Vec<u64> = low.iter().zip(f).enumerate().map(|(i, (&u, &fi))| (u + (seed >> (i * 5 + 1)) % 2).min(fi)).collect();
        let alive = |u: &Vec<u64>| matches!(alive_from(&inst, &ConfigState(u.clone()), no_dominance()), Verdict::Feasible(_));
        if alive(&low) {
            prop_assert!(alive(&high));
        }
    }

    #[test]
    fn optimum_is_tight(inst in arb_ops(5, 6)) {
        let best = ops_optimal_heat(&inst, ExactLimits::default()).unwrap();
        prop_assert_eq!(heat(&inst, &best.witness), Heat::Finite(best.heat.clone()));
        if let Some(pred) = &best.predecessor {
            let dps = ops_to_dps(&inst, pred).unwrap();
            prop_assert_eq!(dps_feasible(&dps, no_dominance()).verdict, Verdict::Infeasible);
        }
        // Monotone: the next candidate up is feasible as well.
        let up = candidate_heats(&inst, &(best.heat.clone() * int(2)));
        if let Some(next) = up.iter().find(|h| **h > best.heat) {
            let dps = ops_to_dps(&inst, next).unwrap();
            prop_assert!(matches!(dps_feasible(&dps, ExactLimits::default()).verdict, Verdict::Feasible(_)));
        }
    }
}
