mod common;

use common::arb_graph;
use polysched_core::coloring::*;
use polysched_core::exact::{ops_optimal_heat, ExactLimits};
use polysched_core::generate::{cycle, petersen, star, unweighted_fig4};
use polysched_core::model::{heat, Graph, Heat, OpsInstance};
use polysched_core::rational::{int, Rational};
use polysched_core::bounds::trivial_bound;
use proptest::prelude::*;

#[test]
fn single_edge_round_robin() {
    let inst = OpsInstance::new(Graph::new(2, &[(0, 1)]).unwrap(), vec![int(5)]).unwrap();
    let s = round_robin_schedule(&inst);
    assert_eq!(s.period(), 1);
    assert_eq!(heat(&inst, &s), Heat::Finite(int(5)));
}

#[test]
fn unit_star_uses_k_days() {
    let inst = star(&vec![int(1); 5]);
    let s = round_robin_schedule(&inst);
    assert_eq!(s.period(), 5);
    assert_eq!(heat(&inst, &s), Heat::Finite(int(5)));
}

#[test]
fn fig4_heat_three_with_optimal_colouring() {
    let inst = unweighted_fig4();
    let Colorability::Colorable(c) = find_coloring(inst.graph(), 3, DEFAULT_EXACT_EDGE_CAP) else {
        panic!("three colours suffice");
    };
    let s = round_robin_from(&c);
    assert_eq!(heat(&inst, &s), Heat::Finite(int(3)));
    assert!(heat(&inst, &round_robin_schedule(&inst)) <= Heat::Finite(int(4)));
}

#[test]
fn below_max_degree_is_never_colourable() {
    let g = petersen();
    assert_eq!(find_coloring(&g, 2, 40), Colorability::NotColorable);
    assert_eq!(find_coloring(&cycle(5), 2, 40), Colorability::NotColorable);
    assert!(matches!(find_coloring(&cycle(5), 3, 40), Colorability::Colorable(_)));
}

#[test]
fn cap_yields_upper_bound_only() {
    let g = petersen();
    assert_eq!(chromatic_index(&g, 10), ChromaticIndex { value: 4, exact: false });
}

#[test]
fn exact_schedule_becomes_colouring() {
    let inst = OpsInstance::unweighted(petersen());
    let best = ops_optimal_heat(&inst, ExactLimits::default()).unwrap();
    assert_eq!(best.heat, int(4));
    let c = coloring_from_schedule(inst.graph(), &best.witness, 4).unwrap();
    assert!(c.is_proper(inst.graph()));
}

proptest! {
    #[test]
    fn misra_gries_is_proper_and_small(g in arb_graph(9, 20)) {
        let c = color_edges(&g);
        prop_assert!(c.is_proper(&g));
        prop_assert!(c.num_colors() <= g.max_degree() + 1);
        prop_assert_eq!(color_edges(&g), c);
    }

    #[test]
    fn backtracking_agrees_with_brute_force(g in arb_graph(6, 7)) {
        // Independent check: try every assignment of Δ colours.
        let delta = g.max_degree();
        let m = g.num_edges();
        let total = (delta as u64).pow(m as u32);
        let brute = (0..total).any(|code| {
            let colors: Vec<usize> = (0..m).map(|i| (code / (delta as u64).pow(i as u32) % delta as u64) as usize).collect();
            EdgeColoring::from_colors(&colors).is_proper(&g)
        });
        let ci = chromatic_index(&g, 40);
        prop_assert!(ci.exact);
        prop_assert_eq!(ci.value, if brute { delta } else { delta + 1 });
    }

    #[test]
    fn round_robin_ratio_against_trivial_bound(g in arb_graph(7, 12), ws in proptest::collection::vec(1i64..=6, 12)) {
        let growth: Vec<Rational> = (0..g.num_edges()).map(|i| int(ws[i])).collect();
        let inst = OpsInstance::new(g, growth).unwrap();
        let h = heat(&inst, &round_robin_schedule(&inst)).finite().cloned().unwrap();
        let lb = trivial_bound(&inst).value;
        let delta = int(inst.graph().max_degree() as i64);
        let ratio = (&delta + int(1)) / &delta * inst.max_growth() / inst.min_growth();
        let cap = ratio.min(&delta + int(1));
        prop_assert!(h <= cap * lb);
    }
}
