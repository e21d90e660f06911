mod common;

use common::{arb_graph, maximal_matchings_by_subsets};
use polysched_core::generate::star;
use polysched_core::matching::*;
use polysched_core::rational::int;
use proptest::prelude::*;

#[test]
fn star_has_one_matching_per_leaf() {
    let inst = star(&[int(1), int(2), int(3), int(4)]);
    let set = enumerate_maximal_matchings(inst.graph(), DEFAULT_MATCHING_EDGE_CAP).unwrap();
    assert_eq!(set.len(), 4);
    assert_eq!(set.max_size(), 1);
}

proptest! {
    #[test]
    fn enumeration_matches_subset_oracle(g in arb_graph(7, 12)) {
        let mut ours = enumerate_maximal_matchings(&g, 24).unwrap().matchings;
        let mut oracle = maximal_matchings_by_subsets(&g);
        ours.sort();
        oracle.sort();
        prop_assert_eq!(&ours, &oracle);
        let biggest = oracle.iter().map(Vec::len).max().unwrap_or(0);
        prop_assert_eq!(maximum_matching_size(&g), biggest);
    }

    #[test]
    fn forced_enumeration_filters_full_set(g in arb_graph(6, 9), pick in any::<u8>()) {
        let forced = vec![pick as usize % g.num_edges()];
        let mut got = Vec::new();
        for_each_maximal_matching(&g, &forced, |m| got.push(m.to_vec()));
        let mut expected: Vec<Vec<usize>> = maximal_matchings_by_subsets(&g)
            .into_iter()
            .filter(|m| m.contains(&forced[0]))
            .collect();
        got.sort();
        expected.sort();
        prop_assert_eq!(got, expected);
    }
}
