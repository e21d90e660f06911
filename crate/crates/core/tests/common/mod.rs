//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use polysched_core::model::{DpsInstance, Graph, OpsInstance, PeriodicSchedule};
use polysched_core::rational::{int, Rational};
use proptest::prelude::*;

/// Every subset of edges (as a bitmask) that forms a matching.
pub fn all_matchings(graph: &Graph) -> Vec<u32> {
    let m = graph.num_edges();
    assert!(m < 32);
    (0u32..1 << m)
        .filter(|&mask| {
            let mut used = 0u64;
            (0..m).filter(|e| mask >> e & 1 == 1).all(|e| {
                let edge = graph.edge(e);
                let bits = 1u64 << edge.a() | 1u64 << edge.b();
                let ok = used & bits == 0;
                used |= bits;
                ok
            })
        })
        .collect()
}

pub fn maximal_matchings_by_subsets(graph: &Graph) -> Vec<Vec<usize>> {
    let ms = all_matchings(graph);
    let set: std::collections::HashSet<u32> = ms.iter().copied().collect();
    let m = graph.num_edges();
    ms.iter()
        .filter(|&&mask| (0..m).all(|e| mask >> e & 1 == 1 || !set.contains(&(mask | 1 << e))))
        .map(|&mask| (0..m).filter(|e| mask >> e & 1 == 1).collect())
        .collect()
}

/// Grows every plant for three periods, cutting on schedule, and reports the tallest height seen.
/// `None` means some plant was never cut.
pub fn simulated_heat(instance: &OpsInstance, schedule: &PeriodicSchedule) -> Option<Rational> {
    let m = instance.graph().num_edges();
    let mut height = vec![int(0); m];
    let mut cut = vec![false; m];
    let mut best = int(0);
    for t in 0..3 * schedule.period() {
        for (h, g) in height.iter_mut().zip(instance.growth()) {
            *h += g;
            if *h > best {
                best = h.clone();
            }
        }
        for &e in schedule.day(t) {
            height[e] = int(0);
            cut[e] = true;
        }
    }
    cut.iter().all(|&c| c).then_some(best)
}

/// Looks for any schedule of period at most `max_period` by day-level search.
pub fn brute_force_dps(instance: &DpsInstance, max_period: usize) -> Option<Vec<u32>> {
    let graph = instance.graph();
    let matchings = all_matchings(graph);
    let freq = instance.freq();
    let m = graph.num_edges();
    #[allow(clippy::too_many_arguments)]
    fn go(
        t: usize,
        period: usize,
        days: &mut Vec<u32>,
        last: &mut Vec<Option<usize>>,
        first: &mut Vec<Option<usize>>,
        matchings: &[u32],
        freq: &[u64],
        m: usize,
    ) -> bool {
        if t == period {
            return (0..m).all(|e| match (first[e], last[e]) {
                (Some(f), Some(l)) => (f + period - l) as u64 <= freq[e],
                _ => false,
            });
        }
        for &mask in matchings {
            let ok = (0..m).all(|e| {
                mask >> e & 1 == 1
                    || match last[e] {
                        Some(l) => ((t - l) as u64) < freq[e],
                        None => (t as u64) + 1 < freq[e],
                    }
            });
            if !ok {
                continue;
            }
            let saved_last = last.clone();
            let saved_first = first.clone();
            for e in 0..m {
                if mask >> e & 1 == 1 {
                    last[e] = Some(t);
                    first[e].get_or_insert(t);
                }
            }
            days.push(mask);
            if go(t + 1, period, days, last, first, matchings, freq, m) {
                return true;
            }
            days.pop();
            *last = saved_last;
            *first = saved_first;
        }
        false
    }
    for period in 1..=max_period {
        let mut days = Vec::new();
        if go(0, period, &mut days, &mut vec![None; m], &mut vec![None; m], &matchings, freq, m) {
            return Some(days);
        }
    }
    None
}

pub fn lcm_all(xs: &[u64]) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    xs.iter().fold(1, |acc, &x| acc / gcd(acc, x) * x)
}

pub fn arb_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(move |n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let k = pairs.len().min(max_m);
        proptest::sample::subsequence(pairs, 1..=k).prop_map(move |ps| Graph::new(n, &ps).unwrap())
    })
}

pub fn arb_ops(max_n: usize, max_m: usize) -> impl Strategy<Value = OpsInstance> {
    arb_graph(max_n, max_m).prop_flat_map(|g| {
        let m = g.num_edges();
        proptest::collection::vec((1i64..=8, 1i64..=3), m).prop_map(move |ws| {
            let growth = ws.iter().map(|&(p, q)| Rational::new(p.into(), q.into())).collect();
            OpsInstance::new(g.clone(), growth).unwrap()
        })
    })
}

pub fn arb_dps(max_n: usize, max_m: usize, max_f: u64) -> impl Strategy<Value = DpsInstance> {
    arb_graph(max_n, max_m).prop_flat_map(move |g| {
        let m = g.num_edges();
        proptest::collection::vec(1..=max_f, m)
            .prop_map(move |fs| DpsInstance::new(g.clone(), fs).unwrap())
    })
}
