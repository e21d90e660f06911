//! Growth-rate banding: edges are split into geometric bands, each band is
//! coloured on its own, and the bands take turns day by day.

use num_integer::Integer;
use num_traits::Zero;

use crate::coloring::color_edges;
use crate::model::{heat, Heat, OpsInstance, PeriodicSchedule};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerDecomposition {
    pub l: usize,
    /// `l + 1` bands; band `i < l` holds `g_max / 2^(i+1) < g <= g_max / 2^i`.
    pub layers: Vec<Vec<usize>>,
    pub max_degrees: Vec<usize>,
}

fn pow2(i: usize) -> Rational {
    Rational::from_integer(num_bigint::BigInt::from(1) << i)
}

pub fn decompose(instance: &OpsInstance, l: usize) -> LayerDecomposition {
    let g_max = instance.max_growth();
    let mut layers = vec![Vec::new(); l + 1];
    for (e, g) in instance.growth().iter().enumerate() {
        let band = (0..l)
            .find(|&i| *g > &g_max / pow2(i + 1))
            .unwrap_or(l);
        layers[band].push(e);
    }
    let max_degrees = layers
        .iter()
        .map(|edges| instance.graph().subgraph(edges).max_degree())
        .collect();
    LayerDecomposition { l, layers, max_degrees }
}

/// The analytic heat ceiling `(l+1) * max_i (Δ_i + 1) * g_max / 2^i`.
pub fn heat_ceiling(instance: &OpsInstance, d: &LayerDecomposition) -> Rational {
    let g_max = instance.max_growth();
    let worst = d
        .max_degrees
        .iter()
        .enumerate()
        .map(|(i, &delta)| int(delta as i64 + 1) * &g_max / pow2(i))
        .max()
        .unwrap_or_else(Rational::zero);
    int(d.l as i64 + 1) * worst
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredSchedule {
    pub decomposition: LayerDecomposition,
    /// Bands actually interleaved, after dropping trailing empty ones.
    pub active_layers: usize,
    pub schedule: PeriodicSchedule,
    pub heat: Heat,
}

pub fn layered_schedule_with(instance: &OpsInstance, l: usize) -> LayeredSchedule {
    let decomposition = decompose(instance, l);
    let active_layers = decomposition
        .layers
        .iter()
        .rposition(|edges| !edges.is_empty())
        .map_or(1, |i| i + 1);
    let per_layer: Vec<Vec<Vec<usize>>> = decomposition.layers[..active_layers]
        .iter()
        .map(|edges| {
            if edges.is_empty() {
                return vec![Vec::new()];
            }
            let coloring = color_edges(&instance.graph().subgraph(edges));
            coloring
                .classes()
                .into_iter()
                .map(|class| class.into_iter().map(|local| edges[local]).collect())
                .collect()
        })
        .collect();
    let inner = per_layer.iter().fold(1usize, |acc, days| acc.lcm(&days.len()));
    let period = active_layers * inner;
    let days = (0..period)
        .map(|t| {
            let layer = &per_layer[t % active_layers];
            layer[(t / active_layers) % layer.len()].clone()
        })
        .collect();
    let schedule = PeriodicSchedule::new(days).expect("period is positive");
    let heat = heat(instance, &schedule);
    LayeredSchedule {
        decomposition,
        active_layers,
        schedule,
        heat,
    }
}

/// Smallest `l` with `2^l >= Δ + 1`.
pub fn max_layer_parameter(instance: &OpsInstance) -> usize {
    let target = instance.graph().max_degree() + 1;
    (0..).find(|&l| 1usize << l >= target).expect("finite")
}

/// Tries every `l` in `0..=ceil(lg(Δ+1))` and keeps the coolest schedule, lowest `l` on ties.
pub fn layered_schedule(instance: &OpsInstance) -> LayeredSchedule {
    (0..=max_layer_parameter(instance))
        .map(|l| layered_schedule_with(instance, l))
        .reduce(|best, next| if next.heat < best.heat { next } else { best })
        .expect("at least one candidate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{figure1, star};
    use crate::model::Graph;

    #[test]
    fn bands_follow_halving() {
        let g = Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let inst = OpsInstance::new(g, vec![int(8), int(3), int(1)]).unwrap();
        let d = decompose(&inst, 2);
        assert_eq!(d.layers, vec![vec![0], vec![1], vec![2]]);
        // Boundary value g = g_max / 2 belongs to band 1.
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = OpsInstance::new(g, vec![int(8), int(4)]).unwrap();
        assert_eq!(decompose(&inst, 3).layers, vec![vec![0], vec![1], vec![], vec![]]);
    }

    #[test]
    fn figure1_bands() {
        let d = decompose(&figure1(), 2);
        // 80s in band 0, 40s in band 1, 20 and 16s in band 2.
        assert_eq!(d.layers[0], vec![1, 7, 9]);
        assert_eq!(d.layers[1], vec![0, 4, 5, 6]);
        assert_eq!(d.layers[2], vec![2, 3, 8]);
    }

    #[test]
    fn trailing_empty_layers_are_dropped_but_interior_kept() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let inst = OpsInstance::new(g, vec![int(8), int(1)]).unwrap();
        let s = layered_schedule_with(&inst, 2);
        assert_eq!(s.decomposition.layers, vec![vec![0], vec![], vec![1]]);
        assert_eq!(s.active_layers, 3);
        let s = layered_schedule_with(&star(&[int(1), int(1)]), 3);
        assert_eq!(s.active_layers, 1);
        assert_eq!(s.schedule.period(), 2);
    }
}
