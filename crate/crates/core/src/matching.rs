//! Inclusion-maximal matching enumeration and maximum matching size.

use petgraph::graph::UnGraph;
use thiserror::Error;

use crate::model::Graph;

pub const DEFAULT_MATCHING_EDGE_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("graph has {edges} edges, above the enumeration cap of {cap}")]
pub struct CapExceeded {
    pub edges: usize,
    pub cap: usize,
}

/// All inclusion-maximal matchings, each as a sorted list of edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingSet {
    pub matchings: Vec<Vec<usize>>,
}

impl MatchingSet {
    pub fn len(&self) -> usize {
        self.matchings.len()
    }
    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }
    pub fn max_size(&self) -> usize {
        self.matchings.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn enumerate_maximal_matchings(graph: &Graph, cap: usize) -> Result<MatchingSet, CapExceeded> {
    if graph.num_edges() > cap {
        return Err(CapExceeded {
            edges: graph.num_edges(),
            cap,
        });
    }
    let mut matchings = Vec::new();
    for_each_maximal_matching(graph, &[], |m| matchings.push(m.to_vec()));
    Ok(MatchingSet { matchings })
}

/// Calls `visit` once per maximal matching that contains every edge of `forced`.
/// Nothing is visited when `forced` is not itself a matching.
pub fn for_each_maximal_matching(graph: &Graph, forced: &[usize], mut visit: impl FnMut(&[usize])) {
    if !graph.is_matching(forced) {
        return;
    }
    let m = graph.num_edges();
    let mut is_forced = vec![false; m];
    for &e in forced {
        is_forced[e] = true;
    }
    // Last edge index incident to each person: a skipped edge whose endpoints
    // are still free must be covered by some later edge.
    let mut last_incident = vec![None; graph.num_persons()];
    for (i, e) in graph.edges().iter().enumerate() {
        last_incident[e.a()] = Some(i);
        last_incident[e.b()] = Some(i);
    }
    let mut search = Search {
        graph,
        is_forced,
        last_incident,
        covered: vec![false; graph.num_persons()],
        chosen: Vec::new(),
        skipped_free: Vec::new(),
    };
    for &e in forced {
        let edge = graph.edge(e);
        search.covered[edge.a()] = true;
        search.covered[edge.b()] = true;
    }
    search.run(0, &mut visit);
}

struct Search<'g> {
    graph: &'g Graph,
    is_forced: Vec<bool>,
    last_incident: Vec<Option<usize>>,
    covered: Vec<bool>,
    chosen: Vec<usize>,
    skipped_free: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, i: usize, visit: &mut impl FnMut(&[usize])) {
        if i == self.graph.num_edges() {
            let maximal = self.skipped_free.iter().all(|&s| {
                let e = self.graph.edge(s);
                self.covered[e.a()] || self.covered[e.b()]
            });
            if maximal {
                visit(&self.chosen);
            }
            return;
        }
        let e = self.graph.edge(i);
        if self.is_forced[i] {
            self.chosen.push(i);
            self.run(i + 1, visit);
            self.chosen.pop();
            return;
        }
        let free = !self.covered[e.a()] && !self.covered[e.b()];
        if free {
            self.covered[e.a()] = true;
            self.covered[e.b()] = true;
            self.chosen.push(i);
            self.run(i + 1, visit);
            self.chosen.pop();
            self.covered[e.a()] = false;
            self.covered[e.b()] = false;
            let coverable = self.last_incident[e.a()] > Some(i) || self.last_incident[e.b()] > Some(i);
            if coverable {
                self.skipped_free.push(i);
                self.run(i + 1, visit);
                self.skipped_free.pop();
            }
        } else {
            self.run(i + 1, visit);
        }
    }
}

/// Size of a maximum matching.
pub fn maximum_matching_size(graph: &Graph) -> usize {
    let mut g = UnGraph::<(), ()>::with_capacity(graph.num_persons(), graph.num_edges());
    let nodes: Vec<_> = (0..graph.num_persons()).map(|_| g.add_node(())).collect();
    for e in graph.edges() {
        g.add_edge(nodes[e.a()], nodes[e.b()], ());
    }
    petgraph::algo::maximum_matching(&g).len()
}
