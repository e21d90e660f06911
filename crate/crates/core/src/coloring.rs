//! Edge colouring: Misra-Gries with at most Δ+1 colours, exact backtracking,
//! and the round-robin scheduler built on top.

use thiserror::Error;

use crate::model::{Graph, OpsInstance, PeriodicSchedule};

pub const DEFAULT_EXACT_EDGE_CAP: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    colors: Vec<usize>,
    num_colors: usize,
}

impl EdgeColoring {
    /// Wraps raw colours, renumbering them to `0..C` in order of first use.
    pub fn from_colors(raw: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let colors = raw
            .iter()
            .map(|c| {
                let next = remap.len();
                *remap.entry(*c).or_insert(next)
            })
            .collect();
        EdgeColoring {
            colors,
            num_colors: remap.len(),
        }
    }
    pub fn colors(&self) -> &[usize] {
        &self.colors
    }
    pub fn num_colors(&self) -> usize {
        self.num_colors
    }
    pub fn is_proper(&self, graph: &Graph) -> bool {
        self.colors.len() == graph.num_edges()
            && (0..graph.num_persons()).all(|p| {
                let mut seen = std::collections::HashSet::new();
                graph.incident(p).iter().all(|&e| seen.insert(self.colors[e]))
            })
    }
    /// Colour classes as sorted edge lists.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_colors];
        for (e, &c) in self.colors.iter().enumerate() {
            classes[c].push(e);
        }
        classes
    }
}

struct MisraGries<'g> {
    graph: &'g Graph,
    edge_color: Vec<Option<usize>>,
    // at[v][c] = edge coloured c at v
    at: Vec<Vec<Option<usize>>>,
}

impl<'g> MisraGries<'g> {
    fn new(graph: &'g Graph) -> Self {
        let palette = graph.max_degree() + 1;
        MisraGries {
            graph,
            edge_color: vec![None; graph.num_edges()],
            at: vec![vec![None; palette]; graph.num_persons()],
        }
    }

    fn set(&mut self, e: usize, c: Option<usize>) {
        let edge = self.graph.edge(e);
        if let Some(old) = self.edge_color[e] {
            self.at[edge.a()][old] = None;
            self.at[edge.b()][old] = None;
        }
        if let Some(c) = c {
            self.at[edge.a()][c] = Some(e);
            self.at[edge.b()][c] = Some(e);
        }
        self.edge_color[e] = c;
    }

    fn is_free(&self, v: usize, c: usize) -> bool {
        self.at[v][c].is_none()
    }

    fn lowest_free(&self, v: usize) -> usize {
        (0..self.at[v].len())
            .find(|&c| self.is_free(v, c))
            .expect("degree is below the palette size")
    }

    fn edge_between(&self, u: usize, w: usize) -> usize {
        self.graph.find_edge(u, w).expect("fan vertices are neighbours")
    }

    fn max_fan(&self, u: usize, v: usize) -> Vec<usize> {
        let mut neighbours: Vec<usize> = self
            .graph
            .incident(u)
            .iter()
            .map(|&e| self.graph.edge(e).other(u))
            .collect();
        neighbours.sort_unstable();
        let mut fan = vec![v];
        loop {
            let last = *fan.last().expect("fan is never empty");
            let next = neighbours.iter().copied().find(|&w| {
                !fan.contains(&w)
                    && self.edge_color[self.edge_between(u, w)]
                        .is_some_and(|c| self.is_free(last, c))
            });
            match next {
                Some(w) => fan.push(w),
                None => return fan,
            }
        }
    }

    /// Swaps colours `c` and `d` along the path leaving `u` on a `d` edge.
    fn invert_path(&mut self, u: usize, c: usize, d: usize) {
        let mut path = Vec::new();
        let mut at = u;
        let mut want = d;
        while let Some(e) = self.at[at][want] {
            if path.contains(&e) {
                break;
            }
            path.push(e);
            at = self.graph.edge(e).other(at);
            want = if want == d { c } else { d };
        }
        for &e in &path {
            self.set(e, None);
        }
        let mut colour = c;
        for &e in &path {
            self.set(e, Some(colour));
            colour = if colour == c { d } else { c };
        }
    }

    fn is_fan(&self, u: usize, fan: &[usize]) -> bool {
        fan.windows(2).all(|w| {
            self.edge_color[self.edge_between(u, w[1])].is_some_and(|c| self.is_free(w[0], c))
        })
    }

    fn color_edge(&mut self, e: usize) {
        let edge = self.graph.edge(e);
        let (u, v) = (edge.a(), edge.b());
        let fan = self.max_fan(u, v);
        let c = self.lowest_free(u);
        let d = self.lowest_free(*fan.last().expect("non-empty fan"));
        self.invert_path(u, c, d);
        let j = (0..fan.len())
            .find(|&j| self.is_free(fan[j], d) && self.is_fan(u, &fan[..=j]))
            .expect("some fan prefix ends at a vertex missing d");
        for i in 0..j {
            let next = self.edge_between(u, fan[i + 1]);
            let colour = self.edge_color[next];
            self.set(next, None);
            self.set(self.edge_between(u, fan[i]), colour);
        }
        self.set(self.edge_between(u, fan[j]), Some(d));
    }
}

/// Proper colouring with at most Δ+1 colours. Edges are processed in `(a, b)` order.
pub fn color_edges(graph: &Graph) -> EdgeColoring {
    let mut mg = MisraGries::new(graph);
    for e in graph.canonical_order() {
        mg.color_edge(e);
    }
    let raw: Vec<usize> = mg
        .edge_color
        .iter()
        .map(|c| c.expect("every edge coloured"))
        .collect();
    // Keep the palette order rather than order of first use.
    let mut used: Vec<usize> = raw.clone();
    used.sort_unstable();
    used.dedup();
    let colors = raw
        .iter()
        .map(|c| used.binary_search(c).expect("present"))
        .collect();
    EdgeColoring {
        colors,
        num_colors: used.len(),
    }
}

/// Day `i` schedules colour class `i`; the period is the number of colours.
pub fn round_robin_from(coloring: &EdgeColoring) -> PeriodicSchedule {
    let classes = coloring.classes();
    let days = if classes.is_empty() { vec![Vec::new()] } else { classes };
    PeriodicSchedule::new(days).expect("non-empty")
}

pub fn round_robin_schedule(instance: &OpsInstance) -> PeriodicSchedule {
    round_robin_from(&color_edges(instance.graph()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Colorability {
    Colorable(EdgeColoring),
    NotColorable,
    /// Graph above the exact-search cap and the heuristic could not decide.
    Unknown,
}

/// Decides whether `graph` has a proper colouring with `k` colours.
pub fn find_coloring(graph: &Graph, k: usize, edge_cap: usize) -> Colorability {
    let delta = graph.max_degree();
    if k < delta {
        return Colorability::NotColorable;
    }
    let heuristic = color_edges(graph);
    if heuristic.num_colors() <= k {
        return Colorability::Colorable(heuristic);
    }
    if graph.num_edges() > edge_cap {
        return Colorability::Unknown;
    }
    match backtrack_coloring(graph, k) {
        Some(c) => Colorability::Colorable(c),
        None => Colorability::NotColorable,
    }
}

fn backtrack_coloring(graph: &Graph, k: usize) -> Option<EdgeColoring> {
    assert!(k <= 64, "colour masks are 64 bits wide");
    // Order edges so that each new edge touches the already-coloured part where possible.
    let mut order = Vec::with_capacity(graph.num_edges());
    let mut placed = vec![false; graph.num_edges()];
    let mut by_degree = graph.canonical_order();
    by_degree.sort_by_key(|&e| {
        let edge = graph.edge(e);
        std::cmp::Reverse(graph.degree(edge.a()) + graph.degree(edge.b()))
    });
    for &seed in &by_degree {
        if placed[seed] {
            continue;
        }
        let mut queue = std::collections::VecDeque::from([seed]);
        placed[seed] = true;
        while let Some(e) = queue.pop_front() {
            order.push(e);
            let edge = graph.edge(e);
            for p in [edge.a(), edge.b()] {
                for &f in graph.incident(p) {
                    if !placed[f] {
                        placed[f] = true;
                        queue.push_back(f);
                    }
                }
            }
        }
    }
    let mut used = vec![0u64; graph.num_persons()];
    let mut colors = vec![usize::MAX; graph.num_edges()];
    fn go(
        graph: &Graph,
        order: &[usize],
        i: usize,
        k: usize,
        max_used: usize,
        used: &mut [u64],
        colors: &mut [usize],
    ) -> bool {
        let Some(&e) = order.get(i) else {
            return true;
        };
        let edge = graph.edge(e);
        let blocked = used[edge.a()] | used[edge.b()];
        // Colours above max_used are interchangeable: try only the first of them.
        let limit = (max_used + 1).min(k);
        for c in 0..limit {
            if blocked & (1 << c) != 0 {
                continue;
            }
            used[edge.a()] |= 1 << c;
            used[edge.b()] |= 1 << c;
            colors[e] = c;
            if go(graph, order, i + 1, k, max_used.max(c + 1), used, colors) {
                return true;
            }
            used[edge.a()] &= !(1 << c);
            used[edge.b()] &= !(1 << c);
        }
        false
    }
    go(graph, &order, 0, k, 0, &mut used, &mut colors).then(|| EdgeColoring::from_colors(&colors))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChromaticIndex {
    pub value: usize,
    /// False when the graph exceeded the cap and `value` is only the Δ+1 upper bound.
    pub exact: bool,
}

pub fn chromatic_index(graph: &Graph, edge_cap: usize) -> ChromaticIndex {
    let delta = graph.max_degree();
    let heuristic = color_edges(graph).num_colors();
    if heuristic <= delta {
        return ChromaticIndex { value: heuristic, exact: true };
    }
    if graph.num_edges() > edge_cap {
        return ChromaticIndex { value: heuristic, exact: false };
    }
    let value = if backtrack_coloring(graph, delta).is_some() { delta } else { delta + 1 };
    ChromaticIndex { value, exact: true }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractionError {
    #[error("edge {edge} does not occur in the first {h} days")]
    MissingEdge { edge: usize, h: usize },
    #[error("extracted colouring is not proper")]
    NotProper,
}

/// Colours each edge by the first day in `0..h` on which it occurs.
pub fn coloring_from_schedule(
    graph: &Graph,
    schedule: &PeriodicSchedule,
    h: usize,
) -> Result<EdgeColoring, ExtractionError> {
    let mut first = vec![None; graph.num_edges()];
    for t in 0..h {
        for &e in schedule.day(t) {
            first[e].get_or_insert(t);
        }
    }
    let raw = first
        .iter()
        .enumerate()
        .map(|(edge, d)| d.ok_or(ExtractionError::MissingEdge { edge, h }))
        .collect::<Result<Vec<_>, _>>()?;
    let coloring = EdgeColoring {
        colors: raw,
        num_colors: h,
    };
    if coloring.is_proper(graph) {
        Ok(coloring)
    } else {
        Err(ExtractionError::NotProper)
    }
}
