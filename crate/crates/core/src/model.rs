//! Instances, periodic schedules, recurrence times and heat.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{floor_to_u64, format_rational, Rational};

/// An undirected relationship between two distinct persons, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    a: usize,
    b: usize,
}

impl Edge {
    pub fn new(x: usize, y: usize) -> Result<Self, ModelError> {
        match x.cmp(&y) {
            Ordering::Less => Ok(Edge { a: x, b: y }),
            Ordering::Greater => Ok(Edge { a: y, b: x }),
            Ordering::Equal => Err(ModelError::SelfLoop(x)),
        }
    }
    pub fn a(&self) -> usize {
        self.a
    }
    pub fn b(&self) -> usize {
        self.b
    }
    pub fn touches(&self, p: usize) -> bool {
        self.a == p || self.b == p
    }
    pub fn other(&self, p: usize) -> usize {
        if self.a == p {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("self-loop at person {0}")]
    SelfLoop(usize),
    #[error("person {person} out of range (n = {n})")]
    PersonOutOfRange { person: usize, n: usize },
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("growth rate of edge {edge} must be positive")]
    NonPositiveGrowth { edge: usize },
    #[error("frequency of edge {edge} must be at least 1")]
    ZeroFrequency { edge: usize },
    #[error("value list has {got} entries for {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
    #[error("heat bound {bound} is below the largest growth rate {max}")]
    HeatBelowMaxGrowth { bound: String, max: String },
    #[error("frequency does not fit in 64 bits")]
    FrequencyOverflow,
    #[error("edge {edge} never occurs in the schedule")]
    UnboundedEdge { edge: usize },
    #[error("schedule must have at least one day")]
    EmptySchedule,
    #[error("edge index {edge} on day {day} is out of range")]
    UnknownEdge { day: usize, edge: usize },
    #[error("day {day} is not a matching: person {person} is in two edges")]
    NotMatching { day: usize, person: usize },
}

/// Simple undirected graph with edges kept in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    incident: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<Self, ModelError> {
        let mut edges = Vec::with_capacity(pairs.len());
        let mut seen = std::collections::HashSet::new();
        for &(x, y) in pairs {
            for p in [x, y] {
                if p >= n {
                    return Err(ModelError::PersonOutOfRange { person: p, n });
                }
            }
            let e = Edge::new(x, y)?;
            if !seen.insert(e) {
                return Err(ModelError::DuplicateEdge(e.a, e.b));
            }
            edges.push(e);
        }
        let mut incident = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            incident[e.a].push(i);
            incident[e.b].push(i);
        }
        Ok(Graph { n, edges, incident })
    }

    pub fn num_persons(&self) -> usize {
        self.n
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }
    pub fn incident(&self, p: usize) -> &[usize] {
        &self.incident[p]
    }
    pub fn degree(&self, p: usize) -> usize {
        self.incident[p].len()
    }
    pub fn max_degree(&self) -> usize {
        self.incident.iter().map(Vec::len).max().unwrap_or(0)
    }
    pub fn find_edge(&self, x: usize, y: usize) -> Option<usize> {
        let e = Edge::new(x, y).ok()?;
        self.incident
            .get(e.a)?
            .iter()
            .copied()
            .find(|&i| self.edges[i] == e)
    }
    /// Edge indices sorted by their `(a, b)` endpoints.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| self.edges[i]);
        order
    }
    /// Subgraph on the same persons keeping only the listed edges (in that order).
    pub fn subgraph(&self, keep: &[usize]) -> Graph {
        let pairs: Vec<(usize, usize)> = keep
            .iter()
            .map(|&i| (self.edges[i].a, self.edges[i].b))
            .collect();
        Graph::new(self.n, &pairs).expect("subgraph of a valid graph is valid")
    }
    pub fn is_matching(&self, edge_ids: &[usize]) -> bool {
        let mut used = vec![false; self.n];
        for &i in edge_ids {
            let e = self.edges[i];
            if used[e.a] || used[e.b] {
                return false;
            }
            used[e.a] = true;
            used[e.b] = true;
        }
        true
    }
}

/// Optimisation instance: each edge carries a positive rational growth rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpsInstance {
    graph: Graph,
    growth: Vec<Rational>,
}

impl OpsInstance {
    pub fn new(graph: Graph, growth: Vec<Rational>) -> Result<Self, ModelError> {
        if growth.len() != graph.num_edges() {
            return Err(ModelError::LengthMismatch {
                expected: graph.num_edges(),
                got: growth.len(),
            });
        }
        if let Some(edge) = growth.iter().position(|g| !g.is_positive()) {
            return Err(ModelError::NonPositiveGrowth { edge });
        }
        Ok(OpsInstance { graph, growth })
    }
    /// All growth rates equal to one.
    pub fn unweighted(graph: Graph) -> Self {
        let growth = vec![Rational::one(); graph.num_edges()];
        OpsInstance { graph, growth }
    }
    pub fn graph(&self) -> &Graph {
        &self.graph
    }
    pub fn growth(&self) -> &[Rational] {
        &self.growth
    }
    pub fn max_growth(&self) -> Rational {
        self.growth.iter().max().cloned().unwrap_or_else(Rational::zero)
    }
    pub fn min_growth(&self) -> Rational {
        self.growth.iter().min().cloned().unwrap_or_else(Rational::zero)
    }
    pub fn total_growth(&self) -> Rational {
        self.growth.iter().sum()
    }
    pub fn is_unweighted(&self) -> bool {
        self.growth.iter().all(|g| g.is_one())
    }
    pub fn restrict(&self, keep: &[usize]) -> OpsInstance {
        OpsInstance {
            graph: self.graph.subgraph(keep),
            growth: keep.iter().map(|&i| self.growth[i].clone()).collect(),
        }
    }
}

/// Decision instance: each edge must be scheduled at least once every `f` days.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpsInstance {
    graph: Graph,
    freq: Vec<u64>,
}

impl DpsInstance {
    pub fn new(graph: Graph, freq: Vec<u64>) -> Result<Self, ModelError> {
        if freq.len() != graph.num_edges() {
            return Err(ModelError::LengthMismatch {
                expected: graph.num_edges(),
                got: freq.len(),
            });
        }
        if let Some(edge) = freq.iter().position(|&f| f == 0) {
            return Err(ModelError::ZeroFrequency { edge });
        }
        Ok(DpsInstance { graph, freq })
    }
    pub fn graph(&self) -> &Graph {
        &self.graph
    }
    pub fn freq(&self) -> &[u64] {
        &self.freq
    }
    /// Sum of `1/f` over all edges at person `p`.
    pub fn density_at(&self, p: usize) -> Rational {
        self.graph
            .incident(p)
            .iter()
            .map(|&i| Rational::new(1.into(), self.freq[i].into()))
            .sum()
    }
}

/// A finite sequence of matchings repeated forever. Each day holds sorted edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicSchedule {
    days: Vec<Vec<usize>>,
}

impl PeriodicSchedule {
    pub fn new(mut days: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        if days.is_empty() {
            return Err(ModelError::EmptySchedule);
        }
        for d in &mut days {
            d.sort_unstable();
            d.dedup();
        }
        Ok(PeriodicSchedule { days })
    }
    pub fn period(&self) -> usize {
        self.days.len()
    }
    pub fn days(&self) -> &[Vec<usize>] {
        &self.days
    }
    pub fn day(&self, t: usize) -> &[usize] {
        &self.days[t % self.days.len()]
    }
    /// Checks edge indices and the matching property on every day.
    pub fn validate(&self, graph: &Graph) -> Result<(), ModelError> {
        let mut stamp = vec![usize::MAX; graph.num_persons()];
        for (day, edges) in self.days.iter().enumerate() {
            for &edge in edges {
                if edge >= graph.num_edges() {
                    return Err(ModelError::UnknownEdge { day, edge });
                }
                let e = graph.edge(edge);
                for p in [e.a, e.b] {
                    if stamp[p] == day {
                        return Err(ModelError::NotMatching { day, person: p });
                    }
                    stamp[p] = day;
                }
            }
        }
        Ok(())
    }
    /// Same schedule started `shift` days later.
    pub fn rotated(&self, shift: usize) -> PeriodicSchedule {
        let t = self.period();
        let days = (0..t).map(|i| self.days[(i + shift) % t].clone()).collect();
        PeriodicSchedule { days }
    }
    /// Repeats the period `times` times.
    pub fn unrolled(&self, times: usize) -> PeriodicSchedule {
        let days = (0..self.period() * times.max(1))
            .map(|i| self.days[i % self.period()].clone())
            .collect();
        PeriodicSchedule { days }
    }
    /// Days (within one period) on which each edge occurs.
    pub fn occurrences(&self, num_edges: usize) -> Vec<Vec<usize>> {
        let mut occ = vec![Vec::new(); num_edges];
        for (t, day) in self.days.iter().enumerate() {
            for &e in day {
                if e < num_edges {
                    occ[e].push(t);
                }
            }
        }
        occ
    }
}

/// Longest cyclic gap between consecutive occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Recurrence {
    Finite(u64),
    Unbounded,
}

fn max_cyclic_gap(days: &[usize], period: usize) -> Recurrence {
    match (days.first(), days.last()) {
        (Some(&first), Some(&last)) => {
            let inner = days.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
            Recurrence::Finite(inner.max(first + period - last) as u64)
        }
        _ => Recurrence::Unbounded,
    }
}

pub fn recurrence_time(schedule: &PeriodicSchedule, edge: usize) -> Recurrence {
    let days: Vec<usize> = (0..schedule.period())
        .filter(|&t| schedule.day(t).binary_search(&edge).is_ok())
        .collect();
    max_cyclic_gap(&days, schedule.period())
}

pub fn recurrence_times(schedule: &PeriodicSchedule, num_edges: usize) -> Vec<Recurrence> {
    schedule
        .occurrences(num_edges)
        .iter()
        .map(|d| max_cyclic_gap(d, schedule.period()))
        .collect()
}

/// Largest height any plant reaches; unbounded when some edge is never scheduled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Heat {
    Finite(Rational),
    Unbounded,
}

impl Heat {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Heat::Finite(h) => Some(h),
            Heat::Unbounded => None,
        }
    }
}

impl PartialOrd for Heat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Heat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Heat::Finite(a), Heat::Finite(b)) => a.cmp(b),
            (Heat::Finite(_), Heat::Unbounded) => Ordering::Less,
            (Heat::Unbounded, Heat::Finite(_)) => Ordering::Greater,
            (Heat::Unbounded, Heat::Unbounded) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Heat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Heat::Finite(h) => f.write_str(&format_rational(h)),
            Heat::Unbounded => f.write_str("unbounded"),
        }
    }
}

pub fn heat(instance: &OpsInstance, schedule: &PeriodicSchedule) -> Heat {
    let mut best = Rational::zero();
    for (g, r) in instance
        .growth()
        .iter()
        .zip(recurrence_times(schedule, instance.graph().num_edges()))
    {
        match r {
            Recurrence::Finite(r) => {
                let h = g * Rational::from_integer(r.into());
                if h > best {
                    best = h;
                }
            }
            Recurrence::Unbounded => return Heat::Unbounded,
        }
    }
    Heat::Finite(best)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("invalid schedule: {0}")]
    Malformed(ModelError),
    #[error("edge {edge} never occurs")]
    Missing { edge: usize },
    #[error("edge {edge} has a gap of {gap} days after day {after_day}, frequency {freq}")]
    GapTooLong {
        edge: usize,
        gap: u64,
        freq: u64,
        after_day: usize,
    },
}

/// Checks that every window of `f(e)` consecutive days contains `e`.
pub fn verify_dps(instance: &DpsInstance, schedule: &PeriodicSchedule) -> Result<(), Violation> {
    schedule
        .validate(instance.graph())
        .map_err(Violation::Malformed)?;
    let t = schedule.period();
    for (edge, days) in schedule
        .occurrences(instance.graph().num_edges())
        .iter()
        .enumerate()
    {
        let freq = instance.freq()[edge];
        if days.is_empty() {
            return Err(Violation::Missing { edge });
        }
        for (i, &d) in days.iter().enumerate() {
            let next = days.get(i + 1).copied().unwrap_or(days[0] + t);
            let gap = (next - d) as u64;
            if gap > freq {
                return Err(Violation::GapTooLong {
                    edge,
                    gap,
                    freq,
                    after_day: d,
                });
            }
        }
    }
    Ok(())
}

/// Frequencies `floor(h / g)`; the schedule problem at heat `h` becomes this instance.
pub fn ops_to_dps(instance: &OpsInstance, heat_bound: &Rational) -> Result<DpsInstance, ModelError> {
    let max = instance.max_growth();
    if instance.graph().num_edges() > 0 && *heat_bound < max {
        return Err(ModelError::HeatBelowMaxGrowth {
            bound: format_rational(heat_bound),
            max: format_rational(&max),
        });
    }
    let freq = instance
        .growth()
        .iter()
        .map(|g| floor_to_u64(&(heat_bound / g)).ok_or(ModelError::FrequencyOverflow))
        .collect::<Result<Vec<_>, _>>()?;
    DpsInstance::new(instance.graph().clone(), freq)
}

/// Growth rates `1/f`: a schedule is valid for the input iff its heat is at most 1.
pub fn dps_to_ops(instance: &DpsInstance) -> OpsInstance {
    let growth = instance
        .freq()
        .iter()
        .map(|&f| Rational::new(1.into(), f.into()))
        .collect();
    OpsInstance {
        graph: instance.graph().clone(),
        growth,
    }
}

/// Replaces each growth rate by `1/r(e)` under the given schedule, so its heat becomes 1.
pub fn normalize(instance: &OpsInstance, schedule: &PeriodicSchedule) -> Result<OpsInstance, ModelError> {
    schedule.validate(instance.graph())?;
    let growth = recurrence_times(schedule, instance.graph().num_edges())
        .into_iter()
        .enumerate()
        .map(|(edge, r)| match r {
            Recurrence::Finite(r) => Ok(Rational::new(1.into(), r.into())),
            Recurrence::Unbounded => Err(ModelError::UnboundedEdge { edge }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OpsInstance {
        graph: instance.graph().clone(),
        growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn path3() -> Graph {
        Graph::new(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn rejects_bad_graphs() {
        assert_eq!(Graph::new(2, &[(1, 1)]), Err(ModelError::SelfLoop(1)));
        assert_eq!(
            Graph::new(2, &[(0, 1), (1, 0)]),
            Err(ModelError::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            Graph::new(2, &[(0, 2)]),
            Err(ModelError::PersonOutOfRange { person: 2, n: 2 })
        ));
    }

    #[test]
    fn recurrence_counts_cyclic_gap() {
        let s = PeriodicSchedule::new(vec![vec![0], vec![1], vec![], vec![1]]).unwrap();
        assert_eq!(recurrence_time(&s, 0), Recurrence::Finite(4));
        assert_eq!(recurrence_time(&s, 1), Recurrence::Finite(2));
        let daily = PeriodicSchedule::new(vec![vec![0]]).unwrap();
        assert_eq!(recurrence_time(&daily, 0), Recurrence::Finite(1));
        assert_eq!(recurrence_time(&daily, 1), Recurrence::Unbounded);
    }

    #[test]
    fn heat_is_unbounded_when_edge_missing() {
        let inst = OpsInstance::unweighted(path3());
        let s = PeriodicSchedule::new(vec![vec![0]]).unwrap();
        assert_eq!(heat(&inst, &s), Heat::Unbounded);
        let s = PeriodicSchedule::new(vec![vec![0], vec![1]]).unwrap();
        assert_eq!(heat(&inst, &s), Heat::Finite(int(2)));
    }

    #[test]
    fn validate_catches_non_matching_day() {
        let s = PeriodicSchedule::new(vec![vec![0, 1]]).unwrap();
        assert_eq!(
            s.validate(&path3()),
            Err(ModelError::NotMatching { day: 0, person: 1 })
        );
    }

    #[test]
    fn heat_below_max_growth_is_rejected() {
        let inst = OpsInstance::new(path3(), vec![int(3), int(5)]).unwrap();
        assert!(matches!(
            ops_to_dps(&inst, &int(4)),
            Err(ModelError::HeatBelowMaxGrowth { .. })
        ));
        assert_eq!(ops_to_dps(&inst, &int(10)).unwrap().freq(), &[3, 2]);
    }
}
