//! Phase assignments: edge `e` with frequency `f` occurs exactly on days `t ≡ p_e (mod f)`.
//!
//! Two edges at a common person with phases `p1`, `p2` and frequencies `f1`, `f2` meet on
//! some day iff `p1 ≡ p2 (mod gcd(f1, f2))`. At a person whose frequencies sum to density one,
//! every valid schedule is of this form, so searching phases is exhaustive there.

use polysched_core::model::{DpsInstance, PeriodicSchedule};
use thiserror::Error;
use varisat::{ExtendFormula, Lit, Solver};

use crate::slots::{color_mask, gcd, SlotColor};

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub const MAX_FREQUENCY: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("phase search gave up after {0} nodes")]
pub struct SearchBudgetExceeded(pub u64);

#[derive(Debug, Clone)]
pub struct PhaseProblem {
    freq: Vec<u64>,
    domain: Vec<u16>,
    neighbors: Vec<Vec<usize>>,
    /// Incident edges of every person whose frequencies sum to exactly one.
    tight: Vec<Vec<usize>>,
}

impl PhaseProblem {
    pub fn new(instance: &DpsInstance) -> Self {
        let graph = instance.graph();
        let freq = instance.freq().to_vec();
        assert!(
            freq.iter().all(|&f| f <= MAX_FREQUENCY),
            "phase search supports frequencies up to {MAX_FREQUENCY}"
        );
        let domain = freq.iter().map(|&f| ((1u32 << f) - 1) as u16).collect();
        let neighbors = graph
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut ns: Vec<usize> = graph
                    .incident(e.a())
                    .iter()
                    .chain(graph.incident(e.b()))
                    .copied()
                    .filter(|&j| j != i)
                    .collect();
                ns.sort_unstable();
                ns.dedup();
                ns
            })
            .collect();
        let tight = (0..graph.num_persons())
            .map(|p| graph.incident(p).to_vec())
            .filter(|edges| {
                let period = edges.iter().fold(1, |l, &e| lcm(l, freq[e]));
                !edges.is_empty() && edges.iter().map(|&e| period / freq[e]).sum::<u64>() == period
            })
            .collect();
        PhaseProblem {
            freq,
            domain,
            neighbors,
            tight,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.freq.len()
    }

    pub fn domain(&self, edge: usize) -> u16 {
        self.domain[edge]
    }

    pub fn restrict(&mut self, edge: usize, mask: u16) {
        self.domain[edge] &= mask;
    }

    /// Keeps only the phases whose days all have `color`.
    pub fn pin(&mut self, edge: usize, color: SlotColor) {
        let f = self.freq[edge];
        self.restrict(edge, color_mask(color, f));
    }

    /// Some phase assignment within the domains, found by a CDCL solver over one-hot phase
    /// variables. Persons of density one also get a clause per day saying some edge covers it;
    /// these are implied but let the solver notice uncoverable days early.
    pub fn solve(&self) -> Option<Vec<u64>> {
        if self.domain.contains(&0) {
            return None;
        }
        let phases = |e: usize| (0..self.freq[e]).filter(move |&p| self.domain[e] >> p & 1 == 1);
        let offset: Vec<usize> = self
            .freq
            .iter()
            .scan(0, |next, &f| {
                let start = *next;
                *next += f as usize;
                Some(start)
            })
            .collect();
        let lit = |e: usize, p: u64| Lit::from_index(offset[e] + p as usize, true);
        let mut solver = Solver::new();
        for e in 0..self.num_edges() {
            let options: Vec<Lit> = phases(e).map(|p| lit(e, p)).collect();
            solver.add_clause(&options);
            for (i, &a) in options.iter().enumerate() {
                for &b in &options[i + 1..] {
                    solver.add_clause(&[!a, !b]);
                }
            }
            for &n in self.neighbors[e].iter().filter(|&&n| n > e) {
                let g = gcd(self.freq[e], self.freq[n]);
                for p in phases(e) {
                    for q in phases(n).filter(|q| q % g == p % g) {
                        solver.add_clause(&[!lit(e, p), !lit(n, q)]);
                    }
                }
            }
        }
        for edges in &self.tight {
            let period = edges.iter().fold(1, |l, &e| lcm(l, self.freq[e]));
            for t in 0..period {
                let cover: Vec<Lit> = edges
                    .iter()
                    .flat_map(|&e| phases(e).filter(move |&p| t % self.freq[e] == p).map(move |p| lit(e, p)))
                    .collect();
                solver.add_clause(&cover);
            }
        }
        if !solver.solve().expect("in-memory solving cannot fail") {
            return None;
        }
        let mut result = vec![0; self.num_edges()];
        for l in solver.model().expect("satisfiable formula has a model") {
            if l.is_positive() {
                let v = l.index();
                let e = offset.partition_point(|&o| o <= v) - 1;
                result[e] = (v - offset[e]) as u64;
            }
        }
        Some(result)
    }

    pub fn count(&self, budget: u64) -> Result<u64, SearchBudgetExceeded> {
        let mut n = 0;
        Search::new(self, budget).run(&mut |_| {
            n += 1;
            true
        })?;
        Ok(n)
    }
}

struct Search<'a> {
    problem: &'a PhaseProblem,
    domain: Vec<u16>,
    value: Vec<u64>,
    assigned: Vec<bool>,
    trail: Vec<(usize, u16)>,
    nodes: u64,
    budget: u64,
}

impl<'a> Search<'a> {
    fn new(problem: &'a PhaseProblem, budget: u64) -> Self {
        let n = problem.num_edges();
        Search {
            problem,
            domain: problem.domain.clone(),
            value: vec![0; n],
            assigned: vec![false; n],
            trail: Vec::new(),
            nodes: 0,
            budget,
        }
    }

    fn run(mut self, visit: &mut dyn FnMut(&[u64]) -> bool) -> Result<(), SearchBudgetExceeded> {
        if self.domain.contains(&0) {
            return Ok(());
        }
        self.dfs(visit).map(|_| ())
    }

    /// Most constrained unassigned edge, or `None` once everything is assigned.
    fn pick(&self) -> Option<usize> {
        (0..self.domain.len())
            .filter(|&e| !self.assigned[e])
            .min_by_key(|&e| self.domain[e].count_ones())
    }

    /// Returns `Ok(false)` when the visitor asked to stop.
    fn dfs(&mut self, visit: &mut dyn FnMut(&[u64]) -> bool) -> Result<bool, SearchBudgetExceeded> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SearchBudgetExceeded(self.budget));
        }
        let Some(e) = self.pick() else {
            return Ok(visit(&self.value));
        };
        let f = self.problem.freq[e];
        let choices = self.domain[e];
        for p in (0..f).filter(|&p| choices >> p & 1 == 1) {
            let mark = self.trail.len();
            self.assigned[e] = true;
            self.value[e] = p;
            if self.propagate(e, p) && !self.dfs(visit)? {
                return Ok(false);
            }
            self.undo(mark);
            self.assigned[e] = false;
        }
        Ok(true)
    }

    fn propagate(&mut self, e: usize, p: u64) -> bool {
        let f = self.problem.freq[e];
        for &n in &self.problem.neighbors[e] {
            if self.assigned[n] {
                continue;
            }
            let fn_ = self.problem.freq[n];
            let g = gcd(f, fn_);
            let clash = (p % g..fn_).step_by(g as usize).fold(0u16, |m, q| m | 1 << q);
            let old = self.domain[n];
            let new = old & !clash;
            if new != old {
                self.trail.push((n, old));
                self.domain[n] = new;
                if new == 0 {
                    return false;
                }
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (n, old) = self.trail.pop().expect("non-empty trail");
            self.domain[n] = old;
        }
    }
}

/// Day `t` holds every edge with `t ≡ p_e (mod f_e)`.
pub fn schedule_from_phases(phases: &[u64], freq: &[u64], period: u64) -> PeriodicSchedule {
    let days = (0..period)
        .map(|t| {
            (0..phases.len())
                .filter(|&e| t % freq[e] == phases[e])
                .collect()
        })
        .collect();
    PeriodicSchedule::new(days).expect("period is positive")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("schedule period {period} is not a multiple of frequency {freq} of edge {edge}")]
    PeriodMismatch { edge: usize, freq: u64, period: usize },
    #[error("edge {edge} is not scheduled exactly every {freq} days")]
    NotStrict { edge: usize, freq: u64 },
}

/// Reads back the phase of every edge, requiring each edge to recur exactly every `f` days.
pub fn phases_from_schedule(instance: &DpsInstance, schedule: &PeriodicSchedule) -> Result<Vec<u64>, PhaseError> {
    let period = schedule.period();
    let occurrences = schedule.occurrences(instance.graph().num_edges());
    instance
        .freq()
        .iter()
        .zip(&occurrences)
        .enumerate()
        .map(|(edge, (&freq, days))| {
            if !(period as u64).is_multiple_of(freq) {
                return Err(PhaseError::PeriodMismatch { edge, freq, period });
            }
            let phase = *days.first().ok_or(PhaseError::NotStrict { edge, freq })? as u64;
            let strict = phase < freq
                && days.len() as u64 == period as u64 / freq
                && days.iter().all(|&t| t as u64 % freq == phase);
            if strict {
                Ok(phase)
            } else {
                Err(PhaseError::NotStrict { edge, freq })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use polysched_core::model::{verify_dps, Graph};

    fn star(freqs: &[u64]) -> DpsInstance {
        let pairs: Vec<(usize, usize)> = (0..freqs.len()).map(|i| (0, i + 1)).collect();
        DpsInstance::new(Graph::new(freqs.len() + 1, &pairs).unwrap(), freqs.to_vec()).unwrap()
    }

    #[test]
    fn density_one_star_counts() {
        // The 3s take two of the three residues mod 3 in order; the 6s split the last one's two days.
        let inst = star(&[3, 3, 6, 6]);
        let problem = PhaseProblem::new(&inst);
        assert_eq!(problem.count(1 << 20).unwrap(), 6 * 2);
        let phases = problem.solve().unwrap();
        let s = schedule_from_phases(&phases, inst.freq(), 6);
        assert!(verify_dps(&inst, &s).is_ok());
        assert_eq!(phases_from_schedule(&inst, &s).unwrap(), phases);
    }

    #[test]
    fn overfull_star_has_no_phases() {
        let problem = PhaseProblem::new(&star(&[2, 3, 6, 6]));
        assert_eq!(problem.solve(), None);
    }

    #[test]
    fn pins_restrict_to_colour() {
        let inst = star(&[3, 3, 6, 6]);
        let mut problem = PhaseProblem::new(&inst);
        problem.pin(0, SlotColor::Red);
        problem.pin(1, SlotColor::Blue);
        problem.pin(2, SlotColor::Green);
        assert_eq!(problem.solve(), Some(vec![0, 1, 2, 5]));
        assert_eq!(problem.count(100).unwrap(), 1);
    }

    #[test]
    fn budget_is_reported() {
        let problem = PhaseProblem::new(&star(&[12; 12]));
        assert_eq!(problem.count(50), Err(SearchBudgetExceeded(50)));
    }

    #[test]
    fn non_strict_schedules_are_rejected() {
        let inst = star(&[3]);
        let s = PeriodicSchedule::new(vec![vec![0], vec![0], vec![]]).unwrap();
        assert_eq!(phases_from_schedule(&inst, &s), Err(PhaseError::NotStrict { edge: 0, freq: 3 }));
        let s = PeriodicSchedule::new(vec![vec![0], vec![], vec![], vec![]]).unwrap();
        assert!(matches!(phases_from_schedule(&inst, &s), Err(PhaseError::PeriodMismatch { .. })));
    }
}
