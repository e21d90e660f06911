//! Exact feasibility by cycle search over countdown states, and exact optimal
//! heat by binary search over candidate heats.
//!
//! A state records, per edge, how many days remain before the edge must be
//! scheduled. Each day moves along one maximal matching containing every edge
//! whose countdown is 1. A valid periodic schedule is exactly a reachable cycle.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use dashmap::DashSet;
use num_traits::Zero;
use thiserror::Error;

use crate::coloring::round_robin_schedule;
use crate::matching::for_each_maximal_matching;
use crate::model::{heat, ops_to_dps, DpsInstance, Heat, OpsInstance, PeriodicSchedule};
use crate::rational::{format_rational, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLimits {
    pub max_states: u64,
    pub time_limit: Option<Duration>,
    pub dominance: bool,
    pub antichain_cap: usize,
    /// Worker threads for the top-level branches; 1 means a single search.
    pub threads: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_states: 50_000_000,
            time_limit: None,
            dominance: true,
            antichain_cap: 512,
            threads: 1,
        }
    }
}

/// Countdowns `1 <= u_e <= f(e)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConfigState(pub Vec<u64>);

impl ConfigState {
    pub fn start(instance: &DpsInstance) -> Self {
        ConfigState(instance.freq().to_vec())
    }
    pub fn is_valid(&self, instance: &DpsInstance) -> bool {
        self.0.len() == instance.freq().len()
            && self.0.iter().zip(instance.freq()).all(|(&u, &f)| u >= 1 && u <= f)
    }
    fn must(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&e| self.0[e] == 1).collect()
    }
    fn after(&self, instance: &DpsInstance, matching: &[usize]) -> ConfigState {
        let mut next: Vec<u64> = self.0.iter().map(|u| u - 1).collect();
        for &e in matching {
            next[e] = instance.freq()[e];
        }
        ConfigState(next)
    }
    fn dominated_by(&self, other: &[u64]) -> bool {
        self.0.iter().zip(other).all(|(a, b)| a <= b)
    }
}

/// One successor per maximal matching containing every edge with countdown 1.
pub fn successors(state: &ConfigState, instance: &DpsInstance) -> Vec<(Vec<usize>, ConfigState)> {
    let mut out = Vec::new();
    for_each_maximal_matching(instance.graph(), &state.must(), |m| {
        out.push((m.to_vec(), state.after(instance, m)));
    });
    // Most relief for near-due edges first.
    let relief = |m: &Vec<usize>| m.iter().filter(|&&e| state.0[e] <= 2).count();
    out.sort_by(|(a, _), (b, _)| relief(b).cmp(&relief(a)).then_with(|| a.cmp(b)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Feasible(PeriodicSchedule),
    Infeasible,
    Inconclusive(BudgetExceeded),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BudgetExceeded {
    #[error("state budget of {0} visits exhausted")]
    States(u64),
    #[error("time limit of {0:?} exhausted")]
    Time(Duration),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityResult {
    pub verdict: Verdict,
    pub explored: u64,
}

type Key = Box<[u64]>;

struct Packer {
    bits: u32,
}

impl Packer {
    fn new(instance: &DpsInstance) -> Self {
        let max = instance.freq().iter().copied().max().unwrap_or(1);
        Packer {
            bits: 64 - max.leading_zeros(),
        }
    }
    fn pack(&self, s: &ConfigState) -> Key {
        let per_word = (64 / self.bits) as usize;
        s.0.chunks(per_word)
            .map(|chunk| chunk.iter().fold(0u64, |acc, &u| (acc << self.bits) | u))
            .collect()
    }
}

struct Shared<'a> {
    instance: &'a DpsInstance,
    limits: ExactLimits,
    packer: Packer,
    dead: DashSet<Key>,
    explored: AtomicU64,
    stop: AtomicBool,
    started: Instant,
}

enum Outcome {
    Cycle(Vec<Vec<usize>>),
    Exhausted,
    Budget(BudgetExceeded),
    Stopped,
}

struct Frame {
    key: Key,
    state: ConfigState,
    succs: Vec<(Vec<usize>, ConfigState)>,
    next: usize,
}

impl Shared<'_> {
    fn charge(&self) -> Result<(), BudgetExceeded> {
        let n = self.explored.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.limits.max_states {
            return Err(BudgetExceeded::States(self.limits.max_states));
        }
        if let Some(limit) = self.limits.time_limit {
            if n.is_multiple_of(1024) && self.started.elapsed() > limit {
                return Err(BudgetExceeded::Time(limit));
            }
        }
        Ok(())
    }

    /// Depth-first search from `root`, which is reached from `prefix` by the
    /// given moves. Prefix states count as being on the current path.
    fn search(&self, prefix: &[(ConfigState, Vec<usize>)], root: ConfigState) -> Outcome {
        let mut on_path: HashMap<Key, usize> = HashMap::new();
        let mut stack: Vec<Frame> = Vec::new();
        let mut antichain: Vec<Vec<u64>> = Vec::new();
        for (state, chosen) in prefix {
            let key = self.packer.pack(state);
            on_path.insert(key.clone(), stack.len());
            stack.push(Frame {
                key,
                state: state.clone(),
                succs: vec![(chosen.clone(), state.after(self.instance, chosen))],
                next: 1,
            });
        }
        let fixed = stack.len();
        if let Err(b) = self.charge() {
            return Outcome::Budget(b);
        }
        let key = self.packer.pack(&root);
        on_path.insert(key.clone(), stack.len());
        stack.push(Frame {
            key,
            succs: successors(&root, self.instance),
            state: root,
            next: 0,
        });
        while let Some(top) = stack.last_mut() {
            if self.stop.load(Ordering::Relaxed) {
                return Outcome::Stopped;
            }
            if top.next == top.succs.len() {
                let frame = stack.pop().expect("non-empty");
                on_path.remove(&frame.key);
                if self.limits.dominance {
                    insert_antichain(&mut antichain, frame.state.0, self.limits.antichain_cap);
                }
                self.dead.insert(frame.key);
                if stack.len() == fixed {
                    return Outcome::Exhausted;
                }
                continue;
            }
            let idx = top.next;
            top.next += 1;
            let state = top.succs[idx].1.clone();
            let key = self.packer.pack(&state);
            if let Some(&pos) = on_path.get(&key) {
                let cycle = stack[pos..]
                    .iter()
                    .map(|f| f.succs[f.next - 1].0.clone())
                    .collect();
                return Outcome::Cycle(cycle);
            }
            if self.dead.contains(&key) {
                continue;
            }
            if self.limits.dominance && antichain.iter().any(|d| state.dominated_by(d)) {
                continue;
            }
            if let Err(b) = self.charge() {
                return Outcome::Budget(b);
            }
            let succs = successors(&state, self.instance);
            on_path.insert(key.clone(), stack.len());
            stack.push(Frame {
                key,
                state,
                succs,
                next: 0,
            });
        }
        Outcome::Exhausted
    }
}

/// Keeps only maximal dead countdown vectors; anything below one of them is dead too.
fn insert_antichain(antichain: &mut Vec<Vec<u64>>, u: Vec<u64>, cap: usize) {
    if antichain.iter().any(|d| u.iter().zip(d).all(|(a, b)| a <= b)) {
        return;
    }
    antichain.retain(|d| !d.iter().zip(&u).all(|(a, b)| a <= b));
    if antichain.len() < cap {
        antichain.push(u);
    }
}

/// Searches for a reachable cycle from the all-slack start state.
pub fn dps_feasible(instance: &DpsInstance, limits: ExactLimits) -> FeasibilityResult {
    if instance.graph().num_edges() == 0 {
        return FeasibilityResult {
            verdict: Verdict::Feasible(PeriodicSchedule::new(vec![Vec::new()]).expect("one day")),
            explored: 0,
        };
    }
    let shared = Shared {
        instance,
        limits,
        packer: Packer::new(instance),
        dead: DashSet::new(),
        explored: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        started: Instant::now(),
    };
    let start = ConfigState::start(instance);
    let outcome = if limits.threads <= 1 {
        shared.search(&[], start)
    } else {
        parallel_search(&shared, start)
    };
    let verdict = match outcome {
        Outcome::Cycle(days) => Verdict::Feasible(PeriodicSchedule::new(days).expect("cycle is non-empty")),
        Outcome::Exhausted => Verdict::Infeasible,
        Outcome::Budget(b) => Verdict::Inconclusive(b),
        Outcome::Stopped => unreachable!("only workers are stopped"),
    };
    FeasibilityResult {
        verdict,
        explored: shared.explored.load(Ordering::Relaxed),
    }
}

/// Whether an infinite continuation exists from `state` (cycle search rooted there).
pub fn alive_from(instance: &DpsInstance, state: &ConfigState, limits: ExactLimits) -> Verdict {
    assert!(state.is_valid(instance), "countdowns out of range");
    let shared = Shared {
        instance,
        limits,
        packer: Packer::new(instance),
        dead: DashSet::new(),
        explored: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        started: Instant::now(),
    };
    match shared.search(&[], state.clone()) {
        Outcome::Cycle(days) => Verdict::Feasible(PeriodicSchedule::new(days).expect("non-empty")),
        Outcome::Exhausted | Outcome::Stopped => Verdict::Infeasible,
        Outcome::Budget(b) => Verdict::Inconclusive(b),
    }
}

fn parallel_search(shared: &Shared<'_>, start: ConfigState) -> Outcome {
    let branches = successors(&start, shared.instance);
    let _ = shared.charge();
    let next_branch = AtomicU64::new(0);
    let results = std::sync::Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..shared.limits.threads.min(branches.len().max(1)) {
            scope.spawn(|| loop {
                let i = next_branch.fetch_add(1, Ordering::Relaxed) as usize;
                if i >= branches.len() || shared.stop.load(Ordering::Relaxed) {
                    return;
                }
                let (m, _) = &branches[i];
                let out = shared.search(&[(start.clone(), m.clone())], branches[i].1.clone());
                if matches!(out, Outcome::Cycle(_) | Outcome::Budget(_)) {
                    shared.stop.store(true, Ordering::Relaxed);
                }
                results.lock().expect("no poisoning").push(out);
            });
        }
    });
    let results = results.into_inner().expect("no poisoning");
    let mut budget = None;
    for r in results {
        match r {
            Outcome::Cycle(c) => return Outcome::Cycle(c),
            Outcome::Budget(b) => budget = Some(b),
            Outcome::Exhausted | Outcome::Stopped => {}
        }
    }
    match budget {
        Some(b) => Outcome::Budget(b),
        None => Outcome::Exhausted,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Probe {
    pub heat: Rational,
    pub feasible: bool,
    pub explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalHeat {
    pub heat: Rational,
    pub witness: PeriodicSchedule,
    /// Largest candidate below the optimum, shown infeasible by search.
    pub predecessor: Option<Rational>,
    pub probes: Vec<Probe>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("search budget exhausted: optimum lies in ({}, {}]", fmt_opt(.infeasible_below), format_rational(.feasible_at))]
    Inconclusive {
        infeasible_below: Option<Rational>,
        feasible_at: Rational,
        reason: BudgetExceeded,
    },
}

fn fmt_opt(r: &Option<Rational>) -> String {
    r.as_ref().map_or_else(|| "0".to_string(), format_rational)
}

/// Candidate heats `g(e) * q` between `g_max` and `upper`, ascending and distinct.
pub fn candidate_heats(instance: &OpsInstance, upper: &Rational) -> Vec<Rational> {
    let g_max = instance.max_growth();
    let mut out = Vec::new();
    for g in instance.growth() {
        let mut q = 1i64;
        loop {
            let h = g * int(q);
            if h > *upper {
                break;
            }
            if h >= g_max {
                out.push(h);
            }
            q += 1;
        }
    }
    out.sort();
    out.dedup();
    out
}

#[allow(clippy::result_large_err)]
pub fn ops_optimal_heat(instance: &OpsInstance, limits: ExactLimits) -> Result<OptimalHeat, ExactError> {
    if instance.graph().num_edges() == 0 {
        return Ok(OptimalHeat {
            heat: Rational::zero(),
            witness: PeriodicSchedule::new(vec![Vec::new()]).expect("one day"),
            predecessor: None,
            probes: Vec::new(),
        });
    }
    let fallback = round_robin_schedule(instance);
    let Heat::Finite(upper) = heat(instance, &fallback) else {
        unreachable!("a colouring schedules every edge");
    };
    let candidates = candidate_heats(instance, &upper);
    let mut lo = 0usize;
    let mut hi = candidates.len() - 1;
    let mut best = fallback;
    let mut probes = Vec::new();
    while lo < hi {
        let mid = (lo + hi) / 2;
        let h = &candidates[mid];
        let dps = ops_to_dps(instance, h).expect("candidates are at least g_max");
        let result = dps_feasible(&dps, limits);
        let feasible = match result.verdict {
            Verdict::Feasible(w) => {
                best = w;
                hi = mid;
                true
            }
            Verdict::Infeasible => {
                lo = mid + 1;
                false
            }
            Verdict::Inconclusive(reason) => {
                return Err(ExactError::Inconclusive {
                    infeasible_below: lo.checked_sub(1).map(|i| candidates[i].clone()),
                    feasible_at: candidates[hi].clone(),
                    reason,
                })
            }
        };
        probes.push(Probe {
            heat: h.clone(),
            feasible,
            explored: result.explored,
        });
    }
    Ok(OptimalHeat {
        heat: candidates[lo].clone(),
        witness: best,
        predecessor: lo.checked_sub(1).map(|i| candidates[i].clone()),
        probes,
    })
}
