//! Ratio tables: run schedulers over a list of instances and compare each heat
//! against a lower bound.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use polysched_core::bounds::{best_bound, bound, trivial_bound, BoundConfig, BoundMethod, BoundReport};
use polysched_core::coloring::round_robin_schedule;
use polysched_core::exact::{ops_optimal_heat, ExactLimits};
use polysched_core::layering::layered_schedule;
use polysched_core::model::{heat, Heat, OpsInstance};
use polysched_core::rational::{format_rational, int, lg, to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Coloring,
    Layering,
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Coloring, Algorithm::Layering, Algorithm::Exact];
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Coloring => "coloring",
            Algorithm::Layering => "layering",
            Algorithm::Exact => "exact",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// A lower bound to report against: one method, or the best of all that fit the caps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundChoice {
    Method(BoundMethod),
    Best,
}

impl fmt::Display for BoundChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundChoice::Method(m) => m.fmt(f),
            BoundChoice::Best => f.write_str("best"),
        }
    }
}

impl FromStr for BoundChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "best" {
            Ok(BoundChoice::Best)
        } else {
            s.parse().map(BoundChoice::Method)
        }
    }
}

impl BoundChoice {
    /// Bounds that exceed a cap are skipped rather than failing the run.
    pub fn evaluate(self, instance: &OpsInstance, config: BoundConfig) -> Option<BoundReport> {
        match self {
            BoundChoice::Best => Some(best_bound(instance, config)),
            BoundChoice::Method(m) => bound(instance, m, config).ok(),
        }
    }
}

/// A named pass/fail check attached to a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub instance: String,
    pub algorithm: Algorithm,
    /// `None` when the exact search ran out of budget.
    pub heat: Option<Heat>,
    pub bound: Option<BoundReport>,
    /// `heat / bound`, when both are finite and the bound is positive.
    pub ratio: Option<Rational>,
    pub wall_time: Duration,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Copy)]
#[derive(Default)]
pub struct SuiteConfig {
    pub bounds: BoundConfig,
    pub exact: ExactLimits,
}


fn guarantee_check(instance: &OpsInstance, algorithm: Algorithm, h: &Rational, config: SuiteConfig) -> Option<Check> {
    let delta = instance.graph().max_degree();
    if delta == 0 {
        return None;
    }
    match algorithm {
        Algorithm::Coloring => {
            let d = int(delta as i64);
            let spread = (&d + int(1)) / &d * instance.max_growth() / instance.min_growth();
            let factor = spread.min(d + int(1));
            Some(Check {
                name: "coloring-guarantee",
                holds: *h <= factor * trivial_bound(instance).value,
            })
        }
        Algorithm::Layering => {
            let lb = best_bound(instance, config.bounds).value;
            Some(Check {
                name: "layering-guarantee",
                holds: to_f64(h) <= 3.0 * lg(delta as f64 + 1.0) * to_f64(&lb) * (1.0 + 1e-12),
            })
        }
        Algorithm::Exact => None,
    }
}

pub fn run_one(
    id: &str,
    instance: &OpsInstance,
    algorithm: Algorithm,
    choice: BoundChoice,
    config: SuiteConfig,
) -> RunReport {
    let start = Instant::now();
    let heat_value = match algorithm {
        Algorithm::Coloring => Some(heat(instance, &round_robin_schedule(instance))),
        Algorithm::Layering => Some(layered_schedule(instance).heat),
        Algorithm::Exact => ops_optimal_heat(instance, config.exact)
            .ok()
            .map(|opt| Heat::Finite(opt.heat)),
    };
    let wall_time = start.elapsed();
    let bound = choice.evaluate(instance, config.bounds);
    let finite = heat_value.as_ref().and_then(Heat::finite);
    let ratio = match (finite, &bound) {
        (Some(h), Some(b)) if b.value > int(0) => Some(h / &b.value),
        _ => None,
    };
    let mut checks = Vec::new();
    if let (Some(h), Some(b)) = (finite, &bound) {
        checks.push(Check {
            name: "bound<=heat",
            holds: b.value <= *h,
        });
    }
    if let Some(h) = finite {
        checks.extend(guarantee_check(instance, algorithm, h, config));
    }
    RunReport {
        instance: id.to_string(),
        algorithm,
        heat: heat_value,
        bound,
        ratio,
        wall_time,
        checks,
    }
}

/// One report per (instance, algorithm) pair, in input order. Pairs run on scoped threads.
pub fn run_suite(
    instances: &[(String, OpsInstance)],
    algorithms: &[Algorithm],
    choice: BoundChoice,
    config: SuiteConfig,
) -> Vec<RunReport> {
    let jobs: Vec<(&String, &OpsInstance, Algorithm)> = instances
        .iter()
        .flat_map(|(id, inst)| algorithms.iter().map(move |&a| (id, inst, a)))
        .collect();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len().max(1));
    let mut slots: Vec<Option<RunReport>> = vec![None; jobs.len()];
    std::thread::scope(|scope| {
        let chunk = jobs.len().div_ceil(workers).max(1);
        for (job_chunk, slot_chunk) in jobs.chunks(chunk).zip(slots.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (&(id, inst, a), slot) in job_chunk.iter().zip(slot_chunk) {
                    *slot = Some(run_one(id, inst, a, choice, config));
                }
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every job ran")).collect()
}

const COLUMNS: [&str; 8] = ["instance", "algorithm", "heat", "bound", "method", "ratio", "ms", "checks"];

fn row(r: &RunReport) -> [String; 8] {
    let heat = r.heat.as_ref().map_or_else(|| "inconclusive".to_string(), Heat::to_string);
    let (value, method) = r.bound.as_ref().map_or_else(
        || ("-".to_string(), "-".to_string()),
        |b| (format_rational(&b.value), b.method.clone()),
    );
    let ratio = r.ratio.as_ref().map_or_else(|| "-".to_string(), format_rational);
    let checks = if r.checks.is_empty() {
        "-".to_string()
    } else {
        r.checks
            .iter()
            .map(|c| format!("{}={}", c.name, if c.holds { "ok" } else { "FAIL" }))
            .collect::<Vec<_>>()
            .join(";")
    };
    [
        r.instance.clone(),
        r.algorithm.to_string(),
        heat,
        value,
        method,
        ratio,
        r.wall_time.as_millis().to_string(),
        checks,
    ]
}

/// Emitters leave out wall time when `timing` is false so that equal seeds give equal bytes.
pub fn emit_csv(reports: &[RunReport], timing: bool) -> String {
    let keep = |i: usize| timing || COLUMNS[i] != "ms";
    let mut out = String::new();
    let header: Vec<&str> = (0..COLUMNS.len()).filter(|&i| keep(i)).map(|i| COLUMNS[i]).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for r in reports {
        let cells = row(r);
        let kept: Vec<&str> = (0..cells.len()).filter(|&i| keep(i)).map(|i| cells[i].as_str()).collect();
        out.push_str(&kept.join(","));
        out.push('\n');
    }
    out
}

pub fn emit_text(reports: &[RunReport], timing: bool) -> String {
    let keep: Vec<usize> = (0..COLUMNS.len()).filter(|&i| timing || COLUMNS[i] != "ms").collect();
    let rows: Vec<[String; 8]> = reports.iter().map(row).collect();
    let widths: Vec<usize> = keep
        .iter()
        .map(|&i| rows.iter().map(|r| r[i].len()).chain([COLUMNS[i].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(keep.iter().map(|&i| COLUMNS[i]).collect());
    for r in &rows {
        line(keep.iter().map(|&i| r[i].as_str()).collect());
    }
    out
}
