//! One line per acceptance criterion, then a non-zero exit if any failed.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use polysched_core::bounds::{
    bamboo_bound, best_bound, poly_density, total_growth_bound, trivial_bound, BoundConfig, BoundMethod,
};
use polysched_core::coloring::{chromatic_index, round_robin_schedule};
use polysched_core::exact::{dps_feasible, ops_optimal_heat, ExactLimits, Verdict};
use polysched_core::generate::{
    cycle, figure1, figure1_schedule, pentagon, petersen, pinwheel_star, random_graph, random_ops, seeded_rng,
    tadpole, triangle_f2, unweighted_fig4,
};
use polysched_core::layering::layered_schedule;
use polysched_core::model::{dps_to_ops, heat, ops_to_dps, verify_dps, Heat, OpsInstance, PeriodicSchedule};
use polysched_core::rational::{int, ratio, to_f64, Rational};
use polysched_satred::cnf::{assignment_from_bits, formula_suite, max3sat_oracle};
use polysched_satred::compile::{compile, gap_factor};
use polysched_satred::local::{gadget_local_check, LemmaKind};
use polysched_satred::synth::{extract_assignment, synthesize_schedule};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Heat by walking two unrolled periods day by day: each edge's worst wait times its growth.
fn simulated_heat(instance: &OpsInstance, schedule: &PeriodicSchedule) -> Option<Rational> {
    let t = schedule.period();
    let mut worst = int(0);
    for (e, g) in instance.growth().iter().enumerate() {
        let days: Vec<usize> = (0..2 * t).filter(|&d| schedule.day(d % t).contains(&e)).collect();
        let first = *days.first()?;
        let mut gap = first + 1;
        for w in days.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap = gap.max(first + t - days.iter().rev().find(|&&d| d < t).copied()?);
        let h = g * int(gap as i64);
        if h > worst {
            worst = h;
        }
    }
    Some(worst)
}

fn criterion_1() -> Outcome {
    let inst = figure1();
    let bundled = figure1_schedule();
    let h = heat(&inst, &bundled);
    if h != Heat::Finite(int(160)) || simulated_heat(&inst, &bundled) != Some(int(160)) {
        return outcome(false, format!("bundled schedule heat {h}"));
    }
    let Ok(opt) = ops_optimal_heat(&inst, ExactLimits::default()) else {
        return outcome(false, "exact search inconclusive");
    };
    let witness_ok = ops_to_dps(&inst, &opt.heat).is_ok_and(|d| verify_dps(&d, &opt.witness).is_ok());
    let Some(pred) = opt.predecessor.clone() else {
        return outcome(false, "no predecessor candidate");
    };
    let pred_infeasible = ops_to_dps(&inst, &pred)
        .is_ok_and(|d| dps_feasible(&d, ExactLimits::default()).verdict == Verdict::Infeasible);
    outcome(
        opt.heat == int(160) && witness_ok && pred_infeasible,
        format!("h* = {}, predecessor {} infeasible: {pred_infeasible}", opt.heat, pred),
    )
}

fn criterion_2() -> Outcome {
    let limits = ExactLimits::default();
    let mut slowest = Duration::ZERO;
    let mut verdict = |inst| {
        let start = Instant::now();
        let v = dps_feasible(&inst, limits).verdict;
        slowest = slowest.max(start.elapsed());
        v
    };
    let triangle = verdict(triangle_f2()) == Verdict::Infeasible;
    let stars = (4..=12).all(|m| verdict(pinwheel_star(&[2, 3, m])) == Verdict::Infeasible);
    let feasible = matches!(verdict(pinwheel_star(&[2, 4, 4])), Verdict::Feasible(ref s) if verify_dps(&pinwheel_star(&[2, 4, 4]), s).is_ok());
    outcome(
        triangle && stars && feasible && slowest < Duration::from_secs(1),
        format!("triangle {triangle}, (2,3,4..12) {stars}, (2,4,4) {feasible}, slowest {slowest:?}"),
    )
}

fn criterion_3() -> Outcome {
    let inst = pentagon();
    let Verdict::Feasible(w) = dps_feasible(&inst, ExactLimits::default()).verdict else {
        return outcome(false, "pentagon not found feasible");
    };
    let cd = inst.graph().find_edge(2, 3).expect("C-D edge");
    let unrolled = w.unrolled(3);
    let classes: BTreeSet<usize> = (0..unrolled.period())
        .filter(|&t| unrolled.day(t).contains(&cd))
        .map(|t| t % 3)
        .collect();
    outcome(
        verify_dps(&inst, &w).is_ok() && classes.len() >= 2,
        format!("C-D residues mod 3: {classes:?}"),
    )
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    for k in 1..=3usize {
        for f in 2..=4u64 {
            let ops = dps_to_ops(&tadpole(k, f));
            let Ok(pd) = poly_density(&ops, BoundConfig::default().matching_cap) else {
                failures.push(format!("({k},{f}) lp failed"));
                continue;
            };
            let mass = ratio(7, 6) + ratio(k as i64, f as i64);
            let expected_mass = mass / int(1 + (k as i64 + 1) / 2);
            if pd.value != ratio(7, 6) {
                failures.push(format!("({k},{f}) density {}", pd.value));
            }
            if total_growth_bound(&ops).value != expected_mass {
                failures.push(format!("({k},{f}) mass"));
            }
            if pd.primal_objective != pd.dual_objective {
                failures.push(format!("({k},{f}) duality gap"));
            }
        }
    }
    outcome(failures.is_empty(), if failures.is_empty() { "9 tadpoles".into() } else { failures.join(", ") })
}

fn small_suite() -> Vec<(String, OpsInstance)> {
    let mut out: Vec<(String, OpsInstance)> = vec![
        ("figure1".into(), figure1()),
        ("unweighted-fig4".into(), unweighted_fig4()),
        ("pentagon".into(), dps_to_ops(&pentagon())),
        ("triangle-f2".into(), dps_to_ops(&triangle_f2())),
        ("c5".into(), OpsInstance::unweighted(cycle(5))),
    ];
    for k in 1..=3 {
        for f in 2..=4 {
            out.push((format!("tadpole({k},{f})"), dps_to_ops(&tadpole(k, f))));
        }
    }
    let choices = [int(1), int(2), int(3), int(4), int(6), ratio(1, 2)];
    let mut rng = seeded_rng(2024);
    let mut i = 0;
    while out.len() < 220 {
        let n = 3 + i % 5;
        let m = 2 + i % 9;
        out.push((format!("random-{i}"), random_ops(&mut rng, n, m, &choices)));
        i += 1;
    }
    out
}

fn criterion_5() -> Outcome {
    let suite = small_suite();
    let config = BoundConfig::default();
    let mut violations = Vec::new();
    let mut inconclusive = 0;
    for (id, inst) in &suite {
        assert!(inst.graph().num_edges() <= 10);
        let Ok(opt) = ops_optimal_heat(inst, ExactLimits::default()) else {
            inconclusive += 1;
            continue;
        };
        let h_star = &opt.heat;
        let mut bounds = vec![trivial_bound(inst), bamboo_bound(inst), total_growth_bound(inst), best_bound(inst, config)];
        bounds.extend(polysched_core::bounds::bound(inst, BoundMethod::PolyDensity, config));
        for b in &bounds {
            if b.value > *h_star {
                violations.push(format!("{id}: {} {} > {}", b.method, b.value, h_star));
            }
        }
        let delta = inst.graph().max_degree() as i64;
        if delta == 0 {
            continue;
        }
        let coloring = heat(inst, &round_robin_schedule(inst));
        let spread = (int(delta) + int(1)) / int(delta) * inst.max_growth() / inst.min_growth();
        let cap = spread.min(int(delta + 1));
        match coloring.finite() {
            Some(h) if *h <= cap * h_star => {}
            _ => violations.push(format!("{id}: coloring {coloring}")),
        }
        let layered = layered_schedule(inst).heat;
        let limit = 3.0 * ((delta + 1) as f64).log2();
        match layered.finite() {
            Some(h) if to_f64(&(h / h_star)) <= limit + 1e-12 => {}
            _ => violations.push(format!("{id}: layering {layered}")),
        }
    }
    outcome(
        violations.is_empty() && inconclusive == 0,
        format!("{} instances, {} violations, {inconclusive} inconclusive {}", suite.len(), violations.len(), violations.join("; ")),
    )
}

fn criterion_6() -> Outcome {
    let mut graphs = vec![cycle(5), petersen()];
    let mut rng = seeded_rng(6);
    let mut i = 0;
    while graphs.len() < 20 {
        graphs.push(random_graph(&mut rng, 4 + i % 5, 3 + i % 10));
        i += 1;
    }
    let mut mismatches = Vec::new();
    let mut class_two = 0;
    for (i, g) in graphs.iter().enumerate() {
        assert!(g.num_edges() <= 16);
        let ci = chromatic_index(g, 40);
        let exact = ops_optimal_heat(&OpsInstance::unweighted(g.clone()), ExactLimits::default());
        match exact {
            Ok(opt) if ci.exact && opt.heat == int(ci.value as i64) => {}
            Ok(opt) => mismatches.push(format!("graph {i}: h* {} vs chromatic index {}", opt.heat, ci.value)),
            Err(e) => mismatches.push(format!("graph {i}: {e}")),
        }
        if ci.value == g.max_degree() + 1 {
            class_two += 1;
        }
    }
    outcome(
        mismatches.is_empty() && class_two >= 1,
        format!("20 graphs, {class_two} with index Δ+1 {}", mismatches.join("; ")),
    )
}

/// Compiled instances with the schedule synthesised from each formula's best assignment.
type Synthesised = Vec<(OpsInstance, PeriodicSchedule)>;

fn criterion_7(keep: &mut Synthesised) -> Outcome {
    let suite = formula_suite(&mut seeded_rng(7), 50, 3, 4);
    let mut problems = Vec::new();
    let (mut synthesised, mut refused) = (0, 0);
    for (fi, base) in suite.iter().enumerate() {
        let best = max3sat_oracle(base).expect("three variables");
        for k in 0..=base.num_clauses() {
            let f = base.with_threshold(k).expect("k <= m");
            let artifact = compile(&f);
            if artifact.frequencies().iter().any(|q| ![3, 6, 9, 12].contains(q)) || artifact.max_frequency() != 12 {
                problems.push(format!("formula {fi} k={k}: frequencies {:?}", artifact.frequencies()));
            }
            if !artifact.density_violations().is_empty() {
                problems.push(format!("formula {fi} k={k}: density"));
            }
            let n = f.num_vars();
            let mut kept = false;
            for bits in 0..1u64 << n {
                let assignment = assignment_from_bits(bits, n);
                let result = synthesize_schedule(&artifact, &assignment);
                if best < k {
                    if result.is_ok() {
                        problems.push(format!("formula {fi} k={k}: accepted {bits:b}"));
                    }
                    refused += 1;
                    continue;
                }
                if f.satisfied_count(&assignment) < k {
                    continue;
                }
                let Ok(schedule) = result else {
                    problems.push(format!("formula {fi} k={k}: no schedule for {bits:b}"));
                    continue;
                };
                synthesised += 1;
                let valid = verify_dps(&artifact.dps, &schedule).is_ok();
                let back = extract_assignment(&artifact, &schedule);
                if !valid || !back.is_ok_and(|a| f.satisfied_count(&a) >= k) {
                    problems.push(format!("formula {fi} k={k}: round trip for {bits:b}"));
                }
                if !kept {
                    keep.push((dps_to_ops(&artifact.dps), schedule));
                    kept = true;
                }
            }
        }
    }
    outcome(
        problems.is_empty(),
        format!("{} formulas, {synthesised} schedules, {refused} refusals {}", suite.len(), problems.join("; ")),
    )
}

fn criterion_8() -> Outcome {
    let failing: Vec<String> = LemmaKind::ALL
        .into_iter()
        .filter(|&k| !gadget_local_check(k).holds())
        .map(|k| k.to_string())
        .collect();
    outcome(failing.is_empty(), format!("12 kinds, failing: {failing:?}"))
}

fn criterion_9(kept: &Synthesised) -> Outcome {
    let hot = kept
        .iter()
        .filter(|(ops, s)| !matches!(heat(ops, s), Heat::Finite(ref h) if *h <= int(1)))
        .count();
    let identity = gap_factor(12) == ratio(13, 12) && (int(12) + int(1)) / int(12) == ratio(13, 12);
    outcome(
        hot == 0 && !kept.is_empty() && identity,
        format!("{} schedules, {hot} above heat 1, (F+1)/F = 13/12: {identity}", kept.len()),
    )
}

fn report(n: usize, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = run();
    let took = start.elapsed();
    let pass = o.passed && took < limit;
    println!(
        "criterion {n}: {} ({:.2?} of {:?}) {}",
        if pass { "PASS" } else { "FAIL" },
        took,
        limit,
        o.detail.trim_end()
    );
    pass
}

fn main() -> ExitCode {
    let min = |m: u64| Duration::from_secs(60 * m);
    let mut kept = Synthesised::new();
    let results = [
        report(1, min(5), criterion_1),
        report(2, min(1), criterion_2),
        report(3, Duration::from_secs(1), criterion_3),
        report(4, Duration::from_secs(10), criterion_4),
        report(5, min(10), criterion_5),
        report(6, min(2), criterion_6),
        report(7, min(15), || criterion_7(&mut kept)),
        report(8, min(10), criterion_8),
        report(9, min(1), || criterion_9(&kept)),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
