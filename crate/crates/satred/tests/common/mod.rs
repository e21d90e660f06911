#![allow(dead_code)]

use polysched_core::model::{verify_dps, DpsInstance, PeriodicSchedule};
use polysched_satred::cnf::CnfFormula;
use polysched_satred::phase::schedule_from_phases;

/// (x1 or x2) and !x1 and (x1 or !x2 or x3) and !x3, threshold 3.
pub fn fig2() -> CnfFormula {
    CnfFormula::from_codes(3, &[&[1, 2], &[-1], &[1, -2, 3], &[-3]], 3).unwrap()
}

/// Counts strictly periodic schedules by trying every phase vector and checking each day.
pub fn brute_force_phase_count(instance: &DpsInstance) -> u64 {
    let freq = instance.freq();
    let period = freq.iter().fold(1u64, |l, &f| num_lcm(l, f));
    let mut phases = vec![0u64; freq.len()];
    let mut count = 0;
    loop {
        let s = schedule_from_phases(&phases, freq, period);
        if verify_dps(instance, &s).is_ok() {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == phases.len() {
                return count;
            }
            phases[i] += 1;
            if phases[i] < freq[i] {
                break;
            }
            phases[i] = 0;
            i += 1;
        }
    }
}

fn num_lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// The same schedule read backwards in time.
pub fn reflected(s: &PeriodicSchedule) -> PeriodicSchedule {
    let p = s.period();
    PeriodicSchedule::new((0..p).map(|t| s.day((p - t) % p).to_vec()).collect()).unwrap()
}

/// Applies comparators to bits, true meaning blue; the left channel takes the OR.
pub fn run_network(network: &[(usize, usize)], bits: &mut [bool]) {
    for &(l, r) in network {
        let (a, b) = (bits[l], bits[r]);
        bits[l] = a || b;
        bits[r] = a && b;
    }
}
