//! From an assignment to a schedule of the compiled instance, and back.

use polysched_core::model::{verify_dps, PeriodicSchedule, Violation};
use thiserror::Error;

use crate::compile::ReductionArtifact;
use crate::gadgets::{EdgeRole, Wire};
use crate::phase::{phases_from_schedule, schedule_from_phases, PhaseError, PhaseProblem};
use crate::slots::{phase_color, SlotColor};

/// lcm of the gadget periods 6, 12 and 18.
pub const SYNTHESIS_PERIOD: u64 = 36;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("assignment has {got} values, formula has {expected} variables")]
    WrongLength { expected: usize, got: usize },
    #[error("assignment satisfies {satisfied} clauses, below the threshold {k}")]
    TooFewSatisfied { satisfied: usize, k: usize },
    #[error("no phase assignment matches the planned colours")]
    NoSchedule,
}

/// Truth value of every wire when exactly the clauses in `chosen` drive blue outputs.
pub fn wire_values(wires: &[Wire], chosen: &[bool]) -> Vec<bool> {
    let mut values: Vec<bool> = Vec::with_capacity(wires.len());
    for w in wires {
        let v = match *w {
            Wire::Clause(j) => chosen[j],
            Wire::Or(a, b) => values[a] || values[b],
            Wire::And(a, b) => values[a] && values[b],
        };
        values.push(v);
    }
    values
}

/// The first `k` satisfied clauses, in index order.
pub fn chosen_clauses(artifact: &ReductionArtifact, assignment: &[bool]) -> Vec<bool> {
    let f = &artifact.formula;
    let mut left = f.threshold();
    (0..f.num_clauses())
        .map(|j| {
            let pick = left > 0 && f.clause_satisfied(j, assignment);
            left -= usize::from(pick);
            pick
        })
        .collect()
}

/// Planned colour of every edge; `None` for edges left to the search.
pub fn planned_colors(artifact: &ReductionArtifact, assignment: &[bool]) -> Vec<Option<SlotColor>> {
    let mut padded = assignment.to_vec();
    padded.resize(artifact.variables.len(), false);
    let wires = wire_values(&artifact.wires, &chosen_clauses(artifact, assignment));
    artifact
        .roles
        .iter()
        .map(|role| match *role {
            EdgeRole::Constant(c) => Some(c),
            EdgeRole::Literal(lit) if lit.eval(&padded) => Some(SlotColor::Red),
            EdgeRole::Literal(_) => Some(SlotColor::Blue),
            EdgeRole::Wire(w) if wires[w] => Some(SlotColor::Blue),
            EdgeRole::Wire(_) => Some(SlotColor::Green),
            EdgeRole::Internal => None,
        })
        .collect()
}

pub fn synthesize_schedule(
    artifact: &ReductionArtifact,
    assignment: &[bool],
) -> Result<PeriodicSchedule, SynthesisError> {
    let f = &artifact.formula;
    if assignment.len() != f.num_vars() {
        return Err(SynthesisError::WrongLength {
            expected: f.num_vars(),
            got: assignment.len(),
        });
    }
    let satisfied = f.satisfied_count(assignment);
    if satisfied < f.threshold() {
        return Err(SynthesisError::TooFewSatisfied {
            satisfied,
            k: f.threshold(),
        });
    }
    let mut problem = PhaseProblem::new(&artifact.dps);
    for (e, color) in planned_colors(artifact, assignment).into_iter().enumerate() {
        if let Some(c) = color {
            problem.pin(e, c);
        }
    }
    let phases = problem.solve().ok_or(SynthesisError::NoSchedule)?;
    Ok(schedule_from_phases(&phases, artifact.dps.freq(), SYNTHESIS_PERIOD))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractionError {
    #[error("schedule is not valid for the instance: {0}")]
    Invalid(#[from] Violation),
    #[error(transparent)]
    Phases(#[from] PhaseError),
    #[error("internal inconsistency: the clock edges fit no rotation or reflection of the slots")]
    ClockMisaligned,
    #[error("internal inconsistency: edge {edge} should be {expected} but is {found}")]
    NotSlotRespecting {
        edge: usize,
        expected: SlotColor,
        found: String,
    },
}

/// Day map `t -> sign * t + shift`, chosen so the clock's edges land in their own slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alignment {
    pub reflect: bool,
    pub shift: u64,
}

impl Alignment {
    pub fn apply(self, phase: u64, freq: u64) -> u64 {
        let p = if self.reflect { (freq - phase % freq) % freq } else { phase % freq };
        (p + self.shift) % freq
    }
}

pub fn align(artifact: &ReductionArtifact, phases: &[u64]) -> Option<Alignment> {
    let c = artifact.clock;
    let freq = artifact.dps.freq();
    let wanted = [
        (c.red, SlotColor::Red),
        (c.blue, SlotColor::Blue),
        (c.green, SlotColor::Green),
        (c.purple, SlotColor::Purple),
    ];
    [false, true]
        .into_iter()
        .flat_map(|reflect| (0..6).map(move |shift| Alignment { reflect, shift }))
        .find(|a| {
            wanted
                .iter()
                .all(|&(e, color)| phase_color(a.apply(phases[e], freq[e]), freq[e]) == Some(color))
        })
}

/// Reads `x_i = true` iff the variable's positive output sits in red slots.
pub fn extract_assignment(
    artifact: &ReductionArtifact,
    schedule: &PeriodicSchedule,
) -> Result<Vec<bool>, ExtractionError> {
    verify_dps(&artifact.dps, schedule)?;
    let phases = phases_from_schedule(&artifact.dps, schedule)?;
    let alignment = align(artifact, &phases).ok_or(ExtractionError::ClockMisaligned)?;
    let freq = artifact.dps.freq();
    let color_of = |e: usize| phase_color(alignment.apply(phases[e], freq[e]), freq[e]);
    for (edge, role) in artifact.roles.iter().enumerate() {
        if let EdgeRole::Constant(expected) = *role {
            let found = color_of(edge);
            if found != Some(expected) {
                return Err(ExtractionError::NotSlotRespecting {
                    edge,
                    expected,
                    found: crate::slots::describe(found),
                });
            }
        }
    }
    artifact.variables[..artifact.formula.num_vars()]
        .iter()
        .map(|v| match color_of(v.positive) {
            Some(SlotColor::Red) => Ok(true),
            Some(SlotColor::Blue) => Ok(false),
            other => Err(ExtractionError::NotSlotRespecting {
                edge: v.positive,
                expected: SlotColor::Red,
                found: crate::slots::describe(other),
            }),
        })
        .collect()
}
