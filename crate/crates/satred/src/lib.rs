//! MAX-3SAT encoded as a deadline scheduling instance with frequencies in {3, 6, 9, 12}.
//! A threshold of `k` satisfied clauses is reachable exactly when the compiled instance is
//! schedulable, and schedules convert back and forth with assignments.

pub mod cnf;
pub mod compile;
pub mod gadgets;
pub mod local;
pub mod phase;
pub mod slots;
pub mod synth;

pub use cnf::{formula_suite, max3sat_oracle, parse_dimacs, random_formula, CnfFormula, Literal};
pub use compile::{compile, gap_factor, gap_instance, load_artifact, ReductionArtifact};
pub use local::{gadget_local_check, LemmaKind, LemmaVerdict};
pub use slots::SlotColor;
pub use synth::{extract_assignment, synthesize_schedule};
