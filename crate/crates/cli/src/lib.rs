//! Command-line front end and experiment runner for polysched.

mod app;
pub mod report;

pub use app::{run, EXIT_CANT_CREATE, EXIT_INCONCLUSIVE, EXIT_INFEASIBLE, EXIT_NO_INPUT, EXIT_OK, EXIT_PARSE, EXIT_USAGE};
