//! Scheduling pairwise meetings in a polycule: every day is a matching of
//! relationships, and each relationship either has a deadline frequency or a
//! growth rate whose worst-case accumulated height (the heat) is minimised.

pub mod bounds;
pub mod coloring;
pub mod exact;
pub mod generate;
pub mod io;
pub mod layering;
pub mod lp;
pub mod matching;
pub mod model;
pub mod rational;

pub use model::{DpsInstance, Edge, Graph, Heat, OpsInstance, PeriodicSchedule, Recurrence};
pub use rational::Rational;
