//! Operational semantics: single steps, transition systems, bisimulation,
//! traces and Graphviz output. Interleavings follow the halting policy.

mod bisim;
mod dot;
mod lts;
mod sos;
mod traces;

pub use bisim::{bisimilar, bounded_bisimilar, BisimResult, Formula, Side, Verdict};
pub use dot::export_dot;
pub use lts::{build_lts, Dest, Lts};
pub use sos::{sos_step, SosError, Target, Transition, UNFOLD_LIMIT};
pub use traces::{enumerate_traces, Trace, TraceStatus};
