//! ACP with strategic interleaving.
//!
//! Terms are rewritten modulo associativity and commutativity of choice,
//! interleavings are resolved by pluggable deterministic strategies, and
//! the operational semantics gives transition systems that are compared
//! up to strong bisimilarity.

pub mod cli;
pub mod context;
pub mod kernel;
pub mod recursion;
pub mod rewrite;
pub mod semantics;
pub mod strategies;

pub use context::{Context, ContextError};
pub use kernel::{Action, Term};
