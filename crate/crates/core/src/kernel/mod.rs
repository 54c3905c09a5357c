//! Terms, the communication function, canonical forms and the
//! termination measure.

pub mod action;
pub mod comm;
pub mod term;
pub mod theta;

pub use action::{is_action_name, Action, Name};
pub use comm::{CommTable, GammaViolation};
pub use term::{canonicalize, ActionSet, Interleaving, Node, RecRef, Term};
pub use theta::{theta_eval, ThetaError};

/// The theory a recursive specification is written over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Theory {
    /// Plain ACP operators only.
    Acp,
    /// Uses strategic interleaving somewhere.
    SiAcp,
}
