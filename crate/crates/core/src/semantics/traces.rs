use std::fmt;

use super::sos::{sos_step, SosError, Target};
use crate::context::Context;
use crate::kernel::{Action, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceStatus {
    Terminated,
    Deadlocked,
    /// Stopped at the length bound.
    Cut,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub actions: Vec<Action>,
    pub status: TraceStatus,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.actions.iter().map(Action::to_string).collect();
        let status = match self.status {
            TraceStatus::Terminated => "terminated",
            TraceStatus::Deadlocked => "deadlocked",
            TraceStatus::Cut => "cut",
        };
        if words.is_empty() {
            write!(f, "<empty> [{status}]")
        } else {
            write!(f, "{} [{status}]", words.join(" "))
        }
    }
}

/// Maximal runs of `t` in lexicographic order, at most `max_traces` of
/// them and none longer than `max_len`.
pub fn enumerate_traces(
    ctx: &Context,
    t: &Term,
    max_len: usize,
    max_traces: usize,
) -> Result<Vec<Trace>, SosError> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    walk(ctx, t, max_len, max_traces, &mut prefix, &mut out)?;
    Ok(out)
}

fn walk(
    ctx: &Context,
    t: &Term,
    max_len: usize,
    max_traces: usize,
    prefix: &mut Vec<Action>,
    out: &mut Vec<Trace>,
) -> Result<(), SosError> {
    let steps = sos_step(ctx, t)?;
    let mut emit = |prefix: &[Action], status| {
        out.push(Trace {
            actions: prefix.to_vec(),
            status,
        })
    };
    if steps.is_empty() {
        emit(prefix, TraceStatus::Deadlocked);
        return Ok(());
    }
    if prefix.len() == max_len {
        emit(prefix, TraceStatus::Cut);
        return Ok(());
    }
    for (a, target) in steps {
        if out.len() >= max_traces {
            break;
        }
        prefix.push(a);
        match target {
            Target::Tick => out.push(Trace {
                actions: prefix.clone(),
                status: TraceStatus::Terminated,
            }),
            Target::Term(u) => walk(ctx, &u, max_len, max_traces, prefix, out)?,
        }
        prefix.pop();
    }
    Ok(())
}
