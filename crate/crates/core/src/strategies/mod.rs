//! Interleaving strategies.
//!
//! A strategy is a deterministic scheduler: given the number of live
//! processes, the interleaving history and a control state it picks the
//! process that moves next, and it transforms its control state after
//! every step. Control states travel inside terms as [`StateLiteral`]s.

mod aging;
mod history;
mod round_robin;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::Action;

pub use aging::Aging;
pub use history::{History, HistoryError, StateLiteral};
pub use round_robin::RoundRobin;

/// What happens when the process whose turn it is cannot move.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Policy {
    /// The whole interleaving deadlocks at once.
    #[default]
    Halt,
    /// The others run to completion first, then the interleaving deadlocks.
    Defer,
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "halt" => Ok(Policy::Halt),
            "defer" => Ok(Policy::Defer),
            _ => Err(format!("unknown policy `{s}` (expected halt or defer)")),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Halt => "halt",
            Policy::Defer => "defer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("strategy {strategy}: cannot decode control state `{state}`")]
    BadState { strategy: String, state: String },
    #[error("strategy {strategy}: process count must be positive")]
    NoProcesses { strategy: String },
    #[error("strategy {strategy}: process index {i} outside 1..={n}")]
    IndexOutOfRange { strategy: String, i: usize, n: usize },
    #[error("strategy {strategy} returned {i}, outside 1..={n}")]
    BadSchedule { strategy: String, i: usize, n: usize },
    #[error("control state update on delta is only defined under the defer policy")]
    DeltaUnderHalt,
}

/// An interleaving strategy.
///
/// `update` receives `None` for `delta`, which only happens under the
/// defer policy. Both functions must be deterministic.
pub trait Strategy: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Parses a literal and returns its canonical spelling.
    fn canonical_state(&self, raw: &StateLiteral) -> Result<StateLiteral, StrategyError>;

    fn sched(&self, n: usize, h: &History, s: &StateLiteral) -> Result<usize, StrategyError>;

    fn update(
        &self,
        n: usize,
        h: &History,
        s: &StateLiteral,
        i: usize,
        a: Option<&Action>,
    ) -> Result<StateLiteral, StrategyError>;

    /// How many trailing history entries `sched` and `update` look at, if
    /// bounded. Interleavings that agree on that suffix, the control state
    /// and the operands behave identically.
    fn history_window(&self) -> Option<usize> {
        None
    }
}

/// Schedules through `strat`, checking the result lies in `1..=n`.
pub fn sched_dispatch(
    strat: &dyn Strategy,
    n: usize,
    h: &History,
    s: &StateLiteral,
) -> Result<usize, StrategyError> {
    if n == 0 {
        return Err(StrategyError::NoProcesses {
            strategy: strat.name().to_string(),
        });
    }
    let i = strat.sched(n, h, s)?;
    if i == 0 || i > n {
        return Err(StrategyError::BadSchedule {
            strategy: strat.name().to_string(),
            i,
            n,
        });
    }
    Ok(i)
}

pub fn update_dispatch(
    strat: &dyn Strategy,
    policy: Policy,
    n: usize,
    h: &History,
    s: &StateLiteral,
    i: usize,
    a: Option<&Action>,
) -> Result<StateLiteral, StrategyError> {
    if a.is_none() && policy == Policy::Halt {
        return Err(StrategyError::DeltaUnderHalt);
    }
    if i == 0 || i > n {
        return Err(StrategyError::IndexOutOfRange {
            strategy: strat.name().to_string(),
            i,
            n,
        });
    }
    strat.update(n, h, s, i, a)
}

/// Name-keyed collection of strategies.
#[derive(Clone, Debug)]
pub struct Registry {
    entries: BTreeMap<String, Arc<dyn Strategy>>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry {
            entries: BTreeMap::new(),
        };
        r.register(Arc::new(RoundRobin));
        r.register(Arc::new(Aging));
        r
    }
}

impl Registry {
    pub fn register(&mut self, s: Arc<dyn Strategy>) {
        self.entries.insert(s.name().to_string(), s);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn Strategy>> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct Broken;

    impl Strategy for Broken {
        fn name(&self) -> &str {
            "broken"
        }
        fn canonical_state(&self, raw: &StateLiteral) -> Result<StateLiteral, StrategyError> {
            Ok(raw.clone())
        }
        fn sched(&self, n: usize, _: &History, _: &StateLiteral) -> Result<usize, StrategyError> {
            Ok(n + 1)
        }
        fn update(
            &self,
            _: usize,
            _: &History,
            s: &StateLiteral,
            _: usize,
            _: Option<&Action>,
        ) -> Result<StateLiteral, StrategyError> {
            Ok(s.clone())
        }
    }

    #[test]
    fn dispatch_rejects_out_of_range_schedule() {
        let err = sched_dispatch(&Broken, 2, &History::empty(), &StateLiteral::init());
        assert!(matches!(err, Err(StrategyError::BadSchedule { i: 3, n: 2, .. })));
    }

    #[test]
    fn delta_update_needs_defer() {
        let s = StateLiteral::init();
        let h = History::empty();
        assert_eq!(
            update_dispatch(&RoundRobin, Policy::Halt, 2, &h, &s, 1, None),
            Err(StrategyError::DeltaUnderHalt)
        );
        assert_eq!(
            update_dispatch(&RoundRobin, Policy::Defer, 2, &h, &s, 1, None),
            Ok(s)
        );
    }

    #[test]
    fn registry_has_builtins() {
        let r = Registry::default();
        assert_eq!(r.names().collect::<Vec<_>>(), vec!["aging", "round-robin"]);
        assert!(r.get("fifo").is_none());
    }
}
