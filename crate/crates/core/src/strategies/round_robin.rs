use super::{History, StateLiteral, Strategy, StrategyError};
use crate::kernel::Action;

/// Round-robin: the process after the one that moved last goes next.
///
/// The control state is trivial; only `init` is accepted. After a step by
/// process `j` the next turn goes to `(j mod n) + 1`, so the index wraps
/// back to `1` instead of reaching `0`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RoundRobin;

impl Strategy for RoundRobin {
    fn name(&self) -> &str {
        "round-robin"
    }

    fn canonical_state(&self, raw: &StateLiteral) -> Result<StateLiteral, StrategyError> {
        if raw.is_init() {
            Ok(raw.clone())
        } else {
            Err(StrategyError::BadState {
                strategy: self.name().into(),
                state: raw.to_string(),
            })
        }
    }

    fn sched(&self, n: usize, h: &History, s: &StateLiteral) -> Result<usize, StrategyError> {
        self.canonical_state(s)?;
        Ok(match h.last() {
            None => 1,
            Some((j, _)) => (j % n) + 1,
        })
    }

    fn update(
        &self,
        _n: usize,
        _h: &History,
        s: &StateLiteral,
        _i: usize,
        _a: Option<&Action>,
    ) -> Result<StateLiteral, StrategyError> {
        self.canonical_state(s)
    }

    fn history_window(&self) -> Option<usize> {
        Some(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(entries: &[(usize, usize)]) -> History {
        History::validate(entries).unwrap()
    }

    #[test]
    fn starts_with_first() {
        assert_eq!(RoundRobin.sched(2, &History::empty(), &StateLiteral::init()), Ok(1));
    }

    #[test]
    fn wraps_instead_of_zero() {
        assert_eq!(RoundRobin.sched(2, &h(&[(1, 2)]), &StateLiteral::init()), Ok(2));
        assert_eq!(RoundRobin.sched(2, &h(&[(1, 2), (2, 2)]), &StateLiteral::init()), Ok(1));
    }

    #[test]
    fn single_process() {
        // (2,1) on its own is not a valid history; sched must still say 1.
        let probe = History::validate(&[(1, 2), (2, 1)]).unwrap().suffix(1);
        assert_eq!(RoundRobin.sched(1, &probe, &StateLiteral::init()), Ok(1));
    }

    #[test]
    fn state_is_left_alone() {
        let s = StateLiteral::init();
        assert_eq!(
            RoundRobin.update(3, &History::empty(), &s, 2, Some(&Action::plain("a"))),
            Ok(s)
        );
        assert!(RoundRobin
            .canonical_state(&StateLiteral::new("w:1"))
            .is_err());
    }
}
