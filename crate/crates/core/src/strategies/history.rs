use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// An interleaving history: the `k`th pair `(i, n)` says that process `i`
/// took the `k`th step and that `n` processes remained afterwards.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct History(Arc<[(usize, usize)]>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HistoryError {
    #[error("entry {index}: ({i},{n}) needs positive components")]
    NotPositive { index: usize, i: usize, n: usize },
    #[error("entry {index}: first process index {i} exceeds count {n}")]
    FirstOutOfRange { index: usize, i: usize, n: usize },
    #[error("entry {index}: process index {j} exceeds previous count {prev_n}")]
    IndexOutOfRange { index: usize, j: usize, prev_n: usize },
    #[error("entry {index}: count {m} not within one of previous count {prev_n}")]
    CountJump { index: usize, m: usize, prev_n: usize },
}

impl History {
    pub fn empty() -> Self {
        History::default()
    }

    /// Checks the sequence against the inductive rules for histories.
    pub fn validate(entries: &[(usize, usize)]) -> Result<History, HistoryError> {
        for (index, &(i, n)) in entries.iter().enumerate() {
            if i == 0 || n == 0 {
                return Err(HistoryError::NotPositive { index, i, n });
            }
            if index == 0 {
                if i > n {
                    return Err(HistoryError::FirstOutOfRange { index, i, n });
                }
                continue;
            }
            let prev_n = entries[index - 1].1;
            if i > prev_n {
                return Err(HistoryError::IndexOutOfRange {
                    index,
                    j: i,
                    prev_n,
                });
            }
            if n + 1 < prev_n || n > prev_n + 1 {
                return Err(HistoryError::CountJump {
                    index,
                    m: n,
                    prev_n,
                });
            }
        }
        Ok(History(entries.into()))
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<(usize, usize)> {
        self.0.last().copied()
    }

    /// `self ++ <(i, n)>`.
    pub fn append(&self, i: usize, n: usize) -> History {
        let mut v = self.0.to_vec();
        v.push((i, n));
        History(v.into())
    }

    /// Keeps only the last `k` entries.
    pub fn suffix(&self, k: usize) -> History {
        let start = self.0.len().saturating_sub(k);
        History(self.0[start..].into())
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("@[")?;
        for (i, n) in self.0.iter() {
            write!(f, "({i},{n})")?;
        }
        f.write_str("]")
    }
}

/// A control state in its textual form; `init` is the initial state of
/// every strategy.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateLiteral(Arc<str>);

impl StateLiteral {
    pub const INIT: &'static str = "init";

    pub fn init() -> Self {
        StateLiteral(Self::INIT.into())
    }

    pub fn new(raw: &str) -> Self {
        StateLiteral(raw.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_init(&self) -> bool {
        &*self.0 == Self::INIT
    }
}

impl fmt::Display for StateLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_valid() {
        assert!(History::validate(&[]).is_ok());
    }

    #[test]
    fn growth_and_shrink_by_one() {
        assert!(History::validate(&[(1, 2), (2, 2)]).is_ok());
        assert!(History::validate(&[(1, 2), (2, 3), (3, 2), (2, 1)]).is_ok());
    }

    #[test]
    fn jump_of_two_rejected() {
        assert_eq!(
            History::validate(&[(1, 2), (2, 4)]),
            Err(HistoryError::CountJump {
                index: 1,
                m: 4,
                prev_n: 2
            })
        );
    }

    #[test]
    fn first_entry_bounds() {
        assert!(matches!(
            History::validate(&[(3, 2)]),
            Err(HistoryError::FirstOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            History::validate(&[(0, 2)]),
            Err(HistoryError::NotPositive { index: 0, .. })
        ));
    }

    #[test]
    fn later_index_bounded_by_previous_count() {
        assert!(matches!(
            History::validate(&[(1, 2), (3, 3)]),
            Err(HistoryError::IndexOutOfRange { index: 1, .. })
        ));
    }

    #[test]
    fn display() {
        let h = History::validate(&[(1, 2), (2, 1)]).unwrap();
        assert_eq!(h.to_string(), "@[(1,2)(2,1)]");
        assert_eq!(h.suffix(1).entries(), &[(2, 1)]);
    }
}
