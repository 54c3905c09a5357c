use super::{History, StateLiteral, Strategy, StrategyError};
use crate::kernel::Action;

/// Longest-waiting process first, ties to the lowest index.
///
/// The control state holds one wait counter per position, written
/// `w:<c1>,...,<cn>`; `init` stands for all counters zero. Every step
/// resets the mover's counter and increments the others. A `cr(d)` step
/// appends a zero counter for the process that is about to be created.
///
/// Counters are re-aligned to the current process count before use: when
/// there is one counter too many, the process that moved last has
/// terminated and its counter is dropped; missing counters are zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct Aging;

impl Aging {
    fn decode(&self, s: &StateLiteral) -> Result<Vec<u64>, StrategyError> {
        let bad = || StrategyError::BadState {
            strategy: self.name().into(),
            state: s.to_string(),
        };
        if s.is_init() {
            return Ok(Vec::new());
        }
        let body = s.as_str().strip_prefix("w:").ok_or_else(bad)?;
        body.split(',')
            .map(|c| c.parse::<u64>().map_err(|_| bad()))
            .collect()
    }

    fn encode(counters: &[u64]) -> StateLiteral {
        if counters.iter().all(|&c| c == 0) {
            return StateLiteral::init();
        }
        let body: Vec<String> = counters.iter().map(u64::to_string).collect();
        StateLiteral::new(&format!("w:{}", body.join(",")))
    }

    fn align(mut counters: Vec<u64>, n: usize, h: &History) -> Vec<u64> {
        if counters.len() > n {
            if let Some((j, _)) = h.last() {
                if j >= 1 && j <= counters.len() {
                    counters.remove(j - 1);
                }
            }
        }
        counters.resize(n, 0);
        counters
    }
}

impl Strategy for Aging {
    fn name(&self) -> &str {
        "aging"
    }

    fn canonical_state(&self, raw: &StateLiteral) -> Result<StateLiteral, StrategyError> {
        Ok(Self::encode(&self.decode(raw)?))
    }

    fn sched(&self, n: usize, h: &History, s: &StateLiteral) -> Result<usize, StrategyError> {
        let counters = Self::align(self.decode(s)?, n, h);
        let mut best = 0;
        for (k, &c) in counters.iter().enumerate() {
            if c > counters[best] {
                best = k;
            }
        }
        Ok(best + 1)
    }

    fn update(
        &self,
        n: usize,
        h: &History,
        s: &StateLiteral,
        i: usize,
        a: Option<&Action>,
    ) -> Result<StateLiteral, StrategyError> {
        let mut counters = Self::align(self.decode(s)?, n, h);
        for (k, c) in counters.iter_mut().enumerate() {
            *c = if k + 1 == i { 0 } else { *c + 1 };
        }
        if a.is_some_and(Action::is_request) {
            counters.push(0);
        }
        Ok(Self::encode(&counters))
    }

    fn history_window(&self) -> Option<usize> {
        Some(1)
    }
}
