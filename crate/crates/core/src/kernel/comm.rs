//! The communication function.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::action::Action;

/// Communication function over a declared alphabet.
///
/// Entries are keyed by unordered pairs, so the table is symmetric by
/// construction. Missing pairs communicate to `delta`. A result of `None`
/// stands for `delta` throughout this module.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommTable {
    alphabet: BTreeSet<Action>,
    pairs: BTreeMap<(Action, Action), Option<Action>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaViolation {
    /// An entry mentions an action outside the alphabet.
    Undeclared(Action),
    /// `cr(d)` may not communicate with anything.
    RequestOperand { a: Action, b: Action },
    /// `cr(d)` may not be the result of a communication.
    RequestResult { a: Action, b: Action, result: Action },
    /// `gamma(gamma(a,b),c) != gamma(a,gamma(b,c))`.
    NotAssociative {
        a: Option<Action>,
        b: Option<Action>,
        c: Option<Action>,
        left: Option<Action>,
        right: Option<Action>,
    },
}

fn show(a: &Option<Action>) -> String {
    a.as_ref().map_or_else(|| "delta".to_string(), |a| a.to_string())
}

impl fmt::Display for GammaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaViolation::Undeclared(a) => write!(f, "action {a} is not declared"),
            GammaViolation::RequestOperand { a, b } => {
                write!(f, "gamma({a}, {b}) must be delta: creation requests do not communicate")
            }
            GammaViolation::RequestResult { a, b, result } => {
                write!(f, "gamma({a}, {b}) = {result} is a creation request")
            }
            GammaViolation::NotAssociative {
                a,
                b,
                c,
                left,
                right,
            } => write!(
                f,
                "not associative: gamma(gamma({}, {}), {}) = {} but gamma({}, gamma({}, {})) = {}",
                show(a),
                show(b),
                show(c),
                show(left),
                show(a),
                show(b),
                show(c),
                show(right)
            ),
        }
    }
}

fn key(a: Action, b: Action) -> (Action, Action) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CommTable {
    pub fn new<I: IntoIterator<Item = Action>>(alphabet: I) -> Self {
        CommTable {
            alphabet: alphabet.into_iter().collect(),
            pairs: BTreeMap::new(),
        }
    }

    pub fn declare(&mut self, a: Action) {
        self.alphabet.insert(a);
    }

    /// Sets `gamma(a, b) = gamma(b, a) = result`.
    pub fn insert(&mut self, a: Action, b: Action, result: Option<Action>) {
        self.pairs.insert(key(a, b), result);
    }

    pub fn alphabet(&self) -> &BTreeSet<Action> {
        &self.alphabet
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Action, &Action, Option<&Action>)> {
        self.pairs.iter().map(|((a, b), r)| (a, b, r.as_ref()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `gamma(a, b)`, with `None` as `delta` on either side of the arrow.
    pub fn apply(&self, a: Option<&Action>, b: Option<&Action>) -> Option<Action> {
        let (a, b) = (a?, b?);
        if a.is_request() || b.is_request() {
            return None;
        }
        self.pairs
            .get(&key(a.clone(), b.clone()))
            .cloned()
            .flatten()
    }

    /// Checks every table invariant and lists each violation found.
    pub fn validate(&self) -> Result<(), Vec<GammaViolation>> {
        let mut out = Vec::new();
        for ((a, b), r) in &self.pairs {
            for x in [Some(a), Some(b), r.as_ref()].into_iter().flatten() {
                let declared = self.alphabet.contains(x);
                if !declared && !out.contains(&GammaViolation::Undeclared(x.clone())) {
                    out.push(GammaViolation::Undeclared(x.clone()));
                }
            }
            if (a.is_request() || b.is_request()) && r.is_some() {
                out.push(GammaViolation::RequestOperand {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
            if let Some(res) = r {
                if res.is_request() {
                    out.push(GammaViolation::RequestResult {
                        a: a.clone(),
                        b: b.clone(),
                        result: res.clone(),
                    });
                }
            }
        }

        let mut universe: Vec<Option<Action>> = vec![None];
        let mut seen = BTreeSet::new();
        let mentioned = self
            .pairs
            .iter()
            .flat_map(|((a, b), r)| [Some(a), Some(b), r.as_ref()])
            .flatten();
        for x in self.alphabet.iter().chain(mentioned) {
            if seen.insert(x.clone()) {
                universe.push(Some(x.clone()));
            }
        }
        // Only entries with a non-delta result can break associativity, so
        // the raw lookup (without the cr short-cut) is what gets checked.
        let raw = |x: &Option<Action>, y: &Option<Action>| -> Option<Action> {
            match (x, y) {
                (Some(x), Some(y)) => self.pairs.get(&key(x.clone(), y.clone())).cloned().flatten(),
                _ => None,
            }
        };
        for a in &universe {
            for b in &universe {
                for c in &universe {
                    let left = raw(&raw(a, b), c);
                    let right = raw(a, &raw(b, c));
                    if left != right {
                        out.push(GammaViolation::NotAssociative {
                            a: a.clone(),
                            b: b.clone(),
                            c: c.clone(),
                            left,
                            right,
                        });
                    }
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(n: &str) -> Action {
        Action::plain(n)
    }

    fn abc() -> CommTable {
        let mut ct = CommTable::new([act("a"), act("b"), act("c")]);
        ct.insert(act("a"), act("b"), Some(act("c")));
        ct
    }

    #[test]
    fn lookup_and_defaults() {
        let ct = abc();
        assert_eq!(ct.apply(Some(&act("a")), Some(&act("b"))), Some(act("c")));
        assert_eq!(ct.apply(Some(&act("b")), Some(&act("a"))), Some(act("c")));
        assert_eq!(ct.apply(None, Some(&act("a"))), None);
        assert_eq!(ct.apply(Some(&act("a")), Some(&act("a"))), None);
        assert_eq!(ct.apply(Some(&Action::request("d")), Some(&act("a"))), None);
    }

    #[test]
    fn request_entries_are_ignored_on_lookup() {
        let mut ct = abc();
        ct.declare(Action::request("d"));
        ct.insert(Action::request("d"), act("a"), Some(act("b")));
        assert_eq!(ct.apply(Some(&Action::request("d")), Some(&act("a"))), None);
        assert!(ct
            .validate()
            .unwrap_err()
            .contains(&GammaViolation::RequestOperand {
                a: act("a"),
                b: Action::request("d")
            }));
    }

    #[test]
    fn single_entry_table_is_valid() {
        assert_eq!(abc().validate(), Ok(()));
    }

    #[test]
    fn request_result_rejected() {
        let mut ct = CommTable::new([act("a"), act("b"), Action::request("d")]);
        ct.insert(act("a"), act("b"), Some(Action::request("d")));
        let errs = ct.validate().unwrap_err();
        assert!(errs
            .iter()
            .any(|e| matches!(e, GammaViolation::RequestResult { .. })));
    }

    #[test]
    fn undeclared_result_rejected() {
        let mut ct = CommTable::new([act("a"), act("b")]);
        ct.insert(act("a"), act("b"), Some(act("c")));
        assert!(ct
            .validate()
            .unwrap_err()
            .contains(&GammaViolation::Undeclared(act("c"))));
    }
}
