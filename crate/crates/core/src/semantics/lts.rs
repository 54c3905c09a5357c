use std::collections::{BTreeSet, HashMap, VecDeque};

use super::sos::{sos_step, SosError, Target};
use crate::context::Context;
use crate::kernel::{canonicalize, Action, Term};

/// Target of an LTS transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dest {
    Tick,
    State(usize),
}

/// A finite transition system over canonical terms. State `0` is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    pub states: Vec<Term>,
    /// Sorted by source state, then action, then target.
    pub transitions: Vec<(usize, Action, Dest)>,
    /// States whose outgoing transitions are incomplete.
    pub truncated: BTreeSet<usize>,
}

impl Lts {
    pub const ROOT: usize = 0;

    pub fn is_truncated(&self) -> bool {
        !self.truncated.is_empty()
    }

    pub fn successors(&self, s: usize) -> impl Iterator<Item = (&Action, Dest)> {
        let lo = self.transitions.partition_point(|(p, _, _)| *p < s);
        self.transitions[lo..]
            .iter()
            .take_while(move |(p, _, _)| *p == s)
            .map(|(_, a, d)| (a, *d))
    }
}

/// Breadth-first closure of the transition relation from `t`. A state is
/// marked truncated when it lies at `max_depth` or when one of its
/// successors would exceed `max_states`.
///
/// Terms with the same [`Context::behaviour_key`] share a state, which is
/// labelled by the first of them reached.
pub fn build_lts(
    ctx: &Context,
    t: &Term,
    max_states: usize,
    max_depth: usize,
) -> Result<Lts, SosError> {
    let root = canonicalize(t);
    let mut index: HashMap<Term, usize> = HashMap::from([(ctx.behaviour_key(&root), 0)]);
    let mut states = vec![root];
    let mut depth = vec![0usize];
    let mut transitions = Vec::new();
    let mut truncated = BTreeSet::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(p) = queue.pop_front() {
        let steps = sos_step(ctx, &states[p])?;
        if depth[p] >= max_depth {
            if !steps.is_empty() {
                truncated.insert(p);
            }
            continue;
        }
        for (a, target) in steps {
            let dest = match target {
                Target::Tick => Dest::Tick,
                Target::Term(u) => {
                    let key = ctx.behaviour_key(&u);
                    match index.get(&key) {
                        Some(&q) => Dest::State(q),
                        None if states.len() >= max_states => {
                            truncated.insert(p);
                            continue;
                        }
                        None => {
                            let q = states.len();
                            index.insert(key, q);
                            states.push(u);
                            depth.push(depth[p] + 1);
                            queue.push_back(q);
                            Dest::State(q)
                        }
                    }
                }
            };
            transitions.push((p, a, dest));
        }
    }
    transitions.sort();
    Ok(Lts {
        states,
        transitions,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{CommTable, Name};
    use crate::recursion::RecSpec;
    use crate::strategies::RoundRobin;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn ctx() -> Context {
        let comm = CommTable::new(["a", "b"].map(Action::plain));
        let p = RecSpec::new(
            "P",
            [(Name::from("X"), Term::seq2(Term::act("a"), Term::var("X")))],
        )
        .unwrap();
        Context::new(comm, BTreeMap::new(), vec![p], Arc::new(RoundRobin))
    }

    #[test]
    fn loop_is_one_state() {
        let l = build_lts(&ctx(), &Term::rec("X", "P"), 10, 10).unwrap();
        assert_eq!(l.states.len(), 1);
        assert_eq!(l.transitions, vec![(0, Action::plain("a"), Dest::State(0))]);
        assert!(!l.is_truncated());
    }

    #[test]
    fn sequence() {
        let l = build_lts(&ctx(), &Term::seq2(Term::act("a"), Term::act("b")), 10, 10).unwrap();
        assert_eq!(l.states.len(), 2);
        assert_eq!(
            l.transitions,
            vec![
                (0, Action::plain("a"), Dest::State(1)),
                (1, Action::plain("b"), Dest::Tick)
            ]
        );
        assert_eq!(l.successors(1).count(), 1);
    }

    #[test]
    fn depth_bound_truncates() {
        let t = Term::seq([Term::act("a"), Term::act("b"), Term::act("a")]);
        let l = build_lts(&ctx(), &t, 10, 1).unwrap();
        assert_eq!(l.states.len(), 2);
        assert_eq!(l.truncated, BTreeSet::from([1]));
        let l = build_lts(&ctx(), &t, 2, 10).unwrap();
        assert_eq!(l.truncated, BTreeSet::from([1]));
    }
}
