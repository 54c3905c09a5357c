use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::lts::{build_lts, Dest, Lts};
use super::sos::SosError;
use crate::context::Context;
use crate::kernel::{Action, Term};

/// A Hennessy-Milner formula that holds for one root and not the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    /// Successful termination right after the enclosing step.
    Tick,
    Not(Box<Formula>),
    And(Vec<Formula>),
    Diamond(Action, Box<Formula>),
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::Tick => f.write_str("\u{2713}"),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::And(gs) => {
                f.write_str("(")?;
                for (k, g) in gs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{g}")?;
                }
                f.write_str(")")
            }
            Formula::Diamond(a, g) => write!(f, "<{a}>{g}"),
        }
    }
}

/// Which root satisfies a distinguishing formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Bisimilar,
    NotBisimilar {
        /// Refinement round in which the roots were separated.
        round: usize,
        side: Side,
        formula: Formula,
    },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Bisimilar)
    }
}

/// A verdict, and whether it was reached on truncated systems (in which
/// case it is only indicative).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimResult {
    pub verdict: Verdict,
    pub truncated: bool,
}

impl fmt::Display for BisimResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.truncated {
            f.write_str("unknown (state space truncated); on the explored part: ")?;
        }
        match &self.verdict {
            Verdict::Bisimilar => f.write_str("bisimilar"),
            Verdict::NotBisimilar {
                round,
                side,
                formula,
            } => {
                let side = match side {
                    Side::Left => "first",
                    Side::Right => "second",
                };
                write!(
                    f,
                    "not bisimilar (separated in round {round}; only the {side} term satisfies {formula})"
                )
            }
        }
    }
}

/// The disjoint union of two systems; node `n` of the union is the shared
/// termination sink.
struct Union {
    succ: Vec<Vec<(Action, usize)>>,
    tick: usize,
}

impl Union {
    fn new(l1: &Lts, l2: &Lts) -> Union {
        let off = l1.states.len();
        let tick = off + l2.states.len();
        let mut succ = vec![Vec::new(); tick + 1];
        for (l, base) in [(l1, 0), (l2, off)] {
            for (p, a, d) in &l.transitions {
                let q = match d {
                    Dest::Tick => tick,
                    Dest::State(q) => base + q,
                };
                succ[base + p].push((a.clone(), q));
            }
        }
        Union { succ, tick }
    }

    /// Block numbers per round; round 0 separates only the sink.
    fn refine(&self, max_rounds: usize) -> Vec<Vec<usize>> {
        let n = self.succ.len();
        let mut first = vec![0; n];
        first[self.tick] = 1;
        let mut rounds = vec![first];
        let mut count = 2;
        while rounds.len() <= max_rounds {
            let prev = rounds.last().unwrap();
            let mut ids: HashMap<(usize, BTreeSet<(&Action, usize)>), usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|p| {
                    let sig = self.succ[p].iter().map(|(a, q)| (a, prev[*q])).collect();
                    let fresh = ids.len();
                    *ids.entry((prev[p], sig)).or_insert(fresh)
                })
                .collect();
            let stable = ids.len() == count;
            count = ids.len();
            rounds.push(next);
            if stable {
                break;
            }
        }
        rounds
    }

    /// A formula true at `p` and false at `q`, which are in different
    /// blocks of round `r`.
    fn distinguish(&self, rounds: &[Vec<usize>], r: usize, p: usize, q: usize) -> Formula {
        if p == self.tick {
            return Formula::Tick;
        }
        if q == self.tick {
            return Formula::Not(Box::new(Formula::Tick));
        }
        if rounds[r - 1][p] != rounds[r - 1][q] {
            return self.distinguish(rounds, r - 1, p, q);
        }
        let prev = &rounds[r - 1];
        let moves = |s: usize| -> BTreeSet<(&Action, usize)> {
            self.succ[s].iter().map(|(a, t)| (a, prev[*t])).collect()
        };
        let (mp, mq) = (moves(p), moves(q));
        if let Some(&(a, blk)) = mp.difference(&mq).next() {
            let p1 = self.succ[p]
                .iter()
                .find(|(b, t)| b == a && prev[*t] == blk)
                .unwrap()
                .1;
            let parts: Vec<Formula> = self.succ[q]
                .iter()
                .filter(|(b, _)| b == a)
                .map(|&(_, q1)| self.distinguish(rounds, r - 1, p1, q1))
                .collect();
            let inner = match parts.len() {
                0 if p1 == self.tick => Formula::Tick,
                0 => Formula::True,
                1 => parts.into_iter().next().unwrap(),
                _ => Formula::And(parts),
            };
            return Formula::Diamond(a.clone(), Box::new(inner));
        }
        Formula::Not(Box::new(self.distinguish(rounds, r, q, p)))
    }
}

fn compare(l1: &Lts, l2: &Lts, max_rounds: usize) -> Verdict {
    let u = Union::new(l1, l2);
    let rounds = u.refine(max_rounds);
    let (p, q) = (Lts::ROOT, l1.states.len() + Lts::ROOT);
    match rounds.iter().position(|b| b[p] != b[q]) {
        None => Verdict::Bisimilar,
        Some(round) => {
            let formula = u.distinguish(&rounds, round, p, q);
            let (side, formula) = match formula {
                Formula::Not(g) => (Side::Right, *g),
                g => (Side::Left, g),
            };
            Verdict::NotBisimilar {
                round,
                side,
                formula,
            }
        }
    }
}

/// Strong bisimilarity of two closed terms.
pub fn bisimilar(
    ctx: &Context,
    t1: &Term,
    t2: &Term,
    max_states: usize,
) -> Result<BisimResult, SosError> {
    let l1 = build_lts(ctx, t1, max_states, usize::MAX)?;
    let l2 = build_lts(ctx, t2, max_states, usize::MAX)?;
    Ok(BisimResult {
        verdict: compare(&l1, &l2, usize::MAX),
        truncated: l1.is_truncated() || l2.is_truncated(),
    })
}

/// Bisimilarity up to `depth` steps: the roots cannot be told apart by a
/// formula of modal depth at most `depth`.
pub fn bounded_bisimilar(
    ctx: &Context,
    t1: &Term,
    t2: &Term,
    depth: usize,
    max_states: usize,
) -> Result<BisimResult, SosError> {
    let l1 = build_lts(ctx, t1, max_states, depth)?;
    let l2 = build_lts(ctx, t2, max_states, depth)?;
    let full = |l: &Lts| l.truncated.iter().all(|&s| depth_of(l, s) >= depth);
    Ok(BisimResult {
        verdict: compare(&l1, &l2, depth),
        truncated: !(full(&l1) && full(&l2)),
    })
}

fn depth_of(l: &Lts, s: usize) -> usize {
    let mut depth = vec![usize::MAX; l.states.len()];
    depth[Lts::ROOT] = 0;
    let mut queue = std::collections::VecDeque::from([Lts::ROOT]);
    while let Some(p) = queue.pop_front() {
        for (_, d) in l.successors(p) {
            if let Dest::State(q) = d {
                if depth[q] == usize::MAX {
                    depth[q] = depth[p] + 1;
                    queue.push_back(q);
                }
            }
        }
    }
    depth[s]
}
