use std::fmt;

use thiserror::Error;

use crate::context::{Context, ContextError};
use crate::kernel::{Action, Interleaving, Name, Node, Term};
use crate::recursion::unfold_rdp;
use crate::strategies::{sched_dispatch, update_dispatch, Policy, StrategyError};

/// Unfoldings allowed while deriving the steps of a single term.
pub const UNFOLD_LIMIT: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SosError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("free variable {0}")]
    OpenTerm(Name),
    #[error("no progress after {UNFOLD_LIMIT} unfoldings of {0}")]
    Unguarded(Term),
}

/// Where a transition leads.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    /// Successful termination.
    Tick,
    Term(Term),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Tick => f.write_str("\u{2713}"),
            Target::Term(t) => write!(f, "{t}"),
        }
    }
}

pub type Transition = (Action, Target);

/// All transitions of the closed term `t`, sorted.
pub fn sos_step(ctx: &Context, t: &Term) -> Result<Vec<Transition>, SosError> {
    let mut unfoldings = 0;
    let mut out = steps(ctx, t, &mut unfoldings)?;
    for (_, target) in &mut out {
        if let Target::Term(u) = target {
            *u = crate::kernel::canonicalize(u);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn residual(target: Target, wrap: impl Fn(Term) -> Term) -> Target {
    match target {
        Target::Tick => Target::Tick,
        Target::Term(t) => Target::Term(wrap(t)),
    }
}

fn steps(ctx: &Context, t: &Term, unfoldings: &mut usize) -> Result<Vec<Transition>, SosError> {
    let out = match t.node() {
        Node::Action(a) => vec![(a.clone(), Target::Tick)],
        Node::Delta => Vec::new(),
        Node::Alt(cs) => {
            let mut v = Vec::new();
            for c in cs {
                v.extend(steps(ctx, c, unfoldings)?);
            }
            v
        }
        Node::Seq(cs) => {
            let tail = Term::seq(cs[1..].iter().cloned());
            steps(ctx, &cs[0], unfoldings)?
                .into_iter()
                .map(|(a, tg)| {
                    let next = match tg {
                        Target::Tick => tail.clone(),
                        Target::Term(x) => Term::seq2(x, tail.clone()),
                    };
                    (a, Target::Term(next))
                })
                .collect()
        }
        Node::Par(x, y) => {
            let xs = steps(ctx, x, unfoldings)?;
            let ys = steps(ctx, y, unfoldings)?;
            let mut v = left(&xs, y);
            v.extend(ys.iter().map(|(a, tg)| {
                let next = match tg {
                    Target::Tick => x.clone(),
                    Target::Term(y1) => Term::par(x.clone(), y1.clone()),
                };
                (a.clone(), Target::Term(next))
            }));
            v.extend(sync(ctx, &xs, &ys));
            v
        }
        Node::LeftMerge(x, y) => left(&steps(ctx, x, unfoldings)?, y),
        Node::CommMerge(x, y) => {
            let xs = steps(ctx, x, unfoldings)?;
            let ys = steps(ctx, y, unfoldings)?;
            sync(ctx, &xs, &ys)
        }
        Node::Encap(h, x) => steps(ctx, x, unfoldings)?
            .into_iter()
            .filter(|(a, _)| !h.contains(a))
            .map(|(a, tg)| (a, residual(tg, |u| Term::encap(h.clone(), u))))
            .collect(),
        Node::Si(il) => {
            let i = sched_dispatch(ctx.strategy.as_ref(), il.arity(), &il.history, &il.state)?;
            interleaved(ctx, i, il, unfoldings)?
        }
        Node::Posm(i, il) => interleaved(ctx, *i, il, unfoldings)?,
        Node::Rec(r) => {
            *unfoldings += 1;
            if *unfoldings > UNFOLD_LIMIT {
                return Err(SosError::Unguarded(t.clone()));
            }
            let body = unfold_rdp(ctx.spec(&r.spec)?, &r.var)?;
            steps(ctx, &body, unfoldings)?
        }
        Node::Var(x) => return Err(SosError::OpenTerm(x.clone())),
    };
    Ok(out)
}

fn left(xs: &[Transition], y: &Term) -> Vec<Transition> {
    xs.iter()
        .map(|(a, tg)| {
            let next = match tg {
                Target::Tick => y.clone(),
                Target::Term(x1) => Term::par(x1.clone(), y.clone()),
            };
            (a.clone(), Target::Term(next))
        })
        .collect()
}

fn sync(ctx: &Context, xs: &[Transition], ys: &[Transition]) -> Vec<Transition> {
    let mut out = Vec::new();
    for (a, tx) in xs {
        for (b, ty) in ys {
            let Some(c) = ctx.comm.apply(Some(a), Some(b)) else {
                continue;
            };
            let tg = match (tx, ty) {
                (Target::Tick, Target::Tick) => Target::Tick,
                (Target::Tick, Target::Term(y1)) => Target::Term(y1.clone()),
                (Target::Term(x1), Target::Tick) => Target::Term(x1.clone()),
                (Target::Term(x1), Target::Term(y1)) => {
                    Target::Term(Term::par(x1.clone(), y1.clone()))
                }
            };
            out.push((c, tg));
        }
    }
    out
}

/// Steps of an interleaving in which process `i` moves. A creation request
/// `cr(d)` is observed as `rcr(d)`, the act of creating `φ(d)`.
fn interleaved(
    ctx: &Context,
    i: usize,
    il: &Interleaving,
    unfoldings: &mut usize,
) -> Result<Vec<Transition>, SosError> {
    let (n, h, s) = (il.arity(), &il.history, &il.state);
    let strat = ctx.strategy.as_ref();
    let mut out = Vec::new();
    for (a, tg) in steps(ctx, &il.procs[i - 1], unfoldings)? {
        let s1 = update_dispatch(strat, Policy::Halt, n, h, s, i, Some(&a))?;
        let mut procs = il.procs.clone();
        let step = match (a.requested().cloned(), tg) {
            (None, Target::Tick) if n == 1 => (a, Target::Tick),
            (None, Target::Tick) => {
                procs.remove(i - 1);
                (a, Target::Term(Term::si(h.append(i, n - 1), s1, procs)))
            }
            (None, Target::Term(x1)) => {
                procs[i - 1] = x1;
                (a, Target::Term(Term::si(h.append(i, n), s1, procs)))
            }
            (Some(d), Target::Tick) => {
                procs.remove(i - 1);
                procs.push(ctx.datum(&d)?.clone());
                let t = Term::si(h.append(i, n), s1, procs);
                (Action::CreateAct(d), Target::Term(t))
            }
            (Some(d), Target::Term(x1)) => {
                procs[i - 1] = x1;
                procs.push(ctx.datum(&d)?.clone());
                let t = Term::si(h.append(i, n + 1), s1, procs);
                (Action::CreateAct(d), Target::Term(t))
            }
        };
        out.push(step);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::CommTable;
    use crate::strategies::{History, RoundRobin, StateLiteral};
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn a() -> Term {
        Term::act("a")
    }
    fn b() -> Term {
        Term::act("b")
    }
    fn c() -> Term {
        Term::act("c")
    }

    fn ctx() -> Context {
        let mut comm = CommTable::new(["a", "b", "c"].map(Action::plain));
        comm.insert(Action::plain("a"), Action::plain("b"), Some(Action::plain("c")));
        let phi: BTreeMap<Name, Term> = [("d".into(), b())].into();
        Context::new(comm, phi, vec![], Arc::new(RoundRobin))
    }

    fn step(t: &Term) -> Vec<Transition> {
        sos_step(&ctx(), t).unwrap()
    }

    #[test]
    fn prefix_and_choice() {
        assert_eq!(step(&Term::seq2(a(), b())), vec![(Action::plain("a"), Target::Term(b()))]);
        assert_eq!(
            step(&Term::alt2(a(), b())),
            vec![
                (Action::plain("a"), Target::Tick),
                (Action::plain("b"), Target::Tick)
            ]
        );
        assert!(step(&Term::delta()).is_empty());
    }

    #[test]
    fn only_scheduled_process_moves() {
        let t = Term::si(History::empty(), StateLiteral::init(), vec![Term::seq2(a(), b()), c()]);
        let h = History::validate(&[(1, 2)]).unwrap();
        let next = Term::si(h, StateLiteral::init(), vec![b(), c()]);
        assert_eq!(step(&t), vec![(Action::plain("a"), Target::Term(next))]);
    }

    #[test]
    fn communication() {
        let got = step(&Term::par(a(), b()));
        assert!(got.contains(&(Action::plain("c"), Target::Tick)));
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn creation_is_observed_as_the_act() {
        let t = Term::si(History::empty(), StateLiteral::init(), vec![Term::action(Action::request("d"))]);
        let h = History::validate(&[(1, 1)]).unwrap();
        let next = Term::si(h, StateLiteral::init(), vec![b()]);
        assert_eq!(step(&t), vec![(Action::create("d"), Target::Term(next))]);
    }
}
