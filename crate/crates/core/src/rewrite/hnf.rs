//! Head normal forms `a1 . t1 + ... + b1 + ...`, derived by structural
//! induction on the term.

use super::RewriteError;
use crate::context::Context;
use crate::kernel::{canonicalize, Action, Node, Term};
use crate::recursion::unfold_rdp;
use crate::strategies::{sched_dispatch, update_dispatch, Policy};

/// One summand of a head normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Summand {
    /// `a . t`
    Prefix(Action, Term),
    /// `a`
    Last(Action),
}

impl Summand {
    pub fn action(&self) -> &Action {
        match self {
            Summand::Prefix(a, _) | Summand::Last(a) => a,
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Summand::Prefix(a, t) => Term::seq2(Term::action(a.clone()), t.clone()),
            Summand::Last(a) => Term::action(a.clone()),
        }
    }

    fn then(self, tail: &Term) -> Summand {
        match self {
            Summand::Last(a) => Summand::Prefix(a, tail.clone()),
            Summand::Prefix(a, t) => Summand::Prefix(a, Term::seq2(t, tail.clone())),
        }
    }
}

/// Summands of a head normal form of the closed term `t`. An empty list
/// stands for `delta`. Each recursion constant unfolded costs one unit of
/// `fuel`.
pub fn summands(
    ctx: &Context,
    policy: Policy,
    t: &Term,
    fuel: &mut usize,
) -> Result<Vec<Summand>, RewriteError> {
    let mut out = collect(ctx, policy, t, fuel)?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn collect(
    ctx: &Context,
    policy: Policy,
    t: &Term,
    fuel: &mut usize,
) -> Result<Vec<Summand>, RewriteError> {
    use Summand::*;
    let out = match t.node() {
        Node::Action(a) => vec![Last(a.clone())],
        Node::Delta => Vec::new(),
        Node::Alt(cs) => {
            let mut v = Vec::new();
            for c in cs {
                v.extend(collect(ctx, policy, c, fuel)?);
            }
            v
        }
        Node::Seq(cs) => {
            let tail = Term::seq(cs[1..].iter().cloned());
            collect(ctx, policy, &cs[0], fuel)?
                .into_iter()
                .map(|s| s.then(&tail))
                .collect()
        }
        Node::Par(x, y) => {
            let mut v = left_merge(ctx, policy, x, y, fuel)?;
            v.extend(left_merge(ctx, policy, y, x, fuel)?);
            v.extend(comm_merge(ctx, policy, x, y, fuel)?);
            v
        }
        Node::LeftMerge(x, y) => left_merge(ctx, policy, x, y, fuel)?,
        Node::CommMerge(x, y) => comm_merge(ctx, policy, x, y, fuel)?,
        Node::Encap(h, x) => collect(ctx, policy, x, fuel)?
            .into_iter()
            .filter(|s| !h.contains(s.action()))
            .map(|s| match s {
                Prefix(a, x) => Prefix(a, Term::encap(h.clone(), x)),
                last => last,
            })
            .collect(),
        Node::Si(il) => {
            let i = sched_dispatch(ctx.strategy.as_ref(), il.arity(), &il.history, &il.state)?;
            positional(ctx, policy, i, &il.history, &il.state, &il.procs, fuel)?
        }
        Node::Posm(i, il) => positional(ctx, policy, *i, &il.history, &il.state, &il.procs, fuel)?,
        Node::Rec(r) => {
            if *fuel == 0 {
                return Err(RewriteError::HnfBudget(t.clone()));
            }
            *fuel -= 1;
            let body = unfold_rdp(ctx.spec(&r.spec)?, &r.var)?;
            collect(ctx, policy, &body, fuel)?
        }
        Node::Var(x) => return Err(RewriteError::Unguarded(x.clone())),
    };
    Ok(out)
}

fn left_merge(
    ctx: &Context,
    policy: Policy,
    x: &Term,
    y: &Term,
    fuel: &mut usize,
) -> Result<Vec<Summand>, RewriteError> {
    Ok(collect(ctx, policy, x, fuel)?
        .into_iter()
        .map(|s| match s {
            Summand::Last(a) => Summand::Prefix(a, y.clone()),
            Summand::Prefix(a, x1) => Summand::Prefix(a, Term::par(x1, y.clone())),
        })
        .collect())
}

fn comm_merge(
    ctx: &Context,
    policy: Policy,
    x: &Term,
    y: &Term,
    fuel: &mut usize,
) -> Result<Vec<Summand>, RewriteError> {
    use Summand::*;
    let xs = collect(ctx, policy, x, fuel)?;
    let ys = collect(ctx, policy, y, fuel)?;
    let mut out = Vec::new();
    for s in &xs {
        for u in &ys {
            let Some(c) = ctx.comm.apply(Some(s.action()), Some(u.action())) else {
                continue;
            };
            out.push(match (s, u) {
                (Last(_), Last(_)) => Last(c),
                (Last(_), Prefix(_, y1)) => Prefix(c, y1.clone()),
                (Prefix(_, x1), Last(_)) => Prefix(c, x1.clone()),
                (Prefix(_, x1), Prefix(_, y1)) => Prefix(c, Term::par(x1.clone(), y1.clone())),
            });
        }
    }
    Ok(out)
}

fn positional(
    ctx: &Context,
    policy: Policy,
    i: usize,
    h: &crate::strategies::History,
    s: &crate::strategies::StateLiteral,
    procs: &[Term],
    fuel: &mut usize,
) -> Result<Vec<Summand>, RewriteError> {
    let n = procs.len();
    let strat = ctx.strategy.as_ref();
    let moving = collect(ctx, policy, &procs[i - 1], fuel)?;
    let others = || {
        let mut v = procs.to_vec();
        v.remove(i - 1);
        v
    };
    let with = |x: Term| {
        let mut v = procs.to_vec();
        v[i - 1] = x;
        v
    };

    if moving.is_empty() {
        return Ok(match policy {
            Policy::Defer if n > 1 => {
                let next = Term::si(
                    h.append(i, n - 1),
                    update_dispatch(strat, policy, n, h, s, i, None)?,
                    others(),
                );
                collect(ctx, policy, &next, fuel)?
                    .into_iter()
                    .map(|u| u.then(&Term::delta()))
                    .collect()
            }
            _ => Vec::new(),
        });
    }

    let mut out = Vec::new();
    for m in moving {
        let a = m.action().clone();
        let s1 = update_dispatch(strat, policy, n, h, s, i, Some(&a))?;
        out.push(match (a.requested().cloned(), m) {
            (None, Summand::Last(a)) if n == 1 => Summand::Last(a),
            (None, Summand::Last(a)) => Summand::Prefix(a, Term::si(h.append(i, n - 1), s1, others())),
            (None, Summand::Prefix(a, x1)) => {
                Summand::Prefix(a, Term::si(h.append(i, n), s1, with(x1)))
            }
            (Some(d), Summand::Last(_)) => {
                let mut v = others();
                v.push(ctx.datum(&d)?.clone());
                Summand::Prefix(Action::CreateAct(d), Term::si(h.append(i, n), s1, v))
            }
            (Some(d), Summand::Prefix(_, x1)) => {
                let mut v = with(x1);
                v.push(ctx.datum(&d)?.clone());
                Summand::Prefix(Action::CreateAct(d), Term::si(h.append(i, n + 1), s1, v))
            }
        });
    }
    Ok(out)
}

/// A head normal form of `t`; `depth_budget` bounds the number of
/// recursion constants unfolded on the way.
pub fn head_normal_form(
    ctx: &Context,
    policy: Policy,
    t: &Term,
    depth_budget: usize,
) -> Result<Term, RewriteError> {
    let mut fuel = depth_budget;
    let ss = summands(ctx, policy, &canonicalize(t), &mut fuel)?;
    Ok(Term::alt(ss.iter().map(Summand::to_term)))
}

/// `delta`, or a sum of actions and action-prefixed terms.
pub fn is_head_normal_form(t: &Term) -> bool {
    let summand = |u: &Term| match u.node() {
        Node::Action(_) => true,
        Node::Seq(cs) => cs[0].as_action().is_some(),
        _ => false,
    };
    match t.node() {
        Node::Delta => true,
        Node::Alt(cs) => cs.iter().all(summand),
        _ => summand(t),
    }
}
