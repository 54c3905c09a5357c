//! Contraction of a single rule instance at the root of a term.

use std::fmt;

use super::{RewriteError, RuleSet};
use crate::context::Context;
use crate::kernel::{Action, Interleaving, Node, Term};
use crate::recursion::unfold_rdp;
use crate::strategies::{sched_dispatch, update_dispatch, Policy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    A4,
    A5,
    A7,
    CM1,
    CM2,
    CM3,
    CM4,
    CM5,
    CM6,
    CM7,
    CM8,
    CM9,
    CM10,
    CM11,
    CM12,
    D1,
    D2,
    D3,
    D4,
    SI1,
    SI2,
    SI2a,
    SI2b,
    SI3,
    SI4,
    SI5,
    SI6,
    SI7,
    SI8,
    /// Unfolds a recursion constant that sits where another rule needs to
    /// see its shape.
    Rdp,
}

impl Rule {
    pub fn is_interleaving(self) -> bool {
        matches!(
            self,
            Rule::SI1
                | Rule::SI2
                | Rule::SI2a
                | Rule::SI2b
                | Rule::SI3
                | Rule::SI4
                | Rule::SI5
                | Rule::SI6
                | Rule::SI7
                | Rule::SI8
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Rdp => f.write_str("RDP"),
            r => write!(f, "{r:?}"),
        }
    }
}

/// `Some(Some(a))` for an action, `Some(None)` for `delta`.
fn constant(t: &Term) -> Option<Option<&Action>> {
    match t.node() {
        Node::Action(a) => Some(Some(a)),
        Node::Delta => Some(None),
        _ => None,
    }
}

fn constant_term(c: Option<&Action>) -> Term {
    c.map_or_else(Term::delta, |a| Term::action(a.clone()))
}

fn gamma_term(ctx: &Context, a: Option<&Action>, b: Option<&Action>) -> Term {
    ctx.comm
        .apply(a, b)
        .map_or_else(Term::delta, Term::action)
}

/// First summand and the sum of the rest.
fn split(cs: &[Term]) -> (Term, Term) {
    (cs[0].clone(), Term::alt(cs[1..].iter().cloned()))
}

/// `(head, tail)` of a sequence with a constant head.
fn prefixed(t: &Term) -> Option<(Option<&Action>, Term)> {
    match t.node() {
        Node::Seq(cs) => Some((constant(&cs[0])?, Term::seq(cs[1..].iter().cloned()))),
        _ => None,
    }
}

fn replaced(procs: &[Term], i: usize, t: Term) -> Vec<Term> {
    let mut v = procs.to_vec();
    v[i - 1] = t;
    v
}

fn removed(procs: &[Term], i: usize) -> Vec<Term> {
    let mut v = procs.to_vec();
    v.remove(i - 1);
    v
}

/// Applies `rule` at the root of `t`, if it matches.
pub fn contract(
    ctx: &Context,
    rs: &RuleSet,
    rule: Rule,
    t: &Term,
) -> Result<Option<Term>, RewriteError> {
    use Node::*;
    let out = match (rule, t.node()) {
        // Sequences are flattened, so `(x + y) . z` and `delta . z` may sit
        // at any position but the last.
        (Rule::A4, Seq(cs)) => cs[..cs.len() - 1]
            .iter()
            .position(|c| matches!(c.node(), Alt(_)))
            .map(|k| {
                let Alt(xs) = cs[k].node() else { unreachable!() };
                let tail = Term::seq(cs[k + 1..].iter().cloned());
                let (x, y) = split(xs);
                let sum = Term::alt2(Term::seq2(x, tail.clone()), Term::seq2(y, tail));
                Term::seq(cs[..k].iter().cloned().chain([sum]))
            }),
        (Rule::A5, Seq(cs)) if cs.iter().any(|c| matches!(c.node(), Seq(_))) => {
            Some(Term::seq(cs.iter().cloned()))
        }
        (Rule::A7, Seq(cs)) => cs[..cs.len() - 1]
            .iter()
            .position(Term::is_delta)
            .map(|k| Term::seq(cs[..=k].iter().cloned())),

        (Rule::CM1, Par(x, y)) => Some(Term::alt([
            Term::left_merge(x.clone(), y.clone()),
            Term::left_merge(y.clone(), x.clone()),
            Term::comm_merge(x.clone(), y.clone()),
        ])),
        (Rule::CM2, LeftMerge(x, y)) => {
            constant(x).map(|_| Term::seq2(x.clone(), y.clone()))
        }
        (Rule::CM3, LeftMerge(x, y)) => prefixed(x)
            .map(|(a, rest)| Term::seq2(constant_term(a), Term::par(rest, y.clone()))),
        (Rule::CM4, LeftMerge(x, z)) => match x.node() {
            Alt(xs) => {
                let (x1, x2) = split(xs);
                Some(Term::alt2(
                    Term::left_merge(x1, z.clone()),
                    Term::left_merge(x2, z.clone()),
                ))
            }
            _ => None,
        },
        (Rule::CM5, CommMerge(x, y)) => match (prefixed(x), constant(y)) {
            (Some((a, rest)), Some(b)) => Some(Term::seq2(gamma_term(ctx, a, b), rest)),
            _ => None,
        },
        (Rule::CM6, CommMerge(x, y)) => match (constant(x), prefixed(y)) {
            (Some(a), Some((b, rest))) => Some(Term::seq2(gamma_term(ctx, a, b), rest)),
            _ => None,
        },
        (Rule::CM7, CommMerge(x, y)) => match (prefixed(x), prefixed(y)) {
            (Some((a, r1)), Some((b, r2))) => {
                Some(Term::seq2(gamma_term(ctx, a, b), Term::par(r1, r2)))
            }
            _ => None,
        },
        (Rule::CM8, CommMerge(x, z)) => match x.node() {
            Alt(xs) => {
                let (x1, x2) = split(xs);
                Some(Term::alt2(
                    Term::comm_merge(x1, z.clone()),
                    Term::comm_merge(x2, z.clone()),
                ))
            }
            _ => None,
        },
        (Rule::CM9, CommMerge(x, y)) => match y.node() {
            Alt(ys) => {
                let (y1, y2) = split(ys);
                Some(Term::alt2(
                    Term::comm_merge(x.clone(), y1),
                    Term::comm_merge(x.clone(), y2),
                ))
            }
            _ => None,
        },
        (Rule::CM10, CommMerge(x, _)) if x.is_delta() => Some(Term::delta()),
        (Rule::CM11, CommMerge(_, y)) if y.is_delta() => Some(Term::delta()),
        (Rule::CM12, CommMerge(x, y)) => match (constant(x), constant(y)) {
            (Some(a), Some(b)) => Some(gamma_term(ctx, a, b)),
            _ => None,
        },

        (Rule::D1, Encap(h, x)) => match constant(x) {
            Some(None) => Some(Term::delta()),
            Some(Some(a)) if !h.contains(a) => Some(x.clone()),
            _ => None,
        },
        (Rule::D2, Encap(h, x)) => match constant(x) {
            Some(Some(a)) if h.contains(a) => Some(Term::delta()),
            _ => None,
        },
        (Rule::D3, Encap(h, x)) => match x.node() {
            Alt(xs) => {
                let (x1, x2) = split(xs);
                Some(Term::alt2(
                    Term::encap(h.clone(), x1),
                    Term::encap(h.clone(), x2),
                ))
            }
            _ => None,
        },
        (Rule::D4, Encap(h, x)) => match x.node() {
            Seq(cs) => Some(Term::seq2(
                Term::encap(h.clone(), cs[0].clone()),
                Term::encap(h.clone(), Term::seq(cs[1..].iter().cloned())),
            )),
            _ => None,
        },

        (Rule::SI1, Si(il)) => {
            let i = sched_dispatch(ctx.strategy.as_ref(), il.arity(), &il.history, &il.state)?;
            Some(Term::posm(i, il.history.clone(), il.state.clone(), il.procs.clone()))
        }
        (r, Posm(i, il)) if r.is_interleaving() => positional(ctx, rs.policy, r, *i, il)?,

        (Rule::Rdp, _) => unfold_inspected(ctx, t)?,
        _ => None,
    };
    Ok(out)
}

fn positional(
    ctx: &Context,
    policy: Policy,
    rule: Rule,
    i: usize,
    il: &Interleaving,
) -> Result<Option<Term>, RewriteError> {
    let n = il.arity();
    let (h, s, procs) = (&il.history, &il.state, &il.procs[..]);
    let strat = ctx.strategy.as_ref();
    let moving = &procs[i - 1];
    let update = |count: usize, a: Option<&Action>| update_dispatch(strat, policy, count, h, s, i, a);
    let ordinary = |a: &Action| !a.is_request();

    let out = match (rule, moving.node()) {
        (Rule::SI2, Node::Delta) if policy == Policy::Halt => Some(Term::delta()),
        (Rule::SI2a, Node::Delta) if policy == Policy::Defer && n == 1 => Some(Term::delta()),
        (Rule::SI2b, Node::Delta) if policy == Policy::Defer && n > 1 => Some(Term::seq2(
            Term::si(h.append(i, n - 1), update(n, None)?, removed(procs, i)),
            Term::delta(),
        )),
        (Rule::SI3, Node::Action(a)) if n == 1 && ordinary(a) => Some(moving.clone()),
        (Rule::SI4, Node::Action(a)) if n > 1 && ordinary(a) => Some(Term::seq2(
            moving.clone(),
            Term::si(h.append(i, n - 1), update(n, Some(a))?, removed(procs, i)),
        )),
        (Rule::SI5, Node::Seq(cs)) => {
            let rest = Term::seq(cs[1..].iter().cloned());
            match cs[0].node() {
                Node::Action(a) if ordinary(a) => Some(Term::seq2(
                    cs[0].clone(),
                    Term::si(h.append(i, n), update(n, Some(a))?, replaced(procs, i, rest)),
                )),
                // delta . x' as the moving process: the continuation is never
                // reached, so the control state is carried over unchanged.
                Node::Delta if policy == Policy::Halt => Some(Term::seq2(
                    Term::delta(),
                    Term::si(h.append(i, n), s.clone(), replaced(procs, i, rest)),
                )),
                _ => None,
            }
        }
        (Rule::SI6, Node::Action(a)) => match a.requested() {
            Some(d) => {
                let mut next = removed(procs, i);
                next.push(ctx.datum(d)?.clone());
                Some(Term::seq2(
                    Term::action(Action::CreateAct(d.clone())),
                    Term::si(h.append(i, n), update(n, Some(a))?, next),
                ))
            }
            None => None,
        },
        (Rule::SI7, Node::Seq(cs)) => match cs[0].as_action().and_then(|a| a.requested().map(|d| (a, d))) {
            Some((a, d)) => {
                let mut next = replaced(procs, i, Term::seq(cs[1..].iter().cloned()));
                next.push(ctx.datum(d)?.clone());
                Some(Term::seq2(
                    Term::action(Action::CreateAct(d.clone())),
                    Term::si(h.append(i, n + 1), update(n, Some(a))?, next),
                ))
            }
            None => None,
        },
        (Rule::SI8, Node::Alt(xs)) => {
            let (x1, x2) = split(xs);
            Some(Term::alt2(
                Term::posm(i, h.clone(), s.clone(), replaced(procs, i, x1)),
                Term::posm(i, h.clone(), s.clone(), replaced(procs, i, x2)),
            ))
        }
        _ => None,
    };
    Ok(out)
}

/// Unfolds the first recursion constant found in a position whose shape
/// decides which rule applies.
fn unfold_inspected(ctx: &Context, t: &Term) -> Result<Option<Term>, RewriteError> {
    let inspected: Vec<usize> = match t.node() {
        Node::LeftMerge(..) | Node::Encap(..) => vec![0],
        Node::CommMerge(..) => vec![0, 1],
        Node::Posm(i, _) => vec![i - 1],
        _ => Vec::new(),
    };
    let kids = t.children();
    for k in inspected {
        if let Node::Rec(r) = kids[k].node() {
            let body = unfold_rdp(ctx.spec(&r.spec)?, &r.var)?;
            return Ok(Some(t.with_child(k, body)));
        }
    }
    Ok(None)
}
