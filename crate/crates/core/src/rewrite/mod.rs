//! The axioms as a rewrite system modulo associativity and commutativity
//! of `+`: single steps, normalization, head normal forms and elimination
//! of the parallel and interleaving operators.
//!
//! Terms are kept canonical between steps, so A1, A2, A3 and A6 never show
//! up as explicit steps. A5 is absorbed by the flattened representation of
//! sequential composition and only fires on hand-built terms.

mod eliminate;
mod hnf;
mod rules;

use thiserror::Error;

use crate::context::{Context, ContextError};
use crate::kernel::{Node, Term, ThetaError};
use crate::recursion::ReduceError;
use crate::strategies::{Policy, StrategyError};

pub use eliminate::{eliminate, Elimination};
pub use hnf::{head_normal_form, is_head_normal_form, summands, Summand};
pub use rules::{contract, Rule};

pub const DEFAULT_STEP_BUDGET: usize = 100_000;

/// Nesting depth at which normalization gives up.
pub const MAX_TERM_DEPTH: usize = 1_000;

#[derive(Debug, Clone, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("step budget exhausted after {steps} steps; last term: {last}")]
    BudgetExhausted { steps: usize, last: Term },
    #[error("term nesting exceeded depth {MAX_TERM_DEPTH} after {steps} steps")]
    TooDeep { steps: usize },
    #[error("unfolding budget exhausted while computing a head normal form of {0}")]
    HnfBudget(Term),
    #[error("variable {0} occurs unguarded")]
    Unguarded(crate::kernel::Name),
    #[error("normal form {0} still contains operators other than + and .")]
    NotEliminated(Term),
    #[error("measure increased at a {rule} step: {before} -> {after}")]
    MeasureIncrease {
        rule: Rule,
        before: Term,
        after: Term,
    },
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Reduce(Box<ReduceError>),
}

impl From<ReduceError> for RewriteError {
    fn from(e: ReduceError) -> Self {
        RewriteError::Reduce(Box::new(e))
    }
}

/// Which rules take part in rewriting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    pub policy: Policy,
    /// Tried in this order at each position.
    pub rules: Vec<Rule>,
    /// Allow lazy unfolding of recursion constants.
    pub unfold_recursion: bool,
}

impl RuleSet {
    pub fn acp() -> Self {
        use Rule::*;
        RuleSet {
            policy: Policy::Halt,
            rules: vec![
                A4, A5, A7, CM1, CM2, CM3, CM4, CM5, CM6, CM7, CM8, CM9, CM10, CM11, CM12, D1, D2,
                D3, D4,
            ],
            unfold_recursion: true,
        }
    }

    pub fn siacp(policy: Policy) -> Self {
        use Rule::*;
        let mut rs = RuleSet::acp();
        rs.policy = policy;
        rs.rules.push(SI1);
        match policy {
            Policy::Halt => rs.rules.push(SI2),
            Policy::Defer => rs.rules.extend([SI2a, SI2b]),
        }
        rs.rules.extend([SI3, SI4, SI5, SI6, SI7, SI8]);
        rs
    }

    pub fn has(&self, rule: Rule) -> bool {
        rule == Rule::Rdp && self.unfold_recursion || self.rules.contains(&rule)
    }
}

/// Where the next redex is looked for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RedexOrder {
    #[default]
    Innermost,
    Outermost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub term: Term,
    pub rule: Rule,
}

/// Tries each rule of `rs` at the root of `t`; recursion constants are
/// unfolded only when nothing else applies.
pub fn contract_root(ctx: &Context, rs: &RuleSet, t: &Term) -> Result<Option<Step>, RewriteError> {
    if matches!(
        t.node(),
        Node::Action(_) | Node::Delta | Node::Alt(_) | Node::Rec(_) | Node::Var(_)
    ) {
        return Ok(None);
    }
    for &rule in &rs.rules {
        if let Some(term) = contract(ctx, rs, rule, t)? {
            return Ok(Some(Step { term, rule }));
        }
    }
    if rs.unfold_recursion {
        if let Some(term) = contract(ctx, rs, Rule::Rdp, t)? {
            return Ok(Some(Step {
                term,
                rule: Rule::Rdp,
            }));
        }
    }
    Ok(None)
}

/// One rewrite step at the leftmost-innermost (or -outermost) redex.
/// `None` means `t` is a normal form.
pub fn rewrite_step(
    ctx: &Context,
    rs: &RuleSet,
    order: RedexOrder,
    t: &Term,
) -> Result<Option<Step>, RewriteError> {
    if order == RedexOrder::Outermost {
        if let Some(s) = contract_root(ctx, rs, t)? {
            return Ok(Some(s));
        }
    }
    for (k, child) in t.children().into_iter().enumerate() {
        if let Some(s) = rewrite_step(ctx, rs, order, child)? {
            return Ok(Some(Step {
                term: t.with_child(k, s.term),
                rule: s.rule,
            }));
        }
    }
    match order {
        RedexOrder::Innermost => contract_root(ctx, rs, t),
        RedexOrder::Outermost => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub term: Term,
    pub steps: usize,
}

/// Rewrites `t` until no rule applies.
pub fn normalize(
    ctx: &Context,
    rs: &RuleSet,
    t: &Term,
    step_budget: usize,
) -> Result<Normalized, RewriteError> {
    normalize_with(ctx, rs, RedexOrder::Innermost, t, step_budget, &mut |_, _| Ok(()))
}

/// Like [`normalize`], calling `observe(before, step)` after every step;
/// an error from the observer aborts normalization.
pub fn normalize_with(
    ctx: &Context,
    rs: &RuleSet,
    order: RedexOrder,
    t: &Term,
    step_budget: usize,
    observe: &mut dyn FnMut(&Term, &Step) -> Result<(), RewriteError>,
) -> Result<Normalized, RewriteError> {
    let mut cur = crate::kernel::canonicalize(t);
    let mut steps = 0;
    while let Some(step) = rewrite_step(ctx, rs, order, &cur)? {
        if steps == step_budget {
            return Err(RewriteError::BudgetExhausted { steps, last: cur });
        }
        observe(&cur, &step)?;
        cur = step.term;
        steps += 1;
        if cur.depth() > MAX_TERM_DEPTH {
            return Err(RewriteError::TooDeep { steps });
        }
    }
    Ok(Normalized { term: cur, steps })
}

/// Observer that fails on the first step whose measure does not decrease.
pub fn theta_check<'a>(
    ctx: &'a Context,
) -> impl FnMut(&Term, &Step) -> Result<(), RewriteError> + 'a {
    move |before, step| {
        let (b, a) = (ctx.theta(before)?, ctx.theta(&step.term)?);
        if a < b {
            Ok(())
        } else {
            Err(RewriteError::MeasureIncrease {
                rule: step.rule,
                before: before.clone(),
                after: step.term.clone(),
            })
        }
    }
}

/// True when some interleaved process performs `rcr(d)` itself; such
/// steps are treated as ordinary actions.
pub fn has_user_creation_act(t: &Term) -> bool {
    t.any(&|u| match u.node() {
        Node::Si(il) | Node::Posm(_, il) => il.procs.iter().any(|p| {
            p.any(&|v| matches!(v.as_action(), Some(crate::kernel::Action::CreateAct(_))))
        }),
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Action, CommTable, Name};
    use crate::recursion::RecSpec;
    use crate::strategies::{History, StateLiteral};
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
        let phi: BTreeMap<_, _> = [("d".into(), b())].into();
        Context::new(comm, phi, vec![], Arc::new(crate::strategies::RoundRobin))
    }

    fn si(procs: Vec<Term>) -> Term {
        Term::si(History::empty(), StateLiteral::init(), procs)
    }

    fn nf(t: &Term, policy: Policy) -> Term {
        normalize(&ctx(), &RuleSet::siacp(policy), t, 1000).unwrap().term
    }

    #[test]
    fn single_steps() {
        let rs = RuleSet::siacp(Policy::Halt);
        let step = |t: &Term| rewrite_step(&ctx(), &rs, RedexOrder::Innermost, t).unwrap();
        let s = step(&Term::seq2(Term::delta(), a())).unwrap();
        assert_eq!((s.term, s.rule), (Term::delta(), Rule::A7));
        let s = step(&Term::left_merge(a(), b())).unwrap();
        assert_eq!((s.term, s.rule), (Term::seq2(a(), b()), Rule::CM2));
        assert!(step(&a()).is_none());
    }

    #[test]
    fn merge_expands() {
        let t = Term::par(a(), b());
        let want = Term::alt([Term::seq2(a(), b()), Term::seq2(b(), a()), c()]);
        assert_eq!(nf(&t, Policy::Halt), want);
    }

    #[test]
    fn round_robin_sequence() {
        let t = si(vec![Term::seq2(a(), b()), c()]);
        assert_eq!(nf(&t, Policy::Halt), Term::seq([a(), c(), b()]));
    }

    #[test]
    fn deadlock_policies() {
        let t = si(vec![Term::delta(), a()]);
        assert_eq!(nf(&t, Policy::Halt), Term::delta());
        assert_eq!(nf(&t, Policy::Defer), Term::seq2(a(), Term::delta()));
    }

    #[test]
    fn creation() {
        let t = si(vec![Term::action(Action::request("d"))]);
        assert_eq!(
            nf(&t, Policy::Halt),
            Term::seq2(Term::action(Action::create("d")), b())
        );
    }

    #[test]
    fn encapsulation() {
        let h = Arc::new([Action::plain("a")].into_iter().collect());
        assert_eq!(nf(&Term::encap(h, Term::alt2(a(), b())), Policy::Halt), b());
    }

    #[test]
    fn runaway_nesting_is_reported() {
        let spec = RecSpec::new("Q", [(Name::from("X"), Term::seq2(Term::act("a"), Term::var("X")))]).unwrap();
        let ctx = Context::default().with_specs([spec]);
        let t = Term::par(Term::rec("X", "Q"), Term::act("a"));
        let rs = RuleSet::siacp(Policy::Halt);
        let e = std::thread::spawn(move || normalize(&ctx, &rs, &t, DEFAULT_STEP_BUDGET).unwrap_err())
            .join()
            .unwrap();
        assert!(matches!(e, RewriteError::BudgetExhausted { .. } | RewriteError::TooDeep { .. }));
    }

    #[test]
    fn budget_is_reported() {
        let t = Term::par(a(), b());
        let err = normalize(&ctx(), &RuleSet::acp(), &t, 2).unwrap_err();
        assert!(matches!(err, RewriteError::BudgetExhausted { steps: 2, .. }));
    }

    #[test]
    fn acp_rules_leave_interleaving_alone() {
        let t = si(vec![a(), b()]);
        assert_eq!(normalize(&ctx(), &RuleSet::acp(), &t, 10).unwrap().term, t);
    }

    #[test]
    fn user_creation_act_detected() {
        assert!(has_user_creation_act(&si(vec![Term::action(Action::create("d"))])));
        assert!(!has_user_creation_act(&Term::action(Action::create("d"))));
    }
}
