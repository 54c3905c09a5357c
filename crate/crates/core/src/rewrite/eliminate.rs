use super::{normalize, RewriteError, RuleSet};
use crate::context::Context;
use crate::kernel::{Node, Term, Theory};
use crate::recursion::{linearize, reduce_spec, RecSpec};

/// Result of eliminating every operator other than `+` and `.`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub term: Term,
    /// Specifications introduced for the recursion constants in `term`.
    pub specs: Vec<RecSpec>,
}

/// Only actions, `delta`, `+`, `.` and constants of ACP specifications.
fn acp_basic(ctx: &Context, t: &Term) -> bool {
    !t.any(&|u| match u.node() {
        Node::Action(_) | Node::Delta | Node::Alt(_) | Node::Seq(_) => false,
        Node::Rec(r) => ctx.theory(&r.spec) != Some(Theory::Acp),
        _ => true,
    })
}

/// Rewrites the closed term `t` to an equal term built from actions,
/// `delta`, `+`, `.` and recursion constants of ACP specifications.
///
/// Recursion constants that sit under other operators cannot be rewritten
/// away; the term is then turned into a fresh linear specification.
pub fn eliminate(
    ctx: &Context,
    rs: &RuleSet,
    t: &Term,
    step_budget: usize,
    equation_budget: usize,
) -> Result<Elimination, RewriteError> {
    if !t.has_recursion() || acp_basic(ctx, t) {
        let nf = normalize(ctx, rs, t, step_budget)?.term;
        if !acp_basic(ctx, &nf) {
            return Err(RewriteError::NotEliminated(nf));
        }
        return Ok(Elimination {
            term: nf,
            specs: Vec::new(),
        });
    }
    let reduction = match t.node() {
        Node::Rec(r) => reduce_spec(ctx, rs.policy, &r.spec, &r.var, equation_budget)?,
        _ => {
            let name = ctx.fresh_spec_name("E");
            linearize(ctx, rs.policy, &name, "Z", t.clone(), equation_budget)?
        }
    };
    Ok(Elimination {
        term: reduction.term(),
        specs: vec![reduction.spec],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Action, CommTable, Name};
    use crate::strategies::{History, Policy, RoundRobin, StateLiteral};
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn a() -> Term {
        Term::act("a")
    }
    fn b() -> Term {
        Term::act("b")
    }

    fn ctx() -> Context {
        let comm = CommTable::new(["a", "b"].map(Action::plain));
        let p = RecSpec::new("P", [(Name::from("X"), Term::seq2(a(), Term::var("X")))]).unwrap();
        let phi: BTreeMap<Name, Term> = [("d".into(), b())].into();
        Context::new(comm, phi, vec![p], Arc::new(RoundRobin))
    }

    fn elim(t: &Term) -> Elimination {
        eliminate(&ctx(), &RuleSet::siacp(Policy::Halt), t, 1000, 100).unwrap()
    }

    #[test]
    fn interleaving_disappears() {
        let t = Term::si(History::empty(), StateLiteral::init(), vec![a(), b()]);
        assert_eq!(elim(&t).term, Term::seq2(a(), b()));
    }

    #[test]
    fn acp_constants_kept() {
        let t = Term::seq2(b(), Term::rec("X", "P"));
        let e = elim(&t);
        assert_eq!(e.term, t);
        assert!(e.specs.is_empty());
    }

    #[test]
    fn merge_with_recursion_becomes_spec() {
        let t = Term::par(Term::rec("X", "P"), b());
        let e = elim(&t);
        assert_eq!(e.term, Term::rec("Z", "E"));
        let spec = &e.specs[0];
        assert_eq!(spec.local_theory(), Theory::Acp);
        assert!(spec.equations.values().all(|body| !body.any(&|u| matches!(
            u.node(),
            Node::Par(..) | Node::LeftMerge(..) | Node::CommMerge(..) | Node::Rec(_)
        ))));
    }
}
