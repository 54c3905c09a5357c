//! Guarded recursive specifications, unfolding, and the reduction of
//! specifications that use strategic interleaving to plain ACP ones.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::context::{Context, ContextError};
use crate::kernel::{Action, Name, Node, Term, Theory};
use crate::rewrite::{normalize, summands, RewriteError, RuleSet, Summand};
use crate::strategies::Policy;

/// A named system of equations `X = t_X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecSpec {
    pub name: Name,
    pub equations: BTreeMap<Name, Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("specification {0} has no equations")]
    Empty(Name),
    #[error("specification {spec}: equation for {equation} mentions undefined variable {var}")]
    UndefinedVar { spec: Name, equation: Name, var: Name },
}

impl RecSpec {
    pub fn new<I>(name: &str, equations: I) -> Result<RecSpec, SpecError>
    where
        I: IntoIterator<Item = (Name, Term)>,
    {
        let spec = RecSpec {
            name: name.into(),
            equations: equations.into_iter().collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), SpecError> {
        if self.equations.is_empty() {
            return Err(SpecError::Empty(self.name.clone()));
        }
        for (x, body) in &self.equations {
            let mut missing = None;
            body.for_each(&mut |t| {
                if let Node::Var(y) = t.node() {
                    if missing.is_none() && !self.equations.contains_key(y) {
                        missing = Some(y.clone());
                    }
                }
            });
            if let Some(var) = missing {
                return Err(SpecError::UndefinedVar {
                    spec: self.name.clone(),
                    equation: x.clone(),
                    var,
                });
            }
        }
        Ok(())
    }

    /// Acp unless some right-hand side interleaves strategically. References
    /// to other specifications are not followed; see [`Context::theory`].
    pub fn local_theory(&self) -> Theory {
        if self.equations.values().any(Term::has_interleaving) {
            Theory::SiAcp
        } else {
            Theory::Acp
        }
    }
}

impl fmt::Display for RecSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "spec {} {{", self.name)?;
        let n = self.equations.len();
        for (k, (x, t)) in self.equations.iter().enumerate() {
            let sep = if k + 1 < n { " ;" } else { "" };
            writeln!(f, "  {x} = {t}{sep}")?;
        }
        write!(f, "}}")
    }
}

/// `t_X` with every variable `Y` replaced by `<Y|spec>`.
pub fn unfold_rdp(spec: &RecSpec, x: &str) -> Result<Term, ContextError> {
    let body = spec
        .equations
        .get(x)
        .ok_or_else(|| ContextError::UnknownVar {
            spec: spec.name.clone(),
            var: x.into(),
        })?;
    Ok(body.substitute(&|y| Some(Term::rec(y, &spec.name))))
}

/// Every variable occurrence lies in a subterm `a . t'`.
pub fn syntactically_guarded(t: &Term) -> Result<(), Name> {
    match t.node() {
        Node::Var(x) => Err(x.clone()),
        Node::Seq(cs) => {
            for (k, c) in cs.iter().enumerate() {
                if k + 1 < cs.len() && c.as_action().is_some() {
                    return Ok(());
                }
                syntactically_guarded(c)?;
            }
            Ok(())
        }
        _ => t.children().into_iter().try_for_each(syntactically_guarded),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guardedness {
    Guarded,
    Unguarded { var: Name, body: Term },
    /// Not syntactically guarded, and rewriting did not settle it in time.
    BudgetExhausted { var: Name, body: Term },
}

/// Each right-hand side must be guarded as written or after rewriting.
pub fn check_guarded(ctx: &Context, spec: &RecSpec, rewrite_budget: usize) -> Guardedness {
    let rs = RuleSet::siacp(Policy::Halt);
    for (x, body) in &spec.equations {
        if syntactically_guarded(body).is_ok() {
            continue;
        }
        match normalize(ctx, &rs, body, rewrite_budget) {
            Ok(nf) if syntactically_guarded(&nf.term).is_ok() => continue,
            Err(RewriteError::BudgetExhausted { .. } | RewriteError::TooDeep { .. }) => {
                return Guardedness::BudgetExhausted {
                    var: x.clone(),
                    body: body.clone(),
                }
            }
            _ => {
                return Guardedness::Unguarded {
                    var: x.clone(),
                    body: body.clone(),
                }
            }
        }
    }
    Guardedness::Guarded
}

/// Recursion constants unfolded per head normal form computation.
pub const HNF_UNFOLD_BUDGET: usize = 10_000;

/// A finished reduction: `<root|spec>` equals the reduced constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub spec: RecSpec,
    pub root: Name,
}

impl Reduction {
    pub fn term(&self) -> Term {
        Term::rec(&self.root, &self.spec.name)
    }
}

/// Equations found before the budget ran out, and the variables whose
/// equations were still to be computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialReduction {
    pub name: Name,
    pub root: Name,
    pub equations: BTreeMap<Name, Term>,
    pub frontier: Vec<(Name, Term)>,
}

#[derive(Debug, Clone, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error("while computing a head normal form: {0}")]
    Rewrite(#[from] RewriteError),
    #[error(
        "equation budget exhausted: {} equations done, {} pending",
        .0.equations.len(),
        .0.frontier.len()
    )]
    BudgetExhausted(Box<PartialReduction>),
}

/// Reduces `<x|spec>` to a constant of a specification without
/// interleaving. Specifications that already are over ACP come back
/// unchanged.
pub fn reduce_spec(
    ctx: &Context,
    policy: Policy,
    spec: &str,
    x: &str,
    equation_budget: usize,
) -> Result<Reduction, ReduceError> {
    let p = ctx.spec(spec)?;
    if !p.equations.contains_key(x) {
        return Err(ContextError::UnknownVar {
            spec: p.name.clone(),
            var: x.into(),
        }
        .into());
    }
    if ctx.theory(spec) == Some(Theory::Acp) {
        return Ok(Reduction {
            spec: p.clone(),
            root: x.into(),
        });
    }
    let name = ctx.fresh_spec_name(&format!("{spec}_acp"));
    linearize(ctx, policy, &name, x, Term::rec(x, spec), equation_budget)
}

/// Builds a linear specification `name` whose variable `root` equals `t`:
/// every right-hand side is a sum of terms `a . Y` and `b`.
pub fn linearize(
    ctx: &Context,
    policy: Policy,
    name: &str,
    root: &str,
    t: Term,
    equation_budget: usize,
) -> Result<Reduction, ReduceError> {
    let mut memo: HashMap<Term, Name> = HashMap::new();
    let mut queue: VecDeque<(Name, Term)> = VecDeque::new();
    let mut equations = BTreeMap::new();
    let root: Name = root.into();
    memo.insert(ctx.behaviour_key(&t), root.clone());
    queue.push_back((root.clone(), t));
    let mut fresh = 0usize;

    while let Some((var, term)) = queue.pop_front() {
        if equations.len() == equation_budget {
            queue.push_front((var, term));
            return Err(ReduceError::BudgetExhausted(Box::new(PartialReduction {
                name: name.into(),
                root,
                equations,
                frontier: queue.into_iter().collect(),
            })));
        }
        let mut fuel = HNF_UNFOLD_BUDGET;
        let mut body = Vec::new();
        for s in summands(ctx, policy, &term, &mut fuel)? {
            match s {
                Summand::Last(a) => body.push(Term::action(a)),
                Summand::Prefix(a, next) => {
                    let key = ctx.behaviour_key(&next);
                    let y = match memo.get(&key) {
                        Some(y) => y.clone(),
                        None => {
                            fresh += 1;
                            let y: Name = format!("{root}${fresh}").into();
                            memo.insert(key, y.clone());
                            queue.push_back((y.clone(), next));
                            y
                        }
                    };
                    body.push(Term::seq2(Term::action(a), Term::var(&y)));
                }
            }
        }
        equations.insert(var, Term::alt(body));
    }
    let spec = RecSpec {
        name: name.into(),
        equations,
    };
    Ok(Reduction { spec, root })
}

/// Data whose process can request its own kind again, directly or through
/// other data; such creation chains are unbounded.
pub fn recursive_data(phi: &BTreeMap<Name, Term>) -> Vec<Name> {
    let requests = |t: &Term| {
        let mut out = Vec::new();
        t.for_each(&mut |u| {
            if let Some(Action::CreateRequest(d)) = u.as_action() {
                out.push(d.clone());
            }
        });
        out
    };
    phi.keys()
        .filter(|d| {
            let mut seen = vec![(*d).clone()];
            let mut stack = requests(&phi[*d]);
            while let Some(e) = stack.pop() {
                if &e == *d {
                    return true;
                }
                if !seen.contains(&e) {
                    if let Some(body) = phi.get(&e) {
                        stack.extend(requests(body));
                    }
                    seen.push(e);
                }
            }
            false
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::CommTable;
    use crate::strategies::{History, RoundRobin, StateLiteral};
    use std::sync::Arc;

    fn a() -> Term {
        Term::act("a")
    }
    fn b() -> Term {
        Term::act("b")
    }

    fn spec(name: &str, eqs: &[(&str, Term)]) -> RecSpec {
        RecSpec::new(name, eqs.iter().map(|(x, t)| (Name::from(*x), t.clone()))).unwrap()
    }

    fn ctx(specs: Vec<RecSpec>) -> Context {
        let comm = CommTable::new(["a", "b", "c"].map(Action::plain));
        Context::new(comm, BTreeMap::new(), specs, Arc::new(RoundRobin))
    }

    #[test]
    fn undefined_variable_rejected() {
        let err = RecSpec::new("P", [(Name::from("X"), Term::seq2(a(), Term::var("Y")))]);
        assert!(matches!(err, Err(SpecError::UndefinedVar { .. })));
    }

    #[test]
    fn unfolding() {
        let p = spec("P", &[("X", Term::alt2(Term::seq2(a(), Term::var("X")), b()))]);
        assert_eq!(
            unfold_rdp(&p, "X").unwrap(),
            Term::alt2(Term::seq2(a(), Term::rec("X", "P")), b())
        );
        let q = spec("Q", &[("X", Term::seq2(a(), Term::var("Y"))), ("Y", b())]);
        assert_eq!(unfold_rdp(&q, "X").unwrap(), Term::seq2(a(), Term::rec("Y", "Q")));
        assert!(unfold_rdp(&q, "Z").is_err());
    }

    #[test]
    fn guardedness() {
        let x = Term::var("X");
        let ok = spec("P", &[("X", Term::seq2(a(), x.clone()))]);
        assert_eq!(check_guarded(&ctx(vec![]), &ok, 100), Guardedness::Guarded);

        let bad = spec("P", &[("X", Term::alt2(x.clone(), a()))]);
        assert!(matches!(
            check_guarded(&ctx(vec![]), &bad, 100),
            Guardedness::Unguarded { .. }
        ));

        let after_a4 = spec("P", &[("X", Term::seq2(Term::alt2(a(), b()), x.clone()))]);
        assert!(syntactically_guarded(&after_a4.equations["X"]).is_err());
        assert_eq!(check_guarded(&ctx(vec![]), &after_a4, 100), Guardedness::Guarded);
    }

    #[test]
    fn acp_specs_are_left_alone() {
        let p = spec("P", &[("X", Term::seq2(a(), Term::var("X")))]);
        let c = ctx(vec![p.clone()]);
        let r = reduce_spec(&c, Policy::Halt, "P", "X", 10).unwrap();
        assert_eq!(r.spec, p);
    }

    #[test]
    fn interleaved_loop_closes() {
        // X = si(a.X, b): a, then b, then the loop again.
        let body = Term::si(
            History::empty(),
            StateLiteral::init(),
            vec![Term::seq2(a(), Term::var("X")), b()],
        );
        let p = spec("P", &[("X", body)]);
        let c = ctx(vec![p]);
        let r = reduce_spec(&c, Policy::Halt, "P", "X", 50).unwrap();
        assert_eq!(r.spec.name.as_ref(), "P_acp");
        assert!(r.spec.equations.values().all(|t| !t.has_interleaving()));
        assert_eq!(r.spec.local_theory(), Theory::Acp);
        assert_eq!(r.spec.equations["X"], Term::seq2(a(), Term::var("X$1")));
    }

    #[test]
    fn recursive_data_found() {
        let cr = |d: &str| Term::action(Action::request(d));
        let phi: BTreeMap<Name, Term> = [
            ("d".into(), Term::seq2(cr("e"), a())),
            ("e".into(), cr("d")),
            ("f".into(), b()),
        ]
        .into();
        assert_eq!(recursive_data(&phi), vec![Name::from("d"), Name::from("e")]);
    }
}
