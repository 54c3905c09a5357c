//! Everything a term needs to be interpreted: the communication function,
//! the processes bound to creation data, the recursive specifications in
//! scope and the interleaving strategy.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::kernel::{canonicalize, theta_eval, CommTable, Name, Node, Term, ThetaError, Theory};
use crate::recursion::RecSpec;
use crate::strategies::{RoundRobin, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("no process bound to datum {0}")]
    UnknownDatum(Name),
    #[error("unknown specification {0}")]
    UnknownSpec(Name),
    #[error("specification {spec} has no variable {var}")]
    UnknownVar { spec: Name, var: Name },
}

#[derive(Clone, Debug)]
pub struct Context {
    pub comm: CommTable,
    pub phi: BTreeMap<Name, Term>,
    specs: BTreeMap<Name, RecSpec>,
    kinds: BTreeMap<Name, Theory>,
    pub strategy: Arc<dyn Strategy>,
}

impl Default for Context {
    fn default() -> Self {
        Context::new(CommTable::default(), BTreeMap::new(), Vec::new(), Arc::new(RoundRobin))
    }
}

impl Context {
    pub fn new(
        comm: CommTable,
        phi: BTreeMap<Name, Term>,
        specs: Vec<RecSpec>,
        strategy: Arc<dyn Strategy>,
    ) -> Self {
        let mut ctx = Context {
            comm,
            phi,
            specs: BTreeMap::new(),
            kinds: BTreeMap::new(),
            strategy,
        };
        ctx.add_specs(specs);
        ctx
    }

    /// A copy of this context with more specifications in scope.
    pub fn with_specs<I: IntoIterator<Item = RecSpec>>(&self, specs: I) -> Context {
        let mut ctx = self.clone();
        ctx.add_specs(specs);
        ctx
    }

    pub fn with_strategy(&self, strategy: Arc<dyn Strategy>) -> Context {
        Context {
            strategy,
            ..self.clone()
        }
    }

    fn add_specs<I: IntoIterator<Item = RecSpec>>(&mut self, specs: I) {
        for s in specs {
            self.specs.insert(s.name.clone(), s);
        }
        self.classify();
    }

    // A specification is over siACP if it interleaves strategically or
    // refers to a specification that does.
    fn classify(&mut self) {
        let mut kinds: BTreeMap<Name, Theory> = self
            .specs
            .iter()
            .map(|(n, s)| {
                let k = if s.equations.values().any(Term::has_interleaving) {
                    Theory::SiAcp
                } else {
                    Theory::Acp
                };
                (n.clone(), k)
            })
            .collect();
        loop {
            let mut changed = false;
            for (name, spec) in &self.specs {
                if kinds[name] == Theory::SiAcp {
                    continue;
                }
                let refers = spec.equations.values().any(|t| {
                    t.any(&|u| match u.node() {
                        Node::Rec(r) => kinds.get(&r.spec) == Some(&Theory::SiAcp),
                        _ => false,
                    })
                });
                if refers {
                    kinds.insert(name.clone(), Theory::SiAcp);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.kinds = kinds;
    }

    pub fn spec(&self, name: &str) -> Result<&RecSpec, ContextError> {
        self.specs
            .get(name)
            .ok_or_else(|| ContextError::UnknownSpec(name.into()))
    }

    pub fn specs(&self) -> impl Iterator<Item = &RecSpec> {
        self.specs.values()
    }

    pub fn theory(&self, spec: &str) -> Option<Theory> {
        self.kinds.get(spec).copied()
    }

    pub fn kinds(&self) -> &BTreeMap<Name, Theory> {
        &self.kinds
    }

    pub fn datum(&self, d: &Name) -> Result<&Term, ContextError> {
        self.phi
            .get(d)
            .ok_or_else(|| ContextError::UnknownDatum(d.clone()))
    }

    pub fn theta(&self, t: &Term) -> Result<BigUint, ThetaError> {
        theta_eval(t, &self.phi, &self.kinds)
    }

    /// Canonical form with every history cut down to what the strategy can
    /// observe, and with single-process interleavings of processes that
    /// never create others replaced by the process itself. Terms with
    /// equal keys have the same behaviour.
    pub fn behaviour_key(&self, t: &Term) -> Term {
        let t = self.unwrap_solo(&canonicalize(t));
        match self.strategy.history_window() {
            Some(k) => t.map_interleavings(&|il| (il.history.suffix(k), il.state.clone())),
            None => t,
        }
    }

    fn unwrap_solo(&self, t: &Term) -> Term {
        let kids: Vec<Term> = t.children().into_iter().map(|c| self.unwrap_solo(c)).collect();
        match t.node() {
            Node::Si(il) | Node::Posm(_, il) if il.arity() == 1 && !self.may_create(&kids[0]) => {
                kids.into_iter().next().unwrap()
            }
            _ => t.rebuild(kids),
        }
    }

    /// Whether `t` can perform `cr(d)` for some `d`, possibly after
    /// unfolding recursion constants.
    pub fn may_create(&self, t: &Term) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![t.clone()];
        while let Some(u) = stack.pop() {
            let mut found = false;
            u.for_each(&mut |v| match v.node() {
                Node::Action(a) if a.is_request() => found = true,
                Node::Rec(r) if seen.insert(r.spec.clone()) => {
                    if let Some(spec) = self.specs.get(&r.spec) {
                        stack.extend(spec.equations.values().cloned());
                    }
                }
                _ => {}
            });
            if found {
                return true;
            }
        }
        false
    }

    /// Fresh specification name not yet in scope.
    pub fn fresh_spec_name(&self, base: &str) -> Name {
        if !self.specs.contains_key(base) {
            return base.into();
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|n| !self.specs.contains_key(n.as_str()))
            .unwrap()
            .into()
    }
}
