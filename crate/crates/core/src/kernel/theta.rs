//! Polynomial interpretation of closed terms into the positive integers.
//!
//! The interpretation is used as a termination measure: every halt-policy
//! rewrite step is expected to map a term to one with a smaller value.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use super::action::{Action, Name};
use super::term::{Node, Term};
use super::Theory;

/// Largest exponent accepted for an encapsulation, in bits of the result.
pub const MAX_EXPONENT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("no process bound to datum {0}")]
    UnknownDatum(Name),
    #[error("specification {0} is not classified")]
    UnclassifiedSpec(Name),
    #[error("datum {0} is bound to a process that requests itself")]
    RecursiveDatum(Name),
    #[error("term has a free variable {0}")]
    OpenTerm(Name),
    #[error("value 2^{0} is too large to represent")]
    TooLarge(BigUint),
}

struct Eval<'a> {
    phi: &'a BTreeMap<Name, Term>,
    kinds: &'a BTreeMap<Name, Theory>,
    data: BTreeMap<Name, BigUint>,
    active: BTreeSet<Name>,
}

/// Evaluates the measure on a closed term.
pub fn theta_eval(
    t: &Term,
    phi: &BTreeMap<Name, Term>,
    spec_kind: &BTreeMap<Name, Theory>,
) -> Result<BigUint, ThetaError> {
    Eval {
        phi,
        kinds: spec_kind,
        data: BTreeMap::new(),
        active: BTreeSet::new(),
    }
    .eval(t)
}

fn sq(x: BigUint) -> BigUint {
    &x * &x
}

impl Eval<'_> {
    fn eval(&mut self, t: &Term) -> Result<BigUint, ThetaError> {
        let two = || BigUint::from(2u32);
        Ok(match t.node() {
            Node::Action(Action::CreateRequest(d)) => sq(self.datum(d)?) + 1u32,
            Node::Action(_) | Node::Delta => two(),
            Node::Alt(cs) => {
                let mut sum = BigUint::default();
                for c in cs {
                    sum += self.eval(c)?;
                }
                sum
            }
            // x1 . (x2 . ( ... . xk))
            Node::Seq(cs) => {
                let mut acc = self.eval(cs.last().unwrap())?;
                for c in cs[..cs.len() - 1].iter().rev() {
                    acc = sq(self.eval(c)?) * acc;
                }
                acc
            }
            Node::Par(x, y) => sq(self.eval(x)? * self.eval(y)?) * 3u32 + 1u32,
            Node::LeftMerge(x, y) | Node::CommMerge(x, y) => sq(self.eval(x)? * self.eval(y)?),
            Node::Encap(_, x) => {
                let e = self.eval(x)?;
                match e.to_u64() {
                    Some(bits) if bits <= MAX_EXPONENT => BigUint::one() << bits,
                    _ => return Err(ThetaError::TooLarge(e)),
                }
            }
            Node::Si(il) => sq(self.product(&il.procs)?) + 1u32,
            Node::Posm(_, il) => sq(self.product(&il.procs)?),
            Node::Rec(r) => match self.kinds.get(&r.spec) {
                Some(Theory::Acp) => two(),
                Some(Theory::SiAcp) => BigUint::from(3u32),
                None => return Err(ThetaError::UnclassifiedSpec(r.spec.clone())),
            },
            Node::Var(x) => return Err(ThetaError::OpenTerm(x.clone())),
        })
    }

    fn product(&mut self, ts: &[Term]) -> Result<BigUint, ThetaError> {
        let mut p = BigUint::one();
        for t in ts {
            p *= self.eval(t)?;
        }
        Ok(p)
    }

    fn datum(&mut self, d: &Name) -> Result<BigUint, ThetaError> {
        if let Some(v) = self.data.get(d) {
            return Ok(v.clone());
        }
        let body = self
            .phi
            .get(d)
            .ok_or_else(|| ThetaError::UnknownDatum(d.clone()))?
            .clone();
        if !self.active.insert(d.clone()) {
            return Err(ThetaError::RecursiveDatum(d.clone()));
        }
        let v = self.eval(&body)?;
        self.active.remove(d);
        self.data.insert(d.clone(), v.clone());
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{History, StateLiteral};
    use std::sync::Arc;

    fn th(t: &Term) -> u64 {
        theta_eval(t, &BTreeMap::new(), &BTreeMap::new())
            .unwrap()
            .to_u64()
            .unwrap()
    }

    fn a() -> Term {
        Term::act("a")
    }
    fn b() -> Term {
        Term::act("b")
    }

    #[test]
    fn constants_and_compositions() {
        assert_eq!(th(&a()), 2);
        assert_eq!(th(&Term::delta()), 2);
        assert_eq!(th(&Term::seq2(a(), b())), 8);
        assert_eq!(th(&Term::par(a(), b())), 49);
        assert_eq!(th(&Term::left_merge(a(), b())), 16);
        assert_eq!(th(&Term::alt2(a(), b())), 4);
        let h: Arc<_> = Arc::new([Action::plain("a")].into_iter().collect());
        assert_eq!(th(&Term::encap(h, Term::alt2(a(), b()))), 16);
    }

    #[test]
    fn sequences_nest_to_the_right() {
        // a . (b . c) = 4 * (4 * 2)
        assert_eq!(th(&Term::seq([a(), b(), Term::act("c")])), 32);
    }

    #[test]
    fn interleavings() {
        let si = Term::si(History::empty(), StateLiteral::init(), vec![a(), b()]);
        assert_eq!(th(&si), 17);
        let posm = Term::posm(1, History::empty(), StateLiteral::init(), vec![a(), b()]);
        assert_eq!(th(&posm), 16);
    }

    #[test]
    fn creation_requests_use_bound_process() {
        let phi: BTreeMap<Name, Term> = [("d".into(), Term::seq2(a(), b()))].into();
        let v = theta_eval(
            &Term::action(Action::request("d")),
            &phi,
            &BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(v, BigUint::from(65u32));
        assert_eq!(
            theta_eval(&Term::action(Action::request("e")), &phi, &BTreeMap::new()),
            Err(ThetaError::UnknownDatum("e".into()))
        );
    }

    #[test]
    fn self_requesting_datum_is_an_error() {
        let phi: BTreeMap<Name, Term> =
            [("d".into(), Term::seq2(Term::action(Action::request("d")), a()))].into();
        assert_eq!(
            theta_eval(&Term::action(Action::request("d")), &phi, &BTreeMap::new()),
            Err(ThetaError::RecursiveDatum("d".into()))
        );
    }

    #[test]
    fn recursion_constants_by_theory() {
        let kinds: BTreeMap<Name, Theory> =
            [("P".into(), Theory::Acp), ("Q".into(), Theory::SiAcp)].into();
        let phi = BTreeMap::new();
        assert_eq!(theta_eval(&Term::rec("X", "P"), &phi, &kinds).unwrap(), 2u32.into());
        assert_eq!(theta_eval(&Term::rec("X", "Q"), &phi, &kinds).unwrap(), 3u32.into());
        assert!(matches!(
            theta_eval(&Term::rec("X", "R"), &phi, &kinds),
            Err(ThetaError::UnclassifiedSpec(_))
        ));
    }
}
