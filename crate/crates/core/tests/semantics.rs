mod common;

use std::sync::Arc;

use siacp::kernel::Term;
use siacp::rewrite::{eliminate, normalize, RuleSet};
use siacp::semantics::{bounded_bisimilar, enumerate_traces};
use siacp::strategies::{Aging, History, Policy, StateLiteral};

use common::{context, corpus, si, FULL, SEED};

fn a(x: &str) -> Term {
    Term::act(x)
}

#[test]
fn aging_prefers_the_longest_waiting() {
    let ctx = context().with_strategy(Arc::new(Aging));
    let t = si(vec![Term::seq([a("a"), a("b"), a("b")]), a("c"), a("a")]);
    let traces = enumerate_traces(&ctx, &t, 10, 10).unwrap();
    let shown: Vec<String> = traces.iter().map(ToString::to_string).collect();
    assert_eq!(shown, ["a c a b b [terminated]"]);
    let nf = normalize(&ctx, &RuleSet::siacp(Policy::Halt), &t, 1_000).unwrap().term;
    assert_eq!(nf.to_string(), "a . c . a . b . b");
}

#[test]
fn measure_does_not_orient_si4() {
    let ctx = context();
    let before = Term::posm(1, History::empty(), StateLiteral::init(), vec![a("a"), a("b")]);
    let h = History::validate(&[(1, 1)]).unwrap();
    let after = Term::seq2(a("a"), Term::si(h, StateLiteral::init(), vec![a("b")]));
    assert_eq!(ctx.theta(&before).unwrap(), 16u32.into());
    assert_eq!(ctx.theta(&after).unwrap(), 20u32.into());
}

#[test]
fn elimination_with_recursion_keeps_behaviour() {
    let ctx = context();
    let rs = RuleSet::siacp(Policy::Halt);
    let mut checked = 0;
    for t in corpus(SEED ^ 7, 300, FULL).iter().filter(|t| t.has_recursion()) {
        let e = eliminate(&ctx, &rs, t, 100_000, 500).unwrap();
        let c = ctx.with_specs(e.specs.clone());
        let r = bounded_bisimilar(&c, t, &e.term, 6, 20_000).unwrap();
        assert!(r.verdict.holds(), "{t} vs {}: {r}", e.term);
        checked += 1;
    }
    assert!(checked >= 20, "only {checked} recursive terms");
}
