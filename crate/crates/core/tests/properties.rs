mod common;

use std::collections::HashSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use siacp::cli::{parse_term, Signature};
use siacp::kernel::{canonicalize, Action, CommTable, Name, Term};
use siacp::recursion::{check_guarded, Guardedness, RecSpec};
use siacp::rewrite::{head_normal_form, is_head_normal_form, normalize, RuleSet};
use siacp::semantics::bisimilar;
use siacp::strategies::{History, Policy, RoundRobin, StateLiteral, Strategy as _};

use common::{context, FULL};

fn random_term(seed: u64, depth: usize) -> Term {
    common::term(&mut ChaCha8Rng::seed_from_u64(seed), depth, FULL)
}

fn history() -> impl Strategy<Value = History> {
    (1usize..5, prop::collection::vec((0usize..8, -1isize..=1), 0..10)).prop_map(|(n0, steps)| {
        let mut entries = Vec::new();
        let mut n = n0;
        for (k, (pick, delta)) in steps.into_iter().enumerate() {
            let i = pick % n + 1;
            if k > 0 {
                n = (n as isize + delta).max(1) as usize;
            }
            entries.push((i, n));
        }
        History::validate(&entries).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_form_is_idempotent(seed in any::<u64>()) {
        let t = canonicalize(&random_term(seed, 4));
        prop_assert_eq!(canonicalize(&t), t);
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let t = canonicalize(&random_term(seed, 4));
        let sig = Signature { actions: None, data: None, vars: Some(&HashSet::new()), strategy: &RoundRobin };
        let back = parse_term(&t.to_string(), sig);
        prop_assert_eq!(back, Ok(t));
    }

    #[test]
    fn normal_forms_are_stable(seed in any::<u64>()) {
        let ctx = context();
        let rs = RuleSet::siacp(Policy::Halt);
        let t = random_term(seed, 4);
        prop_assume!(!t.has_recursion());
        let nf = normalize(&ctx, &rs, &t, 100_000).unwrap();
        let again = normalize(&ctx, &rs, &nf.term, 100_000).unwrap();
        prop_assert_eq!(again.steps, 0);
        prop_assert_eq!(again.term, nf.term);
    }

    #[test]
    fn head_normal_form_keeps_behaviour(seed in any::<u64>()) {
        let ctx = context();
        let t = random_term(seed, 3);
        let h = head_normal_form(&ctx, Policy::Halt, &t, 10_000).unwrap();
        prop_assert!(is_head_normal_form(&h));
        let r = bisimilar(&ctx, &t, &h, 5_000).unwrap();
        prop_assert!(r.verdict.holds(), "{} vs {}: {}", t, h, r);
    }

    #[test]
    fn communication_is_symmetric(pairs in prop::collection::vec((0usize..4, 0usize..4, 0usize..5), 0..8)) {
        let acts = ["a", "b", "c", "e"].map(Action::plain);
        let mut comm = CommTable::new(acts.iter().cloned());
        for (x, y, z) in pairs {
            comm.insert(acts[x].clone(), acts[y].clone(), acts.get(z).cloned());
        }
        for x in &acts {
            for y in &acts {
                prop_assert_eq!(comm.apply(Some(x), Some(y)), comm.apply(Some(y), Some(x)));
            }
        }
    }

    #[test]
    fn round_robin_reads_only_the_last_entry(h1 in history(), h2 in history(), n in 1usize..8) {
        let s = StateLiteral::init();
        let rr = RoundRobin;
        if h1.last().map(|e| e.0) == h2.last().map(|e| e.0) {
            prop_assert_eq!(rr.sched(n, &h1, &s).unwrap(), rr.sched(n, &h2, &s).unwrap());
        }
        let i = rr.sched(n, &h1, &s).unwrap();
        prop_assert!((1..=n).contains(&i));
    }

    #[test]
    fn guardedness_ignores_canonicalization(seed in any::<u64>(), guard in any::<bool>()) {
        let ctx = context();
        let body = random_term(seed, 3);
        let rhs = if guard {
            Term::seq2(body, Term::var("X"))
        } else {
            Term::alt2(body, Term::var("X"))
        };
        let raw = RecSpec { name: Name::from("G"), equations: [(Name::from("X"), rhs.clone())].into() };
        let canon = RecSpec::new("G", [(Name::from("X"), canonicalize(&rhs))]).unwrap();
        let kind = |g: Guardedness| match g {
            Guardedness::Guarded => 0,
            Guardedness::Unguarded { .. } => 1,
            Guardedness::BudgetExhausted { .. } => 2,
        };
        prop_assert_eq!(kind(check_guarded(&ctx, &raw, 2_000)), kind(check_guarded(&ctx, &canon, 2_000)));
        if !guard {
            prop_assert_ne!(kind(check_guarded(&ctx, &canon, 2_000)), 0);
        }
    }
}
