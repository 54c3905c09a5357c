//! Seeded random terms shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siacp::kernel::{Action, CommTable, Name, Term};
use siacp::recursion::RecSpec;
use siacp::strategies::{History, RoundRobin, StateLiteral};
use siacp::Context;

pub const SEED: u64 = 0x51AC_9001;

/// Actions a, b, c with a | b = c; d spawns b . a and e spawns a + c;
/// `Q` is the ACP loop X = a . X + b.
pub fn context() -> Context {
    let acts = ["a", "b", "c"].map(Action::plain);
    let mut comm = CommTable::new(acts.iter().cloned());
    comm.insert(Action::plain("a"), Action::plain("b"), Some(Action::plain("c")));
    let mut phi = BTreeMap::new();
    phi.insert(Name::from("d"), Term::seq2(Term::act("b"), Term::act("a")));
    phi.insert(Name::from("e"), Term::alt2(Term::act("a"), Term::act("c")));
    let q = RecSpec::new(
        "Q",
        [(
            Name::from("X"),
            Term::alt2(Term::seq2(Term::act("a"), Term::var("X")), Term::act("b")),
        )],
    )
    .unwrap();
    Context::new(comm, phi, vec![q], Arc::new(RoundRobin))
}

pub fn si(procs: Vec<Term>) -> Term {
    Term::si(History::empty(), StateLiteral::init(), procs)
}

pub fn encap(acts: &[&str], t: Term) -> Term {
    let set: BTreeSet<Action> = acts.iter().map(|a| Action::plain(a)).collect();
    Term::encap(Arc::new(set), t)
}

#[derive(Clone, Copy)]
pub struct Shape {
    pub interleaving: bool,
    pub creation: bool,
    pub recursion: bool,
}

pub const FULL: Shape = Shape {
    interleaving: true,
    creation: true,
    recursion: true,
};

pub const ACP: Shape = Shape {
    interleaving: false,
    creation: false,
    recursion: false,
};

fn leaf(rng: &mut ChaCha8Rng, shape: Shape) -> Term {
    match rng.gen_range(0..20) {
        0 => Term::delta(),
        1 | 2 if shape.creation => Term::action(Action::request(if rng.gen() { "d" } else { "e" })),
        3 if shape.recursion => Term::rec("X", "Q"),
        k => Term::act(["a", "b", "c"][k % 3]),
    }
}

/// A random closed term of depth at most `depth`. Encapsulations only
/// wrap terms of depth two or less.
pub fn term(rng: &mut ChaCha8Rng, depth: usize, shape: Shape) -> Term {
    if depth <= 1 || rng.gen_range(0..5) == 0 {
        return leaf(rng, shape);
    }
    let d = depth - 1;
    let ops = if shape.interleaving { 7 } else { 6 };
    match rng.gen_range(0..ops) {
        0 => Term::alt2(term(rng, d, shape), term(rng, d, shape)),
        1 => Term::seq2(term(rng, d, shape), term(rng, d, shape)),
        2 => Term::par(term(rng, d, shape), term(rng, d, shape)),
        3 => Term::left_merge(term(rng, d, shape), term(rng, d, shape)),
        4 => Term::comm_merge(term(rng, d, shape), term(rng, d, shape)),
        5 => {
            let blocked: &[&str] = [&["a"][..], &["b"], &["a", "b"], &["c"]][rng.gen_range(0..4)];
            encap(blocked, term(rng, d.min(2), shape))
        }
        _ => {
            let n = rng.gen_range(1..=3);
            si((0..n).map(|_| term(rng, d, shape)).collect())
        }
    }
}

/// `count` terms of depth at most four from a fixed seed.
pub fn corpus(seed: u64, count: usize, shape: Shape) -> Vec<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| term(&mut rng, 4, shape)).collect()
}
