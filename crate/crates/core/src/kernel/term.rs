use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::action::{Action, Name};
use crate::strategies::{History, StateLiteral};

/// A process term.
///
/// `Term` is a cheap handle onto an immutable node. Terms built through the
/// smart constructors on this type are always in canonical form: the
/// children of `Alt` form a sorted set with no nested `Alt` and no `Delta`
/// next to another summand, and `Seq` lists never contain a `Seq`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(Arc<Node>);

/// Set of blocked actions of an encapsulation.
pub type ActionSet = Arc<BTreeSet<Action>>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Action(Action),
    Delta,
    Alt(Vec<Term>),
    Seq(Vec<Term>),
    Par(Term, Term),
    LeftMerge(Term, Term),
    CommMerge(Term, Term),
    Encap(ActionSet, Term),
    Si(Interleaving),
    /// Positional interleaving; the position is 1-based.
    Posm(usize, Interleaving),
    Rec(RecRef),
    Var(Name),
}

/// Operands of a strategic interleaving operator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interleaving {
    pub history: History,
    pub state: StateLiteral,
    pub procs: Vec<Term>,
}

impl Interleaving {
    pub fn new(history: History, state: StateLiteral, procs: Vec<Term>) -> Self {
        assert!(!procs.is_empty(), "interleaving of zero processes");
        Interleaving {
            history,
            state,
            procs,
        }
    }

    pub fn arity(&self) -> usize {
        self.procs.len()
    }
}

/// A recursion constant `<X|P>`: variable `X` of the specification named `P`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecRef {
    pub var: Name,
    pub spec: Name,
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({self})")
    }
}

impl Term {
    /// Wraps a node without canonicalizing it.
    pub fn from_node(node: Node) -> Self {
        Term(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn action(a: Action) -> Self {
        Term::from_node(Node::Action(a))
    }

    pub fn act(name: &str) -> Self {
        Term::action(Action::plain(name))
    }

    pub fn delta() -> Self {
        Term::from_node(Node::Delta)
    }

    /// Alternative composition modulo A1, A2, A3 and A6.
    pub fn alt<I: IntoIterator<Item = Term>>(children: I) -> Self {
        let mut flat = Vec::new();
        for c in children {
            match c.node() {
                Node::Alt(cs) => flat.extend(cs.iter().cloned()),
                _ => flat.push(c),
            }
        }
        flat.sort();
        flat.dedup();
        if flat.len() > 1 {
            flat.retain(|c| !c.is_delta());
        }
        match flat.len() {
            0 => Term::delta(),
            1 => flat.pop().unwrap(),
            _ => Term::from_node(Node::Alt(flat)),
        }
    }

    pub fn alt2(x: Term, y: Term) -> Self {
        Term::alt([x, y])
    }

    /// Sequential composition; nested sequences are spliced in.
    pub fn seq<I: IntoIterator<Item = Term>>(children: I) -> Self {
        let mut flat = Vec::new();
        for c in children {
            match c.node() {
                Node::Seq(cs) => flat.extend(cs.iter().cloned()),
                _ => flat.push(c),
            }
        }
        match flat.len() {
            0 => panic!("empty sequential composition"),
            1 => flat.pop().unwrap(),
            _ => Term::from_node(Node::Seq(flat)),
        }
    }

    pub fn seq2(x: Term, y: Term) -> Self {
        Term::seq([x, y])
    }

    pub fn par(x: Term, y: Term) -> Self {
        Term::from_node(Node::Par(x, y))
    }

    pub fn left_merge(x: Term, y: Term) -> Self {
        Term::from_node(Node::LeftMerge(x, y))
    }

    pub fn comm_merge(x: Term, y: Term) -> Self {
        Term::from_node(Node::CommMerge(x, y))
    }

    pub fn encap(blocked: ActionSet, t: Term) -> Self {
        Term::from_node(Node::Encap(blocked, t))
    }

    pub fn si(history: History, state: StateLiteral, procs: Vec<Term>) -> Self {
        Term::from_node(Node::Si(Interleaving::new(history, state, procs)))
    }

    pub fn posm(pos: usize, history: History, state: StateLiteral, procs: Vec<Term>) -> Self {
        assert!(
            pos >= 1 && pos <= procs.len(),
            "position {pos} out of range 1..={}",
            procs.len()
        );
        Term::from_node(Node::Posm(pos, Interleaving::new(history, state, procs)))
    }

    pub fn rec(var: &str, spec: &str) -> Self {
        Term::from_node(Node::Rec(RecRef {
            var: var.into(),
            spec: spec.into(),
        }))
    }

    pub fn var(name: &str) -> Self {
        Term::from_node(Node::Var(name.into()))
    }

    pub fn is_delta(&self) -> bool {
        matches!(self.node(), Node::Delta)
    }

    pub fn as_action(&self) -> Option<&Action> {
        match self.node() {
            Node::Action(a) => Some(a),
            _ => None,
        }
    }

    /// Direct subterms in their canonical order.
    pub fn children(&self) -> Vec<&Term> {
        match self.node() {
            Node::Action(_) | Node::Delta | Node::Rec(_) | Node::Var(_) => Vec::new(),
            Node::Alt(cs) | Node::Seq(cs) => cs.iter().collect(),
            Node::Par(x, y) | Node::LeftMerge(x, y) | Node::CommMerge(x, y) => vec![x, y],
            Node::Encap(_, x) => vec![x],
            Node::Si(il) | Node::Posm(_, il) => il.procs.iter().collect(),
        }
    }

    /// Rebuilds this node with child `k` replaced, re-canonicalizing locally.
    pub fn with_child(&self, k: usize, child: Term) -> Term {
        let mut kids: Vec<Term> = self.children().into_iter().cloned().collect();
        kids[k] = child;
        self.rebuild(kids)
    }

    /// Rebuilds this node over new children using the smart constructors.
    pub fn rebuild(&self, mut kids: Vec<Term>) -> Term {
        match self.node() {
            Node::Action(_) | Node::Delta | Node::Rec(_) | Node::Var(_) => self.clone(),
            Node::Alt(_) => Term::alt(kids),
            Node::Seq(_) => Term::seq(kids),
            Node::Par(..) => {
                let y = kids.pop().unwrap();
                Term::par(kids.pop().unwrap(), y)
            }
            Node::LeftMerge(..) => {
                let y = kids.pop().unwrap();
                Term::left_merge(kids.pop().unwrap(), y)
            }
            Node::CommMerge(..) => {
                let y = kids.pop().unwrap();
                Term::comm_merge(kids.pop().unwrap(), y)
            }
            Node::Encap(h, _) => Term::encap(h.clone(), kids.pop().unwrap()),
            Node::Si(il) => Term::si(il.history.clone(), il.state.clone(), kids),
            Node::Posm(i, il) => Term::posm(*i, il.history.clone(), il.state.clone(), kids),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Visits every subterm, parents before children.
    pub fn for_each(&self, f: &mut dyn FnMut(&Term)) {
        f(self);
        for c in self.children() {
            c.for_each(f);
        }
    }

    pub fn any(&self, pred: &dyn Fn(&Term) -> bool) -> bool {
        pred(self) || self.children().iter().any(|c| c.any(pred))
    }

    pub fn is_closed(&self) -> bool {
        !self.any(&|t| matches!(t.node(), Node::Var(_)))
    }

    pub fn has_recursion(&self) -> bool {
        self.any(&|t| matches!(t.node(), Node::Rec(_)))
    }

    pub fn has_interleaving(&self) -> bool {
        self.any(&|t| matches!(t.node(), Node::Si(_) | Node::Posm(..)))
    }

    /// True when only actions, `delta`, `+` and `.` occur.
    pub fn is_basic(&self) -> bool {
        !self.any(&|t| {
            !matches!(
                t.node(),
                Node::Action(_) | Node::Delta | Node::Alt(_) | Node::Seq(_)
            )
        })
    }

    /// Replaces every variable for which `f` returns a term.
    pub fn substitute(&self, f: &dyn Fn(&Name) -> Option<Term>) -> Term {
        match self.node() {
            Node::Var(x) => f(x).unwrap_or_else(|| self.clone()),
            Node::Action(_) | Node::Delta | Node::Rec(_) => self.clone(),
            _ => {
                let kids = self.children().into_iter().map(|c| c.substitute(f)).collect();
                self.rebuild(kids)
            }
        }
    }

    /// Applies `f` to the operands of every interleaving node, bottom-up.
    pub fn map_interleavings(&self, f: &dyn Fn(&Interleaving) -> (History, StateLiteral)) -> Term {
        let kids: Vec<Term> = self
            .children()
            .into_iter()
            .map(|c| c.map_interleavings(f))
            .collect();
        match self.node() {
            Node::Si(il) => {
                let (h, s) = f(il);
                Term::si(h, s, kids)
            }
            Node::Posm(i, il) => {
                let (h, s) = f(il);
                Term::posm(*i, h, s, kids)
            }
            _ => self.rebuild(kids),
        }
    }
}

/// Canonical representative of `t` under A1, A2, A3 and A6.
pub fn canonicalize(t: &Term) -> Term {
    let kids: Vec<Term> = t.children().into_iter().map(canonicalize).collect();
    t.rebuild(kids)
}
