//! Printing in the input syntax with as few parentheses as possible.

use std::fmt;

use crate::kernel::{Interleaving, Node, Term};

const ALT: u8 = 0;
const MERGE: u8 = 1;
const SEQ: u8 = 2;
const ATOM: u8 = 3;

fn level(t: &Term) -> u8 {
    match t.node() {
        Node::Alt(_) => ALT,
        Node::Par(..) | Node::LeftMerge(..) | Node::CommMerge(..) => MERGE,
        Node::Seq(_) => SEQ,
        _ => ATOM,
    }
}

fn at(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    if level(t) < min {
        write!(f, "({t})")
    } else {
        write!(f, "{t}")
    }
}

fn operands(f: &mut fmt::Formatter<'_>, il: &Interleaving) -> fmt::Result {
    if !il.history.is_empty() {
        write!(f, "{}", il.history)?;
    }
    if !il.state.is_init() {
        write!(f, "${}", il.state)?;
    }
    f.write_str("(")?;
    for (k, p) in il.procs.iter().enumerate() {
        if k > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{p}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Action(a) => write!(f, "{a}"),
            Node::Delta => f.write_str("delta"),
            Node::Alt(cs) => {
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    at(f, c, MERGE)?;
                }
                Ok(())
            }
            Node::Seq(cs) => {
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" . ")?;
                    }
                    at(f, c, ATOM)?;
                }
                Ok(())
            }
            Node::Par(x, y) | Node::LeftMerge(x, y) | Node::CommMerge(x, y) => {
                let op = match self.node() {
                    Node::Par(..) => " || ",
                    Node::LeftMerge(..) => " |L ",
                    _ => " |C ",
                };
                at(f, x, MERGE)?;
                f.write_str(op)?;
                at(f, y, SEQ)
            }
            Node::Encap(h, x) => {
                let names: Vec<String> = h.iter().map(ToString::to_string).collect();
                write!(f, "encap{{{}}}({x})", names.join(", "))
            }
            Node::Si(il) => {
                f.write_str("si")?;
                operands(f, il)
            }
            Node::Posm(i, il) => {
                write!(f, "posm[{i}]")?;
                operands(f, il)
            }
            Node::Rec(r) => write!(f, "<{}|{}>", r.var, r.spec),
            Node::Var(x) => f.write_str(x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{History, StateLiteral};

    fn a() -> Term {
        Term::act("a")
    }
    fn b() -> Term {
        Term::act("b")
    }

    #[test]
    fn precedence() {
        let t = Term::seq2(Term::alt2(a(), b()), a());
        assert_eq!(t.to_string(), "(a + b) . a");
        let t = Term::alt2(Term::par(a(), b()), Term::seq2(a(), b()));
        assert_eq!(t.to_string(), "a . b + a || b");
        let t = Term::left_merge(a(), Term::comm_merge(a(), b()));
        assert_eq!(t.to_string(), "a |L (a |C b)");
        let t = Term::left_merge(Term::comm_merge(a(), b()), a());
        assert_eq!(t.to_string(), "a |C b |L a");
    }

    #[test]
    fn interleavings() {
        let h = History::validate(&[(1, 2), (2, 1)]).unwrap();
        let t = Term::posm(1, h, StateLiteral::new("w:1"), vec![a()]);
        assert_eq!(t.to_string(), "posm[1]@[(1,2)(2,1)]$w:1(a)");
        let t = Term::si(History::empty(), StateLiteral::init(), vec![a(), b()]);
        assert_eq!(t.to_string(), "si(a, b)");
    }

    #[test]
    fn constants() {
        assert_eq!(Term::rec("X$1", "P_acp").to_string(), "<X$1|P_acp>");
        assert_eq!(Term::delta().to_string(), "delta");
    }
}
