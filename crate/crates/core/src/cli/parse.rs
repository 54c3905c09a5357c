//! Recursive-descent parser for terms.
//!
//! ```text
//! alt  := m ('+' m)*
//! m    := s (('||' | '|L' | '|C') s)*
//! s    := p ('.' p)*
//! p    := 'delta' | IDENT | 'cr(' IDENT ')' | 'rcr(' IDENT ')'
//!       | 'encap{' IDENT (',' IDENT)* '}(' alt ')'
//!       | 'si' hist? st? '(' alt (',' alt)* ')'
//!       | 'posm[' NAT ']' hist? st? '(' alt (',' alt)* ')'
//!       | '<' IDENT '|' IDENT '>' | '(' alt ')'
//! hist := '@[' ('(' NAT ',' NAT ')')* ']'
//! st   := '$' [A-Za-z0-9_:,]+
//! ```
//!
//! Lowercase identifiers are actions, uppercase ones are variables.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{canonicalize, is_action_name, Action, Name, Term};
use crate::strategies::{History, StateLiteral, Strategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {pos}: {kind}")]
pub struct ParseError {
    pub pos: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UndeclaredAction(String),
    UnknownDatum(String),
    UnexpectedVariable(String),
    InvalidHistory(String),
    BadState(String),
    PositionOutOfRange { pos: usize, arity: usize },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => f.write_str(m),
            ParseErrorKind::UndeclaredAction(a) => write!(f, "undeclared action {a}"),
            ParseErrorKind::UnknownDatum(d) => write!(f, "no process bound to datum {d}"),
            ParseErrorKind::UnexpectedVariable(x) => write!(f, "variable {x} is not allowed here"),
            ParseErrorKind::InvalidHistory(m) => write!(f, "invalid history: {m}"),
            ParseErrorKind::BadState(m) => f.write_str(m),
            ParseErrorKind::PositionOutOfRange { pos, arity } => {
                write!(f, "position {pos} outside 1..={arity}")
            }
        }
    }
}

/// What a term may refer to.
#[derive(Clone, Copy)]
pub struct Signature<'a> {
    /// Declared plain actions; `None` accepts any.
    pub actions: Option<&'a BTreeSet<Action>>,
    /// Data usable in `cr(d)` and `rcr(d)`; `None` accepts any.
    pub data: Option<&'a BTreeSet<Name>>,
    /// Variables allowed in the term.
    pub vars: Option<&'a HashSet<Name>>,
    pub strategy: &'a dyn Strategy,
}

pub fn parse_term(src: &str, sig: Signature<'_>) -> Result<Term, ParseError> {
    let mut p = Parser { src, pos: 0, sig };
    let t = p.alt()?;
    p.ws();
    if p.pos < src.len() {
        return Err(p.syntax("unexpected input after the term"));
    }
    Ok(canonicalize(&t))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    sig: Signature<'a>,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn ws(&mut self) {
        let skipped = self.rest().len() - self.rest().trim_start().len();
        self.pos += skipped;
    }

    fn error(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { pos, kind }
    }

    fn syntax(&self, msg: &str) -> ParseError {
        self.error(self.pos, ParseErrorKind::Syntax(msg.to_string()))
    }

    /// Consumes `tok` (after whitespace) if present.
    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{tok}`")))
        }
    }

    fn ident(&mut self) -> Result<(usize, &'a str), ParseError> {
        self.ws();
        let start = self.pos;
        let rest = &self.src[self.pos..];
        let mut len = rest
            .char_indices()
            .find(|&(k, c)| {
                !(c.is_ascii_alphanumeric() || c == '_' || (k > 0 && c == '\''))
                    || (k == 0 && c.is_ascii_digit())
            })
            .map_or(rest.len(), |(k, _)| k);
        if len == 0 {
            return Err(self.syntax("expected an identifier"));
        }
        // Generated variables carry a `$k` suffix.
        if rest.starts_with(|c: char| c.is_ascii_uppercase()) && rest[len..].starts_with('$') {
            let digits = rest[len + 1..]
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(rest.len() - len - 1);
            if digits > 0 {
                len += 1 + digits;
            }
        }
        self.pos += len;
        Ok((start, &self.src[start..start + len]))
    }

    fn nat(&mut self) -> Result<usize, ParseError> {
        self.ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        let n = self.rest()[..len]
            .parse()
            .map_err(|_| self.syntax("expected a number"))?;
        self.pos += len;
        Ok(n)
    }

    fn alt(&mut self) -> Result<Term, ParseError> {
        let mut xs = vec![self.merge()?];
        while self.eat("+") {
            xs.push(self.merge()?);
        }
        Ok(Term::alt(xs))
    }

    fn merge(&mut self) -> Result<Term, ParseError> {
        let mut t = self.seq()?;
        loop {
            let make: fn(Term, Term) -> Term = if self.eat("||") {
                Term::par
            } else if self.eat("|L") {
                Term::left_merge
            } else if self.eat("|C") {
                Term::comm_merge
            } else {
                return Ok(t);
            };
            t = make(t, self.seq()?);
        }
    }

    fn seq(&mut self) -> Result<Term, ParseError> {
        let mut xs = vec![self.primary()?];
        while self.eat(".") {
            xs.push(self.primary()?);
        }
        Ok(Term::seq(xs))
    }

    fn datum(&mut self) -> Result<Name, ParseError> {
        self.expect("(")?;
        let (at, d) = self.ident()?;
        let d: Name = d.into();
        if self.sig.data.is_some_and(|ds| !ds.contains(&d)) {
            return Err(self.error(at, ParseErrorKind::UnknownDatum(d.to_string())));
        }
        self.expect(")")?;
        Ok(d)
    }

    fn action(&mut self) -> Result<Action, ParseError> {
        let (at, name) = self.ident()?;
        let a = match name {
            "cr" => Action::CreateRequest(self.datum()?),
            "rcr" => Action::CreateAct(self.datum()?),
            _ if is_action_name(name) => Action::plain(name),
            _ => return Err(self.error(at, ParseErrorKind::Syntax(format!("`{name}` is not an action")))),
        };
        self.check_declared(at, &a)?;
        Ok(a)
    }

    fn check_declared(&self, at: usize, a: &Action) -> Result<(), ParseError> {
        if let (Action::Plain(_), Some(acts)) = (a, self.sig.actions) {
            if !acts.contains(a) {
                return Err(self.error(at, ParseErrorKind::UndeclaredAction(a.to_string())));
            }
        }
        Ok(())
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        self.ws();
        if self.eat("(") {
            let t = self.alt()?;
            self.expect(")")?;
            return Ok(t);
        }
        if self.eat("<") {
            let (_, x) = self.ident()?;
            let x = x.to_string();
            self.expect("|")?;
            let (_, p) = self.ident()?;
            let p = p.to_string();
            self.expect(">")?;
            return Ok(Term::rec(&x, &p));
        }
        let save = self.pos;
        let (at, word) = self.ident()?;
        match word {
            "delta" => Ok(Term::delta()),
            "cr" | "rcr" => {
                self.pos = save;
                Ok(Term::action(self.action()?))
            }
            "encap" => {
                self.expect("{")?;
                let mut blocked = BTreeSet::new();
                if !self.eat("}") {
                    loop {
                        blocked.insert(self.action()?);
                        if self.eat("}") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                self.expect("(")?;
                let t = self.alt()?;
                self.expect(")")?;
                Ok(Term::encap(Arc::new(blocked), t))
            }
            "si" => {
                let (h, s, procs) = self.operands()?;
                Ok(Term::si(h, s, procs))
            }
            "posm" => {
                self.expect("[")?;
                let ipos = self.pos;
                let i = self.nat()?;
                self.expect("]")?;
                let (h, s, procs) = self.operands()?;
                if i == 0 || i > procs.len() {
                    let kind = ParseErrorKind::PositionOutOfRange {
                        pos: i,
                        arity: procs.len(),
                    };
                    return Err(self.error(ipos, kind));
                }
                Ok(Term::posm(i, h, s, procs))
            }
            w if w.starts_with(|c: char| c.is_ascii_uppercase()) => {
                let x: Name = w.into();
                if self.sig.vars.is_some_and(|vs| !vs.contains(&x)) {
                    return Err(self.error(at, ParseErrorKind::UnexpectedVariable(w.to_string())));
                }
                Ok(Term::var(w))
            }
            _ => {
                self.pos = save;
                Ok(Term::action(self.action()?))
            }
        }
    }

    fn operands(&mut self) -> Result<(History, StateLiteral, Vec<Term>), ParseError> {
        let mut h = History::empty();
        if self.rest().starts_with("@[") {
            let at = self.pos;
            self.pos += 2;
            let mut entries = Vec::new();
            while !self.eat("]") {
                self.expect("(")?;
                let i = self.nat()?;
                self.expect(",")?;
                let n = self.nat()?;
                self.expect(")")?;
                entries.push((i, n));
            }
            h = History::validate(&entries)
                .map_err(|e| self.error(at, ParseErrorKind::InvalidHistory(e.to_string())))?;
        }
        let mut s = StateLiteral::init();
        if self.rest().starts_with('$') {
            let at = self.pos;
            self.pos += 1;
            let len = self
                .rest()
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == ':' || c == ','))
                .unwrap_or(self.rest().len());
            if len == 0 {
                return Err(self.syntax("expected a control state after `$`"));
            }
            let raw = StateLiteral::new(&self.rest()[..len]);
            self.pos += len;
            s = self
                .sig
                .strategy
                .canonical_state(&raw)
                .map_err(|e| self.error(at, ParseErrorKind::BadState(e.to_string())))?;
        }
        self.expect("(")?;
        let mut procs = vec![self.alt()?];
        while self.eat(",") {
            procs.push(self.alt()?);
        }
        self.expect(")")?;
        Ok((h, s, procs))
    }
}
