//! Definitions files.
//!
//! ```text
//! # comment
//! acts a, b, c
//! gamma a b = c
//! proc d = a . cr(d)
//! spec P { X = a . Y ; Y = b . X }
//! strategy round-robin
//! policy halt
//! ```
//!
//! A `spec` block may span several lines.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use thiserror::Error;

use super::parse::{parse_term, ParseError, Signature};
use crate::context::Context;
use crate::kernel::{is_action_name, Action, CommTable, Name, Term};
use crate::recursion::{check_guarded, Guardedness, RecSpec};
use crate::strategies::{Policy, Registry, RoundRobin, Strategy};

/// Rewrite steps allowed when deciding guardedness of a right-hand side.
pub const GUARD_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DefsError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DefsOptions {
    /// Allow recursion constants in the processes bound to data.
    pub extended_phi: bool,
}

#[derive(Clone, Debug)]
pub struct DefsFile {
    pub comm: CommTable,
    pub phi: BTreeMap<Name, Term>,
    pub specs: Vec<RecSpec>,
    pub strategy: Option<String>,
    pub policy: Option<Policy>,
}

impl DefsFile {
    pub fn data(&self) -> BTreeSet<Name> {
        self.phi.keys().cloned().collect()
    }

    pub fn context(&self, strategy: Arc<dyn Strategy>) -> Context {
        Context::new(self.comm.clone(), self.phi.clone(), self.specs.clone(), strategy)
    }
}

enum Item {
    Proc { line: usize, datum: Name, body: String },
    Spec { line: usize, name: Name, body: String },
}

fn err(line: usize, message: impl Into<String>) -> DefsError {
    DefsError {
        line,
        message: message.into(),
    }
}

fn parse_action(line: usize, word: &str, acts: &BTreeSet<Action>) -> Result<Option<Action>, DefsError> {
    if word == "delta" {
        return Ok(None);
    }
    let a = if let Some(d) = word.strip_prefix("cr(").and_then(|w| w.strip_suffix(')')) {
        Action::request(d)
    } else if let Some(d) = word.strip_prefix("rcr(").and_then(|w| w.strip_suffix(')')) {
        Action::create(d)
    } else if is_action_name(word) {
        Action::plain(word)
    } else {
        return Err(err(line, format!("`{word}` is not an action")));
    };
    if matches!(a, Action::Plain(_)) && !acts.contains(&a) {
        return Err(err(line, format!("undeclared action {a}")));
    }
    Ok(Some(a))
}

fn located(line: usize, e: ParseError) -> DefsError {
    err(line, e.to_string())
}

pub fn parse_defs(src: &str, registry: &Registry, opts: DefsOptions) -> Result<DefsFile, DefsError> {
    let mut acts = BTreeSet::new();
    let mut gammas: Vec<(usize, String, String, String)> = Vec::new();
    let mut items = Vec::new();
    let mut strategy = None;
    let mut policy = None;

    let lines: Vec<&str> = src.lines().collect();
    let mut k = 0;
    while k < lines.len() {
        let line = k + 1;
        let text = lines[k].split('#').next().unwrap().trim();
        k += 1;
        if text.is_empty() {
            continue;
        }
        let (kw, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        match kw {
            "acts" => {
                for w in rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|w| !w.is_empty()) {
                    if !is_action_name(w) {
                        return Err(err(line, format!("`{w}` is not a valid action name")));
                    }
                    acts.insert(Action::plain(w));
                }
            }
            "gamma" => {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| err(line, "expected `gamma a b = c`"))?;
                let ops: Vec<&str> = lhs.split_whitespace().collect();
                let [a, b] = ops[..] else {
                    return Err(err(line, "expected two actions before `=`"));
                };
                gammas.push((line, a.into(), b.into(), rhs.trim().into()));
            }
            "proc" => {
                let (d, body) = rest
                    .split_once('=')
                    .ok_or_else(|| err(line, "expected `proc d = term`"))?;
                let d = d.trim();
                if !is_action_name(d) {
                    return Err(err(line, format!("`{d}` is not a valid datum name")));
                }
                items.push(Item::Proc {
                    line,
                    datum: d.into(),
                    body: body.trim().into(),
                });
            }
            "spec" => {
                let mut block = rest.to_string();
                while closing_brace(&block).is_none() {
                    let Some(next) = lines.get(k) else {
                        return Err(err(line, "unterminated spec block"));
                    };
                    block.push(' ');
                    block.push_str(next.split('#').next().unwrap());
                    k += 1;
                }
                let (name, _) = block
                    .split_once('{')
                    .ok_or_else(|| err(line, "expected `spec P { X = term ; ... }`"))?;
                let end = closing_brace(&block).unwrap();
                let body = &block[name.len() + 1..end];
                if !block[end + 1..].trim().is_empty() {
                    return Err(err(line, "unexpected text after `}`"));
                }
                items.push(Item::Spec {
                    line,
                    name: name.trim().into(),
                    body: body.into(),
                });
            }
            "strategy" => {
                if registry.get(rest).is_none() {
                    let known: Vec<&str> = registry.names().collect();
                    return Err(err(line, format!("unknown strategy `{rest}` (known: {})", known.join(", "))));
                }
                strategy = Some(rest.to_string());
            }
            "policy" => policy = Some(rest.parse::<Policy>().map_err(|e| err(line, e))?),
            _ => return Err(err(line, format!("unknown declaration `{kw}`"))),
        }
    }

    let mut comm = CommTable::new(acts.iter().cloned());
    for (line, a, b, c) in &gammas {
        let a = parse_action(*line, a, &acts)?.ok_or_else(|| err(*line, "delta cannot communicate"))?;
        let b = parse_action(*line, b, &acts)?.ok_or_else(|| err(*line, "delta cannot communicate"))?;
        let c = parse_action(*line, c, &acts)?;
        comm.insert(a, b, c);
    }
    if let Err(violations) = comm.validate() {
        let line = gammas.first().map_or(1, |g| g.0);
        let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(err(line, format!("communication function: {}", msgs.join("; "))));
    }

    let strat: Arc<dyn Strategy> = match &strategy {
        Some(name) => registry.get(name).unwrap(),
        None => Arc::new(RoundRobin),
    };
    let data: BTreeSet<Name> = items
        .iter()
        .filter_map(|it| match it {
            Item::Proc { datum, .. } => Some(datum.clone()),
            _ => None,
        })
        .collect();
    let sig = Signature {
        actions: Some(&acts),
        data: Some(&data),
        vars: None,
        strategy: strat.as_ref(),
    };

    let mut phi = BTreeMap::new();
    let mut specs = Vec::new();
    let mut spec_lines = Vec::new();
    for item in &items {
        match item {
            Item::Proc { line, datum, body } => {
                let none = HashSet::new();
                let t = parse_term(body, Signature { vars: Some(&none), ..sig })
                    .map_err(|e| located(*line, e))?;
                if t.has_recursion() && !opts.extended_phi {
                    return Err(err(
                        *line,
                        format!("process for {datum} uses recursion constants (allowed with --extended-phi)"),
                    ));
                }
                if phi.insert(datum.clone(), t).is_some() {
                    return Err(err(*line, format!("datum {datum} bound twice")));
                }
            }
            Item::Spec { line, name, body } => {
                let eqs: Vec<(&str, &str)> = body
                    .split(';')
                    .filter(|e| !e.trim().is_empty())
                    .map(|e| e.split_once('=').map(|(x, t)| (x.trim(), t.trim())))
                    .collect::<Option<_>>()
                    .ok_or_else(|| err(*line, "expected `X = term` equations separated by `;`"))?;
                let vars: HashSet<Name> = eqs.iter().map(|(x, _)| Name::from(*x)).collect();
                let mut equations = Vec::new();
                for (x, src) in eqs {
                    if !x.starts_with(|c: char| c.is_ascii_uppercase()) {
                        return Err(err(*line, format!("`{x}` is not a variable name")));
                    }
                    let t = parse_term(src, Signature { vars: Some(&vars), ..sig })
                        .map_err(|e| located(*line, e))?;
                    equations.push((Name::from(x), t));
                }
                let spec = RecSpec::new(name, equations).map_err(|e| err(*line, e.to_string()))?;
                if specs.iter().any(|s: &RecSpec| s.name == spec.name) {
                    return Err(err(*line, format!("specification {name} defined twice")));
                }
                specs.push(spec);
                spec_lines.push(*line);
            }
        }
    }

    let defs = DefsFile {
        comm,
        phi,
        specs,
        strategy,
        policy,
    };
    let ctx = defs.context(strat);
    for (spec, line) in defs.specs.iter().zip(spec_lines) {
        for r in referenced_specs(spec) {
            if ctx.spec(&r.0).map(|s| !s.equations.contains_key(&r.1)).unwrap_or(true) {
                return Err(err(line, format!("unknown recursion constant <{}|{}>", r.1, r.0)));
            }
        }
        match check_guarded(&ctx, spec, GUARD_BUDGET) {
            Guardedness::Guarded => {}
            Guardedness::Unguarded { var, body } => {
                return Err(err(line, format!("equation {var} = {body} is not guarded")));
            }
            Guardedness::BudgetExhausted { var, .. } => {
                return Err(err(line, format!("could not establish that equation {var} is guarded")));
            }
        }
    }
    for (d, t) in &defs.phi {
        for r in referenced_terms(t) {
            if ctx.spec(&r.0).map(|s| !s.equations.contains_key(&r.1)).unwrap_or(true) {
                let line = items
                    .iter()
                    .find_map(|it| match it {
                        Item::Proc { line, datum, .. } if datum == d => Some(*line),
                        _ => None,
                    })
                    .unwrap();
                return Err(err(line, format!("unknown recursion constant <{}|{}>", r.1, r.0)));
            }
        }
    }
    Ok(defs)
}

/// Byte offset of the `}` matching the first `{`.
fn closing_brace(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (k, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' if depth == 1 => return Some(k),
            '}' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    None
}

/// `(spec, var)` of every recursion constant in `t`.
fn referenced_terms(t: &Term) -> Vec<(Name, Name)> {
    let mut out = Vec::new();
    t.for_each(&mut |u| {
        if let crate::kernel::Node::Rec(r) = u.node() {
            out.push((r.spec.clone(), r.var.clone()));
        }
    });
    out
}

fn referenced_specs(spec: &RecSpec) -> Vec<(Name, Name)> {
    spec.equations.values().flat_map(referenced_terms).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Result<DefsFile, DefsError> {
        parse_defs(src, &Registry::default(), DefsOptions::default())
    }

    #[test]
    fn minimal() {
        let d = parse("acts a\n").unwrap();
        assert_eq!(d.comm.alphabet().len(), 1);
        assert!(d.comm.is_empty() && d.specs.is_empty());
    }

    #[test]
    fn full_file() {
        let src = "# example\nacts a, b, c\ngamma a b = c\nproc d = b\n\
                   spec P {\n  X = a . Y ;\n  Y = b . X\n}\nstrategy aging\npolicy defer\n";
        let d = parse(src).unwrap();
        assert_eq!(d.comm.len(), 1);
        assert_eq!(d.phi[&Name::from("d")], Term::act("b"));
        assert_eq!(d.specs[0].equations.len(), 2);
        assert_eq!(d.strategy.as_deref(), Some("aging"));
        assert_eq!(d.policy, Some(Policy::Defer));
    }

    #[test]
    fn undeclared_result() {
        let e = parse("acts a, b\ngamma a b = c\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("undeclared"));
    }

    #[test]
    fn unguarded_spec() {
        let e = parse("acts a\n\nspec P { X = X + a }\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("not guarded"));
    }

    #[test]
    fn guarded_after_rewriting() {
        assert!(parse("acts a, b\nspec P { X = (a + b) . X }\n").is_ok());
        assert!(parse("acts a, b\nspec P {\n X = encap{b}(a + b) . X }\n").is_ok());
    }

    #[test]
    fn bad_lines() {
        assert_eq!(parse("acts a\nfrobnicate\n").unwrap_err().line, 2);
        assert_eq!(parse("acts a\nproc d = b\n").unwrap_err().line, 2);
        assert_eq!(parse("acts a\nspec P { X = a . <Y|P> }\n").unwrap_err().line, 2);
        assert!(parse("acts a\nstrategy lottery\n").is_err());
        assert!(parse("acts a\nspec P { X = a . X\n").is_err());
    }

    #[test]
    fn gamma_must_not_create() {
        let e = parse("acts a, b\nproc d = a\ngamma a b = cr(d)\n").unwrap_err();
        assert!(e.message.contains("communication function"));
    }

    #[test]
    fn recursion_in_phi_needs_flag() {
        let src = "acts a\nspec P { X = a . X }\nproc d = <X|P>\n";
        assert_eq!(parse(src).unwrap_err().line, 3);
        let opts = DefsOptions { extended_phi: true };
        assert!(parse_defs(src, &Registry::default(), opts).is_ok());
    }
}
