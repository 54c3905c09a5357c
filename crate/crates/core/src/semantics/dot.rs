use std::fmt::Write;

use super::lts::{Dest, Lts};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering of `l`.
pub fn export_dot(l: &Lts) -> String {
    let mut out = String::from("digraph lts {\n  node [shape=circle];\n");
    for (k, t) in l.states.iter().enumerate() {
        let mut attrs = vec![format!("label={}", quote(&t.to_string()))];
        if k == Lts::ROOT {
            attrs.push("shape=doublecircle".into());
        }
        if l.truncated.contains(&k) {
            attrs.push("style=dashed".into());
        }
        writeln!(out, "  s{k} [{}];", attrs.join(", ")).unwrap();
    }
    if l.transitions.iter().any(|(_, _, d)| *d == Dest::Tick) {
        out.push_str("  tick [label=\"\u{2713}\", shape=box];\n");
    }
    for (p, a, d) in &l.transitions {
        let target = match d {
            Dest::Tick => "tick".to_string(),
            Dest::State(q) => format!("s{q}"),
        };
        writeln!(out, "  s{p} -> {target} [label={}];", quote(&a.to_string())).unwrap();
    }
    out.push_str("}\n");
    out
}
