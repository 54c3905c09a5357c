use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use super::defs::{parse_defs, DefsFile, DefsOptions};
use super::parse::{parse_term, Signature};
use crate::context::Context;
use crate::kernel::{Action, CommTable, Term};
use crate::recursion::{reduce_spec, ReduceError};
use crate::rewrite::{
    eliminate, has_user_creation_act, head_normal_form, normalize_with, theta_check, RedexOrder,
    RewriteError, RuleSet, DEFAULT_STEP_BUDGET,
};
use crate::semantics::{
    bisimilar, bounded_bisimilar, build_lts, enumerate_traces, export_dot, Dest, SosError,
};
use crate::strategies::{Policy, Registry, Strategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "siacp", version, about = "Process algebra with strategic interleaving")]
struct Cli {
    /// Definitions file with actions, communications, data and specifications.
    #[arg(long, global = true, value_name = "FILE")]
    defs: Option<PathBuf>,
    /// Interleaving strategy (round-robin, aging).
    #[arg(long, global = true)]
    strategy: Option<String>,
    /// What a deadlocked scheduled process does: halt or defer.
    #[arg(long, global = true)]
    policy: Option<Policy>,
    /// Maximum number of rewrite steps.
    #[arg(long, global = true, default_value_t = DEFAULT_STEP_BUDGET)]
    budget: usize,
    /// Maximum number of equations produced when reducing a specification.
    #[arg(long, global = true, default_value_t = 500)]
    max_equations: usize,
    /// Check the termination measure at every step and compare results
    /// against the operational semantics.
    #[arg(long, global = true)]
    verify: bool,
    /// Allow recursion constants in the processes bound to data.
    #[arg(long, global = true)]
    extended_phi: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rewrite a term to normal form.
    Normalize { term: String },
    /// Rewrite a term to one built from actions, delta, + and . only.
    Eliminate { term: String },
    /// Compute a head normal form.
    Hnf { term: String },
    /// Build the transition system of a term.
    Lts {
        term: String,
        /// Write the system in Graphviz format to FILE.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        max_states: usize,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Decide strong bisimilarity of two terms.
    Bisim {
        left: String,
        right: String,
        #[arg(long, default_value_t = 10_000)]
        max_states: usize,
    },
    /// List the maximal runs of a term.
    Trace {
        term: String,
        #[arg(long, default_value_t = 20)]
        max_len: usize,
        #[arg(long, default_value_t = 1_000)]
        max_traces: usize,
    },
    /// Reduce a specification to one without interleaving.
    ReduceSpec { spec: String, var: String },
    /// Validate a definitions file.
    Check { file: PathBuf },
}

/// A failed command: exit code and message.
struct Failure(i32, String);

impl Failure {
    fn input(msg: impl ToString) -> Failure {
        Failure(EXIT_INPUT, msg.to_string())
    }
}

impl From<RewriteError> for Failure {
    fn from(e: RewriteError) -> Failure {
        let code = match &e {
            RewriteError::BudgetExhausted { .. } | RewriteError::TooDeep { .. } | RewriteError::HnfBudget(_) => EXIT_BUDGET,
            RewriteError::NotEliminated(_) | RewriteError::MeasureIncrease { .. } => EXIT_INVARIANT,
            RewriteError::Reduce(r) => return Failure::from((**r).clone()),
            _ => EXIT_INPUT,
        };
        Failure(code, e.to_string())
    }
}

impl From<ReduceError> for Failure {
    fn from(e: ReduceError) -> Failure {
        match e {
            ReduceError::Rewrite(r) => Failure::from(r),
            ReduceError::BudgetExhausted(ref p) => {
                let mut msg = format!("{e}\npartial result:\nspec {} {{\n", p.name);
                for (x, t) in &p.equations {
                    msg.push_str(&format!("  {x} = {t} ;\n"));
                }
                msg.push_str("}\nfrontier:\n");
                for (x, t) in &p.frontier {
                    msg.push_str(&format!("  {x} = {t}\n"));
                }
                Failure(EXIT_BUDGET, msg.trim_end().to_string())
            }
            ReduceError::Context(c) => Failure::input(c),
        }
    }
}

impl From<SosError> for Failure {
    fn from(e: SosError) -> Failure {
        let code = match e {
            SosError::Unguarded(_) => EXIT_BUDGET,
            _ => EXIT_INPUT,
        };
        Failure(code, e.to_string())
    }
}

struct Session {
    ctx: Context,
    defs: Option<DefsFile>,
    strategy: Arc<dyn Strategy>,
    policy: Policy,
    budget: usize,
    max_equations: usize,
    verify: bool,
}

impl Session {
    fn open(cli: &Cli, registry: &Registry) -> Result<Session, Failure> {
        let opts = DefsOptions {
            extended_phi: cli.extended_phi,
        };
        let defs = match &cli.defs {
            Some(path) => {
                let src = std::fs::read_to_string(path)
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                let d = parse_defs(&src, registry, opts)
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                Some(d)
            }
            None => None,
        };
        let name = cli
            .strategy
            .clone()
            .or_else(|| defs.as_ref().and_then(|d| d.strategy.clone()))
            .unwrap_or_else(|| "round-robin".into());
        let strategy = registry.get(&name).ok_or_else(|| {
            let known: Vec<&str> = registry.names().collect();
            Failure::input(format!("unknown strategy `{name}` (known: {})", known.join(", ")))
        })?;
        let policy = cli
            .policy
            .or_else(|| defs.as_ref().and_then(|d| d.policy))
            .unwrap_or_default();
        let ctx = match &defs {
            Some(d) => d.context(strategy.clone()),
            None => Context::default().with_strategy(strategy.clone()),
        };
        Ok(Session {
            ctx,
            defs,
            strategy,
            policy,
            budget: cli.budget,
            max_equations: cli.max_equations,
            verify: cli.verify,
        })
    }

    /// Parses a command-line term. Without a definitions file every action
    /// is accepted and gets declared on the fly.
    fn term(&mut self, src: &str, err: &mut dyn Write) -> Result<Term, Failure> {
        let none = std::collections::HashSet::new();
        let acts = self.defs.as_ref().map(|d| d.comm.alphabet().clone());
        let data = self.defs.as_ref().map(DefsFile::data);
        let sig = Signature {
            actions: acts.as_ref(),
            data: data.as_ref(),
            vars: Some(&none),
            strategy: self.strategy.as_ref(),
        };
        let t = parse_term(src, sig).map_err(|e| Failure::input(format!("`{src}`: {e}")))?;
        if self.defs.is_none() {
            let mut seen = BTreeSet::new();
            t.for_each(&mut |u| {
                if let Some(a @ Action::Plain(_)) = u.as_action() {
                    seen.insert(a.clone());
                }
            });
            let mut comm: CommTable = self.ctx.comm.clone();
            seen.into_iter().for_each(|a| comm.declare(a));
            self.ctx.comm = comm;
        }
        let mut unknown = None;
        t.for_each(&mut |u| {
            if let crate::kernel::Node::Rec(r) = u.node() {
                let ok = self.ctx.spec(&r.spec).is_ok_and(|s| s.equations.contains_key(&r.var));
                if !ok && unknown.is_none() {
                    unknown = Some(format!("<{}|{}>", r.var, r.spec));
                }
            }
        });
        if let Some(c) = unknown {
            return Err(Failure::input(format!("unknown recursion constant {c}")));
        }
        if has_user_creation_act(&t) {
            writeln!(
                err,
                "warning: rcr(d) performed by an interleaved process is treated as an ordinary action"
            )
            .ok();
        }
        Ok(t)
    }

    fn rules(&self) -> RuleSet {
        RuleSet::siacp(self.policy)
    }

    fn require_halt(&self, what: &str) -> Result<(), Failure> {
        match self.policy {
            Policy::Halt => Ok(()),
            Policy::Defer => Err(Failure::input(format!(
                "{what} needs the halt policy: the defer policy has no operational semantics"
            ))),
        }
    }

    fn normal_form(&self, t: &Term, err: &mut dyn Write) -> Result<Term, Failure> {
        let rs = self.rules();
        let nf = if self.verify && self.policy == Policy::Halt && self.ctx.theta(t).is_ok() {
            let mut check = theta_check(&self.ctx);
            normalize_with(&self.ctx, &rs, RedexOrder::Innermost, t, self.budget, &mut check)?.term
        } else {
            if self.verify {
                writeln!(err, "note: measure check skipped").ok();
            }
            normalize_with(&self.ctx, &rs, RedexOrder::Innermost, t, self.budget, &mut |_, _| Ok(()))?
                .term
        };
        if self.verify {
            self.agree(t, &nf)?;
        }
        Ok(nf)
    }

    /// Checks that rewriting preserved the behaviour.
    fn agree(&self, t: &Term, u: &Term) -> Result<(), Failure> {
        if self.policy != Policy::Halt {
            return Ok(());
        }
        let r = bisimilar(&self.ctx, t, u, 10_000)?;
        if !r.truncated && !r.verdict.holds() {
            return Err(Failure(
                EXIT_INVARIANT,
                format!("invariant violation: {t} and its normal form {u} are {r}"),
            ));
        }
        Ok(())
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let registry = Registry::default();
    if let Command::Check { file } = &cli.command {
        let src = std::fs::read_to_string(file)
            .map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
        let opts = DefsOptions {
            extended_phi: cli.extended_phi,
        };
        let d = parse_defs(&src, &registry, opts)
            .map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
        writeln!(
            out,
            "ok: {} actions, {} communications, {} data, {} specifications",
            d.comm.alphabet().len(),
            d.comm.len(),
            d.phi.len(),
            d.specs.len()
        )
        .ok();
        return Ok(EXIT_OK);
    }

    let mut s = Session::open(&cli, &registry)?;
    match &cli.command {
        Command::Normalize { term } => {
            let t = s.term(term, err)?;
            let nf = s.normal_form(&t, err)?;
            writeln!(out, "{nf}").ok();
        }
        Command::Eliminate { term } => {
            let t = s.term(term, err)?;
            if s.verify && !t.has_recursion() {
                s.normal_form(&t, err)?;
            }
            let e = eliminate(&s.ctx, &s.rules(), &t, s.budget, s.max_equations)?;
            if s.verify && !e.specs.is_empty() {
                let ctx = s.ctx.with_specs(e.specs.clone());
                let r = bounded_bisimilar(&ctx, &t, &e.term, 6, 10_000)?;
                if !r.verdict.holds() {
                    return Err(Failure(EXIT_INVARIANT, format!("invariant violation: elimination is {r}")));
                }
            }
            writeln!(out, "{}", e.term).ok();
            for spec in &e.specs {
                writeln!(out, "{spec}").ok();
            }
        }
        Command::Hnf { term } => {
            let t = s.term(term, err)?;
            let h = head_normal_form(&s.ctx, s.policy, &t, s.budget)?;
            writeln!(out, "{h}").ok();
        }
        Command::Lts {
            term,
            dot,
            max_states,
            max_depth,
        } => {
            s.require_halt("lts")?;
            let t = s.term(term, err)?;
            let l = build_lts(&s.ctx, &t, *max_states, max_depth.unwrap_or(usize::MAX))?;
            writeln!(
                out,
                "states: {}\ntransitions: {}\ntruncated: {}",
                l.states.len(),
                l.transitions.len(),
                l.truncated.len()
            )
            .ok();
            for (k, st) in l.states.iter().enumerate() {
                let mark = if l.truncated.contains(&k) { " (truncated)" } else { "" };
                writeln!(out, "s{k} = {st}{mark}").ok();
            }
            for (p, a, d) in &l.transitions {
                match d {
                    Dest::Tick => writeln!(out, "s{p} -{a}-> \u{2713}").ok(),
                    Dest::State(q) => writeln!(out, "s{p} -{a}-> s{q}").ok(),
                };
            }
            if let Some(path) = dot {
                std::fs::write(path, export_dot(&l))
                    .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            }
        }
        Command::Bisim {
            left,
            right,
            max_states,
        } => {
            s.require_halt("bisim")?;
            let (x, y) = (s.term(left, err)?, s.term(right, err)?);
            let r = bisimilar(&s.ctx, &x, &y, *max_states)?;
            writeln!(out, "{r}").ok();
            if r.truncated {
                return Ok(EXIT_BUDGET);
            }
        }
        Command::Trace {
            term,
            max_len,
            max_traces,
        } => {
            s.require_halt("trace")?;
            let t = s.term(term, err)?;
            for tr in enumerate_traces(&s.ctx, &t, *max_len, *max_traces)? {
                writeln!(out, "{tr}").ok();
            }
        }
        Command::ReduceSpec { spec, var } => {
            let r = reduce_spec(&s.ctx, s.policy, spec, var, s.max_equations)?;
            if s.verify && s.policy == Policy::Halt {
                let ctx = s.ctx.with_specs([r.spec.clone()]);
                let res = bounded_bisimilar(&ctx, &Term::rec(var, spec), &r.term(), 6, 10_000)?;
                if !res.verdict.holds() {
                    return Err(Failure(EXIT_INVARIANT, format!("invariant violation: reduction is {res}")));
                }
            }
            writeln!(out, "{}\n{}", r.term(), r.spec).ok();
        }
        Command::Check { .. } => unreachable!(),
    }
    Ok(EXIT_OK)
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run_command<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                write!(err, "{text}").ok();
            } else {
                write!(out, "{text}").ok();
            }
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            writeln!(err, "error: {msg}").ok();
            code
        }
    }
}
