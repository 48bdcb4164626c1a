//! The `chasekit` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::chase::{chase_general, entails, ChaseMode, ChaseOptions, ChaseStatus, ChaseTrace, Entailment};
use crate::error::Error;
use crate::normalize::{eliminate_equality, eliminate_functions, normalize_theory};
use crate::proofs::{
    abstract_constants, check_derivation, eliminate_diagram_constants, parse_derivation, print_derivation,
};
use crate::semantics::{diagram, evaluate, parse_structure, Elem, Env, Structure};
use crate::syntax::{Signature, Theory};
use crate::text::{parse_formula_in_context, parse_query, parse_theory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "chasekit", version, about = "Chase, entailment and derivation tools for regular theories")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report to this file instead of standard output.
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct ChaseArgs {
    /// Maximum number of chase levels to build.
    #[arg(long, default_value_t = 20)]
    fuel: usize,
    /// Re-fire every trigger at every level.
    #[arg(long)]
    faithful: bool,
    /// Compute triggers on several threads.
    #[arg(long)]
    parallel: bool,
}

impl ChaseArgs {
    fn options(self) -> ChaseOptions {
        ChaseOptions {
            fuel: self.fuel,
            mode: if self.faithful { ChaseMode::Faithful } else { ChaseMode::Lean },
            parallel: self.parallel,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the theory with every axiom in normal form.
    Normalize { theory: String },
    /// Replace function symbols by graph relations.
    ElimFn { theory: String },
    /// Replace equality by a congruence relation.
    ElimEq { theory: String },
    /// Evaluate a formula in a structure.
    Eval {
        structure: String,
        formula: String,
        /// Values of free variables, e.g. `x=a,y=b`.
        #[arg(long, value_delimiter = ',')]
        assign: Vec<String>,
    },
    /// Print the diagram of a structure as a theory.
    Diagram { structure: String },
    /// Chase a structure with a theory.
    Chase {
        theory: String,
        structure: String,
        #[command(flatten)]
        opts: ChaseArgs,
        /// Also print the firings that built each level.
        #[arg(long)]
        trace: bool,
    },
    /// Decide `φ |-[x̄] ψ1 | … | ψn` by chasing the antecedent.
    Entails {
        theory: String,
        sequent: String,
        #[command(flatten)]
        opts: ChaseArgs,
    },
    /// Explain a formula true in the chase by one true in the structure.
    Witness {
        theory: String,
        structure: String,
        formula: String,
        /// Elements for the free variables, in order of first occurrence.
        #[arg(long, value_delimiter = ',')]
        at: Vec<String>,
        #[command(flatten)]
        opts: ChaseArgs,
    },
    /// Check a derivation file against a theory.
    Check { theory: String, derivation: String },
    /// Replace the given constants in a derivation by variables.
    Abstract {
        theory: String,
        derivation: String,
        #[arg(long, value_delimiter = ',', required = true)]
        constants: Vec<String>,
    },
    /// Remove diagram axioms from a derivation in the theory plus a diagram.
    ElimDiagram {
        theory: String,
        structure: String,
        derivation: String,
    },
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn at(file: &str, e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_DATA,
        };
        let message = match &e {
            Error::Parse { .. } => format!("{file}:{e}"),
            _ => format!("{file}: {e}"),
        };
        Failure { code, message }
    }

    fn plain(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_DATA,
        };
        Failure { code, message: e.to_string() }
    }
}

/// Output of a command: text, its JSON mirror and the exit code.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

type Outcome = Result<Report, Failure>;

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(report) => {
            let body = if cli.json {
                format!("{}\n", serde_json::to_string_pretty(&report.json).unwrap())
            } else {
                report.text
            };
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, body) {
                        let _ = writeln!(err, "error: {}: {e}", path.display());
                        return EXIT_USAGE;
                    }
                }
                None => {
                    let _ = write!(out, "{body}");
                }
            }
            report.code
        }
        Err(f) => {
            if cli.json {
                let _ = writeln!(out, "{}", json!({ "error": f.message, "exit": f.code }));
            }
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))
}

fn load_theory(path: &str) -> Result<Theory, Failure> {
    parse_theory(&read(path)?).map_err(|e| Failure::at(path, e))
}

fn load_structure(path: &str, sig: Option<&Signature>) -> Result<Structure, Failure> {
    parse_structure(&read(path)?, sig).map_err(|e| Failure::at(path, e))
}

fn element(a: &Structure, name: &str) -> Result<Elem, Failure> {
    a.elem(name).ok_or_else(|| Failure::usage(format!("no element named `{name}`")))
}

fn ok(text: String, json: Value) -> Outcome {
    Ok(Report { text, json, code: EXIT_OK })
}

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Normalize { theory } => {
            let t = load_theory(theory)?;
            let n = normalize_theory(&t).to_theory();
            ok(n.to_string(), json!({ "theory": n.to_string() }))
        }
        Command::ElimFn { theory } => {
            let t = load_theory(theory)?;
            let fe = eliminate_functions(&t);
            ok(fe.theory.to_string(), json!({ "theory": fe.theory.to_string(), "graphs": fe.graphs }))
        }
        Command::ElimEq { theory } => {
            let t = load_theory(theory)?;
            let ee = eliminate_equality(&t).map_err(|e| Failure::at(theory, e))?;
            ok(ee.theory.to_string(), json!({ "theory": ee.theory.to_string(), "symbol": ee.symbol }))
        }
        Command::Eval { structure, formula, assign } => eval(structure, formula, assign),
        Command::Diagram { structure } => {
            let a = load_structure(structure, None)?;
            let d = diagram(&a);
            ok(d.theory.to_string(), json!({ "theory": d.theory.to_string(), "constants": d.constants }))
        }
        Command::Chase { theory, structure, opts, trace } => run_chase(theory, structure, *opts, *trace),
        Command::Entails { theory, sequent, opts } => run_entails(theory, sequent, *opts),
        Command::Witness { theory, structure, formula, at, opts } => witness(theory, structure, formula, at, *opts),
        Command::Check { theory, derivation } => {
            let t = load_theory(theory)?;
            let d = parse_derivation(&read(derivation)?, &t.signature).map_err(|e| Failure::at(derivation, e))?;
            match check_derivation(&d, &t) {
                Ok(()) => ok(format!("OK nodes={}\n", d.size()), json!({ "ok": true, "nodes": d.size() })),
                Err(f) => Ok(Report {
                    text: format!("FAILED {f}\n"),
                    json: json!({ "ok": false, "path": f.path, "message": f.message }),
                    code: EXIT_NEGATIVE,
                }),
            }
        }
        Command::Abstract { theory, derivation, constants } => {
            let t = load_theory(theory)?;
            let d = parse_derivation(&read(derivation)?, &t.signature).map_err(|e| Failure::at(derivation, e))?;
            let c: BTreeSet<String> = constants.iter().cloned().collect();
            let ab = abstract_constants(&d, &c, &t).map_err(Failure::plain)?;
            let mut text = String::new();
            for y in &ab.fresh {
                text.push_str(&format!("# {y} := {}\n", ab.assignment[y]));
            }
            let body = print_derivation(&ab.derivation, &t.signature);
            text.push_str(&body);
            ok(text, json!({ "fresh": ab.fresh, "assignment": ab.assignment, "derivation": body }))
        }
        Command::ElimDiagram { theory, structure, derivation } => {
            let t = load_theory(theory)?;
            let a = load_structure(structure, Some(&t.signature))?;
            let sig = crate::semantics::diagram_avoiding(&a, &t).signature.merge(&t.signature).map_err(Failure::plain)?;
            let d = parse_derivation(&read(derivation)?, &sig).map_err(|e| Failure::at(derivation, e))?;
            let out = eliminate_diagram_constants(&d, &a, &t).map_err(Failure::plain)?;
            let mut text = format!("# chi: {}\n", out.chi);
            for y in &out.context {
                text.push_str(&format!("# {y} := {}\n", a.name(out.assignment[y])));
            }
            let body = print_derivation(&out.derivation, &t.signature);
            text.push_str(&body);
            let at: serde_json::Map<String, Value> = out
                .context
                .iter()
                .map(|y| (y.clone(), json!(a.name(out.assignment[y]))))
                .collect();
            ok(text, json!({ "chi": out.chi.to_string(), "xi": out.xi.to_string(), "at": at, "derivation": body }))
        }
    }
}

fn eval(structure: &str, formula: &str, assign: &[String]) -> Outcome {
    let a = load_structure(structure, None)?;
    let (f, ctx) = parse_formula_in_context(formula, &a.signature).map_err(|e| Failure::at("<formula>", e))?;
    let mut env = Env::new();
    for item in assign {
        let (x, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("`{item}` is not of the form x=a")))?;
        env.insert(x.trim().to_string(), element(&a, v.trim())?);
    }
    for v in ctx.vars() {
        if !env.contains_key(v) {
            return Err(Failure::usage(format!("free variable `{v}` has no value")));
        }
    }
    match evaluate(&a, &f, &env) {
        Some(w) => {
            let shown: Vec<String> = w.iter().map(|(y, &e)| format!("{y}={}", a.name(e))).collect();
            let mut text = "TRUE\n".to_string();
            if !shown.is_empty() {
                text.push_str(&format!("witness: {}\n", shown.join(",")));
            }
            let wj: serde_json::Map<String, Value> = w.iter().map(|(y, &e)| (y.clone(), json!(a.name(e)))).collect();
            ok(text, json!({ "holds": true, "witness": wj }))
        }
        None => Ok(Report {
            text: "FALSE\n".into(),
            json: json!({ "holds": false }),
            code: EXIT_NEGATIVE,
        }),
    }
}

fn status_line(status: ChaseStatus, levels: usize) -> String {
    match status {
        ChaseStatus::Saturated(n) => format!("SATURATED level={n}"),
        ChaseStatus::FuelExhausted => format!("FUEL-EXHAUSTED levels={levels}"),
    }
}

fn trace_lines(trace: &ChaseTrace) -> String {
    let s = trace.last();
    let mut text = String::new();
    for (k, firings) in trace.firings.iter().enumerate().skip(1) {
        text.push_str(&format!("# level {k}: {} elements\n", trace.levels[k].size()));
        for f in firings {
            let args: Vec<&str> = f.args.iter().map(|&e| s.name(e)).collect();
            let ws: Vec<&str> = f.witnesses.iter().map(|&e| s.name(e)).collect();
            text.push_str(&format!("#   {}({})", f.axiom, args.join(",")));
            if !ws.is_empty() {
                text.push_str(&format!(" => {}", ws.join(",")));
            }
            text.push('\n');
        }
    }
    text
}

fn run_chase(theory: &str, structure: &str, opts: ChaseArgs, trace: bool) -> Outcome {
    let t = load_theory(theory)?;
    let a = load_structure(structure, Some(&t.signature))?;
    let g = chase_general(&t, &a, opts.options()).map_err(Failure::plain)?;
    let levels = g.trace.levels.len() - 1;
    let mut text = String::new();
    if trace {
        text.push_str(&trace_lines(&g.trace));
    }
    let shown = match &g.model {
        Some(m) => m.to_string(),
        None => format!("# not yet a structure over the input signature\n{}", g.trace.last()),
    };
    text.push_str(&shown);
    let status = status_line(g.status(), levels);
    text.push_str(&status);
    text.push('\n');
    let code = if g.trace.is_saturated() { EXIT_OK } else { EXIT_UNKNOWN };
    let eta: Vec<&str> = match &g.model {
        Some(m) => g.eta.iter().map(|&e| m.name(e)).collect(),
        None => Vec::new(),
    };
    let json = json!({
        "status": status,
        "saturated": g.trace.is_saturated(),
        "levels": levels,
        "structure": shown,
        "eta": eta,
        "trace": if trace { Value::String(trace_lines(&g.trace)) } else { Value::Null },
    });
    Ok(Report { text, json, code })
}

fn run_entails(theory: &str, sequent: &str, opts: ChaseArgs) -> Outcome {
    let t = load_theory(theory)?;
    let q = parse_query(sequent, &t.signature).map_err(|e| Failure::at("<sequent>", e))?;
    let verdict = entails(&t, &q, opts.options()).map_err(Failure::plain)?;
    Ok(match verdict {
        Entailment::Provable { disjunct, witness } => {
            let chased = crate::chase::Pipeline::new(&t).map_err(Failure::plain)?.theory.to_theory();
            let body = print_derivation(&witness.derivation, &chased.signature);
            let text = format!(
                "PROVABLE disjunct={}\n# witness: {}\n# level: {}\n{body}",
                disjunct + 1,
                witness.formula,
                witness.level
            );
            let json = json!({
                "verdict": "provable",
                "disjunct": disjunct + 1,
                "witness": witness.formula.to_string(),
                "level": witness.level,
                "derivation": body,
            });
            Report { text, json, code: EXIT_OK }
        }
        Entailment::Refuted { countermodel, tuple } => {
            let names: Vec<String> = q
                .context
                .vars()
                .iter()
                .zip(&tuple)
                .map(|(x, &e)| format!("{x}={}", countermodel.name(e)))
                .collect();
            let text = format!("REFUTED\n# at: {}\n{countermodel}", names.join(","));
            let json = json!({ "verdict": "refuted", "at": names, "countermodel": countermodel.to_string() });
            Report { text, json, code: EXIT_NEGATIVE }
        }
        Entailment::Unknown { levels } => Report {
            text: format!("UNKNOWN levels={levels}\n"),
            json: json!({ "verdict": "unknown", "levels": levels }),
            code: EXIT_UNKNOWN,
        },
    })
}

fn witness(theory: &str, structure: &str, formula: &str, at: &[String], opts: ChaseArgs) -> Outcome {
    let t = load_theory(theory)?;
    let a = load_structure(structure, Some(&t.signature))?;
    let (f, ctx) = parse_formula_in_context(formula, &t.signature).map_err(|e| Failure::at("<formula>", e))?;
    if at.len() != ctx.len() {
        return Err(Failure::usage(format!(
            "formula has {} free variables ({}), --at gives {}",
            ctx.len(),
            ctx.vars().join(","),
            at.len()
        )));
    }
    let args = at.iter().map(|n| element(&a, n.trim())).collect::<Result<Vec<_>, _>>()?;
    let g = chase_general(&t, &a, opts.options()).map_err(Failure::plain)?;
    match g.witness(&f, &ctx, &args) {
        Ok(w) => {
            let body = print_derivation(&w.derivation, &g.pipeline.theory.signature);
            let text = format!("# psi: {}\n# level: {}\n{body}", w.formula, w.level);
            let json = json!({ "psi": w.formula.to_string(), "level": w.level, "derivation": body });
            ok(text, json)
        }
        Err(Error::NotSatisfiedAtAnyLevel) => Ok(Report {
            text: "NOT-SATISFIED\n".into(),
            json: json!({ "error": "not satisfied at any level" }),
            code: EXIT_NEGATIVE,
        }),
        Err(Error::TraceExhausted) => Ok(Report {
            text: "FUEL-EXHAUSTED\n".into(),
            json: json!({ "error": "not satisfied within the fuel" }),
            code: EXIT_UNKNOWN,
        }),
        Err(e) => Err(Failure::plain(e)),
    }
}
