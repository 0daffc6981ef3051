//! Command-line front end.
//!
//! Input is a matrix ("n" then n rows), a diagram ("n m" then m lines
//! "src dst weight") or a 3-vertex triple ("cyclic a b c" / "acyclic a b c"),
//! recognized by the shape of the first line.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::classify::{analyze, classify_diagram};
use crate::diagram::Diagram;
use crate::exactnum::Nat;
use crate::explore::{
    default_verify_bound, explore_with, verify_unique_minimum, ExploreError, ExploreOptions,
    Verdict,
};
use crate::invariants::{gcd_invariant, Flavor};
use crate::matrix::SkewSymmetrizableMatrix;
use crate::triple::RadicalTriple;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "skewmut", version, about = "Exact mutation of skew-symmetrizable matrices and diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct InputArgs {
    /// Input file; stdin when omitted.
    pub input: Option<PathBuf>,
    /// Input given on the command line, with ';' separating lines.
    #[arg(long, conflicts_with = "input")]
    pub inline: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutate at one vertex.
    Mutate {
        #[arg(short = 'k')]
        k: usize,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Minimal representative of a 3-vertex class and a witnessing sequence.
    Minimize {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Finite, affine, indefinite-acyclic or mutation-cyclic.
    Classify {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Sorted per-vertex gcds of incident weights.
    Invariant {
        /// Use square roots of the weights.
        #[arg(long)]
        radical: bool,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Bounded exploration of the mutation class.
    Explore {
        #[arg(long)]
        bound: Nat,
        #[arg(long)]
        modulo_reversal: bool,
        /// Exploration file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Check minimal-representative uniqueness by exploration.
    Verify {
        /// Defaults to a bound that rules out an inconclusive verdict.
        #[arg(long)]
        bound: Option<Nat>,
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Debug, Clone)]
pub enum Input {
    Matrix(SkewSymmetrizableMatrix),
    Diagram(Diagram),
    Triple(RadicalTriple),
}

impl Input {
    pub fn parse(text: &str) -> Result<Input, String> {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .ok_or("empty input")?;
        let tokens: Vec<&str> = first.split_whitespace().collect();
        match tokens.as_slice() {
            ["cyclic" | "acyclic", ..] => text
                .trim()
                .parse()
                .map(Input::Triple)
                .map_err(|e| format!("{e}")),
            [_] => text.parse().map(Input::Matrix).map_err(|e| format!("{e}")),
            [_, _] => text.parse().map(Input::Diagram).map_err(|e| format!("{e}")),
            _ => Err(format!("unrecognized input header {first:?}")),
        }
    }

    pub fn diagram(&self) -> Diagram {
        match self {
            Input::Matrix(b) => b.diagram(),
            Input::Diagram(g) => g.clone(),
            Input::Triple(t) => t.to_diagram(),
        }
    }

    fn n(&self) -> usize {
        match self {
            Input::Matrix(b) => b.n(),
            Input::Diagram(g) => g.n(),
            Input::Triple(_) => 3,
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn explore_failure(e: ExploreError) -> Failure {
    match e {
        ExploreError::BudgetExceeded(_) => Failure {
            code: EXIT_BUDGET,
            message: e.to_string(),
        },
        other => input_error(other.to_string()),
    }
}

fn read_input(args: &InputArgs, stdin: &mut dyn Read) -> Result<Input, Failure> {
    let text = match (&args.inline, &args.input) {
        (Some(s), _) => s.replace(';', "\n"),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| input_error(format!("{}: {e}", path.display())))?,
        (None, None) => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|e| input_error(format!("stdin: {e}")))?;
            s
        }
    };
    Input::parse(&text).map_err(input_error)
}

fn witness_line(path: &[usize]) -> String {
    let mut line = String::from("witness:");
    for k in path {
        line.push(' ');
        line.push_str(&k.to_string());
    }
    line
}

fn execute(cli: Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| input_error(format!("write failed: {e}"));
    match cli.command {
        Command::Mutate { k, input } => {
            let input = read_input(&input, stdin)?;
            if k >= input.n() {
                return Err(input_error(format!("vertex {k} out of range for n = {}", input.n())));
            }
            let text = match &input {
                Input::Matrix(b) => b.mutate(k).to_string(),
                other => other
                    .diagram()
                    .mutate(k)
                    .map_err(|e| input_error(e.to_string()))?
                    .to_string(),
            };
            write!(out, "{text}").map_err(io)?;
        }
        Command::Minimize { input } => {
            let t = RadicalTriple::from_diagram(&read_input(&input, stdin)?.diagram())
                .map_err(|e| input_error(e.to_string()))?;
            let d = t.descend_to_minimum();
            writeln!(out, "minimum: {}", d.canonical).map_err(io)?;
            writeln!(out, "{}", witness_line(&d.path)).map_err(io)?;
        }
        Command::Classify { input } => {
            let c = match read_input(&input, stdin)? {
                Input::Matrix(b) => analyze(&b),
                other => classify_diagram(&other.diagram()),
            }
            .map_err(|e| input_error(e.to_string()))?;
            let mut line = format!("{}, det(A)={}", c.kind.label(), c.det);
            if let Some(m) = c.markov {
                line.push_str(&format!(", C={m}"));
            }
            writeln!(out, "{line}").map_err(io)?;
        }
        Command::Invariant { radical, input } => {
            let flavor = if radical { Flavor::Radical } else { Flavor::Weight };
            let g = read_input(&input, stdin)?.diagram();
            let d = gcd_invariant(&g, flavor).map_err(|e| input_error(e.to_string()))?;
            writeln!(out, "{d}").map_err(io)?;
        }
        Command::Explore {
            bound,
            modulo_reversal,
            output,
            input,
        } => {
            let g = read_input(&input, stdin)?.diagram();
            let e = explore_with(&g, &ExploreOptions::new(bound, modulo_reversal))
                .map_err(explore_failure)?;
            match output {
                Some(path) => {
                    let file = File::create(&path)
                        .map_err(|err| input_error(format!("{}: {err}", path.display())))?;
                    let mut w = BufWriter::new(file);
                    e.save(&mut w).map_err(explore_failure)?;
                    w.flush().map_err(io)?;
                    writeln!(
                        out,
                        "visited {} truncated {} pruned {}",
                        e.len(),
                        u8::from(e.truncated),
                        e.pruned
                    )
                    .map_err(io)?;
                }
                None => e.save(&mut *out).map_err(explore_failure)?,
            }
        }
        Command::Verify { bound, input } => {
            let g = read_input(&input, stdin)?.diagram();
            let bound = bound.unwrap_or_else(|| default_verify_bound(&g));
            let v = verify_unique_minimum(&g, bound).map_err(explore_failure)?;
            writeln!(out, "verdict: {}", v.verdict.label()).map_err(io)?;
            writeln!(out, "minimum: {}", v.descent.canonical).map_err(io)?;
            writeln!(out, "{}", witness_line(&v.descent.path)).map_err(io)?;
            writeln!(out, "explored: {}", v.explored).map_err(io)?;
            for r in &v.reasons {
                writeln!(out, "note: {r}").map_err(io)?;
            }
            if v.verdict == Verdict::Refuted {
                return Ok(EXIT_REFUTED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(cli, stdin, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut input = stdin.as_bytes();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["skewmut"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut input, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_markov() {
        let (code, out, _) = run_str(&["classify"], "3\n0 2 -2\n-2 0 2\n2 -2 0\n");
        assert_eq!(code, 0);
        assert_eq!(out, "mutation-cyclic, det(A)=0, C=4\n");
    }

    #[test]
    fn invariant_path() {
        let (code, out, _) = run_str(&["invariant", "--inline", "3 2;0 1 4;1 2 9"], "");
        assert_eq!(code, 0);
        assert_eq!(out, "9 4 1\n");
    }

    #[test]
    fn minimize_one_three_five() {
        let (code, out, _) = run_str(&["minimize", "--inline", "cyclic 1 9 25"], "");
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("minimum: acyclic"));
        assert!(lines.next().unwrap().len() > "witness:".len());
    }

    #[test]
    fn mutate_twice_round_trips() {
        let text = "3\n0 2 -1\n-1 0 1\n1 -2 0\n";
        let (_, once, _) = run_str(&["mutate", "-k", "1"], text);
        let (code, twice, _) = run_str(&["mutate", "-k", "1"], &once);
        assert_eq!(code, 0);
        assert_eq!(twice, text);
    }

    #[test]
    fn input_errors() {
        assert_eq!(run_str(&["classify"], "garbage here now\n").0, EXIT_INPUT);
        assert_eq!(run_str(&["mutate", "-k", "5"], "2\n0 1\n-1 0\n").0, EXIT_INPUT);
        assert_eq!(run_str(&["bogus"], "").0, EXIT_INPUT);
        let (code, _, err) = run_str(&["invariant"], "2 1\n0 0 1\n");
        assert_eq!(code, EXIT_INPUT);
        assert_eq!(err.lines().count(), 1);
    }
}
