//! `m0n`: evaluate boundary-divisor monomials on the moduli space of stable
//! pointed genus-zero curves.

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use m0n_core::forest::TraceRecord;
use m0n_core::oracle::{oracle_eval_traced, OracleTraceRecord};
use m0n_core::{
    classify, evaluate, monomial_to_tree, oracle_eval, parse_monomial, random_proper_tree, render_monomial,
    tree_to_monomial, Classification, LoadedTree, Monomial, ParseError, ToDot, TreeJson,
};
use rayon::prelude::*;
use serde::Serialize;

const EXIT_INPUT: u8 = 2;
const EXIT_DISAGREE: u8 = 3;

#[derive(Parser)]
#[command(name = "m0n", version, about = "Exact intersection numbers of boundary divisors on M_{0,n}")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate monomials with the redundancy-forest algorithm.
    Eval {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also run the cut-recursion oracle; exit 3 if the values differ.
        #[arg(long)]
        oracle: bool,
    },
    /// Evaluate monomials with the cut-recursion oracle only.
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the loaded tree of a non-crossing monomial.
    Tree {
        expr: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Print random proper tree monomials, one per line.
    Random {
        n: u32,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Monomial text, e.g. "n=5; d(1,2|3,4,5)^2".
    #[arg(conflicts_with_all = ["file", "stdin"], required_unless_present_any = ["file", "stdin"])]
    expr: Option<String>,
    /// Read one monomial per line from a file.
    #[arg(long, conflicts_with = "stdin")]
    file: Option<PathBuf>,
    /// Read one monomial per line from standard input.
    #[arg(long)]
    stdin: bool,
}

#[derive(Args)]
struct OutputArgs {
    /// Print only the value.
    #[arg(long)]
    plain: bool,
    /// Add per-stage records to the JSON report.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy)]
enum Engine {
    Forest { check: bool },
    Oracle,
}

#[derive(Serialize)]
struct RunReport {
    input: String,
    classification: Classification,
    value: String,
    sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stages: Option<Vec<Stage>>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum Stage {
    Forest(TraceRecord),
    Oracle(OracleTraceRecord),
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    input: &'a str,
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<usize>,
}

struct Failure {
    code: u8,
    message: String,
    position: Option<usize>,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, message: message.to_string(), position: None }
    }

    fn parse(e: &ParseError) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string(), position: Some(e.position()) }
    }

    fn render(&self, input: &str) -> String {
        match self.position {
            Some(p) => format!("error: {}\n  {}\n  {}^", self.message, input, " ".repeat(p.min(input.len()))),
            None => format!("error: {}", self.message),
        }
    }
}

/// Result of one line: the report (if any) and the exit code it implies.
struct Outcome {
    report: Option<RunReport>,
    failure: Option<Failure>,
}

fn parse(text: &str) -> Result<Monomial, Failure> {
    parse_monomial(text).map_err(|e| Failure::parse(&e))
}

fn tree_sign(t: &LoadedTree) -> i8 {
    let edge_weight: u64 = t.edges().iter().map(|e| e.multiplicity - 1).sum();
    if edge_weight.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn run_forest(m: &Monomial, trace: bool, check: bool) -> Outcome {
    let input = render_monomial(m);
    let ev = match evaluate(m, trace) {
        Ok(ev) => ev,
        Err(e) => return Outcome { report: None, failure: Some(Failure::input(e)) },
    };
    let mut failure = None;
    if check {
        match oracle_value(m) {
            Ok(v) if v == ev.value => {}
            Ok(v) => {
                failure = Some(Failure {
                    code: EXIT_DISAGREE,
                    message: format!("oracle disagreement on {input}: forest {} vs oracle {v}", ev.value),
                    position: None,
                })
            }
            Err(f) => failure = Some(f),
        }
    }
    let report = RunReport {
        input,
        classification: ev.classification,
        value: ev.value.to_string(),
        sign: ev.sign,
        stages: trace.then(|| ev.trace.into_iter().map(Stage::Forest).collect()),
    };
    Outcome { report: Some(report), failure }
}

fn oracle_value(m: &Monomial) -> Result<m0n_core::IntegerValue, Failure> {
    match classify(m) {
        Classification::DegreeMismatch | Classification::ZeroByKeel => Ok(0.into()),
        Classification::Clever | Classification::TreeMonomial => {
            let t = monomial_to_tree(m).map_err(Failure::input)?;
            oracle_eval(&t).map_err(Failure::input)
        }
    }
}

fn run_oracle(m: &Monomial, trace: bool) -> Outcome {
    let input = render_monomial(m);
    let classification = classify(m);
    let (value, sign, records) = match classification {
        Classification::DegreeMismatch | Classification::ZeroByKeel => (0.into(), None, Vec::new()),
        Classification::Clever | Classification::TreeMonomial => {
            let result = monomial_to_tree(m).map_err(Failure::input).and_then(|t| {
                let (v, records) = oracle_eval_traced(&t).map_err(Failure::input)?;
                Ok((v, Some(tree_sign(&t)), records.into_iter().map(Stage::Oracle).collect()))
            });
            match result {
                Ok(r) => r,
                Err(f) => return Outcome { report: None, failure: Some(f) },
            }
        }
    };
    let report = RunReport {
        input,
        classification,
        value: value.to_string(),
        sign,
        stages: trace.then_some(records),
    };
    Outcome { report: Some(report), failure: None }
}

fn run_line(text: &str, engine: Engine, trace: bool) -> Outcome {
    let m = match parse(text) {
        Ok(m) => m,
        Err(f) => return Outcome { report: None, failure: Some(f) },
    };
    match engine {
        Engine::Forest { check } => run_forest(&m, trace, check),
        Engine::Oracle => run_oracle(&m, trace),
    }
}

fn format_outcome(text: &str, o: &Outcome, plain: bool) -> String {
    match (&o.report, &o.failure) {
        (Some(r), _) if plain => r.value.clone(),
        (Some(r), _) => serde_json::to_string(r).expect("report serializes"),
        (None, Some(f)) if plain => format!("error: {}", f.message),
        (None, Some(f)) => serde_json::to_string(&ErrorReport { input: text, error: f.message.clone(), position: f.position })
            .expect("error report serializes"),
        (None, None) => unreachable!("an outcome has a report or a failure"),
    }
}

fn read_lines(input: &InputArgs) -> io::Result<Option<Vec<String>>> {
    let text = if let Some(path) = &input.file {
        std::fs::read_to_string(path)?
    } else if input.stdin {
        let mut s = String::new();
        io::stdin().lock().read_to_string(&mut s)?;
        s
    } else {
        return Ok(None);
    };
    Ok(Some(
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_owned)
            .collect(),
    ))
}

fn cmd_evaluate(input: &InputArgs, output: &OutputArgs, engine: Engine) -> ExitCode {
    let lines = match read_lines(input) {
        Ok(lines) => lines,
        Err(e) => {
            eprintln!("error: cannot read input: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match lines {
        None => {
            let text = input.expr.as_deref().expect("clap requires an expression without --file/--stdin");
            let o = run_line(text, engine, output.trace);
            if let Some(f) = &o.failure {
                eprintln!("{}", f.render(text));
            }
            if o.report.is_some() {
                writeln!(out, "{}", format_outcome(text, &o, output.plain)).ok();
            }
            ExitCode::from(o.failure.map_or(0, |f| f.code))
        }
        Some(lines) => {
            // rayon's indexed collect keeps input order
            let outcomes: Vec<Outcome> = lines.par_iter().map(|l| run_line(l, engine, output.trace)).collect();
            let mut code = 0;
            for (text, o) in lines.iter().zip(&outcomes) {
                if let Some(f) = &o.failure {
                    eprintln!("{}", f.render(text));
                    code = code.max(f.code);
                }
                writeln!(out, "{}", format_outcome(text, o, output.plain)).ok();
            }
            ExitCode::from(code)
        }
    }
}

fn cmd_tree(expr: &str, format: Format) -> ExitCode {
    let result = parse(expr).and_then(|m| monomial_to_tree(&m).map_err(Failure::input));
    match result {
        Ok(t) => {
            let text = match format {
                Format::Json => TreeJson::from(&t).to_json_string() + "\n",
                Format::Dot => t.to_dot(),
            };
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.render(expr));
            ExitCode::from(f.code)
        }
    }
}

fn cmd_random(n: u32, count: u64, seed: u64) -> ExitCode {
    if n < 3 {
        eprintln!("error: n must be at least 3, got {n}");
        return ExitCode::from(EXIT_INPUT);
    }
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    for i in 0..count {
        let t = random_proper_tree(n, seed.wrapping_add(i));
        let m = tree_to_monomial(&t).expect("random trees are proper");
        writeln!(out, "{}", render_monomial(&m)).ok();
    }
    out.flush().ok();
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Eval { input, output, oracle } => cmd_evaluate(input, output, Engine::Forest { check: *oracle }),
        Command::Oracle { input, output } => cmd_evaluate(input, output, Engine::Oracle),
        Command::Tree { expr, format } => cmd_tree(expr, *format),
        Command::Random { n, count, seed } => cmd_random(*n, *count, *seed),
    }
}
