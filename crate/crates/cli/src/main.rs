use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eulercheck::dsl::{parse, parse_expr, Param};
use eulercheck::engine::{evaluate, run, Env, EvalBudget, Mode, RunOptions};
use eulercheck::exactseq::{bernoulli_table, euler_numbers};
use serde_json::json;

/// Usage, parse and IO failures.
const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "eulercheck", version, about = "Verify series and product identities with ball arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Judge every identity in a corpus file.
    Check {
        corpus: PathBuf,
        /// Only run the identity with this id.
        #[arg(long)]
        only: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Enclose a single expression.
    Eval {
        expr: String,
        /// Bind a parameter, as NAME=VALUE.
        #[arg(long, value_parser = parse_binding)]
        param: Option<(String, i64)>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print exact Euler or Bernoulli numbers.
    Constants {
        /// Euler numbers E_0, E_2, ..., up to index N.
        #[arg(long, value_name = "N", conflicts_with = "bernoulli", required_unless_present = "bernoulli")]
        euler: Option<usize>,
        /// Bernoulli numbers B_1..B_M in the positive notation.
        #[arg(long, value_name = "M")]
        bernoulli: Option<usize>,
    },
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 30)]
    digits: u32,
    #[arg(long, default_value_t = 10_000_000)]
    max_terms: u64,
    #[arg(long, default_value_t = 1_000_000)]
    prime_limit: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Rigorous)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include per-record wall-clock times.
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Rigorous,
    Heuristic,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl BudgetArgs {
    fn budget(&self) -> Result<EvalBudget, String> {
        if self.digits < 4 {
            return Err(format!("--digits must be at least 4, got {}", self.digits));
        }
        if self.max_terms == 0 || self.prime_limit == 0 {
            return Err("--max-terms and --prime-limit must be positive".into());
        }
        Ok(EvalBudget {
            digits: self.digits,
            max_terms: self.max_terms,
            prime_limit: self.prime_limit,
            mode: match self.mode {
                ModeArg::Rigorous => Mode::Rigorous,
                ModeArg::Heuristic => Mode::Heuristic,
            },
        })
    }
}

fn parse_binding(s: &str) -> Result<(String, i64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value = value
        .trim()
        .parse()
        .map_err(|e| format!("bad parameter value `{value}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn dispatch(command: Command) -> Result<u8, String> {
    match command {
        Command::Check {
            corpus,
            only,
            budget,
        } => check(&corpus, only.as_deref(), &budget),
        Command::Eval {
            expr,
            param,
            budget,
        } => eval(&expr, param, &budget),
        Command::Constants { euler, bernoulli } => {
            if let Some(n) = euler {
                for (k, e) in euler_numbers(n / 2).iter().enumerate() {
                    println!("E_{} = {}", 2 * k, e);
                }
            }
            if let Some(m) = bernoulli {
                for (k, b) in bernoulli_table(m).iter().enumerate() {
                    println!("B_{} = {}/{}", k + 1, b.numer().magnitude(), b.denom());
                }
            }
            Ok(0)
        }
    }
}

fn check(path: &PathBuf, only: Option<&str>, args: &BudgetArgs) -> Result<u8, String> {
    let budget = args.budget()?;
    let src = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let corpus = parse(&src).map_err(|e| format!("{}:{e}", path.display()))?;
    let corpus = match only {
        Some(id) => corpus
            .only(id)
            .ok_or_else(|| format!("no identity with id {id:?} in {}", path.display()))?,
        None => corpus,
    };
    let opts = RunOptions {
        corpus_name: path.display().to_string(),
        timings: args.timings,
    };
    let report = run(&corpus, &budget, &opts).map_err(|e| e.to_string())?;
    match args.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json()),
    }
    Ok(report.summary.exit_code() as u8)
}

fn eval(src: &str, binding: Option<(String, i64)>, args: &BudgetArgs) -> Result<u8, String> {
    let budget = args.budget()?;
    let param = binding.as_ref().map(|(name, v)| Param {
        name: name.clone(),
        lo: *v,
        hi: *v,
    });
    let expr = parse_expr(src, param.as_ref()).map_err(|e| e.to_string())?;
    let env = match &binding {
        Some((name, v)) => Env::with(name, *v),
        None => Env::new(),
    };
    let started = std::time::Instant::now();
    let result = evaluate(&expr, &env, &budget);
    let ms = started.elapsed().as_millis() as u64;
    let value = match result {
        Ok(v) => v,
        Err(e) => {
            eprintln!("inconclusive: {e}");
            return Ok(2);
        }
    };
    let mid = value.value.mid_to_decimal(budget.digits as usize + 5);
    let rad = value.value.rad_to_string();
    let stats = &value.stats;
    match args.format {
        Format::Text => {
            println!("{mid} ± {rad}");
            if stats.heuristic {
                println!("heuristic truncation, no tail bound");
            }
            for c in &stats.capped {
                println!("capped: {c}");
            }
            if args.timings {
                println!("{ms} ms");
            }
        }
        Format::Json => {
            let mut out = json!({
                "expr": src,
                "mid": mid,
                "rad": rad,
                "terms_used": stats.terms_used,
                "prime_limit": stats.prime_limit,
                "rigorous": !stats.heuristic,
                "capped": stats.capped,
            });
            if args.timings {
                out["ms"] = json!(ms);
            }
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
    }
    Ok(if stats.capped.is_empty() { 0 } else { 2 })
}
