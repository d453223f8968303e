use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use usteen_core::algebra::{relation_r, relation_s, relations_containing};
use usteen_core::expr::{parse_poly, PolyJson};
use usteen_core::fractal::{apply_map, MapName};
use usteen_core::modp::DEFAULT_FUEL;
use usteen_core::straighten::enumerate_admissible;
use usteen_core::verify::{run_suite, Suite, SuiteReport, SweepParams, DEFAULT_SEED};
use usteen_core::{validate_prime, Error, Poly, PrimeContext, Straightener, Strategy};

#[derive(Parser)]
#[command(
    name = "usteen",
    version,
    about = "Exact computations in the universal Steenrod algebra at an odd prime"
)]
struct Cli {
    /// Odd prime p.
    #[arg(short, long = "prime", allow_negative_numbers = true)]
    prime: i64,
    /// Maximum number of pair rewrites per normal form.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Leftmost)]
    strategy: StrategyArg,
    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Seed for the random strategy and sampled suites.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Leftmost,
    Rightmost,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    R,
    S,
}

#[derive(Subcommand)]
enum Command {
    /// Print the relation R(eps,k,n) or S(eps,k,n).
    #[command(allow_negative_numbers = true)]
    Relation {
        #[arg(value_enum, ignore_case = true)]
        family: FamilyArg,
        #[arg(long)]
        eps: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        n: i64,
    },
    /// Reduce an expression to admissible form.
    Nf {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Apply phi, psi, lambda or theta letterwise.
    Map {
        #[arg(long)]
        name: MapName,
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// List admissible words of a given length and index range.
    #[command(allow_negative_numbers = true)]
    Basis {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        min: i64,
        #[arg(long)]
        max: i64,
        #[arg(long, value_delimiter = ',')]
        pattern: Option<Vec<u8>>,
    },
    /// List the relations in which a length-2 word occurs.
    Contains {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Run a verification suite.
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        kmax: Option<i64>,
        #[arg(long)]
        nmax: Option<i64>,
        #[arg(long)]
        smax: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// A failure and the exit code it maps to.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::FuelExhausted(_)) {
            1
        } else {
            2
        };
        Failure(code, e.to_string())
    }
}

fn word_json(w: &usteen_core::Word) -> Value {
    json!(w.letters().iter().map(|l| (l.eps, l.k)).collect::<Vec<_>>())
}

fn emit(out: Output, text: &str, value: Value) {
    match out {
        Output::Text => println!("{text}"),
        Output::Json => println!("{value}"),
    }
}

fn single_word(x: &Poly) -> Result<usteen_core::Word, Failure> {
    let mut words = x.terms().filter(|(_, c)| *c == 1).map(|(w, _)| w);
    match (words.next(), x.num_terms()) {
        (Some(w), 1) => Ok(w.clone()),
        _ => Err(Failure(2, format!("expected a single monic word, got {x}"))),
    }
}

fn report_text(r: &SuiteReport) -> String {
    let mut lines = vec![format!(
        "suite {} {} ({} cases{})",
        r.suite,
        if r.passed { "passed" } else { "FAILED" },
        r.cases.len(),
        r.seed.map(|s| format!(", seed {s}")).unwrap_or_default()
    )];
    for c in &r.cases {
        let mut line = format!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.case);
        if let Some(d) = &c.detail {
            line.push_str(&format!(" :: {d}"));
        }
        if let Some(w) = c.witness.as_ref().filter(|w| w.len() <= 120) {
            line.push_str(&format!(" => {w}"));
        }
        lines.push(line);
    }
    lines.join("\n")
}

fn run(cli: Cli) -> Result<(), Failure> {
    let ctx: PrimeContext = validate_prime(cli.prime)?.with_fuel(cli.fuel)?;
    let out = cli.output;
    match cli.command {
        Command::Relation { family, eps, k, n } => {
            let x = match family {
                FamilyArg::R => relation_r(eps, k, n, &ctx)?,
                FamilyArg::S => relation_s(eps, k, n, &ctx)?,
            };
            emit(out, &x.to_string(), json!(PolyJson::from(&x)));
        }
        Command::Nf { expr } => {
            let x = parse_poly(&expr, &ctx)?;
            let strategy = match cli.strategy {
                StrategyArg::Leftmost => Strategy::Leftmost,
                StrategyArg::Rightmost => Strategy::Rightmost,
                StrategyArg::Random => Strategy::SeededRandom(cli.seed),
            };
            let (y, stats) = Straightener::new(ctx).normal_form(&x, strategy, None)?;
            if out == Output::Text {
                eprintln!(
                    "steps={} peak_terms={} cache_hits={} fuel_left={}",
                    stats.steps, stats.peak_terms, stats.cache_hits, stats.fuel_left
                );
            }
            emit(
                out,
                &y.to_string(),
                json!({ "normal_form": PolyJson::from(&y), "stats": stats }),
            );
        }
        Command::Map { name, power, expr } => {
            let y = apply_map(name, &parse_poly(&expr, &ctx)?, power, &ctx)?;
            emit(out, &y.to_string(), json!(PolyJson::from(&y)));
        }
        Command::Basis {
            length,
            min,
            max,
            pattern,
        } => {
            if let Some(pat) = &pattern {
                if pat.len() != length || pat.iter().any(|&e| e > 1) {
                    return Err(Failure(
                        2,
                        format!("pattern must list {length} values in {{0,1}}"),
                    ));
                }
            }
            let words = enumerate_admissible(length, min, max, pattern.as_deref(), &ctx);
            let text: Vec<String> = words.iter().map(|w| w.to_string()).collect();
            let value =
                json!({ "p": ctx.p(), "words": words.iter().map(word_json).collect::<Vec<_>>() });
            emit(out, &text.join("\n"), value);
        }
        Command::Contains { expr } => {
            let w = single_word(&parse_poly(&expr, &ctx)?)?;
            let ids = relations_containing(&w, &ctx)?;
            let text: Vec<String> = ids.iter().map(|id| id.to_string()).collect();
            emit(out, &text.join("\n"), json!(ids));
        }
        Command::Verify {
            suite,
            kmax,
            nmax,
            smax,
            samples,
        } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse().map_err(|e: String| Failure(2, e))?]
            };
            let params = SweepParams {
                kmax,
                nmax,
                smax,
                samples,
                seed: cli.seed,
            };
            let reports: Vec<SuiteReport> = suites
                .iter()
                .map(|&s| run_suite(s, &ctx, &params))
                .collect();
            let text: Vec<String> = reports.iter().map(report_text).collect();
            let value = if reports.len() == 1 {
                json!(reports[0])
            } else {
                json!(reports)
            };
            emit(out, &text.join("\n"), value);
            if reports.iter().any(|r| !r.passed) {
                return Err(Failure(1, "verification failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("usteen: {msg}");
            ExitCode::from(code)
        }
    }
}
