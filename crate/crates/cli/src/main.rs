use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grigorchuk::analysis::build_coset_table;
use grigorchuk::growth::cache::{cached_ball, CACHE_DIR_ENV};
use grigorchuk::growth::{BallConfig, BallOutcome, GrowthSeries, SeriesFormat};
use grigorchuk::scaling::{run_bench, BenchConfig, Workload, DEFAULT_SEED};
use grigorchuk::verify::{Suite, Verifier, VerifyOptions};
use grigorchuk::{are_equal, is_identity, order, portrait_of, reduce, Error, Order, Vertex, Word};
use serde_json::json;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Word problem, portraits and growth of the group ⟨a, b, c, d⟩ acting on the
/// binary tree.
///
/// Exit codes: 0 success, 1 a check failed, 2 usage or parse error,
/// 3 time budget exhausted.
#[derive(Debug, Parser)]
#[command(name = "grigorchuk", version)]
struct Cli {
    /// Directory for cached balls.
    #[arg(long, global = true, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,

    /// Wall-clock budget for ball enumeration, in seconds.
    #[arg(long, global = true, value_parser = parse_budget)]
    budget_secs: Option<f64>,

    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the reduced form of a word and its type.
    Reduce { word: String },
    /// Decide whether a word spells the identity.
    Solve { word: String },
    /// Decide whether two words spell the same element.
    Equal { u: String, v: String },
    /// Compute the order of an element, a power of two.
    Order {
        word: String,
        /// Largest exponent tried.
        #[arg(long, default_value_t = grigorchuk::group::DEFAULT_ORDER_BUDGET)]
        k_max: u32,
    },
    /// Enumerate a ball and print the growth series.
    Growth(GrowthArgs),
    /// Print the portrait of a word truncated at a depth.
    Portrait {
        word: String,
        #[arg(long, default_value_t = 3)]
        depth: u32,
        /// Also print the image of this vertex, written as a 0/1 path.
        #[arg(long)]
        apply: Option<String>,
    },
    /// Run check suites: relations, portraits, indices, lemma7 (section
    /// lengths), cancellation, periodicity, growth-bounds, or all.
    Verify(VerifyArgs),
    /// Time the word-problem solver at doubling lengths.
    Bench(BenchArgs),
    /// Write artifacts to disk.
    #[command(subcommand)]
    Export(ExportCommand),
}

#[derive(Debug, Args)]
struct GrowthArgs {
    #[arg(long, default_value_t = 10)]
    radius: u32,
    /// Portrait depth of the element keys; defaults to a provably faithful depth.
    #[arg(long)]
    key_depth: Option<u32>,
    /// Output file; format chosen by extension (.csv or .json) unless --format is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(default_value = "all")]
    suite: String,
    /// Ball radius for the suites that need exact lengths.
    #[arg(long, default_value_t = 12)]
    radius: u32,
    /// Random pairs for the key/solver agreement check.
    #[arg(long, default_value_t = 100_000)]
    key_samples: usize,
    /// Number of eta iterates compared pairwise.
    #[arg(long, default_value_t = 15)]
    eta: usize,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 1 << 20)]
    max_len: usize,
    #[arg(long, default_value_t = 1 << 4)]
    min_len: usize,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// random (random reduced words) or identity (products of relator conjugates).
    #[arg(long, default_value = "random")]
    workload: String,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ExportCommand {
    /// Growth series as CSV or JSON.
    Series {
        #[arg(long, default_value_t = 10)]
        radius: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Coset representatives of a level stabilizer as JSON.
    Cosets {
        #[arg(long)]
        level: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn parse_budget(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err("budget must be a positive number of seconds".into()),
    }
}

/// How a command ended when it did not succeed.
enum Failure {
    Core(Error),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::PortraitSyntax(_)
        | Error::VertexSyntax(_)
        | Error::Domain(_)
        | Error::CapExceeded { .. }
        | Error::DepthExceeded { .. } => EXIT_USAGE,
        Error::BudgetExhausted { .. } => EXIT_BUDGET,
        _ => EXIT_FAIL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Core(e)) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            if let Error::InsufficientRadius { .. } = e {
                eprintln!("hint: rerun with a larger --radius, or run `grigorchuk growth --radius R` first");
            }
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn parse_word(s: &str) -> Result<Word, Error> {
    s.parse()
}

fn emit(cli: &Cli, value: serde_json::Value, text: impl FnOnce() -> String) {
    if cli.json {
        println!("{value}");
    } else {
        println!("{}", text());
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Reduce { word } => {
            let r = reduce(&parse_word(word)?);
            emit(
                cli,
                json!({ "reduced": r.to_string(), "length": r.len(), "type": r.type_tag().to_string() }),
                || {
                    let shown = if r.is_empty() {
                        "I".to_string()
                    } else {
                        r.to_string()
                    };
                    format!("{shown} (type {}, length {})", r.type_tag(), r.len())
                },
            );
        }
        Command::Solve { word } => {
            let verdict = if is_identity(&parse_word(word)?) {
                "identity"
            } else {
                "nontrivial"
            };
            emit(cli, json!({ "verdict": verdict }), || verdict.to_string());
        }
        Command::Equal { u, v } => {
            let equal = are_equal(&parse_word(u)?, &parse_word(v)?);
            emit(cli, json!({ "equal": equal }), || {
                if equal { "equal" } else { "different" }.to_string()
            });
        }
        Command::Order { word, k_max } => match order(&parse_word(word)?, *k_max) {
            Order::PowerOfTwo { exponent } => emit(
                cli,
                json!({ "exponent": exponent, "order": 1u128 << exponent }),
                || (1u128 << exponent).to_string(),
            ),
            Order::Exceeded { k_max } => {
                emit(cli, json!({ "exceeded": k_max }), || {
                    format!("exceeded {k_max}")
                });
            }
        },
        Command::Portrait { word, depth, apply } => {
            let p = portrait_of(&parse_word(word)?, *depth)?;
            let image = match apply {
                Some(v) => Some(p.apply(v.parse::<Vertex>()?)?),
                None => None,
            };
            emit(
                cli,
                json!({ "depth": depth, "portrait": p.to_string(), "image": image.map(|v| v.to_string()) }),
                || match image {
                    Some(v) => format!("{p}\n{} -> {v}", apply.as_deref().unwrap_or_default()),
                    None => p.to_string(),
                },
            );
        }
        Command::Growth(args) => cmd_growth(cli, args)?,
        Command::Verify(args) => cmd_verify(cli, args)?,
        Command::Bench(args) => cmd_bench(cli, args)?,
        Command::Export(ExportCommand::Series {
            radius,
            out,
            format,
        }) => {
            let ball = load_ball(cli, *radius, None)?;
            write_series(&ball.series, out, *format)?;
            check_complete(&ball, *radius)?;
            emit(cli, json!({ "written": out }), || {
                format!("wrote {}", out.display())
            });
        }
        Command::Export(ExportCommand::Cosets { level, out }) => {
            let table = build_coset_table(*level)?;
            let text = serde_json::to_string_pretty(&table.to_json()).expect("serializable");
            std::fs::write(out, text).map_err(|e| Error::Io {
                path: out.clone(),
                source: e,
            })?;
            emit(
                cli,
                json!({ "written": out, "index": table.index() }),
                || format!("wrote {} ({} cosets)", out.display(), table.index()),
            );
        }
    }
    Ok(())
}

fn budget(cli: &Cli) -> Option<Duration> {
    cli.budget_secs.map(Duration::from_secs_f64)
}

fn load_ball(cli: &Cli, radius: u32, key_depth: Option<u32>) -> Result<BallOutcome, Error> {
    let mut config = BallConfig::new(radius);
    config.key_depth = key_depth;
    config.time_budget = budget(cli);
    Ok(cached_ball(&config, cli.cache_dir.as_deref())?.0)
}

fn check_complete(ball: &BallOutcome, radius: u32) -> Result<(), Error> {
    if ball.complete {
        Ok(())
    } else {
        Err(Error::BudgetExhausted {
            requested: radius,
            reached: ball.table.radius(),
        })
    }
}

fn write_series(series: &GrowthSeries, out: &Path, format: Option<FormatArg>) -> Result<(), Error> {
    let format = match format {
        Some(FormatArg::Csv) => SeriesFormat::Csv,
        Some(FormatArg::Json) => SeriesFormat::Json,
        None => SeriesFormat::from_path(out).unwrap_or(SeriesFormat::Csv),
    };
    series.write(out, format)
}

fn cmd_growth(cli: &Cli, args: &GrowthArgs) -> Result<(), Failure> {
    let ball = load_ball(cli, args.radius, args.key_depth)?;
    let series = &ball.series;
    if let Some(out) = &args.out {
        write_series(series, out, args.format)?;
    }
    if cli.json {
        println!("{}", series.to_json());
    } else {
        println!("{:>4} {:>10} {:>10}", "n", "gamma", "sphere");
        for row in series.rows() {
            println!("{:>4} {:>10} {:>10}", row.n, row.gamma, row.sphere);
        }
        let meta = series.meta();
        println!(
            "radius {} ({} elements, key depth {}) in {:.3}s{}",
            meta.radius,
            meta.element_count,
            meta.key_depth,
            meta.wall_time_secs,
            if meta.complete {
                ""
            } else {
                ", PARTIAL: budget exhausted"
            }
        );
    }
    check_complete(&ball, args.radius)?;
    Ok(())
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<(), Failure> {
    let suites = Suite::parse_list(&args.suite)?;
    let mut verifier = Verifier::new(VerifyOptions {
        radius: args.radius,
        cache_dir: cli.cache_dir.clone(),
        time_budget: budget(cli),
        key_samples: args.key_samples,
        eta_count: args.eta,
        ..VerifyOptions::default()
    });
    let mut all_passed = true;
    let mut reports = Vec::new();
    for suite in suites {
        let report = verifier.run(suite)?;
        all_passed &= report.passed();
        if !cli.json {
            println!("== {} ({:.2}s)", suite.name(), report.elapsed_secs);
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                if c.detail.is_empty() {
                    println!("[{tag}] {}", c.name);
                } else {
                    println!("[{tag}] {}: {}", c.name, c.detail);
                }
            }
        }
        reports.push(report);
    }
    if cli.json {
        println!("{}", json!({ "passed": all_passed, "suites": reports }));
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> Result<(), Failure> {
    let config = BenchConfig {
        min_len: args.min_len,
        max_len: args.max_len,
        reps: args.reps,
        seed: args.seed,
        workload: args.workload.parse::<Workload>()?,
    };
    let report = run_bench(&config)?;
    if let Some(out) = &args.out {
        std::fs::write(out, report.to_csv()).map_err(|e| Error::Io {
            path: out.clone(),
            source: e,
        })?;
    }
    let verdict = report.verdict();
    let ok = verdict.passed;
    if cli.json {
        println!("{}", json!({ "report": report, "verdict": verdict }));
    } else {
        println!("seed {} workload {:?}", config.seed, config.workload);
        println!("{:>9} {:>9} {:>12}", "target", "length", "median_s");
        for p in &report.points {
            println!(
                "{:>9} {:>9} {:>12.3e}",
                p.target_len, p.actual_len, p.median_secs
            );
        }
        println!(
            "top doubling ratios {:.3?}, log-log slope {:.3?}, t/n vs log n exponent {:.3?}",
            verdict.top_ratios, verdict.slope, verdict.nlogn_exponent
        );
        println!("[{}] scaling", if ok { "PASS" } else { "FAIL" });
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}
