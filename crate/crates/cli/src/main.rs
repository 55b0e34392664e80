//! `reclab` — generate synthetic rating matrices, benchmark the three
//! recommendation strategies, and answer ad-hoc queries.
//!
//! Exit codes: 0 success, 1 runtime/I-O failure, 2 usage error. Machine
//! output goes to `--out`, human-readable tables to stdout, diagnostics to
//! stderr. All randomness is seeded; identical flags reproduce identical
//! datasets and histograms.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use reclab_core::args::{parse_article_list, parse_bin_edges, parse_qd_cutoffs};
use reclab_core::bench::{
    prepare, run, BenchError, BinScheme, QdCutoffs, RunConfig, StrategySpec,
};
use reclab_core::csv::{load_csv, save_csv, CsvError};
use reclab_core::report::compare_report;
use reclab_core::kmeans::FitOptions;
use reclab_core::matrix::{Rating, RatingsMatrix, Transaction, DEFAULT_TRANSACTION_LEN};
use reclab_core::strategy::{KmeansRecConfig, StrategyError, ThresholdConfig};
use reclab_core::synth::{generate, GeneratorConfig};

#[derive(Parser)]
#[command(
    name = "reclab",
    version,
    about = "Recommendation-strategy lab over partially observed rating matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic rating matrix and write it as CSV
    Gen(GenArgs),
    /// Replay random transactions against one or all strategies and report
    Bench(BenchArgs),
    /// Answer a single transaction with the chosen strategy
    Recommend(RecommendArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of users (rows)
    #[arg(long, default_value_t = 5000)]
    users: usize,
    /// Number of articles (columns)
    #[arg(long, default_value_t = 100)]
    articles: usize,
    /// Number of latent user archetypes
    #[arg(long, default_value_t = 8)]
    archetypes: usize,
    /// Gaussian noise added to archetype preferences
    #[arg(long, default_value_t = 1.5)]
    noise_sigma: f64,
    /// Lower bound of the per-article missing probability
    #[arg(long, default_value_t = 0.18)]
    missing_low: f64,
    /// Upper bound of the per-article missing probability
    #[arg(long, default_value_t = 0.70)]
    missing_high: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Threshold,
    Kmeans,
    Content,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    /// Labeled bins for threshold and k-means, count bins for content
    Auto,
    Content,
    Labeled,
}

#[derive(Args)]
struct StrategyParams {
    /// Threshold value for the threshold strategy
    #[arg(long, default_value_t = 9.3)]
    theta: f64,
    /// Number of clusters for the k-means strategy
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Maximum Lloyd iterations
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    /// Use the k-means++-style initializer
    #[arg(long)]
    kmeans_plus_plus: bool,
    /// Result length for the k-means strategy
    #[arg(long, default_value_t = 8)]
    top_n: usize,
    /// Rating assigned to chosen articles in the k-means query vector
    #[arg(long, default_value_t = 10.0)]
    pseudo_rating: f64,
    /// Half-width of the content mean bins (default: stddev of means / 4)
    #[arg(long)]
    x: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Input dataset CSV
    #[arg(short, long)]
    input: PathBuf,
    /// Strategy to benchmark
    #[arg(long, value_enum, required_unless_present = "all", conflicts_with = "all")]
    strategy: Option<StrategyArg>,
    /// Benchmark all three strategies
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    /// Seed for transactions and clustering
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Articles per random transaction
    #[arg(long, default_value_t = DEFAULT_TRANSACTION_LEN)]
    txn_len: usize,
    #[command(flatten)]
    params: StrategyParams,
    /// Histogram bin layout
    #[arg(long, value_enum, default_value_t = SchemeArg::Auto)]
    scheme: SchemeArg,
    /// Labeled-scheme bin edges: upper bounds of Very Short, Short, Normal
    #[arg(long, value_parser = parse_bin_edges, default_value = "2,5,24")]
    bins: [u64; 3],
    /// Query-dependency label cutoffs: medium,high
    #[arg(long, value_parser = parse_qd_cutoffs, default_value = "0.2,0.6")]
    qd_cutoffs: QdCutoffs,
    /// Write the machine-readable JSON report here
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Write the fitted k-means model dump here
    #[arg(long)]
    dump_model: Option<PathBuf>,
}

#[derive(Args)]
struct RecommendArgs {
    /// Input dataset CSV
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Comma-separated article indices, e.g. 0,1,3,4
    #[arg(long, value_parser = parse_article_list)]
    txn: Vec<Vec<usize>>,
    /// Required transaction length
    #[arg(long, default_value_t = DEFAULT_TRANSACTION_LEN)]
    txn_len: usize,
    /// Seed for clustering
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    params: StrategyParams,
    /// Write the fitted k-means model dump here
    #[arg(long)]
    dump_model: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match &e {
            // data-dependent failures, not flag mistakes
            BenchError::Strategy(StrategyError::AllColumnsEmpty)
            | BenchError::StrategyFailed { .. } => CliError::Runtime(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Prints to stdout, exiting quietly when the downstream pipe is closed.
fn emit(text: impl std::fmt::Display) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if write!(out, "{text}").and_then(|()| out.flush()).is_err() {
        std::process::exit(0);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Recommend(args) => cmd_recommend(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    let cfg = GeneratorConfig {
        n_users: args.users,
        n_articles: args.articles,
        n_archetypes: args.archetypes,
        noise_sigma: args.noise_sigma,
        missing_low: args.missing_low,
        missing_high: args.missing_high,
        seed: args.seed,
    };
    let m = generate(&cfg).map_err(|e| CliError::usage(e.to_string()))?;
    save_csv(&m, &args.out)?;

    let ratios: Vec<f64> = (0..m.n_articles()).map(|a| m.missing_ratio(a)).collect();
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    emit(format!(
        "wrote {}: {} users x {} articles (seed {})\n\
         per-article missing ratio: min {min:.3}, max {max:.3}, mean {mean:.3}\n",
        args.out.display(),
        m.n_users(),
        m.n_articles(),
        args.seed
    ));
    Ok(())
}

fn theta_rating(theta: f64) -> Result<Rating, CliError> {
    Rating::new(theta)
        .ok_or_else(|| CliError::usage(format!("theta {theta} is outside [-10.0, +10.0]")))
}

fn pseudo_rating(value: f64) -> Result<Rating, CliError> {
    Rating::new(value)
        .ok_or_else(|| CliError::usage(format!("pseudo rating {value} is outside [-10.0, +10.0]")))
}

fn spec_for(
    which: StrategyArg,
    params: &StrategyParams,
    seed: u64,
) -> Result<StrategySpec, CliError> {
    Ok(match which {
        StrategyArg::Threshold => StrategySpec::Threshold {
            config: ThresholdConfig {
                theta: theta_rating(params.theta)?,
            },
        },
        StrategyArg::Kmeans => StrategySpec::Kmeans {
            fit: FitOptions {
                k: params.k,
                seed,
                max_iter: params.max_iter,
                plus_plus_init: params.kmeans_plus_plus,
            },
            config: KmeansRecConfig {
                top_n: params.top_n,
                pseudo_rating: pseudo_rating(params.pseudo_rating)?,
            },
        },
        StrategyArg::Content => StrategySpec::Content {
            half_width: params.x,
        },
    })
}

fn validate_positive(name: &str, value: usize) -> Result<(), CliError> {
    if value == 0 {
        return Err(CliError::usage(format!("{name} must be at least 1")));
    }
    Ok(())
}

fn load_dataset(path: &Path) -> Result<RatingsMatrix, CliError> {
    load_csv(path).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    validate_positive("--iterations", args.iterations)?;
    validate_positive("--txn-len", args.txn_len)?;
    if let Some(x) = args.params.x {
        if !x.is_finite() || x <= 0.0 {
            return Err(CliError::usage(format!("--x must be positive, got {x}")));
        }
    }
    let m = load_dataset(&args.input)?;

    // Table-1 row order when running everything
    let selected: Vec<StrategyArg> = if args.all {
        vec![StrategyArg::Threshold, StrategyArg::Kmeans, StrategyArg::Content]
    } else {
        vec![args.strategy.expect("clap requires one")]
    };

    let run_cfg = RunConfig {
        iterations: args.iterations,
        seed: args.seed,
        txn_len: args.txn_len,
    };
    let mut summaries = Vec::new();
    for which in selected {
        let spec = spec_for(which, &args.params, args.seed)?;
        let scheme = match args.scheme {
            SchemeArg::Auto => match spec.default_scheme() {
                BinScheme::Content => BinScheme::Content,
                BinScheme::Labeled { .. } => BinScheme::Labeled { edges: args.bins },
            },
            SchemeArg::Content => BinScheme::Content,
            SchemeArg::Labeled => BinScheme::Labeled { edges: args.bins },
        };
        eprintln!("preparing {} strategy...", spec.name());
        let prepared = prepare(&m, spec)?;
        if let (Some(path), Some(model)) = (&args.dump_model, prepared.model()) {
            let file = fs::File::create(path)
                .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
            model
                .dump(std::io::BufWriter::new(file))
                .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
            eprintln!("model dump written to {}", path.display());
        }
        eprintln!(
            "running {} iterations against {}...",
            run_cfg.iterations,
            prepared.name()
        );
        let records = run(&m, &prepared, &run_cfg)?;
        summaries.push(reclab_core::bench::summarize(
            &prepared,
            &records,
            &run_cfg,
            scheme,
            args.qd_cutoffs,
        )?);
    }

    let report = compare_report(&summaries);
    if let Some(path) = &args.out {
        fs::write(path, report.to_json())
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        eprintln!("machine report written to {}", path.display());
    }
    emit(report.to_text());
    Ok(())
}

fn cmd_recommend(args: RecommendArgs) -> Result<(), CliError> {
    validate_positive("--txn-len", args.txn_len)?;
    let ids: Vec<usize> = args.txn.iter().flatten().copied().collect();
    if ids.is_empty() {
        return Err(CliError::usage("--txn is required, e.g. --txn 0,1,3,4"));
    }
    if ids.len() != args.txn_len {
        return Err(CliError::usage(format!(
            "transaction has {} articles but --txn-len is {}",
            ids.len(),
            args.txn_len
        )));
    }
    let m = load_dataset(&args.input)?;
    let txn =
        Transaction::for_matrix(ids, &m).map_err(|e| CliError::usage(e.to_string()))?;

    let spec = spec_for(args.strategy, &args.params, args.seed)?;
    let prepared = prepare(&m, spec)?;
    if let (Some(path), Some(model)) = (&args.dump_model, prepared.model()) {
        let file = fs::File::create(path)
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        model
            .dump(std::io::BufWriter::new(file))
            .map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    }
    let list = prepared
        .recommend(&m, &txn)
        .map_err(|e| CliError::runtime(e.to_string()))?;

    if list.is_empty() {
        emit("(empty result set)\n");
        return Ok(());
    }
    let mut out = String::from("article  score\n");
    for &(article, score) in list.entries() {
        out.push_str(&format!("a{article:<7}{score:.4}\n"));
    }
    emit(out);
    Ok(())
}
