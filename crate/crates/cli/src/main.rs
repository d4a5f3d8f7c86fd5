mod bounds;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use biunitary::arith::{factorize, omega, sigma_bu, sigma_classic, sigma_unitary};
use biunitary::lemmas::{LemmaReport, Verifier};
use biunitary::report::{compare_to_paper, emit, OutputFormat, TableSummary};
use biunitary::search::{run_search, verify_named_sets, SearchConfig, DEFAULT_SEGMENT_SIZE};

use bounds::{parse_number, validate_interval};

/// Biunitary superperfect search and verification.
#[derive(Parser)]
#[command(name = "busp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print σ**, σ*, σ, ω and the σ** iterate for one integer
    Compute {
        /// Decimal or 2^k
        #[arg(value_parser = parse_number)]
        n: u64,
    },
    /// Find every n in [lo, hi] dividing σ**(σ**(n))
    Search(SearchArgs),
    /// Run the lemma verifiers over finite domains
    Lemmas(LemmaArgs),
    /// Compare a JSON summary against the reference table
    VerifyTable {
        summary: PathBuf,
        /// Print the comparison as JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Check the biunitary perfect and unitary superperfect lists
    NamedSets,
}

#[derive(Args)]
struct SearchArgs {
    /// Decimal or 2^k
    #[arg(value_parser = parse_number)]
    lo: u64,
    /// Decimal or 2^k, at most 2^40
    #[arg(value_parser = parse_number)]
    hi: u64,
    #[arg(long, value_parser = parse_number, default_value_t = DEFAULT_SEGMENT_SIZE)]
    segment_size: u64,
    /// Defaults to the number of available cores
    #[arg(long, env = "BUSP_WORKERS")]
    workers: Option<usize>,
    /// Checkpoint file, resumed from if it exists
    #[arg(long, visible_alias = "resume", value_name = "PATH")]
    checkpoint: Option<PathBuf>,
    /// Write results here once the search completes
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format; inferred from the --out extension when omitted
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// No per-segment progress on stderr
    #[arg(long, short)]
    quiet: bool,
    /// Stop after merging this many segments, as if interrupted
    #[arg(long, hide = true)]
    stop_after_segments: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long, value_parser = parse_number, default_value = "10^6")]
    parity_max: u64,
    #[arg(long, value_parser = parse_number, default_value_t = 97)]
    ratio_pmax: u64,
    #[arg(long, default_value_t = 30)]
    ratio_emax: u32,
    #[arg(long, default_value_t = 5)]
    ratio_mmax: u32,
    #[arg(long, value_parser = parse_number, default_value_t = 12)]
    bang_amax: u64,
    #[arg(long, default_value_t = 18)]
    bang_nmax: u32,
    #[arg(long, value_parser = parse_number, default_value_t = 200)]
    classify_pmax: u64,
    #[arg(long, default_value_t = 6)]
    classify_emax: u32,
    #[arg(long, default_value_t = 40)]
    pow2_emax: u32,
    /// Replace σ** by σ inside the verifiers; every check should then fail
    #[arg(long)]
    inject_fault: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` is a verified mismatch or failed lemma.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Compute { n } => compute(n),
        Command::Search(args) => search(args),
        Command::Lemmas(args) => lemmas(args),
        Command::VerifyTable { summary, json } => verify_table(&summary, json),
        Command::NamedSets => {
            let report = verify_named_sets()?;
            println!("{report}");
            Ok(report.passed)
        }
    }
}

fn compute(n: u64) -> Result<bool> {
    if n == 0 {
        bail!("n must be positive");
    }
    let f = factorize(n)?;
    let show = |r: Result<u64, _>| r.map_or_else(|e| format!("overflow ({e})"), |v: u64| v.to_string());
    println!("n = {n}");
    println!("factorization = {f}");
    let s1 = sigma_bu(&f);
    println!("sigma** = {}", show(s1.clone()));
    println!("sigma* = {}", show(sigma_unitary(&f)));
    println!("sigma = {}", show(sigma_classic(&f)));
    println!("omega = {}", omega(&f));
    let s2 = s1.and_then(|s1| sigma_bu(&factorize(s1)?));
    println!("sigma**(sigma**) = {}", show(s2.clone()));
    match s2 {
        Ok(s2) if s2 % n == 0 => println!("n divides sigma**(sigma**(n)): k = {}", s2 / n),
        Ok(_) => println!("n does not divide sigma**(sigma**(n))"),
        Err(_) => {}
    }
    Ok(true)
}

fn output_format(args: &SearchArgs, out: &Path) -> OutputFormat {
    match args.format {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => OutputFormat::Json,
        None => OutputFormat::Csv,
    }
}

fn search(args: SearchArgs) -> Result<bool> {
    validate_interval(args.lo, args.hi).map_err(anyhow::Error::msg)?;
    if args.segment_size == 0 {
        bail!("--segment-size must be positive");
    }
    let workers = match args.workers {
        Some(0) => bail!("--workers must be positive"),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    if let Some(out) = &args.out {
        let parent = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !parent.is_dir() {
            bail!("output directory {} does not exist", parent.display());
        }
    }

    let mut config = SearchConfig::new(args.lo, args.hi)
        .segment_size(args.segment_size)
        .workers(workers)
        .progress(!args.quiet);
    if let Some(path) = &args.checkpoint {
        config = config.checkpoint(path);
    }
    if let Some(limit) = args.stop_after_segments {
        config = config.stop_after_segments(limit);
    }

    let outcome = run_search(&config)?;
    if !outcome.is_complete() {
        println!(
            "stopped at {} of [{}, {}]; rerun with the same --checkpoint to continue",
            outcome.watermark, args.lo, args.hi
        );
        return Ok(true);
    }

    let summary = &outcome.summary;
    println!("interval [{}, {}]", args.lo, args.hi);
    println!("{:>3} {:>6}  members", "k", "count");
    for (k, row) in &summary.per_k {
        let shown: Vec<String> = row.members.iter().take(8).map(u64::to_string).collect();
        let more = if row.members.len() > 8 { ", ..." } else { "" };
        println!("{k:>3} {:>6}  {}{more}", row.count, shown.join(", "));
    }
    println!("total {}", summary.total());

    if let Some(out) = &args.out {
        emit(summary, output_format(&args, out), out).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(true)
}

fn lemmas(args: LemmaArgs) -> Result<bool> {
    let v = if args.inject_fault {
        Verifier::with_injected_fault()
    } else {
        Verifier::standard()
    };
    let reports: Vec<LemmaReport> = vec![
        v.check_parity(args.parity_max)?,
        v.check_ratio_bounds(args.ratio_pmax, args.ratio_emax, args.ratio_mmax)?,
        v.check_bang(args.bang_amax, args.bang_nmax)?,
        v.check_classification(args.classify_pmax, args.classify_emax)?,
        v.check_sbu_pow2_prime_power(args.pow2_emax)?,
        v.check_case_constants()?,
    ];
    for r in &reports {
        println!("{r}");
    }
    let passed = reports.iter().all(|r| r.passed);
    println!("{}", if passed { "all lemma checks passed" } else { "lemma checks FAILED" });
    Ok(passed)
}

fn verify_table(path: &Path, json: bool) -> Result<bool> {
    let summary = TableSummary::load(path)?;
    let cmp = compare_to_paper(&summary)?;
    if json {
        print!("{}", cmp.to_json());
    } else {
        println!("{cmp}");
    }
    Ok(cmp.is_match())
}
