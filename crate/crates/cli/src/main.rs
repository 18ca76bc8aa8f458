use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixbound_cli::{
    check_invariants, emit_csv, emit_plots, pair_bounds, parse_config, run_entropy_experiment, run_kl_experiment,
    selftest, CliError, ExperimentConfig, ResultRow,
};

#[derive(Parser)]
#[command(name = "mixbound", version, about = "Certified bounds on KL divergence and entropy of univariate mixtures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// KL bounds and Monte-Carlo error bars for every configured pair.
    Kl(RunArgs),
    /// Entropy bounds, MEUB and Monte-Carlo estimates for every configured mixture.
    Entropy(RunArgs),
    /// All bounds of one pair as a single JSON line.
    Bounds(BoundsArgs),
    /// Runs the built-in invariant suite.
    Selftest,
}

#[derive(Args)]
struct Source {
    /// Experiment or mixture JSON document.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Compiled-in experiment.
    #[arg(long, default_value = "paper-s4")]
    preset: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',')]
    samples: Option<Vec<usize>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    quad_tol: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: Source,
    /// Pair name; required when the config holds several pairs.
    #[arg(long)]
    pair: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

fn load(src: &Source) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &src.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            parse_config(&text)?
        }
        None => ExperimentConfig::preset(&src.preset)?,
    };
    if let Some(s) = src.seed {
        cfg.base_seed = s;
    }
    if let Some(s) = &src.samples {
        cfg.sample_sizes = s.clone();
    }
    if let Some(r) = src.reps {
        cfg.repetitions = r;
    }
    if let Some(t) = src.quad_tol {
        cfg.quad_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_outputs(rows: &[ResultRow], args: &RunArgs, stem: &str) -> Result<(), CliError> {
    let dir: &Path = &args.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    if args.format != Format::Svg {
        let path = dir.join(format!("{stem}.csv"));
        emit_csv(rows, &path)?;
        println!("wrote {}", path.display());
    }
    if args.format != Format::Csv {
        for p in emit_plots(rows, dir, stem)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn run_experiment(args: &RunArgs, entropy: bool) -> Result<ExitCode, CliError> {
    let cfg = load(&args.source)?;
    let (rows, stem) = if entropy {
        if cfg.mixtures.is_empty() {
            return Err(CliError::config("mixtures", "the entropy experiment needs at least one mixture"));
        }
        (run_entropy_experiment(&cfg), "entropy")
    } else {
        if cfg.pairs.is_empty() {
            return Err(CliError::config("pairs", "the KL experiment needs at least one pair"));
        }
        (run_kl_experiment(&cfg), "kl")
    };
    write_outputs(&rows, args, stem)?;
    let bad = check_invariants(&rows, &cfg);
    for b in &bad {
        eprintln!("invariant violated: {b}");
    }
    Ok(if bad.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_bounds(args: &BoundsArgs) -> Result<ExitCode, CliError> {
    let cfg = load(&args.source)?;
    let pair = match &args.pair {
        Some(n) => cfg
            .pairs
            .iter()
            .find(|p| &p.name == n)
            .ok_or_else(|| CliError::config("--pair", format!("no pair named {n:?}")))?,
        None if cfg.pairs.len() == 1 => &cfg.pairs[0],
        None => {
            let names: Vec<_> = cfg.pairs.iter().map(|p| p.name.as_str()).collect();
            return Err(CliError::config("--pair", format!("choose one of {names:?}")));
        }
    };
    let b = pair_bounds(pair, cfg.quad_tol)?;
    println!("{}", serde_json::to_string(&b).expect("plain data serializes"));
    Ok(ExitCode::SUCCESS)
}

fn run_selftest() -> ExitCode {
    let mut failed = 0;
    for c in selftest::run() {
        match c.outcome {
            Ok(()) => println!("ok   {}", c.name),
            Err(e) => {
                failed += 1;
                println!("FAIL {}: {e}", c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("MIXBOUND_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::config("MIXBOUND_THREADS", format!("expected a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config("MIXBOUND_THREADS", e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Kl(a) => run_experiment(a, false),
        Command::Entropy(a) => run_experiment(a, true),
        Command::Bounds(a) => run_bounds(a),
        Command::Selftest => Ok(run_selftest()),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
