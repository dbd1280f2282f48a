//! Command-line driver for non-negative sparse coding experiments:
//! dataset generation, factorization, recovery scoring, and graymap
//! rendering, all reproducible from seeds.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nnsc::bars::{self, BarsSpec};
use nnsc::solver::{nmf_fit, nnsc_fit, SolverConfig};
use nnsc::{Matrix, Mode, Problem};

/// Exit code for usage and input-validation problems; runtime and solver
/// failures exit 1. Stable contract for scripting.
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "nnsc", version, about = "Non-negative sparse coding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a bars dataset: X = A_orig * S_orig with sparse
    /// non-negative components.
    Generate(GenerateArgs),
    /// Factor a data matrix with NNSC or the NMF baseline.
    Factorize(FactorizeArgs),
    /// Match learned features against a reference and report recovery.
    Evaluate(EvaluateArgs),
    /// Render matrix columns as image tiles in a plain-text graymap.
    Render(RenderArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of data vectors to generate.
    #[arg(long)]
    samples: usize,
    /// Side length of the square images.
    #[arg(long, default_value_t = 3)]
    side: usize,
    /// Per-feature activation probability.
    #[arg(long, default_value_t = 0.2)]
    active_prob: f64,
    /// Mean amplitude of active components.
    #[arg(long, default_value_t = 1.0)]
    amp_scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV for the data matrix X.
    #[arg(long)]
    out: PathBuf,
    /// Output CSV for the generating features A_orig.
    #[arg(long)]
    features_out: PathBuf,
    /// Output CSV for the generating components S_orig.
    #[arg(long)]
    components_out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Nnsc,
    Nmf,
}

#[derive(Args)]
struct FactorizeArgs {
    /// Input CSV holding the data matrix X (samples as columns).
    #[arg(long)]
    input: PathBuf,
    /// Hidden dimensionality r.
    #[arg(long)]
    components: usize,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Sparseness weight; ignored by the nmf baseline.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    /// Initial gradient step size for the basis update.
    #[arg(long, default_value_t = 1e-2)]
    mu: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Relative objective-change stopping threshold.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV for the learned basis A.
    #[arg(long)]
    out_a: PathBuf,
    /// Output CSV for the learned components S.
    #[arg(long)]
    out_s: PathBuf,
    /// Optional CSV with per-iteration objective and diagnostics.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// CSV of learned features, one per column.
    #[arg(long)]
    learned: PathBuf,
    /// CSV of reference features, one per column.
    #[arg(long)]
    reference: PathBuf,
    /// Cosine similarity needed to count a feature as recovered.
    #[arg(long, default_value_t = 0.99)]
    threshold: f64,
}

#[derive(Args)]
struct RenderArgs {
    /// Input CSV; each column is a flattened side x side image.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 3)]
    side: usize,
    /// Output path for the P2 graymap.
    #[arg(long)]
    out: PathBuf,
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { code: USAGE, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }
}

fn read_matrix(path: &Path, what: &str) -> Result<Matrix, Failure> {
    Matrix::read_csv(path)
        .map_err(|e| Failure::usage(format!("cannot read {what} from {}: {e}", path.display())))
}

fn write_matrix(m: &Matrix, path: &Path, what: &str) -> Result<(), Failure> {
    m.write_csv(path)
        .map_err(|e| Failure::runtime(format!("cannot write {what} to {}: {e}", path.display())))
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let spec = BarsSpec {
        image_side: args.side,
        n_samples: args.samples,
        active_prob: args.active_prob,
        amp_scale: args.amp_scale,
        seed: args.seed,
    };
    let data = bars::generate(&spec).map_err(|e| Failure::usage(e.to_string()))?;
    println!(
        "generate samples={} side={} active_prob={} amp_scale={} seed={}",
        args.samples, args.side, args.active_prob, args.amp_scale, args.seed
    );
    write_matrix(&data.x, &args.out, "X")?;
    write_matrix(&data.a_orig, &args.features_out, "A_orig")?;
    write_matrix(&data.s_orig, &args.components_out, "S_orig")?;
    println!(
        "wrote X {}x{} -> {}, A_orig {}x{} -> {}, S_orig {}x{} -> {}",
        data.x.rows(),
        data.x.cols(),
        args.out.display(),
        data.a_orig.rows(),
        data.a_orig.cols(),
        args.features_out.display(),
        data.s_orig.rows(),
        data.s_orig.cols(),
        args.components_out.display()
    );
    Ok(())
}

fn cmd_factorize(args: &FactorizeArgs) -> Result<(), Failure> {
    if args.lambda < 0.0 || args.lambda.is_nan() {
        return Err(Failure::usage(format!("--lambda must be >= 0, got {}", args.lambda)));
    }
    if args.algo == Algo::Nmf && args.lambda != 0.0 {
        eprintln!("warning: lambda is ignored in NMF mode");
    }
    let x = read_matrix(&args.input, "data matrix")?;
    let lambda = match args.algo {
        Algo::Nnsc => args.lambda,
        Algo::Nmf => 0.0,
    };
    let problem = Problem::new(x, lambda).map_err(|e| Failure::usage(e.to_string()))?;
    let mut cfg = match args.algo {
        Algo::Nnsc => SolverConfig::nnsc(lambda),
        Algo::Nmf => SolverConfig::nmf(),
    };
    cfg.mu = args.mu;
    cfg.max_iters = args.max_iters;
    cfg.tol = args.tol;
    cfg.seed = args.seed;
    println!(
        "factorize algo={:?} components={} lambda={} mu={} max_iters={} tol={} eps_div={} seed={}",
        args.algo, args.components, lambda, cfg.mu, cfg.max_iters, cfg.tol, cfg.eps_div, cfg.seed
    );
    let result = match cfg.mode {
        Mode::Nnsc => nnsc_fit(&problem, args.components, &cfg),
        Mode::Nmf => nmf_fit(&problem, args.components, &cfg),
    };
    let (fact, trace) = result.map_err(|e| Failure::runtime(format!("solver failed: {e}")))?;
    write_matrix(&fact.a, &args.out_a, "basis A")?;
    write_matrix(&fact.s, &args.out_s, "components S")?;
    if let Some(trace_path) = &args.trace {
        trace
            .write_csv(trace_path)
            .map_err(|e| Failure::runtime(format!("cannot write trace: {e}")))?;
    }
    println!(
        "final objective {:.6e} after {} iterations",
        trace.final_objective(),
        trace.iterations()
    );
    Ok(())
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), Failure> {
    let learned = read_matrix(&args.learned, "learned features")?;
    let reference = read_matrix(&args.reference, "reference features")?;
    let report = bars::match_features(&learned, &reference, args.threshold)
        .map_err(|e| Failure::usage(e.to_string()))?;
    println!("{report}");
    println!(
        "recovered={} total={} threshold={}",
        report.recovered_count,
        reference.cols(),
        args.threshold
    );
    Ok(())
}

fn cmd_render(args: &RenderArgs) -> Result<(), Failure> {
    let m = read_matrix(&args.input, "image matrix")?;
    let pgm = bars::to_pgm(&m, args.side).map_err(|_| {
        Failure::usage(format!(
            "input has {} rows per column, expected side^2 = {}",
            m.rows(),
            args.side * args.side
        ))
    })?;
    std::fs::write(&args.out, pgm)
        .map_err(|e| Failure::runtime(format!("cannot write {}: {e}", args.out.display())))?;
    println!("wrote {} tiles ({} px side) to {}", m.cols(), args.side, args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Factorize(args) => cmd_factorize(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Render(args) => cmd_render(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
