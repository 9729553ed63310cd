//! The `tsvd` command-line driver.
//!
//! Subcommands: `gen`, `compress`, `complete`, `info`, `import-pgm`. Each
//! writes a JSON [`RunMetrics`] record to `--metrics <path>` or stdout.
//!
//! Exit codes: 0 success, 2 input or format error, 3 numerical failure,
//! 4 infeasible parameter.

pub mod metrics;
pub mod pgm;
pub mod tensor_file;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::completion::{complete_with_reference, AdmmConfig};
use crate::compression::{self, k_for_ratio, Method};
use crate::error::{Error, Result};
use crate::tensor::{t_product, Tensor};
use crate::transform::{Mask, SamplingOperator};
use crate::tsvd;

pub use metrics::{CompressRecord, Db, Parameters, Results, RunMetrics};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Divergence { .. } | Error::SvdFailure { .. } | Error::SymmetryViolation { .. } => {
            EXIT_NUMERICAL
        }
        Error::Infeasible(_) | Error::OutOfRange { .. } => EXIT_INFEASIBLE,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "tsvd", version, about = "t-SVD tensor compression and completion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random tensor X ∗ Y with a given tubal rank.
    Gen(GenArgs),
    /// Compress an order-3 tensor and report ratio and RSE.
    Compress(CompressArgs),
    /// Recover missing entries by TNN minimization.
    Complete(CompleteArgs),
    /// Print multi-rank, tubal rank, TNN, TTN and Frobenius norm.
    Info(InfoArgs),
    /// Stack a directory of plain PGM frames into a tensor.
    ImportPgm(ImportPgmArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Extents, e.g. 30x30x10.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Dims,
    #[arg(long = "rank", visible_alias = "tubal-rank")]
    pub tubal_rank: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// svd, tsvd or tsvd-tubal.
    #[arg(long)]
    pub method: Method,
    /// One or more truncation parameters; several values run a sweep.
    #[arg(long, value_delimiter = ',', conflicts_with = "target_ratio", required_unless_present = "target_ratio")]
    pub k: Vec<usize>,
    /// Pick the largest k whose ratio reaches this target.
    #[arg(long)]
    pub target_ratio: Option<f64>,
    /// Reconstruction of the last k.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Serialized retained factors of the last k.
    #[arg(long)]
    pub compressed: Option<PathBuf>,
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Mask as a TSR1 tensor of zeros and ones.
    #[arg(long, group = "mask_source")]
    pub mask: Option<PathBuf>,
    /// Mask as a list of 1-based coordinates, one tuple per line.
    #[arg(long, group = "mask_source")]
    pub mask_coords: Option<PathBuf>,
    /// Observe each entry independently with this probability.
    #[arg(long, group = "mask_source")]
    pub sample_rate: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the mask that was used.
    #[arg(long)]
    pub save_mask: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_fit: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long)]
    pub positivity: bool,
    /// Ground truth for the RSE report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = tsvd::DEFAULT_RANK_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImportPgmArgs {
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

/// Tensor extents given on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dims(pub Vec<usize>);

/// Parses `30x30x10` or `30,30,10`.
pub fn parse_dims(s: &str) -> std::result::Result<Dims, String> {
    let dims = s
        .split(['x', 'X', ','])
        .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad extent {t:?}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if dims.len() < 3 || dims.contains(&0) {
        return Err(format!("need at least three positive extents, got {s:?}"));
    }
    Ok(Dims(dims))
}

/// Random `X ∗ Y` with `X ∈ ℝ^{n1×r×…}`, `Y ∈ ℝ^{r×n2×…}` and standard
/// normal entries drawn from ChaCha8 seeded with `seed` (X first, then Y, in
/// storage order). `r = 0` gives the zero tensor.
pub fn generate_low_tubal_rank(dims: &[usize], rank: usize, seed: u64) -> Result<Tensor> {
    crate::tensor::validate_dims(dims)?;
    let n0 = dims[0].min(dims[1]);
    if rank > n0 {
        return Err(Error::Infeasible(format!(
            "tubal rank {rank} exceeds min(n1, n2) = {n0}"
        )));
    }
    if rank == 0 {
        return Tensor::zeros(dims.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |d: Vec<usize>| {
        let len: usize = d.iter().product();
        let data = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
        Tensor::new(d, data)
    };
    let mut xd = dims.to_vec();
    xd[1] = rank;
    let mut yd = dims.to_vec();
    yd[0] = rank;
    let x = draw(xd)?;
    let y = draw(yd)?;
    t_product(&x, &y)
}

fn emit(metrics: &RunMetrics, path: Option<&Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(metrics)
        .map_err(|e| Error::Format(format!("metrics serialization: {e}")))?;
    match path {
        Some(p) => fs::write(p, json + "\n")?,
        None => println!("{json}"),
    }
    Ok(())
}

pub fn cmd_gen(args: &GenArgs) -> Result<RunMetrics> {
    let start = Instant::now();
    let t = generate_low_tubal_rank(&args.dims.0, args.tubal_rank, args.seed)?;
    tensor_file::write(&args.out, &t)?;
    Ok(RunMetrics {
        command: "gen",
        input_dims: args.dims.0.clone(),
        parameters: Parameters::Gen {
            tubal_rank: args.tubal_rank,
            seed: args.seed,
        },
        results: Results::Gen {
            frobenius: t.frobenius(),
        },
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn cmd_compress(args: &CompressArgs) -> Result<RunMetrics> {
    let start = Instant::now();
    let m = tensor_file::read(&args.input)?;
    let ks = match args.target_ratio {
        Some(target) => vec![k_for_ratio(args.method, m.dims(), target)?],
        None => args.k.clone(),
    };
    if ks.is_empty() {
        return Err(Error::Parameter("no k given".into()));
    }
    let mut records = Vec::with_capacity(ks.len());
    let mut last = None;
    for &k in &ks {
        let r = compression::compress(&m, args.method, k)?;
        records.push(CompressRecord {
            k,
            ratio: r.ratio,
            achieved_ratio: r.achieved_ratio,
            stored_scalars: r.compressed.scalar_count(),
            rse_db: Db(r.rse_db),
        });
        last = Some(r);
    }
    let last = last.expect("at least one k");
    if let Some(out) = &args.out {
        tensor_file::write(out, &last.reconstruction)?;
    }
    if let Some(path) = &args.compressed {
        fs::write(path, last.compressed.to_bytes())?;
    }
    Ok(RunMetrics {
        command: "compress",
        input_dims: m.dims().to_vec(),
        parameters: Parameters::Compress {
            method: args.method.as_str(),
            k: ks,
            target_ratio: args.target_ratio,
        },
        results: Results::Compress { records },
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn cmd_complete(args: &CompleteArgs) -> Result<RunMetrics> {
    let start = Instant::now();
    let input = tensor_file::read(&args.input)?;
    let dims = input.dims().to_vec();
    let (mask, source) = if let Some(p) = &args.mask {
        (tensor_file::read_mask(p)?, format!("file:{}", p.display()))
    } else if let Some(p) = &args.mask_coords {
        let text = fs::read_to_string(p)?;
        (tensor_file::parse_mask_coords(&text, &dims)?, format!("coords:{}", p.display()))
    } else if let Some(rate) = args.sample_rate {
        (Mask::bernoulli(dims.clone(), rate, args.seed)?, "bernoulli".to_string())
    } else {
        return Err(Error::Parameter(
            "one of --mask, --mask-coords or --sample-rate is required".into(),
        ));
    };
    if mask.dims() != dims.as_slice() {
        return Err(Error::Dimension(format!(
            "mask dims {:?} do not match input dims {:?}",
            mask.dims(),
            dims
        )));
    }
    if let Some(p) = &args.save_mask {
        tensor_file::write(p, &mask.to_tensor())?;
    }
    let truth = args.truth.as_deref().map(tensor_file::read).transpose()?;
    let y = SamplingOperator::new(mask.clone()).apply(&input)?;
    let cfg = AdmmConfig {
        rho: args.rho,
        max_iter: args.max_iter,
        tol_primal: args.tol,
        tol_fit: args.tol_fit,
        positivity: args.positivity,
    };
    let (x, report) = complete_with_reference(&y, &mask, &cfg, truth.as_ref())?;
    tensor_file::write(&args.out, &x)?;
    Ok(RunMetrics {
        command: "complete",
        input_dims: dims,
        parameters: Parameters::Complete {
            rho: args.rho,
            tol: args.tol,
            tol_fit: args.tol_fit,
            max_iter: args.max_iter,
            positivity: args.positivity,
            mask_source: source,
            sample_rate: args.sample_rate.filter(|_| args.mask.is_none() && args.mask_coords.is_none()),
            seed: args.sample_rate.map(|_| args.seed),
        },
        results: Results::Complete {
            iterations: report.iterations,
            converged: report.converged,
            observed: mask.observed_count(),
            final_primal_residual: report.primal_residuals.last().copied().unwrap_or(0.0),
            primal_residuals: report.primal_residuals,
            tnn_values: report.tnn_values,
            rse_db: report.final_rse_db.map(Db),
        },
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn cmd_info(args: &InfoArgs) -> Result<RunMetrics> {
    let start = Instant::now();
    let m = tensor_file::read(&args.input)?;
    let f = tsvd::t_svd(&m)?;
    Ok(RunMetrics {
        command: "info",
        input_dims: m.dims().to_vec(),
        parameters: Parameters::Info { tol: args.tol },
        results: Results::Info {
            frobenius: m.frobenius(),
            multi_rank: f.multi_rank(args.tol).0,
            tubal_rank: f.tubal_rank(args.tol),
            tnn: f.tnn(),
            ttn: f.ttn(),
        },
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

pub fn cmd_import_pgm(args: &ImportPgmArgs) -> Result<RunMetrics> {
    let start = Instant::now();
    let t = pgm::import_dir(&args.dir)?;
    tensor_file::write(&args.out, &t)?;
    let d = t.dims().to_vec();
    Ok(RunMetrics {
        command: "import-pgm",
        input_dims: d.clone(),
        parameters: Parameters::ImportPgm { frames: d[2] },
        results: Results::ImportPgm {
            height: d[0],
            width: d[1],
            frames: d[2],
        },
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

fn dispatch(cli: &Cli) -> Result<()> {
    let (metrics, path) = match &cli.command {
        Command::Gen(a) => (cmd_gen(a)?, a.metrics.as_deref()),
        Command::Compress(a) => (cmd_compress(a)?, a.metrics.as_deref()),
        Command::Complete(a) => (cmd_complete(a)?, a.metrics.as_deref()),
        Command::Info(a) => (cmd_info(a)?, a.metrics.as_deref()),
        Command::ImportPgm(a) => (cmd_import_pgm(a)?, a.metrics.as_deref()),
    };
    emit(&metrics, path)
}

/// Parses `args` (including the program name) and runs the command, returning
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
