//! Command implementations behind the `shapley-lg` binary.
//!
//! Each `cmd_*` function takes its parsed arguments and returns the value to
//! be written; the binary only handles output and exit codes.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::blocks::{detect_blocks, lg_groups_indices};
use crate::error::{ModelValidationError, ValidationKind};
use crate::expr::{parse_program, ParseError};
use crate::indices::{lg_indices_with, SobolMethod};
use crate::io::{partition_labels, read_json, DistFile, ModelFile, ReportFile, ReportMetadata};
use crate::mc::{block_additive_shapley, estimate_variance, mc_shapley, Block, McConfig};
use crate::model::{generate_block_instance, generate_random_instance, LinearGaussianModel};
use crate::permutation::{
    cv_from_estimates, exact_permutation_shapley, random_permutation_shapley,
    replicate_random_permutation,
};
use crate::Error;

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Parse(ParseError),
    Usage(String),
}

impl CliError {
    /// 0 success, 1 I/O or usage, 2 validation, 3 cap/budget, 4 parse.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 4,
            CliError::Usage(_) => 1,
            CliError::Lib(e) => match e {
                Error::Validation(_) | Error::ZeroVariance(_) | Error::Dimension(_) => 2,
                Error::CapExceeded { .. }
                | Error::BudgetExceeded { .. }
                | Error::PermutationGuard { .. } => 3,
                Error::Format(_) => 4,
                Error::Io(_) | Error::InvalidArgument(_) | Error::Subset(_) => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Parse(e) => write!(f, "parse error at {e}"),
            CliError::Usage(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<ModelValidationError> for CliError {
    fn from(e: ModelValidationError) -> Self {
        CliError::Lib(e.into())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "shapley-lg", version, about = "Sobol indices and Shapley effects for Gaussian-input models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact indices of a linear Gaussian model file.
    Compute(ComputeArgs),
    /// Permutation estimators of the Shapley effects.
    Estimate(EstimateArgs),
    /// Write a random (block) model file.
    Generate(GenerateArgs),
    /// Timing table of the exact algorithms, as CSV.
    Benchmark(BenchmarkArgs),
    /// Monte Carlo Shapley effects of an expression model.
    Mc(McArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Split the lattice along the independent groups of the covariance.
    #[arg(long)]
    pub groups: bool,
    /// Covariances with absolute value at most this are treated as zero.
    #[arg(long, default_value_t = 0.0)]
    pub eps_block: f64,
    /// Subset-sum transform for the Sobol indices (`false`: literal 3^p loop).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub fast_sobol: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimateMethod {
    ExactPerm,
    RandomPerm,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = EstimateMethod::RandomPerm)]
    pub method: EstimateMethod,
    /// Permutations per estimate.
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replicates; above 1 a CV summary is added.
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    /// Dimension of a dense instance.
    #[arg(long, conflicts_with_all = ["k", "n"])]
    pub p: Option<usize>,
    /// Number of independent blocks.
    #[arg(long, requires = "n")]
    pub k: Option<usize>,
    /// Block size.
    #[arg(long, requires = "k")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    /// Dimensions (`6,8`), or `KxN` block shapes with `--groups` (`4x4,2x6`).
    #[arg(long)]
    pub sizes: String,
    #[arg(long)]
    pub groups: bool,
    /// Timed repetitions per row; the median is reported.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Seed of the generated instances.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Expression file defining `f` and optionally block functions `g[...]`.
    #[arg(long)]
    pub expr: PathBuf,
    /// Input distribution file (`gamma`, optional `mu`).
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use the block functions `g[...]` and the block-additive estimator.
    #[arg(long)]
    pub groups: bool,
    #[arg(long, default_value_t = 0.0)]
    pub eps_block: f64,
    #[arg(long, default_value_t = 1000)]
    pub m: usize,
    #[arg(long, default_value_t = 10_000)]
    pub n_var: usize,
    #[arg(long, default_value_t = 1)]
    pub n_outer: usize,
    #[arg(long, default_value_t = 3)]
    pub n_inner: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of model evaluations allowed.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub budget: u128,
    /// Evaluate the model from one thread only.
    #[arg(long)]
    pub serial: bool,
}

pub fn load_model(path: &Path) -> CliResult<LinearGaussianModel> {
    let file: ModelFile = read_json(path)?;
    Ok(file.to_model()?)
}

pub fn cmd_compute(args: &ComputeArgs) -> CliResult<ReportFile> {
    let model = load_model(&args.model)?;
    if args.groups {
        let report = lg_groups_indices(&model, args.eps_block)?;
        let mut file = ReportFile::from_grouped(&report, model.total_variance(), "lg-groups-indices");
        file.metadata.config = Some(json!({ "eps_block": args.eps_block }));
        Ok(file)
    } else {
        let method = if args.fast_sobol { SobolMethod::Fast } else { SobolMethod::Naive };
        let report = lg_indices_with(&model, method)?;
        Ok(ReportFile::from_report(&report, "lg-indices"))
    }
}

pub fn cmd_estimate(args: &EstimateArgs) -> CliResult<ReportFile> {
    let model = load_model(&args.model)?;
    let p = model.p();
    let var_y = model.total_variance();
    match args.method {
        EstimateMethod::ExactPerm => {
            if args.reps > 1 {
                return Err(CliError::Usage("exact-perm is deterministic; --reps must be 1".into()));
            }
            let shapley = exact_permutation_shapley(&model)?;
            let mut meta = ReportMetadata::new("exact-permutation", p);
            let perms: u64 = (1..=p as u64).product();
            meta.eval_count = Some(perms * (p as u64 - 1));
            Ok(ReportFile::shapley_only(var_y, shapley, meta))
        }
        EstimateMethod::RandomPerm => {
            let mut meta = ReportMetadata::new("random-permutation", p);
            meta.seed = Some(args.seed);
            meta.config = Some(json!({ "m": args.m, "reps": args.reps }));
            if args.reps <= 1 {
                let est = random_permutation_shapley(&model, args.m, args.seed)?;
                let mut file = ReportFile::shapley_only(var_y, est.shapley_hat, meta);
                file.shapley_variance = est.per_i_variance;
                Ok(file)
            } else {
                let runs = replicate_random_permutation(&model, args.m, args.reps, args.seed)?;
                let estimates: Vec<Vec<f64>> = runs.into_iter().map(|r| r.shapley_hat).collect();
                let cv = cv_from_estimates(&estimates, args.m, args.seed)?;
                let mut file = ReportFile::shapley_only(var_y, cv.per_i_mean.clone(), meta);
                file.cv = Some(cv);
                Ok(file)
            }
        }
    }
}

pub fn cmd_generate(args: &GenerateArgs) -> CliResult<ModelFile> {
    let model = match (args.p, args.k, args.n) {
        (Some(p), None, None) if p >= 1 => generate_random_instance(p, args.seed),
        (None, Some(k), Some(n)) if k >= 1 && n >= 1 => generate_block_instance(k, n, args.seed),
        _ => return Err(CliError::Usage("give either --p P or --k K --n N, all positive".into())),
    };
    Ok(ModelFile::from_model(&model))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchSize {
    Dense(usize),
    Blocks { k: usize, n: usize },
}

impl FromStr for BenchSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let num = |t: &str| -> Result<usize, String> {
            match t.trim().parse::<usize>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(format!("bad size '{s}'")),
            }
        };
        match s.split_once(['x', 'X']) {
            Some((k, n)) => Ok(BenchSize::Blocks { k: num(k)?, n: num(n)? }),
            None => Ok(BenchSize::Dense(num(s)?)),
        }
    }
}

pub fn parse_sizes(list: &str, groups: bool) -> CliResult<Vec<BenchSize>> {
    let sizes: Vec<BenchSize> = list
        .split(',')
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(CliError::Usage)?;
    if sizes.is_empty() {
        return Err(CliError::Usage("empty size list".into()));
    }
    for s in &sizes {
        match (s, groups) {
            (BenchSize::Dense(_), true) => {
                return Err(CliError::Usage("with --groups, sizes are KxN block shapes".into()))
            }
            (BenchSize::Blocks { .. }, false) => {
                return Err(CliError::Usage("block shapes KxN need --groups".into()))
            }
            _ => {}
        }
    }
    Ok(sizes)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub algorithm: String,
    pub p: usize,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub median_seconds: f64,
    pub eval_count: u64,
}

/// Median wall-clock seconds of `reps` runs of `f`.
pub fn median_seconds<F: FnMut()>(reps: usize, mut f: F) -> f64 {
    let mut times: Vec<f64> = (0..reps.max(1))
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .collect();
    times.sort_by(f64::total_cmp);
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        0.5 * (times[n / 2 - 1] + times[n / 2])
    }
}

/// Times the exact algorithms on generated instances. Dense sizes compare
/// the full lattice with exact permutations (skipped above p = 8); block
/// shapes compare the grouped lattice with the full one (skipped above the
/// lattice cap).
pub fn cmd_benchmark(args: &BenchmarkArgs) -> CliResult<Vec<BenchRow>> {
    let sizes = parse_sizes(&args.sizes, args.groups)?;
    let mut rows = Vec::new();
    for size in sizes {
        match size {
            BenchSize::Dense(p) => {
                crate::subset::check_lattice_dim(p)?;
                let model = generate_random_instance(p, args.seed);
                let t = median_seconds(args.reps, || {
                    lg_indices_with(&model, SobolMethod::Fast).unwrap();
                });
                rows.push(BenchRow {
                    algorithm: "lg-indices".into(),
                    p,
                    k: None,
                    n: None,
                    median_seconds: t,
                    eval_count: 1u64 << p,
                });
                if p <= crate::permutation::EXACT_PERM_MAX_P {
                    let t = median_seconds(args.reps, || {
                        exact_permutation_shapley(&model).unwrap();
                    });
                    let perms: u64 = (1..=p as u64).product();
                    rows.push(BenchRow {
                        algorithm: "exact-permutation".into(),
                        p,
                        k: None,
                        n: None,
                        median_seconds: t,
                        eval_count: perms * (p as u64 - 1),
                    });
                }
            }
            BenchSize::Blocks { k, n } => {
                crate::subset::check_lattice_dim(n)?;
                let p = k * n;
                let model = generate_block_instance(k, n, args.seed);
                let mut eval_count = 0;
                let t = median_seconds(args.reps, || {
                    eval_count = lg_groups_indices(&model, 0.0).unwrap().eval_count as u64;
                });
                rows.push(BenchRow {
                    algorithm: "lg-groups-indices".into(),
                    p,
                    k: Some(k),
                    n: Some(n),
                    median_seconds: t,
                    eval_count,
                });
                if p <= crate::LATTICE_CAP {
                    let t = median_seconds(args.reps, || {
                        lg_indices_with(&model, SobolMethod::Fast).unwrap();
                    });
                    rows.push(BenchRow {
                        algorithm: "lg-indices".into(),
                        p,
                        k: Some(k),
                        n: Some(n),
                        median_seconds: t,
                        eval_count: 1u64 << p,
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], w: W) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)
            .map_err(|e| CliError::Lib(Error::Format(e.to_string())))?;
    }
    wtr.flush().map_err(|e| CliError::Lib(Error::Io(e)))?;
    Ok(())
}

pub fn cmd_mc(args: &McArgs) -> CliResult<ReportFile> {
    let src = std::fs::read_to_string(&args.expr).map_err(Error::Io)?;
    let program = parse_program(&src)?;
    let dist: DistFile = read_json(&args.dist)?;
    let input = dist.to_input()?;
    let p = input.p();
    if program.max_input > p {
        return Err(Error::Dimension(format!(
            "expressions read x{} but the distribution has {p} inputs",
            program.max_input
        ))
        .into());
    }
    let cfg = McConfig {
        m: args.m,
        n_var: args.n_var,
        n_outer: args.n_outer,
        n_inner: args.n_inner,
        seed: args.seed,
        budget: args.budget,
        serial: args.serial,
    };
    let config = json!({
        "m": cfg.m,
        "n_var": cfg.n_var,
        "n_outer": cfg.n_outer,
        "n_inner": cfg.n_inner,
        "budget": cfg.budget.to_string(),
    });

    if args.groups {
        if program.blocks.is_empty() {
            return Err(CliError::Usage("--groups needs block functions g[...] in the expression file".into()));
        }
        let blocks: Vec<Block> = program
            .blocks
            .iter()
            .map(|b| {
                let idx: Vec<usize> = b.labels.iter().map(|l| l - 1).collect();
                Block {
                    input: input.marginal(&idx),
                    model: b.model(),
                    indices: idx,
                }
            })
            .collect();
        let covered: usize = blocks.iter().map(|b| b.indices.len()).sum();
        if covered != p {
            return Err(Error::Dimension(format!(
                "block functions cover {covered} inputs, the distribution has {p}"
            ))
            .into());
        }
        let est = block_additive_shapley(&blocks, &cfg)?;
        let found = detect_blocks(input.gamma(), args.eps_block);
        for g in found.groups() {
            let j = est.partition.group_of(g[0]);
            if g.iter().any(|&i| est.partition.group_of(i) != j) {
                return Err(ModelValidationError::new(
                    ValidationKind::DimensionMismatch,
                    "block functions do not follow the independent groups of gamma",
                )
                .into());
            }
        }
        let mut meta = ReportMetadata::new("block-additive-mc", p);
        meta.partition = Some(partition_labels(&est.partition));
        meta.seed = Some(args.seed);
        meta.config = Some(config);
        let var_y = est.block_variances.iter().sum();
        Ok(ReportFile::shapley_only(var_y, est.shapley, meta))
    } else {
        let Some(model) = program.output_model(p) else {
            return Err(CliError::Usage("the expression file defines no output 'f'".into()));
        };
        let est = mc_shapley(&model, &input, &cfg)?;
        let var_y = estimate_variance(&model, &input, cfg.n_var, cfg.seed);
        let mut meta = ReportMetadata::new("mc-shapley", p);
        meta.seed = Some(args.seed);
        meta.config = Some(config);
        let mut file = ReportFile::shapley_only(var_y, est.shapley_hat, meta);
        file.shapley_variance = est.per_i_variance;
        Ok(file)
    }
}
