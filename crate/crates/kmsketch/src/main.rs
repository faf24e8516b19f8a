use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use kmsketch::bench::{emit_csv, run_bench, BenchConfig};
use kmsketch::io::{load_csv_with, save_csv_with, save_matrix};
use kmsketch::plot::{emit_plot, Metric};
use kmsketch::timed::{millis, reduce, time};
use kmsketch::verify::{verify_suite, Suite};
use kmsketch_core::datagen::{gen_synth, Dataset, SynthSpec};
use kmsketch_core::kmeans::{accuracy, lloyd, normalized_objective, objective, ClusterAssignment, Init, KMeansConfig};
use kmsketch_core::reducers::{MethodKind, ReductionMethod, DEFAULT_EPSILON};

/// Dimensionality reduction for k-means: sampling, sign projection and approximate SVD.
#[derive(Parser)]
#[command(name = "kmsketch", version)]
struct Cli {
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true, env = "KMEANS_SKETCH_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic Gaussian-mixture dataset (labels in the last column).
    GenSynth(GenSynthArgs),
    /// Reduce a dataset to r features and write them as CSV.
    Reduce(ReduceArgs),
    /// Run Lloyd's k-means and report objective and accuracy.
    Cluster(ClusterArgs),
    /// Sweep methods and r over several trials; write CSV and optional SVG charts.
    Bench(BenchArgs),
    /// Run lemma verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Input CSV, one point per line.
    #[arg(long)]
    data: PathBuf,
    /// The last column holds zero-based integer labels.
    #[arg(long)]
    labels: bool,
    /// The first line is a header.
    #[arg(long)]
    header: bool,
}

#[derive(Args)]
struct GenSynthArgs {
    /// Number of centers.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Dimension.
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    per_center: usize,
    /// Side length of the hypercube holding the centers.
    #[arg(long, default_value_t = 2000.0)]
    side: f64,
    #[arg(long, default_value_t = 1.0)]
    variance: f64,
    #[arg(long)]
    out: PathBuf,
    /// Write a header line.
    #[arg(long)]
    header: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    SamplSvd,
    SamplApproxSvd,
    Rp,
    Svd,
    ApproxSvd,
}

impl From<Method> for MethodKind {
    fn from(m: Method) -> Self {
        match m {
            Method::SamplSvd => MethodKind::SamplSvd,
            Method::SamplApproxSvd => MethodKind::SamplApproxSvd,
            Method::Rp => MethodKind::Rp,
            Method::Svd => MethodKind::Svd,
            Method::ApproxSvd => MethodKind::ApproxSvd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Uniform,
    #[value(name = "kmeans++")]
    KMeansPlusPlus,
}

impl From<InitArg> for Init {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::Uniform => Init::UniformSample,
            InitArg::KMeansPlusPlus => Init::KMeansPlusPlus,
        }
    }
}

#[derive(Args)]
struct LloydArgs {
    /// Number of clusters; defaults to the label count when labels are given.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 5)]
    replicates: usize,
    #[arg(long, value_enum, default_value = "uniform")]
    init: InitArg,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    method: Method,
    /// Rank parameter.
    #[arg(long)]
    k: Option<usize>,
    /// Number of features (ignored by svd and approx-svd).
    #[arg(long)]
    r: usize,
    /// Accuracy parameter of the approximate SVD.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    lloyd: LloydArgs,
    /// Write one label per line.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    lloyd: LloydArgs,
    /// Comma-separated methods.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sampl-svd,sampl-approx-svd,rp,svd,approx-svd")]
    methods: Vec<Method>,
    /// Comma-separated ascending r values.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25,30,35,40,45,50,55,60,65,70,75,80,85,90,95,100")]
    r: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Omit the full-dimensional baseline rows.
    #[arg(long)]
    no_baseline: bool,
    /// Write 0 for timing columns so output is reproducible.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: PathBuf,
    /// Directory for time.svg, objective.svg and (with labels) accuracy.svg.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name (pythagoras, lemma4..lemma9, rsvd, mailman, jl) or `all`.
    #[arg(long, default_value = "all", value_parser = parse_suites)]
    suite: SuiteSelection,
    /// Trials per suite; each suite has its own default.
    #[arg(long)]
    trials: Option<usize>,
    /// One JSON object per report.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let seed = cli.seed;
    match cli.command {
        Command::GenSynth(args) => gen_synth_cmd(args, seed),
        Command::Reduce(args) => reduce_cmd(args, seed),
        Command::Cluster(args) => cluster_cmd(args, seed),
        Command::Bench(args) => bench_cmd(args, seed),
        Command::Verify(args) => verify_cmd(args, seed),
    }
}

fn load(args: &DataArgs) -> anyhow::Result<Dataset> {
    Ok(load_csv_with(&args.data, args.labels, args.header)?)
}

fn resolve_k(k: Option<usize>, ds: &Dataset) -> anyhow::Result<usize> {
    match k {
        Some(k) => Ok(k),
        None if ds.k > 0 => Ok(ds.k),
        None => bail!("--k is required when the data has no labels"),
    }
}

fn kmeans_config(args: &LloydArgs, k: usize, seed: u64) -> KMeansConfig {
    KMeansConfig { k, max_iters: args.max_iters, replicates: args.replicates, seed, init: args.init.into() }
}

fn gen_synth_cmd(args: GenSynthArgs, seed: u64) -> anyhow::Result<ExitCode> {
    let spec = SynthSpec {
        centers: args.k,
        dim: args.n,
        points_per_center: args.per_center,
        side: args.side,
        variance: args.variance,
        seed,
    };
    let ds = gen_synth(&spec)?;
    save_csv_with(&ds, &args.out, args.header)?;
    let (m, n) = ds.points.shape();
    println!("seed {seed}");
    println!("wrote {m}x{n} dataset with {} clusters to {}", ds.k, args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn reduce_cmd(args: ReduceArgs, seed: u64) -> anyhow::Result<ExitCode> {
    let ds = load(&args.data)?;
    let k = resolve_k(args.k, &ds)?;
    let method = ReductionMethod::with_epsilon(args.method.into(), args.epsilon)?;
    let res = reduce(&ds.points, method, k, args.r, seed)?;
    save_matrix(&res.c, &args.out)?;
    println!("seed {seed}");
    println!(
        "{}: {}x{} -> {}x{} in {:.3} ms, written to {}",
        method.kind,
        ds.points.rows(),
        ds.points.cols(),
        res.c.rows(),
        res.c.cols(),
        millis(res.elapsed),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cluster_cmd(args: ClusterArgs, seed: u64) -> anyhow::Result<ExitCode> {
    let ds = load(&args.data)?;
    let k = resolve_k(args.lloyd.k, &ds)?;
    let cfg = kmeans_config(&args.lloyd, k, seed);
    let (asg, elapsed) = time(|| lloyd(&ds.points, &cfg));
    let asg: ClusterAssignment = asg?;
    println!("seed {seed}");
    println!("k {k}");
    println!("cluster_ms {:.3}", millis(elapsed));
    println!("objective {}", objective(&ds.points, &asg)?);
    println!("normalized_objective {}", normalized_objective(&ds.points, &asg)?);
    if let Some(truth) = &ds.labels {
        println!("accuracy {}", accuracy(&asg, truth)?);
    }
    if let Some(out) = &args.out {
        let text: String = asg.labels.iter().map(|l| format!("{l}\n")).collect();
        std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn bench_cmd(args: BenchArgs, seed: u64) -> anyhow::Result<ExitCode> {
    let ds = load(&args.data)?;
    let k = resolve_k(args.lloyd.k, &ds)?;
    let methods = args
        .methods
        .iter()
        .map(|&m| ReductionMethod::with_epsilon(m.into(), args.epsilon))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = BenchConfig {
        methods,
        r_grid: args.r.clone(),
        trials: args.trials,
        seed,
        kmeans: kmeans_config(&args.lloyd, k, seed),
        include_full_baseline: !args.no_baseline,
        record_timing: !args.no_timing,
    };
    let run = run_bench(&ds, &cfg)?;
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    emit_csv(&run.records, &args.out)?;
    println!("seed {seed}");
    println!("wrote {} records to {}", run.records.len(), args.out.display());
    if let Some(dir) = &args.plot_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for metric in Metric::ALL {
            if metric == Metric::Accuracy && ds.labels.is_none() {
                continue;
            }
            let path = dir.join(format!("{}.svg", metric.name()));
            emit_plot(&run.records, metric, &path)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Clone)]
struct SuiteSelection(Vec<Suite>);

fn parse_suites(s: &str) -> Result<SuiteSelection, String> {
    if s == "all" {
        return Ok(SuiteSelection(Suite::ALL.to_vec()));
    }
    s.parse::<Suite>().map(|x| SuiteSelection(vec![x])).map_err(|e| e.to_string())
}

fn verify_cmd(args: VerifyArgs, seed: u64) -> anyhow::Result<ExitCode> {
    let suites = args.suite.0;
    if args.json {
        eprintln!("seed {seed}");
    } else {
        println!("seed {seed}");
    }
    let mut all_passed = true;
    for suite in suites {
        let trials = args.trials.unwrap_or_else(|| suite.default_trials());
        let report = verify_suite(suite, seed, trials)?;
        all_passed &= report.passed;
        if args.json {
            println!("{}", serde_json::to_string(&report)?);
        } else {
            println!("{report}");
        }
    }
    Ok(if all_passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
