//! The r-sweep benchmark: every method at every r for several independently
//! seeded trials, plus a full-dimensional Lloyd baseline per trial.

use std::fs::File;
use std::path::Path;
use std::time::Duration;

use kmsketch_core::datagen::Dataset;
use kmsketch_core::kmeans::{accuracy, lloyd, normalized_objective, objective, ClusterAssignment, KMeansConfig};
use kmsketch_core::linalg::multiply;
use kmsketch_core::reducers::{self, MethodKind, ReductionMethod};
use kmsketch_core::rng::derive_seed;
use kmsketch_core::svd::top_k_right_singular;
use kmsketch_core::Matrix;

use crate::timed::{millis, time};
use crate::{Error, Result};

/// Method name of the full-dimensional baseline rows.
pub const BASELINE: &str = "kmeans";

pub const CSV_HEADER: [&str; 9] =
    ["method", "r", "trial", "seed", "reduce_ms", "cluster_ms", "objective", "normalized_objective", "accuracy"];

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub methods: Vec<ReductionMethod>,
    /// Ascending, positive. Ignored by the SVD methods, which always use `r = k`.
    pub r_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Lloyd settings; `seed` is replaced by a per-trial child seed.
    pub kmeans: KMeansConfig,
    pub include_full_baseline: bool,
    /// When false, `reduce_ms` and `cluster_ms` are written as 0 so output is reproducible.
    pub record_timing: bool,
}

impl BenchConfig {
    /// All five methods, `r = 5, 10, …, 100`, five trials, with baseline and timing.
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            methods: MethodKind::ALL.iter().map(|&m| ReductionMethod::new(m)).collect(),
            r_grid: (1..=20).map(|i| 5 * i).collect(),
            trials: 5,
            seed,
            kmeans: KMeansConfig::new(k, seed),
            include_full_baseline: true,
            record_timing: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Invalid("trials must be at least 1".into()));
        }
        if self.r_grid.first() == Some(&0) || self.r_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("r grid must be positive and strictly ascending".into()));
        }
        if self.kmeans.k < 2 {
            return Err(Error::Invalid("k must be at least 2".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub method: String,
    pub r: usize,
    pub trial: usize,
    /// The trial's child seed; reduction and clustering seeds derive from it.
    pub seed: u64,
    pub reduce_ms: f64,
    pub cluster_ms: f64,
    pub objective: f64,
    pub normalized_objective: f64,
    pub accuracy: Option<f64>,
}

impl BenchRecord {
    pub fn total_ms(&self) -> f64 {
        self.reduce_ms + self.cluster_ms
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchRun {
    pub records: Vec<BenchRecord>,
    /// One line per skipped (method, r) combination.
    pub warnings: Vec<String>,
}

pub fn trial_seed(master: u64, trial: usize) -> u64 {
    derive_seed(master, trial as u64)
}

fn reduction_seed(trial_seed: u64, kind: MethodKind, r: usize) -> u64 {
    let pos = MethodKind::ALL.iter().position(|&m| m == kind).unwrap_or(0) as u64;
    derive_seed(derive_seed(trial_seed, 1 + pos), r as u64)
}

fn kmeans_seed(trial_seed: u64) -> u64 {
    derive_seed(trial_seed, 0)
}

/// Exact `V_k` of the data, computed once and charged to every method that uses it.
struct ExactBasis {
    z: Matrix,
    elapsed: Duration,
}

/// Runs the sweep. Records come out in configuration order of methods, then
/// ascending `r`, then trial, followed by the baseline rows (`r = n`).
/// Selection methods skip any `r > n` with a warning.
pub fn run_bench(ds: &Dataset, cfg: &BenchConfig) -> Result<BenchRun> {
    cfg.validate()?;
    let a = &ds.points;
    let (_, n) = a.shape();
    let k = cfg.kmeans.k;
    let mut run = BenchRun::default();

    let exact = if cfg.methods.iter().any(|m| m.kind.uses_exact_basis()) {
        let (z, elapsed) = time(|| top_k_right_singular(a, k));
        Some(ExactBasis { z: z?, elapsed })
    } else {
        None
    };

    for method in &cfg.methods {
        let grid: Vec<usize> = if method.kind.is_svd_family() { vec![k] } else { cfg.r_grid.clone() };
        for r in grid {
            if method.kind.is_selection() && r > n {
                run.warnings.push(format!("{}: r = {r} exceeds n = {n}, skipped", method.kind));
                continue;
            }
            for trial in 0..cfg.trials {
                let seed = trial_seed(cfg.seed, trial);
                let (c, reduce) = reduce_one(a, *method, k, r, reduction_seed(seed, method.kind, r), exact.as_ref())?;
                let record = cluster_record(ds, &c, cfg, method.kind.name(), r, trial, seed, reduce)?;
                run.records.push(record);
            }
        }
    }

    if cfg.include_full_baseline {
        for trial in 0..cfg.trials {
            let seed = trial_seed(cfg.seed, trial);
            run.records.push(cluster_record(ds, a, cfg, BASELINE, n, trial, seed, Duration::ZERO)?);
        }
    }
    Ok(run)
}

fn reduce_one(
    a: &Matrix,
    method: ReductionMethod,
    k: usize,
    r: usize,
    seed: u64,
    exact: Option<&ExactBasis>,
) -> Result<(Matrix, Duration)> {
    let cached = exact.filter(|_| method.kind.uses_exact_basis());
    let (c, elapsed) = match (method.kind, cached) {
        (MethodKind::SamplSvd, Some(b)) => {
            let (c, t) = time(|| reducers::sample_columns(a, &b.z, r, seed));
            (c?, t + b.elapsed)
        }
        (MethodKind::Svd, Some(b)) => {
            let (c, t) = time(|| multiply(a, &b.z));
            (c?, t + b.elapsed)
        }
        _ => {
            let (red, t) = time(|| reducers::reduce(a, method, k, r, seed));
            (red?.c, t)
        }
    };
    Ok((c, elapsed))
}

#[allow(clippy::too_many_arguments)]
fn cluster_record(
    ds: &Dataset,
    features: &Matrix,
    cfg: &BenchConfig,
    method: &str,
    r: usize,
    trial: usize,
    seed: u64,
    reduce: Duration,
) -> Result<BenchRecord> {
    let kcfg = KMeansConfig { seed: kmeans_seed(seed), ..cfg.kmeans.clone() };
    let (asg, cluster) = time(|| lloyd(features, &kcfg));
    let asg = ClusterAssignment::from_labels(&ds.points, asg?.labels, kcfg.k)?;
    let accuracy = match &ds.labels {
        Some(truth) => Some(accuracy(&asg, truth)?),
        None => None,
    };
    let (reduce_ms, cluster_ms) = if cfg.record_timing { (millis(reduce), millis(cluster)) } else { (0.0, 0.0) };
    Ok(BenchRecord {
        method: method.to_string(),
        r,
        trial,
        seed,
        reduce_ms,
        cluster_ms,
        objective: objective(&ds.points, &asg)?,
        normalized_objective: normalized_objective(&ds.points, &asg)?,
        accuracy,
    })
}

/// Writes the records under the fixed header; accuracy is empty when absent.
pub fn emit_csv(records: &[BenchRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e| Error::csv(path, e);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for rec in records {
        w.write_record([
            rec.method.clone(),
            rec.r.to_string(),
            rec.trial.to_string(),
            rec.seed.to_string(),
            rec.reduce_ms.to_string(),
            rec.cluster_ms.to_string(),
            rec.objective.to_string(),
            rec.normalized_objective.to_string(),
            rec.accuracy.map(|x| x.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parses a file written by [`emit_csv`].
pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let header = reader.headers().map_err(|e| Error::csv(path, e))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse { path: path.into(), line: 1, message: "unexpected header".into() });
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |what: &str| Error::Parse { path: path.into(), line, message: format!("bad {what}") };
        macro_rules! field {
            ($i:expr, $name:expr) => {
                record.get($i).and_then(|s| s.parse().ok()).ok_or_else(|| bad($name))?
            };
        }
        let acc = record.get(8).ok_or_else(|| bad("accuracy"))?;
        out.push(BenchRecord {
            method: record.get(0).ok_or_else(|| bad("method"))?.to_string(),
            r: field!(1, "r"),
            trial: field!(2, "trial"),
            seed: field!(3, "seed"),
            reduce_ms: field!(4, "reduce_ms"),
            cluster_ms: field!(5, "cluster_ms"),
            objective: field!(6, "objective"),
            normalized_objective: field!(7, "normalized_objective"),
            accuracy: if acc.is_empty() { None } else { Some(acc.parse().map_err(|_| bad("accuracy"))?) },
        });
    }
    Ok(out)
}
