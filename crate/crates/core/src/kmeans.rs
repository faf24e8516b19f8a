//! Lloyd's k-means and the clustering quality measures: objective,
//! normalized objective, indicator matrix and matched accuracy.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;

use crate::linalg::Matrix;
use crate::math::sqrt;
use crate::rng::SeedRng;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Init {
    /// `k` distinct input points chosen uniformly.
    #[default]
    UniformSample,
    /// k-means++ D² seeding.
    KMeansPlusPlus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iters: usize,
    pub replicates: usize,
    pub seed: u64,
    pub init: Init,
}

impl KMeansConfig {
    /// 500 iterations, 5 replicates, uniform initialization.
    pub fn new(k: usize, seed: u64) -> Self {
        Self { k, max_iters: 500, replicates: 5, seed, init: Init::UniformSample }
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    fn validate(&self, m: usize) -> Result<()> {
        if self.k == 0 || self.max_iters == 0 || self.replicates == 0 {
            return Err(Error::param("k, max_iters and replicates must be at least 1"));
        }
        if self.k > m {
            return Err(Error::param(alloc::format!("k = {} exceeds the {} points", self.k, m)));
        }
        Ok(())
    }
}

/// A partition of `m` points into `k` clusters.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
    pub sizes: Vec<usize>,
    /// `k × dim`; the mean of each cluster (zero for an empty one).
    pub centroids: Matrix,
}

impl ClusterAssignment {
    pub fn from_labels(points: &Matrix, labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.len() != points.rows() {
            return Err(Error::LengthMismatch { expected: points.rows(), got: labels.len() });
        }
        if k == 0 || labels.iter().any(|&l| l >= k) {
            return Err(Error::param("cluster label out of range"));
        }
        let (sizes, centroids) = cluster_means(points, &labels, k);
        Ok(Self { labels, k, sizes, centroids })
    }
}

fn cluster_means(points: &Matrix, labels: &[usize], k: usize) -> (Vec<usize>, Matrix) {
    let dim = points.cols();
    let mut sizes = vec![0usize; k];
    let mut sums = Matrix::zeros(k, dim);
    for (i, &l) in labels.iter().enumerate() {
        sizes[l] += 1;
        for (s, &x) in sums.row_mut(l).iter_mut().zip(points.row(i)) {
            *s += x;
        }
    }
    for (j, &s) in sizes.iter().enumerate() {
        if s > 0 {
            let inv = 1.0 / s as f64;
            sums.row_mut(j).iter_mut().for_each(|x| *x *= inv);
        }
    }
    (sizes, sums)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn sse(points: &Matrix, labels: &[usize], centroids: &Matrix) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| squared_distance(points.row(i), centroids.row(l)))
        .sum()
}

/// Nearest centroid per point; ties go to the lowest cluster index.
fn assign(points: &Matrix, centroids: &Matrix) -> Vec<usize> {
    (0..points.rows())
        .map(|i| {
            let p = points.row(i);
            let mut best = (0, f64::INFINITY);
            for j in 0..centroids.rows() {
                let d = squared_distance(p, centroids.row(j));
                if d < best.1 {
                    best = (j, d);
                }
            }
            best.0
        })
        .collect()
}

/// Refills empty clusters: the point farthest from its centroid (in a cluster
/// that can spare it) becomes the singleton of the empty cluster.
fn repair_empty(points: &Matrix, labels: &mut [usize], centroids: &mut Matrix) {
    let k = centroids.rows();
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let mut far = None::<(usize, f64)>;
        for (i, &l) in labels.iter().enumerate() {
            if sizes[l] < 2 {
                continue;
            }
            let d = squared_distance(points.row(i), centroids.row(l));
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        let Some((i, _)) = far else { return };
        sizes[labels[i]] -= 1;
        labels[i] = empty;
        sizes[empty] = 1;
        centroids.row_mut(empty).copy_from_slice(points.row(i));
    }
}

fn initial_centroids(points: &Matrix, k: usize, init: Init, rng: &mut SeedRng) -> Matrix {
    let m = points.rows();
    let chosen: Vec<usize> = match init {
        Init::UniformSample => index::sample(rng, m, k).into_vec(),
        Init::KMeansPlusPlus => {
            let mut chosen = vec![rng.gen_range(0..m)];
            let mut dist: Vec<f64> = (0..m).map(|i| squared_distance(points.row(i), points.row(chosen[0]))).collect();
            while chosen.len() < k {
                let total: f64 = dist.iter().sum();
                let next = if total > 0.0 {
                    let u = rng.uniform() * total;
                    let mut acc = 0.0;
                    let mut pick = m - 1;
                    for (i, &d) in dist.iter().enumerate() {
                        acc += d;
                        if acc > u && d > 0.0 {
                            pick = i;
                            break;
                        }
                    }
                    pick
                } else {
                    let free: Vec<usize> = (0..m).filter(|i| !chosen.contains(i)).collect();
                    free[rng.gen_range(0..free.len())]
                };
                chosen.push(next);
                for (i, d) in dist.iter_mut().enumerate() {
                    *d = d.min(squared_distance(points.row(i), points.row(next)));
                }
            }
            chosen
        }
    };
    Matrix::from_fn(k, points.cols(), |j, c| points[(chosen[j], c)])
}

/// One Lloyd run from one initialization.
#[derive(Clone, Debug)]
pub struct LloydRun {
    pub assignment: ClusterAssignment,
    pub objective: f64,
    /// Assignment/update rounds performed.
    pub iterations: usize,
    /// Objective after each centroid update; non-increasing.
    pub trace: Vec<f64>,
}

/// Lloyd's method from the initialization of `seed`: alternate nearest-centroid
/// assignment and centroid recomputation until the labels stop changing or
/// `max_iters` rounds have run.
pub fn lloyd_single(points: &Matrix, cfg: &KMeansConfig, seed: u64) -> Result<LloydRun> {
    cfg.validate(points.rows())?;
    let k = cfg.k;
    let mut rng = SeedRng::new(seed);
    let mut centroids = initial_centroids(points, k, cfg.init, &mut rng);
    let mut labels = assign(points, &centroids);
    repair_empty(points, &mut labels, &mut centroids);

    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        centroids = cluster_means(points, &labels, k).1;
        trace.push(sse(points, &labels, &centroids));
        if iterations == cfg.max_iters {
            break;
        }
        let mut next = assign(points, &centroids);
        repair_empty(points, &mut next, &mut centroids);
        iterations += 1;
        if next == labels {
            break;
        }
        labels = next;
    }
    let objective = *trace.last().expect("at least one update");
    let assignment = ClusterAssignment::from_labels(points, labels, k)?;
    Ok(LloydRun { assignment, objective, iterations, trace })
}

/// Best of `cfg.replicates` Lloyd runs by objective (ties: lowest replicate).
/// Replicate `i` is seeded with `derive_seed(cfg.seed, i)`.
pub fn lloyd(points: &Matrix, cfg: &KMeansConfig) -> Result<ClusterAssignment> {
    cfg.validate(points.rows())?;
    let mut best: Option<LloydRun> = None;
    for rep in 0..cfg.replicates {
        let run = lloyd_single(points, cfg, crate::rng::derive_seed(cfg.seed, rep as u64))?;
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("replicates >= 1").assignment)
}

/// `F(A, X) = ‖A − XXᵀA‖_F² = Σ_i ‖p_i − μ(p_i)‖²`, with cluster means taken
/// in the space of `a` (not from `asg.centroids`, which may live in a reduced space).
pub fn objective(a: &Matrix, asg: &ClusterAssignment) -> Result<f64> {
    if a.rows() != asg.labels.len() {
        return Err(Error::LengthMismatch { expected: a.rows(), got: asg.labels.len() });
    }
    let (_, means) = cluster_means(a, &asg.labels, asg.k);
    Ok(sse(a, &asg.labels, &means))
}

/// `F / ‖A‖_F²`, in `[0, 1]`.
pub fn normalized_objective(a: &Matrix, asg: &ClusterAssignment) -> Result<f64> {
    let energy = a.squared_norm();
    if energy == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(objective(a, asg)? / energy)
}

/// `m × k` indicator with `X_ij = 1/√s_j` when point `i` is in cluster `j`.
pub fn indicator_matrix(asg: &ClusterAssignment) -> Result<Matrix> {
    if let Some(j) = asg.sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster(j));
    }
    let mut x = Matrix::zeros(asg.labels.len(), asg.k);
    for (i, &l) in asg.labels.iter().enumerate() {
        x[(i, l)] = 1.0 / sqrt(asg.sizes[l] as f64);
    }
    Ok(x)
}

/// Fraction of points whose cluster maps to their true label under the best
/// one-to-one matching of clusters to labels.
pub fn accuracy(asg: &ClusterAssignment, truth: &[usize]) -> Result<f64> {
    let m = asg.labels.len();
    if truth.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: truth.len() });
    }
    if m == 0 {
        return Err(Error::param("empty assignment"));
    }
    let n_labels = truth.iter().max().map_or(0, |&t| t + 1);
    let size = asg.k.max(n_labels);
    let mut counts = vec![vec![0i64; size]; size];
    for (&c, &t) in asg.labels.iter().zip(truth) {
        counts[c][t] += 1;
    }
    let matched = max_weight_matching(&counts);
    Ok(matched as f64 / m as f64)
}

/// Maximum total weight of a perfect matching in a square non-negative
/// weight matrix (Hungarian method with potentials, `O(n³)`).
pub fn max_weight_matching(weights: &[Vec<i64>]) -> i64 {
    let n = weights.len();
    if n == 0 {
        return 0;
    }
    let top = weights.iter().flatten().copied().max().unwrap_or(0);
    // minimize cost = top - weight; 1-based arrays with a virtual column 0
    let cost = |i: usize, j: usize| top - weights[i - 1][j - 1];
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| weights[p[j] - 1][j - 1]).sum()
}
