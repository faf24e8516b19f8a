//! Gaussian-mixture test data.

use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::math::sqrt;
use crate::rng::SeedRng;
use crate::{Error, Result};

/// Points with optional ground-truth labels in `0..k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub points: Matrix,
    pub labels: Option<Vec<usize>>,
    pub k: usize,
}

impl Dataset {
    pub fn new(points: Matrix, labels: Option<Vec<usize>>, k: usize) -> Result<Self> {
        if let Some(l) = &labels {
            if l.len() != points.rows() {
                return Err(Error::LengthMismatch { expected: points.rows(), got: l.len() });
            }
            if l.iter().any(|&x| x >= k) {
                return Err(Error::param("label out of range 0..k"));
            }
        }
        Ok(Self { points, labels, k })
    }
}

/// Parameters of the synthetic mixture: `centers` centers drawn uniformly
/// from `[0, side]^dim`, each surrounded by `points_per_center` draws of
/// `N(center, variance·I)`. Centers themselves are not part of the data.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub centers: usize,
    pub dim: usize,
    pub points_per_center: usize,
    pub side: f64,
    pub variance: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// 5 centers in 2000 dimensions, 200 points each, side 2000, unit variance.
    pub fn reference(seed: u64) -> Self {
        Self { centers: 5, dim: 2000, points_per_center: 200, side: 2000.0, variance: 1.0, seed }
    }
}

/// Draws the dataset and returns it with the true centers (`k × dim`).
pub fn gen_synth_with_centers(spec: &SynthSpec) -> Result<(Dataset, Matrix)> {
    if spec.centers == 0 || spec.dim == 0 || spec.points_per_center == 0 {
        return Err(Error::param("synthetic counts must be at least 1"));
    }
    if !(spec.side > 0.0 && spec.variance > 0.0) {
        return Err(Error::param("side and variance must be positive"));
    }
    let mut rng = SeedRng::new(spec.seed);
    let centers = Matrix::from_fn(spec.centers, spec.dim, |_, _| spec.side * rng.uniform());
    let sd = sqrt(spec.variance);
    let m = spec.centers * spec.points_per_center;
    let labels: Vec<usize> = (0..m).map(|i| i / spec.points_per_center).collect();
    let points = Matrix::from_fn(m, spec.dim, |i, j| centers[(labels[i], j)] + sd * rng.normal());
    Ok((Dataset::new(points, Some(labels), spec.centers)?, centers))
}

pub fn gen_synth(spec: &SynthSpec) -> Result<Dataset> {
    gen_synth_with_centers(spec).map(|(d, _)| d)
}
