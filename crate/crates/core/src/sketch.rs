//! Randomized sketching primitives: importance sampling of columns with
//! rescaling, and random sign projections multiplied with the mailman
//! algorithm.

use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use crate::linalg::{multiply, Matrix};
use crate::math::sqrt;
use crate::rng::SeedRng;
use crate::{Error, Result};

/// Probabilities below this are treated as zero, which keeps `1/√(r·p)` finite.
pub const MIN_PROBABILITY: f64 = 1e-300;

/// Outcome of sampling `r` of `n` indices with replacement.
///
/// Column `t` of `A·Ω·S` is `weights[t] · A[:, indices[t]]`, where
/// `weights[t] = 1/√(r·p_{indices[t]})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingPlan {
    pub source_dim: usize,
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl SamplingPlan {
    pub fn r(&self) -> usize {
        self.indices.len()
    }

    /// Dense `n × r` sampling matrix Ω.
    pub fn omega(&self) -> Matrix {
        let mut o = Matrix::zeros(self.source_dim, self.r());
        for (t, &i) in self.indices.iter().enumerate() {
            o[(i, t)] = 1.0;
        }
        o
    }

    /// Dense `r × r` diagonal rescaling matrix S.
    pub fn rescaling(&self) -> Matrix {
        Matrix::from_diag(&self.weights)
    }
}

/// `p_i = ‖Z_(i)‖² / ‖Z‖_F²` over the rows of `z`.
pub fn sampling_probabilities(z: &Matrix) -> Result<Vec<f64>> {
    let row_energy: Vec<f64> = (0..z.rows()).map(|i| z.row(i).iter().map(|x| x * x).sum()).collect();
    let total: f64 = row_energy.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(row_energy
        .into_iter()
        .map(|e| {
            let p = e / total;
            if p < MIN_PROBABILITY {
                0.0
            } else {
                p
            }
        })
        .collect())
}

/// Draws `r` i.i.d. row indices of `z` with [`sampling_probabilities`].
pub fn randomized_sampling(z: &Matrix, r: usize, seed: u64) -> Result<SamplingPlan> {
    let probabilities = sampling_probabilities(z)?;
    sample_with_probabilities(probabilities, r, seed)
}

/// Inverse-CDF sampling with replacement from an explicit distribution.
pub fn sample_with_probabilities(probabilities: Vec<f64>, r: usize, seed: u64) -> Result<SamplingPlan> {
    if r == 0 {
        return Err(Error::param("sample count r must be at least 1"));
    }
    if probabilities.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::param("probabilities must be finite and non-negative"));
    }
    let mut cumulative = Vec::with_capacity(probabilities.len());
    let mut acc = 0.0;
    for &p in &probabilities {
        acc += p;
        cumulative.push(acc);
    }
    if acc == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let last_live = probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0);

    let mut rng = SeedRng::new(seed);
    let mut indices = Vec::with_capacity(r);
    let mut weights = Vec::with_capacity(r);
    for _ in 0..r {
        let u = rng.uniform() * acc;
        // First index whose cumulative mass exceeds u; it always has p > 0.
        let i = cumulative.partition_point(|&c| c <= u).min(last_live);
        indices.push(i);
        weights.push(1.0 / sqrt(r as f64 * probabilities[i]));
    }
    Ok(SamplingPlan { source_dim: probabilities.len(), indices, weights, probabilities })
}

/// `A·Ω·S`: the sampled columns of `a`, each scaled by its weight.
pub fn apply_sampling(a: &Matrix, plan: &SamplingPlan) -> Result<Matrix> {
    if a.cols() != plan.source_dim {
        return Err(Error::DimensionMismatch {
            op: "apply_sampling",
            left: a.shape(),
            right: (plan.source_dim, plan.r()),
        });
    }
    Ok(Matrix::from_fn(a.rows(), plan.r(), |i, t| plan.weights[t] * a[(i, plan.indices[t])]))
}

/// `max(1, ⌊log₂ n⌋)`.
pub fn block_width(n: usize) -> usize {
    (usize::BITS - 1 - n.max(1).leading_zeros()).max(1) as usize
}

/// Compact encoding of an `n × r` random sign matrix `R/√r`.
///
/// Columns are grouped in blocks of `block_width` columns. In each block,
/// every source index `i` carries a code whose bit `b` gives the sign of
/// column `b` of that block in row `i` (`0 → +1`, `1 → −1`). The last block
/// may have fewer live columns than its width; surplus bits are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct SignSketch {
    source_dim: usize,
    target_dim: usize,
    block_width: usize,
    blocks: Vec<Vec<u32>>,
    scale: f64,
}

impl SignSketch {
    /// Builds a sketch from explicit codes, one `Vec` of `n` codes per block.
    pub fn from_codes(source_dim: usize, target_dim: usize, blocks: Vec<Vec<u32>>) -> Result<Self> {
        if source_dim == 0 || target_dim == 0 {
            return Err(Error::param("sign sketch dimensions must be positive"));
        }
        let w = block_width(source_dim);
        if w > 30 {
            return Err(Error::param("source dimension too large for 32-bit block codes"));
        }
        let expected_blocks = target_dim.div_ceil(w);
        if blocks.len() != expected_blocks {
            return Err(Error::LengthMismatch { expected: expected_blocks, got: blocks.len() });
        }
        for codes in &blocks {
            if codes.len() != source_dim {
                return Err(Error::LengthMismatch { expected: source_dim, got: codes.len() });
            }
            if codes.iter().any(|&c| (c as u64) >> w != 0) {
                return Err(Error::param("block code exceeds the block width"));
            }
        }
        Ok(Self {
            source_dim,
            target_dim,
            block_width: w,
            blocks,
            scale: 1.0 / sqrt(target_dim as f64),
        })
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn block_width(&self) -> usize {
        self.block_width
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn live_cols(&self, block: usize) -> usize {
        self.block_width.min(self.target_dim - block * self.block_width)
    }

    /// Unscaled `n × r` matrix of `±1` entries.
    pub fn expand_signs(&self) -> Matrix {
        let mut out = Matrix::zeros(self.source_dim, self.target_dim);
        for (b, codes) in self.blocks.iter().enumerate() {
            for (i, &code) in codes.iter().enumerate() {
                for bit in 0..self.live_cols(b) {
                    out[(i, b * self.block_width + bit)] = if code >> bit & 1 == 0 { 1.0 } else { -1.0 };
                }
            }
        }
        out
    }

    /// The projection matrix `R` itself, entries `±1/√r`.
    pub fn dense(&self) -> Matrix {
        self.expand_signs().scaled(self.scale)
    }
}

/// Random sign sketch with independent fair signs: each code is a uniform
/// `w`-bit integer, so every bit (matrix entry) is an independent coin flip.
pub fn random_sign_sketch(n: usize, r: usize, seed: u64) -> Result<SignSketch> {
    if n == 0 || r == 0 {
        return Err(Error::param("sign sketch dimensions must be positive"));
    }
    let w = block_width(n);
    let mask = if w >= 32 { u32::MAX } else { (1u32 << w) - 1 };
    let mut rng = SeedRng::new(seed);
    let blocks = (0..r.div_ceil(w))
        .map(|_| (0..n).map(|_| rng.next_u32() & mask).collect())
        .collect();
    SignSketch::from_codes(n, r, blocks)
}

/// `A·R` with the mailman algorithm.
///
/// Per row and block, entries of the row are first summed into `2^w` buckets by
/// code (`O(n)`); the `w` outputs then follow from the halving recursion
/// `U_l·z = [Σ z_low − Σ z_high ; U_{l−1}·(z_low + z_high)]` in `O(2^w)`.
/// With `w ≈ log₂ n` the whole product costs `O(m·n·⌈r / log n⌉)`.
pub fn mailman_multiply(a: &Matrix, sk: &SignSketch) -> Result<Matrix> {
    if a.cols() != sk.source_dim {
        return Err(Error::DimensionMismatch {
            op: "mailman_multiply",
            left: a.shape(),
            right: (sk.source_dim, sk.target_dim),
        });
    }
    let w = sk.block_width;
    let mut out = Matrix::zeros(a.rows(), sk.target_dim);
    let mut buckets = vec![0.0; 1 << w];
    let mut signs_out = vec![0.0; w];
    for row in 0..a.rows() {
        let x = a.row(row);
        for (b, codes) in sk.blocks.iter().enumerate() {
            buckets.iter_mut().for_each(|z| *z = 0.0);
            for (&code, &xi) in codes.iter().zip(x) {
                buckets[code as usize] += xi;
            }
            let mut len = buckets.len();
            for level in (0..w).rev() {
                let half = len / 2;
                let (low, high) = buckets[..len].split_at_mut(half);
                let mut diff = 0.0;
                for (l, h) in low.iter_mut().zip(high.iter()) {
                    diff += *l - *h;
                    *l += *h;
                }
                signs_out[level] = diff;
                len = half;
            }
            let dst = out.row_mut(row);
            for bit in 0..sk.live_cols(b) {
                dst[b * w + bit] = signs_out[bit] * sk.scale;
            }
        }
    }
    Ok(out)
}

/// Reference `A·R` through the dense expansion of the sketch.
pub fn naive_sign_multiply(a: &Matrix, sk: &SignSketch) -> Result<Matrix> {
    if a.cols() != sk.source_dim {
        return Err(Error::DimensionMismatch {
            op: "naive_sign_multiply",
            left: a.shape(),
            right: (sk.source_dim, sk.target_dim),
        });
    }
    multiply(a, &sk.dense())
}
