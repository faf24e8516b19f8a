//! The three reductions from `m × n` data to `m × r` features, behind one
//! [`reduce`] entry point.

use core::fmt;
use core::str::FromStr;

use crate::linalg::{multiply, Matrix};
use crate::math::{ceil_tol, ln};
use crate::rng::derive_seed;
use crate::sketch::{apply_sampling, mailman_multiply, random_sign_sketch, randomized_sampling};
use crate::svd::{fast_frobenius_svd, top_k_right_singular};
use crate::{Error, Result};

/// ε for the approximate-SVD variants.
pub const DEFAULT_EPSILON: f64 = 1.0 / 3.0;

/// Constant in front of `4k·ln(200k)/ε²` that the feature-selection proof needs.
pub const SAMPLING_PROOF_CONSTANT: f64 = 16e6;
/// Constant in front of `k/ε²` that the sign-projection proof needs.
pub const PROJECTION_PROOF_CONSTANT: f64 = 3330.0 * 15.0 * 15.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodKind {
    /// Column sampling with probabilities from the exact `V_k`.
    SamplSvd,
    /// Column sampling with probabilities from the randomized SVD.
    SamplApproxSvd,
    /// Random sign projection.
    Rp,
    /// `C = A·V_k`.
    Svd,
    /// `C = A·Z` with the randomized SVD.
    ApproxSvd,
}

impl MethodKind {
    pub const ALL: [MethodKind; 5] =
        [MethodKind::SamplSvd, MethodKind::SamplApproxSvd, MethodKind::Rp, MethodKind::Svd, MethodKind::ApproxSvd];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::SamplSvd => "sampl-svd",
            MethodKind::SamplApproxSvd => "sampl-approx-svd",
            MethodKind::Rp => "rp",
            MethodKind::Svd => "svd",
            MethodKind::ApproxSvd => "approx-svd",
        }
    }

    /// Selection methods output rescaled columns of `A`.
    pub fn is_selection(self) -> bool {
        matches!(self, MethodKind::SamplSvd | MethodKind::SamplApproxSvd)
    }

    /// SVD methods always produce exactly `k` features.
    pub fn is_svd_family(self) -> bool {
        matches!(self, MethodKind::Svd | MethodKind::ApproxSvd)
    }

    /// Whether the method needs the exact `V_k` of the data.
    pub fn uses_exact_basis(self) -> bool {
        matches!(self, MethodKind::SamplSvd | MethodKind::Svd)
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::param(alloc::format!("unknown reduction method `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReductionMethod {
    pub kind: MethodKind,
    /// Only read by the approximate-SVD variants.
    pub epsilon: f64,
}

impl ReductionMethod {
    pub fn new(kind: MethodKind) -> Self {
        Self { kind, epsilon: DEFAULT_EPSILON }
    }

    pub fn with_epsilon(kind: MethodKind, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::param("epsilon must lie in (0, 1)"));
        }
        Ok(Self { kind, epsilon })
    }
}

/// Reduced features `C` together with how they were made.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub c: Matrix,
    pub method: ReductionMethod,
    pub r: usize,
    pub seed: u64,
    /// The `n × k` basis `Z` for the SVD-based methods.
    pub basis: Option<Matrix>,
}

fn check_r(r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::param("r must be at least 1"));
    }
    Ok(())
}

/// Feature selection: `Z` (exact `V_k` or randomized SVD), then `r` columns of
/// `A` sampled with replacement with probabilities `‖Z_(i)‖²/k`, rescaled.
pub fn reduce_sampling(a: &Matrix, k: usize, r: usize, exact: bool, epsilon: f64, seed: u64) -> Result<Reduction> {
    check_r(r)?;
    if k < 2 {
        return Err(Error::param("k must be at least 2"));
    }
    let z = if exact {
        top_k_right_singular(a, k)?
    } else {
        fast_frobenius_svd(a, k, epsilon, derive_seed(seed, 0))?
    };
    let c = sample_columns(a, &z, r, seed)?;
    let kind = if exact { MethodKind::SamplSvd } else { MethodKind::SamplApproxSvd };
    Ok(Reduction { c, method: ReductionMethod { kind, epsilon }, r, seed, basis: Some(z) })
}

/// The sampling step of [`reduce_sampling`] for a precomputed basis `z`.
pub fn sample_columns(a: &Matrix, z: &Matrix, r: usize, seed: u64) -> Result<Matrix> {
    let plan = randomized_sampling(z, r, derive_seed(seed, 1))?;
    apply_sampling(a, &plan)
}

/// Feature extraction with a random `±1/√r` sign matrix via the mailman product.
pub fn reduce_rp(a: &Matrix, k: usize, r: usize, seed: u64) -> Result<Reduction> {
    check_r(r)?;
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let sketch = random_sign_sketch(a.cols(), r, derive_seed(seed, 2))?;
    let c = mailman_multiply(a, &sketch)?;
    Ok(Reduction { c, method: ReductionMethod::new(MethodKind::Rp), r, seed, basis: None })
}

/// Feature extraction `C = A·Z` with `Z = V_k` (exact) or the randomized SVD.
pub fn reduce_svd(a: &Matrix, k: usize, exact: bool, epsilon: f64, seed: u64) -> Result<Reduction> {
    let z = if exact {
        top_k_right_singular(a, k)?
    } else {
        fast_frobenius_svd(a, k, epsilon, derive_seed(seed, 0))?
    };
    let c = multiply(a, &z)?;
    let kind = if exact { MethodKind::Svd } else { MethodKind::ApproxSvd };
    Ok(Reduction { c, method: ReductionMethod { kind, epsilon }, r: k, seed, basis: Some(z) })
}

/// Dispatches on `method.kind`; `r` is ignored by the SVD family.
pub fn reduce(a: &Matrix, method: ReductionMethod, k: usize, r: usize, seed: u64) -> Result<Reduction> {
    match method.kind {
        MethodKind::SamplSvd => reduce_sampling(a, k, r, true, method.epsilon, seed),
        MethodKind::SamplApproxSvd => reduce_sampling(a, k, r, false, method.epsilon, seed),
        MethodKind::Rp => reduce_rp(a, k, r, seed),
        MethodKind::Svd => reduce_svd(a, k, true, method.epsilon, seed),
        MethodKind::ApproxSvd => reduce_svd(a, k, false, method.epsilon, seed),
    }
}

/// Feature count suggested by the analysis.
///
/// Sampling: `c₁·4k·ln(200k)/ε²`; sign projection: `c₂·k/ε²`; SVD methods: `k`.
/// Without `use_proof_constants`, `c₁ = c₂ = 1`; the proof constants
/// ([`SAMPLING_PROOF_CONSTANT`], [`PROJECTION_PROOF_CONSTANT`]) give very large values.
pub fn theory_r(method: MethodKind, k: usize, epsilon: f64, use_proof_constants: bool) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon must lie in (0, 1)"));
    }
    let k_f = k as f64;
    let eps2 = epsilon * epsilon;
    let r = match method {
        MethodKind::SamplSvd | MethodKind::SamplApproxSvd => {
            let c1 = if use_proof_constants { SAMPLING_PROOF_CONSTANT } else { 1.0 };
            ceil_tol(c1 * 4.0 * k_f * ln(200.0 * k_f) / eps2)
        }
        MethodKind::Rp => {
            let c2 = if use_proof_constants { PROJECTION_PROOF_CONSTANT } else { 1.0 };
            ceil_tol(c2 * k_f / eps2)
        }
        MethodKind::Svd | MethodKind::ApproxSvd => k_f,
    };
    Ok(r as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_norm;
    use crate::rng::SeedRng;
    use crate::sketch::naive_sign_multiply;
    use crate::svd::exact_svd;
    use alloc::vec;
    use alloc::vec::Vec;

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = SeedRng::new(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.normal())
    }

    /// Column `t` of `c` as a positive multiple of some column of `a`.
    fn source_column(a: &Matrix, c: &Matrix, t: usize) -> Option<usize> {
        (0..a.cols()).find(|&j| {
            let ratio = (0..a.rows()).find(|&i| a[(i, j)].abs() > 1e-12).map(|i| c[(i, t)] / a[(i, j)]);
            match ratio {
                Some(s) if s > 0.0 => (0..a.rows()).all(|i| (c[(i, t)] - s * a[(i, j)]).abs() <= 1e-12 * s.abs().max(1.0)),
                _ => false,
            }
        })
    }

    #[test]
    fn names_round_trip() {
        for m in MethodKind::ALL {
            assert_eq!(m.name().parse::<MethodKind>().unwrap(), m);
        }
        assert!("lapscores".parse::<MethodKind>().is_err());
    }

    #[test]
    fn sampling_selects_scaled_columns() {
        let a = random(15, 30, 1);
        for exact in [true, false] {
            let red = reduce_sampling(&a, 3, 12, exact, DEFAULT_EPSILON, 4).unwrap();
            assert_eq!(red.c.shape(), (15, 12));
            for t in 0..12 {
                assert!(source_column(&a, &red.c, t).is_some(), "column {t} is not a selection");
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = random(10, 20, 2);
        let x = reduce_sampling(&a, 2, 8, false, DEFAULT_EPSILON, 9).unwrap();
        let y = reduce_sampling(&a, 2, 8, false, DEFAULT_EPSILON, 9).unwrap();
        assert_eq!(x.c, y.c);
    }

    #[test]
    fn sampling_favors_dominant_columns() {
        // Two strong orthogonal directions living on columns 3 and 7, weak noise elsewhere.
        let mut a = random(40, 12, 3).scaled(1e-3);
        let mut rng = SeedRng::new(4);
        for i in 0..40 {
            let (s, t) = (rng.normal(), rng.normal());
            a[(i, 3)] += 10.0 * s;
            a[(i, 7)] += 10.0 * t;
        }
        let z = top_k_right_singular(&a, 2).unwrap();
        let p = crate::sketch::sampling_probabilities(&z).unwrap();
        assert!(p[3] + p[7] > 0.999);
        let mut hits = 0usize;
        let mut total = 0usize;
        for seed in 0..500 {
            let red = reduce_sampling(&a, 2, 4, true, DEFAULT_EPSILON, seed).unwrap();
            for t in 0..4 {
                let j = source_column(&a, &red.c, t).unwrap();
                total += 1;
                hits += usize::from(j == 3 || j == 7);
            }
        }
        assert!(hits as f64 >= 0.99 * total as f64);
    }

    #[test]
    fn sampling_rank_checks() {
        let a = random(10, 8, 5);
        assert!(reduce_sampling(&a, 1, 5, true, DEFAULT_EPSILON, 0).is_err());
        assert!(reduce_sampling(&a, 9, 5, true, DEFAULT_EPSILON, 0).is_err());
        assert!(reduce_sampling(&a, 3, 0, true, DEFAULT_EPSILON, 0).is_err());
    }

    #[test]
    fn rp_matches_naive_product() {
        let a = random(9, 70, 6);
        let red = reduce_rp(&a, 3, 20, 11).unwrap();
        let sketch = random_sign_sketch(70, 20, derive_seed(11, 2)).unwrap();
        let naive = naive_sign_multiply(&a, &sketch).unwrap();
        assert!(red.c.sub(&naive).unwrap().max_abs() <= 1e-10);
        assert!(reduce_rp(&Matrix::zeros(4, 10), 2, 5, 0).unwrap().c.is_zero());
    }

    #[test]
    fn rp_isometry_in_expectation() {
        let a = random(20, 50, 7);
        let energy = a.squared_norm();
        let n = 500;
        let mean = (0..n).map(|s| reduce_rp(&a, 2, 10, s).unwrap().c.squared_norm()).sum::<f64>() / n as f64;
        assert!((mean / energy - 1.0).abs() <= 0.05, "{}", mean / energy);
    }

    #[test]
    fn svd_exact_diagonal() {
        let d = Matrix::from_diag(&[3.0, 2.0, 1.0]);
        let red = reduce_svd(&d, 2, true, DEFAULT_EPSILON, 0).unwrap();
        assert_eq!(red.c.shape(), (3, 2));
        assert!((red.c[(0, 0)].abs() - 3.0).abs() < 1e-14);
        assert!((red.c[(1, 1)].abs() - 2.0).abs() < 1e-14);
        assert!(red.c[(2, 0)].abs() < 1e-14 && red.c[(2, 1)].abs() < 1e-14);
    }

    #[test]
    fn svd_exact_residual_is_tail() {
        let a = random(25, 14, 8);
        let red = reduce_svd(&a, 4, true, DEFAULT_EPSILON, 0).unwrap();
        let z = red.basis.unwrap();
        let resid = frobenius_norm(&a.sub(&multiply(&red.c, &z.transpose()).unwrap()).unwrap());
        let tail = exact_svd(&a).unwrap().tail_energy(4).sqrt();
        assert!((resid - tail).abs() <= 1e-9 * tail.max(1.0));
    }

    #[test]
    fn svd_approx_rank_k_is_exact() {
        let a = multiply(&random(30, 3, 9), &random(3, 20, 10)).unwrap();
        let red = reduce_svd(&a, 3, false, DEFAULT_EPSILON, 5).unwrap();
        let z = red.basis.unwrap();
        let resid = frobenius_norm(&a.sub(&multiply(&red.c, &z.transpose()).unwrap()).unwrap());
        assert!(resid <= 1e-8 * frobenius_norm(&a));
        assert_eq!(red.r, 3);
    }

    #[test]
    fn dispatcher_covers_every_method() {
        let a = random(12, 16, 11);
        for kind in MethodKind::ALL {
            let red = reduce(&a, ReductionMethod::new(kind), 3, 7, 1).unwrap();
            let width = if kind.is_svd_family() { 3 } else { 7 };
            assert_eq!(red.c.shape(), (12, width));
            assert_eq!(red.method.kind, kind);
        }
    }

    #[test]
    fn theory_r_values() {
        let third = 1.0 / 3.0;
        assert_eq!(theory_r(MethodKind::SamplApproxSvd, 5, third, false).unwrap(), 1244);
        assert_eq!(theory_r(MethodKind::Rp, 5, third, false).unwrap(), 45);
        for kind in [MethodKind::Svd, MethodKind::ApproxSvd] {
            assert_eq!(theory_r(kind, 5, third, true).unwrap(), 5);
        }
        let big: Vec<usize> = vec![
            theory_r(MethodKind::SamplSvd, 5, third, true).unwrap(),
            theory_r(MethodKind::Rp, 5, third, true).unwrap(),
        ];
        assert_eq!(big[1], 3330 * 225 * 45);
        assert!(big[0] > 1_000_000_000);
        assert!(theory_r(MethodKind::Rp, 5, 1.5, false).is_err());
    }
}
