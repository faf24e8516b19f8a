//! Monte-Carlo and exact checks of the supporting lemmas at desk scale.
//!
//! Every suite is deterministic given `(seed, trials)`: fixed data come from
//! stream 0 of the seed and trial `t` uses stream `t + 1`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use kmsketch_core::linalg::{frobenius_norm, multiply, pseudo_inverse, qr_orthonormalize, spectral_norm, PINV_RANK_TOL};
use kmsketch_core::rng::{derive_seed, SeedRng};
use kmsketch_core::sketch::{
    apply_sampling, block_width, mailman_multiply, naive_sign_multiply, random_sign_sketch, randomized_sampling,
    sample_with_probabilities, sampling_probabilities,
};
use kmsketch_core::svd::{exact_svd, fast_frobenius_svd, jacobi_eigh, projection_residual, top_k_right_singular, with_singular_values};
use kmsketch_core::Matrix;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub trials: usize,
    pub pass_fraction: f64,
    pub threshold: f64,
    pub passed: bool,
    pub details: String,
}

impl VerifyReport {
    fn new(suite: Suite, trials: usize, pass_fraction: f64, threshold: f64, details: String) -> Self {
        Self {
            suite: suite.name().to_string(),
            trials,
            pass_fraction,
            threshold,
            passed: pass_fraction >= threshold,
            details,
        }
    }

    /// For suites that test one aggregate (a sample mean) rather than per-trial events.
    fn aggregate(suite: Suite, trials: usize, ok: bool, details: String) -> Self {
        Self::new(suite, trials, if ok { 1.0 } else { 0.0 }, 1.0, details)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: pass_fraction {:.4} (threshold {:.4}) over {} trials; {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.pass_fraction,
            self.threshold,
            self.trials,
            self.details
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Pythagoras,
    Lemma4,
    Lemma5,
    Lemma6,
    Lemma7,
    Lemma8,
    Lemma9,
    Rsvd,
    Mailman,
    Jl,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Pythagoras,
        Suite::Lemma4,
        Suite::Lemma5,
        Suite::Lemma6,
        Suite::Lemma7,
        Suite::Lemma8,
        Suite::Lemma9,
        Suite::Rsvd,
        Suite::Mailman,
        Suite::Jl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Pythagoras => "pythagoras",
            Suite::Lemma4 => "lemma4",
            Suite::Lemma5 => "lemma5",
            Suite::Lemma6 => "lemma6",
            Suite::Lemma7 => "lemma7",
            Suite::Lemma8 => "lemma8",
            Suite::Lemma9 => "lemma9",
            Suite::Rsvd => "rsvd",
            Suite::Mailman => "mailman",
            Suite::Jl => "jl",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::Lemma5 | Suite::Lemma7 => 1000,
            Suite::Rsvd => 200,
            _ => 100,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite `{s}`")))
    }
}

pub fn verify_suite(suite: Suite, seed: u64, trials: usize) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    match suite {
        Suite::Pythagoras => pythagoras(seed, trials),
        Suite::Lemma4 => lemma4(seed, trials),
        Suite::Lemma5 => lemma5(seed, trials),
        Suite::Lemma6 => lemma6(seed, trials),
        Suite::Lemma7 => lemma7(seed, trials),
        Suite::Lemma8 => lemma8(seed, trials),
        Suite::Lemma9 => lemma9(seed, trials),
        Suite::Rsvd => rsvd(seed, trials),
        Suite::Mailman => mailman(seed, trials),
        Suite::Jl => jl(seed, trials),
    }
}

fn data_rng(seed: u64) -> SeedRng {
    SeedRng::stream(seed, 0)
}

fn trial_seed(seed: u64, t: usize) -> u64 {
    derive_seed(seed, t as u64 + 1)
}

fn gaussian(rows: usize, cols: usize, rng: &mut SeedRng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.normal())
}

fn range(rng: &mut SeedRng, lo: usize, hi: usize) -> usize {
    lo + (rng.uniform() * (hi - lo + 1) as f64) as usize
}

/// Squared singular values of a wide `k × r` matrix, descending.
fn squared_singular_values(x: &Matrix) -> Result<Vec<f64>> {
    Ok(jacobi_eigh(&multiply(x, &x.transpose())?)?.0)
}

fn within(values: &[f64], eps: f64) -> bool {
    values.iter().all(|&s| (1.0 - eps..=1.0 + eps).contains(&s))
}

fn ceil_formula(x: f64) -> usize {
    (x - 1e-9).ceil() as usize
}

/// Rows of `X` orthogonal to rows of `Y` by construction: both are built on
/// complementary column blocks of one random orthogonal matrix.
fn pythagoras(seed: u64, trials: usize) -> Result<VerifyReport> {
    let mut passes = 0;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let mut rng = SeedRng::new(trial_seed(seed, t));
        let (m, n) = (range(&mut rng, 1, 20), range(&mut rng, 2, 20));
        let s = range(&mut rng, 1, n - 1);
        let q = qr_orthonormalize(&gaussian(n, n, &mut rng))?;
        let q1 = Matrix::from_fn(s, n, |i, j| q[(j, i)]);
        let q2 = Matrix::from_fn(n - s, n, |i, j| q[(j, s + i)]);
        let scale = (10.0f64).powf(4.0 * rng.uniform() - 2.0);
        let x = multiply(&gaussian(m, s, &mut rng), &q1)?.scaled(scale);
        let y = multiply(&gaussian(m, n - s, &mut rng), &q2)?;
        let (xx, yy) = (x.squared_norm(), y.squared_norm());
        let rel = (x.add(&y)?.squared_norm() - xx - yy).abs() / (xx + yy);
        worst = worst.max(rel);
        passes += usize::from(rel <= 1e-10);
    }
    let details = format!("max relative error {worst:.3e} (tolerance 1e-10)");
    Ok(VerifyReport::new(Suite::Pythagoras, trials, passes as f64 / trials as f64, 1.0, details))
}

/// `V`: top-5 right singular vectors of a random 500×40 matrix;
/// `r = ⌈4k·ln(2k/δ)/ε²⌉` with ε = 0.5, δ = 0.1; all σ_i²(VᵀΩS) in [1−ε, 1+ε].
fn lemma4(seed: u64, trials: usize) -> Result<VerifyReport> {
    let (k, eps, delta) = (5usize, 0.5, 0.1);
    let r = ceil_formula(4.0 * k as f64 * (2.0 * k as f64 / delta).ln() / (eps * eps));
    let a = gaussian(500, 40, &mut data_rng(seed));
    let v = top_k_right_singular(&a, k)?;
    let vt = v.transpose();
    let mut passes = 0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in 0..trials {
        let plan = randomized_sampling(&v, r, trial_seed(seed, t))?;
        let s2 = squared_singular_values(&apply_sampling(&vt, &plan)?)?;
        lo = lo.min(s2[k - 1]);
        hi = hi.max(s2[0]);
        passes += usize::from(within(&s2, eps));
    }
    let details = format!("k={k} r={r} eps={eps}; observed sigma^2 range [{lo:.4}, {hi:.4}]");
    Ok(VerifyReport::new(Suite::Lemma4, trials, passes as f64 / trials as f64, 0.9, details))
}

/// Mean of ‖YΩS‖_F² over the plans is within 5% of ‖Y‖_F², with sampling
/// probabilities taken from an unrelated `Z`.
fn lemma5(seed: u64, trials: usize) -> Result<VerifyReport> {
    let mut rng = data_rng(seed);
    let y = Matrix::from_fn(200, 300, |_, j| (1.0 + (j % 7) as f64) * rng.normal());
    let z = gaussian(300, 5, &mut rng);
    let p = sampling_probabilities(&z)?;
    let r = 50;
    let energy = y.squared_norm();
    let mut sum = 0.0;
    let mut markov = 0usize;
    for t in 0..trials {
        let plan = sample_with_probabilities(p.clone(), r, trial_seed(seed, t))?;
        let e = apply_sampling(&y, &plan)?.squared_norm();
        sum += e;
        markov += usize::from(e <= energy / 0.1);
    }
    let ratio = sum / trials as f64 / energy;
    let details = format!(
        "Y 200x300, r={r}; mean ratio {ratio:.4} (band [0.95, 1.05]); Markov bound at delta=0.1 held in {markov}/{trials}"
    );
    Ok(VerifyReport::aggregate(Suite::Lemma5, trials, (0.95..=1.05).contains(&ratio), details))
}

/// `Ẽ = AZZᵀ − AΩS(ZᵀΩS)⁺Zᵀ` with `Z` from the randomized SVD and
/// `r = ⌈4k·ln(2k/δ)/ε²⌉`; checks ‖Ẽ‖_F ≤ (1.6ε/√δ)‖A − AZZᵀ‖_F.
fn lemma6(seed: u64, trials: usize) -> Result<VerifyReport> {
    let (k, eps, delta) = (3usize, 0.3, 0.1);
    let r = ceil_formula(4.0 * k as f64 * (2.0 * k as f64 / delta).ln() / (eps * eps));
    let sigma: Vec<f64> = (1..=60).map(|i| 1.0 / i as f64).collect();
    let a = with_singular_values(60, 80, &sigma, derive_seed(seed, 0))?;
    let bound = 1.6 * eps / delta.sqrt();
    let mut passes = 0;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let ts = trial_seed(seed, t);
        let z = fast_frobenius_svd(&a, k, eps, derive_seed(ts, 0))?;
        let e = frobenius_norm(&projection_residual(&a, &z)?);
        let plan = randomized_sampling(&z, r, derive_seed(ts, 1))?;
        let a_os = apply_sampling(&a, &plan)?;
        let zt_os = apply_sampling(&z.transpose(), &plan)?;
        let approx = multiply(&multiply(&a_os, &pseudo_inverse(&zt_os, PINV_RANK_TOL)?)?, &z.transpose())?;
        let azz = multiply(&multiply(&a, &z)?, &z.transpose())?;
        let ratio = frobenius_norm(&azz.sub(&approx)?) / e;
        worst = worst.max(ratio);
        passes += usize::from(ratio <= bound);
    }
    let details = format!("k={k} eps={eps} delta={delta} r={r}; worst ratio {worst:.4} vs bound {bound:.4}");
    Ok(VerifyReport::new(Suite::Lemma6, trials, passes as f64 / trials as f64, 1.0 - 3.0 * delta - 0.05, details))
}

/// Sign projection with `r = 100k/ε²`: ‖YR‖_F² ≤ (1+ε)‖Y‖_F² in at least 95% of trials.
fn lemma7(seed: u64, trials: usize) -> Result<VerifyReport> {
    let (k, eps) = (2usize, 0.5);
    let r = ceil_formula(100.0 * k as f64 / (eps * eps));
    let y = gaussian(10, 60, &mut data_rng(seed));
    let energy = y.squared_norm();
    let mut passes = 0;
    for t in 0..trials {
        let sk = random_sign_sketch(60, r, trial_seed(seed, t))?;
        passes += usize::from(mailman_multiply(&y, &sk)?.squared_norm() <= (1.0 + eps) * energy);
    }
    let details = format!("Y 10x60, k={k} eps={eps} r={r}; violations {}/{trials}", trials - passes);
    Ok(VerifyReport::new(Suite::Lemma7, trials, passes as f64 / trials as f64, 0.95, details))
}

/// `Ẽ = A_k − AR(V_kᵀR)⁺V_kᵀ` with `r = 100k/ε²`; ‖Ẽ‖_F ≤ 3ε‖A − A_k‖_F in at least 92% of trials.
fn lemma8(seed: u64, trials: usize) -> Result<VerifyReport> {
    let (k, eps) = (3usize, 0.3);
    let r = ceil_formula(100.0 * k as f64 / (eps * eps));
    let sigma: Vec<f64> = (1..=40).map(|i| 1.0 / i as f64).collect();
    let a = with_singular_values(40, 60, &sigma, derive_seed(seed, 0))?;
    let svd = exact_svd(&a)?;
    let a_k = svd.truncate(k);
    let tail = svd.tail_energy(k).sqrt();
    let vkt = svd.v.leading_cols(k).transpose();
    let mut passes = 0;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let sk = random_sign_sketch(60, r, trial_seed(seed, t))?;
        let ar = mailman_multiply(&a, &sk)?;
        let vr = mailman_multiply(&vkt, &sk)?;
        let approx = multiply(&multiply(&ar, &pseudo_inverse(&vr, PINV_RANK_TOL)?)?, &vkt)?;
        let ratio = frobenius_norm(&a_k.sub(&approx)?) / tail;
        worst = worst.max(ratio);
        passes += usize::from(ratio <= 3.0 * eps);
    }
    let details = format!("A 40x60, k={k} eps={eps} r={r}; worst ratio {worst:.4} vs bound {:.4}", 3.0 * eps);
    Ok(VerifyReport::new(Suite::Lemma8, trials, passes as f64 / trials as f64, 0.92, details))
}

/// For orthonormal `Q` and `Θ` alternating between sampling/rescaling and
/// sign matrices: whenever all σ_i²(QᵀΘ) lie in [1−ε, 1+ε],
/// ‖(QᵀΘ)⁺ − (QᵀΘ)ᵀ‖₂ ≤ 1.5ε. Only trials meeting the premise are counted.
fn lemma9(seed: u64, trials: usize) -> Result<VerifyReport> {
    let (n, k, r, eps) = (100usize, 4usize, 400usize, 0.3);
    let q = qr_orthonormalize(&gaussian(n, k, &mut data_rng(seed)))?;
    let qt = q.transpose();
    let (mut premise, mut passes) = (0usize, 0usize);
    let mut worst = 0.0f64;
    for t in 0..trials {
        let ts = trial_seed(seed, t);
        let x = if t % 2 == 0 {
            apply_sampling(&qt, &randomized_sampling(&q, r, ts)?)?
        } else {
            mailman_multiply(&qt, &random_sign_sketch(n, r, ts)?)?
        };
        let s2 = squared_singular_values(&x)?;
        if !within(&s2, eps) {
            continue;
        }
        premise += 1;
        let gap = spectral_norm(&pseudo_inverse(&x, PINV_RANK_TOL)?.sub(&x.transpose())?, 1e-12, 100_000)?;
        worst = worst.max(gap / eps);
        passes += usize::from(gap <= 1.5 * eps * (1.0 + 1e-9));
    }
    let fraction = if premise == 0 { 0.0 } else { passes as f64 / premise as f64 };
    let details = format!("Q 100x4, r={r}, eps={eps}; premise held in {premise}/{trials}; worst gap/eps {worst:.4} (bound 1.5)");
    Ok(VerifyReport::new(Suite::Lemma9, trials, fraction, 1.0, details))
}

/// 100×80 matrix with σ_i = 1/i, k = 5, ε = 1/3: the mean of ‖A − AZZᵀ‖_F² is
/// at most 1.05·(1+ε)·‖A − A_k‖_F².
fn rsvd(seed: u64, trials: usize) -> Result<VerifyReport> {
    let (k, eps) = (5usize, 1.0 / 3.0);
    let sigma: Vec<f64> = (1..=80).map(|i| 1.0 / i as f64).collect();
    let a = with_singular_values(100, 80, &sigma, derive_seed(seed, 0))?;
    let tail = exact_svd(&a)?.tail_energy(k);
    let mut sum = 0.0;
    for t in 0..trials {
        let z = fast_frobenius_svd(&a, k, eps, trial_seed(seed, t))?;
        sum += projection_residual(&a, &z)?.squared_norm();
    }
    let ratio = sum / trials as f64 / tail;
    let bound = 1.05 * (1.0 + eps);
    let details = format!("mean residual / tail {ratio:.4} vs bound {bound:.4}");
    Ok(VerifyReport::aggregate(Suite::Rsvd, trials, ratio <= bound, details))
}

/// Mailman product against the dense expansion on random shapes, including
/// `n` not a power of two and `r` below the block width.
fn mailman(seed: u64, trials: usize) -> Result<VerifyReport> {
    let mut passes = 0;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let mut rng = SeedRng::new(trial_seed(seed, t));
        let m = range(&mut rng, 1, 20);
        let n = if t % 5 == 0 { 1 << range(&mut rng, 0, 8) } else { range(&mut rng, 1, 300) };
        let w = block_width(n);
        let r = if t % 3 == 0 && w > 1 { range(&mut rng, 1, w - 1) } else { range(&mut rng, 1, 64) };
        let a = gaussian(m, n, &mut rng);
        let sk = random_sign_sketch(n, r, rng.uniform().to_bits())?;
        let diff = mailman_multiply(&a, &sk)?.sub(&naive_sign_multiply(&a, &sk)?)?.max_abs();
        worst = worst.max(diff);
        passes += usize::from(diff <= 1e-10);
    }
    let details = format!("max entrywise difference {worst:.3e} (tolerance 1e-10)");
    Ok(VerifyReport::new(Suite::Mailman, trials, passes as f64 / trials as f64, 1.0, details))
}

/// 20 points in 64 dimensions, `r = ⌈36·ln(m)·ln(100)/ε²⌉`, ε = 0.5: every
/// pairwise squared distance preserved within 1±ε in at least 95% of trials.
fn jl(seed: u64, trials: usize) -> Result<VerifyReport> {
    let (m, n, eps) = (20usize, 64usize, 0.5);
    let r = ceil_formula(36.0 * (m as f64).ln() * 100f64.ln() / (eps * eps));
    let a = gaussian(m, n, &mut data_rng(seed));
    let mut passes = 0;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let ar = mailman_multiply(&a, &random_sign_sketch(n, r, trial_seed(seed, t))?)?;
        let mut ok = true;
        for i in 0..m {
            for j in i + 1..m {
                let d: f64 = a.row(i).iter().zip(a.row(j)).map(|(x, y)| (x - y).powi(2)).sum();
                let dr: f64 = ar.row(i).iter().zip(ar.row(j)).map(|(x, y)| (x - y).powi(2)).sum();
                let dev = (dr / d - 1.0).abs();
                worst = worst.max(dev);
                ok &= dev <= eps;
            }
        }
        passes += usize::from(ok);
    }
    let details = format!("m={m} n={n} r={r} eps={eps}; worst squared-distance distortion {worst:.4}");
    Ok(VerifyReport::new(Suite::Jl, trials, passes as f64 / trials as f64, 0.95, details))
}
