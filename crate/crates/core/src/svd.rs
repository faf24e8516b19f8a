//! Exact SVD (via a Jacobi eigensolver on the smaller Gram matrix) and the
//! randomized Frobenius-norm SVD used to approximate the top right singular
//! subspace.

use alloc::vec::Vec;

use crate::linalg::{frobenius_norm, multiply, qr_orthonormalize, Matrix};
use crate::math::{abs, ceil_tol, sqrt};
use crate::rng::SeedRng;
use crate::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 60;
const JACOBI_OFF_TOL: f64 = 1e-13;
/// Singular values at or below `RANK_TOL · σ_max` do not count towards the rank.
pub const RANK_TOL: f64 = 1e-10;

/// Thin SVD `A = U·diag(σ)·Vᵀ` with `p = min(m, n)` columns in `U` and `V`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: Matrix,
    /// Descending, non-negative.
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl SvdResult {
    /// Number of singular values above `RANK_TOL · σ_max`.
    pub fn rank(&self) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.sigma.iter().take_while(|&&s| s > RANK_TOL * top).count()
    }

    /// `Σ_{i>k} σ_i² = ‖A − A_k‖_F²`.
    pub fn tail_energy(&self, k: usize) -> f64 {
        self.sigma.iter().skip(k).map(|s| s * s).sum()
    }

    /// Best rank-k approximation `A_k = U_k Σ_k V_kᵀ`.
    pub fn truncate(&self, k: usize) -> Matrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        let k = k.min(self.sigma.len());
        Matrix::from_fn(m, n, |i, j| {
            (0..k).map(|t| self.u[(i, t)] * self.sigma[t] * self.v[(j, t)]).sum()
        })
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic-by-row Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns. Converges when the off-diagonal Frobenius norm
/// drops below `1e-13·‖S‖_F`; gives up after [`JACOBI_MAX_SWEEPS`] sweeps.
pub fn jacobi_eigh(s: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = s.rows();
    if s.cols() != n {
        return Err(Error::DimensionMismatch { op: "jacobi_eigh", left: s.shape(), right: s.shape() });
    }
    let scale = frobenius_norm(s);
    for i in 0..n {
        for j in 0..i {
            if abs(s[(i, j)] - s[(j, i)]) > 1e-12 * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }

    let mut a = s.as_slice().to_vec();
    // Row i of `vt` is the i-th eigenvector, so rotations touch contiguous memory.
    let mut vt = Matrix::identity(n).into_vec();
    let mut converged = false;
    let mut off = 0.0;
    for _ in 0..=JACOBI_MAX_SWEEPS {
        off = off_diagonal_norm(&a, n);
        if off <= JACOBI_OFF_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut vt, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "jacobi_eigh", iterations: JACOBI_MAX_SWEEPS, estimate: off });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| vt[order[c] * n + r]);
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sqrt(acc)
}

/// Zeroes `a[p][q]` with `a ← JᵀaJ` and accumulates `vt ← Jᵀvt`; `a` is kept symmetric.
fn rotate(a: &mut [f64], vt: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let (app, aqq) = (a[p * n + p], a[q * n + q]);
    let theta = (aqq - app) / (2.0 * apq);
    let t = if abs(theta) > 1e150 {
        1.0 / (2.0 * theta)
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (abs(theta) + sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / sqrt(t * t + 1.0);
    let s = t * c;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let (apk, aqk) = (a[p * n + k], a[q * n + k]);
        let (np, nq) = (c * apk - s * aqk, s * apk + c * aqk);
        a[p * n + k] = np;
        a[q * n + k] = nq;
        a[k * n + p] = np;
        a[k * n + q] = nq;
    }
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    let (head, tail) = vt.split_at_mut(q * n);
    let vp = &mut head[p * n..(p + 1) * n];
    let vq = &mut tail[..n];
    for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Thin SVD of `a`.
///
/// The eigenvectors of the smaller Gram matrix give `V`; singular values are
/// then read off as column norms of `A·V` (more accurate than square roots of
/// Gram eigenvalues near zero) and `U` is the orthonormalized `A·V`, with
/// null directions completed to a full orthonormal set. Each right singular
/// vector is signed so its first non-negligible coordinate is positive.
pub fn exact_svd(a: &Matrix) -> Result<SvdResult> {
    if a.cols() > a.rows() {
        let t = exact_svd(&a.transpose())?;
        let mut out = SvdResult { u: t.v, sigma: t.sigma, v: t.u };
        fix_signs(&mut out.v, Some(&mut out.u));
        return Ok(out);
    }
    let n = a.cols();
    let (_, eigvecs) = jacobi_eigh(&a.gram())?;
    let av = multiply(a, &eigvecs)?;
    let norms: Vec<f64> = (0..n).map(|j| sqrt(av.col(j).iter().map(|x| x * x).sum())).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut v = Matrix::from_fn(n, n, |r, c| eigvecs[(r, order[c])]);
    let mut b = Matrix::from_fn(a.rows(), n, |r, c| av[(r, order[c])]);
    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    fix_signs(&mut v, Some(&mut b));

    let mut u = qr_orthonormalize(&b)?;
    // QR may flip a column; align each u_i with A v_i.
    for j in 0..n {
        let dot: f64 = (0..a.rows()).map(|i| u[(i, j)] * b[(i, j)]).sum();
        if dot < 0.0 {
            for i in 0..a.rows() {
                u[(i, j)] = -u[(i, j)];
            }
        }
    }
    Ok(SvdResult { u, sigma, v })
}

fn fix_signs(v: &mut Matrix, mut partner: Option<&mut Matrix>) {
    for j in 0..v.cols() {
        let lead = (0..v.rows()).map(|i| v[(i, j)]).find(|x| abs(*x) > 1e-10);
        if matches!(lead, Some(x) if x < 0.0) {
            for i in 0..v.rows() {
                v[(i, j)] = -v[(i, j)];
            }
            if let Some(p) = partner.as_deref_mut() {
                for i in 0..p.rows() {
                    p[(i, j)] = -p[(i, j)];
                }
            }
        }
    }
}

/// `V_k`: the top `k` right singular vectors of `a`, as columns.
pub fn top_k_right_singular(a: &Matrix, k: usize) -> Result<Matrix> {
    let svd = exact_svd(a)?;
    let rank = svd.rank();
    if k == 0 || k > rank {
        return Err(Error::RankOutOfRange { k, rank });
    }
    Ok(svd.v.leading_cols(k))
}

/// Sketch width `r = k + ⌈k/ε + 1⌉` of the randomized SVD.
pub fn sketch_width(k: usize, epsilon: f64) -> usize {
    k + ceil_tol(k as f64 / epsilon + 1.0) as usize
}

/// Randomized approximation `Z ∈ R^{n×k}` of the top-k right singular vectors.
///
/// 1. `R`: `n × r` standard Gaussian, `r = sketch_width(k, ε)`.
/// 2. `Y = A·R`.
/// 3. `Q`: orthonormal basis of `Y`'s columns (at most `m` of them).
/// 4. `Z`: top `k` right singular vectors of `QᵀA`.
///
/// `ZᵀZ = I_k`, and in expectation `‖A − AZZᵀ‖_F² ≤ (1+ε)‖A − A_k‖_F²`.
/// Requires `2 ≤ k < min(m, n)` and `0 < ε < 1`.
pub fn fast_frobenius_svd(a: &Matrix, k: usize, epsilon: f64, seed: u64) -> Result<Matrix> {
    let (m, n) = a.shape();
    if k < 2 || k >= m.min(n) {
        return Err(Error::RankOutOfRange { k, rank: m.min(n) });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon must lie in (0, 1)"));
    }
    let r = sketch_width(k, epsilon);
    let mut rng = SeedRng::new(seed);
    let gaussian = Matrix::from_fn(n, r, |_, _| rng.normal());
    let y = multiply(a, &gaussian)?;
    let y = if r > m { y.leading_cols(m) } else { y };
    let q = qr_orthonormalize(&y)?;
    let qta = q.t_matmul(a)?;
    let svd = exact_svd(&qta)?;
    Ok(svd.v.leading_cols(k))
}

/// `A − A·Z·Zᵀ`.
pub fn projection_residual(a: &Matrix, z: &Matrix) -> Result<Matrix> {
    let az = multiply(a, z)?;
    a.sub(&multiply(&az, &z.transpose())?)
}

/// Test matrix `U·diag(sigma)·Vᵀ` with Haar-like random orthonormal factors.
pub fn with_singular_values(m: usize, n: usize, sigma: &[f64], seed: u64) -> Result<Matrix> {
    let p = sigma.len();
    if p > m.min(n) || p == 0 {
        return Err(Error::param("too many singular values for the shape"));
    }
    let mut rng = SeedRng::new(seed);
    let gu = Matrix::from_fn(m, p, |_, _| rng.normal());
    let gv = Matrix::from_fn(n, p, |_, _| rng.normal());
    let u = qr_orthonormalize(&gu)?;
    let v = qr_orthonormalize(&gv)?;
    let mut us = u;
    for j in 0..p {
        for i in 0..m {
            us[(i, j)] *= sigma[j];
        }
    }
    multiply(&us, &v.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn random(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = SeedRng::new(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.normal())
    }

    fn orthonormality_error(q: &Matrix) -> f64 {
        frobenius_norm(&q.gram().sub(&Matrix::identity(q.cols())).unwrap())
    }

    #[test]
    fn jacobi_diagonal() {
        let (vals, vecs) = jacobi_eigh(&Matrix::from_diag(&[5.0, 1.0])).unwrap();
        assert_eq!(vals, vec![5.0, 1.0]);
        assert_eq!(vecs[(0, 0)].abs(), 1.0);
        assert_eq!(vecs[(1, 1)].abs(), 1.0);
        let (vals, _) = jacobi_eigh(&Matrix::from_diag(&[1.0, 5.0])).unwrap();
        assert_eq!(vals, vec![5.0, 1.0]);
    }

    #[test]
    fn jacobi_two_by_two() {
        let s = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let (vals, vecs) = jacobi_eigh(&s).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        for j in 0..2 {
            let x = vecs.col(j);
            let sx = [2.0 * x[0] + x[1], x[0] + 2.0 * x[1]];
            assert!((sx[0] - vals[j] * x[0]).abs() < 1e-12);
            assert!((sx[1] - vals[j] * x[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_random_reconstruction() {
        let g = random(10, 10, 1);
        let s = g.add(&g.transpose()).unwrap();
        let (vals, vecs) = jacobi_eigh(&s).unwrap();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        assert!(orthonormality_error(&vecs) < 1e-12);
        let recon = Matrix::from_fn(10, 10, |i, j| (0..10).map(|t| vecs[(i, t)] * vals[t] * vecs[(j, t)]).sum());
        assert!(recon.sub(&s).unwrap().max_abs() <= 1e-9);
        // s·v_i = λ_i·v_i
        let sv = multiply(&s, &vecs).unwrap();
        for t in 0..10 {
            for i in 0..10 {
                assert!((sv[(i, t)] - vals[t] * vecs[(i, t)]).abs() <= 1e-8 * frobenius_norm(&s));
            }
        }
    }

    #[test]
    fn jacobi_rejects_asymmetric() {
        let s = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert_eq!(jacobi_eigh(&s).unwrap_err(), Error::NotSymmetric);
        assert!(jacobi_eigh(&random(2, 3, 1)).is_err());
    }

    fn check_svd(a: &Matrix, svd: &SvdResult) {
        assert!(orthonormality_error(&svd.u) <= 1e-8);
        assert!(orthonormality_error(&svd.v) <= 1e-8);
        assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(svd.sigma.iter().all(|&s| s >= 0.0));
        let recon = svd.truncate(svd.sigma.len());
        assert!(frobenius_norm(&recon.sub(a).unwrap()) <= 1e-8 * frobenius_norm(a));
    }

    #[test]
    fn svd_diagonal_and_isometry() {
        let d = Matrix::from_diag(&[3.0, 2.0, 1.0]);
        let svd = exact_svd(&d).unwrap();
        for (s, e) in svd.sigma.iter().zip([3.0, 2.0, 1.0]) {
            assert!((s - e).abs() < 1e-14);
        }
        check_svd(&d, &svd);

        let q = qr_orthonormalize(&random(9, 4, 2)).unwrap();
        let svd = exact_svd(&q).unwrap();
        assert!(svd.sigma.iter().all(|s| (s - 1.0).abs() <= 1e-10));
    }

    #[test]
    fn svd_tail_sums() {
        for a in [random(12, 7, 3), random(7, 12, 4)] {
            let svd = exact_svd(&a).unwrap();
            check_svd(&a, &svd);
            for k in 0..svd.sigma.len() {
                let err = a.sub(&svd.truncate(k)).unwrap().squared_norm();
                let tail = svd.tail_energy(k);
                assert!((err - tail).abs() <= 1e-9 * tail.max(1e-300) + 1e-20, "k={k}: {err} vs {tail}");
            }
        }
    }

    #[test]
    fn svd_sign_convention() {
        let svd = exact_svd(&random(6, 4, 5)).unwrap();
        for j in 0..4 {
            let lead = svd.v.col(j).into_iter().find(|x| x.abs() > 1e-10).unwrap();
            assert!(lead > 0.0);
        }
    }

    #[test]
    fn svd_rank_deficient_completes_u() {
        let a = multiply(&random(8, 2, 6), &random(2, 5, 7)).unwrap();
        let svd = exact_svd(&a).unwrap();
        check_svd(&a, &svd);
        assert_eq!(svd.rank(), 2);
        assert!(svd.sigma[2] <= 1e-12 * svd.sigma[0]);
    }

    #[test]
    fn top_k_examples() {
        let d = Matrix::from_diag(&[3.0, 2.0, 1.0]);
        let v = top_k_right_singular(&d, 2).unwrap();
        for i in 0..2 {
            assert!((v[(i, i)].abs() - 1.0).abs() < 1e-14);
            assert!(v[(2, i)].abs() < 1e-14);
        }

        let a = random(10, 6, 8);
        let v = top_k_right_singular(&a, 6).unwrap();
        assert!(orthonormality_error(&v) <= 1e-10);
        assert!(frobenius_norm(&projection_residual(&a, &v).unwrap()) <= 1e-9 * frobenius_norm(&a));

        let a = random(20, 10, 9);
        let tail = exact_svd(&a).unwrap().tail_energy(3);
        let v = top_k_right_singular(&a, 3).unwrap();
        let err = projection_residual(&a, &v).unwrap().squared_norm();
        assert!((err - tail).abs() <= 1e-8 * tail);
    }

    #[test]
    fn top_k_rejects_beyond_rank() {
        let a = multiply(&random(6, 2, 10), &random(2, 5, 11)).unwrap();
        assert_eq!(top_k_right_singular(&a, 3).unwrap_err(), Error::RankOutOfRange { k: 3, rank: 2 });
        assert!(top_k_right_singular(&a, 0).is_err());
    }

    #[test]
    fn sketch_width_matches_formula() {
        assert_eq!(sketch_width(5, 1.0 / 3.0), 21);
        assert_eq!(sketch_width(2, 0.5), 7);
        assert_eq!(sketch_width(3, 0.4), 3 + 9);
    }

    #[test]
    fn fast_svd_orthonormal_and_residual_orthogonal() {
        let a = random(40, 30, 12);
        let z = fast_frobenius_svd(&a, 4, 0.5, 99).unwrap();
        assert_eq!(z.shape(), (30, 4));
        assert!(frobenius_norm(&z.gram().sub(&Matrix::identity(4)).unwrap()) <= 1e-8);
        let e = projection_residual(&a, &z).unwrap();
        assert!(frobenius_norm(&multiply(&e, &z).unwrap()) <= 1e-8 * frobenius_norm(&a));
    }

    #[test]
    fn fast_svd_exact_on_rank_k() {
        let a = multiply(&random(30, 5, 13), &random(5, 25, 14)).unwrap();
        let z = fast_frobenius_svd(&a, 5, 1.0 / 3.0, 1).unwrap();
        let e = projection_residual(&a, &z).unwrap();
        assert!(frobenius_norm(&e) <= 1e-8 * frobenius_norm(&a));
    }

    #[test]
    fn fast_svd_sketch_wider_than_rows() {
        // r = 5 + 16 = 21 > m = 12: the sketch spans every row direction.
        let a = random(12, 40, 15);
        let z = fast_frobenius_svd(&a, 5, 1.0 / 3.0, 2).unwrap();
        let exact = exact_svd(&a).unwrap();
        let err = projection_residual(&a, &z).unwrap().squared_norm();
        assert!((err - exact.tail_energy(5)).abs() <= 1e-9 * err);
    }

    #[test]
    fn fast_svd_parameter_checks() {
        let a = random(10, 8, 16);
        assert!(matches!(fast_frobenius_svd(&a, 1, 0.3, 0), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(fast_frobenius_svd(&a, 8, 0.3, 0), Err(Error::RankOutOfRange { .. })));
        assert!(fast_frobenius_svd(&a, 3, 1.0, 0).is_err());
        assert!(fast_frobenius_svd(&a, 3, 0.0, 0).is_err());
    }

    #[test]
    fn fast_svd_deterministic() {
        let a = random(20, 15, 17);
        assert_eq!(fast_frobenius_svd(&a, 3, 0.5, 4).unwrap(), fast_frobenius_svd(&a, 3, 0.5, 4).unwrap());
    }

    #[test]
    fn prescribed_singular_values() {
        let a = with_singular_values(15, 10, &[4.0, 2.0, 1.0], 3).unwrap();
        let svd = exact_svd(&a).unwrap();
        assert!((svd.sigma[0] - 4.0).abs() < 1e-12);
        assert!((svd.sigma[2] - 1.0).abs() < 1e-12);
        assert_eq!(svd.rank(), 3);
    }
}
