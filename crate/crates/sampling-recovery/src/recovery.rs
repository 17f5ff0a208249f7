//! Weighted design matrices and the least-squares reconstruction.
//!
//! Given samples `x_1..x_n` with density values `rho(x_i)`, the algorithm
//! minimizes `sum_i |g(x_i) - f(x_i)|^2 / rho(x_i)` over `g` in the span of
//! `b_1..b_k`. In matrix form the minimizer is `c = G^+ y` with
//! `G[i][j] = rho(x_i)^{-1/2} b_j(x_i)` and `y_i = rho(x_i)^{-1/2} f(x_i)`.
//! The aliasing error of the solution is controlled by the largest singular
//! value of the weighted tail matrix
//! `Gamma[i][j] = rho(x_i)^{-1/2} a_j b_{j+1}(x_i)`, `j >= k`, which is
//! infinitely wide; it is truncated at a column index `J` and the dropped
//! block is covered by a Frobenius-norm correction, so certificates stay
//! rigorous.

use nalgebra::{DMatrix, DVector};

use crate::density::SampleSet;
use crate::error::{Error, Result};
use crate::model::{Rank, SpectralModel};

/// Default relative cutoff for discarding singular values.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

/// Default tail truncation: the full spectrum for finite-rank models,
/// `max(2k, k + 256)` otherwise.
pub fn default_tail_truncation(rank: Rank, k: usize) -> usize {
    match rank {
        Rank::Finite(m) => m,
        Rank::Infinite => (2 * k).max(k + 256),
    }
}

/// The weighted design matrix `G` (n x k).
///
/// Samples drawn with a different `k` than requested are permitted (the
/// harness flags the mismatch in its reports).
pub fn build_design<M: SpectralModel>(
    model: &M,
    k: usize,
    samples: &SampleSet<M::Point>,
) -> Result<DMatrix<f64>> {
    if k == 0 {
        return Err(Error::ZeroTruncation);
    }
    let n = samples.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut g = DMatrix::<f64>::zeros(n, k);
    let mut row = vec![0.0; k];
    for (i, (x, rho)) in samples.iter().enumerate() {
        let w = rho.sqrt().recip();
        model.basis_row(x, &mut row)?;
        for (j, b) in row.iter().enumerate() {
            g[(i, j)] = w * b;
        }
    }
    Ok(g)
}

/// The truncated weighted tail matrix `Gamma_J` (n x (J - k)) together with
/// the rigorous spectral-norm correction for the dropped columns:
/// `s_max(Gamma) <= s_max(Gamma_J) + tail_correction`.
pub fn build_tail_design<M: SpectralModel>(
    model: &M,
    k: usize,
    j_trunc: usize,
    samples: &SampleSet<M::Point>,
) -> Result<(DMatrix<f64>, f64)> {
    if j_trunc <= k {
        return Err(Error::TailTruncationTooSmall { j: j_trunc, k });
    }
    let n = samples.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let cols = j_trunc - k;
    // Basis indices above a finite rank never appear: their a_j vanish.
    let active = match model.rank() {
        Rank::Finite(m) => m.saturating_sub(k).min(cols),
        Rank::Infinite => cols,
    };
    let mut gamma = DMatrix::<f64>::zeros(n, cols);
    let mut row = vec![0.0; k + active];
    let scales: Vec<f64> = (k..k + active).map(|j| model.approx_number(j)).collect();
    let mut frob_sq = 0.0;
    for (i, (x, rho)) in samples.iter().enumerate() {
        let w = rho.sqrt().recip();
        if active > 0 {
            model.basis_row(x, &mut row)?;
            for t in 0..active {
                gamma[(i, t)] = w * scales[t] * row[k + t];
            }
        }
        frob_sq += model.pointwise_tail_bound(j_trunc, x) / rho;
    }
    Ok((gamma, frob_sq.sqrt()))
}

/// Both design matrices plus the truncation metadata.
#[derive(Clone, Debug)]
pub struct DesignMatrices {
    pub g: DMatrix<f64>,
    pub gamma_j: DMatrix<f64>,
    pub j_trunc: usize,
    pub tail_correction: f64,
}

pub fn build_matrices<M: SpectralModel>(
    model: &M,
    k: usize,
    j_trunc: usize,
    samples: &SampleSet<M::Point>,
) -> Result<DesignMatrices> {
    let g = build_design(model, k, samples)?;
    let (gamma_j, tail_correction) = build_tail_design(model, k, j_trunc, samples)?;
    Ok(DesignMatrices {
        g,
        gamma_j,
        j_trunc,
        tail_correction,
    })
}

/// The weighted information vector `y_i = rho(x_i)^{-1/2} f(x_i)`.
pub fn weighted_info<P: Copy>(samples: &SampleSet<P>, f_values: &[f64]) -> Result<DVector<f64>> {
    if f_values.len() != samples.len() {
        return Err(Error::LengthMismatch {
            expected: samples.len(),
            got: f_values.len(),
        });
    }
    Ok(DVector::from_iterator(
        samples.len(),
        samples
            .densities()
            .iter()
            .zip(f_values)
            .map(|(rho, f)| f / rho.sqrt()),
    ))
}

/// Result of the weighted least-squares solve.
#[derive(Clone, Debug)]
pub struct RecoveryOutput {
    /// Expansion of the reconstruction in `b_1..b_k`.
    pub coefficients: DVector<f64>,
    /// Numerical rank of `G` at the given tolerance.
    pub rank: usize,
    /// Smallest singular value kept by the cutoff (0 when rank is 0).
    pub smallest_kept_singular_value: f64,
    /// `||G c - y||_2`, the square root of the weighted objective.
    pub residual_norm: f64,
    /// True when rank < k; the output is then the minimum-norm minimizer.
    pub rank_deficient: bool,
}

/// Minimum least-squares solution `c = G^+ y` via SVD, discarding singular
/// values below `rank_tolerance * s_max`. With full rank this is the unique
/// weighted least-squares minimizer; otherwise the minimum-norm one,
/// flagged via `rank_deficient`.
pub fn solve(g: &DMatrix<f64>, y: &DVector<f64>, rank_tolerance: f64) -> Result<RecoveryOutput> {
    if g.nrows() == 0 || g.ncols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if y.len() != g.nrows() {
        return Err(Error::LengthMismatch {
            expected: g.nrows(),
            got: y.len(),
        });
    }
    if rank_tolerance.is_nan() || rank_tolerance <= 0.0 {
        return Err(Error::InvalidConfig(
            "rank tolerance must be positive".into(),
        ));
    }
    let k = g.ncols();
    let svd = g.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = rank_tolerance * smax;

    let mut coeffs = DVector::<f64>::zeros(k);
    let mut rank = 0usize;
    let mut smallest_kept = f64::INFINITY;
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv > cutoff && sv > 0.0 {
            rank += 1;
            smallest_kept = smallest_kept.min(sv);
            let proj = u.column(i).dot(y) / sv;
            coeffs.axpy(proj, &v_t.row(i).transpose(), 1.0);
        }
    }
    if rank == 0 {
        smallest_kept = 0.0;
    }
    let residual_norm = (g * &coeffs - y).norm();
    Ok(RecoveryOutput {
        rank_deficient: rank < k,
        coefficients: coeffs,
        rank,
        smallest_kept_singular_value: smallest_kept,
        residual_norm,
    })
}

/// Moore-Penrose pseudoinverse (k x n) at the given relative tolerance,
/// along with the numerical rank.
pub fn pseudoinverse(g: &DMatrix<f64>, rank_tolerance: f64) -> Result<(DMatrix<f64>, usize)> {
    if g.nrows() == 0 || g.ncols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let svd = g.clone().svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = rank_tolerance * smax;
    let mut pinv = DMatrix::<f64>::zeros(g.ncols(), g.nrows());
    let mut rank = 0usize;
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv > cutoff && sv > 0.0 {
            rank += 1;
            // pinv += v_i u_i^T / sv
            pinv.ger(1.0 / sv, &v_t.row(i).transpose(), &u.column(i), 1.0);
        }
    }
    Ok((pinv, rank))
}

/// Evaluate `sum_j c_j b_j(x)`.
pub fn evaluate_reconstruction<M: SpectralModel>(
    model: &M,
    coefficients: &[f64],
    x: M::Point,
) -> Result<f64> {
    let mut row = vec![0.0; coefficients.len()];
    model.basis_row(x, &mut row)?;
    Ok(row
        .iter()
        .zip(coefficients)
        .map(|(b, c)| b * c)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{draw_samples, SampleSet, SamplingDensity};
    use crate::model::{DiscreteDiagonalModel, FourierSobolevModel};
    use approx::assert_abs_diff_eq;

    fn fix_a() -> DiscreteDiagonalModel {
        DiscreteDiagonalModel::new(vec![1.0, 0.5]).unwrap()
    }

    fn fix_a_samples() -> SampleSet<usize> {
        SampleSet::from_parts(vec![0, 1], vec![0.5, 0.5], 1, 0, 0).unwrap()
    }

    #[test]
    fn fix_a_design_column() {
        let model = fix_a();
        let g = build_design(&model, 1, &fix_a_samples()).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(g[(0, 0)], r2, epsilon = 1e-15);
        assert_abs_diff_eq!(g[(1, 0)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn design_vanishes_off_support() {
        let model = fix_a();
        let samples = SampleSet::from_parts(vec![1, 1], vec![0.5, 0.5], 1, 0, 0).unwrap();
        let g = build_design(&model, 1, &samples).unwrap();
        assert_eq!(g[(0, 0)], 0.0);
        assert_eq!(g[(1, 0)], 0.0);
    }

    #[test]
    fn fourier_first_column_is_weight() {
        let model = FourierSobolevModel::new(1.0).unwrap();
        let d = SamplingDensity::new(&model, 1).unwrap();
        let samples = draw_samples(&d, 50, 1, 0).unwrap();
        let g = build_design(&model, 1, &samples).unwrap();
        for (i, (_, rho)) in samples.iter().enumerate() {
            assert_abs_diff_eq!(g[(i, 0)], rho.sqrt().recip(), epsilon = 1e-14);
        }
    }

    #[test]
    fn fix_a_tail_design() {
        let model = fix_a();
        let (gamma, corr) = build_tail_design(&model, 1, 2, &fix_a_samples()).unwrap();
        assert_eq!(gamma.shape(), (2, 1));
        assert_abs_diff_eq!(gamma[(0, 0)], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma[(1, 0)], 1.0 / std::f64::consts::SQRT_2, epsilon = 1e-15);
        assert_eq!(corr, 0.0);
    }

    #[test]
    fn tail_correction_shrinks_with_j() {
        let model = FourierSobolevModel::new(1.0).unwrap();
        let d = SamplingDensity::new(&model, 2).unwrap();
        let samples = draw_samples(&d, 64, 3, 0).unwrap();
        let mut prev = f64::INFINITY;
        for j in [4usize, 8, 16, 64, 128] {
            let (_, corr) = build_tail_design(&model, 2, j, &samples).unwrap();
            assert!(corr <= prev);
            assert!(corr > 0.0);
            prev = corr;
        }
    }

    #[test]
    fn finite_rank_beyond_m_has_zero_tail() {
        let model = DiscreteDiagonalModel::new(vec![1.0, 0.5, 0.25]).unwrap();
        let samples = SampleSet::from_parts(vec![0, 1, 2], vec![0.4, 0.3, 0.3], 2, 0, 0).unwrap();
        let (gamma, corr) = build_tail_design(&model, 2, 10, &samples).unwrap();
        assert_eq!(gamma.shape(), (3, 8));
        assert_eq!(corr, 0.0);
        // Only the first tail column (j = 2, basis b_3) is populated.
        for i in 0..3 {
            for t in 1..8 {
                assert_eq!(gamma[(i, t)], 0.0);
            }
        }
        assert!(build_tail_design(&model, 2, 2, &samples).is_err());
    }

    #[test]
    fn weighted_info_values() {
        let samples = fix_a_samples();
        let y = weighted_info(&samples, &[3.0, 7.0]).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        assert_abs_diff_eq!(y[0], 3.0 * r2, epsilon = 1e-15);
        assert_abs_diff_eq!(y[1], 7.0 * r2, epsilon = 1e-15);
        let zero = weighted_info(&samples, &[0.0, 0.0]).unwrap();
        assert_eq!(zero.norm(), 0.0);
        let y2 = weighted_info(&samples, &[6.0, 14.0]).unwrap();
        assert_abs_diff_eq!((2.0 * &y - y2).norm(), 0.0, epsilon = 1e-15);
        assert!(weighted_info(&samples, &[1.0]).is_err());
    }

    #[test]
    fn solve_fix_a() {
        let model = fix_a();
        let samples = fix_a_samples();
        let g = build_design(&model, 1, &samples).unwrap();
        let y = weighted_info(&samples, &[3.0, 7.0]).unwrap();
        let out = solve(&g, &y, DEFAULT_RANK_TOLERANCE).unwrap();
        assert_eq!(out.rank, 1);
        assert!(!out.rank_deficient);
        assert_abs_diff_eq!(out.coefficients[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.residual_norm, 7.0 * std::f64::consts::SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn solve_flags_rank_deficiency() {
        let model = fix_a();
        let samples = SampleSet::from_parts(vec![1], vec![0.5], 1, 0, 0).unwrap();
        let g = build_design(&model, 1, &samples).unwrap();
        let y = weighted_info(&samples, &[4.0]).unwrap();
        let out = solve(&g, &y, DEFAULT_RANK_TOLERANCE).unwrap();
        assert_eq!(out.rank, 0);
        assert!(out.rank_deficient);
        assert_eq!(out.coefficients[0], 0.0);
        assert_eq!(out.smallest_kept_singular_value, 0.0);
    }

    #[test]
    fn members_of_reconstruction_space_recover_exactly() {
        let model = FourierSobolevModel::new(1.0).unwrap();
        let k = 5;
        let d = SamplingDensity::new(&model, k).unwrap();
        let samples = draw_samples(&d, 60, 17, 0).unwrap();
        let g = build_design(&model, k, &samples).unwrap();
        // f = b_1: y is the first design column.
        let f_vals: Vec<f64> = samples
            .points()
            .iter()
            .map(|x| model.basis_eval(1, *x).unwrap())
            .collect();
        let y = weighted_info(&samples, &f_vals).unwrap();
        let out = solve(&g, &y, DEFAULT_RANK_TOLERANCE).unwrap();
        assert_eq!(out.rank, k);
        assert_abs_diff_eq!(out.coefficients[0], 1.0, epsilon = 1e-10);
        for j in 1..k {
            assert_abs_diff_eq!(out.coefficients[j], 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn pseudoinverse_identity_on_full_rank() {
        let model = FourierSobolevModel::new(1.0).unwrap();
        for (n, k, stream) in [(300usize, 7usize, 0u64), (800, 25, 1), (2000, 50, 2)] {
            let d = SamplingDensity::new(&model, k).unwrap();
            let samples = draw_samples(&d, n, 23, stream).unwrap();
            let g = build_design(&model, k, &samples).unwrap();
            let (pinv, rank) = pseudoinverse(&g, DEFAULT_RANK_TOLERANCE).unwrap();
            assert_eq!(rank, k);
            let eye = &pinv * &g;
            let err = (&eye - DMatrix::<f64>::identity(k, k)).norm();
            assert!(err <= 1e-8, "n={n} k={k}: ||G+ G - I|| = {err}");
        }
    }

    #[test]
    fn evaluate_reconstruction_values() {
        let model = fix_a();
        assert_abs_diff_eq!(
            evaluate_reconstruction(&model, &[3.0], 0).unwrap(),
            3.0,
            epsilon = 0.0
        );
        assert_abs_diff_eq!(
            evaluate_reconstruction(&model, &[3.0], 1).unwrap(),
            0.0,
            epsilon = 0.0
        );
        let fb = FourierSobolevModel::new(1.0).unwrap();
        assert_abs_diff_eq!(
            evaluate_reconstruction(&fb, &[0.0, 1.0, 0.0], 0.0).unwrap(),
            std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn perturbing_solution_does_not_reduce_residual() {
        let model = FourierSobolevModel::new(1.0).unwrap();
        let k = 4;
        let d = SamplingDensity::new(&model, k).unwrap();
        let samples = draw_samples(&d, 40, 5, 0).unwrap();
        let g = build_design(&model, k, &samples).unwrap();
        let f_vals: Vec<f64> = samples.points().iter().map(|x| (x * 7.0).sin()).collect();
        let y = weighted_info(&samples, &f_vals).unwrap();
        let out = solve(&g, &y, DEFAULT_RANK_TOLERANCE).unwrap();
        let base = out.residual_norm * out.residual_norm;
        for j in 0..k {
            for delta in [1e-3, -1e-3] {
                let mut c = out.coefficients.clone();
                c[j] += delta;
                let r = (&g * &c - &y).norm_squared();
                assert!(r >= base - 1e-12, "direction {j} delta {delta}: {r} < {base}");
            }
        }
    }
}
