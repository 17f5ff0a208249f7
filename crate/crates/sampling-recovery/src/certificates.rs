//! Closed-form certificate quantities and pass/fail evaluation.
//!
//! For a realized sample set the squared worst-case recovery error is
//! bounded by the computable certificate
//!
//! ```text
//! cert = a_k^2 + s_max(Gamma)^2 / s_min(G)^2
//! ```
//!
//! where `s_max(Gamma)` is always taken as the truncated value plus the
//! Frobenius tail correction, so truncation never silently weakens the
//! bound. The module also evaluates the two spectral concentration events
//! ("claims") and the theorem-mode error bound, whose empirical frequencies
//! the harness compares against `1 - 4/n^c` and `1 - 8/n^c`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SpectralModel;

/// How the truncation index was chosen: by the theorem schedule
/// `k_n = 2 floor(n / (2^8 (2+c) ln n))` or fixed by the user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Theorem,
    Override,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Theorem => write!(f, "theorem"),
            Mode::Override => write!(f, "override"),
        }
    }
}

/// Theorem-mode truncation index `k_n = 2 floor(n / (256 (2+c) ln n))`.
///
/// Errors with [`Error::DegenerateK`] when the formula gives 0, naming the
/// smallest usable `n` for this `c`.
pub fn k_of_n(n: u64, c: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("n = {n} must be at least 2")));
    }
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidConfig(format!("c = {c} must be positive")));
    }
    let nf = n as f64;
    let k = 2 * (nf / (256.0 * (2.0 + c) * nf.ln())).floor() as usize;
    if k == 0 {
        return Err(Error::DegenerateK {
            n,
            c,
            min_n: minimal_theorem_n(c),
        });
    }
    Ok(k)
}

/// Smallest `n` with `k_of_n(n, c) >= 2`, found by monotone search
/// (`n / ln n` is increasing on the relevant range).
pub fn minimal_theorem_n(c: f64) -> u64 {
    let ok = |n: u64| (n as f64) / (256.0 * (2.0 + c) * (n as f64).ln()) >= 1.0;
    let mut hi = 4u64;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = 2u64;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `beta_k = ((1/k) sum_{j>=k} a_j^2)^{1/2}` for `k >= 1`.
pub fn beta<M: SpectralModel>(model: &M, k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::IndexTooSmall { min: 1, got: k });
    }
    Ok((model.tail_sum(k) / k as f64).sqrt())
}

/// `beta'_k = beta_{floor(k/2)}` for `k >= 2`.
pub fn beta_prime<M: SpectralModel>(model: &M, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::IndexTooSmall { min: 2, got: k });
    }
    beta(model, k / 2)
}

/// The concentration radius `g(n, R, c) = 4 R sqrt((2+c) ln n / n)` with its
/// two regime flags.
#[derive(Clone, Copy, Debug)]
pub struct OliveiraG {
    pub value: f64,
    /// `g <= 2`: the concentration proposition applies.
    pub proposition_applies: bool,
    /// `g <= 1/2`: the regime used by both claims.
    pub claim_regime: bool,
}

pub fn oliveira_g(n: u64, r: f64, c: f64) -> Result<OliveiraG> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("n = {n} must be at least 2")));
    }
    if r.is_nan() || r < 0.0 {
        return Err(Error::InvalidConfig(format!("R = {r} must be nonnegative")));
    }
    let nf = n as f64;
    let value = 4.0 * r * ((2.0 + c) * nf.ln() / nf).sqrt();
    Ok(OliveiraG {
        value,
        proposition_applies: value <= 2.0,
        claim_regime: value <= 0.5,
    })
}

/// Extreme eigenvalues `(min, max)` of a symmetric positive semidefinite
/// matrix, clamped at zero.
pub(crate) fn gram_extreme_eigenvalues(gram: &DMatrix<f64>) -> (f64, f64) {
    let eig = gram.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &l in eig.eigenvalues.iter() {
        lo = lo.min(l);
        hi = hi.max(l);
    }
    (lo.max(0.0), hi.max(0.0))
}

/// Smallest and largest singular values.
///
/// Small matrices go through the full SVD; for large, strongly rectangular
/// matrices the values are obtained from the extreme eigenvalues of the
/// Gram matrix on the short side, which is orders of magnitude cheaper and
/// agrees to working accuracy whenever s_min/s_max stays above ~1e-8 (unit
/// tested against the direct route).
pub fn extreme_singular_values(m: &DMatrix<f64>) -> Result<(f64, f64)> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Err(Error::EmptyMatrix);
    }
    let long = r.max(c);
    let short = r.min(c);
    if long > 1024 && long >= 4 * short {
        let gram = if r >= c { m.tr_mul(m) } else { m * m.transpose() };
        let (lo, hi) = gram_extreme_eigenvalues(&gram);
        return Ok((lo.sqrt(), hi.sqrt()));
    }
    let sv = m.clone().singular_values();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &s in sv.iter() {
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok((lo, hi))
}

/// `a_k^2 + s_max^2 / s_min^2`, the rigorous upper bound on the squared
/// worst-case error when `s_max` carries the tail correction. Infinite when
/// `s_min^2` vanishes (rank-deficient design).
pub fn basic_certificate(a_k: f64, smin_g_sq: f64, smax_gamma_corrected: f64) -> f64 {
    if smin_g_sq <= 0.0 {
        return f64::INFINITY;
    }
    a_k * a_k + smax_gamma_corrected * smax_gamma_corrected / smin_g_sq
}

/// The two concentration events for a realized sample set:
/// claim 1 is `s_max(Gamma)^2 <= n * 3 beta'_k^2 / 2`,
/// claim 2 is `s_min(G)^2 >= n / 2`.
pub fn check_claims<M: SpectralModel>(
    n: u64,
    k: usize,
    model: &M,
    smin_g_sq: f64,
    smax_gamma_corrected: f64,
) -> Result<(bool, bool)> {
    let bp = beta_prime(model, k)?;
    let claim1 = smax_gamma_corrected * smax_gamma_corrected <= n as f64 * 1.5 * bp * bp;
    let claim2 = smin_g_sq >= n as f64 / 2.0;
    Ok((claim1, claim2))
}

/// Theorem-mode right-hand side `(4/k_n) sum_{j >= k_n/2} a_j^2`,
/// defined for even `k_n >= 2` (the schedule only produces even values).
pub fn theorem_rhs<M: SpectralModel>(model: &M, k_n: usize) -> Result<f64> {
    if k_n < 2 || !k_n.is_multiple_of(2) {
        return Err(Error::InvalidTheoremIndex(k_n));
    }
    Ok(4.0 / k_n as f64 * model.tail_sum(k_n / 2))
}

/// Everything the analysis says about one realized sample set.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub mode: Mode,
    pub n: u64,
    pub k: usize,
    pub c: f64,
    pub a_k: f64,
    pub beta_k: f64,
    /// `beta'_k`; undefined below k = 2.
    pub beta_prime: Option<f64>,
    pub smin_g_sq: f64,
    /// Largest singular value of the truncated tail matrix.
    pub smax_gamma_trunc: f64,
    pub tail_correction: f64,
    /// Truncated value plus correction; this is what enters the certificate.
    pub smax_gamma: f64,
    pub cert_eq2: f64,
    pub claim1_pass: Option<bool>,
    pub claim2_pass: Option<bool>,
    pub theorem_rhs: Option<f64>,
    /// Concentration radius at `R = sqrt(2k)`.
    pub g_value: f64,
    /// Whether the concentration proposition applies (`g <= 2`).
    pub g_ok: bool,
}

/// Assemble the full certificate for a realized trial.
#[allow(clippy::too_many_arguments)]
pub fn certificate<M: SpectralModel>(
    model: &M,
    mode: Mode,
    n: u64,
    k: usize,
    c: f64,
    smin_g_sq: f64,
    smax_gamma_trunc: f64,
    tail_correction: f64,
) -> Result<Certificate> {
    if k < 1 {
        return Err(Error::IndexTooSmall { min: 1, got: k });
    }
    let a_k = model.approx_number(k);
    let beta_k = beta(model, k)?;
    let bp = if k >= 2 {
        Some(beta_prime(model, k)?)
    } else {
        None
    };
    let smax_gamma = smax_gamma_trunc + tail_correction;
    let cert_eq2 = basic_certificate(a_k, smin_g_sq, smax_gamma);
    let (claim1_pass, claim2_pass) = if k >= 2 {
        let (c1, c2) = check_claims(n, k, model, smin_g_sq, smax_gamma)?;
        (Some(c1), Some(c2))
    } else {
        (None, None)
    };
    let rhs = if k >= 2 && k.is_multiple_of(2) {
        Some(theorem_rhs(model, k)?)
    } else {
        None
    };
    let g = oliveira_g(n, (2.0 * k as f64).sqrt(), c)?;
    Ok(Certificate {
        mode,
        n,
        k,
        c,
        a_k,
        beta_k,
        beta_prime: bp,
        smin_g_sq,
        smax_gamma_trunc,
        tail_correction,
        smax_gamma,
        cert_eq2,
        claim1_pass,
        claim2_pass,
        theorem_rhs: rhs,
        g_value: g.value,
        g_ok: g.proposition_applies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiscreteDiagonalModel, FourierSobolevModel};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn fix_a() -> DiscreteDiagonalModel {
        DiscreteDiagonalModel::new(vec![1.0, 0.5]).unwrap()
    }

    #[test]
    fn k_of_n_reference_values() {
        assert_eq!(k_of_n(10_000, 1.0).unwrap(), 2);
        assert_eq!(k_of_n(100_000, 1.0).unwrap(), 22);
        assert_eq!(k_of_n(1_000_000, 1.0).unwrap(), 188);
        assert!(matches!(k_of_n(2, 1.0), Err(Error::DegenerateK { .. })));
    }

    #[test]
    fn minimal_theorem_n_is_tight() {
        for c in [0.5, 1.0, 2.0] {
            let min_n = minimal_theorem_n(c);
            assert!(k_of_n(min_n, c).is_ok());
            assert!(k_of_n(min_n - 1, c).is_err());
        }
    }

    #[test]
    fn beta_reference_values() {
        let a = fix_a();
        assert_abs_diff_eq!(beta(&a, 1).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(beta(&a, 2).unwrap(), 0.0);
        assert!(beta(&a, 0).is_err());
        assert!(beta_prime(&a, 1).is_err());
        assert_abs_diff_eq!(beta_prime(&a, 2).unwrap(), 0.5, epsilon = 1e-15);

        let b = FourierSobolevModel::new(1.0).unwrap();
        let basel = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        assert_abs_diff_eq!(beta(&b, 1).unwrap(), (basel - 1.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn oliveira_reference_values() {
        let g = oliveira_g(10_000, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(g.value, 0.42053, epsilon = 1e-4);
        assert!(g.proposition_applies);
        assert!(g.claim_regime);
        assert_eq!(oliveira_g(10_000, 0.0, 1.0).unwrap().value, 0.0);
        let regime = oliveira_g(100_000, 44.0f64.sqrt(), 1.0).unwrap();
        assert!(regime.value <= 0.5);
        assert!(regime.claim_regime);
    }

    #[test]
    fn claim_regime_forces_small_g() {
        // k <= n / (128 (2+c) ln n) implies g(n, sqrt(2k), c) <= 1/2.
        for c in [0.5, 1.0, 2.0] {
            for exp in 3..=7 {
                let n = 10u64.pow(exp);
                let bound = n as f64 / (128.0 * (2.0 + c) * (n as f64).ln());
                let k = bound.floor() as u64;
                if k < 1 {
                    continue;
                }
                let g = oliveira_g(n, (2.0 * k as f64).sqrt(), c).unwrap();
                assert!(g.value <= 0.5, "n={n} c={c} k={k}: g={}", g.value);
            }
        }
    }

    #[test]
    fn schedule_stays_in_claim_regime() {
        for c in [0.5, 1.0, 2.0] {
            for exp in 3..=7 {
                let n = 10u64.pow(exp);
                if let Ok(k) = k_of_n(n, c) {
                    let bound = n as f64 / (128.0 * (2.0 + c) * (n as f64).ln());
                    assert!(k as f64 <= bound);
                }
            }
        }
    }

    #[test]
    fn extreme_singular_values_reference() {
        let r2 = std::f64::consts::SQRT_2;
        let g = DMatrix::from_column_slice(2, 1, &[r2, 0.0]);
        let (lo, hi) = extreme_singular_values(&g).unwrap();
        assert_abs_diff_eq!(lo, r2, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, r2, epsilon = 1e-12);

        let eye = DMatrix::<f64>::identity(3, 3);
        assert_eq!(extreme_singular_values(&eye).unwrap(), (1.0, 1.0));

        let gamma = DMatrix::from_column_slice(2, 1, &[0.0, 1.0 / r2]);
        let (lo, hi) = extreme_singular_values(&gamma).unwrap();
        assert_abs_diff_eq!(lo, 1.0 / r2, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 1.0 / r2, epsilon = 1e-12);

        assert!(extreme_singular_values(&DMatrix::<f64>::zeros(0, 0)).is_err());
    }

    #[test]
    fn gram_route_matches_direct_svd() {
        let mut stream = crate::rng::Stream::new(8, 0);
        let n = 4200;
        let k = 37;
        let m = DMatrix::from_fn(n, k, |_, _| stream.next_normal());
        // Forced through the gram route by shape (4200 > 1024, 4200 >= 4*37).
        let (lo_g, hi_g) = extreme_singular_values(&m).unwrap();
        let sv = m.clone().singular_values();
        let lo_d = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi_d = sv.iter().cloned().fold(0.0, f64::max);
        assert_abs_diff_eq!(lo_g, lo_d, epsilon = 1e-8 * hi_d);
        assert_abs_diff_eq!(hi_g, hi_d, epsilon = 1e-8 * hi_d);
    }

    #[test]
    fn basic_certificate_values() {
        assert_abs_diff_eq!(basic_certificate(0.5, 2.0, 0.5f64.sqrt()), 0.5, epsilon = 1e-15);
        assert_eq!(basic_certificate(0.5, 2.0, 0.0), 0.25);
        // Doubling s_max quadruples the second term.
        let one = basic_certificate(0.0, 3.0, 1.0);
        let two = basic_certificate(0.0, 3.0, 2.0);
        assert_abs_diff_eq!(two, 4.0 * one, epsilon = 1e-15);
        assert!(basic_certificate(0.5, 0.0, 1.0).is_infinite());
    }

    #[test]
    fn claim_thresholds() {
        let a = fix_a();
        let (_, c2) = check_claims(2, 2, &a, 2.0, 0.0).unwrap();
        assert!(c2);
        let (_, c2) = check_claims(2, 2, &a, 0.0, 0.0).unwrap();
        assert!(!c2);
        // Threshold n * 3 beta'^2 / 2 = 0.75 here.
        let (c1, _) = check_claims(2, 2, &a, 2.0, 0.0).unwrap();
        assert!(c1);
        let (c1, _) = check_claims(2, 2, &a, 2.0, 0.8660255).unwrap();
        assert!(!c1);
        assert!(check_claims(2, 1, &a, 1.0, 0.0).is_err());
    }

    #[test]
    fn theorem_rhs_values() {
        let a = fix_a();
        assert_abs_diff_eq!(theorem_rhs(&a, 2).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(theorem_rhs(&a, 4).unwrap(), 0.0);
        assert!(theorem_rhs(&a, 3).is_err());
        assert!(theorem_rhs(&a, 0).is_err());

        let b = FourierSobolevModel::new(1.0).unwrap();
        let basel = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        assert_abs_diff_eq!(
            theorem_rhs(&b, 2).unwrap(),
            2.0 * (basel - 1.0),
            epsilon = 1e-12
        );
        // (4/k) tail(k/2) = 2 beta_{k/2}^2.
        for k in [2usize, 6, 20, 88] {
            let lhs = theorem_rhs(&b, k).unwrap();
            let be = beta(&b, k / 2).unwrap();
            assert_abs_diff_eq!(lhs, 2.0 * be * be, epsilon = 1e-12);
        }
    }

    #[test]
    fn certificate_assembly() {
        let a = fix_a();
        let cert = certificate(&a, Mode::Override, 2, 1, 1.0, 2.0, 0.5f64.sqrt(), 0.0).unwrap();
        assert_abs_diff_eq!(cert.cert_eq2, 0.5, epsilon = 1e-15);
        assert!(cert.cert_eq2 >= cert.a_k * cert.a_k);
        assert!(cert.claim1_pass.is_none());
        assert!(cert.theorem_rhs.is_none());
        // Desk-scale n = 2 sits outside the concentration regime.
        assert!(!cert.g_ok);
        assert!(cert.g_value > 2.0);

        let cert2 = certificate(&a, Mode::Override, 64, 2, 1.0, 40.0, 0.1, 0.0).unwrap();
        assert_eq!(cert2.claim2_pass, Some(true));
        assert!(cert2.theorem_rhs.is_some());
    }
}
