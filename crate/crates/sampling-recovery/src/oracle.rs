//! Ground-truth errors for realized algorithm instances.
//!
//! In eigencoordinates a function is its coefficient vector, the unit ball
//! of the smooth space is the ellipsoid with semi-axes `a_0, a_1, ...`, and
//! the reconstruction is a linear map on coefficients. The worst-case
//! recovery error over the ball is therefore the spectral norm of
//! `(I - P T) diag(a)`, where `T` maps input coefficients to recovered ones
//! and `P` pads them with zeros beyond `k`. For finite-rank models with the
//! truncation at the full rank this is exact; otherwise it is the natural
//! truncated estimate (mass beyond the truncation is ignored) and flagged
//! as such. Certificates must dominate these values.

use nalgebra::DMatrix;

use crate::density::SampleSet;
use crate::error::{Error, Result};
use crate::model::{Rank, SpectralModel};
use crate::recovery::{build_design, pseudoinverse, RecoveryOutput};

/// A function given by its L2-basis coefficients `c_1, c_2, ...`
/// (so `f = sum_j c_j b_j`).
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientFunction {
    coeffs: Vec<f64>,
}

impl CoefficientFunction {
    pub fn new(coeffs: Vec<f64>) -> Self {
        CoefficientFunction { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval<M: SpectralModel>(&self, model: &M, x: M::Point) -> Result<f64> {
        crate::recovery::evaluate_reconstruction(model, &self.coeffs, x)
    }

    /// Values at every sample point, in order.
    pub fn values_at<M: SpectralModel>(
        &self,
        model: &M,
        samples: &SampleSet<M::Point>,
    ) -> Result<Vec<f64>> {
        samples
            .points()
            .iter()
            .map(|x| self.eval(model, *x))
            .collect()
    }
}

/// `||f||_H = sqrt( sum_j |c_j|^2 / a_{j-1}^2 )`; errors when a coefficient
/// sits on a vanished approximation number.
pub fn h_norm<M: SpectralModel>(model: &M, f: &CoefficientFunction) -> Result<f64> {
    let mut acc = 0.0;
    for (t, &c) in f.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let a = model.approx_number(t);
        if a == 0.0 {
            return Err(Error::CoefficientOnNullDirection { index: t });
        }
        acc += (c / a) * (c / a);
    }
    Ok(acc.sqrt())
}

/// L2 distance between `f` and the recovered element of the reconstruction
/// space; by orthonormality of the basis this is the Euclidean distance of
/// the coefficient vectors (recovered coefficients padded with zeros).
pub fn l2_error(f: &CoefficientFunction, recovered: &RecoveryOutput) -> f64 {
    let rec = &recovered.coefficients;
    let len = f.coeffs().len().max(rec.len());
    let mut acc = 0.0;
    for t in 0..len {
        let cf = f.coeffs().get(t).copied().unwrap_or(0.0);
        let cr = if t < rec.len() { rec[t] } else { 0.0 };
        acc += (cf - cr) * (cf - cr);
    }
    acc.sqrt()
}

/// Worst-case recovery error of the realized instance.
#[derive(Clone, Copy, Debug)]
pub struct WorstCase {
    pub value: f64,
    /// True when the spectrum is finite and fully covered by the truncation,
    /// making the value exact rather than a truncated estimate.
    pub exact: bool,
}

/// Spectral-norm evaluation of the worst-case error over the unit ball.
///
/// Returns an infinity marker when the design is rank-deficient: some
/// direction of the reconstruction space is invisible to the samples and
/// the minimum-norm solution gives no uniform guarantee.
pub fn worstcase_error<M: SpectralModel>(
    model: &M,
    samples: &SampleSet<M::Point>,
    k: usize,
    j_trunc: usize,
    rank_tolerance: f64,
) -> Result<WorstCase> {
    if j_trunc < k {
        return Err(Error::TailTruncationTooSmall { j: j_trunc, k });
    }
    let (j_eff, exact_possible) = match model.rank() {
        Rank::Finite(m) => (j_trunc.min(m), j_trunc >= m),
        Rank::Infinite => (j_trunc, false),
    };
    if j_eff < k {
        return Err(Error::InvalidConfig(format!(
            "truncation {j_eff} does not cover the reconstruction space k = {k}"
        )));
    }
    let g = build_design(model, k, samples)?;
    let (pinv, rank) = pseudoinverse(&g, rank_tolerance)?;
    if rank < k {
        return Ok(WorstCase {
            value: f64::INFINITY,
            exact: false,
        });
    }
    // Full weighted design on b_1..b_{j_eff}; its first k columns are G.
    let b = build_design(model, j_eff, samples)?;
    let t = &pinv * &b;
    let mut map = DMatrix::<f64>::identity(j_eff, j_eff);
    for row in 0..k {
        for col in 0..j_eff {
            map[(row, col)] -= t[(row, col)];
        }
    }
    for col in 0..j_eff {
        let a = model.approx_number(col);
        map.column_mut(col).scale_mut(a);
    }
    let wc = map
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    Ok(WorstCase {
        value: wc,
        exact: exact_possible,
    })
}
