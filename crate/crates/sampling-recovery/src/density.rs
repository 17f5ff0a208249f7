//! The sampling density `rho_k` and reproducible i.i.d. sample sets.
//!
//! `rho_k` is the half-and-half mixture of the normalized head leverage
//! function and the a^2-weighted tail function:
//!
//! ```text
//! rho_k(x) = 1/2 [ (1/k) sum_{j<k} b_{j+1}(x)^2
//!                + (1/ sum_{j>=k} a_j^2) sum_{j>=k} a_j^2 b_{j+1}(x)^2 ]
//! ```
//!
//! For finite-rank models with `k` at the rank the tail vanishes and the
//! density degenerates to the pure leverage part `(1/k) sum_{j<k} b_{j+1}^2`
//! with full weight (the tail matrix is identically zero there).

use crate::error::{Error, Result};
use crate::model::{Rank, SpectralModel};
use crate::rng::Stream;

/// The density `rho_k` attached to a model, with the tail sum cached.
pub struct SamplingDensity<'a, M: SpectralModel> {
    model: &'a M,
    k: usize,
    tail_k: f64,
}

impl<'a, M: SpectralModel> SamplingDensity<'a, M> {
    pub fn new(model: &'a M, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroTruncation);
        }
        if let Rank::Finite(m) = model.rank() {
            if k > m {
                return Err(Error::InvalidConfig(format!(
                    "k = {k} exceeds the model rank {m}"
                )));
            }
        }
        let tail_k = model.tail_sum(k);
        Ok(SamplingDensity { model, k, tail_k })
    }

    pub fn model(&self) -> &'a M {
        self.model
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Cached `sum_{j>=k} a_j^2`.
    pub fn tail_sum(&self) -> f64 {
        self.tail_k
    }

    /// `rho_k(x)`; zero exactly where all participating basis functions
    /// vanish.
    pub fn eval(&self, x: M::Point) -> Result<f64> {
        let head = self.model.head_leverage(self.k, x)? / self.k as f64;
        if self.tail_k > 0.0 {
            let tail = self.model.weighted_tail_at(self.k, x) / self.tail_k;
            Ok(0.5 * (head + tail))
        } else {
            Ok(head)
        }
    }
}

/// A realized set of i.i.d. sample points with their density values and the
/// seed pair that generated them.
#[derive(Clone, Debug)]
pub struct SampleSet<P> {
    points: Vec<P>,
    densities: Vec<f64>,
    k: usize,
    master_seed: u64,
    stream_id: u64,
    attempts: u64,
}

impl<P: Copy> SampleSet<P> {
    /// Assemble a sample set from externally chosen points (used for direct
    /// injection in tests and examples). Density values must be strictly
    /// positive.
    pub fn from_parts(
        points: Vec<P>,
        densities: Vec<f64>,
        k: usize,
        master_seed: u64,
        stream_id: u64,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidConfig("empty sample set".into()));
        }
        if points.len() != densities.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                got: densities.len(),
            });
        }
        if densities.iter().any(|d| d.is_nan() || *d <= 0.0) {
            return Err(Error::InvalidConfig(
                "sample densities must be strictly positive".into(),
            ));
        }
        Ok(SampleSet {
            attempts: points.len() as u64,
            points,
            densities,
            k,
            master_seed,
            stream_id,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Proposals consumed while drawing; equals `len` for exact samplers.
    pub fn attempts(&self) -> u64 {
        self.attempts
    }

    /// Fraction of proposals accepted.
    pub fn acceptance_rate(&self) -> f64 {
        self.points.len() as f64 / self.attempts as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = (P, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.densities.iter().copied())
    }
}

/// Draw `n` i.i.d. points from `rho_k dmu` on the stream
/// `(master_seed, stream_id)`. Same pair, same set, bit for bit.
pub fn draw_samples<M: SpectralModel>(
    density: &SamplingDensity<'_, M>,
    n: usize,
    master_seed: u64,
    stream_id: u64,
) -> Result<SampleSet<M::Point>> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample count must be positive".into()));
    }
    let mut stream = Stream::new(master_seed, stream_id);
    let mut drawn = Vec::with_capacity(n);
    let attempts = density
        .model()
        .draw_points(density, n, &mut stream, &mut drawn)?;
    let (points, densities): (Vec<_>, Vec<_>) = drawn.into_iter().unzip();
    debug_assert!(densities.iter().all(|d| *d > 0.0));
    Ok(SampleSet {
        points,
        densities,
        k: density.k(),
        master_seed,
        stream_id,
        attempts,
    })
}

/// `(1/n) sum_i 1/rho(x_i)`; its expectation is the total measure of the
/// domain, which makes it a cheap sanity check that the weights belong to
/// the density that drew the points.
pub fn importance_diagnostic<P: Copy>(samples: &SampleSet<P>) -> f64 {
    assert!(!samples.is_empty(), "diagnostic needs a nonempty sample set");
    let n = samples.len() as f64;
    samples.densities().iter().map(|d| 1.0 / d).sum::<f64>() / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DiscreteDiagonalModel, FourierSobolevModel};
    use approx::assert_abs_diff_eq;

    fn fix_a() -> DiscreteDiagonalModel {
        DiscreteDiagonalModel::new(vec![1.0, 0.5]).unwrap()
    }

    fn fix_b() -> FourierSobolevModel {
        FourierSobolevModel::new(1.0).unwrap()
    }

    #[test]
    fn fix_a_density_is_uniform() {
        let model = fix_a();
        let d = SamplingDensity::new(&model, 1).unwrap();
        assert_abs_diff_eq!(d.eval(0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eval(1).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn k_zero_rejected() {
        let model = fix_a();
        assert!(matches!(
            SamplingDensity::new(&model, 0),
            Err(Error::ZeroTruncation)
        ));
        assert!(SamplingDensity::new(&model, 3).is_err());
    }

    #[test]
    fn discrete_normalization_is_exact() {
        let model = DiscreteDiagonalModel::new(vec![1.0, 0.7, 0.7, 0.2, 0.0]).unwrap();
        for k in 1..=5 {
            let d = SamplingDensity::new(&model, k).unwrap();
            let total: f64 = (0..5).map(|x| d.eval(x).unwrap()).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn degenerate_tail_uses_pure_leverage() {
        let model = fix_a();
        let d = SamplingDensity::new(&model, 2).unwrap();
        assert_eq!(d.tail_sum(), 0.0);
        assert_abs_diff_eq!(d.eval(0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.eval(1).unwrap(), 0.5, epsilon = 1e-15);
        let total: f64 = (0..2).map(|x| d.eval(x).unwrap()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fourier_normalization_by_quadrature() {
        let model = fix_b();
        let nodes = 8192;
        for k in [1usize, 2, 4, 8, 16, 32] {
            let d = SamplingDensity::new(&model, k).unwrap();
            let mut acc = 0.0;
            for t in 0..nodes {
                let x = (t as f64 + 0.5) / nodes as f64;
                acc += d.eval(x).unwrap();
            }
            acc /= nodes as f64;
            assert_abs_diff_eq!(acc, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn fourier_density_below_envelope() {
        let model = fix_b();
        let d = SamplingDensity::new(&model, 2).unwrap();
        for t in 0..2000 {
            let x = t as f64 / 2000.0;
            let rho = d.eval(x).unwrap();
            assert!(rho <= 2.0 + 1e-12, "rho({x}) = {rho} breaks the envelope");
            assert!(rho >= 0.0);
        }
    }

    #[test]
    fn draw_is_deterministic() {
        let model = fix_b();
        let d = SamplingDensity::new(&model, 4).unwrap();
        let a = draw_samples(&d, 200, 99, 5).unwrap();
        let b = draw_samples(&d, 200, 99, 5).unwrap();
        assert_eq!(a.points(), b.points());
        assert_eq!(a.densities(), b.densities());
        assert_eq!(a.attempts(), b.attempts());
        let c = draw_samples(&d, 200, 99, 6).unwrap();
        assert_ne!(a.points(), c.points());
    }

    #[test]
    fn discrete_draw_frequencies() {
        let model = fix_a();
        let d = SamplingDensity::new(&model, 1).unwrap();
        let n = 10_000;
        let set = draw_samples(&d, n, 7, 0).unwrap();
        let zeros = set.points().iter().filter(|p| **p == 0).count() as f64;
        let freq = zeros / n as f64;
        // 99.99% binomial interval around p = 1/2.
        assert!((0.48..=0.52).contains(&freq), "freq {freq}");
        assert_eq!(set.attempts(), n as u64);
    }

    #[test]
    fn discrete_chi_square_against_exact_probabilities() {
        let model = DiscreteDiagonalModel::new(vec![1.0, 0.8, 0.5, 0.25, 0.1]).unwrap();
        let k = 2;
        let d = SamplingDensity::new(&model, k).unwrap();
        let n = 100_000usize;
        let set = draw_samples(&d, n, 2024, 0).unwrap();
        let mut counts = [0usize; 5];
        for p in set.points() {
            counts[*p] += 1;
        }
        let mut chi2 = 0.0;
        for (x, &count) in counts.iter().enumerate() {
            let e = n as f64 * d.eval(x).unwrap();
            if e > 0.0 {
                let diff = count as f64 - e;
                chi2 += diff * diff / e;
            } else {
                assert_eq!(count, 0);
            }
        }
        // 99.9% quantile of chi-square with 4 degrees of freedom.
        assert!(chi2 < 18.467, "chi2 = {chi2}");
    }

    #[test]
    fn fourier_rejection_acceptance_rate() {
        let model = fix_b();
        let d = SamplingDensity::new(&model, 2).unwrap();
        let set = draw_samples(&d, 10_000, 11, 0).unwrap();
        // Theoretical acceptance is 1/2 under the envelope M = 2.
        assert!(set.acceptance_rate() >= 0.45, "{}", set.acceptance_rate());
        for (x, rho) in set.iter() {
            assert!((0.0..1.0).contains(&x));
            assert!(rho > 0.0);
        }
    }

    #[test]
    fn importance_diagnostic_recovers_measure() {
        let model = fix_a();
        let d = SamplingDensity::new(&model, 1).unwrap();
        let set = draw_samples(&d, 10_000, 5, 0).unwrap();
        assert_abs_diff_eq!(importance_diagnostic(&set), 2.0, epsilon = 0.05);

        let fb = fix_b();
        let db = SamplingDensity::new(&fb, 2).unwrap();
        let sb = draw_samples(&db, 10_000, 5, 0).unwrap();
        assert_abs_diff_eq!(importance_diagnostic(&sb), 1.0, epsilon = 0.1);

        let single = SampleSet::from_parts(vec![0usize], vec![0.5], 1, 0, 0).unwrap();
        assert_abs_diff_eq!(importance_diagnostic(&single), 2.0, epsilon = 0.0);
    }

    #[test]
    fn leverage_bounds_on_samples() {
        // rho_k(x) >= head/(2k) and rho_k(x) >= tail_fn/(2 tail_sum) hold by
        // construction; checked here on drawn points for both models.
        let model = fix_b();
        for k in [2usize, 8] {
            let d = SamplingDensity::new(&model, k).unwrap();
            let set = draw_samples(&d, 2000, 31, 1).unwrap();
            for (x, rho) in set.iter() {
                let head = model.head_leverage(k, x).unwrap();
                assert!(head <= 2.0 * k as f64 * rho + 1e-9);
                let tail_fn = model.weighted_tail_at(k, x);
                assert!(tail_fn <= 2.0 * d.tail_sum() * rho + 1e-9);
            }
        }
    }
}
