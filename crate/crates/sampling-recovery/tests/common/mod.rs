//! Shared fixtures for the integration suites.

#![allow(dead_code)]

use sampling_recovery::density::SamplingDensity;
use sampling_recovery::error::{Error, Result};
use sampling_recovery::model::{Rank, SpectralModel};
use sampling_recovery::rng::Stream;

/// Geometric-decay fixture `a_j = 2^{-j}` on countably many atoms with
/// counting measure. The indicator basis keeps every tail quantity in
/// closed form, which makes it a convenient third spectrum for the
/// beta-scale tests; the basis itself never matters there.
pub struct GeometricModel;

impl GeometricModel {
    fn tail_closed_form(k: usize) -> f64 {
        // sum_{j >= k} 4^{-j} = (4/3) 4^{-k}
        (4.0 / 3.0) * 0.25f64.powi(k as i32)
    }
}

impl SpectralModel for GeometricModel {
    type Point = usize;

    fn rank(&self) -> Rank {
        Rank::Infinite
    }

    fn measure_total(&self) -> f64 {
        f64::INFINITY
    }

    fn contains(&self, _x: usize) -> bool {
        true
    }

    fn basis_eval(&self, j: usize, x: usize) -> Result<f64> {
        if j == 0 {
            return Err(Error::IndexTooSmall { min: 1, got: 0 });
        }
        Ok(if x == j - 1 { 1.0 } else { 0.0 })
    }

    fn approx_number(&self, j: usize) -> f64 {
        0.5f64.powi(j as i32)
    }

    fn tail_sum(&self, k: usize) -> f64 {
        Self::tail_closed_form(k)
    }

    fn pointwise_tail_bound(&self, j_from: usize, x: usize) -> f64 {
        self.weighted_tail_at(j_from, x)
    }

    fn weighted_tail_at(&self, k: usize, x: usize) -> f64 {
        if x >= k {
            let a = self.approx_number(x);
            a * a
        } else {
            0.0
        }
    }

    fn head_leverage(&self, k: usize, x: usize) -> Result<f64> {
        Ok(if x < k { 1.0 } else { 0.0 })
    }

    fn draw_points(
        &self,
        density: &SamplingDensity<'_, Self>,
        n: usize,
        stream: &mut Stream,
        out: &mut Vec<(usize, f64)>,
    ) -> Result<u64> {
        // Inverse CDF walk over the countable atoms.
        for _ in 0..n {
            let u = stream.next_f64();
            let mut acc = 0.0;
            let mut chosen = None;
            for x in 0..1_000_000usize {
                let p = density.eval(x)?;
                acc += p;
                if acc > u && p > 0.0 {
                    chosen = Some((x, p));
                    break;
                }
            }
            match chosen {
                Some(pair) => out.push(pair),
                None => return Err(Error::RejectionOverflow(1_000_000)),
            }
        }
        Ok(n as u64)
    }
}

/// `m` values in `[floor, 1]`, sorted non-increasing.
pub fn random_nonincreasing(stream: &mut Stream, m: usize, floor: f64) -> Vec<f64> {
    let mut a: Vec<f64> = (0..m)
        .map(|_| floor + (1.0 - floor) * stream.next_f64())
        .collect();
    a.sort_by(|x, y| y.partial_cmp(x).unwrap());
    a
}

/// Uniform direction on the unit sphere of the given dimension.
pub fn unit_sphere(stream: &mut Stream, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| stream.next_normal()).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
