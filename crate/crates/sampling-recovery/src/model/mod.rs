//! Spectral description of the function space.
//!
//! A model bundles a measure space, an L2-orthonormal eigenbasis
//! `b_1, b_2, ...` and the non-increasing approximation numbers
//! `a_0, a_1, ...` with `a_j` attached to `b_{j+1}`. The norm of the smooth
//! space is `||f||_H^2 = sum_j |<f, b_{j+1}>|^2 / a_j^2`, so the unit ball is
//! the ellipsoid with semi-axes `a_j` in eigencoordinates. Everything else in
//! the crate (densities, design matrices, certificates, oracles) is written
//! against the [`SpectralModel`] trait.
//!
//! Two instances are bundled: [`DiscreteDiagonalModel`] (finitely many atoms,
//! counting measure, everything exactly computable) and
//! [`FourierSobolevModel`] (trigonometric basis on `[0, 1)`, power-law decay
//! `a_j = (j+1)^{-s}`).

mod discrete;
mod fourier;

pub use discrete::DiscreteDiagonalModel;
pub use fourier::FourierSobolevModel;

use crate::density::SamplingDensity;
use crate::error::Result;
use crate::rng::Stream;

/// Rank of the embedding: the number of nonzero approximation numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl Rank {
    pub fn is_finite(self) -> bool {
        matches!(self, Rank::Finite(_))
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Rank::Finite(m) => Some(m),
            Rank::Infinite => None,
        }
    }
}

pub trait SpectralModel: Send + Sync {
    /// A point of the domain: an atom index for discrete models, a real in
    /// `[0, 1)` for the torus.
    type Point: Copy + PartialEq + Send + Sync + std::fmt::Debug + std::fmt::Display;

    fn rank(&self) -> Rank;

    /// Total mass of the reference measure.
    fn measure_total(&self) -> f64;

    /// Whether both bundled models are real-valued; complex models would
    /// widen the scalar type but keep every formula below (the densities and
    /// norms already use squared moduli).
    fn is_complex(&self) -> bool {
        false
    }

    fn contains(&self, x: Self::Point) -> bool;

    /// `b_j(x)` for `j >= 1`.
    fn basis_eval(&self, j: usize, x: Self::Point) -> Result<f64>;

    /// `a_j` for `j >= 0`; zero for `j` at or beyond a finite rank.
    fn approx_number(&self, j: usize) -> f64;

    /// `sum_{j >= k} a_j^2` to 1e-12 absolute accuracy.
    fn tail_sum(&self, k: usize) -> f64;

    /// Rigorous upper bound on `sum_{j >= j_from} a_j^2 b_{j+1}(x)^2`.
    fn pointwise_tail_bound(&self, j_from: usize, x: Self::Point) -> f64;

    /// `sum_{j >= k} a_j^2 b_{j+1}(x)^2`, evaluated to (near) full precision.
    fn weighted_tail_at(&self, k: usize, x: Self::Point) -> f64;

    /// Fill `out[j-1] = b_j(x)` for `j = 1..=out.len()`.
    fn basis_row(&self, x: Self::Point, out: &mut [f64]) -> Result<()> {
        for (idx, slot) in out.iter_mut().enumerate() {
            *slot = self.basis_eval(idx + 1, x)?;
        }
        Ok(())
    }

    /// Head leverage `sum_{j < k} b_{j+1}(x)^2 = sum_{i=1..=k} b_i(x)^2`.
    fn head_leverage(&self, k: usize, x: Self::Point) -> Result<f64> {
        let mut acc = 0.0;
        for i in 1..=k {
            let b = self.basis_eval(i, x)?;
            acc += b * b;
        }
        Ok(acc)
    }

    /// Draw `n` i.i.d. points from `rho_k dmu`, pushing `(point, density)`
    /// pairs onto `out`. Returns the number of proposals consumed (equal to
    /// `n` for exact samplers, larger for rejection samplers).
    fn draw_points(
        &self,
        density: &SamplingDensity<'_, Self>,
        n: usize,
        stream: &mut Stream,
        out: &mut Vec<(Self::Point, f64)>,
    ) -> Result<u64>
    where
        Self: Sized;
}
