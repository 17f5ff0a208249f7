//! Finite-rank model on `m` atoms with counting measure.
//!
//! The basis is `b_j = indicator(atom j-1)`, so every L2 and H quantity is a
//! finite sum and the model doubles as an exact oracle for the rest of the
//! crate.

use crate::density::SamplingDensity;
use crate::error::{Error, Result};
use crate::model::{Rank, SpectralModel};
use crate::rng::Stream;

#[derive(Clone, Debug)]
pub struct DiscreteDiagonalModel {
    a: Vec<f64>,
}

impl DiscreteDiagonalModel {
    /// `a` lists the approximation numbers `a_0 ..= a_{m-1}`; they must be
    /// finite, nonnegative and non-increasing.
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidModel("need at least one atom".into()));
        }
        if a.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidModel(
                "approximation numbers must be finite and nonnegative".into(),
            ));
        }
        if a.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidModel(
                "approximation numbers must be non-increasing".into(),
            ));
        }
        Ok(DiscreteDiagonalModel { a })
    }

    pub fn atom_count(&self) -> usize {
        self.a.len()
    }

    pub fn approx_numbers(&self) -> &[f64] {
        &self.a
    }
}

impl SpectralModel for DiscreteDiagonalModel {
    type Point = usize;

    fn rank(&self) -> Rank {
        Rank::Finite(self.a.len())
    }

    fn measure_total(&self) -> f64 {
        self.a.len() as f64
    }

    fn contains(&self, x: usize) -> bool {
        x < self.a.len()
    }

    fn basis_eval(&self, j: usize, x: usize) -> Result<f64> {
        let m = self.a.len();
        if j == 0 || j > m {
            return Err(Error::IndexOutOfRange { j, rank: m });
        }
        if !self.contains(x) {
            return Err(Error::PointOutsideDomain {
                point: x.to_string(),
            });
        }
        Ok(if x == j - 1 { 1.0 } else { 0.0 })
    }

    fn approx_number(&self, j: usize) -> f64 {
        self.a.get(j).copied().unwrap_or(0.0)
    }

    fn tail_sum(&self, k: usize) -> f64 {
        if k >= self.a.len() {
            return 0.0;
        }
        self.a[k..].iter().map(|v| v * v).sum()
    }

    fn pointwise_tail_bound(&self, j_from: usize, x: usize) -> f64 {
        // Exact: the tail sum at an atom collapses to a single term.
        self.weighted_tail_at(j_from, x)
    }

    fn weighted_tail_at(&self, k: usize, x: usize) -> f64 {
        if x >= k && x < self.a.len() {
            self.a[x] * self.a[x]
        } else {
            0.0
        }
    }

    fn head_leverage(&self, k: usize, x: usize) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::PointOutsideDomain {
                point: x.to_string(),
            });
        }
        Ok(if x < k.min(self.a.len()) { 1.0 } else { 0.0 })
    }

    fn draw_points(
        &self,
        density: &SamplingDensity<'_, Self>,
        n: usize,
        stream: &mut Stream,
        out: &mut Vec<(usize, f64)>,
    ) -> Result<u64> {
        // Exact inverse CDF over the atoms; under counting measure the atom
        // probability equals the density value itself.
        let m = self.a.len();
        let probs: Vec<f64> = (0..m)
            .map(|x| density.eval(x))
            .collect::<Result<Vec<f64>>>()?;
        let mut cdf = Vec::with_capacity(m);
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        let total = acc;
        if total <= 0.0 {
            return Err(Error::InvalidModel("density has zero total mass".into()));
        }
        for _ in 0..n {
            let u = stream.next_f64() * total;
            // First atom whose cumulative mass exceeds u; atoms with zero
            // probability never win because they do not advance the CDF.
            let mut idx = cdf.partition_point(|c| *c <= u);
            if idx >= m {
                idx = m - 1;
                while idx > 0 && probs[idx] == 0.0 {
                    idx -= 1;
                }
            }
            out.push((idx, probs[idx]));
        }
        Ok(n as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fix_a() -> DiscreteDiagonalModel {
        DiscreteDiagonalModel::new(vec![1.0, 0.5]).unwrap()
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(DiscreteDiagonalModel::new(vec![]).is_err());
        assert!(DiscreteDiagonalModel::new(vec![0.5, 1.0]).is_err());
        assert!(DiscreteDiagonalModel::new(vec![1.0, -0.1]).is_err());
        assert!(DiscreteDiagonalModel::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn basis_is_indicator() {
        let m = fix_a();
        assert_eq!(m.basis_eval(2, 1).unwrap(), 1.0);
        assert_eq!(m.basis_eval(2, 0).unwrap(), 0.0);
        assert_eq!(m.basis_eval(1, 0).unwrap(), 1.0);
        assert!(m.basis_eval(3, 0).is_err());
        assert!(m.basis_eval(0, 0).is_err());
        assert!(m.basis_eval(1, 2).is_err());
    }

    #[test]
    fn gram_matrix_is_identity() {
        let m = DiscreteDiagonalModel::new(vec![1.0, 0.8, 0.3]).unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                let dot: f64 = (0..3)
                    .map(|x| m.basis_eval(i, x).unwrap() * m.basis_eval(j, x).unwrap())
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(dot, expect);
            }
        }
    }

    #[test]
    fn approx_numbers_and_tails() {
        let m = fix_a();
        assert_eq!(m.approx_number(1), 0.5);
        assert_eq!(m.approx_number(7), 0.0);
        assert_eq!(m.tail_sum(0), 1.25);
        assert_eq!(m.tail_sum(1), 0.25);
        assert_eq!(m.tail_sum(2), 0.0);
        // tail_sum(k) - tail_sum(k+1) = a_k^2, exactly here.
        for k in 0..4 {
            let diff = m.tail_sum(k) - m.tail_sum(k + 1);
            let a = m.approx_number(k);
            assert_eq!(diff, a * a);
        }
    }

    #[test]
    fn pointwise_tail_is_exact() {
        let m = fix_a();
        assert_eq!(m.pointwise_tail_bound(1, 1), 0.25);
        assert_eq!(m.pointwise_tail_bound(2, 0), 0.0);
        assert_eq!(m.pointwise_tail_bound(2, 1), 0.0);
        assert_eq!(m.weighted_tail_at(0, 0), 1.0);
    }
}
