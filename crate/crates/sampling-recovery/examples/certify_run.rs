//! Error certificates for realized sample sets.
//!
//! The certificate a_k^2 + s_max(Gamma)^2 / s_min(G)^2 upper-bounds the
//! squared worst-case recovery error over the unit ball. The tail matrix is
//! truncated at J columns and the dropped block is covered by a Frobenius
//! correction, so the bound stays rigorous. On finite-rank models the exact
//! worst case is computable and the certificate must dominate it.
//!
//! ```bash
//! cargo run --release -p sampling-recovery --example certify_run
//! ```

use sampling_recovery::certificates::{basic_certificate, extreme_singular_values};
use sampling_recovery::density::{draw_samples, SamplingDensity};
use sampling_recovery::model::{DiscreteDiagonalModel, FourierSobolevModel, SpectralModel};
use sampling_recovery::oracle::worstcase_error;
use sampling_recovery::recovery::{build_matrices, DEFAULT_RANK_TOLERANCE};

fn certify<M: SpectralModel>(model: &M, k: usize, j: usize, n: usize, label: &str) {
    let density = SamplingDensity::new(model, k).unwrap();
    let samples = draw_samples(&density, n, 99, 0).unwrap();
    let dm = build_matrices(model, k, j, &samples).unwrap();

    let (smin_g, _) = extreme_singular_values(&dm.g).unwrap();
    let (_, smax_gamma) = extreme_singular_values(&dm.gamma_j).unwrap();
    let corrected = smax_gamma + dm.tail_correction;
    let a_k = model.approx_number(k);
    let cert = basic_certificate(a_k, smin_g * smin_g, corrected);

    println!("{label}: n = {n}, k = {k}, J = {j}");
    println!("  smin(G)^2        = {:.4} (n/2 = {})", smin_g * smin_g, n / 2);
    println!("  smax(Gamma_J)    = {:.6}", smax_gamma);
    println!("  tail correction  = {:.6}", dm.tail_correction);
    println!("  a_k              = {:.6}", a_k);
    println!("  certificate      = {:.6} (bounds e(A)^2)", cert);

    let wc = worstcase_error(model, &samples, k, j, DEFAULT_RANK_TOLERANCE).unwrap();
    let tag = if wc.exact { "exact" } else { "truncated estimate" };
    println!("  worst-case^2     = {:.6} ({tag})", wc.value * wc.value);
    assert!(cert >= wc.value * wc.value - 1e-9);
}

fn main() {
    // Finite rank: J covers the whole spectrum, the correction vanishes and
    // the worst case is exact.
    let discrete =
        DiscreteDiagonalModel::new(vec![1.0, 0.75, 0.5, 0.3, 0.2, 0.12, 0.07, 0.04]).unwrap();
    certify(&discrete, 3, 8, 120, "discrete (exact oracle)");

    println!();

    // Infinite rank: the worst case is a truncated estimate, the
    // certificate stays a rigorous upper bound thanks to the correction.
    let fourier = FourierSobolevModel::new(1.0).unwrap();
    certify(&fourier, 8, 300, 2_000, "fourier (truncated oracle)");
}
