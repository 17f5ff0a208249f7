//! Tour of the two bundled spectral models: what the basis looks like, how
//! the approximation numbers decay, and the tail sums everything else is
//! built from.
//!
//! ```bash
//! cargo run --release -p sampling-recovery --example spectral_models
//! ```

use sampling_recovery::model::{DiscreteDiagonalModel, FourierSobolevModel, SpectralModel};

fn main() {
    // Two atoms, counting measure, a = (1, 1/2). The basis functions are
    // atom indicators, so every norm is a finite sum.
    let discrete = DiscreteDiagonalModel::new(vec![1.0, 0.5]).unwrap();
    println!("discrete model: m = {}", discrete.atom_count());
    for j in 1..=2 {
        for x in 0..2 {
            println!("  b_{j}({x}) = {}", discrete.basis_eval(j, x).unwrap());
        }
    }
    println!("  a = {:?}", discrete.approx_numbers());
    println!("  tail_sum(0) = {}", discrete.tail_sum(0));
    println!("  tail_sum(1) = {}", discrete.tail_sum(1));

    // Trigonometric basis on [0, 1) with a_j = (j+1)^{-1}. The constant
    // comes first, then cos/sin pairs per frequency; |b_j|^2 <= 2 always.
    let fourier = FourierSobolevModel::new(1.0).unwrap();
    println!("\nfourier model: s = {}", fourier.smoothness());
    let x = 0.25;
    for j in 1..=5 {
        println!("  b_{j}({x}) = {:+.6}", fourier.basis_eval(j, x).unwrap());
    }
    for j in [0usize, 1, 3, 9, 99] {
        println!("  a_{j} = {:.6}", fourier.approx_number(j));
    }

    // tail_sum(0) is the full squared l2 mass of the spectrum; for s = 1
    // that is the Basel value pi^2/6.
    let basel = std::f64::consts::PI * std::f64::consts::PI / 6.0;
    println!(
        "  tail_sum(0) = {:.12} (pi^2/6 = {:.12})",
        fourier.tail_sum(0),
        basel
    );
    println!("  tail_sum(1) = {:.12}", fourier.tail_sum(1));

    // Orthonormality spot check by midpoint quadrature.
    let nodes = 2048;
    let mut dot_23 = 0.0;
    let mut dot_33 = 0.0;
    for t in 0..nodes {
        let x = (t as f64 + 0.5) / nodes as f64;
        let b2 = fourier.basis_eval(2, x).unwrap();
        let b3 = fourier.basis_eval(3, x).unwrap();
        dot_23 += b2 * b3;
        dot_33 += b3 * b3;
    }
    println!(
        "  <b_2, b_3> = {:+.2e}, <b_3, b_3> = {:.12}",
        dot_23 / nodes as f64,
        dot_33 / nodes as f64
    );

    // The pointwise tail bound dominates the weighted tail function; it is
    // what keeps truncated designs honest later on.
    let k = 4;
    for x in [0.0, 0.3, 0.5] {
        println!(
            "  weighted tail at k={k}, x={x}: {:.9} <= bound {:.9}",
            fourier.weighted_tail_at(k, x),
            fourier.pointwise_tail_bound(k, x)
        );
    }
}
