//! The theorem-mode schedule and its bound quantities across n.
//!
//! k_n = 2 floor(n / (2^8 (2+c) ln n)) keeps the concentration radius
//! g(n, sqrt(2 k_n), c) at or below 1/2, which is what powers the
//! high-probability guarantees. The error scale of the resulting bound is
//! (4/k_n) sum_{j >= k_n/2} a_j^2.
//!
//! ```bash
//! cargo run --release -p sampling-recovery --example theorem_table
//! ```

use sampling_recovery::certificates::{
    beta_prime, k_of_n, minimal_theorem_n, oliveira_g, theorem_rhs,
};
use sampling_recovery::model::FourierSobolevModel;

fn main() {
    let model = FourierSobolevModel::new(1.0).unwrap();
    let c = 1.0;
    println!("smallest usable n at c = {c}: {}", minimal_theorem_n(c));
    println!();
    println!(
        "{:>10} {:>6} {:>12} {:>14} {:>10}",
        "n", "k_n", "beta'_kn", "theorem rhs", "g(n,R,c)"
    );
    for exp in 4..=8u32 {
        let n = 10u64.pow(exp);
        match k_of_n(n, c) {
            Ok(k) => {
                let bp = beta_prime(&model, k).unwrap();
                let rhs = theorem_rhs(&model, k).unwrap();
                let g = oliveira_g(n, (2.0 * k as f64).sqrt(), c).unwrap();
                println!(
                    "{n:>10} {k:>6} {bp:>12.6} {rhs:>14.6} {:>10.4}",
                    g.value
                );
                assert!(g.claim_regime);
            }
            Err(e) => println!("{n:>10}  {e}"),
        }
    }

    println!();
    println!("the probability floor improves with c (n = 1e5):");
    for c in [0.5, 1.0, 2.0] {
        let n = 100_000u64;
        let k = k_of_n(n, c).unwrap();
        let nf = n as f64;
        println!(
            "  c = {c}: k_n = {k}, claim floor 1 - 4/n^c = {:.6}, theorem floor 1 - 8/n^c = {:.6}",
            1.0 - 4.0 / nf.powf(c),
            1.0 - 8.0 / nf.powf(c)
        );
    }
}
