//! Weighted least-squares recovery of functions from random samples, with
//! computable worst-case error certificates and a seeded Monte Carlo
//! verification harness.
//!
//! A [`model::SpectralModel`] describes a function space through an
//! L2-orthonormal basis `b_1, b_2, ...` and non-increasing approximation
//! numbers `a_0, a_1, ...` (the semi-axes of the unit ball in
//! eigencoordinates). Sample points are drawn i.i.d. from the mixture
//! density `rho_k` that balances the leverage of the first `k` basis
//! functions against the `a^2`-weighted tail; the function is then
//! recovered by weighted least squares on `span(b_1..b_k)`. For every
//! realized sample set the crate computes the certificate
//! `a_k^2 + s_max(Gamma)^2 / s_min(G)^2`, a rigorous upper bound on the
//! squared worst-case recovery error over the unit ball, and the Monte
//! Carlo harness measures how often the concentration events behind that
//! bound hold, against their `1 - 4/n^c` / `1 - 8/n^c` guarantees.
//!
//! ## Capability map
//!
//! | Module | What it does | Runnable example |
//! |--------|--------------|------------------|
//! | [`model`] | Spectral models (discrete atoms, Fourier power law) | `spectral_models` |
//! | [`density`] | The density `rho_k`, seeded sampling, diagnostics | `sample_density` |
//! | [`recovery`] | Design matrices and the least-squares solve | `recover_function` |
//! | [`certificates`] | Schedule `k_n`, `beta` scales, certificates, claims | `certify_run` |
//! | [`oracle`] | Exact/truncated worst-case errors, H/L2 norms | `certify_run` |
//! | [`harness`] | Seeded Monte Carlo trials, CSV/JSON reports | `monte_carlo` |
//!
//! ```bash
//! cargo run --release -p sampling-recovery --example spectral_models
//! cargo run --release -p sampling-recovery --example sample_density
//! cargo run --release -p sampling-recovery --example recover_function
//! cargo run --release -p sampling-recovery --example certify_run
//! cargo run --release -p sampling-recovery --example theorem_table
//! cargo run --release -p sampling-recovery --example monte_carlo
//! ```
//!
//! The same capabilities are scriptable through the thin `samplerec`
//! binary (`sample`, `recover`, `certify`, `montecarlo`, `bounds`).
//!
//! ## Reproducibility
//!
//! Every random draw comes from a ChaCha12 stream addressed by
//! `(master_seed, stream_id)`; see [`rng`] for the exact derivation rule,
//! which is a stable contract. Reports store both values, trials use their
//! index as the stream id, and equal configs produce byte-identical
//! CSV/JSON outputs regardless of thread count.

pub mod certificates;
pub mod cli;
pub mod density;
pub mod error;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod recovery;
pub mod rng;

pub use certificates::{
    basic_certificate, beta, beta_prime, certificate, check_claims, extreme_singular_values,
    k_of_n, minimal_theorem_n, oliveira_g, theorem_rhs, Certificate, Mode, OliveiraG,
};
pub use density::{draw_samples, importance_diagnostic, SampleSet, SamplingDensity};
pub use error::{Error, Result};
pub use harness::{
    emit_report, render_csv, render_json, run_and_emit, run_experiment, run_trials,
    AggregateReport, ExperimentConfig, ModelKind, ModelSpec, ReportFormat, TrialRecord,
};
pub use model::{DiscreteDiagonalModel, FourierSobolevModel, Rank, SpectralModel};
pub use oracle::{h_norm, l2_error, worstcase_error, CoefficientFunction, WorstCase};
pub use recovery::{
    build_design, build_matrices, build_tail_design, default_tail_truncation,
    evaluate_reconstruction, pseudoinverse, solve, weighted_info, DesignMatrices, RecoveryOutput,
    DEFAULT_RANK_TOLERANCE,
};
pub use rng::Stream;
