//! Seeded Monte Carlo experiments over realized sample sets.
//!
//! A run is described by an [`ExperimentConfig`] (JSON on disk, see the
//! README for the schema). Each trial draws its own sample set on the
//! stream `(master_seed, trial_index)`, builds the design and tail
//! matrices, extracts the extreme singular values, and assembles the
//! certificate and pass/fail flags into a [`TrialRecord`]. Records are
//! aggregated in trial order into an [`AggregateReport`] whose empirical
//! frequencies face the theoretical lower bounds `1 - 4/n^c` (each claim)
//! and `1 - 8/n^c` (the theorem event).
//!
//! Trials are independent work units and run on the rayon pool; the
//! aggregation is an ordered reduction by trial index, so concurrent and
//! serial execution produce identical reports.

mod report;

pub use report::{emit_report, render_csv, render_json, ReportFormat, CSV_HEADER};

use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificates::{self, Mode};
use crate::density::{draw_samples, SampleSet, SamplingDensity};
use crate::error::{Error, Result};
use crate::model::{DiscreteDiagonalModel, FourierSobolevModel, Rank, SpectralModel};
use crate::oracle::worstcase_error;
use crate::recovery::{default_tail_truncation, DEFAULT_RANK_TOLERANCE};

/// Row block size for streamed Gram accumulation.
const GRAM_BLOCK: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Discrete,
    Fourier,
}

/// Model block of the experiment config: `kind` plus `m`/`a` (discrete) or
/// `s` (fourier power law).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

impl ModelSpec {
    pub fn discrete(a: Vec<f64>) -> Self {
        ModelSpec {
            kind: ModelKind::Discrete,
            m: Some(a.len()),
            a: Some(a),
            s: None,
        }
    }

    pub fn fourier(s: f64) -> Self {
        ModelSpec {
            kind: ModelKind::Fourier,
            m: None,
            a: None,
            s: Some(s),
        }
    }

    pub fn build(&self) -> Result<BuiltModel> {
        match self.kind {
            ModelKind::Discrete => {
                let a = self.a.clone().ok_or_else(|| {
                    Error::InvalidConfig("discrete model needs model.a".into())
                })?;
                if let Some(m) = self.m {
                    if m != a.len() {
                        return Err(Error::InvalidConfig(format!(
                            "model.m = {m} disagrees with model.a length {}",
                            a.len()
                        )));
                    }
                }
                Ok(BuiltModel::Discrete(DiscreteDiagonalModel::new(a)?))
            }
            ModelKind::Fourier => {
                let s = self
                    .s
                    .ok_or_else(|| Error::InvalidConfig("fourier model needs model.s".into()))?;
                Ok(BuiltModel::Fourier(FourierSobolevModel::new(s)?))
            }
        }
    }
}

pub enum BuiltModel {
    Discrete(DiscreteDiagonalModel),
    Fourier(FourierSobolevModel),
}

/// JSON experiment description; see the README for the full schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub mode: Mode,
    pub n: u64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compute_worstcase: Option<bool>,
    /// Output routing; accepted from config files but never echoed into
    /// reports, so equal experiments emit byte-identical files regardless
    /// of where they are written.
    #[serde(default, skip_serializing)]
    pub out_csv: Option<String>,
    #[serde(default, skip_serializing)]
    pub out_json: Option<String>,
}

fn default_c() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Config resolved against a model rank: every default filled in.
#[derive(Clone, Copy, Debug)]
pub struct RunPlan {
    pub mode: Mode,
    pub n: u64,
    pub k: usize,
    pub c: f64,
    pub j_trunc: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub rank_tolerance: f64,
    pub compute_worstcase: bool,
}

pub fn resolve_plan(cfg: &ExperimentConfig, rank: Rank) -> Result<RunPlan> {
    if cfg.n < 2 {
        return Err(Error::InvalidConfig(format!(
            "n = {} must be at least 2",
            cfg.n
        )));
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if cfg.c.is_nan() || cfg.c <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "c = {} must be positive",
            cfg.c
        )));
    }
    let k = match cfg.mode {
        Mode::Theorem => {
            if cfg.k.is_some() {
                return Err(Error::InvalidConfig(
                    "theorem mode derives k from (n, c); drop the k field or use override mode"
                        .into(),
                ));
            }
            certificates::k_of_n(cfg.n, cfg.c)?
        }
        Mode::Override => cfg
            .k
            .ok_or_else(|| Error::InvalidConfig("override mode needs k".into()))?,
    };
    if k == 0 {
        return Err(Error::ZeroTruncation);
    }
    if let Rank::Finite(m) = rank {
        if k > m {
            return Err(Error::InvalidConfig(format!(
                "k = {k} exceeds the model rank {m}"
            )));
        }
    }
    let j_trunc = cfg.j.unwrap_or_else(|| default_tail_truncation(rank, k));
    if j_trunc <= k {
        return Err(Error::TailTruncationTooSmall { j: j_trunc, k });
    }
    let rank_tolerance = cfg.rank_tolerance.unwrap_or(DEFAULT_RANK_TOLERANCE);
    if rank_tolerance.is_nan() || rank_tolerance <= 0.0 {
        return Err(Error::InvalidConfig(
            "rank_tolerance must be positive".into(),
        ));
    }
    // Worst-case evaluation is exact and cheap on finite spectra; on
    // infinite ones it is a truncated estimate and priced by k.
    let compute_worstcase = cfg
        .compute_worstcase
        .unwrap_or(match rank {
            Rank::Finite(_) => true,
            Rank::Infinite => k <= 32,
        });
    Ok(RunPlan {
        mode: cfg.mode,
        n: cfg.n,
        k,
        c: cfg.c,
        j_trunc,
        trials: cfg.trials,
        master_seed: cfg.master_seed,
        rank_tolerance,
        compute_worstcase,
    })
}

/// One realized trial; regenerable bit-exactly from
/// `(master_seed, trial_index)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: usize,
    /// Stream id of the trial (equals its index).
    pub seed: u64,
    pub n: u64,
    pub k: usize,
    pub c: f64,
    pub smin_g_sq: f64,
    /// Largest singular value of the truncated tail matrix (uncorrected).
    pub smax_gamma_j: f64,
    pub tail_correction: f64,
    pub a_k: f64,
    pub beta_prime: Option<f64>,
    pub cert_eq2: f64,
    pub wc_sq: Option<f64>,
    pub wc_exact: Option<bool>,
    pub claim1_pass: Option<bool>,
    pub claim2_pass: Option<bool>,
    pub theorem_pass: Option<bool>,
    /// Numerical rank of the design matrix.
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FailedTrial {
    pub trial_index: usize,
    pub message: String,
}

/// Aggregate of a run: config echo, empirical frequencies against the
/// theoretical bounds, and certificate statistics. Trial rows live in the
/// CSV emission; wall-clock is kept out of the serialized form so equal
/// seeds give byte-identical files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AggregateReport {
    pub config: ExperimentConfig,
    pub mode: Mode,
    pub n: u64,
    pub k: usize,
    pub c: f64,
    pub j_trunc: usize,
    pub trials: usize,
    pub evaluated_trials: usize,
    pub failed_trials: Vec<FailedTrial>,
    pub freq_claim1: Option<f64>,
    pub freq_claim2: Option<f64>,
    pub freq_theorem: Option<f64>,
    /// Per-trial lower bound `1 - 4/n^c` for each claim.
    pub bound_claim: f64,
    /// Per-trial lower bound `1 - 8/n^c` for the theorem event.
    pub bound_theorem: f64,
    pub mean_cert_eq2: Option<f64>,
    pub max_cert_eq2: Option<f64>,
    pub theorem_rhs: Option<f64>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
    #[serde(skip)]
    pub wall_clock_per_trial_secs: f64,
}

/// Streamed `G^T G` (k x k) without materializing `G`.
fn design_gram<M: SpectralModel>(
    model: &M,
    k: usize,
    samples: &SampleSet<M::Point>,
) -> Result<DMatrix<f64>> {
    let mut gram = DMatrix::<f64>::zeros(k, k);
    let points = samples.points();
    let densities = samples.densities();
    let mut row = vec![0.0; k];
    let mut start = 0usize;
    while start < points.len() {
        let rows = GRAM_BLOCK.min(points.len() - start);
        let mut block = DMatrix::<f64>::zeros(rows, k);
        for i in 0..rows {
            let w = densities[start + i].sqrt().recip();
            model.basis_row(points[start + i], &mut row)?;
            for (j, b) in row.iter().enumerate() {
                block[(i, j)] = w * b;
            }
        }
        // gemm (unlike gemm_tr) dispatches to the blocked multiply kernels.
        gram.gemm(1.0, &block.transpose(), &block, 1.0);
        start += rows;
    }
    Ok(gram)
}

/// Streamed `Gamma_J^T Gamma_J` plus the Frobenius tail correction.
fn tail_gram<M: SpectralModel>(
    model: &M,
    k: usize,
    j_trunc: usize,
    samples: &SampleSet<M::Point>,
) -> Result<(DMatrix<f64>, f64)> {
    if j_trunc <= k {
        return Err(Error::TailTruncationTooSmall { j: j_trunc, k });
    }
    let cols = j_trunc - k;
    let active = match model.rank() {
        Rank::Finite(m) => m.saturating_sub(k).min(cols),
        Rank::Infinite => cols,
    };
    let scales: Vec<f64> = (k..k + active).map(|j| model.approx_number(j)).collect();
    let mut gram = DMatrix::<f64>::zeros(cols, cols);
    let points = samples.points();
    let densities = samples.densities();
    let mut row = vec![0.0; k + active];
    let mut frob_sq = 0.0;
    let mut start = 0usize;
    while start < points.len() {
        let rows = GRAM_BLOCK.min(points.len() - start);
        let mut block = DMatrix::<f64>::zeros(rows, cols);
        for i in 0..rows {
            let rho = densities[start + i];
            let w = rho.sqrt().recip();
            if active > 0 {
                model.basis_row(points[start + i], &mut row)?;
                for t in 0..active {
                    block[(i, t)] = w * scales[t] * row[k + t];
                }
            }
            frob_sq += model.pointwise_tail_bound(j_trunc, points[start + i]) / rho;
        }
        gram.gemm(1.0, &block.transpose(), &block, 1.0);
        start += rows;
    }
    Ok((gram, frob_sq.sqrt()))
}

/// Evaluate one trial on an externally supplied sample set (used by tests
/// and examples to inject hand-picked points).
pub fn evaluate_trial_with_samples<M: SpectralModel>(
    model: &M,
    plan: &RunPlan,
    trial_index: usize,
    samples: &SampleSet<M::Point>,
) -> Result<TrialRecord> {
    let k = plan.k;
    let gram_g = design_gram(model, k, samples)?;
    let eig = gram_g.symmetric_eigen();
    let mut lam_min = f64::INFINITY;
    let mut lam_max = 0.0f64;
    for &l in eig.eigenvalues.iter() {
        lam_min = lam_min.min(l);
        lam_max = lam_max.max(l);
    }
    lam_min = lam_min.max(0.0);
    let cutoff = plan.rank_tolerance * plan.rank_tolerance * lam_max;
    let rank = eig.eigenvalues.iter().filter(|l| **l > cutoff).count();
    // A rank-deficient design certifies nothing: force the infinity marker.
    let smin_g_sq = if rank < k { 0.0 } else { lam_min };

    let (gram_t, tail_correction) = tail_gram(model, k, plan.j_trunc, samples)?;
    let (_, gamma_lam_max) = certificates::gram_extreme_eigenvalues(&gram_t);
    let smax_gamma_trunc = gamma_lam_max.sqrt();

    let cert = certificates::certificate(
        model,
        plan.mode,
        plan.n,
        k,
        plan.c,
        smin_g_sq,
        smax_gamma_trunc,
        tail_correction,
    )?;

    let (wc_sq, wc_exact) = if plan.compute_worstcase {
        let wc = worstcase_error(model, samples, k, plan.j_trunc, plan.rank_tolerance)?;
        (Some(wc.value * wc.value), Some(wc.exact))
    } else {
        (None, None)
    };

    let theorem_pass = cert.theorem_rhs.map(|rhs| {
        let mut ok = cert.cert_eq2 <= rhs;
        if let (Some(w), Some(true)) = (wc_sq, wc_exact) {
            ok = ok && w <= rhs;
        }
        ok
    });

    Ok(TrialRecord {
        trial_index,
        seed: trial_index as u64,
        n: plan.n,
        k,
        c: plan.c,
        smin_g_sq,
        smax_gamma_j: smax_gamma_trunc,
        tail_correction,
        a_k: cert.a_k,
        beta_prime: cert.beta_prime,
        cert_eq2: cert.cert_eq2,
        wc_sq,
        wc_exact,
        claim1_pass: cert.claim1_pass,
        claim2_pass: cert.claim2_pass,
        theorem_pass,
        rank,
    })
}

/// Draw the trial's sample set on stream `(master_seed, trial_index)` and
/// evaluate it.
pub fn evaluate_trial<M: SpectralModel>(
    model: &M,
    plan: &RunPlan,
    trial_index: usize,
) -> Result<TrialRecord> {
    let density = SamplingDensity::new(model, plan.k)?;
    let samples = draw_samples(
        &density,
        plan.n as usize,
        plan.master_seed,
        trial_index as u64,
    )?;
    evaluate_trial_with_samples(model, plan, trial_index, &samples)
}

fn freq_of(records: &[TrialRecord], get: impl Fn(&TrialRecord) -> Option<bool>) -> Option<f64> {
    let flags: Vec<bool> = records.iter().filter_map(&get).collect();
    if flags.is_empty() || flags.len() != records.len() {
        return None;
    }
    Some(flags.iter().filter(|b| **b).count() as f64 / flags.len() as f64)
}

/// Assemble the aggregate from evaluated records (exposed so degenerate
/// cases, like an empty record list, stay constructible).
pub fn aggregate_records<M: SpectralModel>(
    model: &M,
    cfg: &ExperimentConfig,
    plan: &RunPlan,
    records: Vec<TrialRecord>,
    failed_trials: Vec<FailedTrial>,
    wall_clock_per_trial_secs: f64,
) -> AggregateReport {
    let nf = plan.n as f64;
    let bound_claim = 1.0 - 4.0 / nf.powf(plan.c);
    let bound_theorem = 1.0 - 8.0 / nf.powf(plan.c);
    let freq_claim1 = freq_of(&records, |r| r.claim1_pass);
    let freq_claim2 = freq_of(&records, |r| r.claim2_pass);
    let freq_theorem = freq_of(&records, |r| r.theorem_pass);
    let mean_cert_eq2 = if records.is_empty() {
        None
    } else {
        Some(records.iter().map(|r| r.cert_eq2).sum::<f64>() / records.len() as f64)
    };
    let max_cert_eq2 = records
        .iter()
        .map(|r| r.cert_eq2)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    let theorem_rhs = if plan.k >= 2 && plan.k.is_multiple_of(2) {
        certificates::theorem_rhs(model, plan.k).ok()
    } else {
        None
    };
    AggregateReport {
        config: cfg.clone(),
        mode: plan.mode,
        n: plan.n,
        k: plan.k,
        c: plan.c,
        j_trunc: plan.j_trunc,
        trials: plan.trials,
        evaluated_trials: records.len(),
        failed_trials,
        freq_claim1,
        freq_claim2,
        freq_theorem,
        bound_claim,
        bound_theorem,
        mean_cert_eq2,
        max_cert_eq2,
        theorem_rhs,
        records,
        wall_clock_per_trial_secs,
    }
}

/// Run every trial of the config against an already-built model.
///
/// Per-trial errors become [`FailedTrial`] entries rather than aborting the
/// run; aggregation is deterministic in trial order.
pub fn run_trials<M: SpectralModel>(model: &M, cfg: &ExperimentConfig) -> Result<AggregateReport> {
    let plan = resolve_plan(cfg, model.rank())?;
    let started = Instant::now();
    let outcomes: Vec<(usize, Result<TrialRecord>)> = (0..plan.trials)
        .into_par_iter()
        .map(|t| (t, evaluate_trial(model, &plan, t)))
        .collect();
    let elapsed = started.elapsed().as_secs_f64() / plan.trials as f64;
    let mut records = Vec::with_capacity(plan.trials);
    let mut failed = Vec::new();
    for (t, outcome) in outcomes {
        match outcome {
            Ok(rec) => records.push(rec),
            Err(e) => failed.push(FailedTrial {
                trial_index: t,
                message: e.to_string(),
            }),
        }
    }
    Ok(aggregate_records(model, cfg, &plan, records, failed, elapsed))
}

/// Build the model described by the config and run the experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<AggregateReport> {
    match cfg.model.build()? {
        BuiltModel::Discrete(m) => run_trials(&m, cfg),
        BuiltModel::Fourier(m) => run_trials(&m, cfg),
    }
}

/// Run the experiment and write any output paths named in the config.
pub fn run_and_emit(cfg: &ExperimentConfig) -> Result<AggregateReport> {
    let report = run_experiment(cfg)?;
    if let Some(path) = &cfg.out_csv {
        emit_report(&report, ReportFormat::Csv, path)?;
    }
    if let Some(path) = &cfg.out_json {
        emit_report(&report, ReportFormat::Json, path)?;
    }
    Ok(report)
}
