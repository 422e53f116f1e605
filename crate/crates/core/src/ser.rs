//! Symbol error rate of MPSK detection: the analytic average for the
//! MRC-like receiver and Monte Carlo estimates for every receiver.
//!
//! Given `(ĥ_t, s_t)`, the MRC-like decision statistic is complex Gaussian
//! with mean `E_C ‖h̄_t‖² s_t` and variance `E_C ‖h̄_t‖²`. Averaging the
//! Craig-form conditional SER over `ĥ_t ~ CN(0, I ⊗ R̂_t)` gives
//!
//! ```text
//! P̄ = (1/π) ∫_0^{π−π/M} det(I_N + C_M / sin²θ · A)^{−N_R} dθ,
//! A = R̂_t (Σ_{l≠t} R̂_l + Σ_l R̃_l + I/γ_C)^{-1},  C_M = sin²(π/M).
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::estimation::SymbolCovariances;
use crate::linalg::{cholesky, generalized_eigenvalues, sym_eigenvalues, sym_sqrt, KronBlock, RMat};
use crate::link::{run_trials, LinkSimulator};
use crate::quad::{integrate_doubling, Doubling};
use crate::receivers::Receiver;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SerMethod {
    #[serde(rename = "ANALYTIC")]
    Analytic,
    #[serde(rename = "MONTE_CARLO")]
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerResult {
    pub ser: f64,
    pub method: SerMethod,
    /// Simulated frames (0 for analytic results).
    pub trials: u64,
    /// Symbol decisions counted (0 for analytic results).
    pub decisions: u64,
    pub errors: u64,
    /// Binomial 95% half-width `1.96 √(p(1−p)/decisions)`; Monte Carlo only.
    pub ci_halfwidth: Option<f64>,
    /// Standard error from the spread of per-frame error fractions. Decisions
    /// within a frame share one channel draw, so this is the honest width
    /// for comparisons; Monte Carlo only.
    pub std_error: Option<f64>,
}

impl SerResult {
    fn analytic(ser: f64) -> Self {
        Self {
            ser,
            method: SerMethod::Analytic,
            trials: 0,
            decisions: 0,
            errors: 0,
            ci_halfwidth: None,
            std_error: None,
        }
    }
}

/// `C_M = sin²(π/M)`.
pub fn psk_constant(m_psk: usize) -> f64 {
    (PI / m_psk as f64).sin().powi(2)
}

/// `A_{t,k} = R̂_{t,k} (Σ_{l≠t} R̂_{l,k} + Σ_l R̃_{l,k} + I/γ_C)^{-1}`.
pub fn build_a_matrix(cfg: &SystemConfig, t: usize, k: usize) -> Result<RMat> {
    cfg.check_antenna(t)?;
    let st = SymbolCovariances::new(cfg, k)?;
    a_matrix_from(&st, t)
}

pub(crate) fn a_matrix_from(st: &SymbolCovariances, t: usize) -> Result<RMat> {
    let s = st.interference_block(t);
    // A = R̂ S^{-1}  ⇔  A^T = S^{-1} R̂ (both symmetric).
    let at = cholesky(&s, "interference-plus-noise block")?.solve(&st.r_hat[t - 1]);
    Ok(at.transpose())
}

/// Eigenvalues of `A_{t,k}` (real and non-negative), ascending.
pub(crate) fn a_eigenvalues(st: &SymbolCovariances, t: usize) -> Result<Vec<f64>> {
    Ok(generalized_eigenvalues(&st.r_hat[t - 1], &st.interference_block(t))?.into_iter().map(|l| l.max(0.0)).collect())
}

/// The analytic SER for a given spectrum of `A`.
pub fn ser_from_eigenvalues(eigs: &[f64], n_rx: usize, m_psk: usize) -> Result<f64> {
    if m_psk < 2 {
        return Err(Error::domain(format!("constellation size must be >= 2, got {m_psk}")));
    }
    let c = psk_constant(m_psk);
    let upper = PI - PI / m_psk as f64;
    let nr = n_rx as f64;
    let integrand = |theta: f64| {
        let s2 = theta.sin().powi(2);
        if s2 == 0.0 {
            return if eigs.iter().all(|&l| l == 0.0) { 1.0 } else { 0.0 };
        }
        let log_det: f64 = eigs.iter().map(|&l| (c * l / s2).ln_1p()).sum();
        (-nr * log_det).exp()
    };
    let integral = integrate_doubling(0.0, upper, Doubling::default(), integrand)?;
    Ok((integral.value / PI).clamp(0.0, 1.0))
}

/// Average SER of the MRC-like receiver for antenna `t` at symbol `k`.
pub fn analytic_ser(cfg: &SystemConfig, t: usize, k: usize) -> Result<SerResult> {
    cfg.check_antenna(t)?;
    let st = SymbolCovariances::new(cfg, k)?;
    Ok(SerResult::analytic(ser_from_eigenvalues(&a_eigenvalues(&st, t)?, cfg.n_rx, cfg.m_psk)?))
}

/// Analytic SER averaged over all transmit antennas and the data symbols in
/// `k_set` (all of `1..=K` when `None`).
pub fn average_analytic_ser(cfg: &SystemConfig, k_set: Option<&[usize]>) -> Result<SerResult> {
    cfg.validate()?;
    let all: Vec<usize> = (1..=cfg.k_block).collect();
    let ks = k_set.unwrap_or(&all);
    if ks.is_empty() {
        return Err(Error::domain("SER average needs at least one data symbol index"));
    }
    let mut sum = 0.0;
    for &k in ks {
        let st = SymbolCovariances::new(cfg, k)?;
        for t in 1..=cfg.n_tx {
            sum += ser_from_eigenvalues(&a_eigenvalues(&st, t)?, cfg.n_rx, cfg.m_psk)?;
        }
    }
    Ok(SerResult::analytic(sum / (cfg.n_tx * ks.len()) as f64))
}

/// Monte Carlo SER of one receiver over all `(t, k)` decisions.
pub fn monte_carlo_ser(cfg: &SystemConfig, receiver: Receiver, trials: u64, seed: u64) -> Result<SerResult> {
    Ok(monte_carlo_ser_many(cfg, &[receiver], None, trials, seed)?.remove(0))
}

/// Monte Carlo SER of several receivers on the same simulated frames,
/// counting decisions at the data symbols in `k_set` (all when `None`).
pub fn monte_carlo_ser_many(
    cfg: &SystemConfig,
    receivers: &[Receiver],
    k_set: Option<&[usize]>,
    trials: u64,
    seed: u64,
) -> Result<Vec<SerResult>> {
    if trials == 0 {
        return Err(Error::domain("Monte Carlo SER needs at least one trial"));
    }
    let sim = match k_set {
        Some(ks) => LinkSimulator::new(cfg, ks)?,
        None => LinkSimulator::all_symbols(cfg)?,
    };
    let per_trial = run_trials(trials, |i| sim.error_trial(receivers, seed, i))?;
    let per = sim.decisions_per_trial();
    let decisions = per * trials;
    Ok((0..receivers.len())
        .map(|j| {
            let errors: u64 = per_trial.iter().map(|v| v[j]).sum();
            let sq: u128 = per_trial.iter().map(|v| (v[j] as u128) * (v[j] as u128)).sum();
            let ser = errors as f64 / decisions as f64;
            let n = trials as f64;
            // Spread of per-frame error fractions, from exact integer moments.
            let std_error = if trials > 1 {
                let mean = errors as f64 / n;
                let var = (sq as f64 - n * mean * mean) / (n - 1.0);
                Some((var.max(0.0) / n).sqrt() / per as f64)
            } else {
                None
            };
            SerResult {
                ser,
                method: SerMethod::MonteCarlo,
                trials,
                decisions,
                errors,
                ci_halfwidth: Some(1.96 * (ser * (1.0 - ser) / decisions as f64).sqrt()),
                std_error,
            }
        })
        .collect())
}

/// `det(I − μ (I ⊗ C) (I ⊗ W))^{-1}`, the moment generating function
/// `E[exp(μ β)]` of `β = x^H (I ⊗ W) x` with `x ~ CN(0, I ⊗ C)`.
///
/// `W` must be symmetric PSD. Fails when `1 − μ λ ≤ 0` for some eigenvalue
/// `λ` of `W^{1/2} C W^{1/2}`.
pub fn mgf_quadratic_form(cov: &KronBlock, weight: &RMat, mu: f64) -> Result<f64> {
    if weight.shape() != cov.block.shape() {
        return Err(Error::domain("weight and covariance block sizes differ"));
    }
    if mu == 0.0 {
        return Ok(1.0);
    }
    let ws = sym_sqrt(weight);
    let eigs = sym_eigenvalues(&(&ws * &cov.block * &ws));
    let mut log_det = 0.0;
    for l in eigs {
        let f = 1.0 - mu * l;
        if f <= 0.0 {
            return Err(Error::domain(format!("moment generating function undefined at mu = {mu}")));
        }
        log_det += f.ln();
    }
    Ok((-(cov.reps as f64) * log_det).exp())
}
