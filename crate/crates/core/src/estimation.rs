//! Pilot-based MMSE channel estimation and the equivalent system model in
//! which the estimation error is folded into a colored noise term.

use std::sync::Arc;

use crate::channel::{build_cross_cov, build_pilot_cov, ChannelRealization};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, real_mul, sym_inv_sqrt, KronBlock, RMat};
use crate::rng::{complex_normal, substream, Purpose};
use crate::Complex64;

/// Covariances tied to one `(t, k)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSet {
    /// Pilot autocovariance `R_P`.
    pub r_p: RMat,
    /// Data/pilot cross-covariance `R_{P,t,k}`.
    pub r_ptk: RMat,
    /// Data autocovariance `R_k` (equal to `R_P` for this frame layout).
    pub r_k: RMat,
    /// Covariance of the estimate, `R̂_{t,k}`.
    pub r_hat: RMat,
    /// Covariance of the estimation error, `R̃_{t,k}`.
    pub r_tilde: RMat,
}

fn symmetrize(m: RMat) -> RMat {
    (&m + m.transpose()) * 0.5
}

fn pilot_system(cfg: &SystemConfig, r_p: &RMat) -> RMat {
    // R_P + I / γ_P
    let mut m = r_p.clone();
    let inv_gp = 1.0 / cfg.gamma_p();
    for i in 0..m.nrows() {
        m[(i, i)] += inv_gp;
    }
    m
}

fn covariance_pair(cfg: &SystemConfig, r_p: &RMat, r_ptk: &RMat) -> Result<(RMat, RMat)> {
    let chol = cholesky(&pilot_system(cfg, r_p), "pilot system matrix")?;
    let x = chol.solve(&r_ptk.transpose());
    let r_hat = symmetrize(r_ptk * x);
    let r_tilde = symmetrize(r_p - &r_hat);
    Ok((r_hat, r_tilde))
}

/// `(R̂_{t,k}, R̃_{t,k})`.
pub fn estimation_covariances(cfg: &SystemConfig, t: usize, k: usize) -> Result<(RMat, RMat)> {
    let r_ptk = build_cross_cov(cfg, t, k)?;
    covariance_pair(cfg, &build_pilot_cov(cfg), &r_ptk)
}

pub fn covariance_set(cfg: &SystemConfig, t: usize, k: usize) -> Result<CovarianceSet> {
    let r_p = build_pilot_cov(cfg);
    let r_ptk = build_cross_cov(cfg, t, k)?;
    let (r_hat, r_tilde) = covariance_pair(cfg, &r_p, &r_ptk)?;
    Ok(CovarianceSet { r_k: r_p.clone(), r_p, r_ptk, r_hat, r_tilde })
}

/// The MMSE interpolation filter `√E_P R_{P,t,k} (E_P R_P + σ² I)^{-1}`,
/// applied to the de-rotated pilot observations.
pub fn mmse_filter(cfg: &SystemConfig, t: usize, k: usize) -> Result<RMat> {
    let r_p = build_pilot_cov(cfg);
    let r_ptk = build_cross_cov(cfg, t, k)?;
    filter_from(cfg, &r_p, &r_ptk)
}

fn filter_from(cfg: &SystemConfig, r_p: &RMat, r_ptk: &RMat) -> Result<RMat> {
    let mut sys = r_p * cfg.e_pilot;
    for i in 0..sys.nrows() {
        sys[(i, i)] += cfg.noise_var;
    }
    let chol = cholesky(&sys, "MMSE system matrix E_P R_P + σ² I")?;
    // F^T = sys^{-1} (√E_P R_{P,t,k})^T since sys is symmetric.
    Ok(chol.solve(&(r_ptk.transpose() * cfg.e_pilot.sqrt())).transpose())
}

/// MMSE estimate of `h_{t,r,k}` from antenna `t`'s received pilots, with all
/// pilot symbols equal to one.
pub fn mmse_estimate(y_pilot: &[Complex64], cfg: &SystemConfig, t: usize, k: usize) -> Result<Vec<Complex64>> {
    let ones = vec![Complex64::new(1.0, 0.0); y_pilot.len()];
    mmse_estimate_with_pilots(y_pilot, &ones, cfg, t, k)
}

/// MMSE estimate for arbitrary unit-modulus pilots `p_1 .. p_N`.
pub fn mmse_estimate_with_pilots(
    y_pilot: &[Complex64],
    pilots: &[Complex64],
    cfg: &SystemConfig,
    t: usize,
    k: usize,
) -> Result<Vec<Complex64>> {
    if y_pilot.len() != cfg.n_rep || pilots.len() != cfg.n_rep {
        return Err(Error::domain(format!(
            "pilot vectors must have length N = {}, got {} and {}",
            cfg.n_rep,
            y_pilot.len(),
            pilots.len()
        )));
    }
    if pilots.iter().any(|p| (p.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::domain("pilot symbols must have unit modulus"));
    }
    let derotated: Vec<Complex64> = y_pilot.iter().zip(pilots).map(|(y, p)| p.conj() * y).collect();
    Ok(real_mul(&mmse_filter(cfg, t, k)?, &derotated))
}

/// Second-order statistics for one data symbol index `k`, shared by every
/// trial and every transmit antenna.
#[derive(Debug, Clone)]
pub struct SymbolCovariances {
    pub k: usize,
    pub n_rx: usize,
    pub m_psk: usize,
    pub e_data: f64,
    pub noise_var: f64,
    pub r_p: RMat,
    /// `R̂_{t,k}` for t = 1..N_T (index t-1).
    pub r_hat: Vec<RMat>,
    /// `R̃_{t,k}` for t = 1..N_T.
    pub r_tilde: Vec<RMat>,
    /// `Σ_t R̃_{t,k} + I / γ_C`, the block of `R̃_k`.
    pub r_tilde_total: RMat,
    /// `Σ_t R̂_{t,k}`.
    pub r_hat_total: RMat,
    /// MMSE filters per antenna.
    pub filters: Vec<RMat>,
    r_tilde_total_inv: RMat,
    whiteners: Vec<RMat>,
}

impl SymbolCovariances {
    pub fn new(cfg: &SystemConfig, k: usize) -> Result<Self> {
        cfg.validate()?;
        cfg.check_symbol(k)?;
        let n = cfg.n_rep;
        let r_p = build_pilot_cov(cfg);
        let mut r_hat = Vec::with_capacity(cfg.n_tx);
        let mut r_tilde = Vec::with_capacity(cfg.n_tx);
        let mut filters = Vec::with_capacity(cfg.n_tx);
        for t in 1..=cfg.n_tx {
            let r_ptk = build_cross_cov(cfg, t, k)?;
            let (h, e) = covariance_pair(cfg, &r_p, &r_ptk)?;
            filters.push(filter_from(cfg, &r_p, &r_ptk)?);
            r_hat.push(h);
            r_tilde.push(e);
        }
        let mut r_tilde_total = r_tilde.iter().fold(RMat::zeros(n, n), |acc, m| acc + m);
        let inv_gc = 1.0 / cfg.gamma_c();
        for i in 0..n {
            r_tilde_total[(i, i)] += inv_gc;
        }
        let r_hat_total = r_hat.iter().fold(RMat::zeros(n, n), |acc, m| acc + m);
        let r_tilde_total_inv = cholesky(&r_tilde_total, "effective noise covariance")?.inverse();
        let whiteners = r_hat
            .iter()
            .map(|r| sym_inv_sqrt(&(whitening_target_block(&r_hat_total, r, &r_tilde_total) * cfg.e_data)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k,
            n_rx: cfg.n_rx,
            m_psk: cfg.m_psk,
            e_data: cfg.e_data,
            noise_var: cfg.noise_var,
            r_p,
            r_hat,
            r_tilde,
            r_tilde_total,
            r_hat_total,
            filters,
            r_tilde_total_inv,
            whiteners,
        })
    }

    pub fn n_tx(&self) -> usize {
        self.r_hat.len()
    }

    pub fn n_rep(&self) -> usize {
        self.r_p.nrows()
    }

    /// `(Σ_t R̃_{t,k} + I/γ_C)^{-1}`.
    pub fn r_tilde_total_inv(&self) -> &RMat {
        &self.r_tilde_total_inv
    }

    /// Block of the statistical whitener `R_{W,t,k}` for antenna `t` (1-based).
    pub fn whitener(&self, t: usize) -> &RMat {
        &self.whiteners[t - 1]
    }

    /// `Σ_{l≠t} R̂_{l,k} + Σ_l R̃_{l,k} + I/γ_C`, the normalized
    /// interference-plus-noise block seen by antenna `t`.
    pub fn interference_block(&self, t: usize) -> RMat {
        whitening_target_block(&self.r_hat_total, &self.r_hat[t - 1], &self.r_tilde_total)
    }
}

fn whitening_target_block(r_hat_total: &RMat, r_hat_t: &RMat, r_tilde_total: &RMat) -> RMat {
    r_hat_total - r_hat_t + r_tilde_total
}

/// `y_k = √E_C Ĥ_k s_k + ẑ_k` in structured form for one symbol index.
#[derive(Debug, Clone)]
pub struct EquivalentModel {
    pub k: usize,
    /// Column `t-1` stacks `ĥ_{t,r,k}` over r (length N·N_R).
    pub h_hat: Vec<Vec<Complex64>>,
    pub stats: Arc<SymbolCovariances>,
}

impl EquivalentModel {
    pub fn n_tx(&self) -> usize {
        self.h_hat.len()
    }

    pub fn n_rx(&self) -> usize {
        self.stats.n_rx
    }

    pub fn n_rep(&self) -> usize {
        self.stats.n_rep()
    }

    /// Shape of `Ĥ_k` as (rows, cols).
    pub fn shape(&self) -> (usize, usize) {
        (self.n_rep() * self.n_rx(), self.n_tx())
    }

    pub fn column(&self, t: usize) -> &[Complex64] {
        &self.h_hat[t - 1]
    }

    /// `R̃_k = I_{N_R} ⊗ (Σ_t R̃_{t,k} + I/γ_C)`.
    pub fn r_tilde_blk(&self) -> KronBlock {
        KronBlock::new(self.stats.r_tilde_total.clone(), self.n_rx())
    }

    /// `I_{N_R} ⊗ R̂_{t,k}`.
    pub fn r_hat_blk(&self, t: usize) -> KronBlock {
        KronBlock::new(self.stats.r_hat[t - 1].clone(), self.n_rx())
    }
}

/// Output of the estimator for one frame: estimates and the filters used.
#[derive(Debug, Clone)]
pub struct EstimationResult {
    /// Received pilot vectors `y_{P,t,r}` indexed `[t-1][r-1]`.
    pub y_pilot: Vec<Vec<Vec<Complex64>>>,
    /// One equivalent model per requested symbol index.
    pub models: Vec<EquivalentModel>,
}

impl EstimationResult {
    pub fn h_hat(&self, t: usize, r: usize, k: usize) -> Option<&[Complex64]> {
        let m = self.models.iter().find(|m| m.k == k)?;
        let n = m.n_rep();
        Some(&m.h_hat[t - 1][(r - 1) * n..r * n])
    }

    pub fn filter(&self, t: usize, k: usize) -> Option<&RMat> {
        self.models.iter().find(|m| m.k == k).map(|m| &m.stats.filters[t - 1])
    }
}

/// Estimator with covariances and filters precomputed for a set of symbols.
#[derive(Debug, Clone)]
pub struct FrameEstimator {
    cfg: SystemConfig,
    stats: Vec<Arc<SymbolCovariances>>,
}

impl FrameEstimator {
    pub fn new(cfg: &SystemConfig, k_set: &[usize]) -> Result<Self> {
        let stats = k_set.iter().map(|&k| SymbolCovariances::new(cfg, k).map(Arc::new)).collect::<Result<Vec<_>>>()?;
        Ok(Self { cfg: *cfg, stats })
    }

    pub fn stats(&self) -> &[Arc<SymbolCovariances>] {
        &self.stats
    }

    /// Simulates pilot reception (pilot noise from the `(noise_seed, trial)`
    /// substreams) and estimates every requested data-instant channel.
    pub fn estimate(&self, h: &ChannelRealization, noise_seed: u64, trial: u64) -> Result<EstimationResult> {
        let cfg = &self.cfg;
        let n = cfg.n_rep;
        let sqrt_ep = cfg.e_pilot.sqrt();
        let sigma = cfg.noise_var.sqrt();
        let mut y_pilot = Vec::with_capacity(cfg.n_tx);
        for t in 1..=cfg.n_tx {
            let mut per_r = Vec::with_capacity(cfg.n_rx);
            for r in 1..=cfg.n_rx {
                let mut rng = substream(noise_seed, trial, Purpose::PilotNoise, t, r);
                let y: Vec<Complex64> =
                    h.pilot(t, r).iter().map(|&hp| hp * sqrt_ep + complex_normal(&mut rng) * sigma).collect();
                per_r.push(y);
            }
            y_pilot.push(per_r);
        }
        let mut models = Vec::with_capacity(self.stats.len());
        for st in &self.stats {
            if !h.k_set.contains(&st.k) {
                return Err(Error::domain(format!("realization does not cover symbol {}", st.k)));
            }
            let mut h_hat = Vec::with_capacity(cfg.n_tx);
            for t in 1..=cfg.n_tx {
                let mut col = Vec::with_capacity(n * cfg.n_rx);
                for r in 1..=cfg.n_rx {
                    col.extend(real_mul(&st.filters[t - 1], &y_pilot[t - 1][r - 1]));
                }
                h_hat.push(col);
            }
            models.push(EquivalentModel { k: st.k, h_hat, stats: Arc::clone(st) });
        }
        Ok(EstimationResult { y_pilot, models })
    }
}

/// Simulates pilot reception for `realization`, estimates every `ĥ_{t,r,k}`
/// and attaches the analytic covariance descriptions.
pub fn build_equivalent_model(
    realization: &ChannelRealization,
    noise_seed: u64,
    cfg: &SystemConfig,
    k: usize,
) -> Result<EquivalentModel> {
    if !realization.k_set.contains(&k) {
        return Err(Error::domain(format!("realization does not cover symbol {k}")));
    }
    let est = FrameEstimator::new(cfg, &[k])?;
    let mut out = est.estimate(realization, noise_seed, realization.trial)?;
    Ok(out.models.remove(0))
}
