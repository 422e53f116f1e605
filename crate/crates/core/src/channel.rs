//! Time-correlated Rayleigh channel: Bessel autocorrelation, Toeplitz
//! covariances and seeded sampling of frame realizations.

use std::f64::consts::PI;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_jittered, toeplitz, RMat};
use crate::rng::{complex_normal, substream, Purpose};
use crate::special::j0;
use crate::Complex64;

/// Channel autocorrelation between two instants `lag` symbols apart.
pub fn autocorrelation(cfg: &SystemConfig, lag: f64) -> f64 {
    j0(2.0 * PI * cfg.f_doppler * lag.abs() * cfg.t_symbol)
}

/// `ρ_n = J0(2π f_D n T_P)`.
pub fn pilot_correlation(cfg: &SystemConfig, n: usize) -> f64 {
    autocorrelation(cfg, (n * cfg.slots_per_block()) as f64)
}

/// `τ_{t,n}`: correlation between the data instant of symbol `k` in one
/// repetition and antenna `t`'s pilot `n` repetitions later.
pub fn cross_correlation(cfg: &SystemConfig, t: usize, k: usize, n: i64) -> f64 {
    let lag = (cfg.n_tx + k) as i64 - t as i64 - n * cfg.slots_per_block() as i64;
    autocorrelation(cfg, lag as f64)
}

/// Toeplitz pilot covariance `R_P` (N × N) with first column `ρ_0 .. ρ_{N-1}`.
pub fn build_pilot_cov(cfg: &SystemConfig) -> RMat {
    let col: Vec<f64> = (0..cfg.n_rep).map(|n| pilot_correlation(cfg, n)).collect();
    toeplitz(&col, &col)
}

/// Toeplitz data/pilot cross-covariance `R_{P,t,k} = E[h_{t,r,k} h_{P,t,r}^H]`.
pub fn build_cross_cov(cfg: &SystemConfig, t: usize, k: usize) -> Result<RMat> {
    cfg.check_antenna(t)?;
    cfg.check_symbol(k)?;
    let col: Vec<f64> = (0..cfg.n_rep).map(|n| cross_correlation(cfg, t, k, -(n as i64))).collect();
    let row: Vec<f64> = (0..cfg.n_rep).map(|n| cross_correlation(cfg, t, k, n as i64)).collect();
    Ok(toeplitz(&col, &row))
}

/// One frame's channel coefficients at the pilot and requested data instants.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub n_tx: usize,
    pub n_rx: usize,
    /// Requested data symbol indices (1-based), in request order.
    pub k_set: Vec<usize>,
    /// `h_pilot[t-1][r-1]`, length N.
    pub h_pilot: Vec<Vec<Vec<Complex64>>>,
    /// `h_data[t-1][r-1][i]` for `k = k_set[i]`, length N.
    pub h_data: Vec<Vec<Vec<Vec<Complex64>>>>,
    pub seed: u64,
    pub trial: u64,
}

impl ChannelRealization {
    pub fn pilot(&self, t: usize, r: usize) -> &[Complex64] {
        &self.h_pilot[t - 1][r - 1]
    }

    /// Data-instant channel vector `h_{t,r,k}`; `None` if `k` was not sampled.
    pub fn data(&self, t: usize, r: usize, k: usize) -> Option<&[Complex64]> {
        let i = self.k_set.iter().position(|&kk| kk == k)?;
        Some(&self.h_data[t - 1][r - 1][i])
    }
}

/// Reusable sampler: holds one lower-triangular factor per transmit antenna
/// of the joint covariance over that antenna's pilot instants and the
/// requested data instants.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    cfg: SystemConfig,
    k_set: Vec<usize>,
    factors: Vec<RMat>,
    jitter: f64,
}

impl ChannelSampler {
    pub fn new(cfg: &SystemConfig, k_set: &[usize]) -> Result<Self> {
        cfg.validate()?;
        for &k in k_set {
            cfg.check_symbol(k)?;
        }
        let timing = cfg.timing();
        let mut factors = Vec::with_capacity(cfg.n_tx);
        let mut jitter: f64 = 0.0;
        for t in 1..=cfg.n_tx {
            let slots: Vec<usize> =
                timing.pilot_slots(t).chain(k_set.iter().flat_map(|&k| timing.data_slots(k))).collect();
            let cov =
                RMat::from_fn(slots.len(), slots.len(), |i, j| autocorrelation(cfg, slots[i] as f64 - slots[j] as f64));
            let (chol, used) = cholesky_jittered(&cov).map_err(|e| match e {
                Error::Numerical(m) => Error::Numerical(format!("channel covariance for antenna {t}: {m}")),
                other => other,
            })?;
            jitter = jitter.max(used);
            factors.push(chol.l());
        }
        Ok(Self { cfg: *cfg, k_set: k_set.to_vec(), factors, jitter })
    }

    /// Largest diagonal jitter needed to factor the covariances.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn k_set(&self) -> &[usize] {
        &self.k_set
    }

    /// Draws the realization for `trial` under `seed`. Each `(t, r)` pair
    /// uses its own substream.
    pub fn sample(&self, seed: u64, trial: u64) -> ChannelRealization {
        let n = self.cfg.n_rep;
        let mut h_pilot = Vec::with_capacity(self.cfg.n_tx);
        let mut h_data = Vec::with_capacity(self.cfg.n_tx);
        let mut white = Vec::new();
        let mut joint = Vec::new();
        for (ti, l) in self.factors.iter().enumerate() {
            let dim = l.nrows();
            let mut per_r_pilot = Vec::with_capacity(self.cfg.n_rx);
            let mut per_r_data = Vec::with_capacity(self.cfg.n_rx);
            for ri in 0..self.cfg.n_rx {
                let mut rng = substream(seed, trial, Purpose::Channel, ti + 1, ri + 1);
                white.clear();
                white.extend((0..dim).map(|_| complex_normal(&mut rng)));
                joint.clear();
                joint.resize(dim, Complex64::new(0.0, 0.0));
                for i in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..=i {
                        acc += white[j] * l[(i, j)];
                    }
                    joint[i] = acc;
                }
                per_r_pilot.push(joint[..n].to_vec());
                per_r_data.push(joint[n..].chunks(n).map(<[Complex64]>::to_vec).collect());
            }
            h_pilot.push(per_r_pilot);
            h_data.push(per_r_data);
        }
        ChannelRealization {
            n_tx: self.cfg.n_tx,
            n_rx: self.cfg.n_rx,
            k_set: self.k_set.clone(),
            h_pilot,
            h_data,
            seed,
            trial,
        }
    }
}

/// One seeded realization covering the symbols in `k_set`.
pub fn sample_channel(cfg: &SystemConfig, k_set: &[usize], seed: u64) -> Result<ChannelRealization> {
    Ok(ChannelSampler::new(cfg, k_set)?.sample(seed, 0))
}
