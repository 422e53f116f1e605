//! Full-frame link simulation: channel draw, pilot reception, estimation,
//! data transmission over the true channel and linear detection.
//!
//! Trials run on the rayon pool. Per-trial results are collected in trial
//! order and reduced sequentially, so totals do not depend on the number of
//! worker threads.

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{ChannelRealization, ChannelSampler};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::estimation::{EquivalentModel, FrameEstimator};
use crate::receivers::{detect, psk_symbol, sinr_report, Receiver};
use crate::rng::{complex_normal, substream, Purpose};
use crate::Complex64;

/// One simulated frame: the true channel and the per-symbol equivalent models.
#[derive(Debug, Clone)]
pub struct Frame {
    pub channel: ChannelRealization,
    pub models: Vec<EquivalentModel>,
}

/// Data transmitted in one slot group `k` and the matching received vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    /// Constellation index sent from each transmit antenna.
    pub symbols: Vec<usize>,
    /// `y_k`, stacked per receive antenna (length N·N_R).
    pub y: Vec<Complex64>,
}

/// Frame simulator with channel factors and estimation filters precomputed.
#[derive(Debug, Clone)]
pub struct LinkSimulator {
    cfg: SystemConfig,
    sampler: ChannelSampler,
    estimator: FrameEstimator,
}

impl LinkSimulator {
    /// Simulator covering the data symbols in `k_set`.
    pub fn new(cfg: &SystemConfig, k_set: &[usize]) -> Result<Self> {
        if k_set.is_empty() {
            return Err(Error::domain("link simulation needs at least one data symbol index"));
        }
        Ok(Self { cfg: *cfg, sampler: ChannelSampler::new(cfg, k_set)?, estimator: FrameEstimator::new(cfg, k_set)? })
    }

    /// Simulator covering every data symbol `1..=K`.
    pub fn all_symbols(cfg: &SystemConfig) -> Result<Self> {
        let k_set: Vec<usize> = (1..=cfg.k_block).collect();
        Self::new(cfg, &k_set)
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn k_set(&self) -> &[usize] {
        self.sampler.k_set()
    }

    pub fn frame(&self, seed: u64, trial: u64) -> Result<Frame> {
        let channel = self.sampler.sample(seed, trial);
        let models = self.estimator.estimate(&channel, seed, trial)?.models;
        Ok(Frame { channel, models })
    }

    /// Sends random MPSK symbols at data symbol `k` through the true channel:
    /// `y = √E_C H_k s + z`.
    pub fn transmit(&self, channel: &ChannelRealization, k: usize, seed: u64, trial: u64) -> Result<Transmission> {
        let cfg = &self.cfg;
        let n = cfg.n_rep;
        let mut sym_rng = substream(seed, trial, Purpose::Symbols, k, 0);
        let symbols: Vec<usize> = (0..cfg.n_tx).map(|_| sym_rng.random_range(0..cfg.m_psk)).collect();
        let sqrt_ec = cfg.e_data.sqrt();
        let sigma = cfg.noise_var.sqrt();
        let mut y = Vec::with_capacity(n * cfg.n_rx);
        for r in 1..=cfg.n_rx {
            let mut noise = substream(seed, trial, Purpose::DataNoise, k, r);
            let mut block = vec![Complex64::new(0.0, 0.0); n];
            for (t, &m) in symbols.iter().enumerate() {
                let s = psk_symbol(cfg.m_psk, m) * sqrt_ec;
                let h = channel
                    .data(t + 1, r, k)
                    .ok_or_else(|| Error::domain(format!("realization does not cover symbol {k}")))?;
                for (b, hv) in block.iter_mut().zip(h) {
                    *b += hv * s;
                }
            }
            for b in block.iter_mut() {
                *b += complex_normal(&mut noise) * sigma;
            }
            y.extend(block);
        }
        Ok(Transmission { symbols, y })
    }

    /// Normalized sum rate of each receiver (in `receivers` order) for one
    /// trial, averaged over the simulated symbol indices.
    pub fn rate_trial(&self, receivers: &[Receiver], seed: u64, trial: u64) -> Result<Vec<f64>> {
        let frame = self.frame(seed, trial)?;
        let mut out = vec![0.0; receivers.len()];
        for model in &frame.models {
            for (o, &rx) in out.iter_mut().zip(receivers) {
                *o += sinr_report(model, rx)?.rate;
            }
        }
        let nk = frame.models.len() as f64;
        Ok(out.into_iter().map(|v| v / nk).collect())
    }

    /// Symbol errors of each receiver (in `receivers` order) over all
    /// `(t, k)` decisions of one trial.
    pub fn error_trial(&self, receivers: &[Receiver], seed: u64, trial: u64) -> Result<Vec<u64>> {
        let frame = self.frame(seed, trial)?;
        let mut errors = vec![0u64; receivers.len()];
        for model in &frame.models {
            let tx = self.transmit(&frame.channel, model.k, seed, trial)?;
            for (e, &rx) in errors.iter_mut().zip(receivers) {
                let out = detect(model, &tx.y, rx)?;
                *e += out.decided.iter().zip(&tx.symbols).filter(|(a, b)| a != b).count() as u64;
            }
        }
        Ok(errors)
    }

    /// Decisions made per trial, `N_T · |k_set|`.
    pub fn decisions_per_trial(&self) -> u64 {
        (self.cfg.n_tx * self.k_set().len()) as u64
    }
}

/// Monte Carlo estimate of a mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub receiver: Receiver,
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Runs `trials` independent trials in parallel and returns their outputs in
/// trial order.
pub(crate) fn run_trials<T, F>(trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

/// Mean and standard error of a sample, summed in index order.
pub(crate) fn mean_and_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    if n == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, f64::NAN);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Ergodic normalized sum rate per receiver, averaged over the data symbol
/// indices in `k_set` (all of `1..=K` when `None`).
pub fn monte_carlo_rate(
    cfg: &SystemConfig,
    receivers: &[Receiver],
    k_set: Option<&[usize]>,
    trials: u64,
    seed: u64,
) -> Result<Vec<RateEstimate>> {
    if trials == 0 {
        return Err(Error::domain("Monte Carlo rate needs at least one trial"));
    }
    let sim = match k_set {
        Some(ks) => LinkSimulator::new(cfg, ks)?,
        None => LinkSimulator::all_symbols(cfg)?,
    };
    let per_trial = run_trials(trials, |i| sim.rate_trial(receivers, seed, i))?;
    Ok(receivers
        .iter()
        .enumerate()
        .map(|(j, &receiver)| {
            let (mean, std_error) = mean_and_se(per_trial.iter().map(|v| v[j]));
            RateEstimate { receiver, mean, std_error, trials }
        })
        .collect())
}
