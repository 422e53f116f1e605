//! Scenario parameters and frame timing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Converts a dB value to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Maximum Doppler shift `v f_c / c` for a speed in km/h.
pub fn speed_to_doppler(speed_kmh: f64, carrier_hz: f64) -> Result<f64> {
    if !(speed_kmh >= 0.0) || !speed_kmh.is_finite() {
        return Err(Error::domain(format!("speed must be finite and non-negative, got {speed_kmh}")));
    }
    if !(carrier_hz > 0.0) || !carrier_hz.is_finite() {
        return Err(Error::domain(format!("carrier must be finite and positive, got {carrier_hz}")));
    }
    Ok(speed_kmh / 3.6 * carrier_hz / SPEED_OF_LIGHT)
}

/// All parameters of one link scenario.
///
/// Antenna, symbol and repetition indices used throughout the crate are
/// 1-based where they mirror frame positions (`t`, `k`, `n`) and 0-based for
/// storage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n_tx: usize,
    pub n_rx: usize,
    /// Data symbols per block between consecutive pilot groups.
    pub k_block: usize,
    /// Repetitions of pilots and data in a frame.
    pub n_rep: usize,
    /// Maximum Doppler shift in Hz.
    pub f_doppler: f64,
    /// Symbol interval in seconds.
    pub t_symbol: f64,
    pub e_pilot: f64,
    pub e_data: f64,
    pub noise_var: f64,
    pub m_psk: usize,
}

impl Default for SystemConfig {
    /// 1e5 symbols/s, 4x8 antennas, K = 16, N = 15, 4PSK, both SNRs 10 dB,
    /// 200 Hz Doppler (113.6 km/h at 1.9 GHz).
    fn default() -> Self {
        Self {
            n_tx: 4,
            n_rx: 8,
            k_block: 16,
            n_rep: 15,
            f_doppler: 200.0,
            t_symbol: 1e-5,
            e_pilot: 10.0,
            e_data: 10.0,
            noise_var: 1.0,
            m_psk: 4,
        }
    }
}

impl SystemConfig {
    /// Checks every invariant and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        for (name, v) in [("n_tx", self.n_tx), ("n_rx", self.n_rx), ("k_block", self.k_block), ("n_rep", self.n_rep)] {
            if v < 1 {
                bad.push(format!("{name} must be >= 1"));
            }
        }
        if self.m_psk < 2 || !self.m_psk.is_power_of_two() {
            bad.push(format!("m_psk must be a power of two >= 2, got {}", self.m_psk));
        }
        if !(self.f_doppler >= 0.0) || !self.f_doppler.is_finite() {
            bad.push(format!("f_doppler must be finite and >= 0, got {}", self.f_doppler));
        }
        for (name, v) in [
            ("t_symbol", self.t_symbol),
            ("e_pilot", self.e_pilot),
            ("e_data", self.e_data),
            ("noise_var", self.noise_var),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                bad.push(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    /// Pilot spacing `T_P = (N_T + K) T`.
    pub fn pilot_interval(&self) -> f64 {
        (self.n_tx + self.k_block) as f64 * self.t_symbol
    }

    /// Slots per repetition, `N_T + K`.
    pub fn slots_per_block(&self) -> usize {
        self.n_tx + self.k_block
    }

    /// True when `(N_T + K) T <= 0.5 / f_D`, the pilot spacing needed for
    /// accurate interpolation of the time-varying channel.
    pub fn is_estimation_valid(&self) -> bool {
        self.f_doppler == 0.0 || self.pilot_interval() <= 0.5 / self.f_doppler
    }

    pub fn gamma_p(&self) -> f64 {
        self.e_pilot / self.noise_var
    }

    pub fn gamma_c(&self) -> f64 {
        self.e_data / self.noise_var
    }

    /// Normalized Doppler `2π f_D T_P`.
    pub fn delta(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.f_doppler * self.pilot_interval()
    }

    /// `N_T γ_C + γ_P`.
    pub fn gamma_t(&self) -> f64 {
        self.n_tx as f64 * self.gamma_c() + self.gamma_p()
    }

    /// Energy per coded data symbol relative to noise, `γ_0 = (E_P / K + E_C) / σ²`.
    pub fn gamma_0(&self) -> f64 {
        (self.e_pilot / self.k_block as f64 + self.e_data) / self.noise_var
    }

    /// Sets both SNRs (dB) with unit noise variance.
    pub fn with_snr_db(mut self, pilot_db: f64, data_db: f64) -> Self {
        self.noise_var = 1.0;
        self.e_pilot = db_to_linear(pilot_db);
        self.e_data = db_to_linear(data_db);
        self
    }

    pub fn timing(&self) -> FrameTiming {
        FrameTiming { n_tx: self.n_tx, k_block: self.k_block, n_rep: self.n_rep }
    }

    pub(crate) fn check_antenna(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.n_tx {
            return Err(Error::domain(format!("antenna index {t} outside 1..={}", self.n_tx)));
        }
        Ok(())
    }

    pub(crate) fn check_symbol(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.k_block {
            return Err(Error::domain(format!("symbol index {k} outside 1..={}", self.k_block)));
        }
        Ok(())
    }
}

/// Slot indices of pilots and data within a frame (1-based slots).
///
/// Each repetition `n` starts with `N_T` pilot slots (antenna `t` alone in
/// slot `t`) followed by `K` data slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameTiming {
    pub n_tx: usize,
    pub k_block: usize,
    pub n_rep: usize,
}

impl FrameTiming {
    pub fn pilot_index(&self, t: usize, n: usize) -> usize {
        t + (n - 1) * (self.n_tx + self.k_block)
    }

    pub fn data_index(&self, k: usize, n: usize) -> usize {
        self.n_tx + k + (n - 1) * (self.n_tx + self.k_block)
    }

    pub fn frame_len(&self) -> usize {
        self.n_rep * (self.n_tx + self.k_block)
    }

    pub fn pilot_slots(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n_rep).map(move |n| self.pilot_index(t, n))
    }

    pub fn data_slots(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        (1..=self.n_rep).map(move |n| self.data_index(k, n))
    }
}

/// Splits a coded-symbol SNR `γ_0` into `(γ_P, γ_C)` under `γ_P = b γ_C^ξ`
/// and `γ_0 = γ_C + γ_P / K`.
pub fn split_gamma0(gamma0: f64, k_block: usize, b: f64, xi: f64) -> Result<(f64, f64)> {
    if !(gamma0 > 0.0) || !(b > 0.0) || !xi.is_finite() {
        return Err(Error::domain(format!("invalid power split: gamma0={gamma0}, b={b}, xi={xi}")));
    }
    let kf = k_block as f64;
    let total = |gc: f64| gc + b * gc.powf(xi) / kf;
    // total() is increasing in gc; bisect on [0, gamma0].
    let (mut lo, mut hi) = (0.0, gamma0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > gamma0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let gc = 0.5 * (lo + hi);
    Ok((b * gc.powf(xi), gc))
}
