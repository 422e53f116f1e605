//! Doppler diversity and coding gain of the MRC-like receiver in the
//! large-`N` regime.
//!
//! Natural logarithms throughout; dB values are converted explicitly.

use std::f64::consts::{LN_10, PI};

use serde::{Deserialize, Serialize};

use crate::config::{split_gamma0, SystemConfig};
use crate::error::{Error, Result};
use crate::estimation::SymbolCovariances;
use crate::quad::{integrate_doubling, Doubling};
use crate::ser::{a_eigenvalues, psk_constant};

/// Pilot/data energy split `γ_P = b γ_C^ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub b: f64,
    pub xi: f64,
}

impl PowerSplit {
    pub fn new(b: f64, xi: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() || !xi.is_finite() {
            return Err(Error::domain(format!("power split needs finite b > 0 and finite xi, got b={b}, xi={xi}")));
        }
        Ok(Self { b, xi })
    }

    /// `(γ_P, γ_C)` meeting `γ_0 = γ_C + γ_P / K` (linear `γ_0`).
    pub fn gammas(&self, gamma0: f64, k_block: usize) -> Result<(f64, f64)> {
        split_gamma0(gamma0, k_block, self.b, self.xi)
    }

    /// `cfg` with unit noise and the pilot/data energies for `γ_0` in dB.
    pub fn apply(&self, cfg: &SystemConfig, gamma0_db: f64) -> Result<SystemConfig> {
        let (gp, gc) = self.gammas(crate::config::db_to_linear(gamma0_db), cfg.k_block)?;
        Ok(SystemConfig { e_pilot: gp, e_data: gc, noise_var: 1.0, ..*cfg })
    }
}

/// Summary of the large-`N` analysis for one configuration and power split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversityReport {
    pub order: f64,
    pub gain_loss_db: f64,
    pub optimal_b: f64,
    pub min_loss_db: f64,
}

/// Spectral density of the pilot-spaced channel samples,
/// `2 / √(δ² − Ω²)` for `|Ω| < δ` and 0 elsewhere (including `|Ω| = δ`).
pub fn lambda_pp(omega: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::domain(format!("delta must be positive, got {delta}")));
    }
    Ok(if omega.abs() < delta { 2.0 / (delta * delta - omega * omega).sqrt() } else { 0.0 })
}

fn check_doppler(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    let delta = cfg.delta();
    if !(delta > 0.0) {
        return Err(Error::domain("the limit spectrum needs a positive Doppler spread"));
    }
    Ok(delta)
}

/// Limit eigenvalue for spectral density `lam`:
/// `(N_T − 1 + (N_T Λ/γ_P + Λ/γ_C + 1/(γ_P γ_C)) / Λ²)^{-1}`, 0 where `Λ = 0`.
fn d_entry(lam: f64, n_tx: usize, gp: f64, gc: f64) -> f64 {
    if lam == 0.0 {
        return 0.0;
    }
    let inner = (n_tx as f64 * lam / gp + lam / gc + 1.0 / (gp * gc)) / (lam * lam);
    1.0 / (n_tx as f64 - 1.0 + inner)
}

/// Diagonal of the limit spectrum at `Ω_n = 2π (n−1)/n_points`, with
/// frequencies folded into `(−π, π]`.
pub fn limit_spectrum(cfg: &SystemConfig, n_points: usize) -> Result<Vec<f64>> {
    if n_points == 0 {
        return Err(Error::domain("limit spectrum needs at least one point"));
    }
    let delta = check_doppler(cfg)?;
    let (gp, gc) = (cfg.gamma_p(), cfg.gamma_c());
    (0..n_points)
        .map(|i| {
            let mut omega = 2.0 * PI * i as f64 / n_points as f64;
            if omega > PI {
                omega -= 2.0 * PI;
            }
            Ok(d_entry(lambda_pp(omega, delta)?, cfg.n_tx, gp, gc))
        })
        .collect()
}

/// Closed-form large-`N` limit of `log det(I + c A) / N`.
///
/// With imperfect CSI this is the exact value of
/// `(1/2π) ∫ log(c γ_P γ_C Λ² / (γ_t Λ + 1)) dΩ` over the support of `Λ`,
/// i.e. the high-SNR form that drops the `N_T − 1` interference term and
/// the `1 +` inside the logarithm. With perfect CSI it is
/// `(δ/π) log(2 c γ_C) − (δ log 2δ − δ)/π`.
pub fn log_psi_limit(cfg: &SystemConfig, c: f64, perfect_csi: bool) -> Result<f64> {
    cfg.validate()?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain(format!("c must be positive, got {c}")));
    }
    let delta = cfg.delta();
    let gc = cfg.gamma_c();
    if delta == 0.0 {
        return Ok(0.0);
    }
    if perfect_csi {
        return Ok(delta / PI * (2.0 * c * gc).ln() - (delta * (2.0 * delta).ln() - delta) / PI);
    }
    let gp = cfg.gamma_p();
    let gt = cfg.gamma_t();
    if delta >= 2.0 * gt {
        return Err(Error::domain(format!("limit formula needs delta < 2 gamma_t (delta = {delta}, gamma_t = {gt})")));
    }
    let root = (4.0 * gt * gt - delta * delta).sqrt();
    Ok(delta / PI * (4.0 * gp * gc * c).ln()
        - (delta * (2.0 * delta).ln() - 2.0 * delta) / PI
        - delta * (2.0 * gt).ln() / PI
        - (gt - root / 2.0)
        - root / PI * (delta / root).atan())
}

/// Finite-`N` value `log det(I + c A_{t,k}) / N`.
pub fn log_psi_finite(cfg: &SystemConfig, c: f64, t: usize, k: usize) -> Result<f64> {
    cfg.check_antenna(t)?;
    let st = SymbolCovariances::new(cfg, k)?;
    let eigs = a_eigenvalues(&st, t)?;
    Ok(eigs.iter().map(|l| (c * l).ln_1p()).sum::<f64>() / cfg.n_rep as f64)
}

/// Normalized Doppler diversity order `2 f_D N_R min(ξ, 1/ξ)`.
pub fn diversity_order(f_doppler: f64, n_rx: usize, xi: f64) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(Error::domain(format!("xi must be positive, got {xi}")));
    }
    if !(f_doppler >= 0.0) || !f_doppler.is_finite() {
        return Err(Error::domain(format!("f_doppler must be non-negative, got {f_doppler}")));
    }
    let base = 2.0 * f_doppler * n_rx as f64;
    Ok(if xi <= 1.0 { base * xi } else { base / xi })
}

/// `∫_0^upper 2 log(sin θ) dθ` for `0 < upper < π`.
///
/// The logarithmic singularity at 0 is integrated in closed form
/// (`2 log θ`); the smooth remainder `2 log(sin θ / θ)` goes to Gauss–Legendre.
/// Past `π/2` the reflection `∫_0^u = −2π log 2 − ∫_0^{π−u}` keeps the
/// singularity at `π` out of the quadrature.
pub fn log_sin_integral(upper: f64) -> Result<f64> {
    if !(upper > 0.0 && upper < PI) {
        return Err(Error::domain(format!("upper limit must lie in (0, pi), got {upper}")));
    }
    if upper > PI / 2.0 {
        return Ok(-2.0 * PI * std::f64::consts::LN_2 - log_sin_integral(PI - upper)?);
    }
    let singular = 2.0 * (upper * upper.ln() - upper);
    let rule = Doubling { rel_tol: 0.0, abs_tol: 1e-12, ..Doubling::default() };
    let smooth = integrate_doubling(0.0, upper, rule, |th| 2.0 * (th.sin() / th).ln())?;
    Ok(singular + smooth.value)
}

fn to_db(natural_log: f64) -> f64 {
    10.0 * natural_log / LN_10
}

/// Lower and upper coding-gain bounds in dB for `ξ = 1`.
pub fn coding_gain_bounds(cfg: &SystemConfig, split: PowerSplit, perfect_csi: bool) -> Result<(f64, f64)> {
    if split.xi != 1.0 {
        return Err(Error::domain(format!("coding gain bounds hold for xi = 1 only, got {}", split.xi)));
    }
    PowerSplit::new(split.b, split.xi)?;
    let delta = check_doppler(cfg)?;
    let v = 1.0 - 1.0 / cfg.m_psk as f64;
    let mut log_cl = (2.0 * psk_constant(cfg.m_psk)).ln() + 1.0 - (2.0 * delta).ln();
    if !perfect_csi {
        let (k, b, nt) = (cfg.k_block as f64, split.b, cfg.n_tx as f64);
        log_cl += (k * b / ((k + b) * (nt + b))).ln();
    }
    // 1 / (2 f_D T_P π v) = 1 / (δ v)
    let log_cu = log_cl - log_sin_integral(PI * v)? / (delta * v);
    Ok((to_db(log_cl), to_db(log_cu)))
}

/// Coding gain loss from imperfect CSI, `10 log10[(K + b)(N_T + b) / (K b)]` dB.
pub fn coding_gain_loss(n_tx: usize, k_block: usize, b: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("b must be positive, got {b}")));
    }
    if n_tx == 0 || k_block == 0 {
        return Err(Error::domain("n_tx and k_block must be >= 1"));
    }
    let (k, nt) = (k_block as f64, n_tx as f64);
    Ok(10.0 * ((k + b) * (nt + b) / (k * b)).log10())
}

/// The loss-minimizing split `b = √(N_T K)`, `ξ = 1`, and its loss
/// `20 log10(1 + √(N_T / K))` dB.
pub fn optimal_power_split(n_tx: usize, k_block: usize) -> (PowerSplit, f64) {
    let (k, nt) = (k_block as f64, n_tx as f64);
    let split = PowerSplit { b: (nt * k).sqrt(), xi: 1.0 };
    (split, 20.0 * (1.0 + (nt / k).sqrt()).log10())
}

pub fn diversity_report(cfg: &SystemConfig, split: PowerSplit) -> Result<DiversityReport> {
    cfg.validate()?;
    let (best, min_loss_db) = optimal_power_split(cfg.n_tx, cfg.k_block);
    Ok(DiversityReport {
        order: diversity_order(cfg.f_doppler, cfg.n_rx, split.xi)?,
        gain_loss_db: coding_gain_loss(cfg.n_tx, cfg.k_block, split.b)?,
        optimal_b: best.b,
        min_loss_db,
    })
}

/// Finite-`N` SER exponent `−log(P) / (N T_P log γ_0)`.
pub fn ser_exponent(ser: f64, cfg: &SystemConfig, gamma0: f64) -> Result<f64> {
    if !(ser > 0.0 && ser < 1.0) || !(gamma0 > 1.0) {
        return Err(Error::domain(format!("exponent needs 0 < ser < 1 and gamma0 > 1, got {ser}, {gamma0}")));
    }
    Ok(-ser.ln() / (cfg.n_rep as f64 * cfg.pilot_interval() * gamma0.ln()))
}
