//! Finite-size linear receivers (MRC, MMSE, MRC-like): SINR, detection and
//! normalized sum rate.
//!
//! All `(N·N_R)`-sized operations go through the `I_{N_R} ⊗ (N×N)` structure
//! of the effective noise covariance. The MMSE solve uses the Woodbury
//! identity around that block-diagonal part, so it costs
//! `O(N³ + N² N_R N_T)` rather than `O((N N_R)³)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::EquivalentModel;
use crate::linalg::{cdot, norm_sqr, real_mul, KronBlock, RMat};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Receiver {
    #[serde(rename = "MRC")]
    Mrc,
    #[serde(rename = "MMSE")]
    Mmse,
    #[serde(rename = "MRC_LIKE")]
    MrcLike,
}

impl Receiver {
    pub const ALL: [Receiver; 3] = [Receiver::Mrc, Receiver::Mmse, Receiver::MrcLike];

    pub fn as_str(self) -> &'static str {
        match self {
            Receiver::Mrc => "MRC",
            Receiver::Mmse => "MMSE",
            Receiver::MrcLike => "MRC_LIKE",
        }
    }
}

impl fmt::Display for Receiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Receiver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MRC" => Ok(Receiver::Mrc),
            "MMSE" => Ok(Receiver::Mmse),
            "MRC_LIKE" => Ok(Receiver::MrcLike),
            other => Err(Error::Parse(format!("unknown receiver {other:?}"))),
        }
    }
}

/// Per-antenna SINRs and the normalized sum rate of one receiver on one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrReport {
    pub receiver: Receiver,
    pub sinr: Vec<f64>,
    pub rate: f64,
}

/// Decision statistics and MPSK decisions for every transmit antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionOutput {
    pub s_hat: Vec<Complex64>,
    pub decided: Vec<usize>,
}

/// `(1/N) Σ_t log2(1 + γ_t)`.
pub fn normalized_sum_rate(sinr: &[f64], n_rep: usize) -> f64 {
    sinr.iter().map(|g| (1.0 + g).log2()).sum::<f64>() / n_rep as f64
}

/// MPSK constellation point `exp(j 2π m / M)`.
pub fn psk_symbol(m_psk: usize, index: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * index as f64 / m_psk as f64)
}

/// Nearest MPSK point by phase (largest correlation `Re(z s_m^*)`). A
/// statistic on a decision boundary goes to the lowest tied index.
pub fn psk_decide(z: Complex64, m_psk: usize) -> usize {
    let tol = 1e-12 * z.norm();
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for m in 0..m_psk {
        let score = (z * psk_symbol(m_psk, m).conj()).re;
        if score > best_score + tol {
            best = m;
            best_score = score;
        }
    }
    best
}

fn check_t(model: &EquivalentModel, t: usize) -> Result<()> {
    if t == 0 || t > model.n_tx() {
        return Err(Error::domain(format!("antenna index {t} outside 1..={}", model.n_tx())));
    }
    Ok(())
}

fn block_apply(block: &RMat, n: usize, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(v.len());
    for chunk in v.chunks(n) {
        out.extend(real_mul(block, chunk));
    }
    out
}

/// `|ĥ_t^H ĥ_t|² / ĥ_t^H (Ĥ_[t] Ĥ_[t]^H + R̃_k) ĥ_t`.
pub fn mrc_sinr(model: &EquivalentModel, t: usize) -> Result<f64> {
    check_t(model, t)?;
    let h = model.column(t);
    let power = norm_sqr(h);
    if power == 0.0 {
        return Ok(0.0);
    }
    let n = model.n_rep();
    let mut den = cdot(h, &block_apply(&model.stats.r_tilde_total, n, h)).re;
    for l in (1..=model.n_tx()).filter(|&l| l != t) {
        den += cdot(h, model.column(l)).norm_sqr();
    }
    Ok(power * power / den)
}

/// Pieces of `(Ĥ_[t] Ĥ_[t]^H + R̃_k)^{-1} ĥ_t` via Woodbury.
struct MmseSolve {
    /// `(Ĥ_[t] Ĥ_[t]^H + R̃_k)^{-1} ĥ_t`
    filter: Vec<Complex64>,
    sinr: f64,
}

fn mmse_solve(model: &EquivalentModel, t: usize) -> Result<MmseSolve> {
    let n = model.n_rep();
    let inv = model.stats.r_tilde_total_inv();
    let h = model.column(t);
    let x = block_apply(inv, n, h);
    let others: Vec<usize> = (1..=model.n_tx()).filter(|&l| l != t).collect();
    let base = cdot(h, &x).re;
    if others.is_empty() {
        return Ok(MmseSolve { filter: x, sinr: base.max(0.0) });
    }
    let v: Vec<Vec<Complex64>> = others.iter().map(|&l| block_apply(inv, n, model.column(l))).collect();
    let m = others.len();
    let mut g = DMatrix::<Complex64>::identity(m, m);
    for (i, &li) in others.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            g[(i, j)] += cdot(model.column(li), vj);
        }
    }
    let c = DMatrix::<Complex64>::from_iterator(m, 1, others.iter().map(|&l| cdot(model.column(l), &x)));
    let chol =
        g.cholesky().ok_or_else(|| Error::numerical("MMSE interference Gram matrix is not positive definite"))?;
    let coef = chol.solve(&c);
    let correction: Complex64 = c.iter().zip(coef.iter()).map(|(a, b)| a.conj() * b).sum();
    let mut filter = x;
    for (j, vj) in v.iter().enumerate() {
        let a = coef[(j, 0)];
        for (f, z) in filter.iter_mut().zip(vj) {
            *f -= a * z;
        }
    }
    Ok(MmseSolve { filter, sinr: (base - correction.re).max(0.0) })
}

/// `ĥ_t^H (Ĥ_[t] Ĥ_[t]^H + R̃_k)^{-1} ĥ_t`.
pub fn mmse_sinr(model: &EquivalentModel, t: usize) -> Result<f64> {
    check_t(model, t)?;
    Ok(mmse_solve(model, t)?.sinr)
}

/// Whitened columns `h̄_l = R_{W,t,k} ĥ_l` for every `l`.
fn whitened_columns(model: &EquivalentModel, t: usize) -> Vec<Vec<Complex64>> {
    let n = model.n_rep();
    let w = model.stats.whitener(t);
    model.h_hat.iter().map(|col| block_apply(w, n, col)).collect()
}

/// SINR after statistical whitening of the interference-plus-noise followed by MRC.
pub fn mrc_like_sinr(model: &EquivalentModel, t: usize) -> Result<f64> {
    check_t(model, t)?;
    let bars = whitened_columns(model, t);
    let hb = &bars[t - 1];
    let power = norm_sqr(hb);
    if power == 0.0 {
        return Ok(0.0);
    }
    let n = model.n_rep();
    let w = model.stats.whitener(t);
    let noise_block = w * &model.stats.r_tilde_total * w.transpose();
    let mut den = cdot(hb, &block_apply(&noise_block, n, hb)).re;
    for (l, col) in bars.iter().enumerate() {
        if l + 1 != t {
            den += cdot(hb, col).norm_sqr();
        }
    }
    Ok(power * power / den)
}

pub fn sinr(model: &EquivalentModel, receiver: Receiver, t: usize) -> Result<f64> {
    match receiver {
        Receiver::Mrc => mrc_sinr(model, t),
        Receiver::Mmse => mmse_sinr(model, t),
        Receiver::MrcLike => mrc_like_sinr(model, t),
    }
}

pub fn sinr_report(model: &EquivalentModel, receiver: Receiver) -> Result<SinrReport> {
    let sinr = (1..=model.n_tx()).map(|t| sinr(model, receiver, t)).collect::<Result<Vec<_>>>()?;
    let rate = normalized_sum_rate(&sinr, model.n_rep());
    Ok(SinrReport { receiver, sinr, rate })
}

/// Linear detection of all streams from `y` (length N·N_R) followed by
/// MPSK phase decisions.
pub fn detect(model: &EquivalentModel, y: &[Complex64], receiver: Receiver) -> Result<DetectionOutput> {
    let (rows, _) = model.shape();
    if y.len() != rows {
        return Err(Error::domain(format!("received vector has length {}, expected {rows}", y.len())));
    }
    let n = model.n_rep();
    let m_psk = model.stats.m_psk;
    let mut s_hat = Vec::with_capacity(model.n_tx());
    for t in 1..=model.n_tx() {
        let stat = match receiver {
            Receiver::Mrc => cdot(model.column(t), y),
            Receiver::Mmse => cdot(&mmse_solve(model, t)?.filter, y),
            Receiver::MrcLike => {
                let w = model.stats.whitener(t);
                let hb = block_apply(w, n, model.column(t));
                let yb = block_apply(w, n, y);
                cdot(&hb, &yb) * model.stats.e_data.sqrt()
            }
        };
        s_hat.push(stat);
    }
    let decided = s_hat.iter().map(|&z| psk_decide(z, m_psk)).collect();
    Ok(DetectionOutput { s_hat, decided })
}

/// `R_{W,t,k}` in structured form (test and oracle use).
pub fn whitener_blk(model: &EquivalentModel, t: usize) -> KronBlock {
    KronBlock::new(model.stats.whitener(t).clone(), model.n_rx())
}
