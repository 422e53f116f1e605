//! Large-dimension approximations of the receiver SINRs and rates.
//!
//! MRC and MRC-like have closed forms in traces of the estimate and error
//! covariances. MMSE uses a deterministic-equivalent fixed point in the
//! whitened domain. Every covariance has the form `I_{N_R} ⊗ B`, so all
//! iterations run on `N × N` blocks and traces pick up a factor `N_R`.

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::estimation::SymbolCovariances;
use crate::linalg::{cholesky, sym_inv_sqrt, trace_product, KronBlock, RMat};
use crate::receivers::{normalized_sum_rate, Receiver};

/// Default stopping threshold on `Σ_l |e_l − e_l'|²`.
pub const DEQ_TOL: f64 = 1e-10;
/// Iteration cap for the fixed point.
pub const DEQ_MAX_ITER: usize = 1000;

/// Converged state of the deterministic-equivalent iteration for one `(t, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeqSolution {
    /// Interfering antenna indices `l ≠ t` (1-based), aligned with `e`.
    pub interferers: Vec<usize>,
    pub e: Vec<f64>,
    pub t_matrix: KronBlock,
    /// `Tr(Q T)`.
    pub sinr_deq: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// `N_R Tr²(R̂_t) / [Σ_{l≠t} Tr(R̂_l R̂_t) + Tr(R̂_t (Σ_l R̃_l + I/γ_C))]`.
pub fn mrc_asymptotic_sinr(cfg: &SystemConfig, t: usize, k: usize) -> Result<f64> {
    cfg.check_antenna(t)?;
    mrc_sinr_from(&SymbolCovariances::new(cfg, k)?, t)
}

pub(crate) fn mrc_sinr_from(st: &SymbolCovariances, t: usize) -> Result<f64> {
    let rt = &st.r_hat[t - 1];
    let tr = rt.trace();
    if tr <= 0.0 {
        return Ok(0.0);
    }
    let mut den = trace_product(rt, &st.r_tilde_total);
    for (l, rl) in st.r_hat.iter().enumerate() {
        if l + 1 != t {
            den += trace_product(rl, rt);
        }
    }
    Ok(st.n_rx as f64 * tr * tr / den)
}

/// `N_R Tr(R̂_t (Σ_{l≠t} R̂_l + Σ_l R̃_l + I/γ_C)^{-1})`.
pub fn mrc_like_asymptotic_sinr(cfg: &SystemConfig, t: usize, k: usize) -> Result<f64> {
    cfg.check_antenna(t)?;
    mrc_like_sinr_from(&SymbolCovariances::new(cfg, k)?, t)
}

pub(crate) fn mrc_like_sinr_from(st: &SymbolCovariances, t: usize) -> Result<f64> {
    let s = st.interference_block(t);
    let x = cholesky(&s, "interference-plus-noise block")?.solve(&st.r_hat[t - 1]);
    Ok(st.n_rx as f64 * x.trace())
}

/// Deterministic equivalent of the MMSE SINR with default tolerance and zero start.
pub fn deq_fixed_point(cfg: &SystemConfig, t: usize, k: usize, tol: f64) -> Result<DeqSolution> {
    cfg.check_antenna(t)?;
    let st = SymbolCovariances::new(cfg, k)?;
    deq_from(&st, t, tol, None)
}

/// As [`deq_fixed_point`] but starting every `e_l` from `init`.
pub fn deq_fixed_point_from(cfg: &SystemConfig, t: usize, k: usize, tol: f64, init: f64) -> Result<DeqSolution> {
    cfg.check_antenna(t)?;
    let st = SymbolCovariances::new(cfg, k)?;
    deq_from(&st, t, tol, Some(init))
}

/// Whitened blocks `Q = W R̂_t W` and `Φ_l = W R̂_l W`, `W = (Σ R̃ + I/γ_C)^{-1/2}`.
pub(crate) fn whitened_blocks(st: &SymbolCovariances, t: usize) -> Result<(RMat, Vec<(usize, RMat)>)> {
    let w = sym_inv_sqrt(&st.r_tilde_total)?;
    let q = &w * &st.r_hat[t - 1] * &w;
    let phis = (1..=st.n_tx()).filter(|&l| l != t).map(|l| (l, &w * &st.r_hat[l - 1] * &w)).collect();
    Ok((q, phis))
}

pub(crate) fn deq_from(st: &SymbolCovariances, t: usize, tol: f64, init: Option<f64>) -> Result<DeqSolution> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("fixed-point tolerance must be positive, got {tol}")));
    }
    let (q, phis) = whitened_blocks(st, t)?;
    let (interferers, phis): (Vec<usize>, Vec<RMat>) = phis.into_iter().unzip();
    let core = deq_iterate(&q, &phis, st.n_rx, tol, init.unwrap_or(0.0), DEQ_MAX_ITER)?;
    Ok(DeqSolution {
        interferers,
        e: core.e,
        t_matrix: KronBlock::new(core.t_block, st.n_rx),
        sinr_deq: core.sinr,
        iterations: core.iterations,
        residual: core.residual,
    })
}

/// Raw fixed-point output on `N × N` blocks.
#[derive(Debug, Clone)]
pub struct DeqCore {
    pub e: Vec<f64>,
    pub t_block: RMat,
    pub sinr: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Iterates `T = (Σ_l Φ_l / (1 + e_l) + I)^{-1}`, `e_l = reps · Tr(Φ_l T)`
/// until `Σ_l |e_l − e_l'|² ≤ tol`; returns `reps · Tr(Q T)` as the SINR.
///
/// `reps = 1` with fully materialized matrices gives the unstructured
/// computation, which the tests use as an oracle.
pub fn deq_iterate(q: &RMat, phis: &[RMat], reps: usize, tol: f64, init: f64, max_iter: usize) -> Result<DeqCore> {
    let n = q.nrows();
    let r = reps as f64;
    let mut e = vec![init.max(0.0); phis.len()];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut m = RMat::identity(n, n);
        for (phi, el) in phis.iter().zip(&e) {
            m += phi / (1.0 + el);
        }
        let t_block = cholesky(&m, "fixed-point system matrix")?.inverse();
        let next: Vec<f64> = phis.iter().map(|phi| (r * trace_product(phi, &t_block)).max(0.0)).collect();
        residual = e.iter().zip(&next).map(|(a, b)| (a - b) * (a - b)).sum();
        e = next;
        if residual <= tol {
            let sinr = r * trace_product(q, &t_block);
            return Ok(DeqCore { e, t_block, sinr, iterations: it, residual });
        }
    }
    Err(Error::Convergence { iterations: max_iter, residual })
}

/// Asymptotic SINR of every transmit antenna for one symbol's statistics.
pub(crate) fn asymptotic_sinrs(st: &SymbolCovariances, receiver: Receiver) -> Result<Vec<f64>> {
    (1..=st.n_tx())
        .map(|t| match receiver {
            Receiver::Mrc => mrc_sinr_from(st, t),
            Receiver::MrcLike => mrc_like_sinr_from(st, t),
            Receiver::Mmse => deq_from(st, t, DEQ_TOL, None).map(|s| s.sinr_deq),
        })
        .collect()
}

/// `(1/N) Σ_t log2(1 + γ̄_t)` at data symbol `k`.
pub fn asymptotic_rate(cfg: &SystemConfig, receiver: Receiver, k: usize) -> Result<f64> {
    let st = SymbolCovariances::new(cfg, k)?;
    Ok(normalized_sum_rate(&asymptotic_sinrs(&st, receiver)?, cfg.n_rep))
}

/// Asymptotic rate averaged over the data symbols in `k_set` (all of `1..=K` when `None`).
pub fn mean_asymptotic_rate(cfg: &SystemConfig, receiver: Receiver, k_set: Option<&[usize]>) -> Result<f64> {
    let all: Vec<usize> = (1..=cfg.k_block).collect();
    let ks = k_set.unwrap_or(&all);
    if ks.is_empty() {
        return Err(Error::domain("rate average needs at least one data symbol index"));
    }
    let mut sum = 0.0;
    for &k in ks {
        sum += asymptotic_rate(cfg, receiver, k)?;
    }
    Ok(sum / ks.len() as f64)
}
