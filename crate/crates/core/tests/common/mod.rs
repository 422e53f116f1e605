//! Dense, unstructured oracles shared by the integration tests.
#![allow(dead_code)]

use hsmimo::asymptotics::{deq_iterate, DeqCore, DEQ_MAX_ITER};
use hsmimo::channel::{build_cross_cov, build_pilot_cov};
use hsmimo::estimation::SymbolCovariances;
use hsmimo::linalg::{sym_inv_sqrt, RMat};
use hsmimo::{Complex64, KronBlock, SystemConfig};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn complexify(m: &RMat) -> DMatrix<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

pub fn dense(m: &RMat, reps: usize) -> RMat {
    KronBlock::new(m.clone(), reps).to_dense()
}

/// `√E_P R_{P,t,k} X^H (E_P X R_P X^H + σ² I)^{-1} y` with `X = diag(p)`,
/// built and inverted as full complex matrices.
pub fn direct_estimate(
    cfg: &SystemConfig,
    t: usize,
    k: usize,
    pilots: &[Complex64],
    y: &[Complex64],
) -> DVector<Complex64> {
    let n = cfg.n_rep;
    let x = DMatrix::from_diagonal(&DVector::from_column_slice(pilots));
    let xh = x.adjoint();
    let r_p = complexify(&build_pilot_cov(cfg));
    let r_ptk = complexify(&build_cross_cov(cfg, t, k).unwrap());
    let sys = &x * &r_p * &xh * Complex64::new(cfg.e_pilot, 0.0)
        + DMatrix::<Complex64>::identity(n, n) * Complex64::new(cfg.noise_var, 0.0);
    let inv = sys.try_inverse().unwrap();
    r_ptk * xh * inv * DVector::from_column_slice(y) * Complex64::new(cfg.e_pilot.sqrt(), 0.0)
}

/// Deterministic-equivalent solution for antenna `t` at symbol `k`,
/// iterated on dense `N N_R`-sized matrices whitened by the dense
/// `(I ⊗ Σ R̃ + I/γ_C)^{-1/2}`.
pub fn dense_deq(cfg: &SystemConfig, t: usize, k: usize, tol: f64) -> DeqCore {
    let st = SymbolCovariances::new(cfg, k).unwrap();
    let w = sym_inv_sqrt(&dense(&st.r_tilde_total, cfg.n_rx)).unwrap();
    let q = &w * dense(&st.r_hat[t - 1], cfg.n_rx) * &w;
    let phis: Vec<RMat> =
        (1..=cfg.n_tx).filter(|&l| l != t).map(|l| &w * dense(&st.r_hat[l - 1], cfg.n_rx) * &w).collect();
    deq_iterate(&q, &phis, 1, tol, 0.0, DEQ_MAX_ITER).unwrap()
}

/// Sample mean and standard error of `exp(μ β)`, `β = x^H (I ⊗ W) x`,
/// `x ~ CN(0, I_reps ⊗ C)`.
pub fn empirical_mgf(cov: &RMat, weight: &RMat, reps: usize, mu: f64, draws: usize, seed: u64) -> (f64, f64) {
    let l = cov.clone().cholesky().unwrap().l();
    let n = cov.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..draws {
        let mut beta = 0.0;
        // Real and imaginary parts are independent N(0, C/2).
        for _ in 0..2 * reps {
            let z = DVector::<f64>::from_fn(n, |_, _| {
                let v: f64 = StandardNormal.sample(&mut rng);
                v * std::f64::consts::FRAC_1_SQRT_2
            });
            let x = &l * z;
            beta += (x.transpose() * weight * &x)[(0, 0)];
        }
        let f = (mu * beta).exp();
        s += f;
        s2 += f * f;
    }
    let mean = s / draws as f64;
    (mean, ((s2 / draws as f64 - mean * mean) / draws as f64).sqrt())
}
