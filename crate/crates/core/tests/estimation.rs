//! Estimator identities and second-order statistics of simulated frames.

mod common;

use hsmimo::channel::{build_cross_cov, build_pilot_cov, ChannelSampler};
use hsmimo::estimation::{covariance_set, mmse_estimate_with_pilots, FrameEstimator};
use hsmimo::linalg::{sym_eigenvalues, RMat};
use hsmimo::link::LinkSimulator;
use hsmimo::receivers::psk_symbol;
use hsmimo::{estimation_covariances, Complex64, SystemConfig};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn arb_config() -> impl Strategy<Value = (SystemConfig, usize, usize)> {
    (1usize..=5, 1usize..=20, 1usize..=24, 0.0f64..1500.0, -5.0f64..30.0, -5.0f64..30.0).prop_flat_map(
        |(n_tx, k_block, n_rep, f_doppler, gp_db, gc_db)| {
            let cfg = SystemConfig { n_tx, k_block, n_rep, f_doppler, n_rx: 2, ..SystemConfig::default() }
                .with_snr_db(gp_db, gc_db);
            (Just(cfg), 1..=n_tx, 1..=k_block)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn estimate_and_error_covariances_sum_to_prior((cfg, t, k) in arb_config()) {
        let (r_hat, r_tilde) = estimation_covariances(&cfg, t, k).unwrap();
        let r_p = build_pilot_cov(&cfg);
        prop_assert!((&r_hat + &r_tilde - &r_p).amax() < 1e-10);
        for m in [&r_hat, &r_tilde] {
            prop_assert!((m - m.transpose()).amax() == 0.0);
            prop_assert!(sym_eigenvalues(m).iter().all(|&l| l > -1e-10));
        }
    }

    #[test]
    fn direct_and_inversion_lemma_estimators_agree(
        (cfg, t, k) in arb_config(),
        phases in prop::collection::vec(0.0f64..std::f64::consts::TAU, 24),
        obs in prop::collection::vec(-3.0f64..3.0, 48),
    ) {
        let n = cfg.n_rep;
        let pilots: Vec<Complex64> = phases[..n].iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        let y: Vec<Complex64> = (0..n).map(|i| Complex64::new(obs[2 * i], obs[2 * i + 1])).collect();
        let fast = mmse_estimate_with_pilots(&y, &pilots, &cfg, t, k).unwrap();

        let direct = common::direct_estimate(&cfg, t, k, &pilots, &y);
        let scale = direct.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for (a, b) in fast.iter().zip(direct.iter()) {
            prop_assert!((a - b).norm() < 1e-10 * scale, "{} vs {}", a, b);
        }
    }
}

#[test]
fn covariance_set_is_consistent() {
    let cfg = SystemConfig { n_rep: 6, ..SystemConfig::default() };
    let s = covariance_set(&cfg, 2, 5).unwrap();
    assert_eq!(s.r_k, s.r_p);
    assert_eq!(s.r_ptk, build_cross_cov(&cfg, 2, 5).unwrap());
    assert!((&s.r_hat + &s.r_tilde - &s.r_p).amax() < 1e-12);
}

/// Empirical `E[a b^H]` over draws, where each draw yields vectors `a` and `b`.
struct CrossCov {
    sum: DMatrix<Complex64>,
    count: usize,
}

impl CrossCov {
    fn new(n: usize) -> Self {
        Self { sum: DMatrix::zeros(n, n), count: 0 }
    }

    fn add(&mut self, a: &[Complex64], b: &[Complex64]) {
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                self.sum[(i, j)] += x * y.conj();
            }
        }
        self.count += 1;
    }

    /// Largest deviation from a real target, in units of the per-entry
    /// standard error bound `1/√count` (entries have unit-order variance).
    fn max_dev(&self, target: &RMat) -> f64 {
        let n = self.count as f64;
        let mut worst: f64 = 0.0;
        for i in 0..target.nrows() {
            for j in 0..target.ncols() {
                let e = self.sum[(i, j)] / n;
                worst = worst.max((e - Complex64::new(target[(i, j)], 0.0)).norm());
            }
        }
        worst * n.sqrt()
    }
}

fn stat_cfg() -> SystemConfig {
    SystemConfig { n_tx: 2, n_rx: 2, k_block: 4, n_rep: 3, f_doppler: 1000.0, ..SystemConfig::default() }
}

const DRAWS: u64 = 20_000;

#[test]
fn sampled_channel_has_model_covariance() {
    let cfg = stat_cfg();
    let sampler = ChannelSampler::new(&cfg, &[3]).unwrap();
    let mut pilot = CrossCov::new(cfg.n_rep);
    let mut cross = CrossCov::new(cfg.n_rep);
    for trial in 0..DRAWS {
        let h = sampler.sample(41, trial);
        for r in 1..=cfg.n_rx {
            pilot.add(h.pilot(2, r), h.pilot(2, r));
            cross.add(h.data(2, r, 3).unwrap(), h.pilot(2, r));
        }
    }
    // Entries are averages of products of unit-variance Gaussians: SE <= 1/√n.
    assert!(pilot.max_dev(&build_pilot_cov(&cfg)) < 4.5);
    assert!(cross.max_dev(&build_cross_cov(&cfg, 2, 3).unwrap()) < 4.5);
}

#[test]
fn estimates_have_model_covariance_and_are_orthogonal_to_errors() {
    let cfg = stat_cfg();
    let k = 2;
    let sampler = ChannelSampler::new(&cfg, &[k]).unwrap();
    let est = FrameEstimator::new(&cfg, &[k]).unwrap();
    let (r_hat, r_tilde) = estimation_covariances(&cfg, 1, k).unwrap();
    let n = cfg.n_rep;
    let mut hat = CrossCov::new(n);
    let mut err = CrossCov::new(n);
    let mut orth = CrossCov::new(n);
    for trial in 0..DRAWS {
        let h = sampler.sample(43, trial);
        let out = est.estimate(&h, 44, trial).unwrap();
        for r in 1..=cfg.n_rx {
            let hh = out.h_hat(1, r, k).unwrap();
            let e: Vec<Complex64> = h.data(1, r, k).unwrap().iter().zip(hh).map(|(a, b)| a - b).collect();
            hat.add(hh, hh);
            err.add(&e, &e);
            orth.add(hh, &e);
        }
    }
    assert!(hat.max_dev(&r_hat) < 4.5);
    assert!(err.max_dev(&r_tilde) < 4.5);
    assert!(orth.max_dev(&RMat::zeros(n, n)) < 4.5);
}

#[test]
fn effective_noise_has_model_covariance() {
    // y − √E_C Ĥ s = √E_C H̃ s + z has covariance E_C Σ_l R̃_l + σ² I per antenna.
    let cfg = stat_cfg();
    let k = 4;
    let sim = LinkSimulator::new(&cfg, &[k]).unwrap();
    let n = cfg.n_rep;
    let mut acc = CrossCov::new(n);
    for trial in 0..DRAWS {
        let frame = sim.frame(47, trial).unwrap();
        let model = &frame.models[0];
        let tx = sim.transmit(&frame.channel, k, 47, trial).unwrap();
        let mut z = tx.y.clone();
        for (t, &m) in tx.symbols.iter().enumerate() {
            let s = psk_symbol(cfg.m_psk, m) * cfg.e_data.sqrt();
            for (zi, hi) in z.iter_mut().zip(model.column(t + 1)) {
                *zi -= hi * s;
            }
        }
        for r in 0..cfg.n_rx {
            let blk = &z[r * n..(r + 1) * n];
            let scaled: Vec<Complex64> = blk.iter().map(|v| v / cfg.e_data.sqrt()).collect();
            acc.add(&scaled, &scaled);
        }
    }
    let target = &model_noise(&cfg, k);
    assert!(acc.max_dev(target) < 4.5, "{}", acc.max_dev(target));
}

/// `Σ_l R̃_l + I/γ_C`, the effective noise covariance in data-SNR units.
fn model_noise(cfg: &SystemConfig, k: usize) -> RMat {
    let mut m = RMat::identity(cfg.n_rep, cfg.n_rep) / cfg.gamma_c();
    for t in 1..=cfg.n_tx {
        m += estimation_covariances(cfg, t, k).unwrap().1;
    }
    m
}

#[test]
fn static_channel_with_clean_pilots_is_recovered() {
    let cfg =
        SystemConfig { n_rep: 32, f_doppler: 0.0, n_tx: 2, n_rx: 2, ..SystemConfig::default() }.with_snr_db(80.0, 10.0);
    let sim = LinkSimulator::new(&cfg, &[1, 16]).unwrap();
    for trial in 0..50 {
        let frame = sim.frame(17, trial).unwrap();
        for (model, k) in frame.models.iter().zip([1, 16]) {
            for t in 1..=cfg.n_tx {
                let truth: Vec<Complex64> =
                    (1..=cfg.n_rx).flat_map(|r| frame.channel.data(t, r, k).unwrap().to_vec()).collect();
                let err: f64 = truth.iter().zip(model.column(t)).map(|(a, b)| (a - b).norm_sqr()).sum();
                let norm: f64 = truth.iter().map(|a| a.norm_sqr()).sum();
                assert!((err / norm).sqrt() < 0.05, "trial {trial} t={t} k={k}");
            }
        }
    }
}
