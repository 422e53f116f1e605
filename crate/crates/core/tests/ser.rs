//! Analytic SER against closed forms, sampling and simulation.

mod common;

use std::f64::consts::PI;

use hsmimo::diversity::PowerSplit;
use hsmimo::estimation::SymbolCovariances;
use hsmimo::linalg::{generalized_eigenvalues, RMat};
use hsmimo::quad::GaussLegendre;
use hsmimo::ser::{average_analytic_ser, ser_from_eigenvalues};
use hsmimo::{mgf_quadratic_form, monte_carlo_ser, KronBlock, Receiver, SystemConfig};
use proptest::prelude::*;

/// Exact M-PSK SER with one Rayleigh branch of mean SNR `g`.
fn rayleigh_mpsk(g: f64, m: usize) -> f64 {
    let mf = m as f64;
    let cm = (PI / mf).sin().powi(2);
    let mu = (cm * g / (1.0 + cm * g)).sqrt();
    let cot = 1.0 / (PI / mf).tan();
    (mf - 1.0) / mf * (1.0 - mu * mf / ((mf - 1.0) * PI) * (PI / 2.0 + (mu * cot).atan()))
}

/// Exact BPSK SER with `l` i.i.d. Rayleigh branches of mean SNR `g` each.
fn rayleigh_bpsk_diversity(g: f64, l: u32) -> f64 {
    let mu = (g / (1.0 + g)).sqrt();
    let mut binom = 1.0;
    let mut sum = 0.0;
    for j in 0..l {
        if j > 0 {
            binom *= (l - 1 + j) as f64 / j as f64;
        }
        sum += binom * ((1.0 + mu) / 2.0).powi(j as i32);
    }
    ((1.0 - mu) / 2.0).powi(l as i32) * sum
}

#[test]
fn single_branch_matches_closed_form() {
    for m in [2, 4, 8, 16] {
        for g in [0.01, 0.3, 1.0, 7.5, 100.0, 1e4] {
            let got = ser_from_eigenvalues(&[g], 1, m).unwrap();
            let want = rayleigh_mpsk(g, m);
            assert!((got - want).abs() <= 1e-10 * want, "M={m} g={g}: {got} vs {want}");
        }
    }
}

#[test]
fn receive_diversity_matches_closed_form() {
    for l in 1..=6u32 {
        for g in [0.5, 3.0, 40.0] {
            let via_rx = ser_from_eigenvalues(&[g], l as usize, 2).unwrap();
            let via_eigs = ser_from_eigenvalues(&vec![g; l as usize], 1, 2).unwrap();
            let want = rayleigh_bpsk_diversity(g, l);
            assert!((via_rx - want).abs() <= 1e-10 * want, "L={l} g={g}: {via_rx} vs {want}");
            assert!((via_eigs - via_rx).abs() <= 1e-12 * want);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ser_is_bounded_and_monotone(
        eigs in prop::collection::vec(0.0f64..20.0, 1..8),
        idx in any::<prop::sample::Index>(),
        bump in 0.01f64..5.0,
        n_rx in 1usize..4,
        m in prop::sample::select(vec![2usize, 4, 8]),
    ) {
        let p = ser_from_eigenvalues(&eigs, n_rx, m).unwrap();
        prop_assert!(p >= 0.0 && p <= (m as f64 - 1.0) / m as f64 + 1e-12);
        let mut more = eigs.clone();
        more[idx.index(eigs.len())] += bump;
        prop_assert!(ser_from_eigenvalues(&more, n_rx, m).unwrap() <= p * (1.0 + 1e-12));
        prop_assert!(ser_from_eigenvalues(&eigs, n_rx + 1, m).unwrap() <= p * (1.0 + 1e-12));
    }
}

#[test]
fn mgf_matches_sample_average() {
    let cov = RMat::from_row_slice(3, 3, &[1.0, 0.6, 0.2, 0.6, 1.2, 0.5, 0.2, 0.5, 0.8]);
    let weight = RMat::from_row_slice(3, 3, &[0.9, -0.2, 0.0, -0.2, 0.5, 0.1, 0.0, 0.1, 0.3]);
    let reps = 2;
    for mu in [-0.1, -1.0] {
        let (mean, se) = common::empirical_mgf(&cov, &weight, reps, mu, 100_000, 99);
        let exact = mgf_quadratic_form(&KronBlock::new(cov.clone(), reps), &weight, mu).unwrap();
        assert!((mean - exact).abs() < 3.0 * se, "mu={mu}: {mean} vs {exact} (se {se})");
    }
}

#[test]
fn mgf_rejects_divergent_argument() {
    let cov = KronBlock::new(RMat::identity(2, 2), 1);
    assert!(mgf_quadratic_form(&cov, &RMat::identity(2, 2), 1.5).is_err());
    assert!((mgf_quadratic_form(&cov, &RMat::identity(2, 2), 0.5).unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn analytic_ser_agrees_with_simulation() {
    let cfg = SystemConfig { n_rx: 2, n_rep: 6, n_tx: 2, k_block: 8, f_doppler: 800.0, ..SystemConfig::default() };
    let analytic = average_analytic_ser(&cfg, None).unwrap().ser;
    let mc = monte_carlo_ser(&cfg, Receiver::MrcLike, 3000, 21).unwrap();
    let z = (mc.ser - analytic) / mc.std_error.unwrap();
    assert!(z.abs() < 4.0, "analytic {analytic} vs simulated {} (z = {z:.2})", mc.ser);
}

/// Acceptance configurations of the error-rate experiments.
fn acceptance_configs() -> Vec<SystemConfig> {
    let mut out = Vec::new();
    for f_doppler in [200.0, 1000.0] {
        for n_rep in [4, 8, 15] {
            out.push(SystemConfig { n_rx: 4, n_rep, f_doppler, ..SystemConfig::default() });
        }
    }
    let base = SystemConfig { n_rx: 4, n_rep: 8, f_doppler: 1000.0, ..SystemConfig::default() };
    for b in [2.0, 8.0, 32.0] {
        out.push(PowerSplit::new(b, 1.0).unwrap().apply(&base, 5.0).unwrap());
    }
    for xi in [0.5, 2.0] {
        out.push(PowerSplit::new(8.0, xi).unwrap().apply(&base, 15.0).unwrap());
    }
    out
}

#[test]
fn quadrature_is_converged_at_acceptance_configs() {
    let rule = GaussLegendre::new(2048);
    for cfg in acceptance_configs() {
        let c = (PI / cfg.m_psk as f64).sin().powi(2);
        let upper = PI - PI / cfg.m_psk as f64;
        for k in [1, cfg.k_block / 2, cfg.k_block] {
            let st = SymbolCovariances::new(&cfg, k).unwrap();
            for t in 1..=cfg.n_tx {
                let eigs: Vec<f64> = generalized_eigenvalues(&st.r_hat[t - 1], &st.interference_block(t))
                    .unwrap()
                    .into_iter()
                    .map(|l| l.max(0.0))
                    .collect();
                let fine = rule.integrate(0.0, upper, |th| {
                    let s2 = th.sin().powi(2);
                    eigs.iter().map(|&l| (1.0 + c * l / s2).powi(-(cfg.n_rx as i32))).product::<f64>()
                }) / PI;
                let adaptive = ser_from_eigenvalues(&eigs, cfg.n_rx, cfg.m_psk).unwrap();
                assert!((adaptive - fine).abs() <= 1e-8 * fine, "{cfg:?} t={t} k={k}: {adaptive} vs {fine}");
            }
        }
    }
}

#[test]
fn analytic_ser_improves_with_every_resource() {
    let ser = |cfg: &SystemConfig| average_analytic_ser(cfg, Some(&[1, 9])).unwrap().ser;
    let base = SystemConfig { n_rx: 2, n_rep: 4, f_doppler: 1000.0, ..SystemConfig::default() };
    let grid = [0.0, 5.0, 10.0, 20.0];
    for w in grid.windows(2) {
        assert!(ser(&base.with_snr_db(10.0, w[1])) <= ser(&base.with_snr_db(10.0, w[0])));
        assert!(ser(&base.with_snr_db(w[1], 10.0)) <= ser(&base.with_snr_db(w[0], 10.0)));
    }
    for n in 1..8 {
        let a = SystemConfig { n_rep: n, ..base };
        let b = SystemConfig { n_rep: n + 1, ..base };
        assert!(ser(&b) <= ser(&a), "N={n}");
        let c = SystemConfig { n_rx: n + 1, ..base };
        let d = SystemConfig { n_rx: n, ..base };
        assert!(ser(&c) <= ser(&d), "N_R={n}");
    }
}

#[test]
fn near_perfect_csi_without_noise_makes_no_errors() {
    let cfg = SystemConfig { n_tx: 1, e_pilot: 1e6, e_data: 1e6, ..SystemConfig::default() };
    for rx in Receiver::ALL {
        let r = monte_carlo_ser(&cfg, rx, 200, 4).unwrap();
        assert_eq!(r.errors, 0, "{rx}");
        assert_eq!(r.decisions, 200 * cfg.k_block as u64);
    }
}

#[test]
fn simulated_ser_falls_with_total_energy() {
    let mut spec = hsmimo::harness::presets::load("fig12").unwrap();
    spec.sweep.values = vec![0.0, 5.0, 10.0, 15.0];
    spec.trials = 500;
    let rows = hsmimo::run_experiment(&spec).unwrap();
    let mc: Vec<f64> = rows.iter().filter(|r| r.metric == hsmimo::Metric::SerMc).map(|r| r.value).collect();
    assert_eq!(mc.len(), 4);
    assert!(mc.windows(2).all(|w| w[1] < w[0]), "{mc:?}");
}
