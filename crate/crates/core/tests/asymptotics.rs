//! Large-system SINRs and rates against simulated frames at four receive
//! antennas, `N = 15`, 200 Hz Doppler.

use hsmimo::linalg::{cdot, norm_sqr, real_mul, sym_inv_sqrt, RMat};
use hsmimo::receivers::sinr;
use hsmimo::{
    deq_fixed_point, mean_asymptotic_rate, monte_carlo_rate, mrc_asymptotic_sinr, mrc_like_asymptotic_sinr, Complex64,
    EquivalentModel, LinkSimulator, Receiver, SystemConfig,
};

const TRIALS: u64 = 2000;
const K: usize = 8;

fn cfg() -> SystemConfig {
    SystemConfig { n_rx: 4, n_rep: 15, f_doppler: 200.0, ..SystemConfig::default() }
}

fn frames() -> Vec<EquivalentModel> {
    let sim = LinkSimulator::new(&cfg(), &[K]).unwrap();
    (0..TRIALS).map(|i| sim.frame(3, i).unwrap().models.remove(0)).collect()
}

fn apply(m: &RMat, v: &[Complex64], n: usize) -> Vec<Complex64> {
    v.chunks(n).flat_map(|c| real_mul(m, c)).collect()
}

/// `(‖w‖², w^H C w)` for the combiner of antenna 1 after whitening by `w`,
/// where `C` is the interference-plus-noise covariance given the estimates.
fn signal_and_disturbance(m: &EquivalentModel, whiten: &RMat) -> (f64, f64) {
    let n = m.n_rep();
    let hb = apply(whiten, m.column(1), n);
    let w = apply(whiten, &hb, n);
    let interference: f64 = (2..=m.n_tx()).map(|l| cdot(&w, m.column(l)).norm_sqr()).sum();
    let noise = cdot(&w, &apply(&m.stats.r_tilde_total, &w, n)).re;
    (norm_sqr(&hb), interference + noise)
}

/// The matched-filter SINR is a ratio of quadratic forms whose interference
/// part does not concentrate when the transmit-antenna count is fixed, so
/// the simulated mean sits well above the large-system value. The
/// large-system value is the ratio of the means.
#[test]
fn matched_filter_limits_are_ratios_of_means() {
    let models = frames();
    let n = cfg().n_rep;
    for like in [false, true] {
        let (mut sig, mut dis, mut mean_sinr) = (0.0, 0.0, 0.0);
        for m in &models {
            let w = if like { sym_inv_sqrt(&m.stats.interference_block(1)).unwrap() } else { RMat::identity(n, n) };
            let (p, d) = signal_and_disturbance(m, &w);
            sig += p;
            dis += d;
            mean_sinr += sinr(m, if like { Receiver::MrcLike } else { Receiver::Mrc }, 1).unwrap();
        }
        let t = TRIALS as f64;
        let ratio = (sig / t).powi(2) / (dis / t);
        let asy =
            if like { mrc_like_asymptotic_sinr(&cfg(), 1, K) } else { mrc_asymptotic_sinr(&cfg(), 1, K) }.unwrap();
        assert!((ratio - asy).abs() < 0.02 * asy, "like={like}: ratio of means {ratio} vs {asy}");
        assert!(mean_sinr / t > asy, "like={like}");
    }
}

#[test]
fn mmse_limit_matches_simulated_mean() {
    let models = frames();
    let mean = models.iter().map(|m| sinr(m, Receiver::Mmse, 1).unwrap()).sum::<f64>() / TRIALS as f64;
    let asy = deq_fixed_point(&cfg(), 1, K, 1e-10).unwrap().sinr_deq;
    assert!((mean - asy).abs() < 0.05 * asy, "{mean} vs {asy}");
}

#[test]
fn mmse_rate_matches_simulated_rate() {
    let c = cfg();
    let mc = monte_carlo_rate(&c, &[Receiver::Mmse], None, TRIALS, 3).unwrap().remove(0);
    let asy = mean_asymptotic_rate(&c, Receiver::Mmse, None).unwrap();
    assert!((mc.mean - asy).abs() < 0.05 * asy, "{} vs {asy}", mc.mean);
}

#[test]
fn asymptotic_sinrs_grow_with_data_snr() {
    for rx in Receiver::ALL {
        let values: Vec<f64> = [0.0, 10.0, 20.0]
            .iter()
            .map(|&db| {
                let c = cfg().with_snr_db(10.0, db);
                match rx {
                    Receiver::Mrc => mrc_asymptotic_sinr(&c, 2, 3).unwrap(),
                    Receiver::MrcLike => mrc_like_asymptotic_sinr(&c, 2, 3).unwrap(),
                    Receiver::Mmse => deq_fixed_point(&c, 2, 3, 1e-10).unwrap().sinr_deq,
                }
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] >= w[0]), "{rx}: {values:?}");
    }
}
