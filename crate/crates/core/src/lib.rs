//! Performance analysis of pilot-assisted, repetition-coded MIMO links over
//! time-varying Rayleigh channels.
//!
//! The crate covers the whole chain: Bessel-correlated channel generation,
//! pilot-based MMSE estimation, finite-size SINRs of the MRC, MMSE and
//! MRC-like receivers, their large-dimension approximations, the analytic
//! symbol-error rate of the MRC-like receiver, Doppler-diversity and coding
//! gain figures, and a seeded experiment harness that writes CSV.
//!
//! ```
//! use hsmimo::{asymptotic_rate, Receiver, SystemConfig};
//!
//! let cfg = SystemConfig { n_rx: 4, n_rep: 5, ..SystemConfig::default() };
//! let mmse = asymptotic_rate(&cfg, Receiver::Mmse, 1).unwrap();
//! let mrc = asymptotic_rate(&cfg, Receiver::Mrc, 1).unwrap();
//! assert!(mmse > mrc);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod channel;
pub mod config;
pub mod diversity;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod linalg;
pub mod link;
pub mod quad;
pub mod receivers;
pub mod rng;
pub mod ser;
pub mod special;

/// Complex double used for channel coefficients, symbols and noise.
pub type Complex64 = nalgebra::Complex<f64>;

pub use asymptotics::{
    asymptotic_rate, deq_fixed_point, mean_asymptotic_rate, mrc_asymptotic_sinr, mrc_like_asymptotic_sinr, DeqSolution,
};
pub use channel::{build_cross_cov, build_pilot_cov, sample_channel, ChannelRealization, ChannelSampler};
pub use config::{speed_to_doppler, FrameTiming, SystemConfig};
pub use diversity::{
    coding_gain_bounds, coding_gain_loss, diversity_order, lambda_pp, limit_spectrum, log_psi_limit,
    optimal_power_split, DiversityReport, PowerSplit,
};
pub use error::{Error, Result};
pub use estimation::{
    build_equivalent_model, estimation_covariances, mmse_estimate, CovarianceSet, EquivalentModel, EstimationResult,
};
pub use harness::{emit_csv, run_experiment, ExperimentKind, ExperimentSpec, Metric, ResultRow};
pub use linalg::KronBlock;
pub use link::{monte_carlo_rate, LinkSimulator, RateEstimate};
pub use receivers::{
    detect, mmse_sinr, mrc_like_sinr, mrc_sinr, normalized_sum_rate, DetectionOutput, Receiver, SinrReport,
};
pub use ser::{analytic_ser, build_a_matrix, mgf_quadratic_form, monte_carlo_ser, SerMethod, SerResult};
pub use special::bessel_j0;
