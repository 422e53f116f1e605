//! Experiment specification as read from TOML.

use serde::{Deserialize, Serialize};

use crate::config::{db_to_linear, speed_to_doppler, SystemConfig};
use crate::diversity::{optimal_power_split, PowerSplit};
use crate::error::{Error, Result};
use crate::receivers::Receiver;

/// Kind of experiment, which fixes the metrics produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentKind {
    /// Asymptotic rates per receiver, plus Monte Carlo rates when `trials > 0`.
    #[serde(rename = "RATE_SWEEP")]
    RateSweep,
    /// Monte Carlo SER per receiver, plus the analytic SER for MRC-like.
    #[serde(rename = "SER_SWEEP")]
    SerSweep,
    /// Monte Carlo and asymptotic rates side by side.
    #[serde(rename = "DEQ_COMPARE")]
    DeqCompare,
    /// Diversity order and coding-gain loss of the power split.
    #[serde(rename = "DIVERSITY_REPORT")]
    DiversityReport,
}

impl ExperimentKind {
    pub fn needs_trials(self) -> bool {
        matches!(self, ExperimentKind::SerSweep | ExperimentKind::DeqCompare)
    }
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Repetitions `N`.
    NRep,
    NTx,
    NRx,
    KBlock,
    /// Data symbol index `k`; restricts averaging to that symbol.
    K,
    /// Sets pilot and data SNR together (dB).
    SnrDb,
    PilotSnrDb,
    DataSnrDb,
    FDoppler,
    SpeedKmh,
    /// Coded-symbol SNR `γ_0` (dB); requires a power split.
    Gamma0Db,
    /// Split coefficient `b`; requires a power split.
    B,
    /// Split exponent `ξ`; requires a power split.
    Xi,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::NRep => "n_rep",
            SweepAxis::NTx => "n_tx",
            SweepAxis::NRx => "n_rx",
            SweepAxis::KBlock => "k_block",
            SweepAxis::K => "k",
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::PilotSnrDb => "pilot_snr_db",
            SweepAxis::DataSnrDb => "data_snr_db",
            SweepAxis::FDoppler => "f_doppler",
            SweepAxis::SpeedKmh => "speed_kmh",
            SweepAxis::Gamma0Db => "gamma0_db",
            SweepAxis::B => "b",
            SweepAxis::Xi => "xi",
        }
    }

    fn is_integer(self) -> bool {
        matches!(self, SweepAxis::NRep | SweepAxis::NTx | SweepAxis::NRx | SweepAxis::KBlock | SweepAxis::K)
    }

    fn needs_split(self) -> bool {
        matches!(self, SweepAxis::Gamma0Db | SweepAxis::B | SweepAxis::Xi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepAxis,
    pub values: Vec<f64>,
}

/// Pilot/data energy split driven by `γ_0`. `b` defaults to `√(N_T K)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub gamma0_db: f64,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default = "one")]
    pub xi: f64,
}

fn one() -> f64 {
    1.0
}

/// Scenario parameters in user units. Unset fields take the reference values
/// of [`SystemConfig::default`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseConfig {
    pub n_tx: Option<usize>,
    pub n_rx: Option<usize>,
    pub k_block: Option<usize>,
    pub n_rep: Option<usize>,
    pub m_psk: Option<usize>,
    /// Symbols per second; `T = 1 / symbol_rate`.
    pub symbol_rate: Option<f64>,
    pub f_doppler: Option<f64>,
    /// Used with `carrier_hz` instead of `f_doppler`.
    pub speed_kmh: Option<f64>,
    pub carrier_hz: Option<f64>,
    pub pilot_snr_db: Option<f64>,
    pub data_snr_db: Option<f64>,
    /// Replaces the two SNRs with a split of `γ_0`.
    pub power_split: Option<SplitSpec>,
}

/// One experiment: a base scenario, a swept parameter and the outputs wanted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    /// Figure of the reference results this experiment mirrors.
    #[serde(default)]
    pub figure: Option<String>,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub base_config: BaseConfig,
    pub sweep: Sweep,
    #[serde(default)]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    pub outputs: Vec<Receiver>,
    /// Data symbol indices averaged over; all of `1..=K` when absent.
    #[serde(default)]
    pub symbols: Option<Vec<usize>>,
}

/// Fully resolved scenario at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub value: f64,
    pub cfg: SystemConfig,
    pub split: Option<PowerSplit>,
    pub k_set: Option<Vec<usize>>,
}

/// Scenario in user units with every field filled in.
#[derive(Debug, Clone, Copy)]
struct Scenario {
    n_tx: usize,
    n_rx: usize,
    k_block: usize,
    n_rep: usize,
    m_psk: usize,
    t_symbol: f64,
    f_doppler: f64,
    speed: Option<(f64, f64)>,
    pilot_db: f64,
    data_db: f64,
    split: Option<SplitSpec>,
    k: Option<usize>,
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text)
    }

    /// Checks the spec and every resolved sweep point, listing all violations.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.name.trim().is_empty() {
            bad.push("name must not be empty".to_string());
        }
        if self.outputs.is_empty() {
            bad.push("outputs must name at least one receiver".to_string());
        }
        let mut seen = Vec::new();
        for r in &self.outputs {
            if seen.contains(r) {
                bad.push(format!("outputs lists {r} twice"));
            }
            seen.push(*r);
        }
        // A confidence half-width needs at least two trials.
        if self.kind.needs_trials() && self.trials < 2 {
            bad.push(format!("trials must be >= 2 for {:?} experiments", self.kind));
        } else if self.trials == 1 {
            bad.push("trials must be 0 (no Monte Carlo) or >= 2".to_string());
        }
        let axis = self.sweep.parameter;
        if self.sweep.values.is_empty() {
            bad.push("sweep.values must not be empty".to_string());
        }
        for (i, &v) in self.sweep.values.iter().enumerate() {
            if self.sweep.values[..i].contains(&v) {
                bad.push(format!("sweep value {v} appears twice"));
            }
            if !v.is_finite() {
                bad.push(format!("sweep value {v} is not finite"));
            } else if axis.is_integer() && (v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64) {
                bad.push(format!("sweep over {} needs positive integers, got {v}", axis.name()));
            }
        }
        let base = &self.base_config;
        if base.f_doppler.is_some() && (base.speed_kmh.is_some() || base.carrier_hz.is_some()) {
            bad.push("give either base_config.f_doppler or speed_kmh with carrier_hz, not both".to_string());
        }
        if base.speed_kmh.is_some() != base.carrier_hz.is_some() {
            bad.push("base_config.speed_kmh and carrier_hz must be given together".to_string());
        }
        if matches!(axis, SweepAxis::SpeedKmh) && base.carrier_hz.is_none() {
            bad.push("sweeping speed_kmh requires base_config.carrier_hz".to_string());
        }
        if axis.needs_split() && base.power_split.is_none() {
            bad.push(format!("sweeping {} requires base_config.power_split", axis.name()));
        }
        if base.power_split.is_some() && base.pilot_snr_db.is_some() | base.data_snr_db.is_some() {
            bad.push("base_config.power_split replaces pilot_snr_db and data_snr_db".to_string());
        }
        if base.power_split.is_some() && matches!(axis, SweepAxis::SnrDb | SweepAxis::PilotSnrDb | SweepAxis::DataSnrDb)
        {
            bad.push(format!("sweeping {} conflicts with base_config.power_split", axis.name()));
        }
        if matches!(axis, SweepAxis::K) && self.symbols.is_some() {
            bad.push("symbols cannot be combined with a sweep over k".to_string());
        }
        if matches!(self.symbols.as_deref(), Some([])) {
            bad.push("symbols must not be empty when given".to_string());
        }
        if matches!(self.kind, ExperimentKind::DiversityReport) && base.power_split.is_none() {
            bad.push("DIVERSITY_REPORT requires base_config.power_split".to_string());
        }
        if bad.is_empty() {
            for v in &self.sweep.values {
                if let Err(e) = self.point(*v) {
                    match e {
                        Error::Validation(list) => {
                            bad.extend(list.into_iter().map(|m| format!("at {} = {v}: {m}", axis.name())))
                        }
                        other => bad.push(format!("at {} = {v}: {other}", axis.name())),
                    }
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(bad))
        }
    }

    fn scenario(&self) -> Scenario {
        let d = SystemConfig::default();
        let b = &self.base_config;
        Scenario {
            n_tx: b.n_tx.unwrap_or(d.n_tx),
            n_rx: b.n_rx.unwrap_or(d.n_rx),
            k_block: b.k_block.unwrap_or(d.k_block),
            n_rep: b.n_rep.unwrap_or(d.n_rep),
            m_psk: b.m_psk.unwrap_or(d.m_psk),
            t_symbol: b.symbol_rate.map_or(d.t_symbol, |r| 1.0 / r),
            f_doppler: b.f_doppler.unwrap_or(d.f_doppler),
            speed: b.speed_kmh.zip(b.carrier_hz),
            pilot_db: b.pilot_snr_db.unwrap_or(10.0),
            data_db: b.data_snr_db.unwrap_or(10.0),
            split: b.power_split,
            k: None,
        }
    }

    /// Resolves the scenario at sweep value `value`.
    pub fn point(&self, value: f64) -> Result<Point> {
        let mut s = self.scenario();
        let int = value as usize;
        match self.sweep.parameter {
            SweepAxis::NRep => s.n_rep = int,
            SweepAxis::NTx => s.n_tx = int,
            SweepAxis::NRx => s.n_rx = int,
            SweepAxis::KBlock => s.k_block = int,
            SweepAxis::K => s.k = Some(int),
            SweepAxis::SnrDb => (s.pilot_db, s.data_db) = (value, value),
            SweepAxis::PilotSnrDb => s.pilot_db = value,
            SweepAxis::DataSnrDb => s.data_db = value,
            SweepAxis::FDoppler => {
                s.f_doppler = value;
                s.speed = None;
            }
            SweepAxis::SpeedKmh => s.speed = s.speed.map(|(_, fc)| (value, fc)),
            SweepAxis::Gamma0Db => s.split = s.split.map(|p| SplitSpec { gamma0_db: value, ..p }),
            SweepAxis::B => s.split = s.split.map(|p| SplitSpec { b: Some(value), ..p }),
            SweepAxis::Xi => s.split = s.split.map(|p| SplitSpec { xi: value, ..p }),
        }
        let f_doppler = match s.speed {
            Some((v, fc)) => speed_to_doppler(v, fc)?,
            None => s.f_doppler,
        };
        let mut cfg = SystemConfig {
            n_tx: s.n_tx,
            n_rx: s.n_rx,
            k_block: s.k_block,
            n_rep: s.n_rep,
            m_psk: s.m_psk,
            t_symbol: s.t_symbol,
            f_doppler,
            noise_var: 1.0,
            e_pilot: db_to_linear(s.pilot_db),
            e_data: db_to_linear(s.data_db),
        };
        let split = match s.split {
            Some(p) => {
                let b = p.b.unwrap_or_else(|| optimal_power_split(s.n_tx, s.k_block).0.b);
                let split = PowerSplit::new(b, p.xi)?;
                cfg = split.apply(&cfg, p.gamma0_db)?;
                Some(split)
            }
            None => None,
        };
        cfg.validate()?;
        let k_set = match (s.k, &self.symbols) {
            (Some(k), _) => Some(vec![k]),
            (None, Some(ks)) => Some(ks.clone()),
            (None, None) => None,
        };
        if let Some(ks) = &k_set {
            let bad: Vec<String> = ks
                .iter()
                .filter(|&&k| k == 0 || k > cfg.k_block)
                .map(|k| format!("symbol index {k} outside 1..={}", cfg.k_block))
                .collect();
            if !bad.is_empty() {
                return Err(Error::Validation(bad));
            }
        }
        Ok(Point { value, cfg, split, k_set })
    }

    /// Human-readable warnings for sweep points whose pilot spacing is too
    /// coarse for the Doppler rate.
    pub fn warnings(&self) -> Vec<String> {
        self.sweep
            .values
            .iter()
            .filter_map(|&v| self.point(v).ok())
            .filter(|p| !p.cfg.is_estimation_valid())
            .map(|p| {
                format!(
                    "{}: at {} = {}, pilot spacing {:.3e} s exceeds 0.5/f_D = {:.3e} s; channel estimates are unreliable",
                    self.name,
                    self.sweep.parameter.name(),
                    p.value,
                    p.cfg.pilot_interval(),
                    0.5 / p.cfg.f_doppler
                )
            })
            .collect()
    }
}
