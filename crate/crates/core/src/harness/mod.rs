//! Seeded experiment runner: sweeps one scenario parameter, evaluates the
//! requested receivers and writes one CSV row per
//! `(sweep value, receiver, metric)`.
//!
//! Every sweep point reuses the spec's seed, so neighbouring points share
//! random draws and curves are smooth in the swept parameter.

mod csv;
pub mod presets;
mod spec;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use csv::{emit_csv, parse_csv, to_csv_string, HEADER};
pub use spec::{BaseConfig, ExperimentKind, ExperimentSpec, Point, SplitSpec, Sweep, SweepAxis};

use crate::asymptotics::mean_asymptotic_rate;
use crate::diversity::diversity_report;
use crate::error::{Error, Result};
use crate::link::monte_carlo_rate;
use crate::receivers::Receiver;
use crate::ser::{average_analytic_ser, monte_carlo_ser_many};

/// z-value of a two-sided 95% interval.
const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "RATE_MC")]
    RateMc,
    #[serde(rename = "RATE_ASYMPTOTIC")]
    RateAsymptotic,
    #[serde(rename = "SER_MC")]
    SerMc,
    #[serde(rename = "SER_ANALYTIC")]
    SerAnalytic,
    #[serde(rename = "DIVERSITY_ORDER")]
    DiversityOrder,
    #[serde(rename = "GAIN_LOSS_DB")]
    GainLossDb,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::RateMc => "RATE_MC",
            Metric::RateAsymptotic => "RATE_ASYMPTOTIC",
            Metric::SerMc => "SER_MC",
            Metric::SerAnalytic => "SER_ANALYTIC",
            Metric::DiversityOrder => "DIVERSITY_ORDER",
            Metric::GainLossDb => "GAIN_LOSS_DB",
        }
    }

    pub fn is_monte_carlo(self) -> bool {
        matches!(self, Metric::RateMc | Metric::SerMc)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "RATE_MC" => Metric::RateMc,
            "RATE_ASYMPTOTIC" => Metric::RateAsymptotic,
            "SER_MC" => Metric::SerMc,
            "SER_ANALYTIC" => Metric::SerAnalytic,
            "DIVERSITY_ORDER" => Metric::DiversityOrder,
            "GAIN_LOSS_DB" => Metric::GainLossDb,
            other => return Err(Error::Parse(format!("unknown metric {other:?}"))),
        })
    }
}

/// One output value. `ci_halfwidth` is the 95% half-width for Monte Carlo
/// metrics and absent otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub receiver: Receiver,
    pub metric: Metric,
    pub value: f64,
    pub ci_halfwidth: Option<f64>,
}

impl ResultRow {
    fn exact(sweep_value: f64, receiver: Receiver, metric: Metric, value: f64) -> Self {
        Self { sweep_value, receiver, metric, value, ci_halfwidth: None }
    }
}

/// Runs every sweep point of `spec` and returns rows sorted by
/// `(sweep_value, receiver, metric)`.
///
/// Points whose pilot spacing is too coarse for the Doppler rate still run
/// and are reported through `log::warn!`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    for w in spec.warnings() {
        log::warn!("{w}");
    }
    let axis = spec.sweep.parameter.name();
    let mut rows = Vec::new();
    for &value in &spec.sweep.values {
        let point = spec.point(value)?;
        log::info!("{}: {axis} = {value}", spec.name);
        let out = run_point(spec, &point).map_err(|e| Error::SweepPoint {
            axis: axis.to_string(),
            value,
            source: Box::new(e),
        })?;
        rows.extend(out);
    }
    rows.sort_by(|a, b| {
        a.sweep_value.total_cmp(&b.sweep_value).then(a.receiver.cmp(&b.receiver)).then(a.metric.cmp(&b.metric))
    });
    Ok(rows)
}

fn run_point(spec: &ExperimentSpec, p: &Point) -> Result<Vec<ResultRow>> {
    let ks = p.k_set.as_deref();
    let v = p.value;
    let mut rows = Vec::new();
    match spec.kind {
        ExperimentKind::RateSweep | ExperimentKind::DeqCompare => {
            for &rx in &spec.outputs {
                let rate = mean_asymptotic_rate(&p.cfg, rx, ks)?;
                rows.push(ResultRow::exact(v, rx, Metric::RateAsymptotic, rate));
            }
            if spec.trials > 0 {
                for est in monte_carlo_rate(&p.cfg, &spec.outputs, ks, spec.trials, spec.seed)? {
                    rows.push(ResultRow {
                        sweep_value: v,
                        receiver: est.receiver,
                        metric: Metric::RateMc,
                        value: est.mean,
                        ci_halfwidth: Some(Z95 * est.std_error),
                    });
                }
            }
            if spec.kind == ExperimentKind::DeqCompare {
                log_gaps(spec, &rows);
            }
        }
        ExperimentKind::SerSweep => {
            let mc = monte_carlo_ser_many(&p.cfg, &spec.outputs, ks, spec.trials, spec.seed)?;
            for (&rx, r) in spec.outputs.iter().zip(mc) {
                // Decisions in a frame share one channel draw, so the width
                // comes from the spread of per-frame error fractions.
                let ci = r.std_error.map(|se| Z95 * se).or(r.ci_halfwidth);
                rows.push(ResultRow {
                    sweep_value: v,
                    receiver: rx,
                    metric: Metric::SerMc,
                    value: r.ser,
                    ci_halfwidth: ci,
                });
            }
            if spec.outputs.contains(&Receiver::MrcLike) {
                let a = average_analytic_ser(&p.cfg, ks)?;
                rows.push(ResultRow::exact(v, Receiver::MrcLike, Metric::SerAnalytic, a.ser));
            }
        }
        ExperimentKind::DiversityReport => {
            let split = p.split.ok_or_else(|| Error::domain("diversity report needs a power split"))?;
            let rep = diversity_report(&p.cfg, split)?;
            rows.push(ResultRow::exact(v, Receiver::MrcLike, Metric::DiversityOrder, rep.order));
            rows.push(ResultRow::exact(v, Receiver::MrcLike, Metric::GainLossDb, rep.gain_loss_db));
        }
    }
    Ok(rows)
}

fn log_gaps(spec: &ExperimentSpec, rows: &[ResultRow]) {
    for &rx in &spec.outputs {
        let find = |m| rows.iter().find(|r| r.receiver == rx && r.metric == m).map(|r| r.value);
        if let (Some(mc), Some(asy)) = (find(Metric::RateMc), find(Metric::RateAsymptotic)) {
            log::info!("{}: {rx} relative gap {:.3}%", spec.name, 100.0 * (mc - asy).abs() / asy);
        }
    }
}
