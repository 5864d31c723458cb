//! Cost-versus-latency curves over a redundancy level or a relaunch delay,
//! and their CSV rendering.

use std::io::Write;

use thiserror::Error;

use crate::analytic::{closed_form, AnalyticError, Metrics, Redundancy, RedundancyPlan};
use crate::distributions::TaskTimeModel;
use crate::simulator::{estimate_with_threads, MetricEstimate, SimError};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("sweep grid must be strictly increasing")]
    NotMonotone,
    #[error("grid value {0} is not a valid {1}")]
    BadValue(f64, &'static str),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SweepError>;

/// What varies along a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Zero-delay replication, parameter `c`.
    Replication,
    /// Zero-delay coding, parameter `n`.
    Coding,
    /// Plain relaunch, parameter `Δ`.
    Relaunch,
    /// Relaunch with `c` replicas per restarted task, parameter `Δ`.
    RelaunchReplication(u32),
    /// Relaunch with the job padded to `n` tasks, parameter `Δ`.
    RelaunchCoding(u32),
}

impl Family {
    pub fn param_name(&self) -> &'static str {
        match self {
            Self::Replication => "c",
            Self::Coding => "n",
            _ => "delta",
        }
    }

    pub fn label(&self, k: u32) -> String {
        match self {
            Self::Replication => format!("replication k={k}"),
            Self::Coding => format!("coding k={k}"),
            Self::Relaunch => format!("relaunch k={k}"),
            Self::RelaunchReplication(c) => format!("relaunch+replication k={k} c={c}"),
            Self::RelaunchCoding(n) => format!("relaunch+coding k={k} n={n}"),
        }
    }

    /// The plan at one grid value.
    pub fn plan(&self, k: u32, value: f64) -> Result<RedundancyPlan> {
        let count = |what| {
            if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
                Ok(value as u32)
            } else {
                Err(SweepError::BadValue(value, what))
            }
        };
        let plan = match *self {
            Self::Replication => {
                RedundancyPlan::zero_delay(k, Redundancy::Replicate(count("replica count")?))?
            }
            Self::Coding => RedundancyPlan::zero_delay(k, Redundancy::Code(count("code length")?))?,
            Self::Relaunch => RedundancyPlan::relaunch(k, Redundancy::None, value)?,
            Self::RelaunchReplication(c) => {
                RedundancyPlan::relaunch(k, Redundancy::Replicate(c), value)?
            }
            Self::RelaunchCoding(n) => RedundancyPlan::relaunch(k, Redundancy::Code(n), value)?,
        };
        Ok(plan)
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(SweepError::NotMonotone);
    }
    Ok(())
}

/// Closed-form metrics along a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub label: String,
    pub param: &'static str,
    pub points: Vec<(f64, Metrics)>,
}

/// Simulated estimates along a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedCurve {
    pub label: String,
    pub param: &'static str,
    pub points: Vec<(f64, MetricEstimate)>,
}

pub fn analytic_sweep(
    family: Family,
    k: u32,
    model: &TaskTimeModel,
    grid: &[f64],
) -> Result<SweepCurve> {
    check_grid(grid)?;
    let points = grid
        .iter()
        .map(|&v| Ok((v, closed_form(&family.plan(k, v)?, model)?)))
        .collect::<Result<_>>()?;
    Ok(SweepCurve {
        label: family.label(k),
        param: family.param_name(),
        points,
    })
}

/// Every grid point reuses `seed`, so neighbouring points share random
/// numbers and their differences are less noisy.
pub fn simulated_sweep(
    family: Family,
    k: u32,
    model: &TaskTimeModel,
    grid: &[f64],
    runs: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<SimulatedCurve> {
    check_grid(grid)?;
    let points = grid
        .iter()
        .map(|&v| {
            Ok((
                v,
                estimate_with_threads(&family.plan(k, v)?, model, runs, seed, threads)?,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(SimulatedCurve {
        label: family.label(k),
        param: family.param_name(),
        points,
    })
}

/// `start, start+step, …` up to and including `stop`.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(SweepError::EmptyGrid);
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// Render with 10 significant digits, `%g` style: plain notation for
/// exponents in `[-5, 10)`, scientific otherwise, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub const METRICS_HEADER: [&str; 7] = [
    "E_T",
    "E_C_cancel",
    "E_C_nocancel",
    "E_T2",
    "E_C2",
    "sd_T",
    "sd_C",
];

/// Closed-form metrics as fields in [`METRICS_HEADER`] order; second
/// moments are empty when they do not exist.
pub fn metrics_fields(m: &Metrics) -> Vec<String> {
    vec![
        fmt_num(m.e_t),
        fmt_num(m.e_c_cancel),
        fmt_num(m.e_c_nocancel),
        opt_num(m.second.map(|s| s.e_t2)),
        opt_num(m.second.map(|s| s.e_c2)),
        opt_num(m.sd_t()),
        opt_num(m.sd_c()),
    ]
}

pub const ESTIMATE_HEADER: [&str; 10] = [
    "E_T",
    "se_T",
    "E_C_cancel",
    "se_C_cancel",
    "E_C_nocancel",
    "se_C_nocancel",
    "E_T2",
    "E_C2",
    "runs",
    "seed",
];

pub fn estimate_fields(e: &MetricEstimate) -> Vec<String> {
    vec![
        fmt_num(e.latency.mean),
        fmt_num(e.latency.se),
        fmt_num(e.cost_cancel.mean),
        fmt_num(e.cost_cancel.se),
        fmt_num(e.cost_nocancel.mean),
        fmt_num(e.cost_nocancel.se),
        fmt_num(e.latency_sq.mean),
        fmt_num(e.cost_cancel_sq.mean),
        e.latency.runs.to_string(),
        e.seed.to_string(),
    ]
}

/// One closed-form row with a header.
pub fn write_metrics<W: Write>(out: W, m: &Metrics) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(METRICS_HEADER)?;
    w.write_record(metrics_fields(m))?;
    w.flush()?;
    Ok(())
}

/// One simulated row with a header.
pub fn write_estimate<W: Write>(out: W, e: &MetricEstimate) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ESTIMATE_HEADER)?;
    w.write_record(estimate_fields(e))?;
    w.flush()?;
    Ok(())
}

/// `param,E_T,E_C_cancel,E_C_nocancel`, plus `sd_T,sd_C` when `with_sd`.
pub fn write_curve<W: Write>(out: W, curve: &SweepCurve, with_sd: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![curve.param, "E_T", "E_C_cancel", "E_C_nocancel"];
    if with_sd {
        header.extend(["sd_T", "sd_C"]);
    }
    w.write_record(&header)?;
    for (v, m) in &curve.points {
        let mut row = vec![
            fmt_num(*v),
            fmt_num(m.e_t),
            fmt_num(m.e_c_cancel),
            fmt_num(m.e_c_nocancel),
        ];
        if with_sd {
            row.extend([opt_num(m.sd_t()), opt_num(m.sd_c())]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_simulated_curve<W: Write>(out: W, curve: &SimulatedCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![curve.param];
    header.extend(ESTIMATE_HEADER);
    w.write_record(&header)?;
    for (v, e) in &curve.points {
        let mut row = vec![fmt_num(*v)];
        row.extend(estimate_fields(e));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `t,tail` rows.
pub fn write_tail<W: Write>(out: W, points: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "tail"])?;
    for &(t, p) in points {
        w.write_record([fmt_num(t), fmt_num(p)])?;
    }
    w.flush()?;
    Ok(())
}
