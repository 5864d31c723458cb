//! Closed-form latency and cost of redundant and relaunched jobs.
//!
//! A job has `k` tasks with i.i.d. execution times. Zero-delay redundancy
//! (replication or erasure coding), second moments, the baseline-cost
//! corollaries, relaunch of stragglers at a delay `Δ`, and relaunch combined
//! with redundancy each live in their own submodule. [`closed_form`] picks the
//! right one for a [`RedundancyPlan`] and a task-time model.

mod baseline;
mod moments;
mod order_stats;
mod relaunch;
mod zero_delay;

pub use baseline::{
    baseline_min_latency_coded, baseline_min_latency_replicated, CodedBaseline, PrintedNmax,
    ReplicationBaseline, SEARCH_CAP_FACTOR,
};
pub use moments::{joint_osm_exp, joint_osm_pareto, second_moments_pareto, second_moments_sexp};
pub use order_stats::{exp_os_mean, pareto_os_mean};
pub use relaunch::{
    completed_before_delay, opt_relaunch, relaunch_coded_latency_mean_field,
    relaunch_coded_metrics, relaunch_metrics, relaunch_replicated_latency_mean_field,
    relaunch_replicated_metrics, relaunch_tail, RelaunchDerived,
};
pub use zero_delay::{
    g_norelaunch, zd_coded_pareto, zd_coded_sexp, zd_replicated_pareto, zd_replicated_sexp,
};

use thiserror::Error;

use crate::distributions::TaskTimeModel;
use crate::specialfn::SpecialFnError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("a job needs at least one task")]
    NoTasks,
    #[error("code length n = {n} is smaller than the task count k = {k}")]
    CodeTooShort { k: u32, n: u32 },
    #[error(
        "order statistic indices must satisfy 1 <= i <= j <= n, got n = {n}, i = {i}, j = {j}"
    )]
    IndexOrder { n: u32, i: u32, j: u32 },
    #[error("E[X_{{{n}:{i}}} X_{{{n}:{j}}}] is infinite for tail index {alpha}")]
    MomentDoesNotExist { n: u32, i: u32, j: u32, alpha: f64 },
    #[error("expected value is infinite for effective tail index {0} <= 1")]
    InfiniteMean(f64),
    #[error("negative variance {value} for {metric}")]
    NegativeVariance { metric: &'static str, value: f64 },
    #[error("exhaustive search over {what} reached its cap {cap} without bracketing")]
    SearchCapReached { what: &'static str, cap: u32 },
    #[error("minimization of the relaunch latency did not converge")]
    NoConvergence,
    #[error("Beta function pole at B({m}, {n})")]
    BetaPole { m: f64, n: f64 },
    #[error("no closed form for {0}")]
    Unsupported(String),
    #[error(transparent)]
    Special(#[from] SpecialFnError),
}

pub type Result<T> = std::result::Result<T, AnalyticError>;

/// How redundancy is added to a job.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Redundancy {
    None,
    /// `c` extra clones of every task still running at the delay.
    Replicate(u32),
    /// Total of `n` tasks, any `k` of which complete the job.
    Code(u32),
}

/// Shape of one job: task count, redundancy, delay and relaunch policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedundancyPlan {
    k: u32,
    mode: Redundancy,
    delay: f64,
    relaunch: bool,
    cancel: bool,
}

impl RedundancyPlan {
    pub fn new(k: u32, mode: Redundancy, delay: f64, relaunch: bool) -> Result<Self> {
        if k == 0 {
            return Err(AnalyticError::NoTasks);
        }
        if let Redundancy::Code(n) = mode {
            if n < k {
                return Err(AnalyticError::CodeTooShort { k, n });
            }
        }
        if !(delay >= 0.0) {
            return Err(AnalyticError::InvalidParameter {
                name: "delay",
                value: delay,
                reason: "must be >= 0",
            });
        }
        if relaunch && !delay.is_finite() {
            return Err(AnalyticError::InvalidParameter {
                name: "delay",
                value: delay,
                reason: "relaunch needs a finite delay",
            });
        }
        Ok(Self {
            k,
            mode,
            delay,
            relaunch,
            cancel: true,
        })
    }

    /// Redundancy launched together with the tasks at time zero.
    pub fn zero_delay(k: u32, mode: Redundancy) -> Result<Self> {
        Self::new(k, mode, 0.0, false)
    }

    /// Relaunch stragglers at `delay`, adding `mode` redundancy at that time.
    pub fn relaunch(k: u32, mode: Redundancy, delay: f64) -> Result<Self> {
        Self::new(k, mode, delay, true)
    }

    /// Plain job: `k` tasks, nothing else.
    pub fn baseline(k: u32) -> Result<Self> {
        Self::new(k, Redundancy::None, f64::INFINITY, false)
    }

    pub fn with_cancel(mut self, cancel: bool) -> Self {
        self.cancel = cancel;
        self
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn mode(&self) -> Redundancy {
        self.mode
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn relaunches(&self) -> bool {
        self.relaunch
    }

    /// Whether the reported cost should be the one with cancellation.
    pub fn cancels(&self) -> bool {
        self.cancel
    }

    /// Collapse equivalent encodings: `Replicate(0)` and `Code(k)` become
    /// `None`, and a plan that never acts at its delay gets `delay = ∞`.
    pub fn canonical(&self) -> Self {
        let mut plan = *self;
        plan.mode = match self.mode {
            Redundancy::Replicate(0) => Redundancy::None,
            Redundancy::Code(n) if n == self.k => Redundancy::None,
            m => m,
        };
        if !plan.relaunch && plan.delay.is_infinite() {
            plan.mode = Redundancy::None;
        }
        if !plan.relaunch && plan.mode == Redundancy::None {
            plan.delay = f64::INFINITY;
        }
        plan
    }

    /// Number of redundant tasks per job if redundancy kicks in.
    pub fn redundant_tasks(&self) -> u32 {
        match self.mode {
            Redundancy::None => 0,
            Redundancy::Replicate(c) => c * self.k,
            Redundancy::Code(n) => n - self.k,
        }
    }
}

/// Second moments of latency and of cost with cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub e_t2: f64,
    pub e_c2: f64,
    pub sd_t: f64,
    pub sd_c: f64,
}

impl SecondMoments {
    /// Derive standard deviations, rejecting variances that come out
    /// negative beyond rounding.
    pub fn new(e_t: f64, e_c: f64, e_t2: f64, e_c2: f64) -> Result<Self> {
        let sd = |metric: &'static str, m1: f64, m2: f64| {
            let var = m2 - m1 * m1;
            if var < -1e-9 * m2.abs().max(1.0) {
                Err(AnalyticError::NegativeVariance { metric, value: var })
            } else {
                Ok(var.max(0.0).sqrt())
            }
        };
        Ok(Self {
            e_t2,
            e_c2,
            sd_t: sd("latency", e_t, e_t2)?,
            sd_c: sd("cost", e_c, e_c2)?,
        })
    }
}

/// Expected latency and cost of one job.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub e_t: f64,
    /// Outstanding tasks are cancelled once they are no longer needed.
    pub e_c_cancel: f64,
    /// Every launched task runs to completion.
    pub e_c_nocancel: f64,
    pub second: Option<SecondMoments>,
}

impl Metrics {
    pub fn new(e_t: f64, e_c_cancel: f64, e_c_nocancel: f64) -> Self {
        Self {
            e_t,
            e_c_cancel,
            e_c_nocancel,
            second: None,
        }
    }

    pub fn with_second(mut self, second: SecondMoments) -> Self {
        self.second = Some(second);
        self
    }

    pub fn sd_t(&self) -> Option<f64> {
        self.second.map(|s| s.sd_t)
    }

    pub fn sd_c(&self) -> Option<f64> {
        self.second.map(|s| s.sd_c)
    }
}

pub(crate) fn check_alpha(name: &'static str, alpha: f64) -> Result<()> {
    if alpha > 1.0 && !alpha.is_nan() {
        Ok(())
    } else if alpha > 0.0 {
        Err(AnalyticError::InfiniteMean(alpha))
    } else {
        Err(AnalyticError::InvalidParameter {
            name,
            value: alpha,
            reason: "tail index must be > 1",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(AnalyticError::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

pub(crate) fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        Err(AnalyticError::NoTasks)
    } else {
        Ok(())
    }
}

/// Closed-form metrics for `plan` under `model`, when one exists.
///
/// Second moments are attached for zero-delay plans when they exist (always
/// for shifted exponential, for Pareto when the tail is light enough).
pub fn closed_form(plan: &RedundancyPlan, model: &TaskTimeModel) -> Result<Metrics> {
    let plan = plan.canonical();
    let k = plan.k();
    match model {
        TaskTimeModel::Empirical(_) => Err(AnalyticError::Unsupported(
            "empirical task-time distributions; use simulation".into(),
        )),
        TaskTimeModel::ShiftedExp(d) => {
            if plan.relaunches() {
                return Err(AnalyticError::Unsupported(
                    "relaunch under shifted-exponential task times (relaunch formulas cover Pareto only)"
                        .into(),
                ));
            }
            if plan.mode() != Redundancy::None && plan.delay() > 0.0 {
                return Err(AnalyticError::Unsupported(
                    "delayed redundancy without relaunch; use simulation".into(),
                ));
            }
            let mode = match plan.mode() {
                Redundancy::None => Redundancy::Replicate(0),
                m => m,
            };
            second_moments_sexp(k, mode, d)
        }
        TaskTimeModel::Pareto(d) => {
            let (lambda, alpha) = (d.scale(), d.shape());
            if plan.relaunches() {
                let delay = plan.delay();
                return match plan.mode() {
                    Redundancy::None => relaunch_metrics(k, lambda, alpha, delay),
                    Redundancy::Replicate(c) => {
                        relaunch_replicated_metrics(k, c, delay, lambda, alpha)
                    }
                    Redundancy::Code(n) => relaunch_coded_metrics(k, n, delay, lambda, alpha),
                };
            }
            if plan.mode() != Redundancy::None && plan.delay() > 0.0 {
                return Err(AnalyticError::Unsupported(
                    "delayed redundancy without relaunch; use simulation".into(),
                ));
            }
            let first = match plan.mode() {
                Redundancy::None => zd_coded_pareto(k, k, lambda, alpha)?,
                Redundancy::Replicate(c) => zd_replicated_pareto(k, c, lambda, alpha)?,
                Redundancy::Code(n) => zd_coded_pareto(k, n, lambda, alpha)?,
            };
            let mode = match plan.mode() {
                Redundancy::None => Redundancy::Replicate(0),
                m => m,
            };
            match second_moments_pareto(k, mode, lambda, alpha) {
                Ok(with_second) => Ok(with_second),
                Err(AnalyticError::MomentDoesNotExist { .. }) => Ok(first),
                Err(e) => Err(e),
            }
        }
    }
}
