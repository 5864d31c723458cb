//! Lowest latency reachable without paying more than a plain job.

use super::zero_delay::{g_norelaunch, zd_coded_pareto, zd_replicated_pareto};
use super::{check_alpha, check_k, check_positive, AnalyticError, Result};

/// Coded searches stop at `n = SEARCH_CAP_FACTOR · k`.
pub const SEARCH_CAP_FACTOR: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationBaseline {
    pub c_max: u32,
    pub e_t_min: f64,
}

/// Largest replication level `c_max = max{⌊1/(α−1)⌋ − 1, 0}` whose expected
/// cancelled cost does not exceed the plain job, and the latency it buys.
pub fn baseline_min_latency_replicated(
    k: u32,
    lambda: f64,
    alpha: f64,
) -> Result<ReplicationBaseline> {
    check_k(k)?;
    check_positive("lambda", lambda)?;
    check_alpha("alpha", alpha)?;
    // snap so that exact integers like 1/(1.1 − 1) are not floored to 9
    let ratio = 1.0 / (alpha - 1.0);
    let floor = (ratio + 1e-9).floor();
    let c_max = if floor - 1.0 > 0.0 {
        (floor - 1.0).min(u32::MAX as f64) as u32
    } else {
        0
    };
    let e_t_min = zd_replicated_pareto(k, c_max, lambda, alpha)?.e_t;
    Ok(ReplicationBaseline { c_max, e_t_min })
}

/// The set-builder reading of `n_max` as printed alongside the cost
/// condition: largest `n > k` with `E[T(n)] − E[T(k)]/(n−k) − λα ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrintedNmax {
    /// No `n` in `(k, cap]` satisfies the inequality.
    Empty,
    Bounded(u32),
    /// Still satisfied at the search cap; `E[T(n)] → λ ≤ λα` so the set
    /// never closes.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodedBaseline {
    pub n_max: u32,
    pub e_t_min: f64,
    /// `λα + g(k, α)`.
    pub upper_bound: f64,
    pub printed: PrintedNmax,
}

/// Largest code length `n` whose expected cancelled cost does not exceed
/// the plain job, found by exhaustive search over `n ∈ [k, 50k]`.
pub fn baseline_min_latency_coded(k: u32, lambda: f64, alpha: f64) -> Result<CodedBaseline> {
    check_k(k)?;
    check_positive("lambda", lambda)?;
    check_alpha("alpha", alpha)?;
    let cap = k.saturating_mul(SEARCH_CAP_FACTOR);
    let base = zd_coded_pareto(k, k, lambda, alpha)?;
    let g = g_norelaunch(k, lambda, alpha)?;
    let mut n_max = k;
    let mut e_t_min = base.e_t;
    let mut last_ok = true;
    for n in k + 1..=cap {
        let m = zd_coded_pareto(k, n, lambda, alpha)?;
        last_ok = m.e_c_cancel <= base.e_c_cancel * (1.0 + 1e-12);
        if last_ok {
            n_max = n;
            e_t_min = m.e_t;
        }
    }
    if last_ok && cap > k {
        return Err(AnalyticError::SearchCapReached {
            what: "code length n",
            cap,
        });
    }

    let mut printed = PrintedNmax::Empty;
    for n in k + 1..=cap {
        let t = zd_coded_pareto(k, n, lambda, alpha)?.e_t;
        if t - g / (n - k) as f64 - lambda * alpha <= 0.0 {
            printed = if n == cap {
                PrintedNmax::Unbounded
            } else {
                PrintedNmax::Bounded(n)
            };
        }
    }

    Ok(CodedBaseline {
        n_max,
        e_t_min,
        upper_bound: lambda * alpha + g,
        printed,
    })
}
