//! Redundancy launched together with the tasks (Δ = 0).

use super::order_stats::{exp_os_mean, pareto_os_mean};
use super::{check_alpha, check_k, check_positive, AnalyticError, Metrics, Result};
use crate::distributions::ShiftedExp;

/// Expected latency of `k` Pareto(λ, α) tasks with no redundancy and no
/// relaunch: `λ k! Γ(1−1/α) / Γ(k+1−1/α)`.
pub fn g_norelaunch(k: u32, lambda: f64, alpha: f64) -> Result<f64> {
    check_k(k)?;
    check_positive("lambda", lambda)?;
    check_alpha("alpha", alpha)?;
    pareto_os_mean(k, k, lambda, alpha)
}

/// Replicate each task `c` times at time zero; per-task times are
/// `task` = SExp(D/k, μ).
pub fn zd_replicated_sexp(k: u32, c: u32, task: &ShiftedExp) -> Result<Metrics> {
    check_k(k)?;
    let (d, mu) = (task.shift(), task.rate());
    let copies = (c + 1) as f64;
    let kf = k as f64;
    // each task finishes at d + Exp((c+1)μ)
    let e_t = d + exp_os_mean(k, k, copies * mu)?;
    let e_c = copies * kf * d + kf / mu;
    let e_c_nocancel = copies * kf * (d + 1.0 / mu);
    Ok(Metrics::new(e_t, e_c, e_c_nocancel))
}

/// Code `k` tasks into `n` at time zero under SExp(D/k, μ) task times.
pub fn zd_coded_sexp(k: u32, n: u32, task: &ShiftedExp) -> Result<Metrics> {
    check_k(k)?;
    if n < k {
        return Err(AnalyticError::CodeTooShort { k, n });
    }
    let (d, mu) = (task.shift(), task.rate());
    let nf = n as f64;
    let e_t = d + exp_os_mean(n, k, mu)?;
    let e_c = nf * d + k as f64 / mu;
    let e_c_nocancel = nf * (d + 1.0 / mu);
    Ok(Metrics::new(e_t, e_c, e_c_nocancel))
}

/// Replicate each task `c` times at time zero under Pareto(λ, α).
///
/// Each task then behaves like a single Pareto(λ, (c+1)α) task, so only
/// `(c+1)α > 1` is needed for latency and cancelled cost. The cost without
/// cancellation is infinite when `α ≤ 1`.
pub fn zd_replicated_pareto(k: u32, c: u32, lambda: f64, alpha: f64) -> Result<Metrics> {
    check_k(k)?;
    check_positive("lambda", lambda)?;
    check_positive("alpha", alpha)?;
    let copies = (c + 1) as f64;
    let eff = copies * alpha;
    check_alpha("(c+1)·alpha", eff)?;
    let kf = k as f64;
    let e_t = pareto_os_mean(k, k, lambda, eff)?;
    let e_c = lambda * kf * copies * eff / (eff - 1.0);
    let e_c_nocancel = if alpha > 1.0 {
        copies * kf * lambda * alpha / (alpha - 1.0)
    } else {
        f64::INFINITY
    };
    Ok(Metrics::new(e_t, e_c, e_c_nocancel))
}

/// Code `k` tasks into `n` at time zero under Pareto(λ, α).
///
/// Cost with cancellation is `λ n/(α−1) [α − (n−k)/n · E[T]/λ]`, which is the
/// Gamma-ratio form with `Γ(n)/Γ(n−k)` rewritten so that `n = k` needs no
/// limit.
pub fn zd_coded_pareto(k: u32, n: u32, lambda: f64, alpha: f64) -> Result<Metrics> {
    check_k(k)?;
    if n < k {
        return Err(AnalyticError::CodeTooShort { k, n });
    }
    check_positive("lambda", lambda)?;
    check_alpha("alpha", alpha)?;
    let nf = n as f64;
    let e_t = pareto_os_mean(n, k, lambda, alpha)?;
    let parity_share = if n == k {
        0.0
    } else {
        (n - k) as f64 / nf * e_t / lambda
    };
    let e_c = lambda * nf / (alpha - 1.0) * (alpha - parity_share);
    let e_c_nocancel = nf * lambda * alpha / (alpha - 1.0);
    Ok(Metrics::new(e_t, e_c, e_c_nocancel))
}
