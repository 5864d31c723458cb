//! Second moments of latency and cancelled cost for zero-delay redundancy.

use super::order_stats::pareto_os_mean;
use super::zero_delay::{zd_coded_pareto, zd_coded_sexp, zd_replicated_pareto, zd_replicated_sexp};
use super::{check_k, check_positive, AnalyticError, Metrics, Redundancy, Result, SecondMoments};
use crate::distributions::ShiftedExp;
use crate::specialfn::{gamma_ratio, gen_harmonic2, harmonic};

fn check_indices(n: u32, i: u32, j: u32) -> Result<()> {
    if i == 0 || i > j || j > n {
        Err(AnalyticError::IndexOrder { n, i, j })
    } else {
        Ok(())
    }
}

/// `E[X_{n:i} X_{n:j}]` for `X ~ Exp(μ)`, `i ≤ j`.
pub fn joint_osm_exp(n: u32, i: u32, j: u32, mu: f64) -> Result<f64> {
    check_indices(n, i, j)?;
    check_positive("mu", mu)?;
    let h = |m: u32| harmonic(m as f64);
    let var_i = gen_harmonic2(n as u64) - gen_harmonic2((n - i) as u64);
    let mean_i = h(n)? - h(n - i)?;
    let mean_j = h(n)? - h(n - j)?;
    Ok((var_i + mean_i * mean_j) / (mu * mu))
}

/// `E[X_{n:i} X_{n:j}]` for `X ~ Pareto(λ, α)`, `i ≤ j`.
///
/// `λ² n!/Γ(n+1−2/α) · Γ(n−i+1−2/α)/Γ(n−i+1−1/α) · Γ(n−j+1−1/α)/Γ(n−j+1)`,
/// finite when `α > max{2/(n−i+1), 1/(n−j+1)}`.
pub fn joint_osm_pareto(n: u32, i: u32, j: u32, lambda: f64, alpha: f64) -> Result<f64> {
    check_indices(n, i, j)?;
    check_positive("lambda", lambda)?;
    check_positive("alpha", alpha)?;
    let a = (n - i + 1) as f64;
    let b = (n - j + 1) as f64;
    if !(alpha > 2.0 / a && alpha > 1.0 / b) {
        return Err(AnalyticError::MomentDoesNotExist { n, i, j, alpha });
    }
    let inv = 1.0 / alpha;
    let nf = n as f64;
    Ok(lambda
        * lambda
        * gamma_ratio(nf + 1.0, nf + 1.0 - 2.0 * inv)?
        * gamma_ratio(a - 2.0 * inv, a - inv)?
        * gamma_ratio(b - inv, b)?)
}

/// `Σ_{i,j=1}^{k} E[X_{n:i} X_{n:j}]` and `Σ_{i=1}^{k} E[X_{n:i} X_{n:k}]`
/// from an ordered-pair kernel.
fn pair_sums<F>(k: u32, joint: F) -> Result<(f64, f64)>
where
    F: Fn(u32, u32) -> Result<f64>,
{
    let mut all = 0.0;
    let mut with_last = 0.0;
    for i in 1..=k {
        for j in i..=k {
            let v = joint(i, j)?;
            all += if i == j { v } else { 2.0 * v };
            if j == k {
                with_last += v;
            }
        }
    }
    Ok((all, with_last))
}

/// First and second moments for zero-delay replication or coding under
/// per-task SExp(D/k, μ) times.
pub fn second_moments_sexp(k: u32, mode: Redundancy, task: &ShiftedExp) -> Result<Metrics> {
    check_k(k)?;
    let (d, mu) = (task.shift(), task.rate());
    let job_shift = k as f64 * d;
    match mode {
        Redundancy::None => second_moments_sexp(k, Redundancy::Replicate(0), task),
        Redundancy::Replicate(c) => {
            let first = zd_replicated_sexp(k, c, task)?;
            let copies = (c + 1) as f64;
            let rate = copies * mu;
            let e_t2 = first.e_t.powi(2) + gen_harmonic2(k as u64) / (rate * rate);
            let (all, _) = pair_sums(k, |i, j| joint_osm_exp(k, i, j, rate))?;
            let e_c2 = (copies * job_shift).powi(2)
                + 2.0 * job_shift * copies * k as f64 / mu
                + copies * copies * all;
            Ok(first.with_second(SecondMoments::new(first.e_t, first.e_c_cancel, e_t2, e_c2)?))
        }
        Redundancy::Code(n) => {
            let first = zd_coded_sexp(k, n, task)?;
            let nf = n as f64;
            let spread = (gen_harmonic2(n as u64) - gen_harmonic2((n - k) as u64)) / (mu * mu);
            let e_t2 = spread + first.e_t.powi(2);
            let extra = (n - k) as f64;
            let (all, with_last) = pair_sums(k, |i, j| joint_osm_exp(n, i, j, mu))?;
            let last2 = joint_osm_exp(n, k, k, mu)?;
            let e_c2 = (nf * d).powi(2)
                + 2.0 * nf * job_shift / mu
                + extra * extra * last2
                + 2.0 * extra * with_last
                + all;
            Ok(first.with_second(SecondMoments::new(first.e_t, first.e_c_cancel, e_t2, e_c2)?))
        }
    }
}

/// First and second moments for zero-delay replication or coding under
/// Pareto(λ, α) task times. Fails with the offending `(i, j)` when a joint
/// moment is infinite.
pub fn second_moments_pareto(k: u32, mode: Redundancy, lambda: f64, alpha: f64) -> Result<Metrics> {
    check_k(k)?;
    match mode {
        Redundancy::None => second_moments_pareto(k, Redundancy::Replicate(0), lambda, alpha),
        Redundancy::Replicate(c) => {
            let first = zd_replicated_pareto(k, c, lambda, alpha)?;
            let copies = (c + 1) as f64;
            let eff = copies * alpha;
            let e_t2 = joint_osm_pareto(k, k, k, lambda, eff)?;
            let (all, _) = pair_sums(k, |i, j| joint_osm_pareto(k, i, j, lambda, eff))?;
            let e_c2 = copies * copies * all;
            Ok(first.with_second(SecondMoments::new(first.e_t, first.e_c_cancel, e_t2, e_c2)?))
        }
        Redundancy::Code(n) => {
            let first = zd_coded_pareto(k, n, lambda, alpha)?;
            let extra = (n - k) as f64;
            let last2 = joint_osm_pareto(n, k, k, lambda, alpha)?;
            let (all, with_last) = pair_sums(k, |i, j| joint_osm_pareto(n, i, j, lambda, alpha))?;
            let e_c2 = extra * extra * last2 + 2.0 * extra * with_last + all;
            debug_assert!(
                (first.e_t - pareto_os_mean(n, k, lambda, alpha)?).abs() < 1e-9 * first.e_t
            );
            Ok(first.with_second(SecondMoments::new(
                first.e_t,
                first.e_c_cancel,
                last2,
                e_c2,
            )?))
        }
    }
}
