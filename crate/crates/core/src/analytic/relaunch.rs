//! Relaunching stragglers at a delay `Δ`, with or without redundancy added
//! at the same time.
//!
//! Tasks that finish before `Δ` are kept. The `k − R` tasks still running
//! at `Δ` are cancelled (each has cost `Δ` so far) and restarted from
//! scratch. `R ~ Binomial(k, q)` with `q = Pr{X < Δ} = 1 − (λ/Δ)^α` for
//! `Δ > λ` and zero otherwise.
//!
//! Latency with redundancy is a mixture over `R`: given `R = k − m`, the
//! job finishes at `Δ` plus the `m`-th order statistic of the restarted
//! tasks. The mixture is summed exactly; the `*_mean_field` variants plug
//! `E[R] = kq` into the same Beta expressions instead, which is cheaper but
//! visibly biased (tens of standard errors at 10⁵ runs for k = 10).

use super::order_stats::pareto_os_mean;
use super::zero_delay::{g_norelaunch, zd_coded_pareto, zd_replicated_pareto};
use super::{check_alpha, check_k, check_positive, AnalyticError, Metrics, Result};
use crate::quadrature::golden_section;
use crate::specialfn::{beta_ext, gamma, gamma_ratio, ln_gamma, reg_inc_beta, SpecialFnError};

/// `(q, 1 − q)` with the survivor fraction `(λ/Δ)^α` computed directly.
pub fn completed_before_delay(lambda: f64, alpha: f64, delay: f64) -> (f64, f64) {
    if delay > lambda {
        let p = (lambda / delay).powf(alpha);
        (1.0 - p, p)
    } else {
        (0.0, 1.0)
    }
}

fn check_delay(delay: f64) -> Result<()> {
    if delay >= 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::InvalidParameter {
            name: "delay",
            value: delay,
            reason: "must be >= 0",
        })
    }
}

fn check_common(k: u32, lambda: f64, alpha: f64, delay: f64) -> Result<()> {
    check_k(k)?;
    check_positive("lambda", lambda)?;
    check_alpha("alpha", alpha)?;
    check_delay(delay)
}

/// `Pr{T > t}` for a plain job with relaunch at `delay`.
///
/// Each task independently finishes at `X` if `X < Δ`, otherwise at
/// `Δ + X'` for a fresh copy `X'`, so
/// `Pr{T ≤ t} = [F(min(t, Δ)) + 1(t > Δ)(1 − q) F(t − Δ)]^k`.
pub fn relaunch_tail(k: u32, lambda: f64, alpha: f64, delay: f64, t: f64) -> Result<f64> {
    check_common(k, lambda, alpha, delay)?;
    let cdf = |x: f64| {
        if x <= lambda {
            0.0
        } else {
            1.0 - (lambda / x).powf(alpha)
        }
    };
    let (_, survive) = completed_before_delay(lambda, alpha, delay);
    let mut per_task = cdf(t.min(delay));
    if t > delay {
        per_task += survive * cdf(t - delay);
    }
    Ok((1.0 - per_task.clamp(0.0, 1.0).powi(k as i32)).clamp(0.0, 1.0))
}

/// Expected latency and cost of a plain job relaunched at `delay`.
///
/// Without redundancy nothing is outstanding when the job completes, so the
/// two cost variants coincide. `delay = ∞` means no relaunch.
pub fn relaunch_metrics(k: u32, lambda: f64, alpha: f64, delay: f64) -> Result<Metrics> {
    check_common(k, lambda, alpha, delay)?;
    let g = g_norelaunch(k, lambda, alpha)?;
    let kf = k as f64;
    let mean = lambda * alpha / (alpha - 1.0);
    if delay.is_infinite() {
        return Ok(Metrics::new(g, kf * mean, kf * mean));
    }
    if delay <= lambda {
        let cost = kf * delay + kf * mean;
        return Ok(Metrics::new(delay + g, cost, cost));
    }
    let (_, p) = completed_before_delay(lambda, alpha, delay);
    // 1 − q^k without cancellation when q ≈ 1
    let some_restarted = -(kf * (-p).ln_1p()).exp_m1();
    let e_t = delay * some_restarted
        + g * ((lambda / delay - 1.0) * reg_inc_beta(p, 1.0 - 1.0 / alpha, kf)? + 1.0);
    let cost = kf * mean * (1.0 + p) - kf * delay * p / (alpha - 1.0);
    Ok(Metrics::new(e_t, cost, cost))
}

/// `Pr{M = m}` for `M ~ Binomial(k, p)`, `m = 1..=k`, in log space.
fn restarted_pmf(k: u32, p: f64) -> Result<Vec<f64>> {
    let kf = k as f64;
    let ln_k_fact = ln_gamma(kf + 1.0)?;
    let (ln_p, ln_q) = (p.ln(), (-p).ln_1p());
    (1..=k)
        .map(|m| {
            let mf = m as f64;
            let ln_choose = ln_k_fact - ln_gamma(mf + 1.0)? - ln_gamma(kf - mf + 1.0)?;
            let ln_rest = if m == k { 0.0 } else { (kf - mf) * ln_q };
            Ok((ln_choose + mf * ln_p + ln_rest).exp())
        })
        .collect()
}

/// Relaunch at `delay` with `c` extra replicas for every restarted task.
///
/// Costs are linear in `R` and follow from per-task accounting; latency is
/// the exact mixture over `R`.
pub fn relaunch_replicated_metrics(
    k: u32,
    c: u32,
    delay: f64,
    lambda: f64,
    alpha: f64,
) -> Result<Metrics> {
    check_common(k, lambda, alpha, delay)?;
    let copies = (c + 1) as f64;
    let eff = copies * alpha;
    let kf = k as f64;
    if delay <= lambda {
        let zd = zd_replicated_pareto(k, c, lambda, alpha)?;
        return Ok(Metrics::new(
            delay + zd.e_t,
            kf * delay + zd.e_c_cancel,
            kf * delay + zd.e_c_nocancel,
        ));
    }
    if delay.is_infinite() {
        return relaunch_metrics(k, lambda, alpha, delay);
    }
    let plain = relaunch_metrics(k, lambda, alpha, delay)?;
    let (_, p) = completed_before_delay(lambda, alpha, delay);
    let pmf = restarted_pmf(k, p)?;
    let mut e_t = plain.e_t;
    for (m, w) in (1..=k).zip(pmf) {
        e_t += w * (pareto_os_mean(m, m, lambda, eff)? - pareto_os_mean(m, m, lambda, alpha)?);
    }
    let kept = kf * alpha / (alpha - 1.0) * (lambda - delay * p) + kf * p * delay;
    let e_c_cancel = kept + kf * lambda * copies * p * eff / (eff - 1.0);
    let e_c_nocancel = kept + kf * lambda * copies * p * alpha / (alpha - 1.0);
    Ok(Metrics::new(e_t, e_c_cancel, e_c_nocancel))
}

/// Relaunch at `delay` and add `n − k` parity tasks at the same time.
pub fn relaunch_coded_metrics(
    k: u32,
    n: u32,
    delay: f64,
    lambda: f64,
    alpha: f64,
) -> Result<Metrics> {
    check_common(k, lambda, alpha, delay)?;
    if n < k {
        return Err(AnalyticError::CodeTooShort { k, n });
    }
    let kf = k as f64;
    let nf = n as f64;
    let extra = (n - k) as f64;
    let mean = lambda * alpha / (alpha - 1.0);
    if delay <= lambda {
        let zd = zd_coded_pareto(k, n, lambda, alpha)?;
        return Ok(Metrics::new(
            delay + zd.e_t,
            kf * delay + zd.e_c_cancel,
            kf * delay + zd.e_c_nocancel,
        ));
    }
    if delay.is_infinite() {
        return relaunch_metrics(k, lambda, alpha, delay);
    }
    let plain = relaunch_metrics(k, lambda, alpha, delay)?;
    let (q, p) = completed_before_delay(lambda, alpha, delay);
    let pmf = restarted_pmf(k, p)?;
    let mut e_t = plain.e_t;
    let mut fresh_cost = 0.0;
    for (m, w) in (1..=k).zip(pmf) {
        // m restarted tasks plus the parities race for m completions
        let pool = n - k + m;
        let need = pareto_os_mean(pool, m, lambda, alpha)?;
        e_t += w * (need - pareto_os_mean(m, m, lambda, alpha)?);
        fresh_cost += w * (mean * pool as f64 - extra / (alpha - 1.0) * need);
    }
    let kept = kf * alpha / (alpha - 1.0) * (lambda - delay * p) + kf * p * delay;
    let e_c_cancel = kept + fresh_cost;
    let q_k = q.powi(k as i32);
    let e_c_nocancel = alpha / (alpha - 1.0)
        * (kf * lambda * (p + q_k) + nf * lambda * (1.0 - q_k))
        - kf * delay * p / (alpha - 1.0);
    Ok(Metrics::new(e_t, e_c_cancel, e_c_nocancel))
}

fn beta_checked(m: f64, n: f64) -> Result<f64> {
    beta_ext(m, n).map_err(|e| match e {
        SpecialFnError::Pole(_) => AnalyticError::BetaPole { m, n },
        other => other.into(),
    })
}

/// Replicated relaunch latency with `R` replaced by its mean `kq` inside
/// the Beta terms. Kept for comparison with [`relaunch_replicated_metrics`].
pub fn relaunch_replicated_latency_mean_field(
    k: u32,
    c: u32,
    delay: f64,
    lambda: f64,
    alpha: f64,
) -> Result<f64> {
    check_common(k, lambda, alpha, delay)?;
    let eff = (c + 1) as f64 * alpha;
    if delay <= lambda {
        return Ok(delay + g_norelaunch(k, lambda, eff)?);
    }
    let (q, _) = completed_before_delay(lambda, alpha, delay);
    let first = k as f64 * (1.0 - q) + 1.0;
    let term = |a: f64| -> Result<f64> {
        Ok(lambda * gamma(1.0 - 1.0 / a)? / gamma(-1.0 / a)? * beta_checked(first, -1.0 / a)?)
    };
    Ok(term(eff)? - term(alpha)? + relaunch_metrics(k, lambda, alpha, delay)?.e_t)
}

/// Coded relaunch latency with `R` replaced by its mean `kq`. Kept for
/// comparison with [`relaunch_coded_metrics`]; it does not reduce to
/// [`relaunch_metrics`] at `n = k`.
pub fn relaunch_coded_latency_mean_field(
    k: u32,
    n: u32,
    delay: f64,
    lambda: f64,
    alpha: f64,
) -> Result<f64> {
    check_common(k, lambda, alpha, delay)?;
    if n < k {
        return Err(AnalyticError::CodeTooShort { k, n });
    }
    if delay <= lambda {
        return Ok(delay + pareto_os_mean(n, k, lambda, alpha)?);
    }
    let (q, _) = completed_before_delay(lambda, alpha, delay);
    let (kf, nf) = (k as f64, n as f64);
    let inv = -1.0 / alpha;
    let ratio = beta_checked(nf - kf * q + 1.0, inv)? / beta_checked(nf - kf + 1.0, inv)?;
    let inc = reg_inc_beta(q, kf, 1.0 + inv)? * beta_ext(kf, 1.0 + inv)?;
    let q_k = q.powi(k as i32);
    Ok(delay * (1.0 - q_k) + lambda * (ratio + kf * inc - q_k))
}

/// Optimal relaunch quantities for a plain job.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaunchDerived {
    /// `q` at `delta_star`.
    pub q: f64,
    /// Latency without relaunch, `g(k, α)`.
    pub g: f64,
    /// `λ √(k! Γ(1−1/α) / Γ(k+1−1/α))`.
    pub delta_star: f64,
    /// Numerical minimizer of the relaunch latency.
    pub delta_exact: f64,
    /// Latency at `delta_exact`.
    pub e_t_min: f64,
    /// `Γ(1−1/α)^(−α/2) / √(k+1)`.
    pub p_star: f64,
    /// `ln(k+1) / ln 4`.
    pub alpha_sufficient: f64,
}

const SCAN_POINTS: usize = 400;

/// Closed-form approximations for the best relaunch delay, plus the exact
/// minimizer found by a log-spaced scan refined with golden-section search.
pub fn opt_relaunch(k: u32, lambda: f64, alpha: f64) -> Result<RelaunchDerived> {
    check_k(k)?;
    check_positive("lambda", lambda)?;
    check_alpha("alpha", alpha)?;
    let g = g_norelaunch(k, lambda, alpha)?;
    let kf = k as f64;
    let delta_star = lambda
        * (gamma_ratio(kf + 1.0, kf + 1.0 - 1.0 / alpha)? * gamma(1.0 - 1.0 / alpha)?).sqrt();
    let p_star = gamma(1.0 - 1.0 / alpha)?.powf(-alpha / 2.0) / (kf + 1.0).sqrt();
    let alpha_sufficient = (kf + 1.0).ln() / 4f64.ln();
    let (q, _) = completed_before_delay(lambda, alpha, delta_star);

    let latency = |d: f64| {
        relaunch_metrics(k, lambda, alpha, d)
            .map(|m| m.e_t)
            .unwrap_or(f64::INFINITY)
    };
    // latency grows with Δ on [0, λ], so the interior minimum sits above λ
    let hi = (100.0 * delta_star).max(10.0 * lambda);
    let ln_lo = lambda.ln();
    let step = (hi.ln() - ln_lo) / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| (ln_lo + step * i as f64).exp())
        .collect();
    let values: Vec<f64> = grid.iter().map(|&d| latency(d)).collect();
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or(AnalyticError::NoConvergence)?;
    let (delta_exact, e_t_min) = if g <= values[best] {
        // relaunching never helps: Δ → 0 (equivalently ∞) is optimal
        (0.0, g)
    } else {
        let lo = grid[best.saturating_sub(1)];
        let up = grid[(best + 1).min(SCAN_POINTS - 1)];
        let m = golden_section(latency, lo, up, 1e-10, 500).ok_or(AnalyticError::NoConvergence)?;
        if m.value <= values[best] {
            (m.x, m.value)
        } else {
            (grid[best], values[best])
        }
    };

    Ok(RelaunchDerived {
        q,
        g,
        delta_star,
        delta_exact,
        e_t_min,
        p_star,
        alpha_sufficient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pareto(rng: &mut ChaCha8Rng, lambda: f64, alpha: f64) -> f64 {
        lambda * (1.0 - rng.gen::<f64>()).powf(-1.0 / alpha)
    }

    /// Independent simulation of a relaunched job: (latency, cost_cancel, cost_nocancel).
    fn simulate_job(
        rng: &mut ChaCha8Rng,
        k: usize,
        extra: Extra,
        delay: f64,
        alpha: f64,
    ) -> [f64; 3] {
        let originals: Vec<f64> = (0..k).map(|_| pareto(rng, 1.0, alpha)).collect();
        let done: Vec<f64> = originals.iter().copied().filter(|&x| x < delay).collect();
        let restarted = k - done.len();
        let kept: f64 = done.iter().sum::<f64>() + restarted as f64 * delay;
        let early_max = done.iter().copied().fold(0.0, f64::max);
        if restarted == 0 {
            return [early_max, kept, kept];
        }
        match extra {
            Extra::Replicas(c) => {
                let mut t: f64 = early_max;
                let (mut cc, mut cn) = (kept, kept);
                for _ in 0..restarted {
                    let ys: Vec<f64> = (0..=c).map(|_| pareto(rng, 1.0, alpha)).collect();
                    let first = ys.iter().copied().fold(f64::INFINITY, f64::min);
                    t = t.max(delay + first);
                    cc += (c + 1) as f64 * first;
                    cn += ys.iter().sum::<f64>();
                }
                [t, cc, cn]
            }
            Extra::Parities(extra) => {
                let mut ys: Vec<f64> = (0..restarted + extra)
                    .map(|_| pareto(rng, 1.0, alpha))
                    .collect();
                let cn = kept + ys.iter().sum::<f64>();
                ys.sort_by(f64::total_cmp);
                let stop = ys[restarted - 1];
                let cc = kept + ys.iter().map(|&y| y.min(stop)).sum::<f64>();
                [(delay + stop).max(early_max), cc, cn]
            }
        }
    }

    #[derive(Clone, Copy)]
    enum Extra {
        Replicas(usize),
        Parities(usize),
    }

    fn mc(
        k: usize,
        extra: Extra,
        delay: f64,
        alpha: f64,
        runs: usize,
        seed: u64,
    ) -> [(f64, f64); 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut acc = [[0.0f64; 2]; 3];
        for _ in 0..runs {
            let out = simulate_job(&mut rng, k, extra, delay, alpha);
            for (a, v) in acc.iter_mut().zip(out) {
                a[0] += v;
                a[1] += v * v;
            }
        }
        acc.map(|[s, s2]| {
            let m = s / runs as f64;
            (m, ((s2 / runs as f64 - m * m) / (runs - 1) as f64).sqrt())
        })
    }

    fn assert_mc(m: &Metrics, est: [(f64, f64); 3]) {
        for (name, value, (mean, se)) in [
            ("latency", m.e_t, est[0]),
            ("cost_cancel", m.e_c_cancel, est[1]),
            ("cost_nocancel", m.e_c_nocancel, est[2]),
        ] {
            assert!(
                (value - mean).abs() <= 3.0 * se,
                "{name}: closed form {value}, MC {mean} ± {se}"
            );
        }
    }

    #[test]
    fn tail_boundaries() {
        assert_eq!(relaunch_tail(3, 1.0, 2.0, 2.0, 0.5).unwrap(), 1.0);
        assert_eq!(relaunch_tail(3, 1.0, 2.0, 2.0, 1.0).unwrap(), 1.0);
        assert!(relaunch_tail(3, 1.0, 2.0, 2.0, 1e9).unwrap() < 1e-12);
        let mut prev = 1.0;
        for i in 0..4000 {
            let v = relaunch_tail(3, 1.0, 2.0, 2.0, i as f64 * 0.01).unwrap();
            assert!((0.0..=1.0).contains(&v) && v <= prev);
            prev = v;
        }
    }

    #[test]
    fn tail_against_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let runs = 1_000_000;
        let mut lat: Vec<f64> = (0..runs)
            .map(|_| simulate_job(&mut rng, 3, Extra::Replicas(0), 2.0, 2.0)[0])
            .collect();
        lat.sort_by(f64::total_cmp);
        let empirical = |t: f64| (runs - lat.partition_point(|&x| x <= t)) as f64 / runs as f64;
        for t in [1.5, 2.5, 3.0, 4.0, 8.0] {
            let v = relaunch_tail(3, 1.0, 2.0, 2.0, t).unwrap();
            assert!((v - empirical(t)).abs() < 0.005, "t = {t}");
        }
    }

    #[test]
    fn plain_relaunch_endpoints() {
        for (k, alpha) in [(1, 1.5), (10, 2.0), (100, 3.0)] {
            let g = g_norelaunch(k, 1.0, alpha).unwrap();
            let zero = relaunch_metrics(k, 1.0, alpha, 0.0).unwrap();
            assert!((zero.e_t - g).abs() < 1e-12 * g);
            assert!((zero.e_c_cancel - k as f64 * alpha / (alpha - 1.0)).abs() < 1e-9);
            let far = relaunch_metrics(k, 1.0, alpha, 1e6).unwrap();
            assert!((far.e_t - g).abs() < 1e-3 * g);
            assert!((far.e_c_nocancel - zero.e_c_nocancel).abs() < 1e-3 * zero.e_c_nocancel);
            let never = relaunch_metrics(k, 1.0, alpha, f64::INFINITY).unwrap();
            assert_eq!(never.e_t, g);
        }
    }

    #[test]
    fn plain_relaunch_against_monte_carlo() {
        let m = relaunch_metrics(100, 1.0, 2.0, 4.22).unwrap();
        assert_mc(&m, mc(100, Extra::Replicas(0), 4.22, 2.0, 100_000, 6));
        let m = relaunch_metrics(3, 1.0, 1.5, 2.0).unwrap();
        assert_mc(&m, mc(3, Extra::Replicas(0), 2.0, 1.5, 200_000, 7));
    }

    #[test]
    fn replicated_reduces_to_plain_and_zero_delay() {
        for delay in [0.0, 0.5, 1.0, 2.0, 7.0] {
            let a = relaunch_replicated_metrics(6, 0, delay, 1.0, 2.0).unwrap();
            let b = relaunch_metrics(6, 1.0, 2.0, delay).unwrap();
            assert!((a.e_t - b.e_t).abs() < 1e-9 * b.e_t);
            assert!((a.e_c_cancel - b.e_c_cancel).abs() < 1e-9 * b.e_c_cancel);
            assert!((a.e_c_nocancel - b.e_c_nocancel).abs() < 1e-9 * b.e_c_nocancel);
        }
        let a = relaunch_replicated_metrics(6, 1, 0.0, 1.0, 2.0).unwrap();
        let zd = zd_replicated_pareto(6, 1, 1.0, 2.0).unwrap();
        assert!((a.e_t - zd.e_t).abs() < 1e-12);
    }

    #[test]
    fn replicated_against_monte_carlo() {
        let m = relaunch_replicated_metrics(10, 1, 2.0, 1.0, 2.0).unwrap();
        assert_mc(&m, mc(10, Extra::Replicas(1), 2.0, 2.0, 100_000, 8));
        let mean_field = relaunch_replicated_latency_mean_field(10, 1, 2.0, 1.0, 2.0).unwrap();
        assert!((mean_field - m.e_t).abs() > 0.03);
    }

    #[test]
    fn coded_reduces_to_plain() {
        for delay in [0.0, 0.5, 1.0, 3.0, 9.0] {
            let a = relaunch_coded_metrics(8, 8, delay, 1.0, 2.5).unwrap();
            let b = relaunch_metrics(8, 1.0, 2.5, delay).unwrap();
            assert!((a.e_t - b.e_t).abs() < 1e-9 * b.e_t);
            assert!((a.e_c_cancel - b.e_c_cancel).abs() < 1e-9 * b.e_c_cancel);
            assert!((a.e_c_nocancel - b.e_c_nocancel).abs() < 1e-9 * b.e_c_nocancel);
        }
    }

    #[test]
    fn coded_early_delay_is_shifted_zero_delay() {
        let zd = zd_coded_pareto(10, 12, 1.0, 2.0).unwrap();
        let m = relaunch_coded_metrics(10, 12, 0.7, 1.0, 2.0).unwrap();
        assert!((m.e_t - (0.7 + zd.e_t)).abs() < 1e-12);
    }

    #[test]
    fn coded_against_monte_carlo() {
        let m = relaunch_coded_metrics(10, 11, 3.0, 1.0, 2.0).unwrap();
        assert_mc(&m, mc(10, Extra::Parities(1), 3.0, 2.0, 100_000, 9));
        let m = relaunch_coded_metrics(10, 20, 2.0, 1.0, 2.0).unwrap();
        assert_mc(&m, mc(10, Extra::Parities(10), 2.0, 2.0, 100_000, 10));
    }

    #[test]
    fn mean_field_beta_pole_reported() {
        // Beta arguments stay off the poles for α > 1; poles only surface
        // through beta_checked on bad input.
        assert!(matches!(
            beta_checked(-1.0, 0.5),
            Err(AnalyticError::BetaPole { .. })
        ));
    }

    #[test]
    fn cost_ordering() {
        for delay in [0.5, 1.5, 3.0, 10.0] {
            for c in 0..3 {
                let m = relaunch_replicated_metrics(10, c, delay, 1.0, 2.0).unwrap();
                assert!(m.e_c_cancel <= m.e_c_nocancel * (1.0 + 1e-12));
            }
            for n in [10, 11, 15, 30] {
                let m = relaunch_coded_metrics(10, n, delay, 1.0, 2.0).unwrap();
                assert!(m.e_c_cancel <= m.e_c_nocancel * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn optimal_relaunch_examples() {
        let r = opt_relaunch(100, 1.0, 2.0).unwrap();
        assert!((r.p_star - 0.06).abs() < 0.01);
        assert!((r.delta_star - 4.22).abs() < 0.01);
        assert!((r.delta_star - r.delta_exact).abs() < 0.05 * r.delta_exact);
        assert!(r.e_t_min < r.g);
        assert_eq!(opt_relaunch(15, 1.0, 2.0).unwrap().alpha_sufficient, 2.0);
    }

    #[test]
    fn single_task_optimum_has_closed_form() {
        // k = 1: E[T] = g + (λ/Δ)^α (λα − Δ)/(α − 1), minimised at Δ = λα²/(α − 1)
        for (lambda, alpha) in [(1.0, 6.0), (2.0, 1.5), (0.5, 3.0)] {
            let r = opt_relaunch(1, lambda, alpha).unwrap();
            let expected = lambda * alpha * alpha / (alpha - 1.0);
            // at α = 6 the well is only ~1e-6 deep, which bounds how well it can be located
            assert!(
                (r.delta_exact - expected).abs() < 1e-4 * expected,
                "alpha = {alpha}"
            );
            assert!(r.e_t_min < r.g);
        }
    }
}
