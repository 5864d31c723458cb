use super::{check_k, check_positive, AnalyticError, Result};
use crate::specialfn::{gamma_ratio, harmonic};

/// `E[X_{n:i}]` for `X ~ Pareto(λ, α)`, the i-th smallest of n.
///
/// `λ · n!/(n−i)! · Γ(n−i+1−1/α) / Γ(n+1−1/α)`, finite when `α(n−i+1) > 1`.
pub fn pareto_os_mean(n: u32, i: u32, lambda: f64, alpha: f64) -> Result<f64> {
    check_k(n)?;
    if i == 0 || i > n {
        return Err(AnalyticError::IndexOrder { n, i, j: i });
    }
    check_positive("lambda", lambda)?;
    let m = (n - i + 1) as f64;
    if !(alpha * m > 1.0) {
        return Err(AnalyticError::InfiniteMean(alpha * m));
    }
    let n = n as f64;
    let inv = 1.0 / alpha;
    // pair nearby arguments so neither ratio overflows for large n
    Ok(lambda * gamma_ratio(n + 1.0, n + 1.0 - inv)? * gamma_ratio(m - inv, m)?)
}

/// `E[X_{n:i}]` for `X ~ Exp(μ)`: `(H_n − H_{n−i}) / μ`.
pub fn exp_os_mean(n: u32, i: u32, mu: f64) -> Result<f64> {
    check_k(n)?;
    if i == 0 || i > n {
        return Err(AnalyticError::IndexOrder { n, i, j: i });
    }
    check_positive("mu", mu)?;
    Ok((harmonic(n as f64)? - harmonic((n - i) as f64)?) / mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_minimum_is_pareto() {
        // min of n Pareto(λ, α) is Pareto(λ, nα)
        let v = pareto_os_mean(3, 1, 2.0, 1.5).unwrap();
        let a = 4.5;
        assert!((v - 2.0 * a / (a - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn pareto_single_sample_is_mean() {
        assert!((pareto_os_mean(1, 1, 1.0, 2.0).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn pareto_max_needs_alpha_above_one() {
        assert_eq!(
            pareto_os_mean(4, 4, 1.0, 1.0),
            Err(AnalyticError::InfiniteMean(1.0))
        );
        assert!(pareto_os_mean(4, 3, 1.0, 1.0).is_ok());
    }

    #[test]
    fn pareto_large_n_is_finite() {
        // E[max of n] grows like Γ(1−1/α) n^{1/α}
        for n in [1000, 100_000] {
            let v = pareto_os_mean(n, n, 1.0, 2.0).unwrap();
            let asym = std::f64::consts::PI.sqrt() * (n as f64).sqrt();
            assert!((v / asym - 1.0).abs() < 1e-3, "n = {n}: {v}");
        }
        let mid = pareto_os_mean(5000, 2500, 1.0, 3.0).unwrap();
        // median of Pareto(1, 3) is 2^{1/3}
        assert!((mid - 2f64.powf(1.0 / 3.0)).abs() < 1e-3);
    }

    #[test]
    fn exp_order_stats() {
        assert!((exp_os_mean(1, 1, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((exp_os_mean(3, 3, 1.0).unwrap() - (1.0 + 0.5 + 1.0 / 3.0)).abs() < 1e-15);
        assert!(exp_os_mean(3, 4, 1.0).is_err());
    }
}
