//! Special functions behind every closed form in the crate.
//!
//! `Γ(0, a) = E₁(a)` uses the convergent power series for `a ≤ 1` and a
//! modified Lentz continued fraction above; both routes are public so the
//! seam at `a = 1` can be checked directly.

use crate::error::{domain, Error, Result};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Switchover between the power series and the continued fraction.
pub const SERIES_CF_SWITCH: f64 = 1.0;

const FPMIN: f64 = 1e-300;

/// Convergence control for the iterative routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyPolicy {
    abs_tol: f64,
    max_terms: usize,
}

impl AccuracyPolicy {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !abs_tol.is_finite() {
            return Err(Error::InvalidConfig(format!("abs_tol must be positive, got {abs_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::InvalidConfig("max_terms must be at least 1".into()));
        }
        Ok(Self { abs_tol, max_terms })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for AccuracyPolicy {
    fn default() -> Self {
        Self { abs_tol: 1e-17, max_terms: 1000 }
    }
}

/// The Euler–Mascheroni constant.
pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

/// `log Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("log_gamma requires finite x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `Σ_{k≥1} (−a)^k / (k·k!)`, the non-logarithmic part of the `E₁` series.
fn e1_series_tail(a: f64, policy: &AccuracyPolicy) -> Result<f64> {
    let mut term = 1.0; // (−a)^k / k!
    let mut sum = 0.0;
    for k in 1..=policy.max_terms {
        let kf = k as f64;
        term *= -a / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() <= policy.abs_tol * sum.abs().max(1.0) {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence(policy.max_terms))
}

/// `e^a Γ(0, a)` by the modified Lentz continued fraction.
fn e1_scaled_cf(a: f64, policy: &AccuracyPolicy) -> Result<f64> {
    let mut b = a + 1.0;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=policy.max_terms {
        let an = -((i * i) as f64);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= policy.abs_tol.max(f64::EPSILON) {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence(policy.max_terms))
}

fn check_positive(a: f64, what: &str) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain(format!("{what} requires finite a > 0, got {a}")));
    }
    Ok(())
}

/// `Γ(0, a)` by the power series `−γ − log a − Σ (−a)^k/(k·k!)`. Accurate for
/// small and moderate `a`; loses digits to cancellation for large `a`.
pub fn gamma_upper0_series(a: f64, policy: &AccuracyPolicy) -> Result<f64> {
    check_positive(a, "gamma_upper0_series")?;
    Ok(-EULER_GAMMA - a.ln() - e1_series_tail(a, policy)?)
}

/// `Γ(0, a)` by continued fraction. Converges for every `a > 0` but slowly
/// as `a → 0`.
pub fn gamma_upper0_cf(a: f64, policy: &AccuracyPolicy) -> Result<f64> {
    check_positive(a, "gamma_upper0_cf")?;
    Ok(e1_scaled_cf(a, policy)? * (-a).exp())
}

/// `Γ(0, a) = ∫_a^∞ e^{−t}/t dt` for `a > 0`.
pub fn gamma_upper0(a: f64) -> Result<f64> {
    let policy = AccuracyPolicy::default();
    if a <= SERIES_CF_SWITCH {
        gamma_upper0_series(a, &policy)
    } else {
        gamma_upper0_cf(a, &policy)
    }
}

/// `e^a Γ(0, a)`, evaluated without overflow for large `a`. This is also
/// `g'(a)`.
pub fn exp_gamma_upper0(a: f64) -> Result<f64> {
    check_positive(a, "exp_gamma_upper0")?;
    let policy = AccuracyPolicy::default();
    if a <= SERIES_CF_SWITCH {
        Ok(a.exp() * gamma_upper0_series(a, &policy)?)
    } else {
        e1_scaled_cf(a, &policy)
    }
}

/// `g(a) = e^a Γ(0, a) + log a = E[log(a + |z|²)]` for `z ~ CN(0, 1)`.
///
/// `g(0) = −γ`, the continuous extension. For `a ≤ 1` the series is
/// rearranged as `e^a(−γ − S(a)) − expm1(a)·log a` so that the `log a` terms
/// cancel analytically instead of numerically.
pub fn g_lemma(a: f64) -> Result<f64> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(domain(format!("g_lemma requires finite a >= 0, got {a}")));
    }
    if a == 0.0 {
        return Ok(-EULER_GAMMA);
    }
    let policy = AccuracyPolicy::default();
    if a <= SERIES_CF_SWITCH {
        let tail = e1_series_tail(a, &policy)?;
        Ok(a.exp() * (-EULER_GAMMA - tail) - a.exp_m1() * a.ln())
    } else {
        Ok(e1_scaled_cf(a, &policy)? + a.ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use approx::assert_relative_eq;

    #[test]
    fn euler_gamma_matches_harmonic_limit() {
        // H_n − log n − 1/(2n) + 1/(12 n²) − 1/(120 n⁴) converges to γ at O(n⁻⁶).
        let n = 1000.0_f64;
        let h: f64 = (1..=1000).rev().map(|k| 1.0 / k as f64).sum();
        let est = h - n.ln() - 1.0 / (2.0 * n) + 1.0 / (12.0 * n * n) - 1.0 / (120.0 * n.powi(4));
        assert!((est - euler_gamma()).abs() < 5e-14);
        assert_eq!(euler_gamma(), 0.5772156649015329);
    }

    #[test]
    fn euler_gamma_as_log_integral() {
        // −∫₀^∞ e^{−t} log t dt with t = u², so the log singularity is mild.
        let v = quad::integrate_semi_infinite(|u| 4.0 * u * (-u * u).exp() * u.ln(), 0.0, 1e-13);
        assert!((-v - euler_gamma()).abs() < 1e-11);
    }

    #[test]
    fn log_gamma_exact_points() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-15);
        assert!((log_gamma(4.0).unwrap() - 6f64.ln()).abs() < 1e-14);
        assert!((log_gamma(2.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn log_gamma_half_against_quadrature() {
        // Γ(1/2) = ∫ t^{−1/2} e^{−t} dt = ∫ 2 e^{−u²} du.
        let gamma_half = quad::integrate_semi_infinite(|u| 2.0 * (-u * u).exp(), 0.0, 1e-14);
        assert!((log_gamma(0.5).unwrap() - gamma_half.ln()).abs() < 1e-12);
        assert_relative_eq!(log_gamma(0.5).unwrap(), 0.5723649429247001, max_relative = 1e-13);
    }

    #[test]
    fn log_gamma_reference_values() {
        // 40-digit reference values.
        let table = [
            (1e-6, 13.815509980749431669),
            (0.1, 2.2527126517342059599),
            (1.5, -0.12078223763524522235),
            (3.0, 0.69314718055994530942),
            (10.0, 12.801827480081469611),
            (100.0, 359.13420536957539878),
            (1000.0, 5905.2204232091812118),
        ];
        for (x, want) in table {
            assert_relative_eq!(log_gamma(x).unwrap(), want, max_relative = 1e-12);
        }
    }

    #[test]
    fn log_gamma_recurrence() {
        let mut x = 0.1;
        while x <= 100.0 {
            let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
            assert!((d - x.ln()).abs() < 1e-12, "x = {x}: {d} vs {}", x.ln());
            x *= 1.17;
        }
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(matches!(log_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(log_gamma(-1.5), Err(Error::Domain(_))));
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn gamma_upper0_at_one_against_quadrature() {
        let q = quad::integrate_semi_infinite(|t| (-t).exp() / t, 1.0, 1e-15);
        assert!((gamma_upper0(1.0).unwrap() - q).abs() < 1e-13);
        assert!((gamma_upper0(1.0).unwrap() - 0.21938393439552026).abs() < 1e-15);
    }

    #[test]
    fn gamma_upper0_reference_values() {
        let table = [
            (1e-8, 17.843465089050832587),
            (1e-3, 6.331539364136149332),
            (0.5, 0.55977359477616081175),
            (2.0, 0.048900510708061119567),
            (10.0, 4.1569689296853242774e-6),
            (50.0, 3.7832640295504590187e-24),
        ];
        for (a, want) in table {
            assert!((gamma_upper0(a).unwrap() - want).abs() < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn gamma_upper0_small_argument_expansion() {
        let a = 1e-8f64;
        let approx = -EULER_GAMMA - a.ln();
        assert!((gamma_upper0(a).unwrap() - approx).abs() < 2e-8);
    }

    #[test]
    fn gamma_upper0_large_argument_bound() {
        let a: f64 = 50.0;
        let v = gamma_upper0(a).unwrap();
        assert!(v > 0.0 && v < (-a).exp() / a);
    }

    #[test]
    fn series_and_cf_agree_at_switch() {
        let p = AccuracyPolicy::default();
        let s = gamma_upper0_series(SERIES_CF_SWITCH, &p).unwrap();
        let c = gamma_upper0_cf(SERIES_CF_SWITCH, &p).unwrap();
        assert!((s - c).abs() < 1e-12, "{s} vs {c}");
        for a in [0.8, 1.2, 2.0] {
            let s = gamma_upper0_series(a, &p).unwrap();
            let c = gamma_upper0_cf(a, &p).unwrap();
            assert!((s - c).abs() < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn gamma_upper0_rejects_nonpositive() {
        assert!(gamma_upper0(0.0).is_err());
        assert!(gamma_upper0(-2.0).is_err());
    }

    #[test]
    fn tight_policy_can_fail_to_converge() {
        let p = AccuracyPolicy::new(1e-17, 2).unwrap();
        assert!(matches!(gamma_upper0_series(0.9, &p), Err(Error::NoConvergence(2))));
        assert!(AccuracyPolicy::new(0.0, 10).is_err());
        assert!(AccuracyPolicy::new(1e-10, 0).is_err());
    }

    #[test]
    fn g_lemma_values() {
        assert_eq!(g_lemma(0.0).unwrap(), -0.5772156649015329);
        assert!((g_lemma(1.0).unwrap() - 0.5963473623231941).abs() < 1e-14);
        assert!((g_lemma(1e-8).unwrap() + 0.57721547646688110292).abs() < 1e-14);
        assert!((g_lemma(0.5).unwrap() - 0.22976345192378515942).abs() < 1e-14);
        assert!((g_lemma(2.0).unwrap() - 1.0544757974481678941).abs() < 1e-14);
        assert!((g_lemma(100.0).unwrap() - 4.6150721282748243864).abs() < 1e-13);
    }

    #[test]
    fn g_lemma_integral_identity() {
        for a in [0.01, 0.5, 1.0, 5.0, 10.0, 20.0] {
            let q = quad::integrate_semi_infinite(|v| (-v).exp() * (a + v).ln(), 0.0, 1e-13);
            assert!((g_lemma(a).unwrap() - q).abs() < 1e-9, "a = {a}");
        }
    }

    #[test]
    fn g_lemma_derivative_is_scaled_gamma_upper0() {
        let delta = 1e-5;
        for a in [0.1, 1.0, 10.0] {
            let fd = (g_lemma(a + delta).unwrap() - g_lemma(a - delta).unwrap()) / (2.0 * delta);
            assert!((fd - exp_gamma_upper0(a).unwrap()).abs() < 1e-6, "a = {a}");
        }
    }

    #[test]
    fn g_lemma_rejects_negative() {
        assert!(g_lemma(-1e-12).is_err());
        assert!(g_lemma(f64::INFINITY).is_err());
    }

    #[test]
    fn exp_gamma_upper0_large_a_is_finite() {
        let v = exp_gamma_upper0(700.0).unwrap();
        // e^a E1(a) ~ 1/a (1 − 1/a + ...)
        assert!((v - 1.0 / 701.0).abs() < 1e-8);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn g_lemma_monotone(a1 in 0.0f64..100.0, d in 1e-6f64..50.0) {
                let a2 = (a1 + d).min(100.0);
                prop_assume!(a2 > a1);
                prop_assert!(g_lemma(a1).unwrap() < g_lemma(a2).unwrap());
            }

            #[test]
            fn g_lemma_between_log_a_and_log_a_plus_one(a in 1e-3f64..1e3) {
                // Jensen: g(a) ≤ log(a + 1); and g(a) ≥ log a since |z|² ≥ 0.
                let g = g_lemma(a).unwrap();
                prop_assert!(g >= a.ln());
                prop_assert!(g <= (a + 1.0).ln() + 1e-14);
            }
        }
    }
}
