//! Stochastic oracles for the identities behind the closed forms.
//!
//! Every estimator is a pure function of `(parameters, samples, seed)`; see
//! [`crate::stream`] for the sharding rule.

use crate::bounds::{sphere_output_entropy, OutputDensityParams};
use crate::channel::{apply_channel, apply_fading, make_rank_one_corr};
use crate::error::{domain, Error, Result};
use crate::specfun::log_gamma;
use crate::stream::{complex_normal, norm_sqr, sharded_moments, unit_sphere, Moments};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::Gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const LOG_ABS_SQ_DOMAIN: u64 = 1;
const MIXTURE_DIRECT_DOMAIN: u64 = 2;
const MIXTURE_SPLIT_DOMAIN: u64 = 3;
const ISOTROPIC_DOMAIN: u64 = 4;
const NORMALIZATION_DOMAIN: u64 = 5;

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_moments(m: &Moments, seed: u64) -> Self {
        Self { value: m.mean, stderr: m.stderr(), samples: m.count, seed }
    }

    /// `(value − target) / stderr`.
    pub fn z_score(&self, target: f64) -> f64 {
        z_score(self.value - target, self.stderr)
    }

    pub fn within(&self, target: f64, k: f64) -> bool {
        self.z_score(target).abs() <= k
    }
}

fn z_score(diff: f64, se: f64) -> f64 {
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// z-score of `a − b` for independent estimates.
pub fn joint_z(a: &McEstimate, b: &McEstimate) -> f64 {
    z_score(a.value - b.value, a.stderr.hypot(b.stderr))
}

fn check_samples(samples: u64) -> Result<()> {
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    Ok(())
}

/// `E[log |z|²]` for `z ~ CN(0, 1)`; converges to `−γ`.
pub fn mc_mean_log_abs_sq(samples: u64, seed: u64) -> Result<McEstimate> {
    mc_g(0.0, samples, seed)
}

/// `E[log(a + |z|²)]` for `z ~ CN(0, 1)`; converges to `g(a)`.
pub fn mc_g(a: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(domain(format!("a must be finite and >= 0, got {a}")));
    }
    check_samples(samples)?;
    let m =
        sharded_moments(samples, seed, LOG_ABS_SQ_DOMAIN, |rng| (a + complex_normal(rng).norm_sqr()).ln());
    Ok(McEstimate::from_moments(&m, seed))
}

/// `E[log ‖y‖²]` for the rank-one channel at a fixed input, estimated by
/// simulating `y = h x + w` and, independently, by the representation
/// `Σ_{i<N} |ŵ_i|² + (1 + ‖x‖²)|ŵ_N|²`. Returns `(direct, mixture)`.
pub fn mc_norm_mixture_check(x: &[Complex64], samples: u64, seed: u64) -> Result<(McEstimate, McEstimate)> {
    let n = x.len();
    if n == 0 {
        return Err(Error::InvalidConfig("input must be non-empty".into()));
    }
    check_samples(samples)?;
    let r = make_rank_one_corr(n)?;
    let direct = sharded_moments(samples, seed, MIXTURE_DIRECT_DOMAIN, |rng| {
        let h = r.sample_fading(rng);
        apply_channel(x, &h, rng).map(|y| norm_sqr(&y).ln()).unwrap_or(f64::NAN)
    });
    let strong = 1.0 + norm_sqr(x);
    let mixture = sharded_moments(samples, seed, MIXTURE_SPLIT_DOMAIN, |rng| {
        let weak: f64 = (1..n).map(|_| complex_normal(rng).norm_sqr()).sum();
        (weak + strong * complex_normal(rng).norm_sqr()).ln()
    });
    Ok((McEstimate::from_moments(&direct, seed), McEstimate::from_moments(&mixture, seed)))
}

/// `−E[log q(h x)]` with `x = √(Nρ)·x̂` on the sphere and `q` the `α = 1`,
/// `β = Nρ` output density. Its limit is the closed-form entropy of `h x`.
pub fn mc_entropy_isotropic(n: usize, snr: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    if n < 2 {
        return Err(domain(format!("n must be >= 2, got {n}")));
    }
    // Validates snr as well.
    sphere_output_entropy(n, snr)?;
    check_samples(samples)?;
    let nf = n as f64;
    let q = OutputDensityParams::new(n, 1.0, nf * snr)?;
    let r = make_rank_one_corr(n)?;
    let radius = (nf * snr).sqrt();
    let m = sharded_moments(samples, seed, ISOTROPIC_DOMAIN, |rng| {
        let x: Vec<Complex64> = unit_sphere(rng, n).into_iter().map(|v| v * radius).collect();
        let h = r.sample_fading(rng);
        let y = apply_fading(&x, &h).unwrap_or_default();
        -q.logdensity_of_norm_sqr(norm_sqr(&y))
    });
    Ok(McEstimate::from_moments(&m, seed))
}

/// Importance-sampling estimate of `∫ q(y) dy` for the output density `p`.
///
/// The proposal is isotropic with `‖y‖² ~ Gamma(α/2, 2β)`; its density is
/// written from the polar volume element `(π^N/Γ(N)) r^{N−1} dr`, so the
/// weight is bounded even when `q` is singular at the origin.
pub fn mc_output_density_normalization(
    p: &OutputDensityParams,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_samples(samples)?;
    let n = p.n();
    let nf = n as f64;
    let shape = 0.5 * p.alpha();
    let scale = 2.0 * p.beta();
    let gamma = Gamma::new(shape, scale).map_err(|e| domain(e.to_string()))?;
    let log_shell = nf * PI.ln() - log_gamma(nf)?;
    let log_gamma_shape = log_gamma(shape)?;
    let m = sharded_moments(samples, seed, NORMALIZATION_DOMAIN, |rng| {
        let r: f64 = rng.sample(gamma);
        let dir = unit_sphere(rng, n);
        let y: Vec<Complex64> = dir.into_iter().map(|v| v * r.sqrt()).collect();
        let r = norm_sqr(&y);
        let log_radial = (shape - 1.0) * r.ln() - r / scale - log_gamma_shape - shape * scale.ln();
        let log_proposal = log_radial - log_shell - (nf - 1.0) * r.ln();
        (p.logdensity_of_norm_sqr(r) - log_proposal).exp()
    });
    Ok(McEstimate::from_moments(&m, seed))
}
