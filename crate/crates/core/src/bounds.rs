//! Finite-SNR capacity bounds.
//!
//! - [`rank_one_lower_bound`]: isotropic input on the sphere of radius `√(Nρ)`.
//! - [`rank_one_upper_bound`]: duality with the `α = 1` output density and an
//!   input norm constraint `‖x‖² ≥ ρ₀`. It bounds the ρ₀-constrained capacity
//!   at every SNR, and the unconstrained capacity only asymptotically.
//! - [`memoryless_upper_bound`]: duality with `α = 1/(1 + log(1 + ρ))` for
//!   `R = I`. Loose by one nat as `ρ → ∞`.
//! - [`mc_duality_upper_bound`]: Monte-Carlo evaluation of
//!   `(1/N) E_P[D(W(·|x) ‖ Q)]` for any input sampler and output density.

use crate::channel::{apply_channel, conditional_entropy, CorrelationMatrix};
use crate::error::{domain, ensure_dim, Error, Result};
use crate::montecarlo::McEstimate;
use crate::snr::linear_to_db;
use crate::specfun::{g_lemma, log_gamma, EULER_GAMMA};
use crate::stream::{norm_sqr, sharded_moments, unit_sphere};
use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::Gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const UPPER_RHO0_NOTE: &str =
    "upper bound on the rho0-constrained capacity; asymptotic upper bound on C(rho)";
pub const MEMORYLESS_NOTE: &str = "explicit-alpha duality bound; loose by 1 nat asymptotically";
pub const MC_UPPER_NOTE: &str = "Monte-Carlo duality bound on I(x;y)/N for the sphere input";

/// Smallest SNR accepted by [`memoryless_upper_bound`].
pub const MEMORYLESS_SNR_FLOOR: f64 = 3.0;

/// Stream domain of the duality evaluator.
const DUALITY_DOMAIN: u64 = 0x6475_616c;

/// Parameters `(N, α, β)` of the isotropic output density whose squared
/// norm is `Gamma(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputDensityParams {
    n: usize,
    alpha: f64,
    beta: f64,
}

impl OutputDensityParams {
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("output dimension must be at least 1".into()));
        }
        if !(alpha > 0.0) || !alpha.is_finite() || !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "alpha and beta must be finite and positive, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { n, alpha, beta })
    }

    /// `β = N(ρ + 1)/α`, so that `E‖y‖² = N(ρ + 1)`.
    pub fn for_snr(n: usize, alpha: f64, snr: f64) -> Result<Self> {
        if !(snr >= 0.0) || !snr.is_finite() {
            return Err(domain(format!("snr must be finite and nonnegative, got {snr}")));
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidConfig(format!("alpha must be positive, got {alpha}")));
        }
        Self::new(n, alpha, n as f64 * (snr + 1.0) / alpha)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `log[Γ(N) / (π^N β^α Γ(α))]`.
    fn log_normalizer(&self) -> f64 {
        let n = self.n as f64;
        // n >= 1 and alpha > 0 are guaranteed by construction.
        log_gamma(n).unwrap_or(0.0)
            - n * PI.ln()
            - self.alpha * self.beta.ln()
            - log_gamma(self.alpha).unwrap_or(f64::NAN)
    }

    /// Log-density as a function of `‖y‖²` alone.
    pub fn logdensity_of_norm_sqr(&self, r: f64) -> f64 {
        let pow = self.alpha - self.n as f64;
        let radial = if pow == 0.0 { 0.0 } else { pow * r.ln() };
        self.log_normalizer() + radial - r / self.beta
    }

    /// Draws `y` with uniform direction and `‖y‖² ~ Gamma(α, β)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let g = Gamma::new(self.alpha, self.beta).expect("validated parameters");
        let r: f64 = rng.sample(g);
        let s = r.sqrt();
        unit_sphere(rng, self.n).into_iter().map(|v| v * s).collect()
    }
}

/// `log q(y) = log[Γ(N)/(π^N β^α Γ(α))] + (α − N) log ‖y‖² − ‖y‖²/β`.
pub fn output_logdensity(y: &[Complex64], p: &OutputDensityParams) -> Result<f64> {
    ensure_dim(p.n, y.len())?;
    let r = norm_sqr(y);
    if r == 0.0 && p.alpha < p.n as f64 {
        return Err(domain("output density is singular at y = 0 when alpha < N"));
    }
    Ok(p.logdensity_of_norm_sqr(r))
}

/// Norm constraint and Monte-Carlo settings for the upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub rho0: f64,
    pub mc_samples: u64,
    pub seed: u64,
}

impl BoundConfig {
    pub fn new(rho0: f64, mc_samples: u64, seed: u64) -> Result<Self> {
        if !(rho0 >= 0.0) || !rho0.is_finite() {
            return Err(Error::InvalidConfig(format!("rho0 must be finite and >= 0, got {rho0}")));
        }
        if mc_samples == 0 {
            return Err(Error::InvalidConfig("mc_samples must be at least 1".into()));
        }
        Ok(Self { rho0, mc_samples, seed })
    }

    /// `ρ₀ = √ρ`: grows without bound while `ρ₀/ρ → 0`.
    pub fn sqrt_policy(snr: f64, mc_samples: u64, seed: u64) -> Result<Self> {
        Self::new(snr.sqrt(), mc_samples, seed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
    Asymptote,
}

/// A bound or expansion in nats per channel use, with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub nats_per_use: Option<f64>,
    pub snr_db: Option<f64>,
    pub n: usize,
    pub q: usize,
    pub rho0: Option<f64>,
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prelog: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundValue {
    pub fn new(kind: BoundKind, nats_per_use: f64, snr: f64, n: usize, q: usize) -> Self {
        Self {
            kind,
            nats_per_use: Some(nats_per_use),
            snr_db: Some(linear_to_db(snr)),
            n,
            q,
            rho0: None,
            alpha: None,
            stderr: None,
            prelog: None,
            note: None,
        }
    }

    pub fn value(&self) -> f64 {
        self.nats_per_use.unwrap_or(f64::NAN)
    }

    /// Decodes a JSON array of bound values.
    pub fn parse_json_array(s: &str) -> Result<Vec<BoundValue>> {
        Ok(serde_json::from_str(s)?)
    }
}

fn check_block(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("rank-one bounds need n >= 2, got {n}")));
    }
    Ok(n as f64)
}

fn check_snr(snr: f64) -> Result<()> {
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(domain(format!("snr must be finite and positive, got {snr}")));
    }
    Ok(())
}

/// `h(h x)` for `x = √(Nρ)·x̂`, `x̂` uniform on the unit sphere:
/// `N log(Nρ) + 1 + log(π^N/Γ(N)) − (N − 1)γ`.
pub fn sphere_output_entropy(n: usize, snr: f64) -> Result<f64> {
    let nf = check_block(n)?;
    check_snr(snr)?;
    Ok(nf * (nf * snr).ln() + 1.0 + nf * PI.ln() - log_gamma(nf)? - (nf - 1.0) * EULER_GAMMA)
}

/// `(1/N)[h(hx) − h(y|x)]` with `h(y|x) = N log(πe) + log(1 + Nρ)`.
pub fn rank_one_lower_bound(n: usize, snr: f64) -> Result<BoundValue> {
    let nf = check_block(n)?;
    let h_tilde = sphere_output_entropy(n, snr)?;
    let h_cond = nf * (PI * std::f64::consts::E).ln() + (nf * snr).ln_1p();
    Ok(BoundValue::new(BoundKind::Lower, (h_tilde - h_cond) / nf, snr, n, 1))
}

/// `(1/N)[log(Nρ + N) + (N − 2) log(1 + Nρ) + (N − 1) g((N − 1)/(1 + ρ₀))
/// − log Γ(N) − (N − 1)]`.
pub fn rank_one_upper_bound(n: usize, snr: f64, cfg: &BoundConfig) -> Result<BoundValue> {
    let nf = check_block(n)?;
    check_snr(snr)?;
    if !(cfg.rho0 > 0.0) || !cfg.rho0.is_finite() {
        return Err(Error::InvalidConfig(format!("rho0 must be positive, got {}", cfg.rho0)));
    }
    let g = g_lemma((nf - 1.0) / (1.0 + cfg.rho0))?;
    let total =
        (nf * snr + nf).ln() + (nf - 2.0) * (nf * snr).ln_1p() + (nf - 1.0) * g - log_gamma(nf)? - (nf - 1.0);
    let mut v = BoundValue::new(BoundKind::Upper, total / nf, snr, n, 1);
    v.rho0 = Some(cfg.rho0);
    v.alpha = Some(1.0);
    v.note = Some(UPPER_RHO0_NOTE.into());
    Ok(v)
}

/// `((N − 1)/N)·[g((N − 1)/(1 + ρ₀)) + γ]`, the limit of upper − lower.
pub fn duality_gap(n: usize, rho0: f64) -> Result<f64> {
    let nf = check_block(n)?;
    if !(rho0 >= 0.0) {
        return Err(domain(format!("rho0 must be >= 0, got {rho0}")));
    }
    if rho0.is_infinite() {
        return Ok(0.0);
    }
    Ok((nf - 1.0) / nf * (g_lemma((nf - 1.0) / (1.0 + rho0))? + EULER_GAMMA))
}

/// `α = 1/(1 + log(1 + ρ))`.
pub fn memoryless_alpha(snr: f64) -> f64 {
    1.0 / (1.0 + snr.ln_1p())
}

/// `log Γ(α) − α log α − γ` for `R = I`.
pub fn memoryless_upper_bound(snr: f64) -> Result<BoundValue> {
    if !(snr >= MEMORYLESS_SNR_FLOOR) || !snr.is_finite() {
        return Err(domain(format!("memoryless bound needs finite snr >= 3, got {snr}")));
    }
    let alpha = memoryless_alpha(snr);
    let u = log_gamma(alpha)? - alpha * alpha.ln() - EULER_GAMMA;
    let mut v = BoundValue::new(BoundKind::Upper, u, snr, 1, 1);
    v.alpha = Some(alpha);
    v.note = Some(MEMORYLESS_NOTE.into());
    Ok(v)
}

/// A law on channel inputs.
pub trait InputSampler: Sync {
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut dyn RngCore) -> Vec<Complex64>;
}

/// `x = √(norm_sq)·x̂` with `x̂` uniform on the unit sphere.
#[derive(Debug, Clone, Copy)]
pub struct SphereInput {
    pub n: usize,
    pub norm_sq: f64,
}

impl SphereInput {
    /// Radius `√(Nρ)`: meets the average-power constraint with equality.
    pub fn power_limited(n: usize, snr: f64) -> Self {
        Self { n, norm_sq: n as f64 * snr }
    }
}

impl InputSampler for SphereInput {
    fn dim(&self) -> usize {
        self.n
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<Complex64> {
        let s = self.norm_sq.sqrt();
        unit_sphere(rng, self.n).into_iter().map(|v| v * s).collect()
    }
}

/// Deterministic input.
#[derive(Debug, Clone)]
pub struct FixedInput(pub Vec<Complex64>);

impl InputSampler for FixedInput {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn sample(&self, _rng: &mut dyn RngCore) -> Vec<Complex64> {
        self.0.clone()
    }
}

/// Monte-Carlo estimate of `(1/N) E_P[D(W(·|x) ‖ Q)]`.
///
/// Each sample is `−log det(πe Σ(x)) − log q(y)` with `y ~ W(·|x)`; the
/// conditional entropy is used in closed form.
pub fn mc_duality_upper_bound(
    input: &dyn InputSampler,
    r: &CorrelationMatrix,
    p: &OutputDensityParams,
    cfg: &BoundConfig,
) -> Result<McEstimate> {
    let n = r.n();
    ensure_dim(n, input.dim())?;
    ensure_dim(n, p.n())?;
    if cfg.mc_samples == 0 {
        return Err(Error::InvalidConfig("mc_samples must be at least 1".into()));
    }
    let m = sharded_moments(cfg.mc_samples, cfg.seed, DUALITY_DOMAIN, |rng| {
        let x = input.sample(rng);
        let h = r.sample_fading(rng);
        // Dimensions were checked above; an input sampler returning the wrong
        // length surfaces as NaN in the estimate.
        let (Ok(y), Ok(h_cond)) = (apply_channel(&x, &h, rng), conditional_entropy(&x, r)) else {
            return f64::NAN;
        };
        -h_cond - p.logdensity_of_norm_sqr(norm_sqr(&y))
    });
    let nf = n as f64;
    if !m.mean.is_finite() {
        return Err(domain("input sampler produced vectors of the wrong dimension"));
    }
    Ok(McEstimate { value: m.mean / nf, stderr: m.stderr() / nf, samples: cfg.mc_samples, seed: cfg.seed })
}
