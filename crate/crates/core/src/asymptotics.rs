//! High-SNR capacity expansions. Pure arithmetic, nats per channel use.

use crate::channel::CorrelationMatrix;
use crate::error::{domain, Result};
use crate::specfun::{log_gamma, EULER_GAMMA};
use serde::{Deserialize, Serialize};

/// Smallest SNR accepted by the `log log ρ` forms.
pub const LOGLOG_SNR_FLOOR: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoteKind {
    PreLog,
    RankOne,
    FullRankIid,
    FullRankCorrelated,
}

/// A closed-form expansion evaluated at one SNR (no SNR for the pre-log).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteValue {
    pub kind: AsymptoteKind,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr: Option<f64>,
}

fn check_snr(snr: f64, floor: f64) -> Result<()> {
    if !(snr >= floor) || !snr.is_finite() || snr <= 0.0 {
        return Err(domain(format!("snr must be finite and >= {floor}, got {snr}")));
    }
    Ok(())
}

/// `χ = 1 − Q/N`.
pub fn prelog(n: usize, q: usize) -> Result<f64> {
    if q == 0 || q > n {
        return Err(domain(format!("rank {q} out of range 1..={n}")));
    }
    Ok(1.0 - q as f64 / n as f64)
}

/// `((N−1)/N)·[log ρ + log N − γ − 1] − log Γ(N)/N`, the piecewise-constant
/// block-fading expansion. `N = 1` is rejected: the channel is then full rank.
pub fn rank_one_asymptote(n: usize, snr: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("rank-one expansion needs n >= 2, got {n}")));
    }
    check_snr(snr, f64::MIN_POSITIVE)?;
    let nf = n as f64;
    Ok((nf - 1.0) / nf * (snr.ln() + nf.ln() - EULER_GAMMA - 1.0) - log_gamma(nf)? / nf)
}

/// `log log ρ − γ − 1` for `R = I_N`.
pub fn full_rank_iid_asymptote(snr: f64) -> Result<f64> {
    check_snr(snr, LOGLOG_SNR_FLOOR)?;
    Ok(snr.ln().ln() - EULER_GAMMA - 1.0)
}

/// `log log ρ − γ − 1 − (1/N) Σ log λ_q(R)` for full-rank `R`.
pub fn full_rank_corr_asymptote(snr: f64, r: &CorrelationMatrix) -> Result<f64> {
    if !r.is_full_rank() {
        return Err(domain(format!("full-rank expansion needs rank {} == n {}", r.rank_q(), r.n())));
    }
    let mean_log_eig = r.eigvals().iter().map(|l| l.ln()).sum::<f64>() / r.n() as f64;
    Ok(full_rank_iid_asymptote(snr)? - mean_log_eig)
}

/// The expansion that applies to `r`, if one exists: rank-one for the
/// all-ones matrix, the full-rank form for `Q = N`, none for `1 < Q < N`.
pub fn asymptote_for(r: &CorrelationMatrix, snr: f64) -> Result<Option<AsymptoteValue>> {
    if r.is_all_ones() && r.n() >= 2 {
        let value = rank_one_asymptote(r.n(), snr)?;
        return Ok(Some(AsymptoteValue { kind: AsymptoteKind::RankOne, value, snr: Some(snr) }));
    }
    if r.is_full_rank() {
        let (kind, value) = if r.is_identity() || r.eigvals().iter().all(|&l| l == 1.0) {
            (AsymptoteKind::FullRankIid, full_rank_iid_asymptote(snr)?)
        } else {
            (AsymptoteKind::FullRankCorrelated, full_rank_corr_asymptote(snr, r)?)
        };
        return Ok(Some(AsymptoteValue { kind, value, snr: Some(snr) }));
    }
    Ok(None)
}
