//! Correlated block-fading channel `y = diag(h) x + w`.
//!
//! A [`CorrelationMatrix`] keeps `R`, its sorted spectrum, its rank `Q`, and a
//! factor `L` (N×Q) with `R = L Lᴴ`. Fading is drawn as `h = L z`, which works
//! for rank-deficient `R` where a Cholesky factor does not exist.

use crate::error::{ensure_dim, Error, Result};
use crate::stream::{complex_normal, complex_normal_vec, norm_sqr};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

/// Entrywise tolerance for the Hermitian and unit-diagonal checks.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Eigenvalues above `RANK_TOL · λ₁` count toward the rank.
pub const RANK_TOL: f64 = 1e-9;
/// Largest block length accepted from external descriptions.
pub const MAX_BLOCK_LENGTH: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    RankOne,
    Iid,
    Circulant,
}

/// JSON description `{ "kind": ..., "n": N, "taps": [...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSpec {
    pub kind: CorrelationKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taps: Option<Vec<f64>>,
}

impl CorrelationSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn build(&self) -> Result<CorrelationMatrix> {
        if self.n > MAX_BLOCK_LENGTH {
            return Err(Error::InvalidCorrelation(format!(
                "block length {} exceeds {MAX_BLOCK_LENGTH}",
                self.n
            )));
        }
        match (self.kind, &self.taps) {
            (CorrelationKind::RankOne, None) => make_rank_one_corr(self.n),
            (CorrelationKind::Iid, None) => make_iid_corr(self.n),
            (CorrelationKind::Circulant, Some(taps)) => make_circulant_corr(self.n, taps),
            (CorrelationKind::Circulant, None) => {
                Err(Error::InvalidCorrelation("circulant model needs taps".into()))
            }
            (_, Some(_)) => {
                Err(Error::InvalidCorrelation("taps are only meaningful for the circulant model".into()))
            }
        }
    }

    /// Parses and builds in one step.
    pub fn parse_matrix(s: &str) -> Result<CorrelationMatrix> {
        Self::from_json(s)?.build()
    }
}

/// Fading model of a [`ChannelConfig`].
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    RankOnePiecewiseConstant,
    IidFullRank,
    Circulant(Vec<f64>),
}

impl ModelKind {
    pub fn spec(&self, n: usize) -> CorrelationSpec {
        match self {
            ModelKind::RankOnePiecewiseConstant => {
                CorrelationSpec { kind: CorrelationKind::RankOne, n, taps: None }
            }
            ModelKind::IidFullRank => CorrelationSpec { kind: CorrelationKind::Iid, n, taps: None },
            ModelKind::Circulant(t) => {
                CorrelationSpec { kind: CorrelationKind::Circulant, n, taps: Some(t.clone()) }
            }
        }
    }
}

impl From<&CorrelationSpec> for ModelKind {
    fn from(s: &CorrelationSpec) -> Self {
        match s.kind {
            CorrelationKind::RankOne => ModelKind::RankOnePiecewiseConstant,
            CorrelationKind::Iid => ModelKind::IidFullRank,
            CorrelationKind::Circulant => ModelKind::Circulant(s.taps.clone().unwrap_or_default()),
        }
    }
}

/// Block length, linear receive SNR, and fading model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub n: usize,
    pub snr: f64,
    pub model: ModelKind,
}

impl ChannelConfig {
    pub fn new(n: usize, snr: f64, model: ModelKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("block length must be at least 1".into()));
        }
        if !(snr > 0.0) || !snr.is_finite() {
            return Err(Error::InvalidConfig(format!("snr must be finite and positive, got {snr}")));
        }
        Ok(Self { n, snr, model })
    }

    pub fn correlation(&self) -> Result<CorrelationMatrix> {
        self.model.spec(self.n).build()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Structure {
    AllOnes,
    Identity,
    Circulant,
    Dense,
}

/// N×N Hermitian PSD correlation matrix with unit diagonal.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    entries: DMatrix<Complex64>,
    eigvals: Vec<f64>,
    rank_q: usize,
    factor: DMatrix<Complex64>,
    structure: Structure,
    spec: Option<CorrelationSpec>,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `R = 1·1ᵀ`: the channel is constant over the block.
pub fn make_rank_one_corr(n: usize) -> Result<CorrelationMatrix> {
    if n == 0 {
        return Err(Error::InvalidCorrelation("block length must be at least 1".into()));
    }
    let mut eigvals = vec![0.0; n];
    eigvals[0] = n as f64;
    Ok(CorrelationMatrix {
        entries: DMatrix::from_element(n, n, one()),
        eigvals,
        rank_q: 1,
        factor: DMatrix::from_element(n, 1, one()),
        structure: Structure::AllOnes,
        spec: Some(CorrelationSpec { kind: CorrelationKind::RankOne, n, taps: None }),
    })
}

/// `R = I_N`: memoryless fading.
pub fn make_iid_corr(n: usize) -> Result<CorrelationMatrix> {
    if n == 0 {
        return Err(Error::InvalidCorrelation("block length must be at least 1".into()));
    }
    Ok(CorrelationMatrix {
        entries: DMatrix::identity(n, n),
        eigvals: vec![1.0; n],
        rank_q: n,
        factor: DMatrix::identity(n, n),
        structure: Structure::Identity,
        spec: Some(CorrelationSpec { kind: CorrelationKind::Iid, n, taps: None }),
    })
}

fn dft_phase(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

/// Circulant `R = F diag(λ) Fᴴ` with `λ` the taps scaled to sum to `N` and
/// zero-padded. Tap `m` sits on DFT bin `m`.
pub fn make_circulant_corr(n: usize, taps: &[f64]) -> Result<CorrelationMatrix> {
    let q = taps.len();
    if n == 0 || q == 0 {
        return Err(Error::InvalidCorrelation("need n >= 1 and at least one tap".into()));
    }
    if q > n {
        return Err(Error::InvalidCorrelation(format!("{q} taps exceed block length {n}")));
    }
    if let Some(bad) = taps.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidCorrelation(format!("taps must be finite and positive, got {bad}")));
    }
    let spec = CorrelationSpec { kind: CorrelationKind::Circulant, n, taps: Some(taps.to_vec()) };

    // A single tap on bin 0 is the all-ones matrix; equal taps on every bin
    // are the identity. Use the exact constructions for both.
    if q == 1 {
        let mut r = make_rank_one_corr(n)?;
        r.spec = Some(spec);
        return Ok(r);
    }
    if q == n && taps.iter().all(|&t| t == taps[0]) {
        let mut r = make_iid_corr(n)?;
        r.spec = Some(spec);
        return Ok(r);
    }

    // Divide by the largest tap first so the sum cannot overflow.
    let top = taps.iter().copied().fold(0.0, f64::max);
    let total: f64 = taps.iter().map(|t| t / top).sum();
    let nf = n as f64;
    let lambda: Vec<f64> = taps.iter().map(|t| t / top * nf / total).collect();

    // First column c_d = (1/N) Σ_m λ_m e^{2πi m d / N}, with c_{N−d} = conj(c_d).
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    col[0] = one();
    for d in 1..=n / 2 {
        let c: Complex64 =
            lambda.iter().enumerate().map(|(m, &l)| dft_phase(m * d, n) * l).sum::<Complex64>() / nf;
        col[d] = c;
        col[n - d] = c.conj();
    }
    let entries = DMatrix::from_fn(n, n, |j, k| col[(j + n - k) % n]);

    let scale = nf.sqrt().recip();
    let factor = DMatrix::from_fn(n, q, |j, m| dft_phase(j * m, n) * (lambda[m].sqrt() * scale));

    let mut eigvals = lambda.clone();
    eigvals.resize(n, 0.0);
    eigvals.sort_by(|a, b| b.total_cmp(a));

    Ok(CorrelationMatrix {
        entries,
        eigvals,
        rank_q: q,
        factor,
        structure: Structure::Circulant,
        spec: Some(spec),
    })
}

impl CorrelationMatrix {
    /// Validates an explicit matrix and computes its spectrum.
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::InvalidCorrelation(format!(
                "expected a non-empty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if n > MAX_BLOCK_LENGTH {
            return Err(Error::InvalidCorrelation(format!("block length {n} exceeds {MAX_BLOCK_LENGTH}")));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidCorrelation("non-finite entry".into()));
        }
        for i in 0..n {
            if (entries[(i, i)] - one()).norm() > STRUCTURE_TOL {
                return Err(Error::InvalidCorrelation(format!(
                    "diagonal entry {i} is {}, expected 1",
                    entries[(i, i)]
                )));
            }
            for j in 0..i {
                if (entries[(i, j)] - entries[(j, i)].conj()).norm() > STRUCTURE_TOL {
                    return Err(Error::InvalidCorrelation(format!("not Hermitian at ({i}, {j})")));
                }
            }
        }
        let eig = entries.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let top = eig.eigenvalues[order[0]];
        let bottom = eig.eigenvalues[order[n - 1]];
        if bottom < -STRUCTURE_TOL * top {
            return Err(Error::InvalidCorrelation(format!("not PSD: smallest eigenvalue {bottom}")));
        }
        let eigvals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
        let rank_q = eigvals.iter().filter(|&&l| l > RANK_TOL * top).count();
        let factor = DMatrix::from_fn(n, rank_q, |j, m| eig.eigenvectors[(j, order[m])] * eigvals[m].sqrt());
        Ok(Self { entries, eigvals, rank_q, factor, structure: Structure::Dense, spec: None })
    }

    /// [`Self::from_matrix`] from `n²` entries in row-major order.
    pub fn from_row_major(n: usize, entries: &[Complex64]) -> Result<Self> {
        ensure_dim(n * n, entries.len())?;
        Self::from_matrix(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Eigenvalues in non-increasing order.
    pub fn eigvals(&self) -> &[f64] {
        &self.eigvals
    }

    pub fn rank_q(&self) -> usize {
        self.rank_q
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank_q == self.n()
    }

    /// True for the all-ones (piecewise-constant) correlation.
    pub fn is_all_ones(&self) -> bool {
        self.structure == Structure::AllOnes
    }

    pub fn is_identity(&self) -> bool {
        self.structure == Structure::Identity
    }

    /// `L` with `R = L Lᴴ`, N×Q.
    pub fn factor(&self) -> &DMatrix<Complex64> {
        &self.factor
    }

    /// The JSON description this matrix was built from, if any.
    pub fn spec(&self) -> Option<&CorrelationSpec> {
        self.spec.as_ref()
    }

    /// Draws `h ~ CN(0, R)`.
    pub fn sample_fading<R: Rng + ?Sized>(&self, rng: &mut R) -> FadingBlock {
        sample_fading(self, rng)
    }
}

/// One block of channel gains.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingBlock {
    pub h: Vec<Complex64>,
}

impl FadingBlock {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// `h = L z` with `z` i.i.d. `CN(0, 1)` of length `Q`.
pub fn sample_fading<R: Rng + ?Sized>(r: &CorrelationMatrix, rng: &mut R) -> FadingBlock {
    let n = r.n();
    let h = match r.structure {
        Structure::AllOnes => vec![complex_normal(rng); n],
        Structure::Identity => complex_normal_vec(rng, n),
        Structure::Circulant | Structure::Dense => {
            let z = DVector::from_vec(complex_normal_vec(rng, r.rank_q));
            (&r.factor * z).iter().copied().collect()
        }
    };
    FadingBlock { h }
}

/// `diag(h) x`, the noiseless output.
pub fn apply_fading(x: &[Complex64], h: &FadingBlock) -> Result<Vec<Complex64>> {
    ensure_dim(h.len(), x.len())?;
    Ok(x.iter().zip(&h.h).map(|(xi, hi)| xi * hi).collect())
}

/// `y = diag(h) x + w` with fresh `w ~ CN(0, I_N)`.
pub fn apply_channel<R: Rng + ?Sized>(
    x: &[Complex64],
    h: &FadingBlock,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let mut y = apply_fading(x, h)?;
    for v in &mut y {
        *v += complex_normal(rng);
    }
    Ok(y)
}

/// `Σ(x) = diag(x) R diag(x)ᴴ + I_N`.
pub fn conditional_covariance(x: &[Complex64], r: &CorrelationMatrix) -> Result<DMatrix<Complex64>> {
    let n = r.n();
    ensure_dim(n, x.len())?;
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let v = x[i] * r.entries[(i, j)] * x[j].conj();
        if i == j {
            v + 1.0
        } else {
            v
        }
    }))
}

fn cholesky(sigma: DMatrix<Complex64>) -> Result<nalgebra::Cholesky<Complex64, nalgebra::Dyn>> {
    sigma.cholesky().ok_or_else(|| Error::Domain("conditional covariance is not positive definite".into()))
}

/// `log det Σ(x)`.
pub fn log_det_conditional_covariance(x: &[Complex64], r: &CorrelationMatrix) -> Result<f64> {
    ensure_dim(r.n(), x.len())?;
    match r.structure {
        Structure::AllOnes => Ok(norm_sqr(x).ln_1p()),
        Structure::Identity => Ok(x.iter().map(|v| v.norm_sqr().ln_1p()).sum()),
        _ => {
            let chol = cholesky(conditional_covariance(x, r)?)?;
            Ok(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>())
        }
    }
}

/// `h(y | x) = log det(πe Σ(x))` for a fixed input.
pub fn conditional_entropy(x: &[Complex64], r: &CorrelationMatrix) -> Result<f64> {
    Ok(x.len() as f64 * (PI * E).ln() + log_det_conditional_covariance(x, r)?)
}

/// `log W(y|x)` through a Cholesky factor of `Σ(x)`, valid for any `R`.
pub fn cond_output_logdensity_dense(y: &[Complex64], x: &[Complex64], r: &CorrelationMatrix) -> Result<f64> {
    let n = r.n();
    ensure_dim(n, y.len())?;
    let chol = cholesky(conditional_covariance(x, r)?)?;
    let l = chol.l();
    let log_det = 2.0 * l.diagonal().iter().map(|d| d.re.ln()).sum::<f64>();
    let v = l
        .solve_lower_triangular(&DVector::from_column_slice(y))
        .ok_or_else(|| Error::Domain("singular Cholesky factor".into()))?;
    let quad = v.iter().map(|c| c.norm_sqr()).sum::<f64>();
    Ok(-(n as f64) * PI.ln() - log_det - quad)
}

/// `log W(y|x) = −N log π − log det Σ(x) − yᴴ Σ(x)⁻¹ y`.
///
/// For `R = 1·1ᵀ` this uses `det Σ = 1 + ‖x‖²` and
/// `Σ⁻¹ = I − x xᴴ / (1 + ‖x‖²)`.
pub fn cond_output_logdensity(y: &[Complex64], x: &[Complex64], r: &CorrelationMatrix) -> Result<f64> {
    let n = r.n();
    ensure_dim(n, x.len())?;
    ensure_dim(n, y.len())?;
    let base = -(n as f64) * PI.ln();
    match r.structure {
        Structure::AllOnes => {
            let s = 1.0 + norm_sqr(x);
            let xh_y: Complex64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
            Ok(base - s.ln() - (norm_sqr(y) - xh_y.norm_sqr() / s))
        }
        Structure::Identity => Ok(base
            - x.iter()
                .zip(y)
                .map(|(a, b)| {
                    let s = 1.0 + a.norm_sqr();
                    s.ln() + b.norm_sqr() / s
                })
                .sum::<f64>()),
        _ => cond_output_logdensity_dense(y, x, r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::stream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_valid(r: &CorrelationMatrix) {
        let n = r.n();
        for i in 0..n {
            assert!((r.entries()[(i, i)] - one()).norm() <= STRUCTURE_TOL);
            for j in 0..n {
                assert!((r.entries()[(i, j)] - r.entries()[(j, i)].conj()).norm() <= STRUCTURE_TOL);
            }
        }
        let trace: f64 = r.eigvals().iter().sum();
        assert!((trace - n as f64).abs() < 1e-10);
        assert!(r.eigvals().windows(2).all(|w| w[0] >= w[1]));
        let rebuilt = r.factor() * r.factor().adjoint();
        assert!((rebuilt - r.entries()).norm() < 1e-12);
    }

    #[test]
    fn rank_one_matrix() {
        let r = make_rank_one_corr(1).unwrap();
        assert_eq!(r.entries()[(0, 0)], one());
        let r = make_rank_one_corr(3).unwrap();
        assert!(r.entries().iter().all(|&v| v == one()));
        assert_eq!(r.eigvals(), &[3.0, 0.0, 0.0]);
        assert_eq!(r.rank_q(), 1);
        assert_valid(&r);
        assert!(make_rank_one_corr(0).is_err());
    }

    #[test]
    fn rank_one_samples_are_constant_over_block() {
        let r = make_rank_one_corr(3).unwrap();
        let mut rng = stream(5, 0, 0);
        for _ in 0..100 {
            let h = r.sample_fading(&mut rng);
            assert!(h.h.iter().all(|&v| v == h.h[0]));
        }
    }

    #[test]
    fn circulant_flat_spectrum_is_identity() {
        let r = make_circulant_corr(4, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.entries(), &DMatrix::<Complex64>::identity(4, 4));
        assert_eq!(r.rank_q(), 4);
        assert!(r.is_identity());
        assert_valid(&r);
    }

    #[test]
    fn circulant_single_tap_is_rank_one() {
        let r = make_circulant_corr(4, &[1.0]).unwrap();
        assert_eq!(r.eigvals(), &[4.0, 0.0, 0.0, 0.0]);
        assert_eq!(r.rank_q(), 1);
        assert_valid(&r);
    }

    #[test]
    fn circulant_two_taps_against_direct_dft() {
        let r = make_circulant_corr(4, &[3.0, 1.0]).unwrap();
        assert_eq!(r.eigvals(), &[3.0, 1.0, 0.0, 0.0]);
        assert_eq!(r.rank_q(), 2);
        assert_valid(&r);
        // Direct oracle: F diag(λ) Fᴴ with the unitary DFT written out by hand.
        let n = 4;
        let lam = [3.0, 1.0, 0.0, 0.0];
        let f =
            DMatrix::from_fn(n, n, |j, m| Complex64::from_polar(0.5, 2.0 * PI * (j * m) as f64 / n as f64));
        let d = DMatrix::from_fn(n, n, |i, j| if i == j { c(lam[i], 0.0) } else { c(0.0, 0.0) });
        let direct = &f * d * f.adjoint();
        assert!((direct - r.entries()).norm() < 1e-12);
        // R_{jk} = (3 + i^{j−k}) / 4.
        assert!((r.entries()[(1, 0)] - c(0.75, 0.25)).norm() < 1e-15);
        // circulant
        for i in 0..n {
            for j in 0..n {
                let a = r.entries()[(i, j)];
                let b = r.entries()[((i + 1) % n, (j + 1) % n)];
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn circulant_taps_rescaled_to_trace_n() {
        let r = make_circulant_corr(5, &[2.0, 6.0, 2.0]).unwrap();
        assert_valid(&r);
        assert!((r.eigvals()[0] - 3.0).abs() < 1e-14);
        assert!((r.eigvals()[1] - 1.0).abs() < 1e-14);
        assert_eq!(r.rank_q(), 3);
    }

    #[test]
    fn circulant_huge_taps_do_not_overflow() {
        let r = make_circulant_corr(4, &[f64::MAX, f64::MAX, f64::MAX / 2.0]).unwrap();
        let trace: f64 = r.eigvals().iter().sum();
        assert!((trace - 4.0).abs() < 1e-12);
        assert!((r.eigvals()[0] - 1.6).abs() < 1e-12);
    }

    #[test]
    fn circulant_errors() {
        assert!(make_circulant_corr(2, &[1.0, 1.0, 1.0]).is_err());
        assert!(make_circulant_corr(4, &[1.0, 0.0]).is_err());
        assert!(make_circulant_corr(4, &[1.0, -2.0]).is_err());
        assert!(make_circulant_corr(4, &[]).is_err());
        assert!(make_circulant_corr(4, &[f64::NAN]).is_err());
    }

    #[test]
    fn dense_matrix_spectrum() {
        let m = DMatrix::from_row_slice(2, 2, &[one(), c(0.5, 0.0), c(0.5, 0.0), one()]);
        let r = CorrelationMatrix::from_matrix(m).unwrap();
        assert!((r.eigvals()[0] - 1.5).abs() < 1e-14);
        assert!((r.eigvals()[1] - 0.5).abs() < 1e-14);
        assert_eq!(r.rank_q(), 2);
        assert_valid(&r);
    }

    #[test]
    fn dense_rank_detection() {
        // u uᴴ with unimodular u: rank one, unit diagonal.
        let u = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        let m = DMatrix::from_fn(3, 3, |i, j| u[i] * u[j].conj());
        let r = CorrelationMatrix::from_matrix(m).unwrap();
        assert_eq!(r.rank_q(), 1);
        assert!(!r.is_all_ones());
        assert_valid(&r);
    }

    #[test]
    fn dense_matrix_rejections() {
        let not_unit = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), one()]);
        assert!(CorrelationMatrix::from_matrix(not_unit).is_err());
        let not_herm = DMatrix::from_row_slice(2, 2, &[one(), c(0.5, 0.1), c(0.5, 0.1), one()]);
        assert!(CorrelationMatrix::from_matrix(not_herm).is_err());
        let not_psd = DMatrix::from_row_slice(2, 2, &[one(), c(2.0, 0.0), c(2.0, 0.0), one()]);
        assert!(CorrelationMatrix::from_matrix(not_psd).is_err());
        assert!(CorrelationMatrix::from_matrix(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn json_description_round_trip() {
        let s = r#"{"kind":"circulant","n":4,"taps":[3,1]}"#;
        let spec = CorrelationSpec::from_json(s).unwrap();
        let r = spec.build().unwrap();
        assert_eq!(r.rank_q(), 2);
        assert_eq!(CorrelationSpec::from_json(&spec.to_json()).unwrap(), spec);
        assert_eq!(r.spec(), Some(&spec));

        let r = CorrelationSpec::parse_matrix(r#"{"kind":"rank_one","n":3}"#).unwrap();
        assert!(r.is_all_ones());
        let r = CorrelationSpec::parse_matrix(r#"{"kind":"iid","n":2}"#).unwrap();
        assert!(r.is_identity());
    }

    #[test]
    fn json_description_rejections() {
        for bad in [
            r#"{"kind":"circulant","n":4}"#,
            r#"{"kind":"iid","n":4,"taps":[1]}"#,
            r#"{"kind":"rank_one","n":0}"#,
            r#"{"kind":"toeplitz","n":4}"#,
            r#"{"kind":"iid","n":100000}"#,
            r#"{"kind":"iid","n":4,"extra":1}"#,
            r#"{"kind":"iid"}"#,
            "not json",
        ] {
            assert!(CorrelationSpec::parse_matrix(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn channel_config_validation() {
        assert!(ChannelConfig::new(2, 10.0, ModelKind::RankOnePiecewiseConstant).is_ok());
        assert!(ChannelConfig::new(0, 10.0, ModelKind::IidFullRank).is_err());
        assert!(ChannelConfig::new(2, 0.0, ModelKind::IidFullRank).is_err());
        assert!(ChannelConfig::new(2, f64::NAN, ModelKind::IidFullRank).is_err());
        let cfg = ChannelConfig::new(4, 1.0, ModelKind::Circulant(vec![3.0, 1.0])).unwrap();
        assert_eq!(cfg.correlation().unwrap().rank_q(), 2);
    }

    #[test]
    fn apply_channel_dimensions_and_noiseless_path() {
        let r = make_iid_corr(3).unwrap();
        let mut rng = stream(1, 0, 0);
        let h = r.sample_fading(&mut rng);
        let x = vec![c(1.0, 2.0), c(0.0, -1.0), c(3.0, 0.0)];
        let y = apply_fading(&x, &h).unwrap();
        for i in 0..3 {
            assert_eq!(y[i], h.h[i] * x[i]);
        }
        assert!(matches!(
            apply_channel(&x[..2], &h, &mut rng),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn zero_input_output_is_noise() {
        let n = 3;
        let r = make_iid_corr(n).unwrap();
        let mut rng = stream(2, 0, 0);
        let x = vec![c(0.0, 0.0); n];
        let trials = 50_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let h = r.sample_fading(&mut rng);
            acc += norm_sqr(&apply_channel(&x, &h, &mut rng).unwrap());
        }
        assert!((acc / trials as f64 - n as f64).abs() < 0.05);
    }

    #[test]
    fn rank_one_output_power_with_sphere_input() {
        let (n, rho) = (4usize, 10.0);
        let r = make_rank_one_corr(n).unwrap();
        let mut rng = stream(3, 0, 0);
        let trials = 100_000;
        let mut acc = 0.0;
        for _ in 0..trials {
            let x: Vec<Complex64> = crate::stream::unit_sphere(&mut rng, n)
                .into_iter()
                .map(|v| v * (n as f64 * rho).sqrt())
                .collect();
            let h = r.sample_fading(&mut rng);
            acc += norm_sqr(&apply_channel(&x, &h, &mut rng).unwrap());
        }
        let want = n as f64 * (rho + 1.0);
        // std of ‖y‖² is about Nρ; 5 SE window.
        assert!((acc / trials as f64 - want).abs() < 5.0 * 40.0 / (trials as f64).sqrt());
    }

    #[test]
    fn conditional_covariance_cases() {
        let x = vec![c(1.0, 1.0), c(-2.0, 0.5), c(0.0, 3.0)];
        let zero = vec![c(0.0, 0.0); 3];
        let ones = make_rank_one_corr(3).unwrap();
        let iid = make_iid_corr(3).unwrap();

        assert_eq!(conditional_covariance(&zero, &ones).unwrap(), DMatrix::identity(3, 3));

        let s = conditional_covariance(&x, &ones).unwrap();
        let outer = DMatrix::from_fn(3, 3, |i, j| x[i] * x[j].conj()) + DMatrix::identity(3, 3);
        assert!((s.clone() - outer).norm() < 1e-14);
        let mut ev: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        assert!((ev[0] - (1.0 + norm_sqr(&x))).abs() < 1e-12);
        assert!((ev[1] - 1.0).abs() < 1e-12 && (ev[2] - 1.0).abs() < 1e-12);

        let d = conditional_covariance(&x, &iid).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 + x[i].norm_sqr() } else { 0.0 };
                assert!((d[(i, j)] - c(want, 0.0)).norm() < 1e-15);
            }
        }
        assert!(conditional_covariance(&x[..2], &iid).is_err());
    }

    #[test]
    fn cond_logdensity_at_origin() {
        for n in 1..4 {
            let r = make_rank_one_corr(n).unwrap();
            let z = vec![c(0.0, 0.0); n];
            let v = cond_output_logdensity(&z, &z, &r).unwrap();
            assert!((v + n as f64 * PI.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn cond_logdensity_fast_paths_match_dense() {
        let mut rng = stream(9, 0, 0);
        for n in 1..5 {
            for r in [make_rank_one_corr(n).unwrap(), make_iid_corr(n).unwrap()] {
                for _ in 0..20 {
                    let x: Vec<Complex64> =
                        complex_normal_vec(&mut rng, n).into_iter().map(|v| v * 3.0).collect();
                    let y: Vec<Complex64> =
                        complex_normal_vec(&mut rng, n).into_iter().map(|v| v * 2.0).collect();
                    let fast = cond_output_logdensity(&y, &x, &r).unwrap();
                    let dense = cond_output_logdensity_dense(&y, &x, &r).unwrap();
                    assert!((fast - dense).abs() < 1e-10, "{fast} vs {dense}");
                    let ld = log_det_conditional_covariance(&x, &r).unwrap();
                    let sigma = conditional_covariance(&x, &r).unwrap();
                    assert!((ld - sigma.determinant().re.ln()).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn cond_logdensity_normalizes() {
        // E_{y~g}[W(y|x)/g(y)] = 1 with g = CN(0, s I), s wider than Σ(x).
        for n in 1..=2 {
            let r = make_rank_one_corr(n).unwrap();
            let x = vec![c(0.8, -0.3); n];
            let s = 2.0 * (1.0 + norm_sqr(&x));
            let mut rng = stream(4, n as u64, 0);
            let trials = 200_000;
            let mut acc = 0.0;
            let mut acc2 = 0.0;
            for _ in 0..trials {
                let y: Vec<Complex64> =
                    complex_normal_vec(&mut rng, n).into_iter().map(|v| v * s.sqrt()).collect();
                let log_g = -(n as f64) * (PI * s).ln() - norm_sqr(&y) / s;
                let w = (cond_output_logdensity(&y, &x, &r).unwrap() - log_g).exp();
                acc += w;
                acc2 += w * w;
            }
            let mean = acc / trials as f64;
            let se = ((acc2 / trials as f64 - mean * mean) / trials as f64).sqrt();
            assert!((mean - 1.0).abs() < 4.0 * se, "n={n}: {mean} ± {se}");
        }
    }

    #[test]
    fn conditional_entropy_matches_negative_mean_logdensity() {
        let r = make_circulant_corr(4, &[3.0, 1.0]).unwrap();
        let x = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0), c(0.5, 0.5)];
        let mut rng = stream(12, 0, 0);
        let trials = 100_000;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for _ in 0..trials {
            let h = r.sample_fading(&mut rng);
            let y = apply_channel(&x, &h, &mut rng).unwrap();
            let v = -cond_output_logdensity(&y, &x, &r).unwrap();
            acc += v;
            acc2 += v * v;
        }
        let mean = acc / trials as f64;
        let se = ((acc2 / trials as f64 - mean * mean) / trials as f64).sqrt();
        let h = conditional_entropy(&x, &r).unwrap();
        assert!((mean - h).abs() < 4.0 * se, "{mean} vs {h} (se {se})");
    }
}
