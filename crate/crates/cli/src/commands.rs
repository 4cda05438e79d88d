use crate::config::{OutputFormat, SweepConfig};
use crate::error::{CliError, CliResult};
use crate::table::{self, AsymptoteRow, BoundsRow, SweepRow};
use noncoh_cap::asymptotics::{asymptote_for, prelog, AsymptoteKind};
use noncoh_cap::bounds::{
    mc_duality_upper_bound, memoryless_upper_bound, rank_one_lower_bound, rank_one_upper_bound, BoundConfig,
    FixedInput, OutputDensityParams, SphereInput, MEMORYLESS_SNR_FLOOR,
};
use noncoh_cap::channel::{make_iid_corr, CorrelationMatrix, ModelKind};
use noncoh_cap::montecarlo::{
    joint_z, mc_entropy_isotropic, mc_g, mc_mean_log_abs_sq, mc_norm_mixture_check,
    mc_output_density_normalization, McEstimate,
};
use noncoh_cap::snr::db_to_linear;
use noncoh_cap::specfun::{g_lemma, EULER_GAMMA};
use noncoh_cap::{bounds::sphere_output_entropy, Complex64, Error};
use serde::{Deserialize, Serialize};

/// |z| above this fails a Monte-Carlo check.
pub const Z_THRESHOLD: f64 = 3.0;

/// Offset added to `γ` by the fault-injection hook.
pub const CORRUPTION: f64 = 0.01;

fn checked_correlation(cfg: &SweepConfig) -> CliResult<CorrelationMatrix> {
    if cfg.model == ModelKind::RankOnePiecewiseConstant && cfg.n < 2 {
        return Err(CliError::Usage(format!("rank_one needs --n >= 2, got {}", cfg.n)));
    }
    cfg.correlation()
}

fn soft<T>(r: noncoh_cap::Result<T>) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Domain(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// One row per grid point: pre-log and the applicable high-SNR expansion.
pub fn cmd_asymptote(cfg: &SweepConfig) -> CliResult<Vec<AsymptoteRow>> {
    let r = checked_correlation(cfg)?;
    let chi = prelog(r.n(), r.rank_q())?;
    let mut rows = Vec::with_capacity(cfg.grid.len());
    for &db in cfg.grid.points_db() {
        let a = soft(asymptote_for(&r, db_to_linear(db)))?.flatten();
        rows.push(AsymptoteRow {
            snr_db: db,
            prelog: chi,
            asymptote_nats_per_use: a.map(|a| a.value),
            asymptote_kind: a.map(|a| a.kind),
        });
    }
    Ok(rows)
}

fn bounds_row(cfg: &SweepConfig, r: &CorrelationMatrix, chi: f64, db: f64) -> CliResult<BoundsRow> {
    let snr = db_to_linear(db);
    let asym = soft(asymptote_for(r, snr))?.flatten();
    let mut row = BoundsRow {
        snr_db: db,
        prelog: chi,
        rho0: None,
        alpha: None,
        lower_nats_per_use: None,
        upper_nats_per_use: None,
        asymptote_nats_per_use: asym.map(|a| a.value),
        gap_nats_per_use: None,
        upper_note: None,
    };
    match asym.map(|a| a.kind) {
        Some(AsymptoteKind::RankOne) => {
            let bc = BoundConfig::new(cfg.rho0.rho0(snr), 1, cfg.seed)?;
            let lo = rank_one_lower_bound(r.n(), snr)?;
            let up = rank_one_upper_bound(r.n(), snr, &bc)?;
            row.rho0 = up.rho0;
            row.alpha = up.alpha;
            row.lower_nats_per_use = lo.nats_per_use;
            row.upper_nats_per_use = up.nats_per_use;
            row.gap_nats_per_use = Some(up.value() - lo.value());
            row.upper_note = up.note;
        }
        Some(AsymptoteKind::FullRankIid) if snr >= MEMORYLESS_SNR_FLOOR => {
            let up = memoryless_upper_bound(snr)?;
            row.alpha = up.alpha;
            row.upper_nats_per_use = up.nats_per_use;
            row.gap_nats_per_use = row.asymptote_nats_per_use.map(|a| up.value() - a);
            row.upper_note = up.note;
        }
        _ => {}
    }
    Ok(row)
}

/// Lower, upper, asymptote and gap columns per grid point.
///
/// Rank-one: gap = upper − lower. Memoryless full rank: gap = upper −
/// asymptote (there is no closed-form lower bound). Other models get only
/// the expansion that applies.
pub fn cmd_bounds(cfg: &SweepConfig) -> CliResult<Vec<BoundsRow>> {
    let r = checked_correlation(cfg)?;
    let chi = prelog(r.n(), r.rank_q())?;
    cfg.grid.points_db().iter().map(|&db| bounds_row(cfg, &r, chi, db)).collect()
}

/// [`cmd_bounds`] plus a Monte-Carlo duality bound for the power-limited
/// sphere input against the `α = 1` output density.
pub fn cmd_sweep(cfg: &SweepConfig) -> CliResult<Vec<SweepRow>> {
    let r = checked_correlation(cfg)?;
    let chi = prelog(r.n(), r.rank_q())?;
    let mut rows = Vec::with_capacity(cfg.grid.len());
    for &db in cfg.grid.points_db() {
        let b = bounds_row(cfg, &r, chi, db)?;
        let snr = db_to_linear(db);
        let p = OutputDensityParams::for_snr(r.n(), 1.0, snr)?;
        let bc = BoundConfig::new(cfg.rho0.rho0(snr), cfg.mc_samples, cfg.seed)?;
        let est = mc_duality_upper_bound(&SphereInput::power_limited(r.n(), snr), &r, &p, &bc)?;
        rows.push(SweepRow {
            snr_db: b.snr_db,
            prelog: b.prelog,
            rho0: b.rho0,
            alpha: b.alpha,
            lower_nats_per_use: b.lower_nats_per_use,
            upper_nats_per_use: b.upper_nats_per_use,
            asymptote_nats_per_use: b.asymptote_nats_per_use,
            gap_nats_per_use: b.gap_nats_per_use,
            upper_note: b.upper_note,
            mc_upper_nats_per_use: Some(est.value),
            mc_stderr_nats_per_use: Some(est.stderr),
            mc_alpha: Some(1.0),
            mc_samples: est.samples,
            mc_seed: est.seed,
        });
    }
    Ok(rows)
}

pub fn render_asymptote(cfg: &SweepConfig, rows: &[AsymptoteRow]) -> CliResult<String> {
    match cfg.format {
        OutputFormat::Csv => table::to_csv(rows),
        OutputFormat::Json => {
            let r = cfg.correlation()?;
            table::to_json(&table::asymptote_values(rows, r.n(), r.rank_q()))
        }
    }
}

pub fn render_bounds(cfg: &SweepConfig, rows: &[BoundsRow]) -> CliResult<String> {
    match cfg.format {
        OutputFormat::Csv => table::to_csv(rows),
        OutputFormat::Json => {
            let r = cfg.correlation()?;
            table::to_json(&table::bounds_values(rows, r.n(), r.rank_q()))
        }
    }
}

pub fn render_sweep(cfg: &SweepConfig, rows: &[SweepRow]) -> CliResult<String> {
    match cfg.format {
        OutputFormat::Csv => table::to_csv(rows),
        OutputFormat::Json => {
            let r = cfg.correlation()?;
            table::to_json(&table::sweep_values(rows, r.n(), r.rank_q()))
        }
    }
}

/// Negative controls for the verification suite.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// Shift the `γ` used as a target by [`CORRUPTION`].
    pub corrupt_constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McCheck {
    pub name: String,
    pub estimate: f64,
    pub target: f64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
}

impl McCheck {
    fn against(name: &str, e: &McEstimate, target: f64) -> Self {
        let z = e.z_score(target);
        Self {
            name: name.into(),
            estimate: e.value,
            target,
            stderr: e.stderr,
            z,
            pass: z.abs() <= Z_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McReport {
    pub seed: u64,
    pub samples: u64,
    pub checks: Vec<McCheck>,
    pub pass: bool,
}

impl McReport {
    pub fn from_json(s: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> CliResult<String> {
        table::to_json(self)
    }
}

/// Runs every Monte-Carlo oracle at `cfg.mc_samples` draws and `cfg.seed`.
pub fn cmd_mc_verify(cfg: &SweepConfig, faults: Faults) -> CliResult<McReport> {
    let (samples, seed) = (cfg.mc_samples, cfg.seed);
    let gamma = if faults.corrupt_constant { EULER_GAMMA + CORRUPTION } else { EULER_GAMMA };
    let mut checks = Vec::new();

    checks.push(McCheck::against("mean_log_abs_sq", &mc_mean_log_abs_sq(samples, seed)?, -gamma));
    for a in [1.0, 100.0] {
        checks.push(McCheck::against(&format!("g_lemma_a{a}"), &mc_g(a, samples, seed)?, g_lemma(a)?));
    }

    let x = [Complex64::new(10.0, 0.0), Complex64::new(0.0, 0.0)];
    let (direct, mixture) = mc_norm_mixture_check(&x, samples, seed)?;
    let z = joint_z(&direct, &mixture);
    checks.push(McCheck {
        name: "norm_mixture_n2_x100".into(),
        estimate: direct.value - mixture.value,
        target: 0.0,
        stderr: direct.stderr.hypot(mixture.stderr),
        z,
        pass: z.abs() <= Z_THRESHOLD,
    });

    checks.push(McCheck::against(
        "isotropic_entropy_n2_rho100",
        &mc_entropy_isotropic(2, 100.0, samples, seed)?,
        sphere_output_entropy(2, 100.0)?,
    ));

    for (n, alpha) in [(1usize, 0.5), (2, 1.0)] {
        let p = OutputDensityParams::for_snr(n, alpha, 100.0)?;
        let e = mc_output_density_normalization(&p, samples, seed)?;
        checks.push(McCheck::against(&format!("output_density_norm_n{n}_alpha{alpha}"), &e, 1.0));
    }

    let r = make_iid_corr(1)?;
    let p = OutputDensityParams::new(1, 1.0, 1.0)?;
    let bc = BoundConfig::new(0.0, samples, seed)?;
    let e = mc_duality_upper_bound(&FixedInput(vec![Complex64::new(0.0, 0.0)]), &r, &p, &bc)?;
    checks.push(McCheck::against("zero_input_duality_n1", &e, 0.0));

    let pass = checks.iter().all(|c| c.pass);
    Ok(McReport { seed, samples, checks, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Rho0Policy;
    use noncoh_cap::asymptotics::rank_one_asymptote;

    fn cfg(model: ModelKind, n: usize, grid: &str) -> SweepConfig {
        SweepConfig { model, n, grid: grid.parse().unwrap(), ..SweepConfig::default() }
    }

    #[test]
    fn asymptote_rank_one_row() {
        let rows = cmd_asymptote(&cfg(ModelKind::RankOnePiecewiseConstant, 2, "60")).unwrap();
        assert_eq!(rows[0].prelog, 0.5);
        assert_eq!(rows[0].asymptote_nats_per_use, Some(rank_one_asymptote(2, 1e6).unwrap()));
    }

    #[test]
    fn asymptote_iid_prelog_zero_and_low_snr_blank() {
        for n in [1, 3, 5] {
            let rows = cmd_asymptote(&cfg(ModelKind::IidFullRank, n, "0,40")).unwrap();
            assert_eq!(rows[1].prelog, 0.0);
            assert!(rows[0].asymptote_nats_per_use.is_none());
            assert!(rows[1].asymptote_nats_per_use.is_some());
        }
    }

    #[test]
    fn flat_circulant_matches_iid() {
        let a = cmd_asymptote(&cfg(ModelKind::Circulant(vec![1.0; 4]), 4, "0:80:5")).unwrap();
        let b = cmd_asymptote(&cfg(ModelKind::IidFullRank, 4, "0:80:5")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rank_one_needs_two() {
        let c = cfg(ModelKind::RankOnePiecewiseConstant, 1, "10");
        assert!(matches!(cmd_asymptote(&c), Err(CliError::Usage(_))));
        assert!(matches!(cmd_bounds(&c), Err(CliError::Usage(_))));
    }

    #[test]
    fn rank_one_gap_decreases_with_sqrt_policy() {
        let rows = cmd_bounds(&cfg(ModelKind::RankOnePiecewiseConstant, 2, "20:80:5")).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].gap_nats_per_use.unwrap() < w[0].gap_nats_per_use.unwrap());
        }
        assert!(rows.iter().all(|r| r.upper_note.as_deref().unwrap().contains("rho0-constrained")));
    }

    #[test]
    fn fixed_rho0_is_reported() {
        let mut c = cfg(ModelKind::RankOnePiecewiseConstant, 3, "30");
        c.rho0 = Rho0Policy::Fixed(7.0);
        let rows = cmd_bounds(&c).unwrap();
        assert_eq!(rows[0].rho0, Some(7.0));
    }

    #[test]
    fn iid_gap_tends_to_one_nat() {
        let rows = cmd_bounds(&cfg(ModelKind::IidFullRank, 1, "0:300:20")).unwrap();
        assert!(rows[0].upper_nats_per_use.is_none());
        let gaps: Vec<f64> = rows.iter().filter_map(|r| r.gap_nats_per_use).collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0]);
        }
        let last = *gaps.last().unwrap();
        assert!(last > 1.0 && last < 1.1, "{last}");
    }

    #[test]
    fn intermediate_rank_has_only_prelog() {
        let rows = cmd_bounds(&cfg(ModelKind::Circulant(vec![3.0, 1.0]), 4, "40")).unwrap();
        assert_eq!(rows[0].prelog, 0.5);
        assert!(rows[0].asymptote_nats_per_use.is_none() && rows[0].upper_nats_per_use.is_none());
    }

    #[test]
    fn sweep_mc_column_sits_above_lower_bound() {
        let mut c = cfg(ModelKind::RankOnePiecewiseConstant, 2, "10:30:10");
        c.mc_samples = 20_000;
        for r in cmd_sweep(&c).unwrap() {
            let d = r.mc_upper_nats_per_use.unwrap() - r.lower_nats_per_use.unwrap();
            assert!(d > -3.0 * r.mc_stderr_nats_per_use.unwrap());
        }
    }

    #[test]
    fn mc_verify_small_run_and_fault() {
        let c = SweepConfig { mc_samples: 200_000, ..SweepConfig::default() };
        let rep = cmd_mc_verify(&c, Faults::default()).unwrap();
        assert_eq!(rep.checks.len(), 8);
        let bad = cmd_mc_verify(&c, Faults { corrupt_constant: true }).unwrap();
        assert!(!bad.checks[0].pass && !bad.pass);
        let s = rep.to_json().unwrap();
        assert_eq!(McReport::from_json(&s).unwrap(), rep);
    }
}
