//! Tabular output. CSV has a header row and one record per grid point; JSON
//! is an array of [`BoundValue`] objects.

use crate::error::CliResult;
use noncoh_cap::asymptotics::AsymptoteKind;
use noncoh_cap::bounds::{BoundKind, BoundValue, MC_UPPER_NOTE};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteRow {
    pub snr_db: f64,
    pub prelog: f64,
    pub asymptote_nats_per_use: Option<f64>,
    pub asymptote_kind: Option<AsymptoteKind>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub snr_db: f64,
    pub prelog: f64,
    pub rho0: Option<f64>,
    pub alpha: Option<f64>,
    pub lower_nats_per_use: Option<f64>,
    pub upper_nats_per_use: Option<f64>,
    pub asymptote_nats_per_use: Option<f64>,
    pub gap_nats_per_use: Option<f64>,
    pub upper_note: Option<String>,
}

/// A [`BoundsRow`] plus the Monte-Carlo duality bound for the sphere input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub prelog: f64,
    pub rho0: Option<f64>,
    pub alpha: Option<f64>,
    pub lower_nats_per_use: Option<f64>,
    pub upper_nats_per_use: Option<f64>,
    pub asymptote_nats_per_use: Option<f64>,
    pub gap_nats_per_use: Option<f64>,
    pub upper_note: Option<String>,
    pub mc_upper_nats_per_use: Option<f64>,
    pub mc_stderr_nats_per_use: Option<f64>,
    pub mc_alpha: Option<f64>,
    pub mc_samples: u64,
    pub mc_seed: u64,
}

impl SweepRow {
    pub fn bounds(&self) -> BoundsRow {
        BoundsRow {
            snr_db: self.snr_db,
            prelog: self.prelog,
            rho0: self.rho0,
            alpha: self.alpha,
            lower_nats_per_use: self.lower_nats_per_use,
            upper_nats_per_use: self.upper_nats_per_use,
            asymptote_nats_per_use: self.asymptote_nats_per_use,
            gap_nats_per_use: self.gap_nats_per_use,
            upper_note: self.upper_note.clone(),
        }
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn from_csv<T: DeserializeOwned>(s: &str) -> CliResult<Vec<T>> {
    let mut r = csv::Reader::from_reader(s.as_bytes());
    let mut out = Vec::new();
    for rec in r.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn parse_bounds_csv(s: &str) -> CliResult<Vec<BoundsRow>> {
    from_csv(s)
}

pub fn parse_sweep_csv(s: &str) -> CliResult<Vec<SweepRow>> {
    from_csv(s)
}

pub fn parse_asymptote_csv(s: &str) -> CliResult<Vec<AsymptoteRow>> {
    from_csv(s)
}

pub fn to_json<T: Serialize + ?Sized>(v: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn value(kind: BoundKind, v: Option<f64>, snr_db: f64, n: usize, q: usize, prelog: f64) -> BoundValue {
    BoundValue {
        kind,
        nats_per_use: v,
        snr_db: Some(snr_db),
        n,
        q,
        rho0: None,
        alpha: None,
        stderr: None,
        prelog: Some(prelog),
        note: None,
    }
}

pub fn asymptote_values(rows: &[AsymptoteRow], n: usize, q: usize) -> Vec<BoundValue> {
    rows.iter()
        .map(|r| value(BoundKind::Asymptote, r.asymptote_nats_per_use, r.snr_db, n, q, r.prelog))
        .collect()
}

fn push_bounds(out: &mut Vec<BoundValue>, r: &BoundsRow, n: usize, q: usize) {
    if r.lower_nats_per_use.is_some() {
        out.push(value(BoundKind::Lower, r.lower_nats_per_use, r.snr_db, n, q, r.prelog));
    }
    if r.upper_nats_per_use.is_some() {
        let mut v = value(BoundKind::Upper, r.upper_nats_per_use, r.snr_db, n, q, r.prelog);
        v.rho0 = r.rho0;
        v.alpha = r.alpha;
        v.note = r.upper_note.clone();
        out.push(v);
    }
    out.push(value(BoundKind::Asymptote, r.asymptote_nats_per_use, r.snr_db, n, q, r.prelog));
}

/// Lower, upper (when defined) and asymptote per grid point.
pub fn bounds_values(rows: &[BoundsRow], n: usize, q: usize) -> Vec<BoundValue> {
    let mut out = Vec::with_capacity(3 * rows.len());
    for r in rows {
        push_bounds(&mut out, r, n, q);
    }
    out
}

/// As [`bounds_values`], plus the Monte-Carlo upper bound with its stderr.
pub fn sweep_values(rows: &[SweepRow], n: usize, q: usize) -> Vec<BoundValue> {
    let mut out = Vec::with_capacity(4 * rows.len());
    for r in rows {
        push_bounds(&mut out, &r.bounds(), n, q);
        let mut v = value(BoundKind::Upper, r.mc_upper_nats_per_use, r.snr_db, n, q, r.prelog);
        v.alpha = r.mc_alpha;
        v.stderr = r.mc_stderr_nats_per_use;
        v.note = Some(MC_UPPER_NOTE.into());
        out.push(v);
    }
    out
}
