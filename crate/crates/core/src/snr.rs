//! SNR units and grids. The interface speaks dB; everything else is linear.

use crate::error::{Error, Result};
use std::str::FromStr;

/// Grids longer than this are rejected.
pub const MAX_GRID_POINTS: usize = 100_000;

/// `ρ = 10^{dB/10}`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(snr: f64) -> f64 {
    10.0 * snr.log10()
}

/// SNR points in dB, in the order given.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrGrid {
    points_db: Vec<f64>,
}

impl SnrGrid {
    /// Inclusive range `start, start + step, …, ≤ stop`.
    pub fn range(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() || !step.is_finite() {
            return Err(Error::Parse("grid bounds must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(Error::Parse(format!("grid step must be positive, got {step}")));
        }
        if stop < start {
            return Err(Error::Parse(format!("grid stop {stop} is below start {start}")));
        }
        let span = (stop - start) / step;
        if span >= MAX_GRID_POINTS as f64 {
            return Err(Error::Parse(format!("grid exceeds {MAX_GRID_POINTS} points")));
        }
        // Tolerate round-off so that 0:80:5 includes 80.
        let count = (span + 1e-9).floor() as usize + 1;
        let points_db = (0..count).map(|i| start + i as f64 * step).collect();
        Ok(Self { points_db })
    }

    pub fn from_points(points_db: Vec<f64>) -> Result<Self> {
        if points_db.is_empty() {
            return Err(Error::Parse("empty SNR grid".into()));
        }
        if points_db.len() > MAX_GRID_POINTS {
            return Err(Error::Parse(format!("grid exceeds {MAX_GRID_POINTS} points")));
        }
        if let Some(bad) = points_db.iter().find(|p| !p.is_finite()) {
            return Err(Error::Parse(format!("non-finite SNR point {bad}")));
        }
        Ok(Self { points_db })
    }

    pub fn points_db(&self) -> &[f64] {
        &self.points_db
    }

    pub fn len(&self) -> usize {
        self.points_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points_db.is_empty()
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let t = s.trim();
    t.parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {t:?}")))
}

/// `"start:stop:step"`, a comma-separated list, or a single value.
impl FromStr for SnrGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, step] => Self::range(parse_f64(start)?, parse_f64(stop)?, parse_f64(step)?),
            [_] => Self::from_points(s.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?),
            _ => Err(Error::Parse(format!("expected start:stop:step or a list, got {s:?}"))),
        }
    }
}

/// Comma-separated positive taps, e.g. `"3,1"`.
pub fn parse_taps(s: &str) -> Result<Vec<f64>> {
    let taps = s.split(',').map(parse_f64).collect::<Result<Vec<_>>>()?;
    if let Some(bad) = taps.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::Parse(format!("taps must be finite and positive, got {bad}")));
    }
    Ok(taps)
}
