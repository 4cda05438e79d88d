use crate::error::{CliError, CliResult};
use noncoh_cap::channel::{CorrelationMatrix, CorrelationSpec, ModelKind};
use noncoh_cap::snr::SnrGrid;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub const DEFAULT_GRID: &str = "0:80:5";
pub const DEFAULT_N: usize = 2;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_SWEEP_SAMPLES: u64 = 100_000;
pub const DEFAULT_VERIFY_SAMPLES: u64 = 1_000_000;

/// How ρ₀ is chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rho0Policy {
    Fixed(f64),
    /// `ρ₀ = √ρ`
    Sqrt,
}

impl Rho0Policy {
    pub fn rho0(&self, snr: f64) -> f64 {
        match *self {
            Rho0Policy::Fixed(v) => v,
            Rho0Policy::Sqrt => snr.sqrt(),
        }
    }
}

impl FromStr for Rho0Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("sqrt") {
            return Ok(Rho0Policy::Sqrt);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Rho0Policy::Fixed(v)),
            _ => Err(format!("expected 'sqrt' or a positive number, got {s:?}")),
        }
    }
}

impl fmt::Display for Rho0Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rho0Policy::Fixed(v) => write!(f, "{v}"),
            Rho0Policy::Sqrt => f.write_str("sqrt"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ModelArg {
    #[default]
    #[value(name = "rank_one")]
    RankOne,
    Iid,
    Circulant,
}

/// Everything a sweep needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub n: usize,
    pub grid: SnrGrid,
    pub rho0: Rho0Policy,
    pub mc_samples: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::RankOnePiecewiseConstant,
            n: DEFAULT_N,
            grid: DEFAULT_GRID.parse().expect("default grid parses"),
            rho0: Rho0Policy::Sqrt,
            mc_samples: DEFAULT_SWEEP_SAMPLES,
            seed: DEFAULT_SEED,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

impl SweepConfig {
    pub fn model_from_args(model: ModelArg, taps: Option<Vec<f64>>) -> CliResult<ModelKind> {
        match (model, taps) {
            (ModelArg::RankOne, None) => Ok(ModelKind::RankOnePiecewiseConstant),
            (ModelArg::Iid, None) => Ok(ModelKind::IidFullRank),
            (ModelArg::Circulant, Some(t)) => Ok(ModelKind::Circulant(t)),
            (ModelArg::Circulant, None) => Err(CliError::Usage("--model circulant needs --taps".into())),
            (_, Some(_)) => Err(CliError::Usage("--taps only applies to --model circulant".into())),
        }
    }

    pub fn spec(&self) -> CorrelationSpec {
        self.model.spec(self.n)
    }

    pub fn correlation(&self) -> CliResult<CorrelationMatrix> {
        Ok(self.spec().build()?)
    }
}
