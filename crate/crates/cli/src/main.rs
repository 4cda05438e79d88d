use clap::{Args, Parser, Subcommand};
use noncoh_cap::channel::CorrelationSpec;
use noncoh_cap::snr::{parse_taps, SnrGrid};
use noncoh_cap_cli::commands::{render_asymptote, render_bounds, render_sweep};
use noncoh_cap_cli::config::{ModelArg, DEFAULT_SEED, DEFAULT_SWEEP_SAMPLES, DEFAULT_VERIFY_SAMPLES};
use noncoh_cap_cli::error::{EXIT_CHECK_FAILED, EXIT_USAGE};
use noncoh_cap_cli::{
    cmd_asymptote, cmd_bounds, cmd_mc_verify, cmd_sweep, criteria, thread_pool, CliError, CliResult, Faults,
    OutputFormat, Rho0Policy, SweepConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

/// Capacity bounds and high-SNR expansions for the noncoherent
/// correlated block-fading channel. All values are in nats per channel use.
///
/// Worker threads: NONCOH_CAP_THREADS (output does not depend on it).
/// Exit codes: 0 success, 1 check failure, 2 usage or input error.
#[derive(Parser)]
#[command(name = "noncoh-cap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pre-log and the applicable high-SNR expansion per grid point.
    Asymptote(ChannelArgs),
    /// Lower, upper, asymptote and gap columns per grid point.
    Bounds(ChannelArgs),
    /// Bounds plus a Monte-Carlo duality bound for the sphere input.
    Sweep(ChannelArgs),
    /// Monte-Carlo checks of the identities behind the closed forms (JSON).
    McVerify(VerifyArgs),
    /// Runs acceptance criteria C1-C12 and prints a pass/fail matrix.
    Selftest,
}

#[derive(Args)]
struct ChannelArgs {
    /// Fading model.
    #[arg(long, value_enum, default_value_t = ModelArg::RankOne)]
    model: ModelArg,
    /// Block length N.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Circulant spectrum taps, e.g. "3,1".
    #[arg(long)]
    taps: Option<String>,
    /// JSON correlation spec {"kind","n","taps"}; overrides --model/--n/--taps.
    #[arg(long)]
    corr: Option<PathBuf>,
    /// SNR grid in dB: start:stop:step (inclusive), a list, or one value.
    #[arg(long, default_value = "0:80:5")]
    snr_db: String,
    /// Norm constraint rho0: "sqrt" (rho0 = sqrt(rho)) or a fixed value.
    #[arg(long, default_value = "sqrt")]
    rho0: Rho0Policy,
    /// Monte-Carlo samples per grid point (sweep only).
    #[arg(long, default_value_t = DEFAULT_SWEEP_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_VERIFY_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Negative control: shifts the Euler-Mascheroni target.
    #[arg(long, hide = true)]
    corrupt_constant: bool,
}

impl ChannelArgs {
    fn config(&self) -> CliResult<SweepConfig> {
        let (model, n) = match &self.corr {
            Some(path) => {
                let spec = CorrelationSpec::from_json(&std::fs::read_to_string(path)?)?;
                ((&spec).into(), spec.n)
            }
            None => {
                let taps = self.taps.as_deref().map(parse_taps).transpose()?;
                (SweepConfig::model_from_args(self.model, taps)?, self.n)
            }
        };
        let grid: SnrGrid = self.snr_db.parse()?;
        if self.samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        Ok(SweepConfig {
            model,
            n,
            grid,
            rho0: self.rho0,
            mc_samples: self.samples,
            seed: self.seed,
            out: self.out.clone(),
            format: self.format,
        })
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Asymptote(a) => {
            let cfg = a.config()?;
            emit(cfg.out.as_ref(), &render_asymptote(&cfg, &cmd_asymptote(&cfg)?)?)?;
        }
        Command::Bounds(a) => {
            let cfg = a.config()?;
            emit(cfg.out.as_ref(), &render_bounds(&cfg, &cmd_bounds(&cfg)?)?)?;
        }
        Command::Sweep(a) => {
            let cfg = a.config()?;
            emit(cfg.out.as_ref(), &render_sweep(&cfg, &cmd_sweep(&cfg)?)?)?;
        }
        Command::McVerify(v) => {
            if v.samples < 2 {
                return Err(CliError::Usage("--samples must be at least 2".into()));
            }
            let cfg = SweepConfig { mc_samples: v.samples, seed: v.seed, ..SweepConfig::default() };
            let report = cmd_mc_verify(&cfg, Faults { corrupt_constant: v.corrupt_constant })?;
            emit(v.out.as_ref(), &report.to_json()?)?;
            return Ok(report.pass);
        }
        Command::Selftest => {
            let mut all = true;
            for (id, _, _) in criteria::CRITERIA {
                let r = criteria::run(id).expect("listed criterion");
                println!("{}", r.line());
                all &= r.pass;
            }
            return Ok(all);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = thread_pool().and_then(|pool| pool.install(|| run(cli)));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED as u8),
        Err(e) => {
            eprintln!("noncoh-cap: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
