use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use slowlight_cli::commands::{self, Domain, KkArgs, PropagateArgs, XcorrArgs};
use slowlight_cli::config::Config;
use slowlight_cli::CliError;

#[derive(Parser)]
#[command(name = "slowlight", version, about = "Raman-dispersion slow-light modelling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Taper an absorption spectrum even when it has not decayed at the edges.
    #[arg(long, global = true)]
    force_taper: bool,
}

#[derive(Args)]
struct Common {
    /// TOML configuration, or a summary file from an earlier run.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Fd,
    Td,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Fd => Domain::Fd,
            DomainArg::Td => Domain::Td,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form delay, loss and delay-bandwidth product.
    Analytic {
        #[command(flatten)]
        common: Common,
    },
    /// Dispersion reconstructed from an absorption spectrum.
    Kk {
        #[command(flatten)]
        common: Common,
        /// Absorption or optical-depth CSV; the configured model is used if absent.
        #[arg(long)]
        absorption: Option<PathBuf>,
    },
    /// Propagate the configured signal through the medium.
    Propagate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "fd")]
        domain: DomainArg,
        /// Susceptibility CSV replacing the Lorentzian model (fd only).
        #[arg(long)]
        chi_csv: Option<PathBuf>,
    },
    /// Delay and loss versus control intensity.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "fd")]
        domain: DomainArg,
        #[arg(long)]
        chi_csv: Option<PathBuf>,
    },
    /// Cross-correlation width, delay and first moment.
    Xcorr {
        #[command(flatten)]
        common: Common,
        /// Output envelope CSV.
        #[arg(long)]
        signal: Option<PathBuf>,
        /// Control-off envelope CSV for the delay.
        #[arg(long)]
        signal_off: Option<PathBuf>,
        /// Measured correlation curve CSV.
        #[arg(long)]
        correlation: Option<PathBuf>,
        #[arg(long)]
        reference_fwhm_ps: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analytic { common } => {
            commands::analytic(&Config::load(&common.config)?, &common.out_dir)?;
        }
        Command::Kk { common, absorption } => {
            let args = KkArgs { absorption, force_taper: cli.force_taper };
            commands::kk(&Config::load(&common.config)?, &args, &common.out_dir)?;
        }
        Command::Propagate { common, domain, chi_csv } => {
            let args = PropagateArgs { domain: domain.into(), chi_csv };
            commands::propagate_cmd(&Config::load(&common.config)?, &args, &common.out_dir)?;
        }
        Command::Sweep { common, domain, chi_csv } => {
            let args = PropagateArgs { domain: domain.into(), chi_csv };
            commands::sweep(&Config::load(&common.config)?, &args, &common.out_dir)?;
        }
        Command::Xcorr { common, signal, signal_off, correlation, reference_fwhm_ps } => {
            let args = XcorrArgs { signal, signal_off, correlation, reference_fwhm_ps };
            commands::xcorr(&Config::load(&common.config)?, &args, &common.out_dir)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::from(slowlight_cli::EXIT_OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
