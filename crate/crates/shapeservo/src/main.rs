use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use shapeservo::{cmd_fit, cmd_jacobian_check, cmd_servo, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "shapeservo", version, about = "Arc-rod shape servoing experiments")]
struct Cli {
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit an arc to a point-cloud file.
    Fit {
        cloud: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compare analytic and finite-difference Jacobians, then run the sign check.
    JacobianCheck {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the closed loop against the simulated rod.
    Servo {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load(path: Option<&PathBuf>, cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Fit { cloud, config } => {
            let cfg = load(config.as_ref(), cli)?;
            println!("{}", cmd_fit(cloud, &cfg)?);
        }
        Command::JacobianCheck { config } => {
            let cfg = load(config.as_ref(), cli)?;
            println!("{}", cmd_jacobian_check(&cfg)?);
        }
        Command::Servo { config } => {
            let cfg = load(config.as_ref(), cli)?;
            let report = cmd_servo(&cfg)?;
            println!("{report}");
            if report.fault().is_some() {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => Ok(code),
        Err(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(e.exit_code() as u8))
        }
    }
}
