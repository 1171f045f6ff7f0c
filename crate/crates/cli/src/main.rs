#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Status;
use config::ConfigError;

/// Time- and norm-optimal control of one-dimensional parabolic systems.
///
/// Exit status: 0 on success, 1 on solver non-convergence or a failing
/// residual, 2 on a configuration or usage error.
#[derive(Debug, Parser)]
#[command(name = "timeopt", version)]
struct Cli {
    /// TOML configuration file
    #[arg(short, long, global = true, default_value = "timeopt.toml")]
    config: PathBuf,

    /// Directory for output files [default: output.dir from the config, else timeopt-out]
    #[arg(short, long, global = true, env = "TIMEOPT_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimal-norm control steering into the target at a fixed horizon
    Norm {
        /// Horizon [default: norm.tau from the config]
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Minimal time to reach the target under a control bound
    Time {
        /// Control bound [default: time.M from the config]
        #[arg(long = "M", value_name = "M")]
        m: Option<f64>,
    },
    /// Minimal-norm function over a list of horizons
    Curve {
        /// Comma-separated, strictly increasing horizons [default: curve.tau_list from the config]
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        tau_list: Vec<f64>,
    },
    /// Homogenized coefficient of the configured diffusion preset
    Homog,
    /// Epsilon sweep against the homogenized problem, with CSV/JSON reports
    Sweep,
    /// Recompute every optimality residual of a solution written by `time`
    Verify {
        /// Path to a time.json file
        solution: PathBuf,
    },
}

fn run(cli: &Cli) -> anyhow::Result<Status> {
    if let Command::Verify { solution } = &cli.command {
        return commands::verify(solution);
    }
    let config = commands::load(&cli.config)?;
    let out = commands::output_dir(&config, cli.output_dir.as_deref())?;
    match &cli.command {
        Command::Norm { tau } => commands::norm(&config, *tau, &out),
        Command::Time { m } => commands::time(&config, *m, &out),
        Command::Curve { tau_list } => commands::curve(&config, tau_list, &out),
        Command::Homog => commands::homog(&config, &out),
        Command::Sweep => commands::sweep(&config, &out),
        Command::Verify { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<ConfigError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn tau_list_splits_on_commas() {
        let cli = Cli::try_parse_from(["timeopt", "curve", "--tau-list", "0.1,0.2,0.3"]).unwrap();
        match cli.command {
            Command::Curve { tau_list } => assert_eq!(tau_list, vec![0.1, 0.2, 0.3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uppercase_bound_flag() {
        let cli = Cli::try_parse_from(["timeopt", "time", "--M", "1.5"]).unwrap();
        assert!(matches!(cli.command, Command::Time { m: Some(m) } if m == 1.5));
    }
}
