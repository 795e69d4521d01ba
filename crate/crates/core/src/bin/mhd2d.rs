use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mhd2d::cli::{self, CliError, LpArgs, EXIT_USAGE};

/// Nonhomogeneous incompressible MHD on the periodic square, with vacuum.
#[derive(Parser, Debug)]
#[command(name = "mhd2d", version)]
struct Args {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario and write snapshots, series.csv and summary.txt.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a verification suite (exact, density, energy, lp, regularity,
    /// identities, functionals, determinism, or all).
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Littlewood-Paley analysis of a snapshot or a directory of snapshots.
    Lp {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        qmin: i32,
        #[arg(long)]
        qmax: i32,
        #[arg(long, default_value_t = 4.0)]
        q: f64,
        /// Field to analyse (first field by default).
        #[arg(long)]
        field: Option<String>,
        /// Write the band decomposition of the last snapshot here.
        #[arg(long)]
        bands: Option<PathBuf>,
    },
    /// Summarize a series.csv as a fixed-width table.
    Report {
        #[arg(long)]
        series: PathBuf,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MHD2D_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("MHD2D_THREADS must be a positive integer, got {raw:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    configure_threads()?;
    match cmd {
        Command::Run { config } => cli::cmd_run(&config, out),
        Command::Verify { suite, config } => cli::cmd_verify(&suite, config.as_deref(), out),
        Command::Lp {
            input,
            qmin,
            qmax,
            q,
            field,
            bands,
        } => cli::cmd_lp(
            &LpArgs {
                input,
                q_min: qmin,
                q_max: qmax,
                q,
                field,
                bands,
            },
            out,
        ),
        Command::Report { series } => cli::cmd_report(&series, out),
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match dispatch(args.cmd, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("mhd2d: {e}");
            e.exit_code()
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
