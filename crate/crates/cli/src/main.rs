use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinbath_cli::Command;

#[derive(Parser)]
#[command(
    name = "spinbath",
    version,
    about = "Decoherence of a qubit coupled to several structured baths"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Qubit dynamics with the configured method.
    Dynamics(RunArgs),
    /// Decoherence-rate map over the (eps_x, eps_z) grid.
    Ratemap(RunArgs),
    /// Dressing factors over the sweep grid.
    Kappa(RunArgs),
    /// Reaction-coordinate truncation study over simulation.levels_list.
    Convergence(RunArgs),
    /// Exact pure-dephasing dynamics.
    Exact(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration or manifest file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding output.directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Dynamics(a) => (Command::Dynamics, a),
        Sub::Ratemap(a) => (Command::Ratemap, a),
        Sub::Kappa(a) => (Command::Kappa, a),
        Sub::Convergence(a) => (Command::Convergence, a),
        Sub::Exact(a) => (Command::Exact, a),
    };
    match spinbath_cli::run(command, &args.config, args.out, args.jobs) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinbath: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
