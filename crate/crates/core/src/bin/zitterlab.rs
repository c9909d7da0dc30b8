use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use zitterlab::cli::{run_from_file, Command};

#[derive(Clone, Copy, ValueEnum)]
enum Cmd {
    AlgebraCheck,
    Zitter,
    Pairsim,
    Scan,
    Calc,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::AlgebraCheck => Command::AlgebraCheck,
            Cmd::Zitter => Command::Zitter,
            Cmd::Pairsim => Command::Pairsim,
            Cmd::Scan => Command::Scan,
            Cmd::Calc => Command::Calc,
        }
    }
}

/// Dirac algebra checks, zitterbewegung runs and desk-scale pair creation.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    command: Cmd,
    /// Flat JSON config with dotted-section keys
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write SVG plots
    #[arg(long)]
    svg: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run_from_file(cli.command.into(), &cli.config, cli.out.as_deref(), cli.svg) {
        Ok(summary) => {
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
