use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pfsq::{cli, model, Error};

#[derive(Parser)]
#[command(name = "pfsq", version, about = "Open queueing network solver and routing optimizer")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a model file and print the per-node report
    Solve { file: PathBuf },
    /// Compare parallel, tandem and feedback residence for (rate, S, m)
    Equivalence {
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        service: f64,
        #[arg(long)]
        m: u32,
    },
    /// Optimal routing over a heterogeneous parallel array
    Optimize {
        #[arg(long)]
        rate: f64,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        services: Vec<f64>,
    },
    /// CSV response-time profile of a fast/slow queue pair
    Sweep {
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        fast: f64,
        #[arg(long)]
        slow: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    /// Simulate a model file and compare with the analytic result
    Simulate {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        completions: Option<usize>,
    },
}

fn run(command: Command) -> Result<(String, u8), Error> {
    let out = match command {
        Command::Solve { file } => cli::cmd_solve(&model::parse_model(file)?)?,
        Command::Equivalence { rate, service, m } => {
            let eq = cli::equivalence(rate, service, m)?;
            let text = cli::render_equivalence(rate, service, m, &eq);
            return Ok((text, if eq.holds { 0 } else { 1 }));
        }
        Command::Optimize { rate, services } => cli::cmd_optimize(rate, &services)?,
        Command::Sweep {
            rate,
            fast,
            slow,
            steps,
        } => cli::cmd_sweep(rate, fast, slow, steps)?,
        Command::Simulate {
            file,
            seed,
            completions,
        } => cli::cmd_simulate(&model::parse_model(file)?, seed, completions)?,
    };
    Ok((out, 0))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
