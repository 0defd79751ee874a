use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod verify;

use commands::{CharArgs, GeneratorArgs, LinkArgs, OmegaArgs, SimulateArgs};
use config::{GlobalArgs, SessionConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "qgt", version, about = "Characters, links, coherent measures and Markov dynamics for q-deformed B, C, D")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Character polynomial of highest weight λ with its quantum dimension
    Char(CharArgs),
    /// Quantum dimension of λ
    Qdim(CharArgs),
    /// Link rows Λ(λ, ·) to rank N - 1
    Link(LinkArgs),
    /// Coherent measure of ω = (α, β, γ) at rank N
    Coherent(OmegaArgs),
    /// Truncated Markov generator
    Generator(GeneratorArgs),
    /// Gillespie trajectories from a saved generator
    Simulate(SimulateArgs),
    /// Self-checks of every module
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: verify::Suite,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn print(body: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(body.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = SessionConfig::resolve(&cli.global)?;
    match cli.command {
        Command::Char(a) => print(&commands::cmd_char(&cfg, &a)?),
        Command::Qdim(a) => print(&commands::cmd_qdim(&cfg, &a)?),
        Command::Link(a) => print(&commands::cmd_link(&cfg, &a)?),
        Command::Coherent(a) => print(&commands::cmd_coherent(&cfg, &a)?),
        Command::Generator(a) => {
            let (body, summary) = commands::cmd_generator(&cfg, &a)?;
            match commands::deliver(body, a.out.as_deref())? {
                Some(body) => print(&body),
                None => print(&summary),
            }
        }
        Command::Simulate(a) => {
            let (body, summary) = commands::cmd_simulate(&cfg, &a)?;
            match commands::deliver(body, a.out.as_deref())? {
                Some(body) => {
                    eprint!("{summary}");
                    print(&body)
                }
                None => print(&summary),
            }
        }
        Command::Verify { suite, inject_fault } => {
            let report = verify::run(&cfg, suite, inject_fault);
            print(&(serde_json::to_string_pretty(&report)? + "\n"))?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| c.status == "fail")
                    .map(|c| c.name.as_str())
                    .collect();
                Err(CliError::Invariant(format!("failed: {}", failed.join("; "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::Inadmissible { message, report } = &e {
                let body = serde_json::json!({
                    "error": "inadmissible",
                    "message": message,
                    "admissibility": report,
                });
                let _ = print(&(body.to_string() + "\n"));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
