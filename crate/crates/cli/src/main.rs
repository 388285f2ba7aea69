use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use afc_cli::{load, parse_values, prepare, CliError, Outcome, Written};

#[derive(Parser)]
#[command(name = "afc", version, about = "Atomic-frequency-comb memory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config (or a previous manifest).
    Run { config: PathBuf },
    /// Run once per value of a numeric config key and tabulate the results.
    Sweep {
        config: PathBuf,
        /// Dotted config key, e.g. `burn.pair_separation_s`.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn report(w: Written) -> ExitCode {
    print!("{}", w.summary);
    eprintln!("wrote {}", w.dir.display());
    match w.outcome {
        Outcome::Complete => ExitCode::SUCCESS,
        Outcome::NoSignal(why) => {
            eprintln!("afc: {why}");
            ExitCode::from(4)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => load(&config).and_then(|cfg| afc_cli::run(&cfg)).map(report),
        Command::Sweep { config, param, values } => load(&config)
            .and_then(|cfg| Ok((cfg, parse_values(&values)?)))
            .and_then(|(cfg, values)| afc_cli::sweep(&cfg, &param, &values))
            .map(report),
        Command::Validate { config } => load(&config).and_then(|cfg| {
            prepare(&cfg)?;
            println!("ok: {}", cfg.experiment.name());
            Ok(ExitCode::SUCCESS)
        }),
    };
    result.unwrap_or_else(|e: CliError| {
        eprintln!("afc: {e}");
        ExitCode::from(e.exit_code() as u8)
    })
}
