use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rittkit::report::{run, write_outputs, AnalysisConfig, Command};

/// Config-driven Ritt / Stolz / subordination analyses.
#[derive(Parser)]
#[command(name = "rittkit", version)]
struct Cli {
    command: Command,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("RITTKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = AnalysisConfig::load(&cli.config).and_then(|config| {
        if config.command != cli.command {
            return Err(rittkit::Error::Validation {
                field: "command".into(),
                message: format!("config is for {} but {} was requested", config.command.name(), cli.command.name()),
            });
        }
        let report = run(&config.with_seed(cli.seed))?;
        write_outputs(&report, &cli.out)
    });
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rittkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
