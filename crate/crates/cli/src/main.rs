use clap::error::ErrorKind;
use clap::Parser;
use h1spec_cli::{parse_config, parse_config_str, run, CliError, CliResult, Command};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "h1spec", version, about = "Spectral experiments for half-line Schrödinger operators")]
struct Args {
    /// transfer, prufer, mfun, density, classify, shortrange, sparse or check
    command: Command,
    /// TOML experiment description (optional for `check`)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads
    #[arg(long, env = "H1SPEC_WORKERS")]
    workers: Option<usize>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn execute(args: Args) -> CliResult<PathBuf> {
    let workers = match args.workers {
        Some(0) => return Err(CliError::Usage("--workers must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let config = match (&args.config, args.command) {
        (Some(p), _) => parse_config(p)?,
        (None, Command::Check) => parse_config_str("")?,
        (None, _) => return Err(CliError::Usage("--config <file> is required".into())),
    };
    run(args.command, &config, workers, &args.out)
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Usage(e.kind().to_string() + ": " + &e.render().to_string())),
    };
    match execute(args) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}
