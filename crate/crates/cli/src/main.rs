use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use embedded_dirac_cli::{construct, sweep, verify, CliError, CliResult, RunConfig};

#[derive(Parser)]
#[command(name = "edirac", version, about = "Embedded eigenvalues for half-line Dirac operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the potential and write potential.csv plus manifest.json.
    Construct(Common),
    /// Integrate, check every bound and write trajectories plus certificate.json.
    Verify(Common),
    /// Run the supercritical pipeline over the config's (A, lambda) grid.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration (a manifest from `construct` also works).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads for parallel runs.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn load(c: &Common) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::load(&c.config)?;
    if let Some(t) = c.tol {
        cfg.tol = t;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let (Command::Construct(c) | Command::Verify(c) | Command::Sweep(c)) = &cli.command;
    let cfg = load(c)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", c.jobs.unwrap_or(0))))?;
    pool.install(|| match &cli.command {
        Command::Construct(_) => construct(&cfg, &c.out).map(|_| ()),
        Command::Verify(_) => verify(&cfg, &c.out).map(|_| ()),
        Command::Sweep(_) => sweep(&cfg, &c.out).map(|_| ()),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = serde_json::json!({ "error": "usage", "message": e.to_string() });
            eprintln!("{msg}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
