use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fvo_cli::pipeline::{self, CliError, Overrides};
use fvo_cli::{OutputFormat, RunConfig, RunReport};

#[derive(Parser)]
#[command(
    name = "fvo",
    version,
    about = "Virtual-orbital fragmentation energies and qubit budgets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the expansion and write the report.
    Run(RunArgs),
    /// Qubit and ansatz estimates only; no solver is called.
    Budget(RunArgs),
    /// Check a config and list every problem found.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the bundled test systems, or write them to a directory.
    Fixtures {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Report path; overrides `output.path`. Without either, stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,
    /// Worker threads for subset evaluations.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    max_order: Option<usize>,
    /// mp2, fci or vqe.
    #[arg(long)]
    solver: Option<String>,
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        stage: "output",
        path: path.to_path_buf(),
        source,
    })
}

fn emit(cfg: &RunConfig, args: &RunArgs, report: &RunReport) -> Result<(), CliError> {
    let format = match &args.format {
        Some(f) => f.parse::<OutputFormat>().expect("clap checked the value"),
        None => cfg.output.format,
    };
    let text = report.render(format);
    let path = args
        .output
        .clone()
        .or_else(|| cfg.output.path.as_ref().map(|p| cfg.resolve(p)));
    match path {
        Some(p) => write(&p, &text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                stage: "output",
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn run_like(args: &RunArgs, budget_only: bool) -> Result<(), CliError> {
    let cfg = pipeline::load_config(&args.config)?;
    let overrides = Overrides {
        max_order: args.max_order,
        solver: args.solver.clone(),
    };
    let (cfg, applied) = pipeline::apply_overrides(cfg, &overrides)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.jobs {
        pool = pool.num_threads(n.max(1));
    }
    let pool = pool.build().map_err(|e| CliError::Input {
        stage: "jobs",
        message: e.to_string(),
    })?;
    let report = pool.install(|| {
        if budget_only {
            pipeline::budget(&cfg, applied)
        } else {
            pipeline::run(&cfg, applied)
        }
    })?;
    emit(&cfg, args, &report)
}

fn fixtures(dir: Option<&Path>) -> Result<(), CliError> {
    let files = fvo::fixtures::FILES
        .iter()
        .copied()
        .chain([("reference.json", fvo::fixtures::REFERENCE_JSON)]);
    match dir {
        None => {
            for (name, _) in files {
                println!("{name}");
            }
        }
        Some(d) => {
            fs::create_dir_all(d).map_err(|source| CliError::Io {
                stage: "fixtures",
                path: d.to_path_buf(),
                source,
            })?;
            for (name, text) in files {
                write(&d.join(name), text)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => run_like(a, false),
        Command::Budget(a) => run_like(a, true),
        Command::Validate { config } => pipeline::load_config(config).map(|c| {
            println!("ok: {} (sha256 {})", config.display(), c.checksum);
        }),
        Command::Fixtures { dir } => fixtures(dir.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
